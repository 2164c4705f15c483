"""CSV/SVG writers and the run manifest embedded in every output file."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence


def fmt(x) -> str:
    """12 significant digits; integers and strings pass through."""
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class RunManifest:
    subcommand: str
    config_hash: str
    convention_flags: dict
    outputs: list[str] = field(default_factory=list)

    def header_lines(self) -> list[str]:
        lines = [f"# subcommand: {self.subcommand}", f"# config_hash: {self.config_hash}"]
        for k in sorted(self.convention_flags):
            lines.append(f"# {k}: {self.convention_flags[k]}")
        return lines

    def to_dict(self) -> dict:
        return {"subcommand": self.subcommand, "config_hash": self.config_hash,
                "convention_flags": self.convention_flags, "outputs": list(self.outputs)}


def write_csv(path: Path, manifest: RunManifest, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in manifest.header_lines():
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    manifest.outputs.append(path.name)
    return path


def read_csv_body(path: Path) -> list[list[str]]:
    """Rows of a CSV written by :func:`write_csv`, header comments stripped."""
    out = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#") or not line:
            continue
        out.append(line.split(","))
    return out


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_svg(path: Path, series: dict[str, tuple[Sequence[float], Sequence[float]]],
              title: str = "", xlabel: str = "", ylabel: str = "",
              width: int = 640, height: int = 420) -> Path:
    """Bare polyline plot; non-finite points are skipped."""
    pad = 50
    pts_all = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys)
               if math.isfinite(x) and math.isfinite(y)]
    if pts_all:
        xmin = min(p[0] for p in pts_all)
        xmax = max(p[0] for p in pts_all)
        ymin = min(p[1] for p in pts_all)
        ymax = max(p[1] for p in pts_all)
    else:
        xmin, xmax, ymin, ymax = 0.0, 1.0, 0.0, 1.0
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0

    def sx(x):
        return pad + (x - xmin) / (xmax - xmin) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - ymin) / (ymax - ymin) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
             'fill="none" stroke="black"/>',
             f'<text x="{width / 2}" y="20" text-anchor="middle">{title}</text>',
             f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
             f'<text x="12" y="{height / 2}" transform="rotate(-90 12 {height / 2})" '
             f'text-anchor="middle">{ylabel}</text>',
             f'<text x="{pad}" y="{height - pad + 15}" font-size="10">{fmt(xmin)}</text>',
             f'<text x="{width - pad}" y="{height - pad + 15}" font-size="10" text-anchor="end">{fmt(xmax)}</text>',
             f'<text x="{pad - 4}" y="{height - pad}" font-size="10" text-anchor="end">{fmt(ymin)}</text>',
             f'<text x="{pad - 4}" y="{pad + 10}" font-size="10" text-anchor="end">{fmt(ymax)}</text>']
    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys)
                       if math.isfinite(x) and math.isfinite(y))
        parts.append(f'<polyline fill="none" stroke="{color}" points="{pts}"/>')
        parts.append(f'<text x="{width - pad - 4}" y="{pad + 14 * (i + 1)}" font-size="11" '
                     f'text-anchor="end" fill="{color}">{name}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
    return Path(path)
