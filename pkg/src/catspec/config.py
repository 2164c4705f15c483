"""Flat ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Lists are comma separated.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .core import CatSpecError, LambdaConvention


class ConfigError(CatSpecError, ValueError):
    pass


def _bool(text: str) -> Optional[bool]:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    if t in ("default", "auto", ""):
        return None
    raise ConfigError(f"not a boolean: {text!r}")


def _floats(text: str) -> list[float]:
    t = text.strip()
    if not t:
        return []
    out = []
    for part in t.split(","):
        v = float(part)
        if not math.isfinite(v):
            raise ConfigError(f"non-finite value {part!r}")
        out.append(v)
    return out


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _coupling(text: str) -> float:
    t = text.strip().lower().replace(" ", "")
    if t in ("lambda", "1", "1.0"):
        return 1.0
    if t in ("2lambda", "2*lambda", "2", "2.0"):
        return 2.0
    raise ConfigError(f"vari_coupling must be 'lambda' or '2lambda', got {text!r}")


@dataclass
class RunConfig:
    n_atoms: Optional[int] = None
    n_list: Optional[list] = None
    u0: Optional[float] = None
    u1: Optional[float] = None
    u1_over_u0: float = 3.0
    lam: Optional[float] = None
    Lambda: Optional[float] = None
    Lambda_convention: str = "two_mode"
    Lambda_grid: Optional[list] = None
    fig4_Lambdas: list = field(default_factory=lambda: [0.9, 0.95, 1.0, 1.05, 1.5])
    tilde_rescale: Optional[bool] = None
    levels: int = 4
    ramp_start: float = 1.5
    ramp_end: float = 0.7
    ramp_duration: float = 50.0
    ramp_shape: str = "linear"
    dt: Optional[float] = None
    vari_coupling: float = 2.0
    stride: Optional[int] = None
    a_sc_nm: float = 50.0
    a_ab_nm: float = 150.0
    x0_um: float = 3.0
    restarts: int = 3
    grid_points: int = 2048

    def resolved(self) -> dict:
        return asdict(self)


_PARSERS = {
    "n_atoms": ("n_atoms", int),
    "n_list": ("n_list", _ints),
    "u0": ("u0", float),
    "u1": ("u1", float),
    "u1_over_u0": ("u1_over_u0", float),
    "lambda": ("lam", float),
    "Lambda": ("Lambda", float),
    "Lambda_convention": ("Lambda_convention", lambda s: LambdaConvention.parse(s).value),
    "Lambda_grid": ("Lambda_grid", _floats),
    "fig4_Lambdas": ("fig4_Lambdas", _floats),
    "tilde_rescale": ("tilde_rescale", _bool),
    "levels": ("levels", int),
    "ramp.start": ("ramp_start", float),
    "ramp.end": ("ramp_end", float),
    "ramp.duration": ("ramp_duration", float),
    "ramp.shape": ("ramp_shape", str),
    "dt": ("dt", float),
    "vari_coupling": ("vari_coupling", _coupling),
    "stride": ("stride", int),
    "a_sc_nm": ("a_sc_nm", float),
    "a_ab_nm": ("a_ab_nm", float),
    "x0_um": ("x0_um", float),
    "restarts": ("restarts", int),
    "grid_points": ("grid_points", int),
}


def parse_config(text: str) -> RunConfig:
    cfg = RunConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "detuning":
            if float(value) != 0.0:
                raise ConfigError(f"line {lineno}: nonzero detuning is not supported")
            continue
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        attr, conv = _PARSERS[key]
        try:
            setattr(cfg, attr, conv(value))
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from None
    if cfg.lam is not None and cfg.Lambda is not None:
        raise ConfigError("give either 'lambda' or 'Lambda', not both")
    return cfg


def load_config(path: Optional[str | Path]) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
