"""Exact diagonalization of the two-mode Hamiltonian in the Fock basis |m>_A |N-m>_B."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (CatSpecError, LambdaConvention, ModelParams, NumberDistribution, Spectrum,
                   lambda_from_Lambda)
from .tridiag import EigenSolverError, TridiagonalHamiltonian, solve_lowest

TILDE_DEFAULT = False

SWEEP_COLUMNS = ("Lambda", "E0", "gap01", "gap12", "ratio", "gap03")


class MissingEigenvectorError(CatSpecError, ValueError):
    pass


def build_hamiltonian(params: ModelParams) -> TridiagonalHamiltonian:
    """Matrix elements of the two-mode Hamiltonian with the trap term dropped."""
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    if max(abs(u0), abs(u1)) * float(n) * float(n) > 1e300:
        raise OverflowError(f"interaction energy N^2 U overflows for N={n}")
    # integer products first, so that the matrix is exactly persymmetric in floats
    m = np.arange(n + 1, dtype=np.int64)
    same = (m * (m - 1) + (n - m) * (n - m - 1)).astype(float)
    cross = (m * (n - m)).astype(float)
    diag = 0.5 * u0 * same + u1 * cross
    mm = m[:-1]
    offdiag = -params.lam * np.sqrt(((mm + 1) * (n - mm)).astype(float))
    return TridiagonalHamiltonian(diag, offdiag)


def diagonalize(h: TridiagonalHamiltonian, k_lowest: int, want_vectors: bool = True) -> Spectrum:
    """The ``k_lowest`` smallest eigenpairs, ascending.

    Eigenvectors carry the sign convention "first nonzero coefficient positive".
    """
    res = solve_lowest(h, k_lowest, want_vectors)
    return Spectrum(eigenvalues=res.values, eigenvectors=res.vectors, k_computed=len(res.values),
                    gaps=res.gaps, parities=res.parities)


def ground_distribution(spec: Spectrum) -> NumberDistribution:
    if spec.eigenvectors is None or len(spec.eigenvectors) == 0:
        raise MissingEigenvectorError("spectrum carries no eigenvectors")
    q = np.asarray(spec.eigenvectors[0], dtype=float)
    p = q * q
    return NumberDistribution(p / p.sum())


@dataclass
class SweepRow:
    Lambda: float
    E0: float = math.nan
    gap01: float = math.nan
    gap12: float = math.nan
    ratio: float = math.nan
    gap03: float = math.nan
    gap02: float = math.nan
    valid: bool = True
    error: str = ""

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, c) for c in SWEEP_COLUMNS)


def row_from_spectrum(Lambda: float, spec: Spectrum) -> SweepRow:
    g01 = spec.gap(0, 1)
    g12 = spec.gap(1, 2)
    return SweepRow(Lambda=Lambda, E0=float(spec.eigenvalues[0]), gap01=g01, gap12=g12,
                    ratio=g01 / g12 if g12 != 0 else math.nan,
                    gap03=spec.gap(0, 3), gap02=spec.gap(0, 2))


def _sweep_point(args) -> SweepRow:
    params, Lambda = args
    try:
        p = params.with_lambda(lambda_from_Lambda(params, Lambda, LambdaConvention.TWO_MODE, TILDE_DEFAULT))
        spec = diagonalize(build_hamiltonian(p), min(4, p.n_atoms + 1), want_vectors=False)
        if spec.k_computed < 4:
            raise EigenSolverError(f"need 4 levels, model has {spec.k_computed}")
        return row_from_spectrum(Lambda, spec)
    except (CatSpecError, ValueError, OverflowError) as exc:
        return SweepRow(Lambda=Lambda, valid=False, error=f"{type(exc).__name__}: {exc}")


def gap_ratio_sweep(params: ModelParams, Lambda_grid: Iterable[float], executor=None) -> list[SweepRow]:
    """One independent diagonalization per Lambda (two-mode convention).

    Rows come back in input order; a failed point is marked invalid instead
    of aborting the sweep. ``executor`` is any object with an ordered ``map``.
    """
    tasks = [(params, float(L)) for L in Lambda_grid]
    mapper = executor.map if executor is not None else map
    return list(mapper(_sweep_point, tasks))


def gap_sweep_direct(params: ModelParams, lambdas: Sequence[float]) -> list[SweepRow]:
    """Same table, but indexed by lambda itself (usable when U1 == U0)."""
    rows = []
    for lam in lambdas:
        spec = diagonalize(build_hamiltonian(params.with_lambda(lam)), 4, want_vectors=False)
        rows.append(row_from_spectrum(lam, spec))
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], fh, extra: dict | None = None) -> None:
    from .output import fmt

    fh.write(",".join(SWEEP_COLUMNS) + "\n")
    for r in rows:
        fh.write(",".join(fmt(v) for v in r.as_tuple()) + "\n")


def write_distribution_csv(dist: NumberDistribution, fh) -> None:
    from .output import fmt

    fh.write("m,prob\n")
    for m, p in enumerate(dist.probs):
        fh.write(f"{m},{fmt(p)}\n")
