"""Adiabatic preparation: ramp Lambda down from the symmetric phase and watch
the state follow the instantaneous ground state into the cat regime."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import zgtsv

from .core import CatSpecError, LambdaConvention, ModelParams, ParameterError, lambda_from_Lambda
from .tridiag import solve_lowest
from .twomode_exact import TILDE_DEFAULT, build_hamiltonian

TABLE_COLUMNS = ("t", "Lambda", "fid0", "fid01", "norm")


class StepRejected(CatSpecError, RuntimeError):
    pass


@dataclass(frozen=True)
class RampSchedule:
    """Lambda(t) from ``Lambda_start`` to ``Lambda_end`` over ``duration``.

    ``Lambda_start == Lambda_end`` is allowed and gives a constant Hamiltonian.
    """

    Lambda_start: float
    Lambda_end: float
    duration: float
    shape: str = "linear"

    def __post_init__(self):
        if self.shape not in ("linear", "smoothstep"):
            raise ParameterError(f"unknown ramp shape {self.shape!r}")
        if not (self.Lambda_start >= self.Lambda_end > 0):
            raise ParameterError("need Lambda_start >= Lambda_end > 0")
        if not self.duration > 0:
            raise ParameterError("ramp duration must be positive")

    def Lambda(self, t: float) -> float:
        s = min(max(t / self.duration, 0.0), 1.0)
        if self.shape == "smoothstep":
            s = s * s * (3.0 - 2.0 * s)
        return self.Lambda_start + (self.Lambda_end - self.Lambda_start) * s


@dataclass
class EvolutionTable:
    t: np.ndarray
    Lambda: np.ndarray
    fid0: np.ndarray
    fid01: np.ndarray
    norm: np.ndarray
    final_state: np.ndarray
    max_step_drift: float

    def rows(self):
        return zip(self.t, self.Lambda, self.fid0, self.fid01, self.norm)


def max_dt(params: ModelParams, Lambda: float) -> float:
    """Largest step allowed at a given Lambda: 0.05 / (E_N - E_0)."""
    h = build_hamiltonian(params.with_Lambda(Lambda, LambdaConvention.TWO_MODE, TILDE_DEFAULT))
    lo = solve_lowest(h, 1, want_vectors=False).values[0]
    hi = -solve_lowest(type(h)(-h.diag, -h.offdiag), 1, want_vectors=False).values[0]
    return 0.05 / (hi - lo)


def _lowest_pair(params: ModelParams, Lambda: float):
    p = params.with_lambda(lambda_from_Lambda(params, Lambda, LambdaConvention.TWO_MODE, TILDE_DEFAULT))
    res = solve_lowest(build_hamiltonian(p), 2, want_vectors=True)
    return res.vectors


def evolve(params: ModelParams, ramp: RampSchedule, dt: float | None = None,
           record_every: int | None = None) -> EvolutionTable:
    """Integrate i dpsi/dt = H(Lambda(t)) psi with the implicit midpoint rule.

    The initial state is the ground state at ``Lambda_start``. ``dt`` defaults
    to the largest allowed step; fidelities are sampled about 200 times per run
    unless ``record_every`` says otherwise.
    """
    limit = max_dt(params, ramp.Lambda_start)
    if dt is None:
        dt = limit
    elif dt > limit * (1 + 1e-12):
        raise ParameterError(f"dt={dt} exceeds 0.05/(E_N-E_0)={limit}")
    steps = max(1, math.ceil(ramp.duration / dt))
    dt = ramp.duration / steps
    if record_every is None:
        record_every = max(1, steps // 200)

    base = build_hamiltonian(params.with_lambda(0.0))
    d = base.diag.astype(complex)
    m = np.arange(params.n_atoms, dtype=float)
    ladder = -np.sqrt((m + 1) * (params.n_atoms - m)).astype(complex)
    scale = params.n_atoms * (params.effective_u(TILDE_DEFAULT)[1] - params.effective_u(TILDE_DEFAULT)[0]) / 2.0

    psi = _lowest_pair(params, ramp.Lambda_start)[0].astype(complex)
    half = 0.5j * dt

    ts, Ls, f0s, f01s, norms = [], [], [], [], []

    def record(t, L):
        vecs = _lowest_pair(params, L)
        a0 = abs(np.vdot(vecs[0], psi)) ** 2
        a1 = abs(np.vdot(vecs[1], psi)) ** 2
        ts.append(t)
        Ls.append(L)
        f0s.append(a0)
        f01s.append(a0 + a1)
        norms.append(float(np.linalg.norm(psi)))

    record(0.0, ramp.Lambda_start)
    worst = 0.0
    for k in range(steps):
        lam = scale * ramp.Lambda((k + 0.5) * dt)
        e = lam * ladder
        # rhs = (1 - i dt/2 H) psi
        rhs = psi - half * (d * psi)
        rhs[:-1] -= half * e * psi[1:]
        rhs[1:] -= half * e * psi[:-1]
        off = half * e
        _, _, _, new, info = zgtsv(off.copy(), 1.0 + half * d, off.copy(), rhs)
        if info != 0:
            raise StepRejected(f"tridiagonal solve failed at step {k} (info={info})")
        drift = abs(np.vdot(new, new).real - np.vdot(psi, psi).real)
        if drift > 1e-12:
            raise StepRejected(f"norm drift {drift:.3e} in one step at t={(k + 1) * dt}")
        worst = max(worst, drift)
        psi = new
        if (k + 1) % record_every == 0 or k + 1 == steps:
            record((k + 1) * dt, ramp.Lambda((k + 1) * dt))

    return EvolutionTable(np.array(ts), np.array(Ls), np.array(f0s), np.array(f01s), np.array(norms),
                          psi, worst)


def parity_leak(psi: np.ndarray) -> float:
    """Weight of the odd component under m -> N - m."""
    odd = 0.5 * (psi - psi[::-1])
    return float(np.vdot(odd, odd).real)


def energy(params: ModelParams, Lambda: float, psi: np.ndarray) -> float:
    p = params.with_lambda(lambda_from_Lambda(params, Lambda, LambdaConvention.TWO_MODE, TILDE_DEFAULT))
    return float(np.vdot(psi, build_hamiltonian(p).matvec(psi)).real)
