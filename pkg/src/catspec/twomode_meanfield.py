"""Closed-form mean-field branches and cat-state energies of the two-mode model.

Couplings are the tilde-rescaled U(N-1)/N unless the params say otherwise;
with that rescale the cat energies below are exact expectation values of the
bare Fock-space Hamiltonian in the two product states and their superpositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import CatSpecError, DegenerateInteractionError, ModelParams, ParameterError

TILDE_DEFAULT = True

# exp() underflows to zero below this
_LOG_UNDERFLOW = -745.0


class ZeroCouplingError(CatSpecError, ValueError):
    """lambda == 0: the relative phase of the two amplitudes is unconstrained."""


class BranchLabel(str, Enum):
    SYMMETRIC = "symmetric"
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class MeanFieldBranch:
    alpha: float
    beta: float
    energy: float
    label: BranchLabel


@dataclass(frozen=True)
class Overlap:
    value: float
    log_value: float
    underflow: bool


@dataclass(frozen=True)
class CatDiagnostics:
    overlap_eps: float
    log_eps: float
    e_plus: float
    e_minus: float
    delta_e: float
    cat_size: float
    delta_e_small_cat: float
    delta_e_large_cat: float


def mean_energy(params: ModelParams, alpha: float, beta: float) -> float:
    """<psi_N|H|psi_N> for real amplitudes with alpha^2 + beta^2 = N."""
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    a2, b2 = alpha * alpha, beta * beta
    return 0.5 * u0 * (a2 * a2 + b2 * b2) + u1 * a2 * b2 - 2.0 * params.lam * alpha * beta


def _Lambda(params: ModelParams) -> float:
    return params.Lambda("two_mode", default_tilde=TILDE_DEFAULT)


def symmetric_energy(params: ModelParams) -> float:
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    n = params.n_atoms
    return 0.25 * n * n * (u0 + u1) - params.lam * n


def split_energy(params: ModelParams) -> float:
    """Energy of the two broken-symmetry solutions, U0 N^2/2 - lambda^2/(U1-U0)."""
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    if u1 == u0:
        raise DegenerateInteractionError("split branches need U1 != U0")
    n = params.n_atoms
    return 0.5 * u0 * n * n - params.lam ** 2 / (u1 - u0)


def mean_field_branches(params: ModelParams) -> list[MeanFieldBranch]:
    """Stationary real-amplitude solutions, lowest energy first."""
    if params.lam == 0:
        raise ZeroCouplingError("lambda = 0: amplitude phases are unconstrained")
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    a0 = math.sqrt(n / 2.0)
    sym = MeanFieldBranch(a0, a0, symmetric_energy(params), BranchLabel.SYMMETRIC)
    if u1 <= u0:
        return [sym]
    L = _Lambda(params)
    if L > 1.0:
        return [sym]
    root = math.sqrt(max(0.0, 1.0 - L * L))
    ap = math.sqrt(0.5 * n * (1.0 + root))
    am = math.sqrt(0.5 * n * (1.0 - root))
    e = split_energy(params)
    branches = [MeanFieldBranch(ap, am, e, BranchLabel.PLUS),
                MeanFieldBranch(am, ap, e, BranchLabel.MINUS), sym]
    return sorted(branches, key=lambda b: b.energy)


def stationarity_residuals(params: ModelParams, branch: MeanFieldBranch) -> tuple[float, float, float]:
    """(mu from first equation, mu from second, |difference|)."""
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    a, b, lam = branch.alpha, branch.beta, params.lam
    mu_a = u0 * a * a + u1 * b * b - lam * b / a
    mu_b = u0 * b * b + u1 * a * a - lam * a / b
    return mu_a, mu_b, abs(mu_a - mu_b)


def _check_cat_regime(params: ModelParams) -> float:
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    if not u1 > u0:
        raise ParameterError("cat states need U1 > U0")
    L = _Lambda(params)
    if not 0.0 < L < 1.0:
        raise ParameterError(f"cat states need 0 < Lambda < 1, got {L!r}")
    return L


def cat_overlap(params: ModelParams) -> Overlap:
    """<psi_N^+|psi_N^-> = Lambda^N, evaluated in log space."""
    L = _check_cat_regime(params)
    log_eps = params.n_atoms * math.log(L)
    if log_eps < _LOG_UNDERFLOW:
        return Overlap(0.0, log_eps, True)
    return Overlap(math.exp(log_eps), log_eps, False)


def explicit_log_overlap(params: ModelParams) -> float:
    """log of ((alpha+ alpha- + beta+ beta-)/N)^N from the branch amplitudes."""
    branches = {b.label: b for b in mean_field_branches(params)}
    p, m = branches[BranchLabel.PLUS], branches[BranchLabel.MINUS]
    s = (p.alpha * m.alpha + p.beta * m.beta) / params.n_atoms
    return params.n_atoms * math.log(s)


def cat_energies(params: ModelParams) -> CatDiagnostics:
    """Energies of the even (+) and odd (-) superpositions of the two branches."""
    L = _check_cat_regime(params)
    ov = cat_overlap(params)
    eps = ov.value
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    base = 2.0 * u0 - L * L * (u1 - u0)
    cross = 3.0 * u0 - u1
    pref = 0.25 * n * n
    e_plus = pref * (base + eps * cross) / (1.0 + eps)
    # E- - E+ = (N^2/2)(U1-U0)(1-Lambda^2) eps/(1-eps^2): no cancellation at small eps
    delta_e = 0.5 * n * n * (u1 - u0) * (1.0 - L * L) * eps / (1.0 - eps * eps)
    e_minus = e_plus + delta_e
    small_cat = 0.5 * n * (u1 - u0)
    large_cat = eps * abs(ov.log_value) * n * (u1 - u0)
    size = math.inf if ov.underflow else 1.0 / eps
    return CatDiagnostics(eps, ov.log_value, e_plus, e_minus, delta_e, size, small_cat, large_cat)


def log_delta_e(params: ModelParams) -> float:
    """log(E- - E+), finite even where eps underflows."""
    L = _check_cat_regime(params)
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    log_eps = n * math.log(L)
    return (math.log(0.5 * n * n * (u1 - u0) * (1.0 - L * L)) + log_eps
            - math.log1p(-math.exp(2 * log_eps)))


def meanfield_row(params: ModelParams) -> dict:
    """Summary used by the CLI: ground mean-field energy plus cat diagnostics when defined."""
    row = {"E_mf": min(b.energy for b in mean_field_branches(params)),
           "eps": math.nan, "E_plus": math.nan, "E_minus": math.nan}
    try:
        d = cat_energies(params)
    except ParameterError:
        return row
    row.update(eps=d.overlap_eps, E_plus=d.e_plus, E_minus=d.e_minus)
    return row


def amplitude_grid_minimum(params: ModelParams, points: int = 20001) -> tuple[float, float, float]:
    """Brute-force minimum of the mean energy on alpha = sqrt(N) cos t, beta = sqrt(N) sin t."""
    n = params.n_atoms
    t = np.linspace(0.0, math.pi / 2, points)
    a, b = math.sqrt(n) * np.cos(t), math.sqrt(n) * np.sin(t)
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    e = 0.5 * u0 * (a ** 4 + b ** 4) + u1 * a * a * b * b - 2 * params.lam * a * b
    i = int(np.argmin(e))
    return float(e[i]), float(a[i]), float(b[i])
