"""Number-resolved variational model: for every A-atom number m the two species
occupy their own Gaussian orbitals, and the amplitudes q_m solve a tridiagonal
eigenproblem that generalizes the two-mode Hamiltonian.

Orbitals satisfy alpha_m = beta_m, so the B orbital holding N - m atoms is
alpha_{N-m}. Widths of the pair (m, N - m) minimize the functional

    F_m = int [ a~_m h a~_m + a~_{N-m} h a~_{N-m} + (U0/2)(a~_m^4 + a~_{N-m}^4)
                + U1 a~_m^2 a~_{N-m}^2 - 2 c a~_m a~_{N-m} ],   a~_m = sqrt(m) alpha_m,

whose stationarity conditions are the orbital equations with coupling c
(``vari_coupling`` times lambda, 2 by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .core import CatSpecError, ModelParams, ParameterError, Spectrum
from .field_meanfield import gauss_quartic, pair_energy
from .tridiag import TridiagonalHamiltonian
from .twomode_exact import SweepRow, diagonalize, row_from_spectrum

TILDE_DEFAULT = False
VARI_COUPLINGS = (1.0, 2.0)


class OrbitalSolveError(CatSpecError, RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Gaussian-mixture orbitals  phi(r) = sum_k c_k exp(-p_k r^2), unit normalized


@dataclass(frozen=True)
class Orbital:
    coeffs: np.ndarray
    exps: np.ndarray

    @classmethod
    def gaussian(cls, width: float) -> "Orbital":
        p = 1.0 / (4.0 * width * width)
        c = (2.0 * math.pi * width * width) ** -0.75
        return cls(np.array([c]), np.array([p]))

    @classmethod
    def mixture(cls, widths: Sequence[float], weights: Sequence[float]) -> "Orbital":
        """Normalized sum of Gaussians; ``weights`` are relative coefficients of the unit Gaussians."""
        parts = [cls.gaussian(w) for w in widths]
        c = np.array([w * o.coeffs[0] for w, o in zip(weights, parts)])
        p = np.array([o.exps[0] for o in parts])
        raw = cls(c, p)
        return cls(c / math.sqrt(raw.overlap(raw)), p)

    def _pair(self, other):
        cc = np.outer(self.coeffs, other.coeffs)
        t = self.exps[:, None] + other.exps[None, :]
        return cc, t

    def overlap(self, other: "Orbital") -> float:
        cc, t = self._pair(other)
        return float(np.sum(cc * (math.pi / t) ** 1.5))

    def one_body(self, other: "Orbital") -> float:
        """<self| -lap/2 + r^2/2 |other>."""
        cc, t = self._pair(other)
        pq = self.exps[:, None] * other.exps[None, :]
        return float(np.sum(cc * (math.pi / t) ** 1.5 * (3.0 * pq / t + 0.75 / t)))

    def values(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.exp(-np.multiply.outer(r * r, self.exps)) @ self.coeffs


def quartic(o1: Orbital, o2: Orbital, o3: Orbital, o4: Orbital) -> float:
    c = np.einsum("i,j,k,l->ijkl", o1.coeffs, o2.coeffs, o3.coeffs, o4.coeffs)
    t = (o1.exps[:, None, None, None] + o2.exps[None, :, None, None]
         + o3.exps[None, None, :, None] + o4.exps[None, None, None, :])
    return float(np.sum(c * (math.pi / t) ** 1.5))


def pair_energy_orbitals(n1: float, o1: Orbital, n2: float, o2: Orbital, u0: float, u1: float,
                         coupling: float) -> float:
    e = n1 * o1.one_body(o1) + n2 * o2.one_body(o2)
    e += 0.5 * u0 * (n1 * n1 * quartic(o1, o1, o1, o1) + n2 * n2 * quartic(o2, o2, o2, o2))
    e += u1 * n1 * n2 * quartic(o1, o1, o2, o2)
    if coupling:
        e -= 2.0 * coupling * math.sqrt(n1 * n2) * o1.overlap(o2)
    return e


# ---------------------------------------------------------------------------
# orbital widths


@dataclass
class VariationalState:
    widths: np.ndarray
    solved: np.ndarray  # m values actually optimized
    failed: list = field(default_factory=list)
    qvec: Optional[np.ndarray] = None
    energy: float = math.nan
    n_atoms: int = 0

    @property
    def amps(self) -> np.ndarray:
        m = np.arange(len(self.widths), dtype=float)
        return m / (2.0 * math.pi * self.widths ** 2) ** 1.5


_NM = {"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20_000, "maxfev": 20_000}


def _solve_pair(m: int, n: int, u0: float, u1: float, c: float, guess):
    """Widths (a_m, a_{N-m}) minimizing F_m; returns (a_m, a_{N-m}, ok)."""
    if m == 0:
        res = minimize_scalar(lambda x: pair_energy(0.0, 1.0, n, math.exp(x), u0, u1, 0.0),
                              bounds=(-6.0, 6.0), method="bounded", options={"xatol": 1e-12})
        return math.nan, math.exp(res.x), bool(res.success)
    if 2 * m == n:
        res = minimize_scalar(lambda x: pair_energy(m, math.exp(x), m, math.exp(x), u0, u1, c),
                              bounds=(-6.0, 6.0), method="bounded", options={"xatol": 1e-12})
        a = math.exp(res.x)
        return a, a, bool(res.success)
    x0 = np.log(np.asarray(guess, dtype=float))
    res = minimize(lambda x: pair_energy(m, math.exp(x[0]), n - m, math.exp(x[1]), u0, u1, c),
                   x0, method="Nelder-Mead", options=_NM)
    return math.exp(res.x[0]), math.exp(res.x[1]), bool(res.success)


def solve_orbitals(params: ModelParams, lam: float, vari_coupling: float = 2.0,
                   stride: Optional[int] = None) -> VariationalState:
    """Gaussian widths a_m, m = 0..N.

    Pairs (m, N - m) are solved for m <= N/2 every ``stride`` steps (default
    ceil(N/200)) with warm starts; the rest is interpolated in log width.
    """
    n = params.n_atoms
    if n < 10:
        raise ParameterError("the number-resolved model needs N >= 10")
    if vari_coupling not in VARI_COUPLINGS:
        raise ParameterError(f"vari_coupling must be one of {VARI_COUPLINGS}")
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    c = vari_coupling * lam
    stride = max(1, math.ceil(n / 200)) if stride is None else int(stride)
    half = n // 2
    ms = sorted(set(range(0, half + 1, stride)) | {1, half})
    lower, upper, failed = {}, {}, []
    guess = (1.0, 1.0)
    for m in ms:
        try:
            a_lo, a_hi, ok = _solve_pair(m, n, u0, u1, c, guess)
        except (ValueError, OverflowError, FloatingPointError):
            ok = False
        if not ok:
            failed.append(m)
            continue
        if m > 0:
            lower[m] = a_lo
            guess = (a_lo, a_hi)
        upper[m] = a_hi
    good_lo = sorted(lower)
    good_hi = sorted(upper)
    if not good_lo or not good_hi:
        raise OrbitalSolveError("every orbital solve failed")
    mm = np.arange(half + 1, dtype=float)
    log_lo = np.interp(mm, good_lo, np.log([lower[k] for k in good_lo]))
    log_hi = np.interp(mm, good_hi, np.log([upper[k] for k in good_hi]))
    widths = np.empty(n + 1)
    widths[: half + 1] = np.exp(log_lo)
    widths[n - np.arange(half + 1)] = np.exp(log_hi)
    if n % 2 == 0:
        widths[half] = math.exp(log_lo[half])
    widths[0] = widths[1]  # m = 0 carries no atoms; any width will do
    return VariationalState(widths=widths, solved=np.array(ms), failed=failed, n_atoms=n)


# ---------------------------------------------------------------------------
# q-space Hamiltonian


@dataclass
class QHamiltonian:
    matrix: TridiagonalHamiltonian
    asymmetry: float  # max |lambda K_m - lambda L_{m+1}| before averaging


def build_q_hamiltonian(widths: Sequence[float] | Sequence[Orbital], params: ModelParams,
                        lam: float) -> QHamiltonian:
    """Tridiagonal matrix in the basis |m>: diagonal E_m, off-diagonal -lambda (K_m + L_{m+1})/2.

    ``widths`` may be Gaussian widths or ready-made orbitals, indexed by m.
    """
    n = params.n_atoms
    orbs = [w if isinstance(w, Orbital) else Orbital.gaussian(float(w)) for w in widths]
    if len(orbs) != n + 1:
        raise ParameterError(f"need {n + 1} orbitals, got {len(orbs)}")
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    half = n // 2
    diag = np.empty(n + 1)
    for m in range(half + 1):
        diag[m] = pair_energy_orbitals(m, orbs[m], n - m, orbs[n - m], u0, u1, 0.0)
        diag[n - m] = diag[m]
    off = np.empty(n)
    asym = 0.0
    for m in range((n + 1) // 2):
        amp = lam * math.sqrt((m + 1) * (n - m))
        k_m = amp * orbs[m + 1].overlap(orbs[n - m - 1])
        l_next = amp * orbs[m].overlap(orbs[n - m])
        asym = max(asym, abs(k_m - l_next))
        off[m] = -0.5 * (k_m + l_next)
        off[n - 1 - m] = off[m]
    return QHamiltonian(TridiagonalHamiltonian(diag, off), asym)


def two_mode_couplings(width: float, params: ModelParams) -> tuple[float, float]:
    """(U0, U1) of the equivalent two-mode model for orbitals of a common width."""
    q = gauss_quartic(width, width)
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    return u0 * q, u1 * q


def symmetric_width(params: ModelParams) -> float:
    """Width at m = N/2 with equal widths; the coupling term does not depend on it."""
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    res = minimize_scalar(lambda x: pair_energy(0.5 * n, math.exp(x), 0.5 * n, math.exp(x), u0, u1, 0.0),
                          bounds=(-6.0, 6.0), method="bounded", options={"xatol": 1e-12})
    return math.exp(res.x)


def Lambda_scale(params: ModelParams) -> float:
    """Field-convention Lambda corresponding to two-mode-equivalent Lambda = 1.

    Equals N int phi^4 for the symmetric orbital phi.
    """
    return params.n_atoms * gauss_quartic(*(symmetric_width(params),) * 2)


def lambda_from_scaled(params: ModelParams, Lambda: float) -> float:
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    return 0.5 * Lambda * Lambda_scale(params) * (u1 - u0)


# ---------------------------------------------------------------------------
# sweeps


def _row(args) -> SweepRow:
    params, Lambda, vari_coupling, stride = args
    try:
        lam = lambda_from_scaled(params, Lambda)
        state = solve_orbitals(params, lam, vari_coupling, stride)
        q = build_q_hamiltonian(state.widths, params, lam)
        spec = diagonalize(q.matrix, 4, want_vectors=False)
        return row_from_spectrum(Lambda, spec)
    except (CatSpecError, ValueError, OverflowError) as exc:
        return SweepRow(Lambda=Lambda, valid=False, error=f"{type(exc).__name__}: {exc}")


def spectrum_and_figures(params: ModelParams, Lambda_grid: Iterable[float], vari_coupling: float = 2.0,
                         stride: Optional[int] = None, executor=None) -> list[SweepRow]:
    """Gap table of the number-resolved model.

    ``Lambda_grid`` is in units of :func:`Lambda_scale`, so that the two-mode
    transition at Lambda = 1 lines up; multiply by the scale for the field
    convention 2 lambda / (U1 - U0).
    """
    tasks = [(params, float(L), vari_coupling, stride) for L in Lambda_grid]
    mapper = executor.map if executor is not None else map
    return list(mapper(_row, tasks))


def ground_state(params: ModelParams, lam: float, vari_coupling: float = 2.0,
                 stride: Optional[int] = None) -> VariationalState:
    state = solve_orbitals(params, lam, vari_coupling, stride)
    q = build_q_hamiltonian(state.widths, params, lam)
    spec: Spectrum = diagonalize(q.matrix, 1, want_vectors=True)
    state.qvec = spec.eigenvectors[0]
    state.energy = float(spec.eigenvalues[0])
    return state


# ---------------------------------------------------------------------------
# two-Gaussian orbitals, used only to check the single-Gaussian ansatz


def _mix_orbital(x) -> Orbital:
    """Positive two-Gaussian mixture from (log a, log b, angle); weights cos^2, sin^2."""
    return Orbital.mixture(np.exp(x[0:2]), (math.cos(x[2]) ** 2, math.sin(x[2]) ** 2))


def _mix_energy(x, m, n, u0, u1, c):
    o1, o2 = _mix_orbital(x[0:3]), _mix_orbital(x[3:6])
    return pair_energy_orbitals(m, o1, n - m, o2, u0, u1, c), o1, o2


def two_gaussian_ground_energy(params: ModelParams, lam: float, vari_coupling: float = 2.0,
                               stride: Optional[int] = None) -> tuple[float, float]:
    """(E0 with one Gaussian per orbital, E0 with a positive sum of two Gaussians).

    Mixtures are optimized at the solved m values from seeds around the
    single-Gaussian widths; parameters are interpolated in between.
    """
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    c = vari_coupling * lam
    single = ground_state(params, lam, vari_coupling, stride)
    half = n // 2
    ms = [int(m) for m in single.solved if m > 0]
    opts = {"xatol": 1e-9, "fatol": 1e-11, "maxfev": 40_000, "maxiter": 40_000}
    lo_par, hi_par = {}, {}
    for m in ms:
        a_lo, a_hi = single.widths[m], single.widths[n - m]
        if 2 * m == n:
            f = lambda y: _mix_energy(np.r_[y, y], m, n, u0, u1, c)[0]
        else:
            f = lambda x: _mix_energy(x, m, n, u0, u1, c)[0]
        best_x, best_e = None, math.inf
        for w, ang in ((1.5, 0.4), (0.7, 0.7), (1.3, 1.2)):
            seed_lo = [math.log(a_lo), math.log(w * a_lo), ang]
            seed_hi = [math.log(a_hi), math.log(w * a_hi), ang]
            x0 = np.array(seed_lo if 2 * m == n else seed_lo + seed_hi)
            res = minimize(f, x0, method="Nelder-Mead", options=opts)
            if res.fun < best_e:
                best_x, best_e = res.x, float(res.fun)
        # a mixture that gains nothing is stored as the plain Gaussian, so that
        # interpolation in m does not blend different degenerate parameterizations
        plain = pair_energy(m, a_lo, n - m, a_hi, u0, u1, c)
        if best_e >= plain - 1e-9 * abs(plain):
            best_x = np.array([math.log(a_lo), math.log(a_lo), math.pi / 4,
                               math.log(a_hi), math.log(a_hi), math.pi / 4])
        lo_par[m] = best_x[0:3]
        hi_par[m] = best_x[0:3] if 2 * m == n else best_x[3:6]
    mm = np.arange(1, half + 1, dtype=float)
    lo = np.array([np.interp(mm, ms, [lo_par[k][j] for k in ms]) for j in range(3)])
    hi = np.array([np.interp(mm, ms, [hi_par[k][j] for k in ms]) for j in range(3)])
    orbs: list = [None] * (n + 1)
    for i, m in enumerate(range(1, half + 1)):
        orbs[m] = _mix_orbital(lo[:, i])
        orbs[n - m] = _mix_orbital(hi[:, i])
    if n % 2 == 0:
        orbs[n - half] = orbs[half]
    orbs[0] = orbs[1]
    # the B orbital holding all N atoms at m = 0
    a_n = single.widths[n]
    res = minimize(lambda x: pair_energy_orbitals(0, orbs[1], n, _mix_orbital(x), u0, u1, 0.0),
                   np.array([math.log(a_n), math.log(1.5 * a_n), 0.4]), method="Nelder-Mead", options=opts)
    orbs[n] = _mix_orbital(res.x)
    q = build_q_hamiltonian(orbs, params, lam)
    e_double = float(diagonalize(q.matrix, 1, want_vectors=False).eigenvalues[0])
    return single.energy, e_double


WIDTH_COLUMNS = ("m", "a_m")


def write_widths_csv(state: VariationalState, fh) -> None:
    from .output import fmt

    fh.write("m,a_m\n")
    for m, a in enumerate(state.widths):
        fh.write(f"{m},{fmt(a)}\n")
