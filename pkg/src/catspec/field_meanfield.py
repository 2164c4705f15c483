"""Spatially resolved mean field of the two-component condensate in an isotropic trap.

Profiles are radial: alpha(r), beta(r) with 4 pi int (alpha^2 + beta^2) r^2 dr = N.
The energy functional is

    E = int d^3r [ alpha (-lap/2 + r^2/2) alpha + beta (-lap/2 + r^2/2) beta
                   + (U0/2)(alpha^4 + beta^4) + U1 alpha^2 beta^2 - 2 lambda alpha beta ],

whose Euler-Lagrange equations are the coupled stationary Gross-Pitaevskii
equations with coupling -lambda beta (resp. -lambda alpha). Couplings are
tilde-rescaled U(N-1)/N by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import bisect, minimize, minimize_scalar

from .core import CatSpecError, DegenerateInteractionError, ModelParams, ParameterError

TILDE_DEFAULT = True
GRID_POINTS = 2048
_TWO_PI_32 = (2.0 * math.pi) ** 1.5


class NormalizationError(CatSpecError, ValueError):
    pass


class BracketError(CatSpecError, RuntimeError):
    pass


class RelaxationError(CatSpecError, RuntimeError):
    pass


class NotCatRegimeError(CatSpecError, ValueError):
    pass


# ---------------------------------------------------------------------------
# radial grid and profiles


@dataclass
class RadialProfile:
    """alpha, beta sampled on r_i = i h, i = 1..n (Dirichlet at 0 and r_max + h)."""

    r_grid: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        self.r_grid = np.asarray(self.r_grid, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.beta = np.asarray(self.beta, dtype=float)
        if not (self.r_grid.shape == self.alpha.shape == self.beta.shape):
            raise ValueError("grid and profiles must have equal length")
        if not (np.all(np.isfinite(self.alpha)) and np.all(np.isfinite(self.beta))):
            raise ValueError("profiles must be finite")

    @property
    def h(self) -> float:
        return float(self.r_grid[1] - self.r_grid[0])

    def integrate(self, f: np.ndarray) -> float:
        """int d^3r f over the grid."""
        return float(4.0 * math.pi * self.h * np.dot(self.r_grid ** 2, f))

    def norm(self) -> float:
        return self.integrate(self.alpha ** 2 + self.beta ** 2)

    def normalized(self, n_atoms: float) -> "RadialProfile":
        s = math.sqrt(n_atoms / self.norm())
        return RadialProfile(self.r_grid, self.alpha * s, self.beta * s)

    def mirrored(self) -> "RadialProfile":
        return RadialProfile(self.r_grid, self.beta.copy(), self.alpha.copy())


def radial_grid(r_max: float, points: int = GRID_POINTS) -> np.ndarray:
    h = r_max / points
    return h * np.arange(1, points + 1)


def default_grid(params: ModelParams, points: int = GRID_POINTS) -> np.ndarray:
    return radial_grid(max(2.0 * tf_r0(params), 8.0), points)


def _laplacian_term(u: np.ndarray, h: float) -> np.ndarray:
    """-u''/2 with u = 0 just outside both ends."""
    lap = -2.0 * u
    lap[1:] += u[:-1]
    lap[:-1] += u[1:]
    return -0.5 * lap / (h * h)


def functional_components(profile: RadialProfile, params: ModelParams, lam: float) -> dict:
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    r, h = profile.r_grid, profile.h
    a, b = profile.alpha, profile.beta
    ua, ub = r * a, r * b
    w = 4.0 * math.pi * h
    kinetic = w * (np.dot(ua, _laplacian_term(ua, h)) + np.dot(ub, _laplacian_term(ub, h)))
    potential = profile.integrate(0.5 * r * r * (a * a + b * b))
    interaction = profile.integrate(0.5 * u0 * (a ** 4 + b ** 4) + u1 * a * a * b * b)
    coupling = -2.0 * lam * profile.integrate(a * b)
    return {"kinetic": float(kinetic), "potential": potential, "interaction": interaction,
            "coupling": coupling, "total": float(kinetic) + potential + interaction + coupling}


def energy_functional(profile: RadialProfile, params: ModelParams, lam: float,
                      check_norm: bool = True) -> float:
    if check_norm:
        n = profile.norm()
        if abs(n - params.n_atoms) > 1e-4 * params.n_atoms:
            raise NormalizationError(f"profile holds {n} atoms, expected {params.n_atoms}")
    return functional_components(profile, params, lam)["total"]


def stationarity_operator(profile: RadialProfile, params: ModelParams, lam: float):
    """(L alpha - lambda beta, L beta - lambda alpha) with L the nonlinear GP operator.

    This is half the functional derivative of the energy functional.
    """
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    r, h = profile.r_grid, profile.h
    a, b = profile.alpha, profile.beta
    ga = _laplacian_term(r * a, h) / r + (0.5 * r * r + u0 * a * a + u1 * b * b) * a - lam * b
    gb = _laplacian_term(r * b, h) / r + (0.5 * r * r + u0 * b * b + u1 * a * a) * b - lam * a
    return ga, gb


def residual(profile: RadialProfile, params: ModelParams, lam: float) -> tuple[float, float]:
    """(grid-norm residual of the stationarity equations, projected mu).

    The residual is the L2 norm of (L - mu) psi - lambda sigma_x psi for the
    spinor psi normalized to one particle.
    """
    ga, gb = stationarity_operator(profile, params, lam)
    a, b = profile.alpha, profile.beta
    n = profile.norm()
    mu = profile.integrate(a * ga + b * gb) / n
    ra, rb = ga - mu * a, gb - mu * b
    return math.sqrt(profile.integrate(ra * ra + rb * rb) / n), mu


# ---------------------------------------------------------------------------
# Thomas-Fermi


def _sum_u(params: ModelParams) -> float:
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    s = u0 + u1
    if not s > 0:
        raise ParameterError("Thomas-Fermi profiles need U0 + U1 > 0")
    return s


def tf_r0(params: ModelParams) -> float:
    """Support radius of the symmetric profile, [15 N (U0+U1) / (8 pi)]^(1/5)."""
    return (15.0 * params.n_atoms * _sum_u(params) / (8.0 * math.pi)) ** 0.2


def tf_Lambda0(params: ModelParams) -> float:
    """Field-convention threshold r0^2/(U0+U1) below which the symmetric profile splits."""
    return tf_r0(params) ** 2 / _sum_u(params)


def tf_symmetric_norm(r0: float, u_sum: float) -> float:
    return 8.0 * math.pi * r0 ** 5 / (15.0 * u_sum)


def tf_symmetric_components(params: ModelParams, lam: float) -> dict:
    """Closed-form potential, interaction and coupling energies of the symmetric profile."""
    s = _sum_u(params)
    r0 = tf_r0(params)
    pot = 4.0 * math.pi * r0 ** 7 / (35.0 * s)
    inter = 8.0 * math.pi * r0 ** 7 / (105.0 * s)
    coup = -lam * params.n_atoms
    return {"potential": pot, "interaction": inter, "coupling": coup, "total": pot + inter + coup}


def _tf_asym_norm(mu: float, lam: float, u0: float, u1: float, Lam: float) -> float:
    r1sq = max(2.0 * (mu - Lam * u0), 0.0)
    r2sq = max(2.0 * (mu + lam), 0.0)
    r1, r2 = math.sqrt(r1sq), math.sqrt(r2sq)
    inner = (mu * r1 ** 3 / 3.0 - r1 ** 5 / 10.0) / u0
    outer = 2.0 / (u0 + u1) * ((mu + lam) * (r2 ** 3 - r1 ** 3) / 3.0 - (r2 ** 5 - r1 ** 5) / 10.0)
    return 4.0 * math.pi * (inner + outer)


@dataclass
class TFSolution:
    mu: float
    branch: str
    r1: float
    r2: float
    profile: RadialProfile
    energy: float = math.nan  # full functional on the grid, kinetic included
    energy_tf: float = math.nan  # functional without the kinetic term


def _tf_symmetric(params: ModelParams, lam: float, r: np.ndarray) -> TFSolution:
    s = _sum_u(params)
    r0 = tf_r0(params)
    a = np.sqrt(np.clip(r0 * r0 - r * r, 0.0, None) / (2.0 * s))
    return TFSolution(mu=0.5 * r0 * r0 - lam, branch="symmetric", r1=0.0, r2=r0,
                      profile=RadialProfile(r, a, a.copy()))


def solve_thomas_fermi(params: ModelParams, lam: float, r_grid: Optional[np.ndarray] = None) -> list[TFSolution]:
    """Thomas-Fermi ground profiles: one symmetric solution or a degenerate (plus, minus) pair."""
    if lam < 0:
        raise ParameterError("lambda must be >= 0")
    s = _sum_u(params)
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    r = default_grid(params) if r_grid is None else np.asarray(r_grid, dtype=float)
    sols = []
    if u1 <= u0 or u0 <= 0 or lam == 0 or 2.0 * lam / (u1 - u0) >= tf_Lambda0(params):
        sols.append(_tf_symmetric(params, lam, r))
    else:
        Lam = 2.0 * lam / (u1 - u0)
        n = params.n_atoms
        lo = Lam * u0

        def resid(mu):
            return _tf_asym_norm(mu, lam, u0, u1, Lam) - n

        step = max(1.0, abs(lo))
        hi = lo + step
        tries = 0
        while resid(hi) < 0:
            step *= 2.0
            hi = lo + step
            tries += 1
            if tries > 200:
                raise BracketError(f"no sign change of the normalization residual on mu in [{lo}, {hi}]")
        mu = bisect(resid, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        r1 = math.sqrt(2.0 * (mu - Lam * u0))
        r2 = math.sqrt(2.0 * (mu + lam))
        rho = (mu - 0.5 * r * r) / u0
        inner = r <= r1
        root = np.sqrt(np.clip(rho * rho - Lam * Lam, 0.0, None))
        big = np.sqrt(np.clip(0.5 * (rho + root), 0.0, None))
        small = np.sqrt(np.clip(0.5 * (rho - root), 0.0, None))
        outer = np.sqrt(np.clip((mu + lam - 0.5 * r * r) / s, 0.0, None))
        a_plus = np.where(inner, big, outer)
        b_plus = np.where(inner, small, outer)
        sols.append(TFSolution(mu, "plus", r1, r2, RadialProfile(r, a_plus, b_plus)))
        sols.append(TFSolution(mu, "minus", r1, r2, RadialProfile(r, b_plus.copy(), a_plus.copy())))
    for sol in sols:
        comp = functional_components(sol.profile.normalized(params.n_atoms), params, lam)
        sol.energy = comp["total"]
        sol.energy_tf = comp["total"] - comp["kinetic"]
    return sols


# ---------------------------------------------------------------------------
# Gaussian variational family, alpha(r) = sqrt(A) exp(-r^2 / (4 a^2))


def gauss_one_body(a: float) -> float:
    """Kinetic plus trap energy per particle of a normalized Gaussian of width a."""
    return 3.0 / (8.0 * a * a) + 1.5 * a * a


def gauss_one_body_cross(a: float, b: float) -> float:
    """<phi_a| -lap/2 + r^2/2 |phi_b> for unit-normalized Gaussians."""
    pa, pb = 1.0 / (4.0 * a * a), 1.0 / (4.0 * b * b)
    t = pa + pb
    return gauss_overlap(a, b) * (3.0 * pa * pb / t + 0.75 / t)


def gauss_quartic(a: float, b: float) -> float:
    """int phi_a^2 phi_b^2 for unit-normalized Gaussians."""
    return (2.0 * math.pi * (a * a + b * b)) ** -1.5


def gauss_overlap(a: float, b: float) -> float:
    """int phi_a phi_b for unit-normalized Gaussians."""
    return (2.0 * a * b / (a * a + b * b)) ** 1.5


def pair_energy(n1: float, a1: float, n2: float, a2: float, u0: float, u1: float, coupling: float) -> float:
    """Functional for alpha = sqrt(n1) phi_a1, beta = sqrt(n2) phi_a2.

    ``coupling`` multiplies -2 int alpha beta.
    """
    e = n1 * gauss_one_body(a1) + n2 * gauss_one_body(a2)
    e += 0.5 * u0 * (n1 * n1 * gauss_quartic(a1, a1) + n2 * n2 * gauss_quartic(a2, a2))
    e += u1 * n1 * n2 * gauss_quartic(a1, a2)
    if coupling:
        e -= 2.0 * coupling * math.sqrt(n1 * n2) * gauss_overlap(a1, a2)
    return e


@dataclass(frozen=True)
class GaussianPair:
    amp_a: float
    width_a: float
    amp_b: float
    width_b: float

    @classmethod
    def from_counts(cls, n_a: float, a: float, n_b: float, b: float) -> "GaussianPair":
        return cls(n_a / (_TWO_PI_32 * a ** 3), a, n_b / (_TWO_PI_32 * b ** 3), b)

    @property
    def n_a(self) -> float:
        return _TWO_PI_32 * self.amp_a * self.width_a ** 3

    @property
    def n_b(self) -> float:
        return _TWO_PI_32 * self.amp_b * self.width_b ** 3

    @property
    def n_atoms(self) -> float:
        return self.n_a + self.n_b

    def mirrored(self) -> "GaussianPair":
        return GaussianPair(self.amp_b, self.width_b, self.amp_a, self.width_a)

    def profile(self, r: np.ndarray) -> RadialProfile:
        r = np.asarray(r, dtype=float)
        return RadialProfile(r, math.sqrt(self.amp_a) * np.exp(-r * r / (4 * self.width_a ** 2)),
                             math.sqrt(self.amp_b) * np.exp(-r * r / (4 * self.width_b ** 2)))

    def energy(self, params: ModelParams, lam: float) -> float:
        u0, u1 = params.effective_u(TILDE_DEFAULT)
        return pair_energy(self.n_a, self.width_a, self.n_b, self.width_b, u0, u1, lam)


@dataclass
class GaussianResult:
    pair: GaussianPair
    energy: float
    degenerate_partner: Optional[GaussianPair]
    symmetric: GaussianPair
    symmetric_energy: float
    evaluations: int
    converged: bool
    message: str = ""


def _reduced_energy(x, n, u0, u1, lam):
    theta, la, lb = x
    c2 = math.cos(theta) ** 2
    return pair_energy(n * c2, math.exp(la), n * (1.0 - c2), math.exp(lb), u0, u1, lam)


def _symmetric_gaussian(n, u0, u1, lam):
    res = minimize_scalar(lambda la: pair_energy(0.5 * n, math.exp(la), 0.5 * n, math.exp(la), u0, u1, lam),
                          bounds=(-5.0, 5.0), method="bounded", options={"xatol": 1e-12, "maxiter": 500})
    return float(res.x), float(res.fun), int(res.nfev)


_SIMPLEX_OPTS = {"fatol": 1e-10, "xatol": 1e-9, "maxfev": 100_000, "maxiter": 100_000}


def minimize_gaussian(params: ModelParams, lam: float, restarts: int = 3) -> GaussianResult:
    """Minimize the functional over Gaussian pairs at fixed total number N.

    Free parameters are (theta, log a, log b) with n_a = N cos^2 theta. The
    symmetric stationary point comes from a one-dimensional width search;
    asymmetric minima are sought from ``restarts - 1`` deterministic seeds.
    """
    if restarts < 2:
        raise ParameterError("need at least one symmetric and one asymmetric seed")
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    la_s, e_s, evals = _symmetric_gaussian(n, u0, u1, lam)
    sym = GaussianPair.from_counts(0.5 * n, math.exp(la_s), 0.5 * n, math.exp(la_s))
    best_x, best_e, converged, message = None, e_s, True, ""
    for k in range(restarts - 1):
        theta0 = math.pi / 4 * (1.0 - 0.9 * (k + 1) / restarts)
        x0 = np.array([theta0, la_s, la_s])
        res = minimize(_reduced_energy, x0, args=(n, u0, u1, lam), method="Nelder-Mead",
                       options=dict(_SIMPLEX_OPTS, initial_simplex=x0 + np.vstack([np.zeros(3), 0.1 * np.eye(3)])))
        evals += int(res.nfev)
        if not res.success:
            converged, message = False, f"simplex stalled: {res.message}"
        if res.fun < best_e - 1e-9:
            best_x, best_e = res.x, float(res.fun)
    if best_x is None:
        return GaussianResult(sym, e_s, None, sym, e_s, evals, converged, message)
    theta, la, lb = best_x
    c2 = math.cos(theta) ** 2
    pair = GaussianPair.from_counts(n * c2, math.exp(la), n * (1.0 - c2), math.exp(lb))
    if pair.n_a < pair.n_b:
        pair = pair.mirrored()
    return GaussianResult(pair, best_e, pair.mirrored(), sym, e_s, evals, converged, message)


def _symmetric_hessian_min(params: ModelParams, lam: float, step: float = 1e-4) -> float:
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    la_s, _, _ = _symmetric_gaussian(n, u0, u1, lam)
    x0 = np.array([math.pi / 4, la_s, la_s])
    f = lambda x: _reduced_energy(x, n, u0, u1, lam)
    hess = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            ei, ej = np.eye(3)[i] * step, np.eye(3)[j] * step
            hess[i, j] = (f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)) / (4 * step * step)
    return float(np.linalg.eigvalsh(0.5 * (hess + hess.T))[0])


def gaussian_Lambda0(params: ModelParams, lo: float = 1e-3, hi: Optional[float] = None,
                     xtol: float = 1e-6) -> float:
    """Field-convention Lambda where the symmetric Gaussian optimum turns unstable."""
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    if u1 <= u0:
        raise DegenerateInteractionError("no symmetry breaking unless U1 > U0")
    lam_of = lambda L: 0.5 * L * (u1 - u0)
    hi = 4.0 * tf_Lambda0(params) if hi is None else hi
    g = lambda L: _symmetric_hessian_min(params, lam_of(L))
    if g(lo) >= 0 or g(hi) <= 0:
        raise BracketError(f"stability does not change sign on Lambda in [{lo}, {hi}]")
    return float(bisect(g, lo, hi, xtol=xtol))


# ---------------------------------------------------------------------------
# imaginary-time relaxation on the grid


@dataclass
class RelaxResult:
    profile: RadialProfile
    energy: float
    seed_energy: float
    residual: float
    mu: float
    iterations: int
    history: list = field(default_factory=list)


def relax_gpe(params: ModelParams, lam: float, seed: RadialProfile, tol: float = 1e-6,
              max_iter: int = 20_000, dtau: float = 0.5, dtau_max: float = 1e6,
              shifted: bool = True, stall: int = 50) -> RelaxResult:
    """Normalized gradient flow with a semi-implicit (backward Euler) step.

    Kinetic, trap and coupling terms are implicit, the density terms lagged.
    With ``shifted`` the operator is shifted by the current chemical potential,
    which speeds up convergence of soft modes near the symmetry-breaking
    transition. A step that raises the energy is retried with half the step size.
    If the residual stops improving for ``stall`` steps the flow toggles
    between the shifted and unshifted forms.
    """
    n_atoms = params.n_atoms
    norm = seed.norm()
    if abs(norm - n_atoms) > 1e-4 * n_atoms:
        raise NormalizationError(f"seed holds {norm} atoms, expected {n_atoms}")
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    r, h = seed.r_grid, seed.h
    npts = len(r)
    cur = seed.normalized(n_atoms)
    e_seed = energy_functional(cur, params, lam)
    e_cur = e_seed
    res, mu = residual(cur, params, lam)
    history = [(0, e_cur, res, dtau)]
    it = 0
    off2 = -0.5 / (h * h)
    dtau0, best_res, best_it = dtau, res, 0
    while res > tol:
        if it >= max_iter:
            raise RelaxationError(f"no convergence after {max_iter} steps: residual {res:.3e}, energy {e_cur}")
        a, b = cur.alpha, cur.beta
        # shifting by the projected mu turns large steps into inverse iteration
        shift = mu if shifted else 0.0
        diag_a = 1.0 / (h * h) + 0.5 * r * r + u0 * a * a + u1 * b * b - shift
        diag_b = 1.0 / (h * h) + 0.5 * r * r + u0 * b * b + u1 * a * a - shift
        while True:
            ab = np.zeros((5, 2 * npts))
            ab[2, 0::2] = 1.0 + dtau * diag_a
            ab[2, 1::2] = 1.0 + dtau * diag_b
            ab[1, 1::2] = -dtau * lam  # (2i, 2i+1)
            ab[3, 0::2] = -dtau * lam  # (2i+1, 2i)
            ab[0, 2:] = dtau * off2
            ab[4, :-2] = dtau * off2
            rhs = np.empty(2 * npts)
            rhs[0::2], rhs[1::2] = r * a, r * b
            x = solve_banded((2, 2), ab, rhs)
            trial = RadialProfile(r, x[0::2] / r, x[1::2] / r).normalized(n_atoms)
            e_new = energy_functional(trial, params, lam, check_norm=False)
            res_new, mu_new = residual(trial, params, lam)
            # near convergence energy changes drop below round-off; then the residual decides
            if e_new <= e_cur + 1e-13 * abs(e_cur) or (e_new <= e_cur + 1e-10 * abs(e_cur) and res_new < res):
                break
            dtau *= 0.5
            if dtau < 1e-12:
                raise RelaxationError(f"energy keeps rising (E={e_cur}, trial {e_new}) at iteration {it}")
        cur, e_cur, res, mu = trial, e_new, res_new, mu_new
        it += 1
        history.append((it, e_cur, res, dtau))
        dtau = min(dtau * 1.25, dtau_max)
        if res < 0.9 * best_res:
            best_res, best_it = res, it
        elif it - best_it >= stall:
            shifted, dtau, best_res, best_it = not shifted, dtau0, res, it
    return RelaxResult(cur, e_cur, e_seed, res, mu, it, history)


# ---------------------------------------------------------------------------
# cat states built from a mirrored pair of product states


@dataclass(frozen=True)
class CatOrdering:
    E_plus: float
    E_mid: float
    E_minus: float
    log_overlap: float
    reduced_cross: float  # <+|H|->/<+|-> - <+|H|+>; negative means E+ < E_mid < E-

    @property
    def ordered(self) -> bool:
        return self.reduced_cross < 0


def _cat_from_integrals(n: int, s: float, k1: float, k2: float, e_mid: float) -> CatOrdering:
    if not 0 < s < 1 - 1e-12:
        raise NotCatRegimeError(f"single-particle overlap {s} is not inside (0, 1)")
    log_eps = n * math.log(s)
    d = k1 / s + k2 / (s * s) - e_mid
    eps = math.exp(log_eps) if log_eps > -745 else 0.0
    # E+- = (E_mid +- c)/(1 +- eps) with c = eps (E_mid + d)
    e_plus = e_mid + eps * d / (1.0 + eps)
    e_minus = e_mid - eps * d / (1.0 - eps)
    return CatOrdering(e_plus, e_mid, e_minus, log_eps, d)


def cat_energy_ordering_profiles(params: ModelParams, lam: float, plus: RadialProfile,
                                 minus: RadialProfile) -> CatOrdering:
    """Cat energies for two grid profiles (each normalized to N)."""
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    a1, b1, a2, b2 = plus.alpha, plus.beta, minus.alpha, minus.beta
    r, h = plus.r_grid, plus.h
    s = plus.integrate(a1 * a2 + b1 * b2) / n

    def hmat(f, g):
        return (plus.integrate(f * (_laplacian_term(r * g, h) / r)) + plus.integrate(0.5 * r * r * f * g))

    k1 = hmat(a1, a2) + hmat(b1, b2) - lam * plus.integrate(a1 * b2 + b1 * a2)
    k2 = 0.5 * u0 * plus.integrate(a1 * a1 * a2 * a2 + b1 * b1 * b2 * b2) + u1 * plus.integrate(a1 * b1 * a2 * b2)
    e_mid = energy_functional(plus, params, lam, check_norm=False)
    return _cat_from_integrals(n, s, k1, k2, e_mid)


def cat_energy_ordering_gaussian(params: ModelParams, lam: float, pair: GaussianPair) -> CatOrdering:
    """Cat energies of a Gaussian pair and its A<->B mirror, all integrals in closed form."""
    n = params.n_atoms
    u0, u1 = params.effective_u(TILDE_DEFAULT)
    na, a, nb, b = pair.n_a, pair.width_a, pair.n_b, pair.width_b
    # plus: (alpha, beta) = (sqrt(na) phi_a, sqrt(nb) phi_b); minus: (sqrt(nb) phi_b, sqrt(na) phi_a)
    ov = gauss_overlap(a, b)
    s = 2.0 * math.sqrt(na * nb) * ov / n
    k1 = 2.0 * math.sqrt(na * nb) * gauss_one_body_cross(a, b) - lam * (na + nb)
    q = gauss_quartic(a, b)
    k2 = 0.5 * u0 * (2.0 * na * nb * q) + u1 * na * nb * q
    e_mid = pair_energy(na, a, nb, b, u0, u1, lam)
    return _cat_from_integrals(n, s, k1, k2, e_mid)


def cat_energy_ordering(params: ModelParams, lam: float) -> CatOrdering:
    """E+ < E_mid < E- check for the degenerate Gaussian pair at this lambda."""
    g = minimize_gaussian(params, lam)
    if g.degenerate_partner is None:
        raise NotCatRegimeError("no degenerate asymmetric pair at this lambda")
    return cat_energy_ordering_gaussian(params, lam, g.pair)


# ---------------------------------------------------------------------------
# output

SUMMARY_COLUMNS = ("Lambda", "branch", "mu", "energy", "A", "a", "B", "b")


def write_profile_csv(profile: RadialProfile, fh) -> None:
    from .output import fmt

    fh.write("r,alpha,beta\n")
    for r, a, b in zip(profile.r_grid, profile.alpha, profile.beta):
        fh.write(f"{fmt(r)},{fmt(a)},{fmt(b)}\n")
