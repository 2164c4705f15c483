"""Symmetric tridiagonal eigensolver.

Eigenvalues come from Sturm-sequence bisection, eigenvectors from a twisted
factorization (the getvec step of MRRR), which keeps small tail components
with relative accuracy. Persymmetric matrices (d_m = d_{N-m}, e_m = e_{N-1-m})
are folded into even and odd blocks first: parity partners then live in
different blocks, so an exponentially small splitting between them can be
computed from the tails of the two block vectors instead of by subtracting
two nearly equal eigenvalues.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .core import CatSpecError

_EPS = sys.float_info.epsilon
_TINY = sys.float_info.min
_SQRT2 = math.sqrt(2.0)


class EigenSolverError(CatSpecError, RuntimeError):
    def __init__(self, message: str, iterations: int = 0):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


@dataclass
class TridiagonalHamiltonian:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.offdiag = np.asarray(self.offdiag, dtype=float)
        if len(self.offdiag) != max(len(self.diag) - 1, 0):
            raise ValueError("offdiag must have length len(diag) - 1")

    @property
    def size(self) -> int:
        return len(self.diag)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def is_persymmetric(self, rtol: float = 1e-12) -> bool:
        scale = max(np.max(np.abs(self.diag), initial=0.0), np.max(np.abs(self.offdiag), initial=0.0), _TINY)
        return (np.max(np.abs(self.diag - self.diag[::-1]), initial=0.0) <= rtol * scale
                and np.max(np.abs(self.offdiag - self.offdiag[::-1]), initial=0.0) <= rtol * scale)


# ---------------------------------------------------------------------------
# Sturm bisection


def _gershgorin(d: list, e: list) -> tuple[float, float]:
    n = len(d)
    lo, hi = math.inf, -math.inf
    for i in range(n):
        r = (abs(e[i - 1]) if i > 0 else 0.0) + (abs(e[i]) if i < n - 1 else 0.0)
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    return lo, hi


def sturm_count(d: list, e2: list, x: float, pivmin: float) -> int:
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia)."""
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0 else 0
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def bisect_eigenvalues(d, e, indices, max_iter: int = 4000) -> np.ndarray:
    """Eigenvalues with the given ascending 0-based ``indices``."""
    d = [float(x) for x in d]
    e = [float(x) for x in e]
    n = len(d)
    if n == 1:
        return np.array([d[0] for _ in indices])
    e2 = [x * x for x in e]
    pivmin = _TINY * max(1.0, max(e2))
    glo, ghi = _gershgorin(d, e)
    tnorm = max(abs(glo), abs(ghi))
    glo -= 2 * _EPS * tnorm * n + 2 * pivmin
    ghi += 2 * _EPS * tnorm * n + 2 * pivmin
    atol = _EPS * max(tnorm, pivmin)

    out = []
    lower = glo
    for j in sorted(indices):
        if not 0 <= j < n:
            raise ValueError(f"eigenvalue index {j} out of range for size {n}")
        lo, hi = lower, ghi
        it = 0
        while True:
            it += 1
            if it > max_iter:
                raise EigenSolverError(f"bisection for eigenvalue {j} did not converge", it)
            mid = 0.5 * (lo + hi)
            if hi - lo <= max(atol, 2 * _EPS * max(abs(lo), abs(hi))) or mid <= lo or mid >= hi:
                break
            if sturm_count(d, e2, mid, pivmin) > j:
                hi = mid
            else:
                lo = mid
        val = 0.5 * (lo + hi)
        out.append(val)
        lower = lo
    return np.array(out)


# ---------------------------------------------------------------------------
# Twisted factorization eigenvector


@dataclass
class LogVector:
    """Unit vector stored as sign * exp(logabs); ``values`` is the plain float copy."""

    logabs: np.ndarray
    sign: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.sign * np.exp(self.logabs)


def twisted_vector(d, e, E: float) -> LogVector:
    """Eigenvector of an unreduced symmetric tridiagonal matrix for eigenvalue E."""
    d = [float(x) for x in d]
    e = [float(x) for x in e]
    n = len(d)
    if n == 1:
        return LogVector(np.zeros(1), np.ones(1))
    e2 = [x * x for x in e]
    scale = max(max(abs(x) for x in d), max(abs(x) for x in e), _TINY)
    guard = _EPS * scale

    def _safe(q):
        if abs(q) < guard * _EPS:
            return -guard * _EPS if q <= 0 else guard * _EPS
        return q

    dp = [0.0] * n
    dp[0] = _safe(d[0] - E)
    for i in range(1, n):
        dp[i] = _safe(d[i] - E - e2[i - 1] / dp[i - 1])
    dm = [0.0] * n
    dm[n - 1] = _safe(d[n - 1] - E)
    for i in range(n - 2, -1, -1):
        dm[i] = _safe(d[i] - E - e2[i] / dm[i + 1])
    t = 0
    best = math.inf
    for i in range(n):
        g = abs(dp[i] + dm[i] - (d[i] - E))
        if g < best:
            best, t = g, i

    logabs = [0.0] * n
    sign = [1.0] * n
    for i in range(t - 1, -1, -1):
        if e[i] == 0.0:
            logabs[i], sign[i] = -math.inf, 0.0
            continue
        r = -e[i] / dp[i]
        if r == 0.0:
            logabs[i], sign[i] = -math.inf, 0.0
            continue
        logabs[i] = logabs[i + 1] + math.log(abs(r))
        sign[i] = sign[i + 1] * (1.0 if r > 0 else -1.0)
    for i in range(t + 1, n):
        if e[i - 1] == 0.0:
            logabs[i], sign[i] = -math.inf, 0.0
            continue
        r = -e[i - 1] / dm[i]
        if r == 0.0:
            logabs[i], sign[i] = -math.inf, 0.0
            continue
        logabs[i] = logabs[i - 1] + math.log(abs(r))
        sign[i] = sign[i - 1] * (1.0 if r > 0 else -1.0)
    la = np.array(logabs)
    top = np.max(la)
    lognorm = top + 0.5 * math.log(np.sum(np.exp(2 * (la - top))))
    return LogVector(la - lognorm, np.array(sign))


# ---------------------------------------------------------------------------
# Full solver


@dataclass
class EigenResult:
    values: np.ndarray
    vectors: np.ndarray | None  # (k, n)
    gaps: np.ndarray
    parities: np.ndarray | None  # +1 / -1 / 0 (unknown)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(v)
    if len(nz) and v[nz[0]] < 0:
        return -v
    return v


def _split_blocks(offdiag: np.ndarray) -> list[tuple[int, int]]:
    """Index ranges [start, stop) of the unreduced blocks."""
    n = len(offdiag) + 1
    cuts = [0] + [i + 1 for i in np.flatnonzero(offdiag == 0.0)] + [n]
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:])]


def _fold(d: np.ndarray, e: np.ndarray):
    """Even/odd blocks of a persymmetric tridiagonal matrix."""
    n = len(d)
    nat = n - 1
    if nat % 2 == 1:
        K = (nat - 1) // 2
        de = d[:K + 1].copy()
        do = d[:K + 1].copy()
        de[K] += e[K]
        do[K] -= e[K]
        ee = e[:K].copy()
        eo = e[:K].copy()
    else:
        K = nat // 2
        de = d[:K + 1].copy()
        ee = e[:K].copy()
        ee[K - 1] *= _SQRT2
        do = d[:K].copy()
        eo = e[:K - 1].copy()
    return K, (de, ee), (do, eo)


def _unfold(n: int, K: int, v: np.ndarray, parity: int) -> np.ndarray:
    nat = n - 1
    q = np.zeros(n)
    s = 1.0 if parity > 0 else -1.0
    npairs = K + 1 if nat % 2 == 1 else K
    q[:npairs] = v[:npairs] / _SQRT2
    q[nat - np.arange(npairs)] = s * v[:npairs] / _SQRT2
    if nat % 2 == 0 and parity > 0:
        q[K] = v[K]
    return q


def _lowest_in_block(d, e, count: int, want_vectors: bool):
    count = min(count, len(d))
    vals = bisect_eigenvalues(d, e, range(count))
    vecs = [twisted_vector(d, e, v) for v in vals] if want_vectors else None
    return vals, vecs


def _solve_persymmetric(d: np.ndarray, e: np.ndarray, k: int):
    n = len(d)
    K, (de, ee), (do, eo) = _fold(d, e)
    ne, no = len(de), len(do)
    ce, co = min(ne, (k + 1) // 2 + 1), min(no, (k + 1) // 2 + 1)
    while True:
        ve, _ = _lowest_in_block(de, ee, ce, False)
        vo, _ = _lowest_in_block(do, eo, co, False)
        merged = np.sort(np.concatenate([ve, vo]))[:k]
        kth = merged[-1]
        grow_e = ce < ne and ve[-1] < kth
        grow_o = co < no and vo[-1] < kth
        if not (grow_e or grow_o):
            break
        if grow_e:
            ce = min(ne, ce * 2)
        if grow_o:
            co = min(no, co * 2)

    labels = sorted([(v, +1, i) for i, v in enumerate(ve)] + [(v, -1, i) for i, v in enumerate(vo)])[:k]
    vec_e = {i: twisted_vector(de, ee, ve[i]) for _, p, i in labels if p > 0}
    vec_o = {i: twisted_vector(do, eo, vo[i]) for _, p, i in labels if p < 0}
    span = max(abs(x) for x in (np.max(np.abs(d)), np.max(np.abs(e)) * 2)) or 1.0

    nat = n - 1
    if nat % 2 == 1:
        coef, xe, xo = 2.0 * e[K], K, K
    else:
        coef, xe, xo = _SQRT2 * e[K - 1], K, K - 1

    def split(ie: int, io: int):
        """E_odd - E_even for a block pair, from their tails; None if ill-conditioned."""
        a, b = vec_e[ie], vec_o[io]
        av, bv = a.values, b.values
        m = min(len(av), len(bv))
        ov = float(np.dot(av[:m], bv[:m]))
        if abs(ov) < 0.5:
            return None
        if a.sign[xe] == 0 or b.sign[xo] == 0:
            return 0.0
        logmag = math.log(abs(coef)) + a.logabs[xe] + b.logabs[xo] - math.log(abs(ov))
        sgn = -math.copysign(1.0, coef) * a.sign[xe] * b.sign[xo] * math.copysign(1.0, ov)
        return sgn * math.exp(logmag) if logmag < 709 else sgn * math.inf

    values = np.array([v for v, _, _ in labels])
    gaps = np.zeros(max(len(labels) - 1, 0))
    paired = [False] * len(gaps)
    j = 0
    while j < len(labels) - 1:
        (v1, p1, i1), (v2, p2, i2) = labels[j], labels[j + 1]
        s = None
        if p1 != p2 and abs(v2 - v1) <= 1e-6 * span:
            ev, od = (labels[j], labels[j + 1]) if p1 > 0 else (labels[j + 1], labels[j])
            s = split(ev[2], od[2])
        if s is None:
            j += 1
            continue
        # order the partners by the sign of the accurately computed splitting
        lower, upper = (ev, od) if s >= 0 else (od, ev)
        labels[j], labels[j + 1] = lower, upper
        values[j] = lower[0]
        values[j + 1] = lower[0] + abs(s)
        gaps[j] = abs(s)
        paired[j] = True
        j += 2
    for j in range(len(gaps)):
        if not paired[j]:
            gaps[j] = values[j + 1] - values[j]
    vectors = []
    for _, p, i in labels:
        lv = vec_e[i] if p > 0 else vec_o[i]
        vectors.append(_fix_sign(_unfold(n, K, lv.values, p)))
    parities = np.array([p for _, p, _ in labels])
    return values, np.array(vectors), gaps, parities


def _solve_general(d: np.ndarray, e: np.ndarray, k: int):
    n = len(d)
    pairs = []
    for a, b in _split_blocks(e):
        bd, be = d[a:b], e[a:b - 1]
        vals, vecs = _lowest_in_block(bd, be, min(k, b - a), True)
        for v, lv in zip(vals, vecs):
            full = np.zeros(n)
            full[a:b] = lv.values
            pairs.append((v, full))
    pairs.sort(key=lambda p: p[0])
    pairs = pairs[:k]
    values = np.array([p[0] for p in pairs])
    vectors = np.array([p[1] for p in pairs])
    span = max(np.max(np.abs(d)), 2 * np.max(np.abs(e), initial=0.0), _TINY)
    # Reorthogonalize inside clusters of (numerically) coincident eigenvalues.
    start = 0
    for j in range(1, len(values) + 1):
        if j == len(values) or values[j] - values[j - 1] > 1e-12 * span:
            if j - start > 1:
                q, _ = np.linalg.qr(vectors[start:j].T)
                vectors[start:j] = q.T
            start = j
    vectors = np.array([_fix_sign(v) for v in vectors])
    return values, vectors, np.diff(values), None


def solve_lowest(h: TridiagonalHamiltonian, k: int, want_vectors: bool = True) -> EigenResult:
    n = h.size
    if not 1 <= k <= n:
        raise ValueError(f"k_lowest must lie in [1, {n}], got {k}")
    d, e = h.diag, h.offdiag
    if n >= 2 and np.all(e != 0.0) and h.is_persymmetric():
        values, vectors, gaps, parities = _solve_persymmetric(d, e, k)
    else:
        values, vectors, gaps, parities = _solve_general(d, e, k)
    return EigenResult(values, vectors if want_vectors else None, gaps, parities)


def full_spectrum_reference(h: TridiagonalHamiltonian) -> np.ndarray:
    """All eigenvalues via LAPACK's implicit QL/QR path, for cross-validation."""
    from scipy.linalg import eigh_tridiagonal

    return eigh_tridiagonal(h.diag, h.offdiag, eigvals_only=True, lapack_driver="stev")
