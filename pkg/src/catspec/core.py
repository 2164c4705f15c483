"""Shared parameter types and the control parameter Lambda.

All quantities are in trap units: energies in units of hbar*omega, lengths in
units of the oscillator length x0 = sqrt(hbar / (M omega)).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


class CatSpecError(Exception):
    """Base class for all library errors."""


class DegenerateInteractionError(CatSpecError, ValueError):
    """Raised when U1 == U0 so that Lambda is undefined."""


class ParameterError(CatSpecError, ValueError):
    pass


class LambdaConvention(str, enum.Enum):
    """The two definitions of the control parameter.

    ``TWO_MODE``: Lambda = 2 lambda / (N (U1 - U0)).
    ``FIELD``:    Lambda = 2 lambda / (U1 - U0).
    """

    TWO_MODE = "two_mode"
    FIELD = "field"

    @classmethod
    def parse(cls, value: "LambdaConvention | str") -> "LambdaConvention":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown Lambda convention {value!r}") from None


@dataclass(frozen=True)
class ModelParams:
    """Physical knobs of the two-component condensate.

    ``apply_tilde_rescale`` left as ``None`` means "use the default of the
    consuming module" (on for mean-field code, off for exact diagonalization).
    """

    n_atoms: int
    u0: float
    u1: float
    lam: float = 0.0
    apply_tilde_rescale: Optional[bool] = None

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ParameterError(f"n_atoms must be a positive integer, got {self.n_atoms!r}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))
        for name in ("u0", "u1", "lam"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.lam < 0:
            raise ParameterError(f"lambda must be >= 0, got {self.lam!r}")

    def tilde(self, default: bool) -> bool:
        return default if self.apply_tilde_rescale is None else bool(self.apply_tilde_rescale)

    def tilde_factor(self, default: bool) -> float:
        n = self.n_atoms
        return (n - 1) / n if self.tilde(default) else 1.0

    def effective_u(self, default_tilde: bool = False) -> tuple[float, float]:
        """(U0, U1) as they enter energies, after the optional (N-1)/N rescale."""
        f = self.tilde_factor(default_tilde)
        return self.u0 * f, self.u1 * f

    def Lambda(self, convention: LambdaConvention | str = LambdaConvention.TWO_MODE,
               default_tilde: bool = False) -> float:
        u0, u1 = self.effective_u(default_tilde)
        if u1 == u0:
            raise DegenerateInteractionError("Lambda is undefined for U1 == U0")
        conv = LambdaConvention.parse(convention)
        scale = self.n_atoms if conv is LambdaConvention.TWO_MODE else 1.0
        return 2.0 * self.lam / (scale * (u1 - u0))

    def with_lambda(self, lam: float) -> "ModelParams":
        return replace(self, lam=float(lam))

    def with_Lambda(self, Lambda: float, convention: LambdaConvention | str = LambdaConvention.TWO_MODE,
                    default_tilde: bool = False) -> "ModelParams":
        return self.with_lambda(lambda_from_Lambda(self, Lambda, convention, default_tilde))


def lambda_from_Lambda(params: ModelParams, Lambda: float,
                       convention: LambdaConvention | str = LambdaConvention.TWO_MODE,
                       default_tilde: bool = False) -> float:
    """Invert the Lambda definition for the coupling lambda."""
    if Lambda < 0:
        raise ParameterError(f"Lambda must be >= 0, got {Lambda!r}")
    u0, u1 = params.effective_u(default_tilde)
    if u1 == u0:
        raise DegenerateInteractionError("Lambda is undefined for U1 == U0")
    conv = LambdaConvention.parse(convention)
    scale = params.n_atoms if conv is LambdaConvention.TWO_MODE else 1.0
    return float(Lambda) * scale * (u1 - u0) / 2.0


@dataclass
class Spectrum:
    """Lowest eigenpairs of a two-mode (or q-space) Hamiltonian.

    ``gaps[k]`` is E[k+1] - E[k] computed without cancellation where the
    solver can do so (parity partners deep in the cat regime); it is what
    sweeps should use instead of differencing ``eigenvalues``.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None  # shape (k, N+1)
    k_computed: int = 0
    gaps: Optional[np.ndarray] = None
    parities: Optional[np.ndarray] = None

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        if not self.k_computed:
            self.k_computed = len(self.eigenvalues)
        if self.gaps is None:
            self.gaps = np.diff(self.eigenvalues)

    def gap(self, i: int, j: int) -> float:
        """E[j] - E[i] for i < j, accumulated from the accurate consecutive gaps."""
        if j < i:
            return -self.gap(j, i)
        return float(np.sum(self.gaps[i:j]))


@dataclass
class NumberDistribution:
    """Probability p_m of finding m atoms in internal state A."""

    probs: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)

    @property
    def n_atoms(self) -> int:
        return len(self.probs) - 1

    def local_maxima(self, rel_floor: float = 1e-3) -> list[int]:
        """Indices of strict-or-plateau local maxima above rel_floor * max."""
        p = self.probs
        floor = rel_floor * p.max()
        out = []
        for m in range(len(p)):
            left = p[m - 1] if m > 0 else -np.inf
            right = p[m + 1] if m + 1 < len(p) else -np.inf
            if p[m] >= floor and p[m] > left and p[m] >= right:
                out.append(m)
        return out
