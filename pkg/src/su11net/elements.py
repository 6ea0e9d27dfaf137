"""Circuit elements understood by both the Gaussian and the Fock backends."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, NonUnitaryError

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing parameter zeta = r * exp(i*beta)."""

    r: float
    beta: float = 0.0

    def __post_init__(self):
        r = float(self.r)
        beta = float(self.beta)
        if not math.isfinite(r) or r < 0:
            raise InvalidArgumentError(f"squeezing magnitude must be finite and >= 0, got {r}")
        if not math.isfinite(beta):
            raise InvalidArgumentError(f"squeezing phase must be finite, got {beta}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "beta", beta % (2 * math.pi))

    @property
    def zeta(self) -> complex:
        return self.r * complex(math.cos(self.beta), math.sin(self.beta))


def unitarity_defect(U) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def check_unitary(U, tol=UNITARY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise InvalidArgumentError(f"passive network must be a square matrix, got shape {U.shape}")
    defect = unitarity_defect(U)
    if defect > tol:
        raise NonUnitaryError(defect)
    return U


@dataclass(frozen=True)
class Squeeze:
    """Single-mode squeezer S(zeta); ``inverse=True`` gives S(zeta)^-1."""

    mode: int
    params: SqueezeParams
    inverse: bool = False


@dataclass(frozen=True)
class Displace:
    mode: int
    alpha: complex


@dataclass(frozen=True)
class Rotate:
    """Phase shift exp(+i*phi*n) on one mode, so that <a> -> exp(i*phi)<a>."""

    mode: int
    phi: float


@dataclass(frozen=True)
class Passive:
    """Linear-optical network acting on mode operators as a -> U a."""

    U: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "U", check_unitary(self.U))

    def dagger(self) -> "Passive":
        return Passive(self.U.conj().T)


@dataclass(frozen=True)
class ModeSqueeze:
    """Squeezer acting on the collective mode b = sum_j conj(u_j) a_j.

    Equals U S_0 U^dag for any passive U whose first column is ``u``; since
    U leaves the vacuum invariant, U S_0 |0> = ModeSqueeze(u)|0>.
    """

    u: np.ndarray = field(compare=False)
    params: SqueezeParams = field(default_factory=lambda: SqueezeParams(0.0))
    inverse: bool = False

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex).reshape(-1)
        if u.size == 0 or abs(np.linalg.norm(u) - 1) > UNITARY_TOL:
            raise InvalidArgumentError(f"collective mode vector must be normalized, got norm {np.linalg.norm(u)}")
        object.__setattr__(self, "u", u)


def complete_unitary(u) -> np.ndarray:
    """A unitary matrix whose first column is the unit vector ``u``."""
    u = np.asarray(u, dtype=complex).reshape(-1)
    n = u.size
    phase = u[0] / abs(u[0]) if abs(u[0]) > 0 else 1.0
    target = u / phase  # real nonnegative first entry
    v = -target
    v[0] += 1.0
    norm2 = float(np.vdot(v, v).real)
    H = np.eye(n, dtype=complex)
    if norm2 > 1e-30:
        H -= 2.0 * np.outer(v, v.conj()) / norm2
    return phase * H


Element = Squeeze | ModeSqueeze | Displace | Rotate | Passive
