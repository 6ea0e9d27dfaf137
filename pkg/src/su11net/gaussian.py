"""Pure Gaussian states of M bosonic modes.

Quadratures follow x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so the
vacuum covariance is I/2. Phase-space vectors use block ordering
(x_1, ..., x_M, p_1, ..., p_M).

A state is stored as its mean vector together with the accumulated symplectic
map F taking vacuum quadratures to the current ones, so that cov = F F^T / 2.
Keeping F instead of only the covariance lets photon statistics be evaluated
from the Bogoliubov coefficients directly, which avoids the catastrophic
cancellation in (sigma_xx + sigma_pp - 1)/2 when a time-reversed circuit
brings the state back close to vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .elements import (
    Displace,
    Element,
    ModeSqueeze,
    Passive,
    Rotate,
    Squeeze,
    SqueezeParams,
    check_unitary,
    complete_unitary,
)
from .errors import InvalidArgumentError

SQRT2 = np.sqrt(2.0)


def symplectic_form(M: int) -> np.ndarray:
    """Omega = [[0, I], [-I, 0]] in block ordering."""
    I = np.eye(M)
    Z = np.zeros((M, M))
    return np.block([[Z, I], [-I, Z]])


@dataclass(frozen=True, eq=False)
class GaussianState:
    mean: np.ndarray
    symplectic: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        F = np.asarray(self.symplectic, dtype=float)
        if mean.ndim != 1 or mean.size % 2 or mean.size == 0:
            raise InvalidArgumentError(f"mean must be a nonempty vector of even length, got {mean.shape}")
        if F.shape != (mean.size, mean.size):
            raise InvalidArgumentError(f"symplectic map shape {F.shape} does not match mean length {mean.size}")
        mean.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "symplectic", F)

    @property
    def mode_count(self) -> int:
        return self.mean.size // 2

    @cached_property
    def cov(self) -> np.ndarray:
        F = self.symplectic
        cov = 0.5 * F @ F.T
        cov = 0.5 * (cov + cov.T)
        cov.setflags(write=False)
        return cov

    @cached_property
    def bogoliubov(self) -> tuple[np.ndarray, np.ndarray]:
        """Matrices (A, B) with a_i = sum_k A_ik a_k + B_ik a_k^dag over vacuum operators."""
        M = self.mode_count
        F = self.symplectic
        Fxx, Fxp = F[:M, :M], F[:M, M:]
        Fpx, Fpp = F[M:, :M], F[M:, M:]
        A = 0.5 * ((Fxx + Fpp) + 1j * (Fpx - Fxp))
        B = 0.5 * ((Fxx - Fpp) + 1j * (Fpx + Fxp))
        return A, B

    @property
    def amplitudes(self) -> np.ndarray:
        """Complex mode means <a_j>."""
        M = self.mode_count
        return (self.mean[:M] + 1j * self.mean[M:]) / SQRT2

    def purity_defect(self) -> float:
        """|det(2 cov) - 1|; zero for a pure state."""
        return abs(float(np.linalg.det(2.0 * self.cov)) - 1.0)

    def min_uncertainty_eigenvalue(self) -> float:
        """Smallest eigenvalue of cov + (i/2) Omega; nonnegative for a physical state."""
        H = self.cov + 0.5j * symplectic_form(self.mode_count)
        return float(np.linalg.eigvalsh(H).min())


def vacuum(M: int) -> GaussianState:
    if int(M) != M or M < 1:
        raise InvalidArgumentError(f"mode count must be a positive integer, got {M!r}")
    M = int(M)
    return GaussianState(np.zeros(2 * M), np.eye(2 * M))


def _check_mode(state: GaussianState, mode) -> int:
    if int(mode) != mode or not 0 <= mode < state.mode_count:
        raise InvalidArgumentError(f"mode {mode!r} out of range for {state.mode_count} modes")
    return int(mode)


def _embed(M: int, mode: int, block: np.ndarray) -> np.ndarray:
    F = np.eye(2 * M)
    idx = np.array([mode, mode + M])
    F[np.ix_(idx, idx)] = block
    return F


def squeeze_block(params: SqueezeParams, inverse: bool = False) -> np.ndarray:
    """2x2 quadrature map of S(zeta)^dag a S(zeta) = a cosh r + a^dag e^{i beta} sinh r."""
    c, s = np.cosh(params.r), np.sinh(params.r)
    if inverse:
        s = -s
    cb, sb = np.cos(params.beta), np.sin(params.beta)
    return np.array([[c + s * cb, s * sb], [s * sb, c - s * cb]])


def rotation_block(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def passive_symplectic(U) -> np.ndarray:
    """Quadrature map [[X, -Y], [Y, X]] of a -> U a with U = X + iY."""
    U = np.asarray(U, dtype=complex)
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def apply_symplectic(state: GaussianState, F: np.ndarray) -> GaussianState:
    return GaussianState(F @ state.mean, F @ state.symplectic)


def squeeze(state: GaussianState, mode: int, params: SqueezeParams) -> GaussianState:
    """Apply S(zeta); beta=0 stretches x by e^r, beta=pi stretches p by e^r."""
    mode = _check_mode(state, mode)
    return apply_symplectic(state, _embed(state.mode_count, mode, squeeze_block(params)))


def squeeze_inverse(state: GaussianState, mode: int, params: SqueezeParams) -> GaussianState:
    mode = _check_mode(state, mode)
    return apply_symplectic(state, _embed(state.mode_count, mode, squeeze_block(params, inverse=True)))


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    mode = _check_mode(state, mode)
    M = state.mode_count
    alpha = complex(alpha)
    mean = state.mean.copy()
    mean[mode] += SQRT2 * alpha.real
    mean[mode + M] += SQRT2 * alpha.imag
    return GaussianState(mean, state.symplectic)


def rotate(state: GaussianState, mode: int, phi: float) -> GaussianState:
    """Phase shift exp(i phi n): <a> -> e^{i phi} <a>."""
    mode = _check_mode(state, mode)
    return apply_symplectic(state, _embed(state.mode_count, mode, rotation_block(float(phi))))


def apply_passive(state: GaussianState, U) -> GaussianState:
    U = check_unitary(U)
    if U.shape[0] != state.mode_count:
        raise InvalidArgumentError(
            f"network acts on {U.shape[0]} modes but the state has {state.mode_count}"
        )
    return apply_symplectic(state, passive_symplectic(U))


def apply_element(state: GaussianState, element: Element) -> GaussianState:
    if isinstance(element, Squeeze):
        fn = squeeze_inverse if element.inverse else squeeze
        return fn(state, element.mode, element.params)
    if isinstance(element, ModeSqueeze):
        if element.u.size != state.mode_count:
            raise InvalidArgumentError(
                f"collective mode spans {element.u.size} modes but the state has {state.mode_count}"
            )
        W = complete_unitary(element.u)
        fn = squeeze_inverse if element.inverse else squeeze
        return apply_passive(fn(apply_passive(state, W.conj().T), 0, element.params), W)
    if isinstance(element, Displace):
        return displace(state, element.mode, element.alpha)
    if isinstance(element, Rotate):
        return rotate(state, element.mode, element.phi)
    if isinstance(element, Passive):
        return apply_passive(state, element.U)
    raise InvalidArgumentError(f"unknown circuit element {element!r}")


def photon_mean(state: GaussianState, mode: int) -> float:
    """<n> = (sigma_xx + sigma_pp - 1)/2 + |d|^2/2, evaluated as sum_k |B_mk|^2 + |<a_m>|^2."""
    mode = _check_mode(state, mode)
    _, B = state.bogoliubov
    n0 = float(np.sum(np.abs(B[mode]) ** 2))
    return n0 + float(abs(state.amplitudes[mode]) ** 2)


def number_variance(state: GaussianState, modes=None) -> float:
    """Variance of the total photon number over ``modes`` (all modes by default).

    For a single mode this equals (tr(sigma^2) - 1/2)/2 + d^T sigma d.
    """
    if modes is None:
        modes = range(state.mode_count)
    idx = np.array([_check_mode(state, m) for m in modes], dtype=int)
    A, B = state.bogoliubov
    A, B = A[idx], B[idx]
    alpha = state.amplitudes[idx]
    N = B.conj() @ B.T  # <da_i^dag da_j>
    Mm = A @ B.T  # <da_i da_j>
    var = np.sum(np.abs(N) ** 2) + np.sum(np.abs(Mm) ** 2) + np.trace(N).real
    var += np.sum(np.abs(alpha) ** 2)
    var += 2 * (alpha.conj() @ N.T @ alpha).real
    var += 2 * (alpha.conj() @ Mm @ alpha.conj()).real
    return float(var)


def photon_variance(state: GaussianState, mode: int) -> float:
    return number_variance(state, [mode])


def quadrature_stats(state: GaussianState, mode: int) -> tuple[float, float]:
    """Mean and variance of Y = (a - a^dag)/(2i), whose vacuum variance is 1/4."""
    mode = _check_mode(state, mode)
    M = state.mode_count
    return float(state.mean[mode + M] / SQRT2), float(state.cov[mode + M, mode + M] / 2)


def quadrature_variance(state: GaussianState, direction) -> float:
    """Variance of the linear combination direction . (x, p)."""
    v = np.asarray(direction, dtype=float)
    return float(v @ state.cov @ v)
