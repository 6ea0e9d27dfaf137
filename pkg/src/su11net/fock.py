"""Brute-force state-vector simulator in a truncated number basis.

This backend shares no code with :mod:`su11net.gaussian`; it exists so the
Gaussian results can be checked against direct matrix exponentials of the
bosonic generators.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .elements import Displace, Element, ModeSqueeze, Passive, Rotate, Squeeze, check_unitary
from .errors import InvalidArgumentError, TruncationOverflowError

MAX_MODES = 4
DEFAULT_GUARD = 1e-6
NORM_TOL = 1e-10
# above this Hilbert-space dimension multimode generators are exponentiated
# against the state vector instead of densely
DENSE_LIMIT = 1500


@dataclass(frozen=True, eq=False)
class FockState:
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.ndim < 1 or amps.ndim > MAX_MODES:
            raise InvalidArgumentError(f"Fock backend supports 1..{MAX_MODES} modes, got {amps.ndim}")
        if len(set(amps.shape)) != 1 or amps.shape[0] < 2:
            raise InvalidArgumentError(f"all modes need the same cutoff >= 2, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def mode_count(self) -> int:
        return self.amps.ndim

    @property
    def cutoff(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)


def vacuum(M: int, cutoff: int) -> FockState:
    if int(M) != M or M < 1:
        raise InvalidArgumentError(f"mode count must be a positive integer, got {M!r}")
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidArgumentError(f"cutoff must be an integer >= 2, got {cutoff!r}")
    amps = np.zeros((int(cutoff),) * int(M), dtype=complex)
    amps[(0,) * int(M)] = 1.0
    return FockState(amps)


@lru_cache(maxsize=None)
def _annihilation(N: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)
    a.setflags(write=False)
    return a


def single_mode_generator(element: Element, N: int) -> np.ndarray:
    """Anti-Hermitian generator G with element = exp(G) on a cutoff-N mode."""
    a = _annihilation(N)
    ad = a.conj().T
    if isinstance(element, Squeeze):
        zeta = element.params.zeta
        G = 0.5 * zeta * (ad @ ad) - 0.5 * np.conj(zeta) * (a @ a)
        return -G if element.inverse else G
    if isinstance(element, Displace):
        alpha = complex(element.alpha)
        return alpha * ad - np.conj(alpha) * a
    if isinstance(element, Rotate):
        return np.diag(1j * float(element.phi) * np.arange(N)).astype(complex)
    raise InvalidArgumentError(f"{type(element).__name__} is not a single-mode element")


def log_unitary(U) -> np.ndarray:
    """Principal matrix logarithm of a unitary, via its (normal) Schur form."""
    U = check_unitary(U)
    T, Z = la.schur(U, output="complex")
    lam = np.diag(T)
    return Z @ np.diag(np.log(lam)) @ Z.conj().T


@lru_cache(maxsize=16)
def _lowering_ops(M: int, N: int) -> tuple:
    a = sp.csr_matrix(_annihilation(N))
    eye = sp.identity(N, dtype=complex, format="csr")
    ops = []
    for j in range(M):
        op = sp.csr_matrix(np.ones((1, 1), dtype=complex))
        for k in range(M):
            op = sp.kron(op, a if k == j else eye, format="csr")
        ops.append(op)
    return tuple(ops)


def passive_generator(U, N: int) -> sp.csr_matrix:
    """Sparse sum_jk L_jk a_j^dag a_k with L = log U on the truncated product space."""
    L = log_unitary(U)
    M = L.shape[0]
    lowering = _lowering_ops(M, N)
    G = sp.csr_matrix((N**M, N**M), dtype=complex)
    for j in range(M):
        for k in range(M):
            if abs(L[j, k]) > 0:
                G = G + L[j, k] * (lowering[j].conj().T @ lowering[k])
    return G.tocsr()


def mode_squeeze_generator(element: ModeSqueeze, N: int) -> sp.csr_matrix:
    """Sparse zeta/2 b^dag^2 - conj(zeta)/2 b^2 for b = sum_j conj(u_j) a_j."""
    lowering = _lowering_ops(element.u.size, N)
    b = sum(np.conj(uj) * op for uj, op in zip(element.u, lowering) if uj != 0)
    bd = b.conj().T
    zeta = element.params.zeta
    G = 0.5 * zeta * (bd @ bd) - 0.5 * np.conj(zeta) * (b @ b)
    return (-G if element.inverse else G).tocsr()


def _exp_apply(G: sp.csr_matrix, psi: np.ndarray) -> np.ndarray:
    if psi.size <= DENSE_LIMIT:
        return la.expm(G.toarray()) @ psi
    return expm_multiply(G, psi)


def truncation_weight(state: FockState) -> float:
    """Largest probability found in the top two levels of any single mode."""
    probs = np.abs(state.amps) ** 2
    worst = 0.0
    for axis in range(state.mode_count):
        top = np.take(probs, [state.cutoff - 2, state.cutoff - 1], axis=axis)
        worst = max(worst, float(top.sum()))
    return worst


def _apply_single(amps: np.ndarray, mode: int, op: np.ndarray) -> np.ndarray:
    out = np.tensordot(op, amps, axes=([1], [mode]))
    return np.moveaxis(out, 0, mode)


def apply_element(state: FockState, element: Element, guard: float = DEFAULT_GUARD) -> FockState:
    M, N = state.mode_count, state.cutoff
    if isinstance(element, (Passive, ModeSqueeze)):
        size = element.U.shape[0] if isinstance(element, Passive) else element.u.size
        if size != M:
            raise InvalidArgumentError(f"element acts on {size} modes but the state has {M}")
        if isinstance(element, Passive):
            G = passive_generator(element.U, N)
        else:
            G = mode_squeeze_generator(element, N)
        amps = _exp_apply(G, state.vector()).reshape(state.amps.shape)
    else:
        mode = element.mode
        if int(mode) != mode or not 0 <= mode < M:
            raise InvalidArgumentError(f"mode {mode!r} out of range for {M} modes")
        if isinstance(element, Rotate):
            op = np.diag(np.exp(1j * float(element.phi) * np.arange(N)))
        else:
            op = la.expm(single_mode_generator(element, N))
        amps = _apply_single(state.amps, int(mode), op)
    new = FockState(amps)
    drift = abs(new.norm() - 1.0)
    if drift > NORM_TOL:
        raise TruncationOverflowError(drift, NORM_TOL)
    weight = truncation_weight(new)
    if weight > guard:
        raise TruncationOverflowError(weight, guard)
    return new


def run(elements, M: int, cutoff: int, guard: float = DEFAULT_GUARD) -> FockState:
    return run_traced(elements, M, cutoff, guard)[0]


def run_traced(elements, M: int, cutoff: int, guard: float = DEFAULT_GUARD) -> tuple[FockState, float]:
    """Final state plus the largest truncation weight seen after any element.

    A time-reversed circuit ends near vacuum, so the final weight alone hides
    truncation damage done mid-circuit; the peak is the honest error scale.
    """
    state = vacuum(M, cutoff)
    peak = 0.0
    for element in elements:
        state = apply_element(state, element, guard=guard)
        peak = max(peak, truncation_weight(state))
    return state, peak


def _number_diag(state: FockState, mode: int) -> np.ndarray:
    probs = np.abs(state.amps) ** 2
    other = tuple(ax for ax in range(state.mode_count) if ax != mode)
    return probs.sum(axis=other) if other else probs


def photon_moments(state: FockState, mode: int) -> tuple[float, float]:
    """Mean and variance of n on ``mode`` in the truncated basis."""
    if int(mode) != mode or not 0 <= mode < state.mode_count:
        raise InvalidArgumentError(f"mode {mode!r} out of range for {state.mode_count} modes")
    p = _number_diag(state, int(mode))
    n = np.arange(state.cutoff)
    mean = float(p @ n)
    return mean, float(p @ n**2 - mean**2)


def mode_amplitude(state: FockState, mode: int) -> complex:
    """<a> on one mode."""
    a = _annihilation(state.cutoff)
    return complex(np.vdot(state.amps, _apply_single(state.amps, mode, a)))


def quadrature_moments(state: FockState, mode: int) -> tuple[float, float]:
    """Mean and variance of Y = (a - a^dag)/(2i)."""
    a = _annihilation(state.cutoff)
    Y = (a - a.conj().T) / 2j
    y = _apply_single(state.amps, mode, Y)
    mean = np.vdot(state.amps, y).real
    second = np.vdot(y, y).real
    return float(mean), float(second - mean**2)


def overlap(s1: FockState, s2: FockState) -> complex:
    """<s1|s2>."""
    if s1.amps.shape != s2.amps.shape:
        raise InvalidArgumentError(f"state shapes differ: {s1.amps.shape} vs {s2.amps.shape}")
    return complex(np.vdot(s1.amps, s2.amps))


@dataclass(frozen=True)
class QFIEstimate:
    """Finite-difference QFI with one Richardson refinement."""

    value: float
    coarse: float  # step h
    fine: float  # step h/2
    h: float

    @property
    def relative_change(self) -> float:
        return abs(self.fine - self.coarse) / max(abs(self.fine), np.finfo(float).tiny)

    @property
    def converged(self) -> bool:
        return self.relative_change <= 0.1

    def __float__(self):
        return self.value


def _qfi_step(family, psi0: np.ndarray, eta0: float, h: float) -> float:
    plus = family(eta0 + h).vector()
    minus = family(eta0 - h).vector()
    if plus.shape != psi0.shape or minus.shape != psi0.shape:
        raise InvalidArgumentError("family produced states of different shapes")
    dpsi = (plus - minus) / (2 * h)
    return float(4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi0, dpsi)) ** 2))


def qfi_numeric(family, eta0: float, h: float = 1e-4) -> QFIEstimate:
    """QFI 4(<d psi|d psi> - |<psi|d psi>|^2) of a pure-state family by central differences.

    ``family`` maps a real parameter to a :class:`FockState`.
    """
    if not h > 0:
        raise InvalidArgumentError(f"step h must be positive, got {h!r}")
    psi0 = family(eta0).vector()
    coarse = _qfi_step(family, psi0, eta0, h)
    fine = _qfi_step(family, psi0, eta0, h / 2)
    est = QFIEstimate(value=(4 * fine - coarse) / 3, coarse=coarse, fine=fine, h=h)
    if not est.converged:
        warnings.warn(
            f"QFI finite difference not converged: relative change {est.relative_change:.2e} "
            f"when halving h={h:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return est
