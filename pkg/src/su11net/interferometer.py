"""Time-reversed SU(1,1)-SU(m) circuits as backend-agnostic pipelines.

Every scheme has the same skeleton::

    squeeze(mode 0) -> U -> encode each node -> U^dag -> squeeze^-1(mode 0)

The homodyne variant seeds mode 0 with a coherent amplitude before squeezing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import hadamard

from . import fock, gaussian
from .elements import Displace, ModeSqueeze, Passive, Rotate, Squeeze, SqueezeParams
from .errors import InvalidArgumentError


class Scheme(str, enum.Enum):
    SINGLE_DISPLACEMENT = "single-displacement"
    SINGLE_PHASE = "single-phase"
    NETWORK_DISPLACEMENT = "network-displacement"
    NETWORK_PHASE = "network-phase"
    NETWORK_PHASE_HOMODYNE = "network-phase-homodyne"

    @property
    def is_displacement(self) -> bool:
        return self in (Scheme.SINGLE_DISPLACEMENT, Scheme.NETWORK_DISPLACEMENT)

    @property
    def is_phase(self) -> bool:
        return not self.is_displacement

    @property
    def single_mode(self) -> bool:
        return self in (Scheme.SINGLE_DISPLACEMENT, Scheme.SINGLE_PHASE)

    @property
    def default_beta(self) -> float:
        return math.pi if self.is_displacement else 0.0


def as_scheme(scheme) -> Scheme:
    try:
        return Scheme(scheme)
    except ValueError:
        known = ", ".join(s.value for s in Scheme)
        raise InvalidArgumentError(f"unknown scheme {scheme!r}; expected one of {known}") from None


class DistributorKind(str, enum.Enum):
    DFT = "dft"
    HADAMARD = "hadamard"


@dataclass(frozen=True, eq=False)
class Distributor:
    kind: DistributorKind
    matrix: np.ndarray

    @property
    def M(self) -> int:
        return self.matrix.shape[0]


def balanced_distributor(M: int, kind="dft") -> Distributor:
    """Unitary whose first column has every entry equal to 1/sqrt(M).

    ``dft`` gives U_jk = exp(2 pi i jk / M)/sqrt(M); ``hadamard`` the Sylvester
    matrix scaled by 1/sqrt(M), defined for M a power of two.
    """
    if int(M) != M or M < 1:
        raise InvalidArgumentError(f"mode count must be a positive integer, got {M!r}")
    M = int(M)
    try:
        kind = DistributorKind(str(kind).lower())
    except ValueError:
        raise InvalidArgumentError(f"unknown distributor kind {kind!r}; expected 'dft' or 'hadamard'") from None
    if kind is DistributorKind.DFT:
        j = np.arange(M)
        U = np.exp(2j * np.pi * np.outer(j, j) / M) / np.sqrt(M)
    else:
        if M & (M - 1):
            raise InvalidArgumentError(f"Hadamard distributor needs M to be a power of two, got {M}")
        U = hadamard(M).astype(complex) / np.sqrt(M)
    U.setflags(write=False)
    return Distributor(kind, U)


@dataclass(frozen=True, eq=False)
class Pipeline:
    """A fully specified circuit.

    ``encoding`` holds the node parameters: |alpha_j| (along direction
    ``theta``) for displacement schemes, phi_j for phase schemes.
    """

    scheme: Scheme
    probe: SqueezeParams
    distributor: Distributor
    encoding: np.ndarray
    theta: float = 0.0
    seed: float | None = None

    @property
    def M(self) -> int:
        return self.distributor.M

    def with_encoding(self, encoding) -> "Pipeline":
        enc = np.asarray(encoding, dtype=float).copy()
        if enc.shape != (self.M,):
            raise InvalidArgumentError(f"encoding has length {enc.size} but the network has {self.M} modes")
        enc.setflags(write=False)
        return replace(self, encoding=enc)

    def preparation(self) -> list:
        elems = []
        if self.scheme is Scheme.NETWORK_PHASE_HOMODYNE:
            elems.append(Displace(0, complex(self.seed)))
        elems.append(Squeeze(0, self.probe))
        if not np.array_equal(self.distributor.matrix, np.eye(self.M)):
            elems.append(Passive(self.distributor.matrix))
        return elems

    def encoders(self) -> list:
        if self.scheme.is_displacement:
            direction = complex(math.cos(self.theta), math.sin(self.theta))
            return [Displace(j, a * direction) for j, a in enumerate(self.encoding)]
        return [Rotate(j, phi) for j, phi in enumerate(self.encoding)]

    def reversal(self) -> list:
        elems = []
        if not np.array_equal(self.distributor.matrix, np.eye(self.M)):
            elems.append(Passive(self.distributor.matrix).dagger())
        elems.append(Squeeze(0, self.probe, inverse=True))
        return elems

    def elements(self) -> list:
        return self.preparation() + self.encoders() + self.reversal()

    def compact_preparation(self) -> list:
        """Preparation with U folded into the probe: U S_0 D_0 |0> = S_b D_b |0>."""
        if self.M == 1:
            return self.preparation()
        u = self.distributor.matrix[:, 0]
        elems = []
        if self.scheme is Scheme.NETWORK_PHASE_HOMODYNE:
            elems += [Displace(j, self.seed * uj) for j, uj in enumerate(u) if uj != 0]
        elems.append(ModeSqueeze(u, self.probe))
        return elems

    def compact_reversal(self) -> list:
        """S_0^-1 U^dag rewritten as U^dag S_b^-1."""
        if self.M == 1:
            return self.reversal()
        u = self.distributor.matrix[:, 0]
        return [ModeSqueeze(u, self.probe, inverse=True), Passive(self.distributor.matrix).dagger()]

    def compact_elements(self) -> list:
        """Same circuit, arranged so no single mode ever carries the whole probe.

        Used by the Fock backend: the literal sequence squeezes mode 0 alone,
        which needs a per-mode cutoff large enough for the full probe.
        """
        return self.compact_preparation() + self.encoders() + self.compact_reversal()


def build_pipeline(
    scheme,
    M: int,
    probe,
    distributor_kind="dft",
    encoding=None,
    *,
    theta: float = 0.0,
    seed: float | None = None,
) -> Pipeline:
    """Assemble a pipeline.

    ``probe`` is either :class:`SqueezeParams` or a bare squeezing magnitude r,
    in which case beta defaults to pi for displacement schemes and 0 for the
    phase schemes. ``encoding`` may be a length-M vector or a scalar applied
    to every node; it defaults to zeros.
    """
    scheme = as_scheme(scheme)
    if int(M) != M or M < 1:
        raise InvalidArgumentError(f"mode count must be a positive integer, got {M!r}")
    M = int(M)
    if scheme.single_mode and M != 1:
        raise InvalidArgumentError(f"{scheme.value} is a single-mode scheme, got M={M}")
    if not isinstance(probe, SqueezeParams):
        probe = SqueezeParams(float(probe), scheme.default_beta)
    if encoding is None:
        enc = np.zeros(M)
    else:
        enc = np.asarray(encoding, dtype=float)
        if enc.ndim == 0:
            enc = np.full(M, float(enc))
    if enc.shape != (M,):
        raise InvalidArgumentError(f"encoding has length {enc.size} but M = {M}")
    if not np.all(np.isfinite(enc)):
        raise InvalidArgumentError("encoding values must be finite")
    if scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        if seed is None or not math.isfinite(seed) or seed <= 0:
            raise InvalidArgumentError(f"homodyne scheme needs a real coherent seed alpha > 0, got {seed!r}")
        seed = float(seed)
    elif seed is not None:
        raise InvalidArgumentError(f"coherent seed only applies to {Scheme.NETWORK_PHASE_HOMODYNE.value}")
    enc = enc.copy()
    enc.setflags(write=False)
    return Pipeline(
        scheme=scheme,
        probe=probe,
        distributor=balanced_distributor(M, distributor_kind),
        encoding=enc,
        theta=float(theta),
        seed=seed,
    )


@dataclass(frozen=True)
class GaussianBackend:
    name = "gaussian"
    compact = False

    def run(self, elements, M):
        state = gaussian.vacuum(M)
        for element in elements:
            state = gaussian.apply_element(state, element)
        return state

    def photon_stats(self, state, mode):
        return gaussian.photon_mean(state, mode), gaussian.photon_variance(state, mode)

    def amplitude(self, state, mode) -> complex:
        return complex(state.amplitudes[mode])

    def quadrature_stats(self, state, mode):
        return gaussian.quadrature_stats(state, mode)


@dataclass(frozen=True)
class FockBackend:
    cutoff: int
    guard: float = field(default=fock.DEFAULT_GUARD)
    compact: bool = True
    name = "fock"

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 2:
            raise InvalidArgumentError(f"cutoff must be an integer >= 2, got {self.cutoff!r}")

    def run(self, elements, M):
        if M > fock.MAX_MODES:
            raise InvalidArgumentError(f"Fock backend supports at most {fock.MAX_MODES} modes, got {M}")
        return fock.run(elements, M, self.cutoff, guard=self.guard)

    def photon_stats(self, state, mode):
        return fock.photon_moments(state, mode)

    def amplitude(self, state, mode) -> complex:
        return fock.mode_amplitude(state, mode)

    def quadrature_stats(self, state, mode):
        return fock.quadrature_moments(state, mode)


def resolve_backend(backend=None, cutoff: int | None = None):
    """Accept a backend object, ``"gaussian"``, ``"fock"`` (with ``cutoff``) or None."""
    if backend is None or backend == "gaussian":
        return GaussianBackend()
    if isinstance(backend, (GaussianBackend, FockBackend)):
        return backend
    if backend == "fock":
        if cutoff is None:
            raise InvalidArgumentError("the fock backend needs a cutoff")
        return FockBackend(int(cutoff))
    raise InvalidArgumentError(f"unknown backend {backend!r}")


def run(pipeline: Pipeline, backend=None):
    """Output state of the whole time-reversed circuit."""
    backend = resolve_backend(backend)
    elements = pipeline.compact_elements() if backend.compact else pipeline.elements()
    return backend.run(elements, pipeline.M)


def encoded_state(pipeline: Pipeline, backend=None):
    """State right after the node encodings, before U^dag and the unsqueezer."""
    backend = resolve_backend(backend)
    prep = pipeline.compact_preparation() if backend.compact else pipeline.preparation()
    return backend.run(prep + pipeline.encoders(), pipeline.M)
