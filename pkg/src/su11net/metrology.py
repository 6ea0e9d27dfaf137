"""Error sensitivity, quantum Fisher information and Cramer-Rao bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import fock, gaussian
from .elements import SqueezeParams
from .errors import DegenerateSlopeError, InvalidArgumentError
from .interferometer import (
    FockBackend,
    Pipeline,
    Scheme,
    as_scheme,
    build_pipeline,
    encoded_state,
    resolve_backend,
    run,
)

DEFAULT_DISPLACEMENT_POINT = 0.1
DEFAULT_PHASE_POINT = 1e-4
MIN_SLOPE = 1e-14
# saturation ratio may dip below 1 by this much before it is treated as a bound violation
DISPLACEMENT_RATIO_TOL = 1e-6
PHASE_RATIO_TOL = 5e-3


class _Unbounded:
    """Marker for a bound that carries no information (zero Fisher information)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "unbounded"

    def __reduce__(self):
        return (_Unbounded, ())


UNBOUNDED = _Unbounded()


def qcrb(F_Q):
    """Quantum Cramer-Rao bound 1/sqrt(F_Q); ``UNBOUNDED`` when F_Q == 0."""
    F_Q = float(F_Q)
    if math.isnan(F_Q) or F_Q < 0:
        raise InvalidArgumentError(f"Fisher information must be >= 0, got {F_Q}")
    if F_Q == 0:
        return UNBOUNDED
    return 1.0 / math.sqrt(F_Q)


def qfi_closed_form(scheme, M: int, r: float, alpha: float | None = None) -> float:
    """Closed-form QFI of the network average for the probe orientations used here.

    Displacement: 4 M e^{2r} (beta - 2 theta = pi). Phase with a squeezed
    vacuum probe: 8 sinh^2 r (1 + sinh^2 r), independent of M. Phase with a
    squeezed coherent probe S(r)|alpha>, alpha real:
    4 [sinh^4 r + sinh^2 r + sinh^2 r cosh^2 r + alpha^2 e^{2r} (1 + 2 sinh^2 r + 2 sinh r cosh r)].
    """
    scheme = as_scheme(scheme)
    s, c = math.sinh(r), math.cosh(r)
    if scheme.is_displacement:
        return 4.0 * M * math.exp(2 * r)
    if scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        if alpha is None:
            raise InvalidArgumentError("the squeezed-coherent QFI needs the coherent amplitude alpha")
        alpha = float(alpha)
        return 4.0 * (
            s**4 + s**2 + s**2 * c**2 + alpha**2 * math.exp(2 * r) * (1 + 2 * s**2 + 2 * s * c)
        )
    return 8.0 * s**2 * (1 + s**2)


def default_eval_point(pipeline: Pipeline) -> float:
    mean = float(np.mean(pipeline.encoding))
    if mean != 0:
        return mean
    return DEFAULT_DISPLACEMENT_POINT if pipeline.scheme.is_displacement else DEFAULT_PHASE_POINT


def default_step(eta0: float) -> float:
    return max(1e-6, 1e-4 * abs(eta0))


def encoding_at(pipeline: Pipeline, eta: float) -> np.ndarray:
    """Node parameters with their average moved to ``eta``, spread kept fixed."""
    enc = pipeline.encoding
    return enc - enc.mean() + eta


def at(pipeline: Pipeline, eta: float) -> Pipeline:
    return pipeline.with_encoding(encoding_at(pipeline, eta))


def signal_stats(pipeline: Pipeline, port: int = 0, backend=None) -> tuple[float, float]:
    """Mean photon number at ``port`` and its standard deviation."""
    backend = resolve_backend(backend)
    if int(port) != port or not 0 <= port < pipeline.M:
        raise InvalidArgumentError(f"port {port!r} out of range for {pipeline.M} modes")
    state = run(pipeline, backend)
    mean, var = backend.photon_stats(state, int(port))
    return mean, math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class Slope:
    value: float
    uncertainty: float


def central_slope(fn, eta0: float, h: float) -> Slope:
    """Central difference at steps h and h/2 with one Richardson refinement."""
    if not h > 0:
        raise InvalidArgumentError(f"step h must be positive, got {h!r}")
    coarse = (fn(eta0 + h) - fn(eta0 - h)) / (2 * h)
    fine = (fn(eta0 + h / 2) - fn(eta0 - h / 2)) / h
    return Slope((4 * fine - coarse) / 3, abs(fine - coarse))


@dataclass(frozen=True)
class Sensitivity:
    eval_point: float
    signal: float
    signal_std: float
    slope: Slope

    @property
    def delta(self) -> float:
        return self.signal_std / abs(self.slope.value)


def _check_point(pipeline: Pipeline, eta0: float):
    if pipeline.scheme.is_phase and eta0 == 0:
        raise DegenerateSlopeError(eta0, 0.0)


def _checked(sens: Sensitivity) -> Sensitivity:
    if not abs(sens.slope.value) >= MIN_SLOPE:
        raise DegenerateSlopeError(sens.eval_point, sens.slope.value)
    return sens


def intensity_sensitivity(pipeline, eta0=None, h=None, backend=None, port: int = 0) -> Sensitivity:
    backend = resolve_backend(backend)
    eta0 = default_eval_point(pipeline) if eta0 is None else float(eta0)
    h = default_step(eta0) if h is None else float(h)
    _check_point(pipeline, eta0)

    def signal(eta):
        return signal_stats(at(pipeline, eta), port, backend)[0]

    S, dS = signal_stats(at(pipeline, eta0), port, backend)
    return _checked(Sensitivity(eta0, S, dS, central_slope(signal, eta0, h)))


def error_sensitivity(pipeline: Pipeline, eta0=None, h=None, backend=None) -> float:
    """Delta eta = Delta S / |dS/d eta| for the photon number at port 0.

    The target eta is the network average (|alpha| for the single-mode
    displacement scheme); moving it shifts every node parameter equally.
    """
    if pipeline.scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        raise InvalidArgumentError("use homodyne_sensitivity for the homodyne scheme")
    return intensity_sensitivity(pipeline, eta0, h, backend).delta


def quadrature_sensitivity(pipeline, eta0=None, h=None, backend=None) -> Sensitivity:
    if pipeline.scheme is not Scheme.NETWORK_PHASE_HOMODYNE:
        raise InvalidArgumentError(f"homodyne readout needs the {Scheme.NETWORK_PHASE_HOMODYNE.value} scheme")
    backend = resolve_backend(backend)
    eta0 = default_eval_point(pipeline) if eta0 is None else float(eta0)
    h = default_step(eta0) if h is None else float(h)
    _check_point(pipeline, eta0)

    def signal(eta):
        return backend.quadrature_stats(run(at(pipeline, eta), backend), 0)[0]

    mean_y, var_y = backend.quadrature_stats(run(at(pipeline, eta0), backend), 0)
    return _checked(Sensitivity(eta0, mean_y, math.sqrt(var_y), central_slope(signal, eta0, h)))


def homodyne_sensitivity(pipeline: Pipeline, backend=None, eta0=None, h=None) -> float:
    """Sensitivity from the Y = (a - a^dag)/2i quadrature at port 0, i.e. Im<a_1>."""
    if pipeline.seed is None or pipeline.seed == 0:
        raise InvalidArgumentError("homodyne sensitivity needs a nonzero coherent seed")
    return quadrature_sensitivity(pipeline, eta0, h, backend).delta


def qfi_generator_variance(pipeline: Pipeline, eta0=None) -> float:
    """QFI as 4 Var(G) in the encoded Gaussian state, G generating the average."""
    eta0 = default_eval_point(pipeline) if eta0 is None else float(eta0)
    state = encoded_state(at(pipeline, eta0), "gaussian")
    M = pipeline.M
    if pipeline.scheme.is_displacement:
        # G = i sum_j (e^{i theta} a_j^dag - e^{-i theta} a_j) = sqrt(2) sum_j (sin theta x_j - cos theta p_j)
        v = np.concatenate([np.full(M, math.sin(pipeline.theta)), np.full(M, -math.cos(pipeline.theta))])
        return 4.0 * 2.0 * gaussian.quadrature_variance(state, v)
    return 4.0 * gaussian.number_variance(state)


def fock_family(pipeline: Pipeline, cutoff: int, guard: float = fock.DEFAULT_GUARD):
    """eta -> encoded Fock state with the node average set to eta."""
    backend = FockBackend(cutoff, guard)
    prefix = backend.run(pipeline.compact_preparation(), pipeline.M)

    def family(eta):
        state = prefix
        for element in at(pipeline, eta).encoders():
            state = fock.apply_element(state, element, guard=guard)
        return state

    return family


def qfi_fock(pipeline: Pipeline, cutoff: int, eta0=None, h: float = 1e-4, guard=fock.DEFAULT_GUARD):
    """Numerical QFI of the encoded state from the Fock oracle."""
    eta0 = default_eval_point(pipeline) if eta0 is None else float(eta0)
    return fock.qfi_numeric(fock_family(pipeline, cutoff, guard), eta0, h)


@dataclass(frozen=True)
class SensitivityReport:
    scheme: str
    M: int
    r: float
    beta: float
    eval_point: float
    signal: float
    signal_std: float
    slope: float
    delta_measured: float
    qfi_closed: float
    qfi_numeric: float | None
    qcrb: object
    saturation_ratio: float | None
    flags: tuple = ()
    slope_uncertainty: float = 0.0
    qfi_generator: float | None = None
    # phase networks only: signal decomposition at the evaluation point
    phase_spread: float | None = None
    i1: float | None = None
    i2: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def saturation_report(
    scheme,
    M: int,
    r: float,
    encoding=None,
    *,
    beta: float | None = None,
    distributor="dft",
    seed: float | None = None,
    theta: float = 0.0,
    eval_point: float | None = None,
    h: float | None = None,
    backend=None,
    qfi_cutoff: int | None = None,
    guard: float = fock.DEFAULT_GUARD,
) -> SensitivityReport:
    """Measured sensitivity next to the closed-form QFI and its Cramer-Rao bound."""
    scheme = as_scheme(scheme)
    beta = scheme.default_beta if beta is None else float(beta)
    pipeline = build_pipeline(
        scheme, M, SqueezeParams(r, beta), distributor, encoding, theta=theta, seed=seed
    )
    backend = resolve_backend(backend)
    flags = []

    if scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        sens = quadrature_sensitivity(pipeline, eval_point, h, backend)
    else:
        sens = intensity_sensitivity(pipeline, eval_point, h, backend)
    eta0 = sens.eval_point
    delta = sens.delta

    qfi_closed = qfi_closed_form(scheme, M, r, alpha=seed)
    bound = qcrb(qfi_closed)
    ratio = None if bound is UNBOUNDED else delta / bound

    qfi_num = None
    if qfi_cutoff is not None:
        est = qfi_fock(pipeline, qfi_cutoff, eta0, guard=guard)
        qfi_num = est.value
        if not est.converged:
            flags.append("qfi-not-converged")

    # the displacement closed form needs beta - 2 theta = pi, the squeezed-coherent one beta = 0
    if scheme.is_displacement:
        offset = (pipeline.probe.beta - 2 * theta - math.pi) % (2 * math.pi)
        if min(offset, 2 * math.pi - offset) > 1e-12:
            flags.append("misaligned-probe")
    elif scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        if min(pipeline.probe.beta, 2 * math.pi - pipeline.probe.beta) > 1e-12:
            flags.append("misaligned-probe")

    spread = i1 = i2 = None
    if scheme.is_phase:
        phis = encoding_at(pipeline, eta0)
        spread = float(np.mean(phis**2) - np.mean(phis) ** 2)
        if scheme is not Scheme.NETWORK_PHASE_HOMODYNE:
            i1 = 4 * math.cosh(r) ** 2 * math.sinh(r) ** 2 * eta0**2
            i2 = spread * math.sinh(r) ** 2
            if r < 1:
                flags.append("small-r")
            if spread > 1e-15 * max(eta0**2, 1e-300):
                flags.append("inhomogeneous")

    tol = DISPLACEMENT_RATIO_TOL if scheme.is_displacement else PHASE_RATIO_TOL
    if ratio is not None and ratio < 1 - tol:
        flags.append("below-qcrb")

    return SensitivityReport(
        scheme=scheme.value,
        M=pipeline.M,
        r=float(r),
        beta=pipeline.probe.beta,
        eval_point=eta0,
        signal=sens.signal,
        signal_std=sens.signal_std,
        slope=sens.slope.value,
        delta_measured=delta,
        qfi_closed=qfi_closed,
        qfi_numeric=qfi_num,
        qcrb=bound,
        saturation_ratio=ratio,
        flags=tuple(dict.fromkeys(flags)),
        slope_uncertainty=sens.slope.uncertainty,
        qfi_generator=qfi_generator_variance(pipeline, eta0),
        phase_spread=spread,
        i1=i1,
        i2=i2,
    )
