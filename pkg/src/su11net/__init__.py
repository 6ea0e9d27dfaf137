"""Simulation and metrology toolkit for time-reversed squeezed-light interferometer networks."""

from .elements import Displace, ModeSqueeze, Passive, Rotate, Squeeze, SqueezeParams
from .errors import DegenerateSlopeError, InvalidArgumentError, NonUnitaryError, TruncationOverflowError
from .gaussian import GaussianState
from .interferometer import FockBackend, GaussianBackend, Pipeline, Scheme, balanced_distributor, build_pipeline
from .metrology import (
    UNBOUNDED,
    SensitivityReport,
    error_sensitivity,
    homodyne_sensitivity,
    qcrb,
    qfi_closed_form,
    qfi_fock,
    qfi_generator_variance,
    saturation_report,
)

__version__ = "0.1.0"

__all__ = [
    "UNBOUNDED",
    "DegenerateSlopeError",
    "Displace",
    "FockBackend",
    "GaussianBackend",
    "GaussianState",
    "InvalidArgumentError",
    "ModeSqueeze",
    "NonUnitaryError",
    "Passive",
    "Pipeline",
    "Rotate",
    "Scheme",
    "SensitivityReport",
    "Squeeze",
    "SqueezeParams",
    "TruncationOverflowError",
    "balanced_distributor",
    "build_pipeline",
    "error_sensitivity",
    "homodyne_sensitivity",
    "qcrb",
    "qfi_closed_form",
    "qfi_fock",
    "qfi_generator_variance",
    "saturation_report",
]
