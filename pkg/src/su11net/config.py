"""Experiment configuration files (YAML) and the sweep runner."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np
import yaml

from . import fock
from .errors import DegenerateSlopeError, InvalidArgumentError, NonUnitaryError, TruncationOverflowError
from .interferometer import FockBackend, Scheme
from .metrology import UNBOUNDED, SensitivityReport, saturation_report

OUTPUT_DIR_ENV = "SU11NET_OUTPUT_DIR"
FORMATS = ("csv", "json")
PATTERNS = ("uniform", "alternating")
COLUMNS = (
    "scheme",
    "M",
    "r",
    "beta",
    "eval_point",
    "signal",
    "signal_std",
    "slope",
    "delta_measured",
    "qfi_closed",
    "qfi_numeric",
    "qcrb",
    "saturation_ratio",
    "flags",
)
# flags that mark a failed row rather than a physics caveat
ERROR_FLAGS = frozenset(
    {"truncation-overflow", "degenerate-slope", "non-unitary", "invalid-argument", "below-qcrb", "error"}
)


class ConfigError(ValueError):
    """Carries every validation problem found in a config, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid config:\n" + "\n".join(f"  - {e}" for e in self.errors))


@dataclass(frozen=True)
class Sweep:
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


@dataclass(frozen=True)
class EncodingSpec:
    """Exactly one of ``values`` (explicit), ``uniform`` or ``pattern`` is set."""

    values: tuple | None = None
    uniform: float | None = None
    pattern: str | None = None
    amplitude: float = 0.0

    def resolve(self, M: int) -> np.ndarray:
        if self.values is not None:
            return np.array(self.values, dtype=float)
        if self.uniform is not None:
            return np.full(M, self.uniform)
        if self.pattern == "alternating":
            return self.amplitude * (-1.0) ** np.arange(M)
        return np.full(M, self.amplitude)

    def to_data(self):
        if self.values is not None:
            return list(self.values)
        if self.uniform is not None:
            return {"uniform": self.uniform}
        return {"pattern": self.pattern, "amplitude": self.amplitude}


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: Scheme
    M: int = 1
    r: float | Sweep = 1.0
    beta: float | None = None
    theta: float = 0.0
    distributor: str = "dft"
    encoding: EncodingSpec = field(default_factory=EncodingSpec)
    alpha_seed: float | None = None
    backend: str = "gaussian"
    cutoff: int | None = None
    eval_point: float | None = None
    qfi_cutoff: int | None = None
    output: OutputSpec = field(default_factory=OutputSpec)

    def r_values(self) -> list[float]:
        return self.r.values() if isinstance(self.r, Sweep) else [float(self.r)]

    def to_data(self) -> dict:
        data = {"scheme": self.scheme.value, "M": self.M}
        data["r"] = (
            {"start": self.r.start, "stop": self.r.stop, "steps": self.r.steps}
            if isinstance(self.r, Sweep)
            else self.r
        )
        for key in ("beta", "theta", "distributor", "alpha_seed", "eval_point", "qfi_cutoff"):
            value = getattr(self, key)
            if value is not None:
                data[key] = value
        data["encoding"] = self.encoding.to_data()
        data["backend"] = self.backend if self.cutoff is None else {"kind": self.backend, "cutoff": self.cutoff}
        data["output"] = {"format": self.output.format}
        if self.output.path is not None:
            data["output"]["path"] = self.output.path
        return data

    def to_text(self) -> str:
        return yaml.safe_dump(self.to_data(), sort_keys=False)


_KNOWN_KEYS = {f.name for f in fields(ExperimentConfig)}


def _number(value, name, errors, *, minimum=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{name} must be a number, got {value!r}")
        return None
    if not math.isfinite(value):
        errors.append(f"{name} must be finite, got {value!r}")
        return None
    if integer and int(value) != value:
        errors.append(f"{name} must be an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        errors.append(f"{name} must be >= {minimum}, got {value!r}")
        return None
    return int(value) if integer else float(value)


def _parse_encoding(raw, errors) -> EncodingSpec:
    if raw is None:
        return EncodingSpec()
    if isinstance(raw, (list, tuple)):
        vals = [_number(v, f"encoding[{i}]", errors) for i, v in enumerate(raw)]
        return EncodingSpec(values=tuple(0.0 if v is None else v for v in vals))
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        value = _number(raw, "encoding", errors)
        return EncodingSpec(uniform=value if value is not None else 0.0)
    if isinstance(raw, dict):
        forms = [k for k in ("values", "uniform", "pattern") if k in raw]
        unknown = set(raw) - {"values", "uniform", "pattern", "amplitude"}
        if unknown:
            errors.append(f"unknown encoding keys: {', '.join(sorted(unknown))}")
        if len(forms) != 1:
            errors.append("encoding needs exactly one of an explicit list, 'uniform' or 'pattern'")
            return EncodingSpec()
        if forms[0] == "values":
            return _parse_encoding(list(raw["values"]), errors)
        if forms[0] == "uniform":
            value = _number(raw["uniform"], "encoding.uniform", errors)
            return EncodingSpec(uniform=value if value is not None else 0.0)
        pattern = raw["pattern"]
        if pattern not in PATTERNS:
            errors.append(f"unknown encoding pattern {pattern!r}; expected one of {', '.join(PATTERNS)}")
            pattern = "uniform"
        amp = _number(raw.get("amplitude", 0.0), "encoding.amplitude", errors)
        return EncodingSpec(pattern=pattern, amplitude=amp if amp is not None else 0.0)
    errors.append(f"encoding must be a list, a number or a mapping, got {raw!r}")
    return EncodingSpec()


def config_from_data(data) -> ExperimentConfig:
    """Validate a decoded mapping; raises :class:`ConfigError` listing every problem."""
    errors = []
    if not isinstance(data, dict):
        raise ConfigError([f"config must be a mapping, got {type(data).__name__}"])
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        errors.append(f"unknown keys: {', '.join(sorted(unknown))}")

    scheme = None
    raw_scheme = data.get("scheme")
    if raw_scheme is None:
        errors.append("missing required key 'scheme'")
    else:
        try:
            scheme = Scheme(raw_scheme)
        except ValueError:
            known = ", ".join(s.value for s in Scheme)
            errors.append(f"unknown scheme {raw_scheme!r}; expected one of {known}")

    default_M = 1 if scheme is None or scheme.single_mode else None
    raw_M = data.get("M", default_M)
    M = None
    if raw_M is None:
        errors.append("missing required key 'M'")
    else:
        M = _number(raw_M, "M", errors, minimum=1, integer=True)
    if scheme is not None and M is not None and scheme.single_mode and M != 1:
        errors.append(f"{scheme.value} is a single-mode scheme but M = {M}")

    raw_r = data.get("r", 1.0)
    r = 1.0
    if isinstance(raw_r, dict):
        missing = {"start", "stop", "steps"} - set(raw_r)
        if missing:
            errors.append(f"sweep for r is missing {', '.join(sorted(missing))}")
        else:
            start = _number(raw_r["start"], "r.start", errors, minimum=0)
            stop = _number(raw_r["stop"], "r.stop", errors, minimum=0)
            steps = _number(raw_r["steps"], "r.steps", errors, minimum=1, integer=True)
            if start is not None and stop is not None and stop < start:
                errors.append(f"sweep stop {stop} is below start {start}")
            if None not in (start, stop, steps):
                r = Sweep(start, stop, steps)
    else:
        value = _number(raw_r, "r", errors, minimum=0)
        r = value if value is not None else 1.0

    def optional(key, **kw):
        if data.get(key) is None:
            return None
        return _number(data[key], key, errors, **kw)

    beta = optional("beta")
    theta = optional("theta") or 0.0
    alpha_seed = optional("alpha_seed")
    eval_point = optional("eval_point")
    qfi_cutoff = optional("qfi_cutoff", minimum=2, integer=True)

    distributor = str(data.get("distributor", "dft")).lower()
    if distributor not in ("dft", "hadamard"):
        errors.append(f"unknown distributor {distributor!r}; expected 'dft' or 'hadamard'")
    elif distributor == "hadamard" and M is not None and M & (M - 1):
        errors.append(f"Hadamard distributor needs M to be a power of two, got M = {M}")

    encoding = _parse_encoding(data.get("encoding"), errors)
    if encoding.values is not None and M is not None and len(encoding.values) != M:
        errors.append(f"encoding has length {len(encoding.values)} but M = {M}")

    if scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        if alpha_seed is None or alpha_seed <= 0:
            errors.append("network-phase-homodyne needs alpha_seed > 0")
    elif alpha_seed is not None and scheme is not None:
        errors.append(f"alpha_seed only applies to network-phase-homodyne, not {scheme.value}")

    raw_backend = data.get("backend", "gaussian")
    cutoff = None
    if isinstance(raw_backend, dict):
        kind = raw_backend.get("kind", "fock")
        if raw_backend.get("cutoff") is not None:
            cutoff = _number(raw_backend["cutoff"], "backend.cutoff", errors, minimum=2, integer=True)
    else:
        kind = raw_backend
    if kind not in ("gaussian", "fock"):
        errors.append(f"unknown backend {kind!r}; expected 'gaussian' or 'fock'")
    elif kind == "fock":
        if cutoff is None:
            errors.append("the fock backend needs a cutoff")
        if M is not None and M > fock.MAX_MODES:
            errors.append(f"the fock backend supports at most {fock.MAX_MODES} modes, got M = {M}")
    if qfi_cutoff is not None and M is not None and M > fock.MAX_MODES:
        errors.append(f"qfi_cutoff needs the fock backend, which supports at most {fock.MAX_MODES} modes")

    raw_out = data.get("output") or {}
    output = OutputSpec()
    if not isinstance(raw_out, dict):
        errors.append(f"output must be a mapping with path/format, got {raw_out!r}")
    else:
        fmt = raw_out.get("format")
        path = raw_out.get("path")
        if fmt is None:
            fmt = "json" if path and str(path).endswith(".json") else "csv"
        if fmt not in FORMATS:
            errors.append(f"unknown output format {fmt!r}; expected csv or json")
        output = OutputSpec(path=None if path is None else str(path), format=fmt)

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        scheme=scheme,
        M=M,
        r=r,
        beta=beta,
        theta=theta,
        distributor=distributor,
        encoding=encoding,
        alpha_seed=alpha_seed,
        backend=kind,
        cutoff=cutoff,
        eval_point=eval_point,
        qfi_cutoff=qfi_cutoff,
        output=output,
    )


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from None
    return config_from_data(data)


def _failed_row(config: ExperimentConfig, r: float, flag: str) -> SensitivityReport:
    nan = float("nan")
    scheme = config.scheme
    beta = scheme.default_beta if config.beta is None else config.beta % (2 * math.pi)
    return SensitivityReport(
        scheme=scheme.value,
        M=config.M,
        r=r,
        beta=beta,
        eval_point=nan if config.eval_point is None else config.eval_point,
        signal=nan,
        signal_std=nan,
        slope=nan,
        delta_measured=nan,
        qfi_closed=nan,
        qfi_numeric=None,
        qcrb=nan,
        saturation_ratio=None,
        flags=(flag,),
    )


def run_point(config: ExperimentConfig, r: float) -> SensitivityReport:
    """One sweep point; backend failures become a flagged row."""
    backend = FockBackend(config.cutoff) if config.backend == "fock" else "gaussian"
    try:
        return saturation_report(
            config.scheme,
            config.M,
            r,
            config.encoding.resolve(config.M),
            beta=config.beta,
            distributor=config.distributor,
            seed=config.alpha_seed,
            theta=config.theta,
            eval_point=config.eval_point,
            backend=backend,
            qfi_cutoff=config.qfi_cutoff,
        )
    except TruncationOverflowError:
        return _failed_row(config, r, "truncation-overflow")
    except DegenerateSlopeError:
        return _failed_row(config, r, "degenerate-slope")
    except NonUnitaryError:
        return _failed_row(config, r, "non-unitary")
    except InvalidArgumentError:
        return _failed_row(config, r, "invalid-argument")
    except ArithmeticError:
        return _failed_row(config, r, "error")


def _run_point_args(args):
    return run_point(*args)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[SensitivityReport]:
    """Saturation reports for every sweep point, sorted by r."""
    rs = sorted(config.r_values())
    if jobs > 1 and len(rs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_point_args, [(config, r) for r in rs]))
    return [run_point(config, r) for r in rs]


def row_has_error(row: SensitivityReport) -> bool:
    return any(flag in ERROR_FLAGS for flag in row.flags)


def _fmt(value) -> str:
    if value is None:
        return ""
    if value is UNBOUNDED:
        return "unbounded"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, "#.9g")
    if isinstance(value, tuple):
        return ";".join(value)
    return str(value)


def _json_value(value):
    if value is UNBOUNDED:
        return "unbounded"
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, tuple):
        return list(value)
    return value


def table_rows(table) -> list[dict]:
    return [{col: getattr(row, col) for col in COLUMNS} for row in table]


def render(table, fmt: str) -> str:
    if not table:
        raise InvalidArgumentError("cannot emit an empty table")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in table_rows(table):
            writer.writerow([_fmt(row[col]) for col in COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        rows = [{k: _json_value(v) for k, v in row.items()} for row in table_rows(table)]
        return json.dumps(rows, indent=2) + "\n"
    raise InvalidArgumentError(f"unknown format {fmt!r}; expected csv or json")


def resolve_output_path(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def emit(table, fmt: str, path: str) -> str:
    """Write ``table`` to ``path``; returns the path actually written."""
    text = render(table, fmt)
    target = resolve_output_path(path)
    try:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise InvalidArgumentError(f"cannot write {target}: {exc}") from exc
    return target
