"""Command-line front end.

Exit codes:
    0  every row clean
    1  rows carry caveat flags only (e.g. small-r, inhomogeneous)
    2  usage or config error
    3  at least one row failed (truncation-overflow, degenerate-slope, below-qcrb, ...)
"""

from __future__ import annotations

import argparse
import sys

from .config import (
    FORMATS,
    OUTPUT_DIR_ENV,
    ConfigError,
    config_from_data,
    emit,
    parse_config,
    render,
    row_has_error,
    run_experiment,
)
from .errors import InvalidArgumentError
from .interferometer import Scheme

EXIT_OK, EXIT_CAVEAT, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def _encoding_arg(text: str):
    parts = [p for p in text.split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"encoding must be a number or comma-separated numbers, got {text!r}")
    return values[0] if len(values) == 1 and "," not in text else values


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML experiment config")
    p.add_argument("--out", help=f"output file (relative paths resolve under ${OUTPUT_DIR_ENV} if set)")
    p.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    p.add_argument("--backend", choices=("gaussian", "fock"))
    p.add_argument("--cutoff", type=int, help="Fock cutoff per mode")
    p.add_argument("--seed-point", type=float, dest="seed_point", help="evaluation point eta_0")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweep points")


def _add_physics(p: argparse.ArgumentParser, scheme: Scheme | None):
    if scheme is None or not scheme.single_mode:
        p.add_argument("-M", "--modes", type=int, dest="M")
    p.add_argument("-r", type=float, help="squeezing magnitude")
    p.add_argument("--beta", type=float, help="squeezing phase")
    p.add_argument("--theta", type=float, help="displacement direction")
    p.add_argument("--encoding", type=_encoding_arg, help="uniform value or comma-separated node values")
    p.add_argument("--pattern", choices=("uniform", "alternating"), help="named encoding pattern")
    p.add_argument("--amplitude", type=float, help="amplitude for --pattern")
    p.add_argument("--distributor", choices=("dft", "hadamard"))
    p.add_argument("--qfi-cutoff", type=int, dest="qfi_cutoff", help="also compute the Fock QFI at this cutoff")
    if scheme is None or scheme is Scheme.NETWORK_PHASE_HOMODYNE:
        p.add_argument("--alpha-seed", type=float, dest="alpha_seed", help="coherent seed amplitude")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su11net",
        description="Sensitivity of time-reversed squeezed-light networks.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for scheme in Scheme:
        p = sub.add_parser(scheme.value, help=f"one {scheme.value} report")
        _add_common(p)
        _add_physics(p, scheme)
        p.set_defaults(scheme=scheme.value)
    p = sub.add_parser("sweep", help="sweep r as given in --config, or via --start/--stop/--steps")
    _add_common(p)
    _add_physics(p, None)
    p.add_argument("--scheme", choices=[s.value for s in Scheme])
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--steps", type=int)
    p = sub.add_parser("verify", help="run the acceptance checks and print a pass/fail table")
    p.add_argument("--only", type=int, action="append", help="run only this check number (repeatable)")
    return parser


def _load(args):
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError([f"cannot read config {args.config}: {exc}"]) from None
        return parse_config(text).to_data()
    return {}


def config_from_args(args):
    data = _load(args)
    scheme = getattr(args, "scheme", None)
    if args.command != "sweep":
        if "scheme" in data and data["scheme"] != scheme:
            raise ConfigError([f"config scheme {data['scheme']!r} does not match subcommand {scheme!r}"])
        data["scheme"] = scheme
        if Scheme(scheme).single_mode:
            data.setdefault("M", 1)
    elif scheme is not None:
        data["scheme"] = scheme
    for key in ("M", "r", "beta", "theta", "distributor", "qfi_cutoff", "alpha_seed"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if args.encoding is not None:
        data["encoding"] = args.encoding
    if args.pattern is not None:
        data["encoding"] = {"pattern": args.pattern, "amplitude": args.amplitude or 0.0}
    if args.command == "sweep" and None not in (args.start, args.stop, args.steps):
        data["r"] = {"start": args.start, "stop": args.stop, "steps": args.steps}
    if args.seed_point is not None:
        data["eval_point"] = args.seed_point
    if args.backend is not None or args.cutoff is not None:
        current = data.get("backend", "gaussian")
        if not isinstance(current, dict):
            current = {"kind": current}
        # a bare --cutoff implies the fock backend
        kind = args.backend or ("fock" if args.cutoff is not None else current.get("kind"))
        cutoff = args.cutoff if args.cutoff is not None else current.get("cutoff")
        data["backend"] = kind if kind == "gaussian" else {"kind": kind, "cutoff": cutoff}
    output = dict(data.get("output") or {})
    if args.out is not None:
        output["path"] = args.out
    if args.format is not None:
        output["format"] = args.format
    elif args.out is not None and args.out.endswith(".json"):
        output["format"] = "json"
    data["output"] = output
    return config_from_data(data)


def _verify(args) -> int:
    from .verify import run_all

    results = run_all(set(args.only) if args.only else None)
    for result in results:
        print(result.line())
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return EXIT_OK if passed == len(results) else EXIT_RUNTIME


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _verify(args)
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs < 1:
        print("--jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG

    table = run_experiment(config, jobs=args.jobs)
    try:
        if config.output.path:
            target = emit(table, config.output.format, config.output.path)
            print(f"wrote {len(table)} rows to {target}", file=sys.stderr)
        else:
            sys.stdout.write(render(table, config.output.format))
    except InvalidArgumentError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG

    if any(row_has_error(row) for row in table):
        return EXIT_RUNTIME
    if any(row.flags for row in table):
        return EXIT_CAVEAT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
