"""Command-line entry point (``kleinslab``).

Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .emission import DipoleEmitter, gamma0, gamma_medium
from .harness import format_value, run_converge, run_solve, run_sweep
from .matching import NearSingularError
from .nonlinear import BackgroundField, nonlinear_sources, observability_estimate
from .oracles import DegenerateCaseError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text, n=None):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {len(vals)}")
    return vals


def _vector(text):
    return _floats(text, 3)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: config output.path, else stdout)")
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--tolerance", type=float, default=1e-6,
                        help="threshold for numeric vs closed-form comparisons")
    common.add_argument("--seed", type=int, default=None, help="reserved; currently unused")

    parser = _Parser(prog="kleinslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="solve a single scenario")
    p.add_argument("config")
    p = sub.add_parser("sweep", parents=[common], help="run a 1- or 2-axis parameter sweep")
    p.add_argument("config")
    p = sub.add_parser("converge", parents=[common], help="opaque-limit convergence study")
    p.add_argument("config")
    p.add_argument("--opacities", type=_floats, required=True,
                   help="comma-separated chi0*a values (at least 4)")
    p = sub.add_parser("emission", parents=[common], help="dipole spontaneous-emission rates")
    p.add_argument("--dipole", type=float, required=True, help="dipole moment in C m")
    p.add_argument("--omega0", type=float, required=True, help="transition angular frequency in rad/s")
    p.add_argument("--n", type=float, default=1.0, help="real refractive index of the host")
    p = sub.add_parser("nonlinearity", parents=[common], help="Euler-Heisenberg vacuum source terms")
    p.add_argument("--E", type=_vector, required=True, metavar="EX,EY,EZ", help="field in V/m")
    p.add_argument("--B", type=_vector, required=True, metavar="BX,BY,BZ", help="field in T")
    p.add_argument("--probe-wavelength", type=float, default=1e-6, help="metres")
    return parser


def _kv(pairs) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs)


def _run(args) -> str:
    if args.command in ("solve", "sweep", "converge"):
        cfg = load_config(args.config)
        if args.out is None:
            args.out = cfg.output_path
        if args.command == "solve":
            return run_solve(cfg, tolerance=args.tolerance).to_csv()
        if args.command == "sweep":
            return run_sweep(cfg, workers=args.workers)
        return run_converge(cfg, args.opacities).to_csv()
    if args.command == "emission":
        try:
            e = DipoleEmitter(args.dipole, args.omega0, args.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return _kv([("gamma0", format_value(gamma0(e))),
                    ("gamma_medium", format_value(gamma_medium(e))),
                    ("n_env", format_value(e.n_env))])
    f = BackgroundField(args.E, args.B)
    src = nonlinear_sources(f)
    try:
        ratio = observability_estimate(f, args.probe_wavelength)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return _kv([("zeta", format_value(src.zeta)),
                ("P", ",".join(format_value(v) for v in src.P)),
                ("M", ",".join(format_value(v) for v in src.M)),
                ("observability", format_value(ratio))])


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"kleinslab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = _run(args)
    except OSError as exc:
        print(f"kleinslab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConfigError as exc:
        print(f"kleinslab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NearSingularError, DegenerateCaseError) as exc:
        print(f"kleinslab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"kleinslab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"kleinslab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
