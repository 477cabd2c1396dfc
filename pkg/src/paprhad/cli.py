"""Command line interface: ``paprhad run | validate | oracle``.

Exit codes: 0 on success, 1 for invalid configuration or arguments (and
failed oracle checks), 2 for errors while running.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .config import ConfigError, ExperimentConfig, dump_config, load_config

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

logger = logging.getLogger("paprhad")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment configuration")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--realizations", type=int, metavar="J", help="Monte Carlo realizations per sweep point")
    common.add_argument("--output", type=Path, help="results file")
    common.add_argument("--format", choices=("csv", "json"), help="results format")
    common.add_argument("--optimize-phases", action="store_true", default=None,
                        help="alternate precoding with phase-shift optimization")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="paprhad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common], help="run the Monte Carlo sweep")
    run.add_argument("--figure", type=Path, help="figure path (default: results path with .png suffix)")
    run.add_argument("--no-figure", action="store_true", help="skip rendering the figure")
    run.add_argument("--curves", type=Path, help="also write a gnuplot data file")

    sub.add_parser("validate", parents=[common], help="check a configuration and print resolved values")

    oracle = sub.add_parser("oracle", parents=[common], help="run the brute-force verification suite")
    oracle.set_defaults(seed=None)
    return parser


def _resolve(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config is not None else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.realizations is not None:
        overrides["realizations"] = args.realizations
    if args.output is not None:
        overrides["output_path"] = str(args.output)
    if args.format is not None:
        overrides["output_format"] = args.format
    if args.optimize_phases:
        overrides["optimize_phases"] = True
    if args.workers is not None:
        overrides["workers"] = args.workers
    return cfg.replace(**overrides) if overrides else cfg


def _header(cfg: ExperimentConfig) -> str:
    return (
        f"K={cfg.K} N={cfg.N} M={cfg.M} wavelength_mm={cfg.wavelength_mm:g} P={cfg.peak_power:g} "
        f"J={cfg.realizations} seed={cfg.seed} optimize_phases={str(cfg.optimize_phases).lower()}"
    )


def _cmd_validate(cfg: ExperimentConfig) -> int:
    print(_header(cfg))
    print(dump_config(cfg), end="")
    return EXIT_OK


def _cmd_run(cfg: ExperimentConfig, args) -> int:
    from .experiment import run_experiment
    from .report import emit_results, write_gnuplot

    print(_header(cfg))
    t0 = time.perf_counter()
    points = run_experiment(cfg)
    out = Path(cfg.output_path)
    emit_results(points, cfg.output_format, out)
    print(f"wrote {len(points)} curve points to {out} ({time.perf_counter() - t0:.1f} s)")
    if args.curves is not None:
        write_gnuplot(points, args.curves)
        print(f"wrote gnuplot curves to {args.curves}")
    if not args.no_figure:
        from .figures import plot_tradeoff

        fig = args.figure if args.figure is not None else out.with_suffix(".png")
        plot_tradeoff(points, fig)
        print(f"wrote figure to {fig}")
    for p in points:
        if p.converged_fraction < 1:
            logger.warning("%s mu=%g: %.1f%% of solves hit max_iter", p.scheme, p.mu,
                           100 * (1 - p.converged_fraction))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    from .oracles import run_oracle_suite

    checks = run_oracle_suite(seed=args.seed or 0)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_INVALID


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"paprhad: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "oracle":
            return _cmd_oracle(args)
        cfg = _resolve(args)
        if args.command == "validate":
            return _cmd_validate(cfg)
        return _cmd_run(cfg, args)
    except ConfigError as exc:
        print(f"paprhad: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"paprhad: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
