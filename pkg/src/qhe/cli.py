"""Command-line front end.

    qhe <scenario> --config <path> [--out <prefix>] [--fixed-step <dt>] [--seed <n>] [--plot]
    qhe verify [--seed <n>] [--tol <tol>] [--fixed-step <dt>]

Exit codes: 0 success, 1 a verification suite failed, 2 configuration
error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import sys
import time
from pathlib import Path

from . import __version__
from .config import SCENARIOS, load_config, validate
from .errors import ConfigError, QHEError
from .mode_dynamics import TOL_RANGE
from .report import write_columns, write_gnuplot, write_manifest, write_rows
from .scenarios import RUNNERS

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qhe", description="Coupled-oscillator and two-atom quantum heat engine simulations.")
    parser.add_argument("scenario", choices=SCENARIOS)
    parser.add_argument("--config", type=Path, help="JSON scenario configuration")
    parser.add_argument("--out", help="output path prefix (overrides the config)")
    parser.add_argument("--fixed-step", type=float, dest="fixed_step",
                        help="use classical RK4 on this step instead of adaptive DOPRI5")
    parser.add_argument("--seed", type=int, help="seed for randomised suites")
    parser.add_argument("--tol", type=float, help="integrator tolerance for verify")
    parser.add_argument("--plot", action="store_true", help="also render a PNG with matplotlib")
    parser.add_argument("--version", action="version", version=f"qhe {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true")
    return parser


def _resolve_config(args):
    if args.config is None:
        if args.scenario != "verify":
            raise ConfigError("--config is required for this scenario")
        cfg = validate({"scenario": "verify"})
    else:
        cfg = load_config(args.config, args.scenario)
    overrides = {}
    if args.out is not None:
        overrides["output"] = args.out
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        overrides["seed"] = args.seed
    if args.fixed_step is not None:
        if not args.fixed_step > 0:
            raise ConfigError("--fixed-step must be positive")
        overrides["fixed_step"] = args.fixed_step
    if args.tol is not None:
        # verify accepts any positive tolerance so that a corrupted one shows up
        # as failing suites rather than as a config error
        lo, hi = (0.0, float("inf")) if cfg.scenario == "verify" else TOL_RANGE
        if not (args.tol > 0 and lo <= args.tol <= hi):
            raise ConfigError(f"--tol must lie in [{lo:g}, {hi:g}]")
        overrides["tol"] = args.tol
    return dataclasses.replace(cfg, **overrides)


def run_verify(cfg, out):
    from .verification import verify_all

    results = verify_all(cfg.seed, cfg.tol, cfg.fixed_step)
    for r in results:
        out.write(r.line() + "\n")
    passed = all(r.passed for r in results)
    out.write(f"verify seed={cfg.seed}: {'all suites passed' if passed else 'FAILED'}\n")
    return results, passed


def run_scenario(cfg, *, plot=False, out=sys.stdout):
    """Run a validated config and write its artifacts; returns the manifest path."""
    start = time.perf_counter()
    prefix = Path(cfg.output or f"qhe_{cfg.scenario}")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    outputs = []
    if cfg.scenario == "verify":
        results, _ = run_verify(cfg, out)
        checks = {r.name: {"passed": r.passed, "checks": [list(c) for c in r.checks],
                           "error": r.error} for r in results}
        path = write_rows(f"{prefix}_verify.csv", [
            {"suite": r.name, "passed": r.passed, "label": label, "value": value, "limit": lim}
            for r in results for label, value, lim in (r.checks or [("error", float("nan"), 0.0)])
        ])
        outputs.append(path)
    else:
        result = RUNNERS[cfg.scenario](cfg)
        csv_path = write_columns(f"{prefix}_trajectory.csv", result.columns)
        outputs.append(csv_path)
        if result.report_rows:
            outputs.append(write_rows(f"{prefix}_report.csv", result.report_rows))
        outputs.append(write_gnuplot(f"{prefix}.gp", csv_path, list(result.columns), result.x,
                                     result.panels, result.title))
        if plot:
            from .plotting import render

            outputs.append(render(f"{prefix}.png", result.columns, result.x, result.panels,
                                  result.title))
        checks = result.checks
        for name, c in checks.items():
            status = "PASS" if c["passed"] else "FAIL"
            out.write(f"[{status}] {name}: {c['value']!r}\n")
    manifest = write_manifest(f"{prefix}_manifest.json", config=cfg.echo(), version=__version__,
                              wall_time=time.perf_counter() - start, outputs=outputs,
                              checks=checks)
    for p in outputs + [manifest]:
        out.write(f"wrote {p}\n")
    return manifest, all(c["passed"] for c in checks.values())


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = io.StringIO() if args.quiet else sys.stdout
    try:
        cfg = _resolve_config(args)
        _, passed = run_scenario(cfg, plot=args.plot, out=out)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"qhe: config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except QHEError as exc:
        print(f"qhe: numerical error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.scenario == "verify" and not passed:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
