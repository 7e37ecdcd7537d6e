"""Command-line entry point: ``ddphase {sweep,witness,axy-timings,oracle,validate}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import itertools
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config
from .disambiguation import SweepError, classify_peaks, run_sweep, witness
from .io import ResultIOError, ResultRow, merge_tables, read_results, rows_from_sweep, write_results
from .oracles import (
    ErrorExpansionInput,
    ORACLES,
    TiltExpansionInput,
)
from .sequences import admissible_xi, build_axy8, filter_fourier_coefficients, solve_axy_timings

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _print_peaks(report, out=None):
    out = out or sys.stdout
    if not report.peaks:
        print("no peaks above min_height", file=out)
        return
    print(f"{'alpha':>10} {'height':>9} {'W':>9} {'W/h':>7}  label         k/l", file=out)
    for p in report.peaks:
        k, l = p.harmonic_guess
        print(
            f"{p.alpha_at_peak:10.5f} {p.height:9.4f} {p.w_at_peak:9.4f} {p.ratio:7.3f}  "
            f"{p.classification.value:<12}  {k}/{l}",
            file=out,
        )


def cmd_sweep(args) -> int:
    run = load_config(args.config)
    cfg = run.sweep
    path = args.out or run.output_path
    fmt = args.format or run.output_format
    if path is None:
        raise ConfigError("no output path: pass --out or set output.path")
    pcs = run_sweep(cfg, workers=args.workers)
    rows = rows_from_sweep(pcs, cfg.omega_ref)
    write_results(rows, path, fmt, cfg.phases, run.resolved())
    _print_peaks(classify_peaks(pcs, rel_threshold=args.rel_threshold, min_height=args.min_height))
    return EXIT_OK


def cmd_witness(args) -> int:
    tables = [read_results(p) for p in args.inputs]
    pcs = merge_tables(tables)
    report = witness(pcs)
    if args.out:
        rows = [
            ResultRow(r.alpha, r.omega_dd_hz, tuple(pcs.probabilities[:, k]), float(report.w[k]))
            for k, r in enumerate(tables[0].rows)
        ]
        meta = {"sources": list(args.inputs), "configs": [t.metadata.get("config", {}) for t in tables]}
        write_results(rows, args.out, args.format or "csv", tuple(pcs.phases), meta)
    _print_peaks(classify_peaks(pcs, report, args.rel_threshold, args.min_height))
    return EXIT_OK


def cmd_axy_timings(args) -> int:
    xi = args.xi if args.xi is not None else args.xi_over_pi / np.pi
    lo, hi = admissible_xi(args.harmonic)
    if not lo < xi < hi:
        raise ConfigError(f"xi = {xi:.8g} outside ({lo:.8g}, {hi:.8g}) for harmonic {args.harmonic}")
    t = solve_axy_timings(args.harmonic, xi)
    print(f"harmonic {args.harmonic}, xi = {xi:.12g}")
    for i, x in enumerate(t.x, 1):
        print(f"x{i} = {x:.12f}")
    f = filter_fourier_coefficients(build_axy8(1, 1.0, t, 0.0), args.l_max)
    for l in range(1, args.l_max + 1):
        print(f"f{l} = {f[l]: .12e}")
    return EXIT_OK


def _parse_grid(spec: str):
    name, _, rng = spec.partition("=")
    parts = rng.split(":")
    if not name or len(parts) != 3:
        raise ConfigError(f"bad --grid {spec!r}; expected name=start:stop:count")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError(f"--grid {name}: count must be >= 1")
    return name, np.linspace(start, stop, count)


def _parse_param(spec: str):
    name, _, value = spec.partition("=")
    if not name or not value:
        raise ConfigError(f"bad --param {spec!r}; expected name=value")
    return name, float(value)


_ORACLE_INPUTS = {
    "alpha1": TiltExpansionInput,
    "alpha2": TiltExpansionInput,
    "alpha4": TiltExpansionInput,
    "error_expansion_alpha1": ErrorExpansionInput,
}
_ORACLE_ARGS = {
    "ideal_first_order": ("alpha", "theta", "signal_ratio_abs", "omega_ac"),
    "second_order_single": ("alpha", "phi"),
    "second_order_triple": ("alpha", "phi"),
}


def cmd_oracle(args) -> int:
    fn = ORACLES[args.name]
    fixed = dict(_parse_param(p) for p in args.param)
    grids = [_parse_grid(g) for g in args.grid]
    names = [n for n, _ in grids] + list(fixed)
    if len(set(names)) != len(names):
        raise ConfigError("a parameter is given twice")
    if args.name in _ORACLE_INPUTS:
        allowed = set(_ORACLE_INPUTS[args.name].__dataclass_fields__)
    else:
        allowed = set(_ORACLE_ARGS[args.name])
    unknown = set(names) - allowed
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)} for {args.name}; allowed {sorted(allowed)}")
    out = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        print(",".join([n for n, _ in grids] + ["value"]), file=out)
        for combo in itertools.product(*(v for _, v in grids)):
            kw = {**fixed, **{n: float(v) for (n, _), v in zip(grids, combo)}}
            try:
                if args.name in _ORACLE_INPUTS:
                    value = fn(_ORACLE_INPUTS[args.name](**kw))
                else:
                    value = fn(**kw)
            except TypeError as exc:
                raise ConfigError(f"{args.name}: {exc}") from exc
            print(",".join(format(float(x), ".17g") for x in (*combo, value)), file=out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import FAST_CHECKS, SLOW_CHECKS

    checks = FAST_CHECKS + (SLOW_CHECKS if args.full else ())
    failed = 0
    for check in checks:
        result = check()
        print(result.line())
        failed += not result.passed
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ddphase", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"ddphase {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int, default=0, help="reserved; the engines are deterministic")
        p.add_argument("--rel-threshold", type=float, default=0.3)
        p.add_argument("--min-height", type=float, default=0.02)

    p = sub.add_parser("sweep", help="run a phase-cycled sweep and write spectra plus W")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("witness", help="recompute W and peak labels from stored spectra")
    p.add_argument("inputs", nargs="+", help="result files (CSV or JSON) on one alpha grid")
    common(p)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("axy-timings", help="AXY sub-pulse positions and their filter coefficients")
    p.add_argument("--harmonic", type=int, choices=(1, 3), required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--xi", type=float)
    g.add_argument("--xi-over-pi", type=float, help="xi * pi, e.g. 0.8 for 4/(5 pi)")
    p.add_argument("--l-max", type=int, default=5)
    p.set_defaults(func=cmd_axy_timings)

    p = sub.add_parser("oracle", help="tabulate a closed-form expression over a grid")
    p.add_argument("name", choices=sorted(ORACLES))
    p.add_argument("--grid", action="append", default=[], help="name=start:stop:count")
    p.add_argument("--param", action="append", default=[], help="name=value")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="run the engine-vs-reference checks")
    p.add_argument("--full", action="store_true", help="include the quantum scenarios (slower)")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResultIOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SweepError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
