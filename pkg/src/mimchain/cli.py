"""Command-line front end tying the modules into reproducible experiments.

Exit codes are a stable contract for scripting: 0 on success, 1 on a
usage error (bad flag or option value), 2 on a data error (unreadable or
invalid input files, failed analysis preconditions).
"""

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import analysis, chain, io
from .contour import DEFAULT_WINDOW
from .stimulus import WeightScheme, gen_stimuli
from .response_maps import InverterTransfer

__all__ = ["parse_args", "main"]

_MODE_NAMES = {"simplex": "uniform-simplex", "span": "span-path"}


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; this contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _window_type(text: str):
    m = re.fullmatch(r"([^:]+):([^:]+)", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        lo, hi = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window bounds must be numbers: {text!r}") from None
    if not (0.0 <= lo < hi <= 1.0):
        raise argparse.ArgumentTypeError(f"window must satisfy 0 <= LO < HI <= 1, got {text!r}")
    return (lo, hi)


def _sweep_type(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEP, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sweep bounds must be numbers: {text!r}") from None
    if step <= 0 or stop <= start:
        raise argparse.ArgumentTypeError("sweep needs STOP > START and STEP > 0")
    return np.arange(start, stop + 0.5 * step, step)


def _span_type(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"span bounds must be numbers: {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError("span needs LO < HI")
    return (lo, hi)


def _int_at_least(minimum: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"value must be >= {minimum}, got {v}")
        return v

    return parse

_seed_type = _int_at_least(0)


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"value must be > 0, got {v}")
    return v


def build_parser() -> _Parser:
    parser = _Parser(prog="mimchain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-stimuli", help="generate an iteration-0 stimulus block")
    p.add_argument("--basis", required=True, help="basis contour CSV (3 utterances)")
    p.add_argument("--n", type=_int_at_least(1), default=100, help="number of stimuli")
    p.add_argument("--seed", type=_seed_type, required=True, help="weight-stream seed")
    p.add_argument("--mode", choices=sorted(_MODE_NAMES), default="simplex")
    p.add_argument("--out", required=True, help="output contour CSV")
    p.set_defaults(func=_cmd_gen_stimuli)

    p = sub.add_parser("simulate", help="run a mimicry chain")
    p.add_argument("--stimuli", required=True, help="iteration-0 contour CSV")
    p.add_argument("--map", required=True, dest="map_path", help="response map JSON")
    p.add_argument("--noise", required=True, help="production noise JSON")
    p.add_argument("--iters", type=_int_at_least(1), default=4)
    p.add_argument("--seed", type=_seed_type, required=True, help="master seed")
    p.add_argument("--window", type=_window_type, default=DEFAULT_WINDOW)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="valley trajectory, transfer map, verdict")
    p.add_argument("--runs", required=True, help="directory of iter_*.csv files")
    p.add_argument("--window", type=_window_type, default=DEFAULT_WINDOW)
    p.add_argument("--bins", type=_int_at_least(4), default=20)
    p.add_argument("--densities-dir", help="also write per-iteration phi,density CSVs")
    p.add_argument("--svg-dir", help="also write minimal SVG plots")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("estimate-map", help="fit the empirical one-iteration transfer map")
    p.add_argument("--runs", required=True)
    p.add_argument("--window", type=_window_type, default=DEFAULT_WINDOW)
    p.add_argument("--bins", type=_int_at_least(4), default=20)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_estimate_map)

    p = sub.add_parser("distinctions", help="count input levels preserved through the chain")
    p.add_argument("--map", required=True, dest="map_path")
    p.add_argument("--noise", required=True)
    p.add_argument("--levels", type=_int_at_least(2), default=16)
    p.add_argument("--iters", type=_int_at_least(1), default=1)
    p.add_argument("--trials", type=_int_at_least(30), default=200)
    p.add_argument("--z", type=_positive_float, default=2.0)
    p.add_argument("--span", type=_span_type, default=(-5.0, 3.0))
    p.add_argument("--window", type=_window_type, default=DEFAULT_WINDOW)
    p.set_defaults(func=_cmd_distinctions)

    p = sub.add_parser("inverter", help="sweep voltages through an inverter string")
    p.add_argument("--sweep", type=_sweep_type, required=True, help="inputs as START:STOP:STEP")
    p.add_argument("--stages", type=_int_at_least(1), default=8)
    p.add_argument("--v-lo", type=float, default=0.2)
    p.add_argument("--v-hi", type=float, default=3.1)
    p.add_argument("--v-mid", type=float, default=1.7)
    p.add_argument("--gain", type=_positive_float, default=4.0)
    p.add_argument("--out", required=True, help="output CSV (v_in,stage,v)")
    p.set_defaults(func=_cmd_inverter)

    return parser


def parse_args(argv=None) -> argparse.Namespace:
    """Parse and validate a command line; exits with status 1 on usage errors."""
    return build_parser().parse_args(argv)


def _cmd_gen_stimuli(args) -> int:
    basis = io.read_basis(args.basis)
    scheme = WeightScheme(mode=_MODE_NAMES[args.mode], seed=args.seed)
    io.write_ensemble(args.out, gen_stimuli(basis, args.n, scheme))
    return 0


def _cmd_simulate(args) -> int:
    stimuli = io.read_ensemble(args.stimuli)
    response_map = io.load_map(args.map_path)
    variation = io.load_variation(args.noise)
    run = chain.run_chain(stimuli, response_map, variation, args.iters, args.seed, args.window)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for ens in run.ensembles:
        io.write_ensemble(out_dir / f"iter_{ens.iteration}.csv", ens)
    return 0


def _load_run(runs_dir) -> chain.ChainRun:
    runs_dir = Path(runs_dir)
    files = {}
    for path in runs_dir.glob("iter_*.csv"):
        m = re.fullmatch(r"iter_(\d+)\.csv", path.name)
        if m:
            files[int(m.group(1))] = path
    if not files:
        raise ValueError(f"{runs_dir}: no iter_*.csv files found")
    ensembles = [io.read_ensemble(files[i]) for i in sorted(files)]
    return chain.ChainRun(ensembles=tuple(ensembles))


def _cmd_analyze(args) -> int:
    run = _load_run(args.runs)
    verdict = analysis.diagnose(run, args.window)
    transfer = analysis.estimate_transfer(run, args.window, args.bins)
    io.write_report(args.out, args.window, verdict, transfer)
    if args.densities_dir or args.svg_dir:
        densities = [
            analysis.density([v for _, v in analysis.window_values(ens, args.window)])
            for ens in run.ensembles
        ]
        if args.densities_dir:
            dens_dir = Path(args.densities_dir)
            dens_dir.mkdir(parents=True, exist_ok=True)
            for ens, dens in zip(run.ensembles, densities):
                io.write_density_csv(dens_dir / f"density_iter_{ens.iteration}.csv", dens)
        if args.svg_dir:
            svg_dir = Path(args.svg_dir)
            svg_dir.mkdir(parents=True, exist_ok=True)
            for ens, dens in zip(run.ensembles, densities):
                io.write_svg_lines(
                    svg_dir / f"density_iter_{ens.iteration}.svg",
                    [(dens.grid, dens.density)],
                    x_label="phi (st)",
                    y_label="density",
                )
            depths = verdict.valley.depths()
            io.write_svg_lines(
                svg_dir / "valley_depth.svg",
                [(np.arange(depths.size), depths)],
                x_label="iteration",
                y_label="valley depth",
            )
    return 0


def _cmd_estimate_map(args) -> int:
    run = _load_run(args.runs)
    transfer = analysis.estimate_transfer(run, args.window, args.bins)
    obj = {
        "a_lo": transfer.fitted.a_lo,
        "a_hi": transfer.fitted.a_hi,
        "lambda": transfer.fitted.lam,
        "rmse": transfer.fitted.rmse,
        "bins": [
            {"x_center": b.x_center, "y_mean": b.y_mean, "y_sd": b.y_sd, "count": b.count}
            for b in transfer.bins
        ],
    }
    Path(args.out).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", "utf-8")
    return 0


def _cmd_distinctions(args) -> int:
    response_map = io.load_map(args.map_path)
    variation = io.load_variation(args.noise)
    count = analysis.count_preserved_distinctions(
        response_map,
        variation,
        k=args.iters,
        n_levels=args.levels,
        span=args.span,
        m=args.trials,
        z=args.z,
        window=args.window,
    )
    print(count)
    return 0


def _cmd_inverter(args) -> int:
    transfer = InverterTransfer(v_lo=args.v_lo, v_hi=args.v_hi, v_mid=args.v_mid, gain=args.gain)
    table = chain.sweep_inverter(args.sweep, args.stages, transfer)
    io.write_sweep_csv(args.out, table)
    return 0


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"mimchain: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
