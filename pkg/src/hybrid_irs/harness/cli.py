"""``sim`` command-line entry point.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from ..channel import load_scenario, parse_scenario
from ..errors import ConfigError, InvalidArgumentError, NonConvergenceError
from .experiments import ALGORITHMS, DEFAULT_POWERS, DEFAULT_SWEEP, KINDS, ExperimentSpec, run

log = logging.getLogger("hybrid_irs")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3


def _list_of(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.replace(",", " ").split()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None
    return parse


def _flatten(values):
    out = []
    for v in values or ():
        out.extend(v)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sim", description="Hybrid-IRS beamforming experiments.")
    p.add_argument("kind", choices=KINDS, help="experiment to run")
    p.add_argument("--scenario", help="scenario file (key = value lines); default: built-in headline scenario")
    p.add_argument("--out", required=True, help="output directory for CSV (and SVG) files")
    p.add_argument("--sweep", type=_list_of(int), nargs="+", help="IRS sizes M (rate_vs_m, complexity_vs_m)")
    p.add_argument("--powers", type=_list_of(float), nargs="+", help="BS powers in dBm (convergence)")
    p.add_argument("--algos", type=_list_of(str), nargs="+", help=f"subset of {', '.join(ALGORITHMS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-4, help="rate convergence tolerance (bit/s/Hz)")
    p.add_argument("--max-outer", type=int, default=100)
    p.add_argument("--active-fraction", type=float,
                   help="M_a / M for sweeps (default 0.5)")
    p.add_argument("--iterations", type=int,
                   help="complexity_vs_m: use this L = K instead of measured iteration counts")
    p.add_argument("--workers", type=int, default=1, help="worker processes for sweep points")
    p.add_argument("--svg", action="store_true", help="also render SVG plots")
    p.add_argument("--trace", action="store_true", help="write per-solve trace.csv")
    p.add_argument("--backend", choices=("compiled", "python"), help="kernel backend (default: best available)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _scenario(path):
    if path is None:
        text = resources.files("hybrid_irs").joinpath("scenarios/headline.txt").read_text()
        return parse_scenario(text, source="<built-in>")
    return load_scenario(path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _scenario(args.scenario)
        spec = ExperimentSpec(
            kind=args.kind,
            scenario=cfg,
            sweep=_flatten(args.sweep) or DEFAULT_SWEEP,
            powers=_flatten(args.powers) or DEFAULT_POWERS,
            algorithms=_flatten(args.algos) or ALGORITHMS,
            seed=args.seed,
            output_dir=Path(args.out),
            epsilon=args.epsilon,
            max_outer=args.max_outer,
            active_fraction=args.active_fraction,
            fixed_iterations=args.iterations,
            workers=args.workers,
            trace=args.trace,
            svg=args.svg,
            backend=args.backend,
            scenario_path=args.scenario,
        )
        written = run(spec)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"sim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"sim: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"sim: {exc}", file=sys.stderr)
        return EXIT_IO
    for name, path in written.items():
        log.info("wrote %s: %s", name, path)
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
