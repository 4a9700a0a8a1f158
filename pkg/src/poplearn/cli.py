"""Command line interface.

Subcommands
-----------
simulate
    Write one scenario's dataset CSV plus its latent-parameter sidecar.
infer
    Run one algorithm on a scenario (or an existing dataset CSV) and
    store the result as a JSON header with a CSV payload, optionally with
    the posterior HDR contour as JSON.
benchmark
    Run the scenario-by-algorithm grid and write a comparison report.
compare
    Load two or more stored results and report metric deltas and HDR
    overlap.

Exit codes: 0 on success, 1 on usage errors or bad inputs, 2 when an
algorithm degenerates (weight underflow, zero acceptance).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import algorithm_config, benchmark_grid, build_grid
from .distributions import NIGParams
from .estimators import ALGORITHMS, run_inference
from .exceptions import DegeneracyError
from .io import (
    load_result,
    read_dataset,
    save_result,
    write_dataset,
    write_report,
)
from .likelihoods import PkLikelihood
from .metrics import compare_results, result_hdr
from .pk import PkConstants
from .scenarios import SCENARIO_NAMES, generate_population, scenario_by_name

OUTPUT_DIR_ENV = "POPLEARN_OUTPUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._usage_exit(message))

    def _usage_exit(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _output_dir(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "poplearn-out"))


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config file must hold a JSON object")
    return cfg


def _pk_from_config(cfg: dict) -> PkConstants:
    return PkConstants(**cfg.get("pk", {}))


def _prior_from_config(cfg: dict) -> NIGParams | None:
    if "prior" not in cfg:
        return None
    return NIGParams(**cfg["prior"])


def build_parser() -> _Parser:
    parser = _Parser(prog="poplearn", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out",
        default=None,
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or ./poplearn-out)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a scenario dataset CSV")
    sim.add_argument("--scenario", required=True, choices=SCENARIO_NAMES)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--config", default=None, help="JSON config file")

    inf = sub.add_parser("infer", help="run one algorithm on one scenario")
    inf.add_argument("--algorithm", required=True, choices=sorted(ALGORITHMS))
    inf.add_argument("--scenario", choices=SCENARIO_NAMES)
    inf.add_argument("--data", default=None, help="existing dataset CSV instead of --scenario")
    inf.add_argument("--seed", type=int, default=0)
    inf.add_argument("--config", default=None, help="JSON config file")
    inf.add_argument("--reduced", action="store_true", help="scale sizes down 5x")
    inf.add_argument("--hdr", action="store_true", help="also write the 80%% HDR contour")

    ben = sub.add_parser("benchmark", help="run the scenario x algorithm grid")
    ben.add_argument("--grid", choices=["paper"], default="paper")
    ben.add_argument("--reduced", action="store_true")
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--scenarios", nargs="+", choices=SCENARIO_NAMES)
    ben.add_argument("--algorithms", nargs="+", choices=sorted(ALGORITHMS))
    ben.add_argument("--replicates", type=int, default=1)
    ben.add_argument("--workers", type=int, default=1)
    ben.add_argument(
        "--timing-strict",
        action="store_true",
        help="run cells sequentially so timings never share cores",
    )

    cmp_ = sub.add_parser("compare", help="compare stored inference results")
    cmp_.add_argument("results", nargs="+", help="result prefixes or .json paths")
    cmp_.add_argument("--mass", type=float, default=0.8)

    return parser


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    scenario = scenario_by_name(args.scenario, args.seed, pk=_pk_from_config(cfg))
    thetas, observations = generate_population(scenario)
    out = _output_dir(args)
    path = write_dataset(out / f"{scenario.name}-seed{args.seed}.csv", scenario, thetas, observations)
    n_rows = sum(len(o) for o in observations)
    print(f"wrote {n_rows} measurement rows to {path}")
    return 0


def _cmd_infer(args) -> int:
    cfg = _load_config(args.config)
    pk = _pk_from_config(cfg)
    if (args.scenario is None) == (args.data is None):
        raise ValueError("pass exactly one of --scenario or --data")
    if args.scenario is not None:
        scenario = scenario_by_name(args.scenario, args.seed, pk=pk)
        _, observations = generate_population(scenario)
        label = scenario.name
    else:
        observations, dose = read_dataset(args.data)
        pk = PkConstants(dose=dose, volume=pk.volume, sigma=pk.sigma)
        label = Path(args.data).stem
    params = algorithm_config(
        args.algorithm, reduced=args.reduced, overrides=cfg.get(args.algorithm)
    )
    params["likelihood"] = PkLikelihood(pk)
    prior = _prior_from_config(cfg)
    if prior is not None:
        params["prior"] = prior
    result = run_inference(
        args.algorithm, observations, random_state=args.seed, **params
    )
    out = _output_dir(args)
    prefix = out / f"{args.algorithm}-{label}-seed{args.seed}"
    json_path, csv_path = save_result(result, prefix)
    print(f"wrote {json_path} and {csv_path}")
    if args.hdr:
        region = result_hdr(result)
        hdr_path = prefix.with_name(prefix.name + "-hdr80.json")
        hdr_path.write_text(region.to_json())
        print(f"wrote {hdr_path}")
    return 0


def _cmd_benchmark(args) -> int:
    specs = build_grid(
        base_seed=args.seed,
        reduced=args.reduced,
        scenarios=args.scenarios,
        algorithms=args.algorithms,
        replicates=args.replicates,
    )
    rows = benchmark_grid(
        specs,
        base_seed=args.seed,
        workers=args.workers,
        timing_strict=args.timing_strict,
    )
    out = _output_dir(args)
    csv_path, json_path = write_report(rows, out / "benchmark-report")
    failures = [r for r in rows if r["error"]]
    print(f"completed {len(rows) - len(failures)}/{len(rows)} grid cells")
    for row in failures:
        print(f"  failed {row['scenario']}/{row['algorithm']}: {row['error']}")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _cmd_compare(args) -> int:
    results = {}
    for entry in args.results:
        name = Path(entry).stem
        results[name] = load_result(entry)
    report = compare_results(results, mass=args.mass)
    out = _output_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "compare.json"
    path.write_text(json.dumps(report, indent=2))
    print(json.dumps(report, indent=2))
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "infer": _cmd_infer,
    "benchmark": _cmd_benchmark,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return _COMMANDS[args.command](args)
    except DegeneracyError as exc:
        print(f"degeneracy: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
