"""Benchmark orchestration: scenario-by-algorithm grids with timing.

One grid cell simulates a dataset, fits one algorithm and reports
posterior accuracy plus wall-clock time. Cells can run across worker
processes; metric values are pure functions of (dataset seed, algorithm
seed, config) either way. Strict timing mode forces sequential execution
so cells never share cores.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimators import ALGORITHMS, run_inference
from .exceptions import DegeneracyError
from .likelihoods import PkLikelihood
from .metrics import accuracy_metrics
from .scenarios import SCENARIO_NAMES, ScenarioConfig, generate_population, scenario_by_name

#: Full-scale settings for every algorithm.
PAPER_CONFIGS: dict[str, dict] = {
    "pmmh": {"chain_length": 10_000, "mc_samples": 25},
    "npf": {"n_outer": 1000, "n_inner": 1000},
    "sinpf": {"n_outer": 1000, "n_inner": 1000},
    "mwg": {"chain_length": 10_000, "n_inner": 1000},
}

#: Scale divisor applied to sizes by the --reduced flag.
REDUCTION_FACTOR = 5

_SIZE_KEYS = ("chain_length", "mc_samples", "n_outer", "n_inner")
_SIZE_FLOORS = {"chain_length": 10, "mc_samples": 1, "n_outer": 2, "n_inner": 2}


def algorithm_config(algorithm: str, reduced: bool = False, overrides: dict | None = None) -> dict:
    cfg = dict(PAPER_CONFIGS[algorithm])
    if reduced:
        for key in _SIZE_KEYS:
            if key in cfg:
                cfg[key] = max(_SIZE_FLOORS[key], cfg[key] // REDUCTION_FACTOR)
    if overrides:
        cfg.update(overrides)
    return cfg


@dataclass(frozen=True)
class RunSpec:
    scenario: str
    algorithm: str
    config: dict = field(default_factory=dict)
    seed: int = 0
    note: str = ""

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.scenario not in SCENARIO_NAMES:
            raise ValueError(f"unknown scenario {self.scenario!r}")


def _cell_seed(base_seed: int, scenario_idx: int, algo_idx: int, replicate: int) -> int:
    child = np.random.SeedSequence(
        entropy=base_seed, spawn_key=(7, replicate, scenario_idx, algo_idx)
    )
    return int(child.generate_state(1, dtype=np.uint64)[0])


def build_grid(
    base_seed: int = 0,
    reduced: bool = False,
    scenarios: list[str] | None = None,
    algorithms: list[str] | None = None,
    replicates: int = 1,
) -> list[RunSpec]:
    """The scenario-by-algorithm grid of run specifications.

    The full-scale reference chain on the largest rich dataset is always
    run with reduced sizes; at full scale its cost is out of proportion
    to the rest of the grid, so the cell is flagged instead of skipped.
    """
    scenarios = list(scenarios) if scenarios else list(SCENARIO_NAMES)
    algorithms = list(algorithms) if algorithms else list(ALGORITHMS)
    specs = []
    for rep in range(replicates):
        for s_idx, scenario in enumerate(scenarios):
            for a_idx, algorithm in enumerate(algorithms):
                note = ""
                cell_reduced = reduced
                if not reduced and algorithm == "pmmh" and scenario == "N100-rich":
                    cell_reduced = True
                    note = "reduced"
                specs.append(
                    RunSpec(
                        scenario=scenario,
                        algorithm=algorithm,
                        config=algorithm_config(algorithm, reduced=cell_reduced),
                        seed=_cell_seed(base_seed, s_idx, a_idx, rep),
                        note=note,
                    )
                )
    return specs


def run_cell(spec: RunSpec, base_seed: int = 0) -> dict:
    """Execute one grid cell and return its report row.

    Failures are captured in the row's ``error`` column so one degenerate
    cell cannot abort the rest of the grid.
    """
    scenario = scenario_by_name(spec.scenario, base_seed)
    _, observations = generate_population(scenario)
    row = {
        "scenario": spec.scenario,
        "algorithm": spec.algorithm,
        "seed": spec.seed,
        "n_individuals": scenario.n_individuals,
        "n_observations": scenario.n_individuals * len(scenario.schedule),
        "note": spec.note,
        "error": "",
    }
    params = dict(spec.config)
    params["likelihood"] = PkLikelihood(scenario.pk)
    params["random_state"] = spec.seed
    try:
        t0 = time.perf_counter()
        result = run_inference(spec.algorithm, observations, **params)
        wall = time.perf_counter() - t0
        row.update(accuracy_metrics(result, scenario.zeta_true))
        row["wall_time_s"] = wall
        row["seconds_per_individual"] = wall / scenario.n_individuals
    except DegeneracyError as exc:
        row["error"] = str(exc)
    return row


def warm_up() -> None:
    """Tiny fits so first-use costs stay out of the timed cells."""
    scenario = ScenarioConfig(
        name="N20-sparse", n_individuals=2, schedule=(0.0, 1.0), seed=1
    )
    _, observations = generate_population(scenario)
    for algorithm in ALGORITHMS:
        cfg = {
            key: _SIZE_FLOORS.get(key, value)
            for key, value in PAPER_CONFIGS[algorithm].items()
        }
        try:
            run_inference(algorithm, observations, random_state=0, **cfg)
        except DegeneracyError:
            pass


def benchmark_grid(
    specs: list[RunSpec],
    base_seed: int = 0,
    workers: int = 1,
    timing_strict: bool = False,
) -> list[dict]:
    """Run all cells, in parallel unless strict timing is requested."""
    warm_up()
    if timing_strict or workers <= 1:
        return [run_cell(spec, base_seed) for spec in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_cell, spec, base_seed) for spec in specs]
        return [f.result() for f in futures]
