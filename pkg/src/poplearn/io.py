"""File formats: dataset CSVs, inference results, ensembles, HDR contours.

An inference result is stored as a JSON header next to a CSV payload.
Datasets are one CSV row per measurement plus a latent-parameter sidecar
marked for evaluation only.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .distributions import NIGParams
from .ensembles import WeightedEnsemble
from .estimators import InferenceResult
from .pk import ObservationSet
from .scenarios import ScenarioConfig

DATASET_HEADER = ("individual_id", "time_h", "concentration", "dose")
SIDECAR_COMMENT = "# latent individual parameters; evaluation only, not inference input"


def write_dataset(path, cfg: ScenarioConfig, thetas, observations) -> Path:
    """Write measurement rows and the latent-theta sidecar.

    The sidecar lands next to the dataset with a ``_latent_theta.csv``
    suffix and a comment line flagging it as evaluation-only.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_HEADER)
        for i, obs in enumerate(observations):
            for t, v in zip(obs.times, obs.values):
                writer.writerow([i, repr(t), repr(v), repr(cfg.pk.dose)])
    sidecar = path.with_name(path.stem + "_latent_theta.csv")
    with sidecar.open("w", newline="") as fh:
        fh.write(SIDECAR_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(["individual_id", "theta"])
        for i, theta in enumerate(thetas):
            writer.writerow([i, repr(theta)])
    return path


def read_dataset(path):
    """Load observations grouped by individual; returns ``(observations, dose)``."""
    path = Path(path)
    by_id: dict[int, list[tuple[float, float]]] = {}
    doses = set()
    with path.open(newline="") as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        for row in reader:
            i = int(row["individual_id"])
            by_id.setdefault(i, []).append(
                (float(row["time_h"]), float(row["concentration"]))
            )
            doses.add(float(row["dose"]))
    if not by_id:
        raise ValueError(f"dataset {path} holds no measurements")
    if len(doses) != 1:
        raise ValueError("expected one shared dose across the dataset")
    observations = []
    for i in sorted(by_id):
        pairs = sorted(by_id[i])
        observations.append(
            ObservationSet([t for t, _ in pairs], [v for _, v in pairs])
        )
    return observations, doses.pop()


def _jsonable(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def save_result(result: InferenceResult, prefix) -> tuple[Path, Path]:
    """Write ``<prefix>.json`` (header) and ``<prefix>.csv`` (payload)."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    json_path = prefix.with_suffix(".json")
    csv_path = prefix.with_suffix(".csv")
    if result.kind == "mcmc-samples":
        columns = ["mu_cl", "omega2_cl"]
        rows = result.samples
    elif result.kind == "weighted-ensemble":
        columns = ["mu_cl", "omega2_cl", "weight"]
        rows = np.column_stack(
            [result.ensemble.particles, result.ensemble.weights]
        )
    else:
        columns = ["mu0", "kappa0", "alpha0", "beta0"]
        nig = result.nig
        rows = np.array([[nig.mu0, nig.kappa0, nig.alpha0, nig.beta0]])
    header = {
        "algorithm": result.algorithm,
        "kind": result.kind,
        "seed": result.seed,
        "config": _jsonable(result.config),
        "diagnostics": _jsonable(result.diagnostics),
        "payload": csv_path.name,
        "columns": columns,
    }
    json_path.write_text(json.dumps(header, indent=2))
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    return json_path, csv_path


def load_result(prefix) -> InferenceResult:
    prefix = Path(prefix)
    json_path = prefix if prefix.suffix == ".json" else prefix.with_suffix(".json")
    header = json.loads(json_path.read_text())
    csv_path = json_path.with_name(header["payload"])
    with csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = np.array([[float(v) for v in row] for row in reader])
    kind = header["kind"]
    payload = {}
    if kind == "mcmc-samples":
        payload["samples"] = rows
    elif kind == "weighted-ensemble":
        payload["ensemble"] = WeightedEnsemble(rows[:, :2], rows[:, 2])
    else:
        payload["nig"] = NIGParams(*rows[0])
    return InferenceResult(
        kind=kind,
        algorithm=header["algorithm"],
        diagnostics=header.get("diagnostics", {}),
        config=header.get("config", {}),
        seed=header.get("seed"),
        **payload,
    )


def write_ensemble_csv(path, ensemble: WeightedEnsemble) -> Path:
    """Particle coordinates plus weight, one row per particle."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    particles = ensemble.particles
    if particles.ndim == 1:
        particles = particles[:, None]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        names = ["mu_cl", "omega2_cl"][: particles.shape[1]]
        if particles.shape[1] > 2:
            names = [f"x{j}" for j in range(particles.shape[1])]
        writer.writerow(names + ["weight"])
        for row, w in zip(particles, ensemble.weights):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(w))])
    return path


def write_report(rows: list[dict], prefix) -> tuple[Path, Path]:
    """Write a comparison report as CSV plus JSON."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    json_path = prefix.with_suffix(".json")
    csv_path = prefix.with_suffix(".csv")
    json_path.write_text(json.dumps(_jsonable(rows), indent=2))
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _jsonable(v) for k, v in row.items()})
    return csv_path, json_path
