"""Accuracy summaries of inference results against known truth."""

from __future__ import annotations

import math

import numpy as np

from .density import HdrRegion, hdr_jaccard, kde_hdr
from .distributions import PopulationParams
from .estimators import InferenceResult
from .exceptions import DegeneracyError

#: Draw count when a result kind has no native sample representation.
PARAMETRIC_DRAWS = 4000
#: Fixed stream for those draws, keeping metrics deterministic.
PARAMETRIC_DRAW_SEED = 20_25


def result_samples(result: InferenceResult):
    """Weighted sample view of any result kind."""
    points, weights = result.sample_representation()
    if points is None:
        rng = np.random.default_rng(PARAMETRIC_DRAW_SEED)
        points = result.draws(PARAMETRIC_DRAWS, rng)
        weights = None
    return points, weights


def result_hdr(result: InferenceResult, mass: float = 0.8, **kde_kwargs) -> HdrRegion:
    points, weights = result_samples(result)
    return kde_hdr(points, weights, mass=mass, **kde_kwargs)


def accuracy_metrics(
    result: InferenceResult,
    zeta_true: PopulationParams,
    mass: float = 0.8,
) -> dict:
    """Posterior moments, HDR area and truth membership for one result.

    Degenerate results (for instance a point-mass ensemble) raise
    ``DegeneracyError`` from the density layer.
    """
    mean = result.posterior_mean()
    sd = result.posterior_sd()
    region = result_hdr(result, mass=mass)
    return {
        "mean_mu_cl": float(mean[0]),
        "mean_omega2_cl": float(mean[1]),
        "sd_mu_cl": float(sd[0]),
        "sd_omega2_cl": float(sd[1]),
        "hdr_mass": mass,
        "hdr_area": region.area(),
        "covers_truth": region.contains(zeta_true.as_array()),
    }


def result_hdr_jaccard(
    result_a: InferenceResult,
    result_b: InferenceResult,
    mass: float = 0.8,
) -> float:
    """HDR overlap of two results on a shared evaluation grid."""
    points_a, weights_a = result_samples(result_a)
    points_b, weights_b = result_samples(result_b)
    return hdr_jaccard(points_a, points_b, weights_a, weights_b, mass=mass)


def compare_results(results: dict[str, InferenceResult], mass: float = 0.8) -> dict:
    """Pairwise mean deltas and HDR overlaps between named results."""
    if len(results) < 2:
        raise ValueError("need at least two results to compare")
    names = list(results)
    summary = {
        name: {
            "mean": results[name].posterior_mean().tolist(),
            "sd": results[name].posterior_sd().tolist(),
        }
        for name in names
    }
    pairs = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            mean_a = results[a].posterior_mean()
            mean_b = results[b].posterior_mean()
            pairs[f"{a} vs {b}"] = {
                "delta_mean_mu_cl": float(mean_a[0] - mean_b[0]),
                "delta_mean_omega2_cl": float(mean_a[1] - mean_b[1]),
                "hdr_jaccard": result_hdr_jaccard(results[a], results[b], mass=mass),
            }
    return {"summary": summary, "pairs": pairs, "hdr_mass": mass}


def batch_means_mcse(samples: np.ndarray, n_batches: int = 32) -> float:
    """Monte Carlo standard error of a chain mean via batch means."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2 * n_batches:
        n_batches = max(2, n // 2)
    batch = n // n_batches
    means = x[: batch * n_batches].reshape(n_batches, batch).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(n_batches))


def chain_ess(samples: np.ndarray, n_batches: int = 32) -> float:
    """Effective sample size implied by the batch-means error estimate."""
    x = np.asarray(samples, dtype=float)
    mcse = batch_means_mcse(x, n_batches)
    if mcse == 0.0:
        raise DegeneracyError("chain has zero batch-means variance")
    return float(x.var(ddof=1) / mcse**2)
