"""Weighted particle ensembles and the operations shared by all filters.

Particles are rows of a numpy array, either shape ``(n,)`` for scalar
particles (individual log-clearances) or ``(n, d)`` for vector particles
(population parameter pairs). Weights are kept on the linear scale and
sum to one after :func:`normalize`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DegeneracyError
from .validation import check_weights


@dataclass(frozen=True)
class WeightedEnsemble:
    particles: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        particles = np.asarray(self.particles, dtype=float)
        weights = check_weights(self.weights)
        if particles.shape[0] != weights.shape[0] or particles.shape[0] == 0:
            raise ValueError("particles and weights must share a non-zero length")
        object.__setattr__(self, "particles", particles)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.particles.shape[0]


def normalize(ensemble: WeightedEnsemble) -> WeightedEnsemble:
    """Scale weights to sum to one.

    Raises ``DegeneracyError`` if every weight is zero or non-finite, the
    signature of total likelihood underflow.
    """
    w = ensemble.weights
    total = w.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise DegeneracyError("all ensemble weights are zero or non-finite")
    return WeightedEnsemble(ensemble.particles, w / total)


def effective_sample_size(weights) -> float:
    """Kish effective sample size ``1 / sum(w**2)`` of normalized weights.

    Lies in ``[1, n]``; concentration of weight on few particles drives it
    down, which is what triggers resampling.
    """
    w = np.asarray(weights, dtype=float)
    return float(1.0 / (w @ w))


def resample(ensemble: WeightedEnsemble, rng: np.random.Generator) -> WeightedEnsemble:
    """Multinomial resampling: n i.i.d. draws from the weighted atoms.

    Output weights are uniform. Expects normalized input weights.
    """
    n = len(ensemble)
    idx = rng.choice(n, size=n, p=ensemble.weights)
    return WeightedEnsemble(ensemble.particles[idx], np.full(n, 1.0 / n))


def rejuvenate(
    ensemble: WeightedEnsemble,
    sigma_rej,
    rng: np.random.Generator,
    positive_columns: tuple[int, ...] = (),
) -> WeightedEnsemble:
    """Perturb particles with independent zero-mean normal noise.

    ``sigma_rej`` is a scalar or per-coordinate standard deviation; zero
    means identity. Columns listed in ``positive_columns`` must stay
    strictly positive (a variance coordinate), so offending draws are
    redrawn rather than reflected.
    """
    particles = ensemble.particles
    sigma = np.broadcast_to(
        np.asarray(sigma_rej, dtype=float),
        particles.shape[1:] if particles.ndim > 1 else (),
    )
    if np.any(sigma < 0.0):
        raise ValueError("sigma_rej must be non-negative")
    if np.all(sigma == 0.0):
        return ensemble
    new = particles + sigma * rng.standard_normal(particles.shape)
    for col in positive_columns:
        bad = new[:, col] <= 0.0
        while np.any(bad):
            redraw = particles[bad, col] + sigma[col] * rng.standard_normal(
                int(bad.sum())
            )
            new[bad, col] = redraw
            bad = new[:, col] <= 0.0
    return WeightedEnsemble(new, ensemble.weights)


def weighted_median(ensemble: WeightedEnsemble):
    """Componentwise weighted median.

    Per coordinate, the smallest particle value whose cumulative weight
    reaches one half. Always returns an actual particle value, never an
    interpolation, and is invariant under particle permutation.
    """
    particles = ensemble.particles
    weights = ensemble.weights
    if particles.ndim == 1:
        return _median_1d(particles, weights)
    return np.array(
        [_median_1d(particles[:, j], weights) for j in range(particles.shape[1])]
    )


def _median_1d(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    idx = int(np.searchsorted(cum, 0.5))
    idx = min(idx, values.size - 1)
    return float(values[order][idx])


def weighted_mean(ensemble: WeightedEnsemble):
    p, w = ensemble.particles, ensemble.weights
    if p.ndim == 1:
        return float(w @ p)
    return w @ p


def weighted_sd(ensemble: WeightedEnsemble):
    p, w = ensemble.particles, ensemble.weights
    mean = weighted_mean(ensemble)
    if p.ndim == 1:
        return float(np.sqrt(w @ (p - mean) ** 2))
    return np.sqrt(w @ (p - mean) ** 2)
