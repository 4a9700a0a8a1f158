"""Input validation helpers used by estimators and numeric routines."""

from __future__ import annotations

import numbers

import numpy as np


def check_rng(random_state) -> np.random.Generator:
    """Build a Generator from an int, SeedSequence or None.

    Generators are rejected on purpose: estimators derive one independent
    stream per individual from the seed, which needs a re-usable entropy
    source rather than a mutable stream.
    """
    if isinstance(random_state, np.random.Generator):
        raise TypeError(
            "pass an int, numpy.random.SeedSequence or None instead of a "
            "Generator; per-individual substreams are derived from the seed"
        )
    return np.random.default_rng(check_seed_sequence(random_state))


def check_seed_sequence(random_state) -> np.random.SeedSequence:
    if isinstance(random_state, np.random.SeedSequence):
        return random_state
    if random_state is None or isinstance(random_state, numbers.Integral):
        return np.random.SeedSequence(random_state)
    raise TypeError(
        f"random_state must be int, SeedSequence or None, got {random_state!r}"
    )


def substream(seed_sequence: np.random.SeedSequence, *key: int) -> np.random.Generator:
    """Named independent stream; same key always yields the same stream."""
    child = np.random.SeedSequence(
        entropy=seed_sequence.entropy, spawn_key=tuple(key)
    )
    return np.random.default_rng(child)


def check_positive(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_fraction(name: str, value, *, inclusive_upper: bool = True) -> float:
    value = float(value)
    upper_ok = value <= 1.0 if inclusive_upper else value < 1.0
    if not (0.0 < value and upper_ok):
        raise ValueError(f"{name} must lie in (0, 1{']' if inclusive_upper else ')'}, got {value}")
    return value


def check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-d array")
    if not np.all(np.isfinite(w)) or np.any(w < 0.0):
        raise ValueError("weights must be finite and non-negative")
    return w
