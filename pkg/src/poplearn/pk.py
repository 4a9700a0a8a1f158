"""One-compartment intravenous bolus model with lognormal residual error.

A single dose is given at time zero and eliminated with first-order
kinetics. The only individual parameter is the log-clearance ``theta``;
plasma concentration follows

    C(t, theta) = (dose / volume) * exp(-exp(theta) * t / volume)

and measured concentrations are lognormally distributed around the model
curve with a known log-scale standard deviation ``sigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Per-individual log-clearance, log(L/h). Kept as a plain float.
IndividualParams = float


@dataclass(frozen=True)
class PkConstants:
    """Fixed quantities shared by all individuals.

    Parameters
    ----------
    dose : float
        Intravenous bolus dose in micromol, given at time zero.
    volume : float
        Volume of distribution in litres.
    sigma : float
        Residual standard deviation of log-concentration (dimensionless).
    """

    dose: float = 100.0
    volume: float = 20.0
    sigma: float = 0.1

    def __post_init__(self):
        for name in ("dose", "volume", "sigma"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class ObservationSet:
    """Timestamped concentration measurements for one individual.

    ``times`` are hours since dosing, non-negative and non-decreasing
    (repeated assays at the same time are allowed). ``values`` are measured
    concentrations in micromol per litre and must be strictly positive,
    since lognormal error cannot produce zero or negative readings.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __init__(self, times: Sequence[float], values: Sequence[float]):
        times = tuple(float(t) for t in times)
        values = tuple(float(v) for v in values)
        if len(times) != len(values) or len(times) == 0:
            raise ValueError("times and values must be non-empty and equally long")
        if any(not math.isfinite(t) or t < 0.0 for t in times):
            raise ValueError("times must be finite and non-negative")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("times must be sorted in non-decreasing order")
        if any(not math.isfinite(v) or v <= 0.0 for v in values):
            raise ValueError("concentrations must be finite and strictly positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.times)


def concentration(constants: PkConstants, theta, t):
    """Predicted plasma concentration at time ``t`` for log-clearance ``theta``.

    Either argument may be a numpy array; inputs broadcast. The value at
    ``t = 0`` equals ``dose / volume`` for every ``theta`` and decays
    strictly monotonically afterwards.
    """
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be non-negative")
    out = (constants.dose / constants.volume) * np.exp(
        -np.exp(theta) * t / constants.volume
    )
    if out.ndim == 0:
        return float(out)
    return out


def log_likelihood(constants: PkConstants, theta: float, obs: ObservationSet) -> float:
    """Log-density of one individual's observations given log-clearance.

    Sum over measurements of the lognormal log-pdf with location
    ``log C(t_j, theta)`` and scale ``sigma``. Computed on the log scale
    throughout, so extreme ``theta`` gives very negative but finite values.
    """
    times = np.asarray(obs.times, dtype=float)
    log_values = np.log(np.asarray(obs.values, dtype=float))
    sigma = constants.sigma
    log_c = math.log(constants.dose / constants.volume) - (
        math.exp(theta) / constants.volume
    ) * times
    z = (log_values - log_c) / sigma
    n = len(obs)
    return (
        -float(log_values.sum())
        - n * (LOG_SQRT_2PI + math.log(sigma))
        - 0.5 * float(z @ z)
    )
