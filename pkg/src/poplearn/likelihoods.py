"""Per-individual observation models pluggable into the inference engines.

A likelihood object represents the observation model shared by all
individuals. ``bind(obs)`` fixes one individual's data and returns a plain
callable ``theta -> log p(obs | theta)`` that the samplers evaluate once
per particle, mirroring how a structural-model simulation would be driven
in production. ``split(obs)`` breaks an observation payload into
single-measurement payloads for filters that want to process datapoints
sequentially.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .pk import LOG_SQRT_2PI, ObservationSet, PkConstants

LogLikFn = Callable[[float], float]


class IndividualLikelihood:
    """Contract for observation models; see module docstring."""

    def bind(self, obs) -> LogLikFn:
        raise NotImplementedError

    def split(self, obs) -> list:
        raise NotImplementedError


class PkLikelihood(IndividualLikelihood):
    """Lognormal measurement error around the one-compartment curve.

    Observation payloads are :class:`~poplearn.pk.ObservationSet`
    instances. Bound evaluators precompute the observation arrays once and
    evaluate the model curve per call, all on the log scale.
    """

    def __init__(self, constants: PkConstants | None = None):
        self.constants = constants if constants is not None else PkConstants()

    def bind(self, obs: ObservationSet) -> LogLikFn:
        if not isinstance(obs, ObservationSet):
            raise TypeError(f"expected an ObservationSet, got {type(obs).__name__}")
        c = self.constants
        times = np.asarray(obs.times, dtype=float)
        log_values = np.log(np.asarray(obs.values, dtype=float))
        log_dv = math.log(c.dose / c.volume)
        inv_volume = 1.0 / c.volume
        sigma = c.sigma
        const = -float(log_values.sum()) - len(obs) * (
            LOG_SQRT_2PI + math.log(sigma)
        )
        exp = math.exp

        def loglik(theta: float) -> float:
            log_c = log_dv - (exp(theta) * inv_volume) * times
            z = (log_values - log_c) / sigma
            return const - 0.5 * float(z @ z)

        return loglik

    def split(self, obs: ObservationSet) -> list[ObservationSet]:
        return [ObservationSet((t,), (v,)) for t, v in zip(obs.times, obs.values)]


class GaussianLikelihood(IndividualLikelihood):
    """Direct noisy observation of the individual parameter.

    Each measurement is ``y ~ N(theta, noise_sd**2)``. Payloads are a float
    or a sequence of floats. Useful as a reference model: composed with the
    normal population distribution it keeps the whole hierarchy conjugate,
    so posteriors have closed forms to validate the samplers against.
    """

    def __init__(self, noise_sd: float = 0.1):
        if not (math.isfinite(noise_sd) and noise_sd > 0.0):
            raise ValueError(f"noise_sd must be positive, got {noise_sd}")
        self.noise_sd = noise_sd

    def bind(self, obs) -> LogLikFn:
        ys = self._as_tuple(obs)
        s = self.noise_sd
        const = -len(ys) * (LOG_SQRT_2PI + math.log(s))
        half_inv_s2 = 0.5 / (s * s)
        if len(ys) == 1:
            y = ys[0]

            def loglik_single(theta: float) -> float:
                d = y - theta
                return const - half_inv_s2 * d * d

            return loglik_single

        def loglik(theta: float) -> float:
            return const - half_inv_s2 * sum((y - theta) ** 2 for y in ys)

        return loglik

    def split(self, obs) -> list[float]:
        return list(self._as_tuple(obs))

    @staticmethod
    def _as_tuple(obs) -> tuple[float, ...]:
        if isinstance(obs, (int, float)):
            return (float(obs),)
        if isinstance(obs, Sequence) or isinstance(obs, np.ndarray):
            ys = tuple(float(y) for y in obs)
            if not ys:
                raise ValueError("observation payload is empty")
            return ys
        raise TypeError(f"cannot interpret {type(obs).__name__} as observations")
