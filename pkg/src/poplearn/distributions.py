"""Population-level distributions.

The population distribution of individual log-clearances is normal with
unknown mean ``mu_cl`` and variance ``omega2_cl``. The pair
``(mu_cl, omega2_cl)`` carries a normal-inverse-gamma (NIG) prior, which is
conjugate to a normal likelihood with unknown mean and variance. This
module provides the NIG density, sampler, single-observation conjugate
update, analytic moments and a moment-matching fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DegeneracyError
from .pk import LOG_SQRT_2PI

NEG_INF = float("-inf")


@dataclass(frozen=True)
class PopulationParams:
    """Mean and variance of the log-clearance population distribution."""

    mu_cl: float
    omega2_cl: float

    def __post_init__(self):
        if not math.isfinite(self.mu_cl):
            raise ValueError(f"mu_cl must be finite, got {self.mu_cl}")
        if not (math.isfinite(self.omega2_cl) and self.omega2_cl > 0.0):
            raise ValueError(f"omega2_cl must be positive, got {self.omega2_cl}")

    def as_array(self) -> np.ndarray:
        return np.array([self.mu_cl, self.omega2_cl])


@dataclass(frozen=True)
class NIGParams:
    """Normal-inverse-gamma hyperparameters ``(mu0, kappa0, alpha0, beta0)``.

    ``omega2 ~ InvGamma(alpha0, beta0)`` and ``mu | omega2 ~
    N(mu0, omega2 / kappa0)``. The mean of ``omega2`` exists for
    ``alpha0 > 1`` and its variance for ``alpha0 > 2``.
    """

    mu0: float
    kappa0: float
    alpha0: float
    beta0: float

    def __post_init__(self):
        if not math.isfinite(self.mu0):
            raise ValueError(f"mu0 must be finite, got {self.mu0}")
        for name in ("kappa0", "alpha0", "beta0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive, got {value}")

    def mean(self) -> PopulationParams:
        """Mean of the distribution, ``(mu0, beta0 / (alpha0 - 1))``."""
        if self.alpha0 <= 1.0:
            raise ValueError("mean of omega2 requires alpha0 > 1")
        return PopulationParams(self.mu0, self.beta0 / (self.alpha0 - 1.0))

    def marginal_moments(self) -> dict:
        """Analytic first two moments of the two marginals.

        ``var_omega2`` requires ``alpha0 > 2`` and ``var_mu`` requires
        ``alpha0 > 1``.
        """
        a, b, k = self.alpha0, self.beta0, self.kappa0
        out = {"mean_mu": self.mu0, "mean_omega2": b / (a - 1.0) if a > 1.0 else math.inf}
        out["var_mu"] = b / (k * (a - 1.0)) if a > 1.0 else math.inf
        out["var_omega2"] = (
            b * b / ((a - 1.0) ** 2 * (a - 2.0)) if a > 2.0 else math.inf
        )
        return out


#: Default prior used throughout: centred on a median clearance of 5 L/h
#: with a moderately tight inverse-gamma on the population variance.
DEFAULT_PRIOR = NIGParams(mu0=math.log(5.0), kappa0=1.0, alpha0=10.0, beta0=2.7)


def normal_logpdf(x, mean, sd):
    """Normal log-density; accepts scalars or arrays (broadcasting)."""
    z = (np.asarray(x, dtype=float) - mean) / sd
    out = -LOG_SQRT_2PI - np.log(sd) - 0.5 * z * z
    if np.ndim(out) == 0:
        return float(out)
    return out


def invgamma_logpdf(x, alpha, beta):
    """Inverse-gamma log-density; -inf outside the positive support."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, NEG_INF)
    pos = x > 0.0
    xp = x[pos] if x.ndim else (x if x > 0 else None)
    if x.ndim == 0:
        if x <= 0.0:
            return NEG_INF
        return float(
            alpha * math.log(beta)
            - math.lgamma(alpha)
            - (alpha + 1.0) * math.log(x)
            - beta / x
        )
    out[pos] = (
        alpha * math.log(beta)
        - math.lgamma(alpha)
        - (alpha + 1.0) * np.log(xp)
        - beta / xp
    )
    return out


def nig_log_pdf(h: NIGParams, zeta) -> float:
    """Joint NIG log-density at ``zeta = (mu_cl, omega2_cl)``.

    Returns ``-inf`` for ``omega2_cl <= 0`` (zero density outside the
    support), which lets Metropolis steps auto-reject invalid proposals.
    """
    if isinstance(zeta, PopulationParams):
        mu, omega2 = zeta.mu_cl, zeta.omega2_cl
    else:
        mu, omega2 = float(zeta[0]), float(zeta[1])
    if not (math.isfinite(omega2) and omega2 > 0.0):
        return NEG_INF
    sd = math.sqrt(omega2 / h.kappa0)
    return float(normal_logpdf(mu, h.mu0, sd)) + invgamma_logpdf(
        omega2, h.alpha0, h.beta0
    )


def nig_sample(h: NIGParams, rng: np.random.Generator, size: int | None = None):
    """Draw from the NIG distribution.

    ``omega2`` is drawn first (inverse gamma), then ``mu`` given ``omega2``.
    With ``size=None`` a single ``PopulationParams`` is returned, otherwise
    a pair of arrays ``(mu, omega2)`` of the requested length.
    """
    n = 1 if size is None else int(size)
    omega2 = h.beta0 / rng.gamma(h.alpha0, 1.0, size=n)
    mu = h.mu0 + np.sqrt(omega2 / h.kappa0) * rng.standard_normal(n)
    if size is None:
        return PopulationParams(float(mu[0]), float(omega2[0]))
    return mu, omega2


def nig_conjugate_update(h: NIGParams, theta: float) -> NIGParams:
    """Posterior hyperparameters after observing one draw ``theta``.

    Standard single-observation update for a normal likelihood with
    unknown mean and variance:

        kappa' = kappa0 + 1
        mu'    = (kappa0 * mu0 + theta) / kappa'
        alpha' = alpha0 + 1/2
        beta'  = beta0 + kappa0 * (theta - mu0)**2 / (2 * kappa')
    """
    kappa1 = h.kappa0 + 1.0
    mu1 = (h.kappa0 * h.mu0 + theta) / kappa1
    alpha1 = h.alpha0 + 0.5
    beta1 = h.beta0 + h.kappa0 * (theta - h.mu0) ** 2 / (2.0 * kappa1)
    return NIGParams(mu1, kappa1, alpha1, beta1)


def _extract_columns(samples) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(samples, np.ndarray):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("expected an (n, 2) array of (mu_cl, omega2_cl) rows")
        return arr[:, 0], arr[:, 1]
    mus = np.array([s.mu_cl for s in samples], dtype=float)
    omega2s = np.array([s.omega2_cl for s in samples], dtype=float)
    return mus, omega2s


def nig_fit_moments(samples: Sequence[PopulationParams] | np.ndarray) -> NIGParams:
    """Fit NIG hyperparameters by matching marginal means and variances.

    Closed form, solved in order: ``alpha`` from the two ``omega2``
    moments, then ``beta``, then ``kappa`` from the variance of ``mu``,
    then ``mu0`` from the mean of ``mu``:

        alpha = 2 + E[omega2]**2 / Var[omega2]
        beta  = E[omega2] * (alpha - 1)
        kappa = beta / (Var[mu] * (alpha - 1)) = E[omega2] / Var[mu]
        mu0   = E[mu]

    Raises ``DegeneracyError`` for fewer than four samples, a zero-variance
    ``omega2`` sample (``alpha`` diverges) or a moment-matched
    ``alpha <= 2`` (variance undefined, heavy-tailed sample).
    """
    mus, omega2s = _extract_columns(samples)
    n = mus.size
    if n < 4:
        raise DegeneracyError(f"need at least 4 samples to fit moments, got {n}")
    mean_mu = float(mus.mean())
    var_mu = float(mus.var(ddof=1))
    mean_w2 = float(omega2s.mean())
    var_w2 = float(omega2s.var(ddof=1))
    # identical samples can show variance at rounding-noise scale; treat a
    # vanishing coefficient of variation the same as exact zero
    if (
        var_w2 <= (1e-12 * abs(mean_w2)) ** 2
        or not math.isfinite(var_w2)
    ):
        raise DegeneracyError("omega2 samples have zero variance; alpha diverges")
    if var_mu <= 0.0 or not math.isfinite(var_mu):
        raise DegeneracyError("mu samples have zero variance")
    alpha = 2.0 + mean_w2 * mean_w2 / var_w2
    if alpha <= 2.0 or not math.isfinite(alpha):
        raise DegeneracyError(f"moment-matched alpha={alpha} is not above 2")
    beta = mean_w2 * (alpha - 1.0)
    kappa = beta / (var_mu * (alpha - 1.0))
    return NIGParams(mean_mu, kappa, alpha, beta)
