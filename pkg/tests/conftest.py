"""Shared oracles and helpers.

Oracles here are deliberately independent implementations (textbook
formulas, quadrature) used to check the package code, so they never call
the routine under test.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from poplearn import NIGParams


def nig_posterior_direct(prior: NIGParams, ys) -> NIGParams:
    """Conjugate posterior after directly observing draws of a normal.

    Standard batch update for n observations of a normal with unknown
    mean and variance under a normal-inverse-gamma prior.
    """
    ys = np.asarray(ys, dtype=float)
    n = ys.size
    ybar = float(ys.mean())
    ss = float(((ys - ybar) ** 2).sum())
    kappa_n = prior.kappa0 + n
    mu_n = (prior.kappa0 * prior.mu0 + n * ybar) / kappa_n
    alpha_n = prior.alpha0 + n / 2.0
    beta_n = (
        prior.beta0
        + 0.5 * ss
        + prior.kappa0 * n * (ybar - prior.mu0) ** 2 / (2.0 * kappa_n)
    )
    return NIGParams(mu_n, kappa_n, alpha_n, beta_n)


def nig_mu_mean_sd(h: NIGParams) -> tuple[float, float]:
    """Marginal mean and standard deviation of mu under a NIG law."""
    return h.mu0, math.sqrt(h.beta0 / (h.kappa0 * (h.alpha0 - 1.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
