"""Marginal-posterior inference over population parameters.

Four estimators learn the posterior of the population parameters
``zeta = (mu_cl, omega2_cl)`` from per-individual observation sets under
the hierarchy ``theta_i ~ N(mu_cl, omega2_cl)``, ``y_i ~ p(. | theta_i)``:

``PseudoMarginalMetropolisHastings``
    Batch reference chain over ``zeta``. The intractable per-individual
    marginal likelihood is replaced by a Monte Carlo estimate; one theta
    sample per iteration is shared between the proposed and current state
    through an importance-sampling correction, which keeps the acceptance
    ratio numerically stable.

``NestedParticleFilter``
    Sequential filter with an outer weighted ensemble over ``zeta``. Each
    individual update draws a fresh inner theta ensemble per outer
    particle and multiplies the outer weight by the summed inner
    likelihoods, followed by an effective-sample-size triggered resample.

``SingleInnerNestedParticleFilter``
    Same outer structure, but a single inner ensemble drawn at the
    componentwise weighted median of the outer ensemble serves all outer
    particles through per-particle importance ratios. Avoids the
    outer-times-inner likelihood cost of the nested filter.

``MetropolisWithinGibbs``
    Maintains a normal-inverse-gamma approximation of the posterior. Each
    individual update runs a Gibbs chain alternating an exact conjugate
    draw of ``zeta`` given ``theta`` with an independence
    Metropolis-Hastings draw of ``theta`` from a weighted inner ensemble;
    the likelihood cancels from the acceptance ratio, so the chain itself
    never touches the observation model. The updated approximation is
    refitted by moment matching.

All estimators follow the scikit-learn protocol: hyperparameters in
``__init__``, data via ``fit`` (a sequence of per-individual observation
payloads), fitted state in trailing-underscore attributes. The sequential
estimators also support ``partial_fit`` for continual use, and every
stochastic step consumes a named substream derived from ``random_state``
so results are reproducible and independent of evaluation order.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .distributions import (
    DEFAULT_PRIOR,
    NIGParams,
    PopulationParams,
    nig_fit_moments,
    nig_log_pdf,
    nig_sample,
)
from .ensembles import (
    WeightedEnsemble,
    effective_sample_size,
    rejuvenate,
    weighted_mean,
    weighted_median,
    weighted_sd,
)
from .exceptions import DegeneracyError
from .likelihoods import IndividualLikelihood, PkLikelihood
from .pk import LOG_SQRT_2PI
from .validation import check_fraction, check_positive, check_seed_sequence, substream

NEG_INF = float("-inf")

#: Random-walk proposal standard deviations matching a diagonal covariance
#: of 0.2 per coordinate.
DEFAULT_PROPOSAL_SD = (math.sqrt(0.2), math.sqrt(0.2))


# Shifted exponents below this produce subnormal results, which cost two
# orders of magnitude more in libm yet cannot move a log-sum-exp whose
# leading term is one; flushing them to -inf is value-preserving.
_EXP_FLUSH = -708.0


def _flush_tiny(shifted: np.ndarray) -> np.ndarray:
    np.copyto(shifted, NEG_INF, where=shifted < _EXP_FLUSH)
    return shifted


def _lse(values: np.ndarray) -> float:
    """Log-sum-exp of a vector; -inf when every entry underflows."""
    m = values.max()
    if m == NEG_INF or np.isnan(m):
        return NEG_INF
    shifted = _flush_tiny(values - m)
    np.exp(shifted, out=shifted)
    return float(m + np.log(shifted.sum()))


def _lse_rows(matrix: np.ndarray) -> np.ndarray:
    m = matrix.max(axis=1)
    out = np.full(matrix.shape[0], NEG_INF)
    ok = np.isfinite(m)
    if np.any(ok):
        shifted = _flush_tiny(matrix[ok] - m[ok, None])
        np.exp(shifted, out=shifted)
        out[ok] = m[ok] + np.log(shifted.sum(axis=1))
    return out


def _lse_rows_inplace(matrix: np.ndarray) -> np.ndarray:
    """Row log-sum-exp that scratches its input; same values as _lse_rows."""
    m = matrix.max(axis=1)
    if not np.all(np.isfinite(m)):
        return _lse_rows(matrix)
    matrix -= m[:, None]
    _flush_tiny(matrix)
    np.exp(matrix, out=matrix)
    return m + np.log(matrix.sum(axis=1))


def _norm_logpdf_vec(x: np.ndarray, mean: float, sd: float) -> np.ndarray:
    z = (x - mean) / sd
    return -LOG_SQRT_2PI - np.log(sd) - 0.5 * z * z


def theta_step_log_accept(
    prop: float, prev: float, mu: float, sd: float, ref_mu: float, ref_sd: float
) -> float:
    """Log acceptance ratio of the independence Metropolis theta step.

    Target density factor ``N(.; mu, sd**2)`` over proposal density factor
    ``N(.; ref_mu, ref_sd**2)``; the observation likelihood cancels, so it
    never appears. Identically zero when ``(mu, sd) == (ref_mu, ref_sd)``.
    """
    d_prop = (prop - mu) / sd
    d_prev = (prev - mu) / sd
    r_prop = (prop - ref_mu) / ref_sd
    r_prev = (prev - ref_mu) / ref_sd
    # grouped per state so coinciding target and reference cancel exactly
    return 0.5 * ((d_prev * d_prev - r_prev * r_prev) + (r_prop * r_prop - d_prop * d_prop))


def marginal_log_likelihood_mc(
    likelihood: IndividualLikelihood,
    obs,
    thetas: np.ndarray,
    zeta: PopulationParams,
    zeta_src: PopulationParams,
) -> float:
    """Monte Carlo estimate of one individual's log marginal likelihood.

    ``thetas`` must be i.i.d. draws from the population distribution at
    ``zeta_src``. The estimate is

        log (1/M) sum_m p(obs | theta_m) * N(theta_m; zeta) / N(theta_m; zeta_src)

    evaluated by log-sum-exp. With ``zeta == zeta_src`` the ratio is one
    and this is the plain Monte Carlo average. Returns ``-inf`` when every
    summand underflows, which callers treat as a rejected proposal.
    """
    thetas = np.asarray(thetas, dtype=float)
    ev = likelihood.bind(obs)
    ll = np.fromiter((ev(t) for t in thetas), dtype=float, count=thetas.size)
    log_ratio = _norm_logpdf_vec(
        thetas, zeta.mu_cl, math.sqrt(zeta.omega2_cl)
    ) - _norm_logpdf_vec(thetas, zeta_src.mu_cl, math.sqrt(zeta_src.omega2_cl))
    return _lse(ll + log_ratio) - math.log(thetas.size)


@dataclass
class InferenceResult:
    """Common output wrapper for the four inference algorithms.

    Exactly one payload is populated according to ``kind``:
    ``"mcmc-samples"`` carries post burn-in chain samples, a
    ``"weighted-ensemble"`` kind carries a particle ensemble over the
    population parameters, and ``"parametric"`` carries fitted
    normal-inverse-gamma hyperparameters.
    """

    kind: str
    algorithm: str
    samples: np.ndarray | None = None
    ensemble: WeightedEnsemble | None = None
    nig: NIGParams | None = None
    diagnostics: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    seed: int | None = None

    _PAYLOADS = {
        "mcmc-samples": "samples",
        "weighted-ensemble": "ensemble",
        "parametric": "nig",
    }

    def __post_init__(self):
        if self.kind not in self._PAYLOADS:
            raise ValueError(f"unknown result kind {self.kind!r}")
        for kind, attr in self._PAYLOADS.items():
            value = getattr(self, attr)
            if (value is not None) != (kind == self.kind):
                raise ValueError(
                    f"result of kind {self.kind!r} must populate exactly "
                    f"the {self._PAYLOADS[self.kind]!r} payload"
                )
        if self.kind == "mcmc-samples" and len(self.samples) == 0:
            raise ValueError("mcmc result needs a non-empty sample array")

    def posterior_mean(self) -> np.ndarray:
        if self.kind == "mcmc-samples":
            return self.samples.mean(axis=0)
        if self.kind == "weighted-ensemble":
            return weighted_mean(self.ensemble)
        m = self.nig.marginal_moments()
        return np.array([m["mean_mu"], m["mean_omega2"]])

    def posterior_sd(self) -> np.ndarray:
        if self.kind == "mcmc-samples":
            return self.samples.std(axis=0, ddof=1)
        if self.kind == "weighted-ensemble":
            return weighted_sd(self.ensemble)
        m = self.nig.marginal_moments()
        return np.array([math.sqrt(m["var_mu"]), math.sqrt(m["var_omega2"])])

    def draws(self, n: int, rng: np.random.Generator):
        """Equally-weighted posterior draws for density summaries.

        Samples are subsampled with replacement for sample-based kinds and
        drawn exactly for the parametric kind.
        """
        if self.kind == "parametric":
            mu, omega2 = nig_sample(self.nig, rng, size=n)
            return np.column_stack([mu, omega2])
        if self.kind == "mcmc-samples":
            idx = rng.integers(0, self.samples.shape[0], size=n)
            return self.samples[idx]
        idx = rng.choice(len(self.ensemble), size=n, p=self.ensemble.weights)
        return self.ensemble.particles[idx]

    def sample_representation(self):
        """Native weighted-sample view: ``(points, weights-or-None)``."""
        if self.kind == "mcmc-samples":
            return self.samples, None
        if self.kind == "weighted-ensemble":
            return self.ensemble.particles, self.ensemble.weights
        return None, None


class _PosteriorEstimatorBase(BaseEstimator):
    """Shared parameter resolution for the inference estimators."""

    def _resolved_prior(self) -> NIGParams:
        prior = self.prior if self.prior is not None else DEFAULT_PRIOR
        if not isinstance(prior, NIGParams):
            raise TypeError(f"prior must be NIGParams, got {type(prior).__name__}")
        return prior

    def _resolved_likelihood(self) -> IndividualLikelihood:
        lik = self.likelihood if self.likelihood is not None else PkLikelihood()
        if not hasattr(lik, "bind"):
            raise TypeError("likelihood must provide a bind(obs) method")
        return lik

    def _config_dict(self) -> dict:
        prior = self._resolved_prior()
        cfg = {
            k: v
            for k, v in self.get_params().items()
            if k not in ("prior", "likelihood", "random_state")
            and not isinstance(v, (PopulationParams, NIGParams))
        }
        cfg["prior"] = [prior.mu0, prior.kappa0, prior.alpha0, prior.beta0]
        cfg["likelihood"] = type(self._resolved_likelihood()).__name__
        return cfg

    def _seed_value(self):
        if self.random_state is None or isinstance(self.random_state, int):
            return self.random_state
        return None

    def posterior_mean(self) -> np.ndarray:
        return self.result_.posterior_mean()

    def posterior_sd(self) -> np.ndarray:
        return self.result_.posterior_sd()


class PseudoMarginalMetropolisHastings(_PosteriorEstimatorBase):
    """Batch pseudo-marginal Metropolis-Hastings with importance sampling.

    At every iteration a Gaussian random-walk proposal ``zeta*`` is drawn,
    ``mc_samples`` individual parameters are sampled from the population
    distribution at ``zeta*``, and the same draws estimate the marginal
    likelihood at both ``zeta*`` (plain average) and the current state
    (importance-weighted average). Proposals with a non-positive variance
    coordinate have zero prior density and are rejected outright.

    Parameters
    ----------
    prior : NIGParams, optional
        Prior over the population parameters. Defaults to the package
        default prior.
    likelihood : IndividualLikelihood, optional
        Observation model; defaults to the one-compartment model.
    chain_length : int
        Total Markov chain length (including burn-in). At least 10.
    burn_in_fraction : float
        Leading fraction of the chain discarded from ``samples_``.
    mc_samples : int
        Monte Carlo sample size of the marginal-likelihood estimator.
    proposal_sd : tuple of float, optional
        Random-walk standard deviation per coordinate. Defaults to
        ``sqrt(0.2)`` for both coordinates.
    initial_zeta : PopulationParams, optional
        Chain start; defaults to the prior mean.
    random_state : int, SeedSequence or None
        Seed for the chain's random stream.

    Attributes
    ----------
    samples_ : ndarray of shape (n_kept, 2)
        Post burn-in samples of ``(mu_cl, omega2_cl)``.
    acceptance_rate_ : float
        Accepted fraction over the whole chain.
    result_ : InferenceResult
    """

    algorithm_name = "pmmh"

    def __init__(
        self,
        prior=None,
        likelihood=None,
        chain_length=10_000,
        burn_in_fraction=0.1,
        mc_samples=25,
        proposal_sd=None,
        initial_zeta=None,
        random_state=None,
    ):
        self.prior = prior
        self.likelihood = likelihood
        self.chain_length = chain_length
        self.burn_in_fraction = burn_in_fraction
        self.mc_samples = mc_samples
        self.proposal_sd = proposal_sd
        self.initial_zeta = initial_zeta
        self.random_state = random_state

    def fit(self, X, y=None):
        data = list(X)
        if not data:
            raise ValueError("need at least one individual's observations")
        length = int(self.chain_length)
        if length < 10:
            raise ValueError(f"chain_length must be at least 10, got {length}")
        burn_frac = float(self.burn_in_fraction)
        if not 0.0 <= burn_frac < 1.0:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        n_mc = int(self.mc_samples)
        if n_mc < 1:
            raise ValueError("mc_samples must be at least 1")
        sd_mu, sd_w2 = (
            self.proposal_sd if self.proposal_sd is not None else DEFAULT_PROPOSAL_SD
        )
        sd_mu = check_positive("proposal_sd[0]", sd_mu)
        sd_w2 = check_positive("proposal_sd[1]", sd_w2)
        prior = self._resolved_prior()
        likelihood = self._resolved_likelihood()
        start = (
            self.initial_zeta if self.initial_zeta is not None else prior.mean()
        )

        seedseq = check_seed_sequence(self.random_state)
        rng = substream(seedseq, 2, 0)
        evaluators = [likelihood.bind(obs) for obs in data]
        fsum = math.fsum
        t_start = time.perf_counter()

        mu, w2 = start.mu_cl, start.omega2_cl
        log_prior = nig_log_pdf(prior, (mu, w2))
        chain = np.empty((length, 2))
        accepted = 0
        for step in range(length):
            jump = rng.standard_normal(2)
            mu_star = mu + sd_mu * jump[0]
            w2_star = w2 + sd_w2 * jump[1]
            log_prior_star = nig_log_pdf(prior, (mu_star, w2_star))
            if log_prior_star > NEG_INF:
                sd_star = math.sqrt(w2_star)
                thetas = mu_star + sd_star * rng.standard_normal(n_mc)
                log_ratio = _norm_logpdf_vec(
                    thetas, mu, math.sqrt(w2)
                ) - _norm_logpdf_vec(thetas, mu_star, sd_star)
                num_terms = []
                den_terms = []
                for ev in evaluators:
                    ll = np.fromiter((ev(t) for t in thetas), dtype=float, count=n_mc)
                    num_terms.append(_lse(ll))
                    den_terms.append(_lse(ll + log_ratio))
                # the 1/M normalizations cancel between the two products
                log_num = fsum(num_terms) + log_prior_star
                log_den = fsum(den_terms) + log_prior
                if log_num > NEG_INF:
                    if log_den == NEG_INF:
                        accept = True
                    else:
                        accept = math.log(rng.random()) < log_num - log_den
                    if accept:
                        mu, w2, log_prior = mu_star, w2_star, log_prior_star
                        accepted += 1
            chain[step, 0] = mu
            chain[step, 1] = w2

        if accepted == 0:
            raise DegeneracyError(
                "no proposal was accepted over the whole chain; the proposal "
                "scale is mis-matched or the likelihood estimates underflow"
            )
        burn = int(length * burn_frac)
        self.samples_ = chain[burn:]
        self.acceptance_rate_ = accepted / length
        self.n_seen_ = len(data)
        self.result_ = InferenceResult(
            kind="mcmc-samples",
            algorithm=self.algorithm_name,
            samples=self.samples_,
            diagnostics={
                "acceptance_rate": self.acceptance_rate_,
                "n_accepted": accepted,
                "wall_time_s": time.perf_counter() - t_start,
                "n_individuals": len(data),
            },
            config=self._config_dict(),
            seed=self._seed_value(),
        )
        return self


class _SequentialEstimatorBase(_PosteriorEstimatorBase):
    """One-individual-at-a-time folding with named per-individual streams.

    ``fit`` resets to the prior and processes all individuals;
    ``partial_fit`` continues from the current state, so splitting a
    dataset across successive calls reproduces the single-call result
    bit for bit under the same seed. The stream for individual ``i`` is
    keyed by its global position, the initialization stream by key zero.
    """

    def fit(self, X, y=None):
        self._reset()
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        if not hasattr(self, "n_seen_"):
            self._reset()
        likelihood = self._resolved_likelihood()
        for obs in X:
            index = self.n_seen_
            rng = substream(self._seedseq, 1, index)
            t0 = time.perf_counter()
            try:
                self._update(obs, likelihood, rng)
            except DegeneracyError as exc:
                raise DegeneracyError(f"individual {index}: {exc}") from exc
            self.individual_seconds_.append(time.perf_counter() - t0)
            self.n_seen_ += 1
        self._finalize()
        return self

    def _reset(self):
        self._seedseq = check_seed_sequence(self.random_state)
        self.n_seen_ = 0
        self.individual_seconds_ = []
        self._init_state(substream(self._seedseq, 0, 0))

    def _base_diagnostics(self) -> dict:
        return {
            "n_individuals": self.n_seen_,
            "individual_seconds": list(self.individual_seconds_),
            "wall_time_s": float(sum(self.individual_seconds_)),
        }

    def _init_state(self, rng):
        raise NotImplementedError

    def _update(self, obs, likelihood, rng):
        raise NotImplementedError

    def _finalize(self):
        raise NotImplementedError


class NestedParticleFilter(_SequentialEstimatorBase):
    """Sequential nested particle filter over the population parameters.

    Parameters
    ----------
    prior : NIGParams, optional
    likelihood : IndividualLikelihood, optional
    n_outer, n_inner : int
        Outer (population) and inner (individual) ensemble sizes.
    ess_threshold : float
        Fraction of ``n_outer`` below which the effective sample size
        triggers a multinomial resample.
    rejuvenation_sd : float or pair, optional
        Standard deviation of post-resampling jitter per coordinate.
        Disabled when None; variance coordinates stay positive by redraw.
    random_state : int, SeedSequence or None
    """

    algorithm_name = "npf"

    def __init__(
        self,
        prior=None,
        likelihood=None,
        n_outer=1000,
        n_inner=1000,
        ess_threshold=0.5,
        rejuvenation_sd=None,
        random_state=None,
    ):
        self.prior = prior
        self.likelihood = likelihood
        self.n_outer = n_outer
        self.n_inner = n_inner
        self.ess_threshold = ess_threshold
        self.rejuvenation_sd = rejuvenation_sd
        self.random_state = random_state

    # -- state ------------------------------------------------------------

    def _init_state(self, rng):
        n_outer = int(self.n_outer)
        # a single outer particle is allowed: it is the degenerate case in
        # which both nested filters coincide exactly
        if n_outer < 1:
            raise ValueError(f"n_outer must be at least 1, got {n_outer}")
        if int(self.n_inner) < 2:
            raise ValueError(f"n_inner must be at least 2, got {self.n_inner}")
        check_fraction("ess_threshold", self.ess_threshold)
        prior = self._resolved_prior()
        mus, omega2s = nig_sample(prior, rng, size=n_outer)
        self._mus = mus
        self._omega2s = omega2s
        self._weights = np.full(n_outer, 1.0 / n_outer)
        self.resample_count_ = 0

    @property
    def ensemble_(self) -> WeightedEnsemble:
        return WeightedEnsemble(
            np.column_stack([self._mus, self._omega2s]), self._weights
        )

    # -- updates ----------------------------------------------------------

    def _update(self, obs, likelihood, rng):
        ev = likelihood.bind(obs)
        n_inner = int(self.n_inner)
        sds = np.sqrt(self._omega2s)
        log_incr = np.empty(self._mus.size)
        for r in range(self._mus.size):
            thetas = self._mus[r] + sds[r] * rng.standard_normal(n_inner)
            ll = np.fromiter((ev(t) for t in thetas), dtype=float, count=n_inner)
            log_incr[r] = _lse(ll)
        self._reweight_and_maybe_resample(log_incr, rng)

    def _reweight_and_maybe_resample(self, log_incr, rng):
        n_outer = self._weights.size
        with np.errstate(divide="ignore"):
            logw = np.where(
                self._weights > 0.0, np.log(self._weights), NEG_INF
            ) + log_incr
        m = logw.max()
        if m == NEG_INF or np.isnan(m):
            raise DegeneracyError("all outer weights underflowed")
        w = np.exp(logw - m)
        w /= w.sum()
        self._weights = w
        if effective_sample_size(w) < float(self.ess_threshold) * n_outer:
            idx = rng.choice(n_outer, size=n_outer, p=w)
            self._mus = self._mus[idx]
            self._omega2s = self._omega2s[idx]
            self._weights = np.full(n_outer, 1.0 / n_outer)
            self.resample_count_ += 1
            if self.rejuvenation_sd is not None:
                jittered = rejuvenate(
                    self.ensemble_, self.rejuvenation_sd, rng, positive_columns=(1,)
                )
                self._mus = jittered.particles[:, 0]
                self._omega2s = jittered.particles[:, 1]

    def _finalize(self):
        diagnostics = self._base_diagnostics()
        diagnostics["resample_count"] = self.resample_count_
        self.result_ = InferenceResult(
            kind="weighted-ensemble",
            algorithm=self.algorithm_name,
            ensemble=self.ensemble_,
            diagnostics=diagnostics,
            config=self._config_dict(),
            seed=self._seed_value(),
        )


class SingleInnerNestedParticleFilter(NestedParticleFilter):
    """Nested filter variant with one shared inner ensemble per update.

    The inner ensemble is drawn at the componentwise weighted median of
    the outer ensemble; every outer particle reuses it through the
    importance ratio of its own population density against the reference
    density. With a single outer particle this reduces exactly to the
    nested filter, draw for draw.
    """

    algorithm_name = "sinpf"

    #: Outer particles per block of the importance-ratio matrix; sized so
    #: one block of inner-ensemble columns stays cache resident.
    _BLOCK_ELEMENTS = 131_072

    def _update(self, obs, likelihood, rng):
        ev = likelihood.bind(obs)
        n_inner = int(self.n_inner)
        ref = weighted_median(self.ensemble_)
        ref_mu, ref_w2 = float(ref[0]), float(ref[1])
        if ref_w2 <= 0.0:
            raise AssertionError("reference variance must be positive")
        ref_sd = math.sqrt(ref_w2)
        thetas = ref_mu + ref_sd * rng.standard_normal(n_inner)
        ll = np.fromiter((ev(t) for t in thetas), dtype=float, count=n_inner)
        lp_ref = _norm_logpdf_vec(thetas, ref_mu, ref_sd)
        sds = np.sqrt(self._omega2s)
        norm_consts = -LOG_SQRT_2PI - np.log(sds)
        n_outer = self._mus.size
        log_incr = np.empty(n_outer)
        # row blocks keep the per-particle ratio matrix cache resident and
        # reuse one buffer; rows are independent, so blocking and in-place
        # evaluation change nothing numerically
        step = max(1, self._BLOCK_ELEMENTS // n_inner)
        buf = np.empty((min(step, n_outer), n_inner))
        for lo in range(0, n_outer, step):
            hi = min(lo + step, n_outer)
            block = buf[: hi - lo]
            np.subtract(thetas[None, :], self._mus[lo:hi, None], out=block)
            block /= sds[lo:hi, None]
            np.multiply(block, block, out=block)
            block *= 0.5
            np.subtract(norm_consts[lo:hi, None], block, out=block)
            block -= lp_ref[None, :]
            block += ll[None, :]
            log_incr[lo:hi] = _lse_rows_inplace(block)
        self._reweight_and_maybe_resample(log_incr, rng)


class MetropolisWithinGibbs(_SequentialEstimatorBase):
    """Sequential conjugate approximation driven by Metropolis-within-Gibbs.

    Parameters
    ----------
    prior : NIGParams, optional
    likelihood : IndividualLikelihood, optional
    chain_length : int
        Gibbs chain length per individual (including burn-in).
    burn_in_fraction : float
    n_inner : int
        Size of the weighted proposal ensemble drawn at the mean of the
        current approximation.
    rejuvenation_fraction : float
        Proposal jitter standard deviation as a fraction of the proposed
        parameter magnitude.
    rejuvenation_floor : float
        Lower bound on the jitter standard deviation, guarding against
        zero noise when the proposed parameter is near zero.
    inner_sequential : bool
        Process the individual's measurements one at a time inside the
        inner ensemble (weight, resample, jitter) instead of weighting by
        the whole observation set at once.
    inner_ess_threshold : float
        Resampling trigger for the sequential inner mode.
    random_state : int, SeedSequence or None

    Attributes
    ----------
    nig_ : NIGParams
        Current posterior approximation.
    last_chain_ : ndarray
        Post burn-in ``zeta`` samples from the most recent individual.
    acceptance_rates_ : list of float
        Per-individual Metropolis acceptance rates.
    """

    algorithm_name = "mwg"

    def __init__(
        self,
        prior=None,
        likelihood=None,
        chain_length=10_000,
        burn_in_fraction=0.1,
        n_inner=1000,
        rejuvenation_fraction=0.001,
        rejuvenation_floor=1e-8,
        inner_sequential=False,
        inner_ess_threshold=0.5,
        random_state=None,
    ):
        self.prior = prior
        self.likelihood = likelihood
        self.chain_length = chain_length
        self.burn_in_fraction = burn_in_fraction
        self.n_inner = n_inner
        self.rejuvenation_fraction = rejuvenation_fraction
        self.rejuvenation_floor = rejuvenation_floor
        self.inner_sequential = inner_sequential
        self.inner_ess_threshold = inner_ess_threshold
        self.random_state = random_state

    def _init_state(self, rng):
        if int(self.chain_length) < 10:
            raise ValueError("chain_length must be at least 10")
        if not 0.0 <= float(self.burn_in_fraction) < 1.0:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if int(self.n_inner) < 2:
            raise ValueError("n_inner must be at least 2")
        self.nig_ = self._resolved_prior()
        self.acceptance_rates_ = []
        self.last_chain_ = None

    def _inner_ensemble(self, obs, likelihood, rng):
        """Weighted theta ensemble approximating p(theta | zeta_ref, obs)."""
        ref = self.nig_.mean()
        ref_sd = math.sqrt(ref.omega2_cl)
        n_inner = int(self.n_inner)
        thetas = ref.mu_cl + ref_sd * rng.standard_normal(n_inner)
        if self.inner_sequential:
            logw = np.zeros(n_inner)
            rej_frac = float(self.rejuvenation_fraction)
            floor = float(self.rejuvenation_floor)
            for piece in likelihood.split(obs):
                ev = likelihood.bind(piece)
                logw = logw + np.fromiter(
                    (ev(t) for t in thetas), dtype=float, count=n_inner
                )
                m = logw.max()
                if m == NEG_INF or np.isnan(m):
                    raise DegeneracyError("inner weights underflowed")
                w = np.exp(logw - m)
                w /= w.sum()
                if effective_sample_size(w) < float(
                    self.inner_ess_threshold
                ) * n_inner:
                    idx = rng.choice(n_inner, size=n_inner, p=w)
                    thetas = thetas[idx]
                    scale = np.maximum(floor, rej_frac * np.abs(thetas))
                    thetas = thetas + scale * rng.standard_normal(n_inner)
                    logw = np.zeros(n_inner)
            ll_total = logw
        else:
            ev = likelihood.bind(obs)
            ll_total = np.fromiter(
                (ev(t) for t in thetas), dtype=float, count=n_inner
            )
        m = ll_total.max()
        if m == NEG_INF or np.isnan(m):
            raise DegeneracyError("inner weights underflowed")
        w = np.exp(ll_total - m)
        w /= w.sum()
        return thetas, w, ref

    def _update(self, obs, likelihood, rng):
        thetas, w, ref = self._inner_ensemble(obs, likelihood, rng)
        n_inner = thetas.size
        length = int(self.chain_length)
        theta_prev = float(thetas[rng.choice(n_inner, p=w)])

        idxs = rng.choice(n_inner, size=length, p=w)
        eps = rng.standard_normal(length)
        gammas = rng.gamma(self.nig_.alpha0 + 0.5, 1.0, size=length)
        zs = rng.standard_normal(length)
        log_us = np.log(rng.random(length))

        mu0, kappa0, beta0 = self.nig_.mu0, self.nig_.kappa0, self.nig_.beta0
        kappa1 = kappa0 + 1.0
        ref_mu, ref_sd = ref.mu_cl, math.sqrt(ref.omega2_cl)
        rej_frac = float(self.rejuvenation_fraction)
        floor = float(self.rejuvenation_floor)
        theta_atoms = thetas.tolist()
        chain = np.empty((length, 2))
        accepted = 0
        sqrt_, fabs_ = math.sqrt, math.fabs
        for step in range(length):
            # exact conjugate draw of zeta given the current theta
            mu1 = (kappa0 * mu0 + theta_prev) / kappa1
            beta1 = beta0 + kappa0 * (theta_prev - mu0) ** 2 / (2.0 * kappa1)
            w2 = beta1 / gammas[step]
            mu = mu1 + sqrt_(w2 / kappa1) * zs[step]
            chain[step, 0] = mu
            chain[step, 1] = w2
            # independence Metropolis step for theta; the observation model
            # cancels between target and proposal
            atom = theta_atoms[idxs[step]]
            prop = atom + max(floor, rej_frac * fabs_(atom)) * eps[step]
            log_alpha = theta_step_log_accept(
                prop, theta_prev, mu, sqrt_(w2), ref_mu, ref_sd
            )
            if log_us[step] < log_alpha:
                theta_prev = prop
                accepted += 1

        burn = int(length * float(self.burn_in_fraction))
        self.nig_ = nig_fit_moments(chain[burn:])
        self.last_chain_ = chain[burn:]
        self.acceptance_rates_.append(accepted / length)

    def _finalize(self):
        diagnostics = self._base_diagnostics()
        diagnostics["acceptance_rates"] = list(self.acceptance_rates_)
        self.result_ = InferenceResult(
            kind="parametric",
            algorithm=self.algorithm_name,
            nig=self.nig_,
            diagnostics=diagnostics,
            config=self._config_dict(),
            seed=self._seed_value(),
        )


ALGORITHMS = {
    "pmmh": PseudoMarginalMetropolisHastings,
    "npf": NestedParticleFilter,
    "sinpf": SingleInnerNestedParticleFilter,
    "mwg": MetropolisWithinGibbs,
}


def run_inference(algorithm: str, data, **params) -> InferenceResult:
    """Fit one algorithm by name and return its result wrapper."""
    if algorithm not in ALGORITHMS:
        raise ValueError(
            f"unknown algorithm {algorithm!r}; choose from {sorted(ALGORITHMS)}"
        )
    estimator = ALGORITHMS[algorithm](**params)
    estimator.fit(data)
    return estimator.result_
