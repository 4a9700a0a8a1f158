import math

import numpy as np
import pytest
from scipy import integrate

from poplearn import (
    DEFAULT_PRIOR,
    DegeneracyError,
    GaussianLikelihood,
    InferenceResult,
    MetropolisWithinGibbs,
    NestedParticleFilter,
    PkConstants,
    PkLikelihood,
    PseudoMarginalMetropolisHastings,
    ScenarioConfig,
    SingleInnerNestedParticleFilter,
    WeightedEnsemble,
    generate_population,
    marginal_log_likelihood_mc,
    nig_conjugate_update,
    nig_sample,
    normal_logpdf,
    run_inference,
)
from poplearn.distributions import PopulationParams
from poplearn.estimators import theta_step_log_accept
from poplearn.metrics import batch_means_mcse, chain_ess
from poplearn.validation import substream

from conftest import nig_posterior_direct, nig_mu_mean_sd


def gaussian_dataset(rng, n, noise_sd=0.1, mu=math.log(5.0), omega2=0.27):
    thetas = mu + math.sqrt(omega2) * rng.standard_normal(n)
    return list(thetas + noise_sd * rng.standard_normal(n))


class TestMarginalLogLikelihoodMc:
    def test_matching_source_reduces_to_plain_average(self, rng):
        lik = GaussianLikelihood(0.3)
        zeta = PopulationParams(1.0, 0.4)
        thetas = zeta.mu_cl + math.sqrt(zeta.omega2_cl) * rng.standard_normal(40)
        est = marginal_log_likelihood_mc(lik, 0.8, thetas, zeta, zeta)
        ev = lik.bind(0.8)
        ll = np.array([ev(t) for t in thetas])
        m = ll.max()
        plain = m + math.log(np.exp(ll - m).sum()) - math.log(40)
        assert est == plain  # the importance correction is identically zero

    @pytest.mark.parametrize("shifted", [False, True])
    def test_unbiased_against_gaussian_convolution(self, rng, shifted):
        noise_sd = 0.4
        lik = GaussianLikelihood(noise_sd)
        src = PopulationParams(0.9, 0.5)
        zeta = PopulationParams(1.2, 0.3) if shifted else src
        y = 1.4
        m_draws = 8
        reps = 10_000
        values = np.empty(reps)
        for i in range(reps):
            thetas = src.mu_cl + math.sqrt(src.omega2_cl) * rng.standard_normal(m_draws)
            values[i] = math.exp(
                marginal_log_likelihood_mc(lik, y, thetas, zeta, src)
            )
        oracle = math.exp(
            float(
                normal_logpdf(
                    y, zeta.mu_cl, math.sqrt(zeta.omega2_cl + noise_sd**2)
                )
            )
        )
        se = values.std(ddof=1) / math.sqrt(reps)
        assert abs(values.mean() - oracle) < 3.0 * se

    def test_large_sample_matches_quadrature(self, rng):
        constants = PkConstants()
        lik = PkLikelihood(constants)
        scenario = ScenarioConfig(name="t", n_individuals=1, schedule=(0.0, 1.0), seed=11)
        _, obs = generate_population(scenario)
        zeta = PopulationParams(math.log(2.0), 0.15)
        sd = math.sqrt(zeta.omega2_cl)
        ev = lik.bind(obs[0])

        def integrand(theta):
            return math.exp(ev(theta) + float(normal_logpdf(theta, zeta.mu_cl, sd)))

        oracle, _ = integrate.quad(
            integrand, zeta.mu_cl - 10 * sd, zeta.mu_cl + 10 * sd, limit=200
        )
        thetas = zeta.mu_cl + sd * rng.standard_normal(20_000)
        est = marginal_log_likelihood_mc(lik, obs[0], thetas, zeta, zeta)
        assert math.exp(est) == pytest.approx(oracle, rel=0.03)


class TestPseudoMarginalMH:
    def test_vanishing_proposal_always_accepts(self, rng):
        data = gaussian_dataset(rng, 6)
        est = PseudoMarginalMetropolisHastings(
            likelihood=GaussianLikelihood(0.1),
            chain_length=400,
            mc_samples=10,
            proposal_sd=(1e-13, 1e-13),
            random_state=3,
        ).fit(data)
        assert est.acceptance_rate_ == 1.0

    def test_conjugate_posterior_of_mu(self, rng):
        # proposal scaled to the conjugate problem's posterior width; the
        # default is sized for the pharmacokinetic scenarios
        noise_sd = 0.2
        data = gaussian_dataset(rng, 12, noise_sd=noise_sd)
        est = PseudoMarginalMetropolisHastings(
            likelihood=GaussianLikelihood(noise_sd),
            chain_length=4000,
            mc_samples=25,
            proposal_sd=(0.05, 0.05),
            random_state=7,
        ).fit(data)
        oracle_mu, oracle_sd = nig_mu_mean_sd(nig_posterior_direct(DEFAULT_PRIOR, data))
        mu_chain = est.samples_[:, 0]
        mcse = batch_means_mcse(mu_chain, 20)
        assert abs(mu_chain.mean() - oracle_mu) < 3.0 * mcse
        ess = chain_ess(mu_chain, 20)
        mcse_sd = mu_chain.std(ddof=1) / math.sqrt(2.0 * ess)
        assert abs(mu_chain.std(ddof=1) - oracle_sd) < 3.0 * mcse_sd

    def test_relabeling_individuals_leaves_chain_identical(self, rng):
        data = gaussian_dataset(rng, 9)
        a = PseudoMarginalMetropolisHastings(
            likelihood=GaussianLikelihood(0.1), chain_length=300, random_state=11
        ).fit(data)
        b = PseudoMarginalMetropolisHastings(
            likelihood=GaussianLikelihood(0.1), chain_length=300, random_state=11
        ).fit(list(reversed(data)))
        assert np.array_equal(a.samples_, b.samples_)

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError):
            PseudoMarginalMetropolisHastings().fit([])

    def test_all_underflow_raises_degeneracy(self):
        est = PseudoMarginalMetropolisHastings(
            likelihood=GaussianLikelihood(1e-6),
            chain_length=50,
            random_state=0,
        )
        with pytest.raises(DegeneracyError):
            est.fit([1e200])

    def test_truth_in_hdr_on_sparse_scenario(self):
        from poplearn import scenario_by_name
        from poplearn.metrics import accuracy_metrics

        scenario = scenario_by_name("N20-sparse", base_seed=0)
        _, obs = generate_population(scenario)
        est = PseudoMarginalMetropolisHastings(
            likelihood=PkLikelihood(scenario.pk), chain_length=3000, random_state=2
        ).fit(obs)
        row = accuracy_metrics(est.result_, scenario.zeta_true)
        assert row["covers_truth"]


class TestNestedParticleFilter:
    def test_single_outer_particle_keeps_weight_one(self):
        scenario = ScenarioConfig(name="t", n_individuals=1, schedule=(0.0, 1.0), seed=5)
        _, obs = generate_population(scenario)
        est = NestedParticleFilter(
            n_outer=1, n_inner=32, likelihood=PkLikelihood(scenario.pk), random_state=8
        ).fit(obs)
        assert est.ensemble_.weights.tolist() == [1.0]
        assert est.resample_count_ == 0

    def test_flat_likelihood_leaves_weights_uniform(self):
        pk = PkConstants(sigma=1e3)
        scenario = ScenarioConfig(
            name="t", n_individuals=1, schedule=(0.0, 1.0), pk=pk, seed=5
        )
        _, obs = generate_population(scenario)
        est = NestedParticleFilter(
            n_outer=64, n_inner=64, likelihood=PkLikelihood(pk), random_state=8
        ).fit(obs)
        assert est.resample_count_ == 0
        np.testing.assert_allclose(est.ensemble_.weights, 1.0 / 64, rtol=0.05)

    def test_zero_individuals_returns_prior_representation(self):
        est = NestedParticleFilter(n_outer=128, n_inner=16, random_state=21).fit([])
        seedseq = np.random.SeedSequence(21)
        mus, omega2s = nig_sample(DEFAULT_PRIOR, substream(seedseq, 0, 0), size=128)
        assert np.array_equal(est.ensemble_.particles[:, 0], mus)
        assert np.array_equal(est.ensemble_.particles[:, 1], omega2s)
        assert np.allclose(est.ensemble_.weights, 1.0 / 128)

    def test_degeneracy_reports_individual_index(self):
        est = NestedParticleFilter(
            n_outer=16, n_inner=8, likelihood=GaussianLikelihood(1e-6), random_state=0
        )
        with pytest.raises(DegeneracyError, match="individual 1"):
            est.fit([0.5, 1e200])

    def test_rejuvenation_keeps_variance_positive(self, rng):
        data = gaussian_dataset(rng, 6, noise_sd=0.05, mu=0.2, omega2=0.05)
        est = NestedParticleFilter(
            n_outer=64,
            n_inner=32,
            likelihood=GaussianLikelihood(0.05),
            rejuvenation_sd=(0.3, 0.3),
            random_state=4,
        ).fit(data)
        assert est.resample_count_ > 0
        assert np.all(est.ensemble_.particles[:, 1] > 0.0)

    def test_conjugate_posterior_mean(self, rng):
        noise_sd = 0.1
        data = gaussian_dataset(rng, 12, noise_sd=noise_sd)
        est = NestedParticleFilter(
            n_outer=400,
            n_inner=100,
            likelihood=GaussianLikelihood(noise_sd),
            random_state=13,
        ).fit(data)
        oracle_mu, _ = nig_mu_mean_sd(nig_posterior_direct(DEFAULT_PRIOR, data))
        mean = est.posterior_mean()
        sd = est.posterior_sd()
        from poplearn import effective_sample_size

        ess = effective_sample_size(est.ensemble_.weights)
        assert abs(mean[0] - oracle_mu) < 3.0 * sd[0] / math.sqrt(ess)


class TestSingleInnerNestedParticleFilter:
    def test_bit_exact_match_with_nested_filter_at_one_outer_particle(self):
        scenario = ScenarioConfig(
            name="t", n_individuals=6, schedule=(0.0, 1.0, 5.0), seed=9
        )
        _, obs = generate_population(scenario)
        kwargs = dict(
            n_outer=1, n_inner=64, likelihood=PkLikelihood(scenario.pk), random_state=42
        )
        a = NestedParticleFilter(**kwargs).fit(obs)
        b = SingleInnerNestedParticleFilter(**kwargs).fit(obs)
        assert np.array_equal(a.ensemble_.particles, b.ensemble_.particles)
        assert np.array_equal(a.ensemble_.weights, b.ensemble_.weights)

    def test_identical_outer_particles_make_ratios_cancel(self):
        scenario = ScenarioConfig(name="t", n_individuals=1, schedule=(0.0, 1.0), seed=2)
        _, obs = generate_population(scenario)
        est = SingleInnerNestedParticleFilter(
            n_outer=32, n_inner=64, likelihood=PkLikelihood(scenario.pk), random_state=3
        )
        est._reset()
        est._mus = np.full(32, 0.8)
        est._omega2s = np.full(32, 0.2)
        est.partial_fit(obs)
        w = est.ensemble_.weights
        assert np.all(w == w[0])

    def test_agrees_with_nested_filter_on_conjugate_data(self, rng):
        noise_sd = 0.1
        data = gaussian_dataset(rng, 12, noise_sd=noise_sd)
        kwargs = dict(
            n_outer=400, n_inner=100, likelihood=GaussianLikelihood(noise_sd)
        )
        a = NestedParticleFilter(random_state=1, **kwargs).fit(data)
        b = SingleInnerNestedParticleFilter(random_state=2, **kwargs).fit(data)
        from poplearn import effective_sample_size

        tol = 3.0 * (
            a.posterior_sd()[0] / math.sqrt(effective_sample_size(a.ensemble_.weights))
            + b.posterior_sd()[0] / math.sqrt(effective_sample_size(b.ensemble_.weights))
        )
        assert abs(a.posterior_mean()[0] - b.posterior_mean()[0]) < tol


class TestMetropolisWithinGibbs:
    def test_theta_acceptance_cancels_at_reference(self, rng):
        for _ in range(50):
            mu, sd = rng.normal(), rng.uniform(0.1, 2.0)
            prop, prev = rng.normal(size=2)
            assert theta_step_log_accept(prop, prev, mu, sd, mu, sd) == 0.0

    def test_near_frozen_theta_reproduces_conjugate_draws(self, rng):
        # a razor-thin observation noise pins the theta chain at the atom
        # nearest the observation, so the zeta draws follow the exact
        # single-observation conjugate update at that value
        y = 1.1
        est = MetropolisWithinGibbs(
            likelihood=GaussianLikelihood(1e-9),
            chain_length=6000,
            n_inner=200,
            random_state=17,
        ).fit([y])
        chain = est.last_chain_
        # recover the pinned atom: the chain's conditional law is the update
        # at that atom, whose mu-marginal mean is (kappa0*mu0 + atom)/(kappa0+1)
        ref = DEFAULT_PRIOR.mean()
        seedseq = np.random.SeedSequence(17)
        inner_rng = substream(seedseq, 1, 0)
        thetas = ref.mu_cl + math.sqrt(ref.omega2_cl) * inner_rng.standard_normal(200)
        atom = thetas[np.argmin(np.abs(thetas - y))]
        updated = nig_conjugate_update(DEFAULT_PRIOR, float(atom))
        moments = updated.marginal_moments()
        mu_chain = chain[:, 0]
        w2_chain = chain[:, 1]
        mcse_mu = batch_means_mcse(mu_chain)
        mcse_w2 = batch_means_mcse(w2_chain)
        assert abs(mu_chain.mean() - moments["mean_mu"]) < 3.0 * mcse_mu + 1e-2
        assert abs(w2_chain.mean() - moments["mean_omega2"]) < 3.0 * mcse_w2 + 1e-2

    def test_zero_individuals_keeps_prior(self):
        est = MetropolisWithinGibbs(random_state=1).fit([])
        assert est.nig_ == DEFAULT_PRIOR
        assert est.result_.kind == "parametric"

    def test_conjugate_sequential_accuracy(self, rng):
        noise_sd = 0.2
        data = gaussian_dataset(rng, 12, noise_sd=noise_sd)
        est = MetropolisWithinGibbs(
            likelihood=GaussianLikelihood(noise_sd),
            chain_length=4000,
            n_inner=400,
            random_state=23,
        )
        # refit noise accumulates across the individual updates, so the
        # output's standard error is the accumulated per-update one
        mcse_sq = 0.0
        for obs in data:
            est.partial_fit([obs])
            mcse_sq += batch_means_mcse(est.last_chain_[:, 0], 20) ** 2
        oracle_mu, _ = nig_mu_mean_sd(nig_posterior_direct(DEFAULT_PRIOR, data))
        assert abs(est.posterior_mean()[0] - oracle_mu) < 3.0 * math.sqrt(mcse_sq)

    def test_inner_sequential_mode_runs(self, rng):
        scenario = ScenarioConfig(
            name="t", n_individuals=3, schedule=(0.0, 1.0, 2.0), seed=6
        )
        _, obs = generate_population(scenario)
        est = MetropolisWithinGibbs(
            likelihood=PkLikelihood(scenario.pk),
            chain_length=500,
            n_inner=100,
            inner_sequential=True,
            random_state=5,
        ).fit(obs)
        assert est.nig_.alpha0 > 2.0


class TestSequentialContract:
    @pytest.mark.parametrize(
        "cls,kwargs",
        [
            (NestedParticleFilter, dict(n_outer=40, n_inner=16)),
            (SingleInnerNestedParticleFilter, dict(n_outer=40, n_inner=16)),
            (MetropolisWithinGibbs, dict(chain_length=200, n_inner=32)),
        ],
    )
    def test_split_fit_equals_single_fit(self, rng, cls, kwargs):
        data = gaussian_dataset(rng, 8)
        kwargs = dict(kwargs, likelihood=GaussianLikelihood(0.1), random_state=31)
        whole = cls(**kwargs).fit(data)
        split = cls(**kwargs)
        split.fit(data[:3])
        split.partial_fit(data[3:])
        if cls is MetropolisWithinGibbs:
            assert whole.nig_ == split.nig_
            assert np.array_equal(whole.last_chain_, split.last_chain_)
        else:
            assert np.array_equal(whole.ensemble_.particles, split.ensemble_.particles)
            assert np.array_equal(whole.ensemble_.weights, split.ensemble_.weights)

    def test_processing_order_adds_no_extra_variance(self, rng):
        # posterior means under random processing orders may only vary on
        # the scale of ordinary seed-to-seed Monte Carlo noise
        data = gaussian_dataset(rng, 10)
        kwargs = dict(n_outer=64, n_inner=32, likelihood=GaussianLikelihood(0.1))
        order_means = []
        order_rng = np.random.default_rng(99)
        for _ in range(16):
            perm = order_rng.permutation(len(data))
            est = SingleInnerNestedParticleFilter(random_state=17, **kwargs).fit(
                [data[i] for i in perm]
            )
            order_means.append(est.posterior_mean()[0])
        seed_means = []
        for seed in range(16):
            est = SingleInnerNestedParticleFilter(random_state=seed, **kwargs).fit(data)
            seed_means.append(est.posterior_mean()[0])
        var_orders = np.var(order_means, ddof=1)
        var_seeds = np.var(seed_means, ddof=1)
        # one-sided F bound at the 1% level for (15, 15) degrees of freedom
        assert var_orders < 3.52 * var_seeds

    def test_posterior_contracts_with_more_data(self):
        from poplearn import scenario_by_name

        for seed in range(5):
            sds = {}
            for name in ("N20-sparse", "N100-rich"):
                scenario = scenario_by_name(name, base_seed=seed)
                _, obs = generate_population(scenario)
                est = SingleInnerNestedParticleFilter(
                    n_outer=200,
                    n_inner=200,
                    likelihood=PkLikelihood(scenario.pk),
                    random_state=seed,
                ).fit(obs)
                sds[name] = est.posterior_sd()[0]
            assert sds["N100-rich"] < sds["N20-sparse"]

    def test_run_inference_rejects_unknown_algorithm(self):
        with pytest.raises(ValueError):
            run_inference("nope", [])


class TestInferenceResult:
    def test_payload_must_match_kind(self):
        with pytest.raises(ValueError):
            InferenceResult(kind="mcmc-samples", algorithm="pmmh")
        with pytest.raises(ValueError):
            InferenceResult(
                kind="parametric",
                algorithm="mwg",
                nig=DEFAULT_PRIOR,
                samples=np.zeros((3, 2)),
            )
        with pytest.raises(ValueError):
            InferenceResult(kind="bogus", algorithm="x")

    def test_para_metric_moments(self):
        res = InferenceResult(kind="parametric", algorithm="mwg", nig=DEFAULT_PRIOR)
        mean = res.posterior_mean()
        assert mean[0] == pytest.approx(math.log(5.0))
        assert mean[1] == pytest.approx(0.3)

    def test_weighted_ensemble_moments(self, rng):
        particles = rng.normal(size=(500, 2)) * [0.2, 0.05] + [1.0, 0.3]
        res = InferenceResult(
            kind="weighted-ensemble",
            algorithm="npf",
            ensemble=WeightedEnsemble(particles, np.full(500, 1.0 / 500)),
        )
        assert res.posterior_mean()[0] == pytest.approx(1.0, abs=0.05)
        draws = res.draws(100, rng)
        assert draws.shape == (100, 2)
