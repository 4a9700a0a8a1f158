"""Sequential hierarchical-Bayesian learning of population PK priors.

The package infers the posterior of population parameters (mean and
variance of log-clearance) from per-individual drug monitoring data,
with four interchangeable inference engines exposed as scikit-learn
style estimators, plus dataset simulation, accuracy metrics and a
benchmark harness.
"""

from .density import HdrRegion, hdr_jaccard, kde_hdr, weighted_kde_grid
from .distributions import (
    DEFAULT_PRIOR,
    NIGParams,
    PopulationParams,
    nig_conjugate_update,
    nig_fit_moments,
    nig_log_pdf,
    nig_sample,
    normal_logpdf,
)
from .ensembles import (
    WeightedEnsemble,
    effective_sample_size,
    normalize,
    rejuvenate,
    resample,
    weighted_mean,
    weighted_median,
    weighted_sd,
)
from .estimators import (
    ALGORITHMS,
    InferenceResult,
    MetropolisWithinGibbs,
    NestedParticleFilter,
    PseudoMarginalMetropolisHastings,
    SingleInnerNestedParticleFilter,
    marginal_log_likelihood_mc,
    run_inference,
)
from .exceptions import DegeneracyError
from .likelihoods import GaussianLikelihood, IndividualLikelihood, PkLikelihood
from .metrics import accuracy_metrics, compare_results, result_hdr, result_hdr_jaccard
from .pk import IndividualParams, ObservationSet, PkConstants, concentration, log_likelihood
from .scenarios import (
    RICH_SCHEDULE,
    SCENARIO_NAMES,
    SPARSE_SCHEDULE,
    ZETA_TRUE,
    ScenarioConfig,
    four_scenarios,
    generate_population,
    scenario_by_name,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "DEFAULT_PRIOR",
    "DegeneracyError",
    "GaussianLikelihood",
    "HdrRegion",
    "IndividualLikelihood",
    "IndividualParams",
    "InferenceResult",
    "MetropolisWithinGibbs",
    "NIGParams",
    "NestedParticleFilter",
    "ObservationSet",
    "PkConstants",
    "PkLikelihood",
    "PopulationParams",
    "PseudoMarginalMetropolisHastings",
    "RICH_SCHEDULE",
    "SCENARIO_NAMES",
    "SPARSE_SCHEDULE",
    "ScenarioConfig",
    "SingleInnerNestedParticleFilter",
    "WeightedEnsemble",
    "ZETA_TRUE",
    "accuracy_metrics",
    "compare_results",
    "concentration",
    "effective_sample_size",
    "four_scenarios",
    "generate_population",
    "hdr_jaccard",
    "kde_hdr",
    "log_likelihood",
    "marginal_log_likelihood_mc",
    "nig_conjugate_update",
    "nig_fit_moments",
    "nig_log_pdf",
    "nig_sample",
    "normal_logpdf",
    "normalize",
    "rejuvenate",
    "resample",
    "result_hdr",
    "result_hdr_jaccard",
    "run_inference",
    "scenario_by_name",
    "weighted_kde_grid",
    "weighted_mean",
    "weighted_median",
    "weighted_sd",
]
