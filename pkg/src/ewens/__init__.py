"""Inference under partition exchangeability.

Probabilities under the Ewens sampling formula, Poisson-Dirichlet sampling
through the Hoppe urn, maximum-likelihood estimation of the dispersal
parameter with bootstrap confidence intervals, hypothesis tests on the
parameter and on distributional shape, and supervised predictive
classification.
"""

__version__ = "0.1.0"

from .classifier import (
    ClassifierModel,
    FeatureClassModel,
    ModelFormatError,
    PoissonDirichletClassifier,
    SimultaneousLabeling,
    fit_classifier,
    label_marginal,
    label_simultaneous,
    load_model,
    save_model,
)
from .esf import esf_log_probability, esf_probability, log_rising_factorial, resolve_psi
from .estimate import (
    BootstrapCI,
    MleBoundaryError,
    PsiEstimate,
    bootstrap_ci,
    expected_species,
    mle_psi,
    mle_psi_pooled,
)
from .hypotests import (
    TestResult,
    chisq_upper_tail,
    fisher_information,
    lrt_samples,
    score_function,
    score_test,
    watterson_statistic,
    watterson_test,
)
from .partitions import (
    Abundance,
    compute_abundance,
    enumerate_partitions,
    partition_abundance,
)
from .urn import sample_hoppe_urn, sample_partition

__all__ = [
    "__version__",
    "Abundance",
    "compute_abundance",
    "partition_abundance",
    "enumerate_partitions",
    "resolve_psi",
    "log_rising_factorial",
    "esf_log_probability",
    "esf_probability",
    "sample_hoppe_urn",
    "sample_partition",
    "PsiEstimate",
    "BootstrapCI",
    "MleBoundaryError",
    "expected_species",
    "mle_psi",
    "mle_psi_pooled",
    "bootstrap_ci",
    "TestResult",
    "score_function",
    "fisher_information",
    "chisq_upper_tail",
    "score_test",
    "lrt_samples",
    "watterson_statistic",
    "watterson_test",
    "FeatureClassModel",
    "ClassifierModel",
    "SimultaneousLabeling",
    "ModelFormatError",
    "fit_classifier",
    "label_marginal",
    "label_simultaneous",
    "save_model",
    "load_model",
    "PoissonDirichletClassifier",
]
