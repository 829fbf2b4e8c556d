"""Failure extropy of lifetime distributions: analytic measures, estimators and order checks."""

__version__ = "0.1.0"

from .distributions import (
    Distribution,
    Exponential,
    FunctionalDistribution,
    Pareto,
    Power,
    TabulatedDistribution,
    TypeIIIExtreme,
    Uniform,
)
from .empirical import (
    Sample,
    empirical_cdf,
    empirical_dfe,
    empirical_fe,
    empirical_wdfe,
    empirical_wfe,
    fe_estimator_moments,
    load_sample,
    matching_variant,
    mc_consistency_study,
)
from .errors import *  # noqa: F401,F403
from .measures import (
    DfeCurve,
    ExtropyValue,
    bivariate_dfe,
    bivariate_failure_extropy,
    conditional_failure_extropy,
    dfe_bounds,
    dfe_curve,
    dynamic_failure_extropy,
    failure_extropy,
    failure_extropy_bounds,
    is_ddfe,
    is_dwdfe,
    recover_cdf_from_dfe,
    weighted_dfe,
    weighted_failure_extropy,
)
from .orders import check_order, implication_harness, random_family_pairs
from .quadrature import DEFAULT_CONFIG, IntegrationConfig
from .transforms import (
    WEIGHTS,
    BivariateDistribution,
    get_weight,
    length_biased,
    parse_distribution,
    power_transformed,
    transform_affine,
    transform_monotone,
    weighted,
)
