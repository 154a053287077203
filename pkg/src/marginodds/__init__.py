"""Posterior inference for generalized odds ratios under margin constraints."""

from .diagnostics import (
    ConcentrationTable,
    DensityCurve,
    KsResult,
    cf_grid_compare,
    cf_scheme_difference,
    concentration_study,
    kde,
    ks_false_positives,
    ks_two_sample,
    ks_weighted,
    mc_cf_estimate,
    prior_tau_variance,
    search_noninvariant_table,
    table_for_total,
    weighted_quantile,
)
from .errors import (
    ConfigError,
    DegenerateParameterError,
    DegenerateWeightsWarning,
    DomainError,
    MarginOddsError,
    PartitionError,
    PoleError,
    UnreliableResultError,
)
from .fnch import FnchParams, fnch_log_pmf, fnch_mean, fnch_pmf, fnch_support
from .model import (
    DecomposedLogOdds,
    DirichletPrior,
    Partition,
    Reparam,
    assumption2c_check,
    decompose_log_odds,
    enumerate_tables,
    factorized_multinomial_pmf,
    godds,
    higher_order_odds_ratio,
    local_odds_ratio,
    log_godds,
    margin_free,
    multinomial_pmf,
    odds_ratio_2x2,
    partition_sums,
    reconstruct,
    reparametrize,
    split_log_odds,
)
from .samplers import (
    WeightedSample,
    draw_log_theta,
    posterior_constrained,
    posterior_dependent_example,
    posterior_double_constrained,
    posterior_unconstrained,
    sample_dirichlet,
    sample_log_dirichlet,
    stream_rng,
)
from .special import (
    CFGrid,
    cf_dependent_example,
    cf_grid_dependent,
    cf_grid_logpsi,
    cf_logpsi,
    cf_rho_dirichlet,
    cf_tau,
    cf_zero_set_scan,
    default_t_grid,
    dependent_beta_parameters,
    lgamma_complex,
    lgamma_real,
    log_dirichlet_cf,
)

__version__ = "0.1.0"
