"""Extreme-value statistics of common-neighbor counts in G(n, p) random graphs."""

from .binomial import (
    BinomialParams,
    TailComparison,
    binom_tail,
    chernoff_tail_bound,
    demoivre_pmf_approx,
    log_binom_pmf,
    mills_tail,
    normal_cdf,
    tail_approx,
)
from .extremes import (
    ExceedanceCount,
    TopM,
    brute_force_top_m,
    count_ell_exceedances,
    count_exceedances,
    top_m_common_neighbors,
)
from .graph import Graph, common_neighbor_count, degree, sample_gnp
from .limits import (
    ConditionReport,
    JansonReport,
    NormalizationParams,
    max_degree_normalization,
    check_conditions,
    gamma_ell,
    gumbel_limit_cdf,
    lambda_exact,
    normalization,
    threshold_b,
)
from .montecarlo import (
    ExperimentConfig,
    ExperimentSummary,
    TrialRecord,
    fit_gumbel,
    ks_distance,
    run_experiment,
)

__version__ = "0.1.0"
