"""Pairwise-likelihood estimation for a 1-d Gaussian process with
exponential covariance: simulation, weighted pairwise objectives,
box-constrained estimators, and asymptotic-variance tools."""

from .asymptotics import (
    TauResult,
    asymptotic_variance,
    b_coeff,
    normalize,
    tau2_approx,
    tau2_exact,
)
from .estimate import (
    EstimationResult,
    minimize_box,
    minimize_scalar_box,
    mle,
    profile_sigma2,
    variance_wpmle_closed_form,
    wpcmle,
    wpmle,
)
from .harness import (
    AppendixBConfig,
    ExperimentConfig,
    SummaryRow,
    rows_to_csv,
    run_scenario,
    summarize,
)
from .likelihood import (
    FullObjective,
    PairwiseObjective,
    cond_pair_loglik,
    full_neg2_loglik,
    pair_loglik,
    pcl_direct,
    pcl_reindexed,
    pl_direct,
    pl_general,
    pl_reindexed,
)
from .simulate import exp_cov, replication_stream, simulate_general, simulate_ou
from .types import (
    BracketExhausted,
    CorrelationModel,
    CovParams,
    DegeneratePair,
    Design,
    InsufficientSamples,
    NonFinite,
    NotPositiveDefinite,
    ParamBox,
    SamplePath,
    WeightSeq,
    grid_design,
)

__version__ = "0.1.0"
