"""Replication Bayes factors for t tests and fixed-effect ANOVA F tests.

Quantifies the evidence a replication study provides for "an effect of
the size the original study estimated" against "no effect", from the
reported test statistics alone. B_r0 above 1 favours the replicated
effect, below 1 the null; see :func:`interpret` for the verbal bands.

>>> from repbf import FTestStudy, repbf_f
>>> orig = FTestStudy(f_value=4.97, df_effect=2, df_error=81, n_total=84)
>>> rep = FTestStudy(f_value=0.24, df_effect=2, df_error=122, n_total=125)
>>> repbf_f(orig, rep, seed=1).interpretation
'strong_0'
"""

from .bayesfactor import (
    FTestReplicationBF,
    INTERPRETATIONS,
    RepBFResult,
    TTestReplicationBF,
    interpret,
    repbf_f,
    repbf_t,
)
from .distributions import (
    Quadrature,
    integrate_adaptive,
    log_central_f_pdf,
    log_central_t_pdf,
    log_noncentral_f_pdf,
    log_noncentral_t_pdf,
)
from .effects import EffectSize, convert_effect_size, f_squared_from_f_statistic
from .errors import (
    AllTermsUnderflowError,
    DegenerateDrawsError,
    DesignWarning,
    NumericalError,
    QuadratureError,
    ReplicationBFError,
    SamplerDiagnosticError,
    ValidationError,
    WeightDegeneracyError,
)
from .marginal import (
    ImportanceDensity,
    MarginalEstimate,
    estimate_importance,
    estimate_mc,
    estimate_quadrature,
    fit_importance_density,
)
from .posterior import (
    FTestStudy,
    PosteriorDraws,
    TTestStudy,
    log_normalizing_constant,
    log_unnormalized_posterior_delta,
    log_unnormalized_posterior_f2,
    normal_approx_delta_posterior,
    sample_posterior,
)
from .simulate import (
    ScenarioGrid,
    run_simulation_1,
    run_simulation_2,
    run_simulation_3,
    statistic_from_effect_size,
)

__version__ = "0.1.0"

__all__ = [
    "AllTermsUnderflowError",
    "DegenerateDrawsError",
    "DesignWarning",
    "EffectSize",
    "FTestReplicationBF",
    "FTestStudy",
    "INTERPRETATIONS",
    "ImportanceDensity",
    "MarginalEstimate",
    "NumericalError",
    "PosteriorDraws",
    "Quadrature",
    "QuadratureError",
    "RepBFResult",
    "ReplicationBFError",
    "SamplerDiagnosticError",
    "ScenarioGrid",
    "TTestReplicationBF",
    "TTestStudy",
    "ValidationError",
    "WeightDegeneracyError",
    "convert_effect_size",
    "estimate_importance",
    "estimate_mc",
    "estimate_quadrature",
    "f_squared_from_f_statistic",
    "fit_importance_density",
    "integrate_adaptive",
    "interpret",
    "log_central_f_pdf",
    "log_central_t_pdf",
    "log_noncentral_f_pdf",
    "log_noncentral_t_pdf",
    "log_normalizing_constant",
    "log_unnormalized_posterior_delta",
    "log_unnormalized_posterior_f2",
    "normal_approx_delta_posterior",
    "repbf_f",
    "repbf_t",
    "run_simulation_1",
    "run_simulation_2",
    "run_simulation_3",
    "sample_posterior",
    "statistic_from_effect_size",
]
