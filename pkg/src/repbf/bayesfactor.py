"""Replication Bayes factors for t and F tests.

The factor B_r0 compares two accounts of a replication result: the
original study's posterior over the effect size (the replication
succeeded in reproducing an effect of that size) against a point null
of zero effect. Its numerator is a marginal likelihood over that
posterior, its denominator the central sampling density of the observed
replication statistic.

The primary API follows the scikit-learn estimator idiom:
:class:`FTestReplicationBF` and :class:`TTestReplicationBF` are
configured up front, ``fit`` on the original study (posterior sampling,
importance density, normalizer, all cached), then ``evaluate`` or
``predict`` any number of replication studies. ``repbf_f`` and
``repbf_t`` wrap one fit and one evaluation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import marginal as _marginal
from .distributions import (
    log_central_f_pdf,
    log_central_t_pdf,
    log_integrate,
    log_noncentral_f_pdf,
    log_noncentral_t_pdf,
)
from .errors import DesignWarning, ValidationError
from .marginal import (
    MarginalEstimate,
    estimate_mc,
    estimate_quadrature,
    fit_importance_density,
)
from .posterior import (
    FTestStudy,
    PosteriorDraws,
    TTestStudy,
    _check_seed,
    log_normalizing_constant,
    log_unnormalized_posterior_delta,
    log_unnormalized_posterior_f2,
    normal_approx_delta_posterior,
    sample_posterior,
)

__all__ = [
    "FTestReplicationBF",
    "INTERPRETATIONS",
    "RepBFResult",
    "TTestReplicationBF",
    "interpret",
    "repbf_f",
    "repbf_t",
]

INTERPRETATIONS = (
    "decisive_r",
    "strong_r",
    "substantial_r",
    "anecdotal",
    "substantial_0",
    "strong_0",
    "decisive_0",
)


def interpret(br0: float) -> str:
    """Evidence band for a replication Bayes factor.

    Bands follow the usual Bayes factor guidelines: above 3, 10 and 100
    the evidence for the replicated-effect model is substantial, strong
    and decisive; the reciprocal bands mirror them on the zero-effect
    side; between 1/3 and 3 the data are anecdotal. Boundary values fall
    to the weaker band.
    """
    if math.isnan(br0) or br0 <= 0:
        raise ValidationError(f"br0 must be positive, got {br0!r}")
    if br0 > 100:
        return "decisive_r"
    if br0 > 10:
        return "strong_r"
    if br0 > 3:
        return "substantial_r"
    if br0 >= 1 / 3:
        return "anecdotal"
    if br0 >= 1 / 10:
        return "substantial_0"
    if br0 >= 1 / 100:
        return "strong_0"
    return "decisive_0"


_LOG10_3 = math.log10(3.0)


def _band_from_log10(l10: float) -> str:
    if l10 > 2:
        return "decisive_r"
    if l10 > 1:
        return "strong_r"
    if l10 > _LOG10_3:
        return "substantial_r"
    if l10 >= -_LOG10_3:
        return "anecdotal"
    if l10 >= -1:
        return "substantial_0"
    if l10 >= -2:
        return "strong_0"
    return "decisive_0"


@dataclass(frozen=True)
class RepBFResult:
    """A replication Bayes factor with its components and settings."""

    br0: float
    log10_br0: float
    log_numerator: float
    log_denominator: float
    mc_se_log: float
    estimator: str
    n_draws: int
    seed: int
    interpretation: str
    ess: float | None = None

    def as_dict(self) -> dict:
        """The stable reporting schema used by the JSON output mode."""
        return {
            "br0": self.br0,
            "log10_br0": self.log10_br0,
            "log_numerator": self.log_numerator,
            "log_denominator": self.log_denominator,
            "mc_se_log": self.mc_se_log,
            "estimator": self.estimator,
            "n_draws": self.n_draws,
            "seed": self.seed,
            "interpretation": self.interpretation,
        }


def _result(est: MarginalEstimate, log_den: float, seed: int) -> RepBFResult:
    diff = est.log_value - log_den
    with np.errstate(over="ignore"):
        br0 = float(np.exp(diff))
    l10 = diff / math.log(10.0)
    return RepBFResult(
        br0=br0,
        log10_br0=l10,
        log_numerator=est.log_value,
        log_denominator=log_den,
        mc_se_log=est.mc_se_log,
        estimator=est.method,
        n_draws=est.n_draws,
        seed=seed,
        interpretation=_band_from_log10(l10),
        ess=est.ess,
    )


class _BaseReplicationBF(BaseEstimator):
    """Shared fit/evaluate machinery; subclasses bind the test family."""

    _study_type: type
    _support_lower: float

    def __init__(
        self,
        estimator: str = "importance",
        n_draws: int = 100_000,
        n_chains: int = 4,
        n_burn: int = 1000,
        n_keep: int = 25_000,
        inflation: float = 1.5,
        seed: int = 42,
        check_weights: bool = True,
    ):
        self.estimator = estimator
        self.n_draws = n_draws
        self.n_chains = n_chains
        self.n_burn = n_burn
        self.n_keep = n_keep
        self.inflation = inflation
        self.seed = seed
        self.check_weights = check_weights

    # subclass hooks -------------------------------------------------------
    def _log_unnorm_posterior(self, study):
        raise NotImplementedError

    def _rep_loglik(self, rep):
        raise NotImplementedError

    def _log_denominator(self, rep) -> float:
        raise NotImplementedError

    def _init_hint(self, study) -> tuple[float, float]:
        raise NotImplementedError

    def _check_study(self, study, role: str):
        if not isinstance(study, self._study_type):
            raise ValidationError(
                f"{role} study must be a {self._study_type.__name__}, "
                f"got {type(study).__name__}"
            )

    def _sample(self, study) -> PosteriorDraws:
        init, step = self._init_hint(study)
        return sample_posterior(
            self._log_unnorm_posterior(study),
            self._support_lower,
            n_chains=self.n_chains,
            n_burn=self.n_burn,
            n_keep=self.n_keep,
            step_scale=step,
            seed=self._seed_mcmc_,
            init=init,
        )

    # sklearn-style API ----------------------------------------------------
    def fit(self, study):
        """Fit on the original study: sample its posterior and cache
        everything replication evaluations reuse."""
        self._check_study(study, "original")
        if self.estimator not in _marginal.ESTIMATOR_METHODS:
            raise ValidationError(
                f"estimator must be one of {_marginal.ESTIMATOR_METHODS}, "
                f"got {self.estimator!r}"
            )
        seed = _check_seed(self.seed)
        child = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
        self._seed_mcmc_ = int(child[0])
        self._seed_is_ = int(child[1])

        self.study_ = study
        self.log_unnorm_ = self._log_unnorm_posterior(study)
        self.draws_ = None
        self.importance_density_ = None
        self.log_norm_ = None
        self._is_points_ = None
        self._is_base_terms_ = None
        if self.estimator in ("monte_carlo", "importance"):
            self.draws_ = self._sample(study)
        if self.estimator in ("importance", "quadrature"):
            self.log_norm_ = log_normalizing_constant(
                self.log_unnorm_, self._support_lower
            )
        if self.estimator == "importance":
            self.importance_density_ = fit_importance_density(
                self.draws_, self._support_lower, self.inflation
            )
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(self._seed_is_))
            )
            pts = self.importance_density_.sample(int(self.n_draws), rng)
            self._is_points_ = pts
            self._is_base_terms_ = (
                np.asarray(self.log_unnorm_(pts), dtype=float)
                - self.log_norm_
                - self.importance_density_.logpdf(pts)
            )
        return self

    def _require_fitted(self):
        if not hasattr(self, "study_"):
            raise NotFittedError(
                f"this {type(self).__name__} instance is not fitted yet; "
                "call fit(original_study) first"
            )

    def evaluate(self, rep, estimator: str | None = None) -> RepBFResult:
        """Replication Bayes factor of one replication study.

        ``estimator`` overrides the configured method for this single
        evaluation (the fitted state permitting: Monte Carlo and
        importance sampling need a sampled fit).
        """
        self._require_fitted()
        self._check_study(rep, "replication")
        self._warn_design(rep)
        method = self.estimator if estimator is None else estimator
        rep_loglik = self._rep_loglik(rep)
        if method == "quadrature":
            if self.log_norm_ is not None:
                # posterior normalizer cached at fit; only the numerator is new
                log_num = log_integrate(
                    lambda x: np.asarray(rep_loglik(x), dtype=float)
                    + np.asarray(self.log_unnorm_(x), dtype=float),
                    self._support_lower,
                    math.inf,
                )
                est = MarginalEstimate(log_num - self.log_norm_, "quadrature", 0.0, 0)
            else:
                est = estimate_quadrature(
                    rep_loglik, self.log_unnorm_, self._support_lower
                )
        elif method == "monte_carlo":
            if self.draws_ is None:
                raise ValidationError(
                    "monte_carlo evaluation needs a fit with a sampling estimator"
                )
            est = estimate_mc(rep_loglik, self.draws_)
        elif method == "importance":
            if self._is_points_ is None:
                raise ValidationError(
                    "importance evaluation needs a fit with estimator='importance'"
                )
            terms = np.asarray(rep_loglik(self._is_points_), dtype=float)
            terms = terms + self._is_base_terms_
            est = _marginal._combine_importance_terms(
                terms, int(self.n_draws), self.check_weights
            )
        else:
            raise ValidationError(
                f"estimator must be one of {_marginal.ESTIMATOR_METHODS}, got {method!r}"
            )
        return _result(est, self._log_denominator(rep), int(self.seed))

    def predict(self, studies) -> np.ndarray:
        """Bayes factors (br0) for a sequence of replication studies."""
        if isinstance(studies, (TTestStudy, FTestStudy)):
            studies = [studies]
        return np.array([self.evaluate(s).br0 for s in studies])

    def _warn_design(self, rep) -> None:
        pass


class FTestReplicationBF(_BaseReplicationBF):
    """Replication Bayes factor estimator for F tests (fixed-effect ANOVA).

    ``fit`` takes the original :class:`~repbf.posterior.FTestStudy` and
    builds the posterior over Cohen's f squared; ``evaluate`` scores
    replication studies against it. Valid only for fixed-effect designs
    with (approximately) equal cell sizes, where the noncentrality is
    ``f2 * N``.

    Parameters
    ----------
    estimator : {"importance", "monte_carlo", "quadrature"}
        Marginal-likelihood estimator for the numerator.
    n_draws : int
        Importance-sampling draw count.
    n_chains, n_burn, n_keep : int
        MCMC layout for the posterior fit (kept draws are per chain).
    inflation : float
        Importance-density scale inflation over the posterior sd.
    seed : int
        Master seed; all randomness derives from it.
    check_weights : bool
        Raise on degenerate importance weights (ESS below 1% of draws).
    """

    _study_type = FTestStudy
    _support_lower = 0.0

    def _log_unnorm_posterior(self, study):
        return lambda f2: log_unnormalized_posterior_f2(f2, study)

    def _rep_loglik(self, rep):
        def loglik(f2):
            return log_noncentral_f_pdf(
                rep.f_value, rep.df_effect, rep.df_error,
                np.asarray(f2, dtype=float) * rep.n_total,
            )

        return loglik

    def _log_denominator(self, rep) -> float:
        return log_central_f_pdf(rep.f_value, rep.df_effect, rep.df_error)

    def _init_hint(self, study) -> tuple[float, float]:
        f2_hat = study.f_value * study.df_effect / study.df_error
        init = max(f2_hat, 1.0 / study.n_total)
        step = max(f2_hat / 2.0, 2.0 / study.n_total)
        return init, step

    def _warn_design(self, rep) -> None:
        if rep.df_effect != self.study_.df_effect:
            warnings.warn(
                f"replication df_effect ({rep.df_effect}) differs from the "
                f"original ({self.study_.df_effect}); the studies may not "
                "test the same effect",
                DesignWarning,
                stacklevel=3,
            )


class TTestReplicationBF(_BaseReplicationBF):
    """Replication Bayes factor estimator for one- and two-sample t tests.

    Direction-sensitive: the signs of both t values matter. The original
    study's posterior over delta is sampled exactly by default;
    ``t_posterior="normal"`` switches to a Laplace normal approximation
    of that posterior as a fast path.
    """

    _study_type = TTestStudy
    _support_lower = -math.inf

    def __init__(
        self,
        estimator: str = "importance",
        n_draws: int = 100_000,
        n_chains: int = 4,
        n_burn: int = 1000,
        n_keep: int = 25_000,
        inflation: float = 1.5,
        seed: int = 42,
        check_weights: bool = True,
        t_posterior: str = "exact",
    ):
        super().__init__(
            estimator=estimator,
            n_draws=n_draws,
            n_chains=n_chains,
            n_burn=n_burn,
            n_keep=n_keep,
            inflation=inflation,
            seed=seed,
            check_weights=check_weights,
        )
        self.t_posterior = t_posterior

    def fit(self, study):
        if self.t_posterior not in ("exact", "normal"):
            raise ValidationError(
                f"t_posterior must be 'exact' or 'normal', got {self.t_posterior!r}"
            )
        self._warn_groups(study)
        if self.t_posterior == "exact":
            return super().fit(study)

        # Normal fast path: closed-form proper posterior, iid draws.
        self._check_study(study, "original")
        seed = _check_seed(self.seed)
        child = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
        self._seed_mcmc_, self._seed_is_ = int(child[0]), int(child[1])
        loc, scale = normal_approx_delta_posterior(study)
        self.study_ = study
        self.log_unnorm_ = lambda d: _normal_logpdf(d, loc, scale)
        self.log_norm_ = 0.0
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self._seed_mcmc_)))
        n = self.n_chains * self.n_keep
        self.draws_ = PosteriorDraws(
            draws=loc + scale * rng.standard_normal(n),
            n_chains=1,
            acceptance_rate=np.array([1.0]),
            rhat=math.nan,
            seed=self._seed_mcmc_,
        )
        self.importance_density_ = None
        self._is_points_ = None
        self._is_base_terms_ = None
        if self.estimator == "importance":
            self.importance_density_ = fit_importance_density(
                self.draws_, self._support_lower, self.inflation
            )
            rng_is = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self._seed_is_)))
            pts = self.importance_density_.sample(int(self.n_draws), rng_is)
            self._is_points_ = pts
            self._is_base_terms_ = (
                np.asarray(self.log_unnorm_(pts), dtype=float)
                - self.importance_density_.logpdf(pts)
            )
        return self

    def _log_unnorm_posterior(self, study):
        return lambda d: log_unnormalized_posterior_delta(d, study)

    def _rep_loglik(self, rep):
        root_n = math.sqrt(rep.n_effective)

        def loglik(d):
            return log_noncentral_t_pdf(
                rep.t_value, rep.df, np.asarray(d, dtype=float) * root_n
            )

        return loglik

    def _log_denominator(self, rep) -> float:
        return log_central_t_pdf(rep.t_value, rep.df)

    def _init_hint(self, study) -> tuple[float, float]:
        n_eff = study.n_effective
        delta_hat = study.t_value / math.sqrt(n_eff)
        spread = math.sqrt((1.0 + study.t_value**2 / (2.0 * study.df)) / n_eff)
        return delta_hat, 2.4 * spread

    @staticmethod
    def _warn_groups(study: TTestStudy) -> None:
        if study.two_sample and study.n1 != study.n2:
            warnings.warn(
                f"unequal group sizes ({study.n1}, {study.n2}): effect-size "
                "based replication factors assume (near) balanced groups and "
                "should not be used for clearly unbalanced non-random designs",
                DesignWarning,
                stacklevel=3,
            )

    def _warn_design(self, rep) -> None:
        self._warn_groups(rep)


def _normal_logpdf(x, loc: float, scale: float):
    z = (np.asarray(x, dtype=float) - loc) / scale
    return -0.5 * z * z - 0.5 * math.log(2.0 * math.pi) - math.log(scale)


def repbf_f(orig: FTestStudy, rep: FTestStudy, **config) -> RepBFResult:
    """Replication Bayes factor for a pair of F-test studies.

    One-shot wrapper around :class:`FTestReplicationBF`; ``config``
    takes the estimator's constructor keywords (``estimator``,
    ``n_draws``, ``seed``, ...).
    """
    return FTestReplicationBF(**config).fit(orig).evaluate(rep)


def repbf_t(orig: TTestStudy, rep: TTestStudy, **config) -> RepBFResult:
    """Replication Bayes factor for a pair of t-test studies."""
    return TTestReplicationBF(**config).fit(orig).evaluate(rep)
