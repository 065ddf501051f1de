"""Posterior of the effect-size parameter implied by a reported statistic.

A single reported t or F statistic, together with its degrees of freedom
and sample size, pins down a posterior over the underlying effect size
(delta for t tests, Cohen's f squared for F tests) under a flat prior.
That posterior is the "posterior turned prior" of the replication model:
this module evaluates its unnormalized log density, samples it with a
random-walk Metropolis-Hastings sampler, and computes its normalizing
constant by adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    log_central_t_pdf,
    log_integrate,
    log_noncentral_f_pdf,
    log_noncentral_t_pdf,
)
from .errors import SamplerDiagnosticError, ValidationError

__all__ = [
    "FTestStudy",
    "PosteriorDraws",
    "TTestStudy",
    "log_normalizing_constant",
    "log_unnormalized_posterior_delta",
    "log_unnormalized_posterior_f2",
    "normal_approx_delta_posterior",
    "sample_posterior",
]

_MAX_SEED = 2**64


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < _MAX_SEED:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


@dataclass(frozen=True)
class TTestStudy:
    """A reported t-test result.

    Parameters
    ----------
    t_value : float
        Observed t statistic (sign carries the direction of the effect).
    df : float
        Degrees of freedom as reported; Welch-corrected, hence
        non-integer, values are accepted verbatim.
    n1 : int
        Size of group 1 (or the single group in a one-sample design).
    n2 : int
        Size of group 2; 0 denotes a one-sample design.
    """

    t_value: float
    df: float
    n1: int
    n2: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_value):
            raise ValidationError("t_value must be finite")
        if not self.df > 0:
            raise ValidationError("df must be positive")
        if int(self.n1) != self.n1 or self.n1 < 2:
            raise ValidationError("n1 must be an integer >= 2")
        if int(self.n2) != self.n2 or self.n2 < 0:
            raise ValidationError("n2 must be a nonnegative integer")
        if self.n2 == 1:
            raise ValidationError("two-sample designs need n2 >= 2 (0 means one-sample)")

    @property
    def two_sample(self) -> bool:
        return self.n2 >= 2

    @property
    def n_effective(self) -> float:
        """Sample size entering the noncentrality: n1*n2/(n1+n2), or n1 one-sample."""
        if self.two_sample:
            return self.n1 * self.n2 / (self.n1 + self.n2)
        return float(self.n1)


@dataclass(frozen=True)
class FTestStudy:
    """A reported F-test result from a fixed-effect ANOVA.

    ``n_total`` is the total sample size across all cells; the
    noncentrality of the sampling distribution is ``f2 * n_total``.
    """

    f_value: float
    df_effect: float
    df_error: float
    n_total: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.f_value) or self.f_value < 0:
            raise ValidationError("f_value must be finite and >= 0")
        if not self.df_effect >= 1:
            raise ValidationError("df_effect must be >= 1")
        if not self.df_error >= 1:
            raise ValidationError("df_error must be >= 1")
        if int(self.n_total) != self.n_total or self.n_total < self.df_effect + 2:
            raise ValidationError("n_total must be an integer >= df_effect + 2")


@dataclass(frozen=True)
class PosteriorDraws:
    """MCMC output over a scalar effect-size parameter.

    ``draws`` holds the post burn-in draws of all chains concatenated in
    chain order. ``acceptance_rate`` is per chain; ``rhat`` is the
    potential-scale-reduction factor (NaN for a single chain).
    """

    draws: np.ndarray
    n_chains: int
    acceptance_rate: np.ndarray
    rhat: float
    seed: int
    step_scale: np.ndarray = field(repr=False, default=None)

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]

    def by_chain(self) -> np.ndarray:
        """Draws reshaped to (n_chains, n_keep)."""
        return self.draws.reshape(self.n_chains, -1)


def log_unnormalized_posterior_f2(f2, study: FTestStudy):
    """Unnormalized log posterior of f squared given an F-test study.

    With a flat prior on ``[0, inf)`` the posterior kernel is the
    noncentral F density of the observed statistic evaluated at
    noncentrality ``f2 * n_total``; the prior contributes zero.
    Accepts an ndarray of f squared values.
    """
    f2_arr = np.asarray(f2, dtype=float)
    if np.any(f2_arr < 0):
        raise ValidationError("f2 must be >= 0")
    return log_noncentral_f_pdf(
        study.f_value, study.df_effect, study.df_error, f2_arr * study.n_total
    )


def log_unnormalized_posterior_delta(delta, study: TTestStudy):
    """Unnormalized log posterior of delta given a t-test study.

    Flat prior on the whole real line; the kernel is the noncentral t
    density of the observed statistic at noncentrality
    ``delta * sqrt(n_effective)``. Accepts an ndarray of delta values.
    """
    d_arr = np.asarray(delta, dtype=float)
    return log_noncentral_t_pdf(
        study.t_value, study.df, d_arr * math.sqrt(study.n_effective)
    )


# ---------------------------------------------------------------------------
# Metropolis-Hastings
# ---------------------------------------------------------------------------

_TUNE_WINDOW = 50
_TUNE_TARGET = 0.35
_ACCEPT_BAND = (0.10, 0.60)
_RHAT_LIMIT = 1.05


def _gelman_rubin(chains: np.ndarray) -> float:
    """Potential scale reduction factor over (n_chains, n_keep) draws."""
    m, n = chains.shape
    w = np.mean(np.var(chains, axis=1, ddof=1))
    means = chains.mean(axis=1)
    b = n * np.var(means, ddof=1)
    v = (n - 1) / n * w + (m + 1) / (m * n) * b
    if w == 0:
        return 1.0 if b == 0 else math.inf
    return float(math.sqrt(v / w))


def sample_posterior(
    log_target,
    support_lower: float = -math.inf,
    *,
    n_chains: int = 4,
    n_burn: int = 1000,
    n_keep: int = 25_000,
    step_scale: float = 1.0,
    seed: int = 0,
    init: float | None = None,
) -> PosteriorDraws:
    """Random-walk Metropolis-Hastings sampling of a 1-D log target.

    ``log_target`` must accept an ndarray (one value per chain) and
    return the unnormalized log density; proposals below
    ``support_lower`` are rejected outright. Chains run on independent
    substreams spawned from ``seed``, so results are bit-reproducible
    and chains could execute concurrently. ``step_scale`` seeds the
    proposal width, which is tuned per chain during burn-in towards a
    35% acceptance rate and then frozen.

    Raises
    ------
    SamplerDiagnosticError
        If any chain's post burn-in acceptance rate leaves [0.10, 0.60]
        or the potential scale reduction factor exceeds 1.05.
    """
    if n_chains < 1:
        raise ValidationError("n_chains must be >= 1")
    if n_keep < 2:
        raise ValidationError("n_keep must be >= 2")
    if n_burn < 0:
        raise ValidationError("n_burn must be >= 0")
    if not step_scale > 0:
        raise ValidationError("step_scale must be positive")
    seed = _check_seed(seed)

    if init is None:
        lo = support_lower if math.isfinite(support_lower) else -50.0
        grid = np.linspace(lo, max(lo + 1.0, 50.0), 4001)
        vals = np.asarray(log_target(grid), dtype=float)
        if not np.isfinite(vals).any():
            raise ValidationError("could not locate a finite region of log_target")
        init = float(grid[int(np.nanargmax(np.where(np.isfinite(vals), vals, -np.inf)))])

    ss = np.random.SeedSequence(seed)
    gens = [np.random.Generator(np.random.PCG64(child)) for child in ss.spawn(n_chains)]
    n_steps = n_burn + n_keep

    # Pre-generate each chain's standardized increments and uniforms so a
    # chain's path depends only on its own substream.
    incr = np.column_stack([g.standard_normal(n_steps) for g in gens])
    unif = np.column_stack([g.random(n_steps) for g in gens])
    jitter = np.array([g.uniform(-1.0, 1.0) for g in gens])

    state = init + 0.5 * step_scale * jitter
    if math.isfinite(support_lower):
        state = np.maximum(state, support_lower + 0.25 * step_scale)
    log_state = np.asarray(log_target(state), dtype=float)
    if not np.all(np.isfinite(log_state)):
        raise ValidationError("log_target is not finite at the initial states")

    scales = np.full(n_chains, float(step_scale))
    kept = np.empty((n_keep, n_chains))
    accepts_window = np.zeros(n_chains)
    accepts_kept = np.zeros(n_chains)

    for t in range(n_steps):
        prop = state + scales * incr[t]
        in_support = prop >= support_lower
        log_prop = np.full(n_chains, -np.inf)
        if in_support.any():
            log_prop[in_support] = np.asarray(
                log_target(prop[in_support]), dtype=float
            )
        accept = np.log(unif[t]) <= log_prop - log_state
        state = np.where(accept, prop, state)
        log_state = np.where(accept, log_prop, log_state)

        if t < n_burn:
            accepts_window += accept
            if (t + 1) % _TUNE_WINDOW == 0:
                rate = accepts_window / _TUNE_WINDOW
                scales *= np.exp(rate - _TUNE_TARGET)
                accepts_window[:] = 0.0
        else:
            accepts_kept += accept
            kept[t - n_burn] = state

    rates = accepts_kept / n_keep
    chains = kept.T
    rhat = _gelman_rubin(chains) if n_chains >= 2 else math.nan
    if np.any(rates < _ACCEPT_BAND[0]) or np.any(rates > _ACCEPT_BAND[1]):
        raise SamplerDiagnosticError(
            f"acceptance rates {np.round(rates, 3).tolist()} outside "
            f"[{_ACCEPT_BAND[0]}, {_ACCEPT_BAND[1]}] after tuning"
        )
    if n_chains >= 2 and rhat > _RHAT_LIMIT:
        raise SamplerDiagnosticError(f"R-hat {rhat:.4f} exceeds {_RHAT_LIMIT}")
    return PosteriorDraws(
        draws=chains.reshape(-1),
        n_chains=n_chains,
        acceptance_rate=rates,
        rhat=rhat,
        seed=seed,
        step_scale=scales,
    )


def log_normalizing_constant(log_target, support_lower: float = -math.inf) -> float:
    """Log of the integral of ``exp(log_target)`` over its support.

    Needed to turn the unnormalized posterior into a proper density for
    the importance-sampling estimator. ``log_target`` must accept
    ndarray input.
    """
    return log_integrate(log_target, support_lower, math.inf)


def normal_approx_delta_posterior(study: TTestStudy) -> tuple[float, float]:
    """Laplace (normal) approximation to the delta posterior.

    Returns the ``(location, scale)`` of a normal fitted at the
    posterior mode with curvature matching. Optional fast path; the
    exact sampled posterior is the default everywhere.
    """
    delta_hat = study.t_value / math.sqrt(study.n_effective)
    spread = math.sqrt((1.0 + study.t_value**2 / (2.0 * study.df)) / study.n_effective)

    def neg(d: np.ndarray) -> np.ndarray:
        return -np.asarray(log_unnormalized_posterior_delta(d, study))

    # shrinking-grid mode search, then finite-difference curvature
    center, width = delta_hat, 6.0 * spread
    for _ in range(60):
        grid = np.linspace(center - width, center + width, 9)
        center = float(grid[int(np.argmin(neg(grid)))])
        width /= 3.0
        if width < 1e-12:
            break
    h = max(1e-6, 1e-5 * abs(center))
    triple = neg(np.array([center - h, center, center + h]))
    curv = (triple[0] - 2.0 * triple[1] + triple[2]) / (h * h)
    if not curv > 0:
        raise ValidationError("posterior mode curvature is not positive")
    return center, float(1.0 / math.sqrt(curv))
