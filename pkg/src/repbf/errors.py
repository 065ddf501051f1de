"""Exception hierarchy.

Validation problems (bad inputs, invalid study definitions) and numerical
failures (sampler diagnostics, quadrature non-convergence, degenerate
estimators) are kept on separate branches so callers, in particular the
command line interface, can map them to distinct exit codes.
"""


class ReplicationBFError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ReplicationBFError, ValueError):
    """An input violates a documented precondition or invariant."""


class NumericalError(ReplicationBFError, RuntimeError):
    """A computation failed or its diagnostics are unacceptable."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SamplerDiagnosticError(NumericalError):
    """MCMC diagnostics (acceptance rate or R-hat) are out of bounds."""


class DegenerateDrawsError(NumericalError):
    """Posterior draws carry no spread; no importance density can be fit."""


class WeightDegeneracyError(NumericalError):
    """Importance weights collapsed onto too few draws."""


class AllTermsUnderflowError(NumericalError):
    """Every Monte Carlo term was minus infinity."""


class DesignWarning(UserWarning):
    """Study design caveat (unbalanced groups, mismatched df)."""
