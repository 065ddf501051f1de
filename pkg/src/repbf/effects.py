"""Effect-size measures and the algebraic conversions between them."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["EffectSize", "convert_effect_size", "f_squared_from_f_statistic"]

EFFECT_KINDS = ("cohens_d", "cohens_f2", "partial_eta2")


@dataclass(frozen=True)
class EffectSize:
    """An effect-size value tagged with its measure.

    ``cohens_f2`` and ``partial_eta2`` are nonnegative; ``partial_eta2``
    must be below 1. ``cohens_d`` is signed.
    """

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in EFFECT_KINDS:
            raise ValidationError(f"kind must be one of {EFFECT_KINDS}, got {self.kind!r}")
        if not math.isfinite(self.value):
            raise ValidationError("value must be finite")
        if self.kind == "partial_eta2" and not 0 <= self.value < 1:
            raise ValidationError("partial_eta2 must lie in [0, 1)")
        if self.kind == "cohens_f2" and self.value < 0:
            raise ValidationError("cohens_f2 must be >= 0")


def _to_f2(es: EffectSize) -> float:
    if es.kind == "cohens_f2":
        return es.value
    if es.kind == "partial_eta2":
        return es.value / (1.0 - es.value)
    # d**2/4: exact for two equal groups, the design the d measure implies here
    return es.value * es.value / 4.0


def convert_effect_size(es: EffectSize, target_kind: str) -> EffectSize:
    """Convert between Cohen's d, Cohen's f squared and partial eta squared.

    Uses ``f2 = eta2 / (1 - eta2)`` and its inverse; conversions through
    Cohen's d assume a balanced two-group design (``f2 = d**2 / 4``) and
    a d converted from an unsigned measure comes back nonnegative.
    """
    if target_kind not in EFFECT_KINDS:
        raise ValidationError(f"target_kind must be one of {EFFECT_KINDS}")
    if target_kind == es.kind:
        return es
    f2 = _to_f2(es)
    if target_kind == "cohens_f2":
        return EffectSize("cohens_f2", f2)
    if target_kind == "partial_eta2":
        return EffectSize("partial_eta2", f2 / (1.0 + f2))
    d = 2.0 * math.sqrt(f2)
    if es.kind == "cohens_d":
        d = math.copysign(d, es.value)
    return EffectSize("cohens_d", d)


def f_squared_from_f_statistic(
    f_value: float, df_effect: float, df_error: float
) -> EffectSize:
    """Observed Cohen's f squared implied by an F statistic.

    ``f2 = F * df_effect / df_error`` for fixed-effect designs.
    """
    if not f_value >= 0:
        raise ValidationError("f_value must be >= 0")
    if not (df_effect > 0 and df_error > 0):
        raise ValidationError("degrees of freedom must be positive")
    return EffectSize("cohens_f2", f_value * df_effect / df_error)
