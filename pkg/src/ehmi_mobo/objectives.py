"""Questionnaire scoring and objective normalization.

Raw item-level ratings are first scored into seven raw objective values
(subscale means plus the measured crossing time), then normalized into the
[-1, 1] space the optimizer consumes, where every objective is oriented so
larger is better.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ScaleViolation

OBJECTIVE_NAMES = (
    "trust",
    "predictability",
    "mental_demand",
    "perceived_safety",
    "acceptance",
    "aesthetics",
    "time_to_cross",
)

N_OBJECTIVES = 7

# Predictability items 3 and 4 are worded inversely and reverse-coded on a
# 5-point scale as (6 - x) before averaging.
PREDICTABILITY_INVERSE = (2, 3)


@dataclass(frozen=True)
class ScaleSpec:
    """Bounds and orientation of one raw objective scale."""

    lo: float
    hi: float
    direction: str  # "maximize" | "minimize"

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"scale lo must be < hi, got [{self.lo}, {self.hi}]")
        if self.direction not in ("maximize", "minimize"):
            raise ValueError(f"unknown direction {self.direction!r}")

    @property
    def best(self) -> float:
        return self.lo if self.direction == "minimize" else self.hi


def default_scales(t_max: float = 60.0) -> dict[str, ScaleSpec]:
    """Per-objective scale bounds.

    Usefulness, satisfaction and visual appeal default to 7-point scales;
    crossing time is clamped to [0, t_max] seconds before normalization.
    """
    return {
        "trust": ScaleSpec(1, 5, "maximize"),
        "predictability": ScaleSpec(1, 5, "maximize"),
        "mental_demand": ScaleSpec(1, 20, "minimize"),
        "perceived_safety": ScaleSpec(-3, 3, "maximize"),
        "acceptance": ScaleSpec(1, 7, "maximize"),
        "aesthetics": ScaleSpec(1, 7, "maximize"),
        "time_to_cross": ScaleSpec(0, t_max, "minimize"),
    }


@dataclass(frozen=True)
class QuestionnaireResponse:
    """Raw item-level ratings plus the measured crossing time of one trial."""

    trust_items: tuple[int, int]
    predictability_items: tuple[int, int, int, int]
    mental_demand: int
    safety_items: tuple[int, int, int, int]
    usefulness: int
    satisfaction: int
    visual_appeal: int
    time_to_cross_s: float

    def validate(self, scales: Mapping[str, ScaleSpec] | None = None) -> None:
        """Raise :class:`ScaleViolation` if any item is outside its scale."""
        scales = scales or default_scales()
        _check_items("trust_items", self.trust_items, 2, scales["trust"])
        _check_items(
            "predictability_items", self.predictability_items, 4,
            scales["predictability"],
        )
        _check_items(
            "mental_demand", (self.mental_demand,), 1, scales["mental_demand"]
        )
        _check_items(
            "safety_items", self.safety_items, 4, scales["perceived_safety"]
        )
        _check_items("usefulness", (self.usefulness,), 1, scales["acceptance"])
        _check_items("satisfaction", (self.satisfaction,), 1, scales["acceptance"])
        _check_items("visual_appeal", (self.visual_appeal,), 1, scales["aesthetics"])
        if not self.time_to_cross_s >= 0:
            raise ScaleViolation(
                f"time_to_cross_s must be >= 0, got {self.time_to_cross_s}"
            )

    def to_dict(self) -> dict:
        """Flat key-value record used in payloads and logs."""
        return {
            "trust_items": list(self.trust_items),
            "predictability_items": list(self.predictability_items),
            "mental_demand": self.mental_demand,
            "safety_items": list(self.safety_items),
            "usefulness": self.usefulness,
            "satisfaction": self.satisfaction,
            "visual_appeal": self.visual_appeal,
            "time_to_cross_s": self.time_to_cross_s,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "QuestionnaireResponse":
        try:
            return cls(
                trust_items=tuple(int(v) for v in payload["trust_items"]),
                predictability_items=tuple(
                    int(v) for v in payload["predictability_items"]
                ),
                mental_demand=int(payload["mental_demand"]),
                safety_items=tuple(int(v) for v in payload["safety_items"]),
                usefulness=int(payload["usefulness"]),
                satisfaction=int(payload["satisfaction"]),
                visual_appeal=int(payload["visual_appeal"]),
                time_to_cross_s=float(payload["time_to_cross_s"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScaleViolation(f"malformed questionnaire payload: {exc}") from exc


def _check_items(name: str, items: tuple, expected: int, scale: ScaleSpec) -> None:
    if len(items) != expected:
        raise ScaleViolation(f"{name}: expected {expected} items, got {len(items)}")
    for value in items:
        if not scale.lo <= value <= scale.hi:
            raise ScaleViolation(
                f"{name}: {value} outside [{scale.lo}, {scale.hi}]"
            )


@dataclass(frozen=True)
class ObjectiveVector:
    """The 7 normalized objective values, all in [-1, 1], all maximized."""

    trust: float
    predictability: float
    mental_demand: float
    perceived_safety: float
    acceptance: float
    aesthetics: float
    time_to_cross: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in OBJECTIVE_NAMES)

    def as_list(self) -> list[float]:
        return list(self.as_tuple())

    @classmethod
    def from_sequence(cls, values) -> "ObjectiveVector":
        values = list(values)
        if len(values) != N_OBJECTIVES:
            raise ValueError(f"expected {N_OBJECTIVES} values, got {len(values)}")
        return cls(*(float(v) for v in values))


def score_questionnaire(resp: QuestionnaireResponse) -> dict[str, float]:
    """Score a validated response into the 7 raw objective values.

    Subscale items are averaged; inverse predictability items are
    reverse-coded as (6 - x) first; acceptance is the mean of the
    usefulness and satisfaction items.
    """
    resp.validate()
    predictability = [
        6 - v if i in PREDICTABILITY_INVERSE else v
        for i, v in enumerate(resp.predictability_items)
    ]
    return {
        "trust": _mean(resp.trust_items),
        "predictability": _mean(predictability),
        "mental_demand": float(resp.mental_demand),
        "perceived_safety": _mean(resp.safety_items),
        "acceptance": _mean((resp.usefulness, resp.satisfaction)),
        "aesthetics": float(resp.visual_appeal),
        "time_to_cross": float(resp.time_to_cross_s),
    }


def _mean(values) -> float:
    return sum(values) / len(values)


def normalize(raw: float, spec: ScaleSpec) -> float:
    """Map a raw value on [lo, hi] onto [-1, 1], flipping minimized scales.

    The raw value is clamped into [lo, hi] first (crossing times can exceed
    the configured cap).
    """
    raw = min(max(raw, spec.lo), spec.hi)
    v = 2.0 * (raw - spec.lo) / (spec.hi - spec.lo) - 1.0
    return -v if spec.direction == "minimize" else v


def normalize_scores(
    raw_scores: Mapping[str, float],
    scales: Mapping[str, ScaleSpec] | None = None,
) -> ObjectiveVector:
    """Normalize all 7 raw objective values into an :class:`ObjectiveVector`."""
    scales = scales or default_scales()
    return ObjectiveVector(
        **{name: normalize(raw_scores[name], scales[name]) for name in OBJECTIVE_NAMES}
    )


def response_to_objectives(
    resp: QuestionnaireResponse,
    scales: Mapping[str, ScaleSpec] | None = None,
) -> tuple[dict[str, float], ObjectiveVector]:
    """Score and normalize in one step; returns (raw scores, normalized)."""
    raw = score_questionnaire(resp)
    return raw, normalize_scores(raw, scales)


def is_perfect_rating(
    resp: QuestionnaireResponse,
    scales: Mapping[str, ScaleSpec] | None = None,
) -> bool:
    """True iff every subjective metric scored its best possible value.

    Best means scale maximum for the maximized subjective metrics and the
    scale minimum (1) for mental demand.  Crossing time is a measured
    metric, not a rating, and is ignored.
    """
    scales = scales or default_scales()
    raw = score_questionnaire(resp)
    subjective = (
        "trust",
        "predictability",
        "mental_demand",
        "perceived_safety",
        "acceptance",
        "aesthetics",
    )
    return all(raw[name] == scales[name].best for name in subjective)
