"""Deterministic synthetic raters standing in for human participants.

A rater has an ideal design and per-objective quadratic penalties for
deviating from it.  Utilities map affinely onto each questionnaire scale
and round to the nearest item value, so the induced objective landscape is
smooth and unimodal underneath the rating quantization, with a known
optimum at the ideal point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .design_space import DesignParams, EhmiRendering, resolve_geometry
from .objectives import QuestionnaireResponse

N_SUBJECTIVE = 6  # trust, predictability, mental demand, safety, acceptance, aesthetics


@dataclass(frozen=True)
class SyntheticRater:
    """Ideal-point rater with per-objective weights over the 9 parameters."""

    ideal_point: tuple[float, ...]
    weights: tuple[tuple[float, ...], ...]  # (7, 9), row per objective
    noise_sd: float = 0.0
    base_latency_s: float = 15.0
    salience_gain_s: float = 8.0
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.ideal_point) != 9:
            raise ValueError("ideal_point must have 9 components")
        if any(not 0.0 <= v <= 1.0 for v in self.ideal_point):
            raise ValueError("ideal_point must lie in the unit box")
        if len(self.weights) != 7 or any(len(row) != 9 for row in self.weights):
            raise ValueError("weights must be a 7x9 matrix")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")


def _round_item(value: float, lo: int, hi: int) -> int:
    return min(max(int(math.floor(value + 0.5)), lo), hi)


def utilities(rater: SyntheticRater, params: DesignParams) -> np.ndarray:
    """Noise-free latent utilities, one per objective row."""
    x = np.asarray(params.as_tuple())
    ideal = np.asarray(rater.ideal_point)
    w = np.asarray(rater.weights)
    return 1.0 - w @ ((x - ideal) ** 2)


def crossing_time(
    rater: SyntheticRater, rendering: EhmiRendering, noise: float = 0.0
) -> float:
    """Seconds until crossing: more salient displays trigger earlier starts.

    Salience is the mean of opacity, covered area fraction and loudness.
    """
    alpha = rendering.color[3]
    area = rendering.rect.w * rendering.rect.h
    salience = (alpha + area + rendering.loudness) / 3.0
    return max(0.0, rater.base_latency_s - rater.salience_gain_s * salience + noise)


def rate(
    rater: SyntheticRater, params: DesignParams, iteration: int
) -> QuestionnaireResponse:
    """Rate a design: deterministic given (rater, params, iteration)."""
    rng = np.random.default_rng((rater.seed, iteration))
    noise = rng.standard_normal(N_SUBJECTIVE + 1) * rater.noise_sd
    u = utilities(rater, params)[:N_SUBJECTIVE] + noise[:N_SUBJECTIVE]

    trust = _round_item(1 + u[0] * 4, 1, 5)
    pred = _round_item(1 + u[1] * 4, 1, 5)
    mental = _round_item(20 - u[2] * 19, 1, 20)
    safety = _round_item(-3 + u[3] * 6, -3, 3)
    accept = _round_item(1 + u[4] * 6, 1, 7)
    appeal = _round_item(1 + u[5] * 6, 1, 7)

    time_s = crossing_time(rater, resolve_geometry(params), noise=float(noise[-1]))
    return QuestionnaireResponse(
        trust_items=(trust, trust),
        predictability_items=(pred, pred, 6 - pred, 6 - pred),
        mental_demand=mental,
        safety_items=(safety, safety, safety, safety),
        usefulness=accept,
        satisfaction=accept,
        visual_appeal=appeal,
        time_to_cross_s=time_s,
    )


def make_rater(
    seed: int,
    noise_sd: float = 0.0,
    ideal_bounds: tuple[float, float] = (0.15, 0.85),
    weight_bounds: tuple[float, float] = (0.1, 0.5),
) -> SyntheticRater:
    """Draw a rater with a random ideal point and random objective weights."""
    rng = np.random.default_rng(seed)
    ideal = rng.uniform(ideal_bounds[0], ideal_bounds[1], size=9)
    weights = rng.uniform(weight_bounds[0], weight_bounds[1], size=(7, 9))
    return SyntheticRater(
        ideal_point=tuple(float(v) for v in ideal),
        weights=tuple(tuple(float(v) for v in row) for row in weights),
        noise_sd=noise_sd,
        seed=seed,
    )


def make_rater_population(count: int, seed: int, noise_sd: float = 0.0, **kwargs):
    """Raters with distinct ideal points derived from one population seed."""
    return [make_rater(seed * 100_000 + i, noise_sd=noise_sd, **kwargs) for i in range(count)]


def load_rater_config(path) -> list[SyntheticRater]:
    """Rater population from a JSON config: count, seed, optional bounds."""
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    return make_rater_population(
        count=int(cfg["count"]),
        seed=int(cfg["seed"]),
        noise_sd=float(cfg.get("noise_sd", 0.0)),
        ideal_bounds=tuple(cfg.get("ideal_bounds", (0.15, 0.85))),
        weight_bounds=tuple(cfg.get("weight_bounds", (0.1, 0.5))),
    )
