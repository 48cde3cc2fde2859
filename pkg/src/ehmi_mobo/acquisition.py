"""Initial Sobol designs and expected-hypervolume-improvement acquisition.

The initialization phase issues the first points of the unscrambled Sobol
sequence, identical for every session.  During optimization the next design
is the candidate with the highest Monte Carlo estimate of expected
hypervolume improvement (one design per iteration), scored over a pool of
quasi-random continuation points and local perturbations of the incumbent
Pareto designs.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .design_space import N_PARAMS, DesignParams, validate_params
from .errors import ConfigInvalid
from .pareto import ParetoFront, BoxDecomposition, box_decomposition, improvement_over_boxes
from .surrogate import SurrogateModel, posterior_mean_var, sample_posterior

PERTURBATION_SD = 0.05

# cap on the elements of one scoring buffer; keeps peak memory flat
_CHUNK_BUDGET = 2.0e7


@dataclass(frozen=True)
class AcquisitionConfig:
    """Counts and seed controlling initialization and acquisition."""

    n_sobol: int = 5
    n_candidates: int = 2024
    n_mc_samples: int = 512
    q: int = 1
    seed: int = 0

    def validate(self) -> None:
        if self.n_sobol < 1:
            raise ConfigInvalid(f"n_sobol must be >= 1, got {self.n_sobol}")
        if self.n_candidates < 1:
            raise ConfigInvalid(
                f"n_candidates must be >= 1, got {self.n_candidates}"
            )
        if self.n_mc_samples < 1:
            raise ConfigInvalid(
                f"n_mc_samples must be >= 1, got {self.n_mc_samples}"
            )
        if self.q != 1:
            raise ConfigInvalid(f"q is fixed at 1, got {self.q}")

    def to_dict(self) -> dict:
        return {
            "n_sobol": self.n_sobol,
            "n_candidates": self.n_candidates,
            "n_mc_samples": self.n_mc_samples,
            "q": self.q,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "AcquisitionConfig":
        return cls(**payload)


def sobol_block(start_index: int, count: int, dim: int = N_PARAMS) -> np.ndarray:
    """Rows ``start_index .. start_index+count-1`` of the Sobol sequence."""
    engine = qmc.Sobol(d=dim, scramble=False)
    with warnings.catch_warnings():
        # drawing non-power-of-two counts is intentional here
        warnings.simplefilter("ignore", UserWarning)
        if start_index:
            engine.fast_forward(start_index)
        return engine.random(count)


def sobol_designs(config: AcquisitionConfig) -> list[DesignParams]:
    """The fixed initialization designs, identical for every session.

    First ``n_sobol`` points of the unscrambled Sobol sequence, skipping the
    all-zeros index-0 point; the session seed plays no role here.
    """
    config.validate()
    block = sobol_block(1, config.n_sobol)
    return [validate_params(row) for row in block]


def ehvi_mc(
    model: SurrogateModel,
    decomp: BoxDecomposition,
    candidate: DesignParams,
    n_mc: int,
    seed,
) -> float:
    """Monte Carlo expected hypervolume improvement of one candidate.

    Averages, over posterior draws of the candidate's outcome, the volume
    the outcome adds over the decomposed non-dominated region.
    """
    x = np.asarray(candidate.as_tuple(), dtype=float)[None, :]
    draws = sample_posterior(model, x, n_mc, seed)[:, 0, :]
    return float(np.mean(improvement_over_boxes(draws, decomp)))


@dataclass(frozen=True)
class AcquisitionDiagnostics:
    """Per-iteration acquisition record appended to the session log."""

    best_score: float
    pool_hash: str
    seed: tuple
    n_candidates: int
    n_boxes: int
    best_index: int

    def to_dict(self) -> dict:
        return {
            "best_score": self.best_score,
            "pool_hash": self.pool_hash,
            "seed": list(self.seed),
            "n_candidates": self.n_candidates,
            "n_boxes": self.n_boxes,
            "best_index": self.best_index,
        }


def candidate_pool(
    model: SurrogateModel, front: ParetoFront, config: AcquisitionConfig
) -> np.ndarray:
    """Candidate designs: Sobol continuation plus incumbent perturbations.

    The first half continues the Sobol sequence past the points already
    consumed (advancing with each optimization step); the second half
    perturbs the designs currently on the Pareto front with Gaussian noise
    of sd 0.05, clamped to the unit box.
    """
    n_history = model.X.shape[0]
    n_half = config.n_candidates // 2
    n_pert = config.n_candidates - n_half
    step = max(n_history - config.n_sobol, 0)
    pool = []
    if n_half:
        start = 1 + config.n_sobol + step * n_half
        pool.append(sobol_block(start, n_half))
    incumbents = model.X[list(front.indices)]
    rng = np.random.default_rng((config.seed, n_history, 1))
    base = incumbents[np.arange(n_pert) % len(incumbents)]
    perturbed = base + rng.normal(0.0, PERTURBATION_SD, size=(n_pert, N_PARAMS))
    pool.append(np.clip(perturbed, 0.0, 1.0))
    return np.vstack(pool)


def score_candidates(
    model: SurrogateModel,
    decomp: BoxDecomposition,
    candidates: np.ndarray,
    n_mc: int,
    seed,
) -> np.ndarray:
    """EHVI scores of all candidates under identical posterior draws.

    Uses the same standard-normal draws for every candidate (common random
    numbers), so each score equals ``ehvi_mc`` of that candidate with the
    same seed, and the argmax is reproducible and parallelism-independent.
    """
    mean, var = posterior_mean_var(model, candidates)
    sd = np.sqrt(var)
    k = mean.shape[1]
    z = np.random.default_rng(seed).standard_normal((n_mc, 1, k))[:, 0, :]
    if len(decomp) == 0:
        return np.zeros(mean.shape[0])
    chunk = max(1, int(_CHUNK_BUDGET / (n_mc * max(len(decomp), 1) * k)))
    scores = np.empty(mean.shape[0])
    for a in range(0, mean.shape[0], chunk):
        b = min(a + chunk, mean.shape[0])
        draws = mean[a:b, None, :] + sd[a:b, None, :] * z[None, :, :]
        scores[a:b] = improvement_over_boxes(draws, decomp).mean(axis=1)
    return scores


def suggest_next(
    model: SurrogateModel,
    front: ParetoFront,
    config: AcquisitionConfig,
    return_diagnostics: bool = False,
):
    """Select the next design by maximal Monte Carlo EHVI.

    Ties break toward the lowest candidate index.  Deterministic given the
    model's training history and the config seed.
    """
    config.validate()
    decomp = box_decomposition(front)
    candidates = candidate_pool(model, front, config)
    score_seed = (config.seed, model.X.shape[0], 2)
    scores = score_candidates(model, decomp, candidates, config.n_mc_samples, score_seed)
    best = int(np.argmax(scores))
    design = validate_params(candidates[best])
    if not return_diagnostics:
        return design
    diag = AcquisitionDiagnostics(
        best_score=float(scores[best]),
        pool_hash=hashlib.sha256(np.ascontiguousarray(candidates).tobytes()).hexdigest(),
        seed=score_seed,
        n_candidates=candidates.shape[0],
        n_boxes=len(decomp),
        best_index=best,
    )
    return design, diag
