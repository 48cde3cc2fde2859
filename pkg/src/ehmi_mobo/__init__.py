"""Human-in-the-loop multi-objective Bayesian optimization for eHMI design."""

from .acquisition import AcquisitionConfig, ehvi_mc, sobol_designs, suggest_next
from .design_space import (
    DesignParams,
    EhmiRendering,
    blink_frequency_hz,
    resolve_geometry,
    validate_params,
)
from .objectives import (
    ObjectiveVector,
    QuestionnaireResponse,
    ScaleSpec,
    default_scales,
    is_perfect_rating,
    normalize,
    score_questionnaire,
)
from .optimizer import (
    Session,
    SessionConfig,
    SessionStore,
    export_session,
    start_session,
    submit_rating,
)
from .pareto import (
    BoxDecomposition,
    ParetoFront,
    box_decomposition,
    dominates,
    hypervolume,
    pareto_front,
)
from .surrogate import GPHyperparams, SurrogateModel, fit, posterior, sample_posterior
from .synthetic_user import SyntheticRater, crossing_time, make_rater, rate

__version__ = "0.1.0"

__all__ = [
    "AcquisitionConfig",
    "BoxDecomposition",
    "DesignParams",
    "EhmiRendering",
    "GPHyperparams",
    "ObjectiveVector",
    "ParetoFront",
    "QuestionnaireResponse",
    "ScaleSpec",
    "Session",
    "SessionConfig",
    "SessionStore",
    "SurrogateModel",
    "SyntheticRater",
    "blink_frequency_hz",
    "box_decomposition",
    "crossing_time",
    "default_scales",
    "dominates",
    "ehvi_mc",
    "export_session",
    "fit",
    "hypervolume",
    "is_perfect_rating",
    "make_rater",
    "normalize",
    "pareto_front",
    "posterior",
    "rate",
    "resolve_geometry",
    "sample_posterior",
    "score_questionnaire",
    "sobol_designs",
    "start_session",
    "submit_rating",
    "suggest_next",
    "validate_params",
]
