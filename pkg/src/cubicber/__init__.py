"""Decision-variable statistics and BER for a cubic nonlinear optical
receiver, with log-Pearson-III analytics, Monte-Carlo validation, and
goodness-of-fit tooling."""

from .params import (
    SystemParams,
    DerivedParams,
    ParamError,
    derive,
    dbm_to_watts,
    watts_to_dbm,
    db_to_linear,
)
from .moments import MomentTriple, decision_moments
from .lp3 import (
    Lp3Params,
    Lp3Error,
    NoSolutionError,
    DivergentMomentError,
    fit_from_moments,
)
from ._backend import active_backend
from .montecarlo import SampleSet, generate_samples, empirical_ber
from .detection import (
    NoisePhysics,
    BitConditionedLaw,
    noise_physics,
    cdf_shot_thermal,
    error_probability,
    optimize_threshold,
    gaussian_approx_ber,
)
from .gof import GofReport, rank_distributions

__version__ = "0.1.0"

__all__ = [
    "SystemParams",
    "DerivedParams",
    "ParamError",
    "derive",
    "dbm_to_watts",
    "watts_to_dbm",
    "db_to_linear",
    "MomentTriple",
    "decision_moments",
    "Lp3Params",
    "Lp3Error",
    "NoSolutionError",
    "DivergentMomentError",
    "fit_from_moments",
    "active_backend",
    "SampleSet",
    "generate_samples",
    "empirical_ber",
    "NoisePhysics",
    "BitConditionedLaw",
    "noise_physics",
    "cdf_shot_thermal",
    "error_probability",
    "optimize_threshold",
    "gaussian_approx_ber",
    "GofReport",
    "rank_distributions",
    "__version__",
]
