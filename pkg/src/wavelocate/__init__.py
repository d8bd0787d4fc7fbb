"""wavelocate: source localization for propagating wavefronts.

Estimators for the source of an expanding wavefront from anchor arrival
times: closed-form TDOA with a known constant speed, joint mTDOA with an
unknown constant speed, and nonlinear NTDOA with a separable
range x angle speed field.  Includes forward simulators (synthetic
media and an excitable-medium spiral-wave PDE), frame-sequence
ingestion, and a Monte-Carlo benchmark harness.
"""

from ._kernels import BACKEND_NAME
from .errors import WavelocateError
from .model import (
    AnchorObservation,
    Anisotropic,
    Estimate,
    IsotropicKnown,
    IsotropicUnknown,
    Medium,
    Point2,
    Scenario,
    SolverKind,
    SpeedModel,
    polar_relative,
    speed_at,
)
from .simplex import SimplexConfig, SimplexResult, nelder_mead
from .solvers import NtdoaOrder, mtdoa, ntdoa, tdoa_linear

__version__ = "0.1.0"

__all__ = [
    "AnchorObservation",
    "Anisotropic",
    "BACKEND_NAME",
    "Estimate",
    "IsotropicKnown",
    "IsotropicUnknown",
    "Medium",
    "NtdoaOrder",
    "Point2",
    "Scenario",
    "SimplexConfig",
    "SimplexResult",
    "SolverKind",
    "SpeedModel",
    "WavelocateError",
    "mtdoa",
    "nelder_mead",
    "ntdoa",
    "polar_relative",
    "speed_at",
    "tdoa_linear",
]
