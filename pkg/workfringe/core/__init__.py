from .abstraction import Direction, Preparation, Role, Scheme, Subsystem, ZState
from .config import GridPoint, RunConfig
from .errors import WorkFringeError
from .interfero import (
    FullForward,
    FullReversed,
    InterferometerRun,
    PureEigenpair,
    SplitHalf,
    ThermalPurified,
)
from .matcore import DensityOperator, SpectralDecomposition
from .oracle import OracleReport
from .protocol import HamiltonianSchedule, QubitRotationProtocol, RotationSchedule, StepSchedule
from .thermo import ThermalState, WorkDistribution

__all__ = [
    "Direction",
    "Preparation",
    "Role",
    "Scheme",
    "Subsystem",
    "ZState",
    "GridPoint",
    "RunConfig",
    "WorkFringeError",
    "FullForward",
    "FullReversed",
    "InterferometerRun",
    "PureEigenpair",
    "SplitHalf",
    "ThermalPurified",
    "DensityOperator",
    "SpectralDecomposition",
    "OracleReport",
    "HamiltonianSchedule",
    "QubitRotationProtocol",
    "RotationSchedule",
    "StepSchedule",
    "ThermalState",
    "WorkDistribution",
]
