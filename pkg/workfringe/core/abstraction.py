from enum import Enum


class Direction(Enum):
    FORWARD = "forward"
    REVERSED = "reversed"


class Role(Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"
    AUXILIARY = "auxiliary"
    JOINT = "joint"


class Subsystem(Enum):
    """Which factor of a bipartite ``A ⊗ B`` space to keep."""

    A = "A"
    B = "B"


class Preparation(Enum):
    PURE = "pure"
    THERMAL = "thermal"


class Scheme(Enum):
    SPLIT = "split"
    FULL = "full"
    FULL_REVERSED = "full-reversed"


class ZState(Enum):
    """Eigenstates of ``sigma_z`` used as initial states of the rotation protocol."""

    PLUS = "z+"
    MINUS = "z-"
