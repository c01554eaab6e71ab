from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, TypeAlias

from .abstraction import Preparation, Scheme
from .errors import ConfigError

# Numerical contracts (identities checked to machine precision); not user configurable.
HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
TRACE_ATOL = 1e-12
POSITIVITY_ATOL = 1e-12
SINGULAR_EIGENVALUE = 1e-14
SUPPORT_RHO = 1e-12
SUPPORT_SIGMA = 1e-14
DEGENERACY_GAP = 1e-10
BOUNDARY_ATOL = 1e-12
MERGE_RTOL = 1e-9
STOCHASTIC_ATOL = 1e-8
ALPHA_FLOOR = 1e-300
PHASE_SCAN_POINTS = 256

# Protocol duration for which the rotation rate Ω = π / (2τ) equals 1.
REFERENCE_TAU = math.pi / 2

SWEEP_AXES = ("beta", "omega_over_Omega", "steps")

PROTOCOL_TYPE: TypeAlias = dict[str, Any]
SWEEP_TYPE: TypeAlias = dict[str, list[Any]]


@dataclass(frozen=True)
class GridPoint:
    """Sweep point: beta in (ħΩ)⁻¹, ω/Ω and the step count (``None`` = continuous)."""

    beta: float
    omega_over_Omega: float
    steps: int | None


class RunConfig:
    def __init__(
        self,
        protocol: PROTOCOL_TYPE,
        beta: float | None = None,
        preparation: Preparation = Preparation.THERMAL,
        scheme: Scheme = Scheme.SPLIT,
        indices: tuple[int, int] | None = None,
        sweep: SWEEP_TYPE | None = None,
        output: str | None = None,
        output_format: str = "csv",
        threads: int | None = None,
        inject_corruption: bool = False,
    ):
        self.PROTOCOL: PROTOCOL_TYPE = protocol
        """Normalised protocol descriptor (see ``ConfigMaker``)."""

        self.BETA = beta
        self.PREPARATION = preparation
        self.SCHEME = scheme
        self.INDICES = indices

        self.SWEEP: SWEEP_TYPE = {} if sweep is None else sweep

        self.OUTPUT = output
        self.FORMAT = output_format
        self.THREADS = threads

        self.INJECT_CORRUPTION = inject_corruption
        """Test hook: corrupt one protocol step so ``verify`` must fail."""

    def axis(self, name: str) -> list[Any]:
        """Values of one sweep axis, falling back to the single-run value."""
        if name in self.SWEEP:
            return list(self.SWEEP[name])
        if name == "beta":
            return [] if self.BETA is None else [self.BETA]
        if name == "steps":
            return [self.PROTOCOL.get("steps")]
        return [self.PROTOCOL[name]]

    def grid(self) -> list[GridPoint]:
        if self.is_custom:
            raise ConfigError("A custom schedule has no omega_over_Omega/steps grid")
        return [
            GridPoint(float(beta), float(ratio), None if steps is None else int(steps))
            for beta in self.axis("beta")
            for ratio in self.axis("omega_over_Omega")
            for steps in self.axis("steps")
        ]

    @property
    def is_continuous(self) -> bool:
        return self.PROTOCOL.get("mode") == "continuous"

    @property
    def is_custom(self) -> bool:
        """Protocol given as an explicit list of real Hermitian steps."""
        return "schedule" in self.PROTOCOL

    def __repr__(self) -> str:
        return (
            "RunConfig("
            f"protocol={self.PROTOCOL}, beta={self.BETA}, preparation={self.PREPARATION.value}, "
            f"scheme={self.SCHEME.value}, sweep={self.SWEEP}, format={self.FORMAT})"
        )
