"""
Driving protocols and propagators
=================================

A protocol is a :class:`HamiltonianSchedule`: either a list of
piecewise-constant real Hamiltonians (:class:`StepSchedule`) or the closed-form
continuous rotation of the qubit (:class:`RotationSchedule`).

Time reversal Θ is complex conjugation in the computational basis. Every
schedule is real in that basis, so ``Θ H Θ† = H`` and the time-reversed
propagator is the reversed-order product of the same steps.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence, overload

import numpy as np
import numpy.typing as npt

from .abstraction import ZState
from .config import BOUNDARY_ATOL, HERMITIAN_ATOL, REFERENCE_TAU
from .errors import (
    ContinuousModeRequested,
    DimensionMismatch,
    DiscreteModeRequested,
    IndexOutOfRange,
    NonBoundaryTime,
    NonHermitianInput,
    OddSplitBoundary,
)
from .matcore import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ComplexMatrix,
    ComplexVector,
    DensityOperator,
    as_matrix,
    exp_hermitian_generator,
    require_hermitian,
)

LOG = logging.getLogger(__name__)

Z_PLUS: ComplexVector = np.array([1, 0], dtype=complex)
Z_MINUS: ComplexVector = np.array([0, 1], dtype=complex)
Y_PLUS: ComplexVector = np.array([1, 1j], dtype=complex) / math.sqrt(2)
Y_MINUS: ComplexVector = np.array([1, -1j], dtype=complex) / math.sqrt(2)


# --------------------------------------------------------------------------- #
# Qubit rotation protocol
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class QubitRotationProtocol:
    """
    Rotation of ``H(Λ) = ω/2 (1 + cosΛ σz + sinΛ σx)`` from ``Λ = 0`` to ``Λ = π/2``.

    Parameters
    ----------
    omega : float
        Natural frequency ω (energy, ħ = 1).
    tau : float
        Protocol duration τ; the rotation rate is ``Ω = π / (2τ)`` (1 by default).
    steps : int | None
        Number N of piecewise-constant steps, ``None`` for the continuous rotation.
    """

    omega: float
    tau: float = REFERENCE_TAU
    steps: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be finite and > 0, got {self.tau!r}")
        if self.steps is not None and (isinstance(self.steps, bool) or self.steps < 1):
            raise ValueError(f"steps must be an integer >= 1 or None, got {self.steps!r}")

    @classmethod
    def from_ratio(
        cls, omega_over_Omega: float, tau: float = REFERENCE_TAU, steps: int | None = None
    ) -> "QubitRotationProtocol":
        """Build from the velocity parameter ω/Ω."""
        return cls(omega=omega_over_Omega * math.pi / (2 * tau), tau=tau, steps=steps)

    @property
    def Omega(self) -> float:  # noqa: N802
        return math.pi / (2 * self.tau)

    @property
    def ratio(self) -> float:
        """ω/Ω."""
        return self.omega / self.Omega

    @property
    def is_continuous(self) -> bool:
        return self.steps is None

    @property
    def dt(self) -> float:
        """Step duration Δt = π / (2NΩ)."""
        if self.steps is None:
            raise ContinuousModeRequested("A continuous rotation has no step duration")
        return math.pi / (2 * self.steps * self.Omega)

    def lambda_at(self, t: float) -> float:
        return self.Omega * t

    def schedule(self) -> "HamiltonianSchedule":
        if self.steps is None:
            return RotationSchedule(self)
        return step_hamiltonians(self)

    def __str__(self) -> str:
        steps = "continuous" if self.steps is None else f"N={self.steps}"
        return f"QubitRotation(ω/Ω={self.ratio:g}, τ={self.tau:g}, {steps})"


def rotation_hamiltonian(omega: float, lam: float) -> ComplexMatrix:
    return omega / 2 * (IDENTITY_2 + math.cos(lam) * SIGMA_Z + math.sin(lam) * SIGMA_X)


def hamiltonian_at(p: QubitRotationProtocol, lam: float) -> ComplexMatrix:
    """``H(Λ)``; real, with eigenvalues ``{0, ω}`` for every Λ."""
    return rotation_hamiltonian(p.omega, lam)


def _y_rotation(angle: float) -> ComplexMatrix:
    """``exp(-i angle σy / 2)``."""
    return math.cos(angle / 2) * IDENTITY_2 - 1j * math.sin(angle / 2) * SIGMA_Y


def rotation_axis(p: QubitRotationProtocol, k: int) -> tuple[float, float, float]:
    """Bloch direction ``d_k = (sin Λ_k, 0, cos Λ_k)`` of step *k* (1-based)."""
    if p.steps is None:
        raise ContinuousModeRequested("Rotation axes are defined per step")
    if not 1 <= k <= p.steps:
        raise IndexOutOfRange(f"Step {k} outside 1..{p.steps}")
    lam = k * math.pi / (2 * p.steps)
    return (math.sin(lam), 0.0, math.cos(lam))


def retardance(p: QubitRotationProtocol) -> float:
    """Rotation angle per step ``θ = (π / 2N) (ω/Ω)``."""
    if p.steps is None:
        raise ContinuousModeRequested("Retardance is defined per step")
    return math.pi / (2 * p.steps) * p.ratio


# --------------------------------------------------------------------------- #
# Schedules
# --------------------------------------------------------------------------- #


class HamiltonianSchedule(ABC):
    """Common interface of step-wise and continuous driving protocols."""

    initial_hamiltonian: ComplexMatrix
    final_hamiltonian: ComplexMatrix
    duration: float

    @property
    def dimension(self) -> int:
        return int(self.initial_hamiltonian.shape[0])

    @property
    @abstractmethod
    def is_continuous(self) -> bool: ...

    @abstractmethod
    def forward(self, t1: float, t0: float) -> ComplexMatrix:
        """``U(t1, t0)`` of the forward protocol."""

    @abstractmethod
    def reversed(self, t1: float, t0: float) -> ComplexMatrix:
        """``Ũ(t1, t0)`` of the time-reversed protocol ``Λ̃(t) = Λ(τ - t)``."""

    @abstractmethod
    def checkpoints(self) -> list[float]:
        """Times at which time-slice identities are evaluated."""

    @abstractmethod
    def split_time(self, exact_half: bool = False) -> float:
        """Interference time of the split-half interferometer."""

    def _require_order(self, t1: float, t0: float) -> None:
        if t0 > t1 + self._tolerance:
            raise ValueError(f"Expected t0 <= t1, got t0={t0!r}, t1={t1!r}")

    @property
    def _tolerance(self) -> float:
        return BOUNDARY_ATOL * max(1.0, self.duration)


class StepSchedule(HamiltonianSchedule):
    """
    Piecewise-constant protocol: ``U(τ, 0) = e^{-i H_N Δt_N} ··· e^{-i H_1 Δt_1}``.

    Parameters
    ----------
    steps : sequence of (matrix, duration)
        Real Hermitian generators in time order.
    initial, final : array-like | None
        Hamiltonians measured at ``t = 0`` and ``t = τ``; default to the first
        and last step generators.
    corrupt_step : int | None
        Test hook: replace the forward propagator of this (0-based) step by
        its adjoint. The reversed protocol is left intact.
    """

    def __init__(
        self,
        steps: Sequence[tuple[npt.ArrayLike, float]],
        initial: npt.ArrayLike | None = None,
        final: npt.ArrayLike | None = None,
        corrupt_step: int | None = None,
    ):
        if not steps:
            raise ValueError("A step schedule needs at least one step")

        generators = [
            _real_hermitian(matrix, f"step {k + 1}") for k, (matrix, _) in enumerate(steps)
        ]
        durations = [float(dt) for _, dt in steps]
        for k, dt in enumerate(durations):
            if not (math.isfinite(dt) and dt > 0):
                raise ValueError(f"Step {k + 1} duration must be finite and > 0, got {dt!r}")
        dim = generators[0].shape[0]
        if any(g.shape[0] != dim for g in generators):
            raise DimensionMismatch("All step Hamiltonians must share one dimension")

        self.generators: tuple[ComplexMatrix, ...] = tuple(generators)
        self.durations: tuple[float, ...] = tuple(durations)
        self.initial_hamiltonian = _real_hermitian(
            generators[0] if initial is None else initial, "initial Hamiltonian"
        )
        self.final_hamiltonian = _real_hermitian(
            generators[-1] if final is None else final, "final Hamiltonian"
        )
        for name, h in (("initial", self.initial_hamiltonian), ("final", self.final_hamiltonian)):
            if h.shape[0] != dim:
                raise DimensionMismatch(
                    f"The {name} Hamiltonian has dimension {h.shape[0]} != {dim}"
                )
        self.duration = float(sum(durations))
        self.corrupt_step = corrupt_step

        self._bounds = np.concatenate(([0.0], np.cumsum(durations)))
        self._reversed_bounds = np.concatenate(([0.0], np.cumsum(durations[::-1])))

        self._forward_steps = [
            exp_hermitian_generator(g, dt) for g, dt in zip(generators, durations)
        ]
        if corrupt_step is not None:
            if not 0 <= corrupt_step < len(generators):
                raise IndexOutOfRange(f"Cannot corrupt step {corrupt_step} of {len(generators)}")
            bad = self._forward_steps[corrupt_step]
            self._forward_steps[corrupt_step] = bad.conj().T
            LOG.warning("Step %d of the forward schedule is deliberately corrupted", corrupt_step)
        # Θ H_k Θ† = conj(H_k) = H_k, applied in the order N..1
        self._reversed_steps = [
            exp_hermitian_generator(g.conj(), dt)
            for g, dt in zip(generators[::-1], durations[::-1])
        ]

    @property
    def is_continuous(self) -> bool:
        return False

    @property
    def n_steps(self) -> int:
        return len(self.generators)

    def boundaries(self) -> list[float]:
        return [float(t) for t in self._bounds]

    def checkpoints(self) -> list[float]:
        return self.boundaries()

    def boundary_index(self, t: float, reverse: bool = False) -> int:
        """Index ``k`` with ``t_k = t`` within tolerance, else :class:`NonBoundaryTime`."""
        bounds = self._reversed_bounds if reverse else self._bounds
        (hits,) = np.nonzero(np.abs(bounds - t) <= self._tolerance)
        if not hits.size:
            raise NonBoundaryTime(
                f"t={t!r} is not a step boundary of a {self.n_steps}-step schedule "
                f"(τ={self.duration!r})"
            )
        return int(hits[0])

    def forward(self, t1: float, t0: float) -> ComplexMatrix:
        self._require_order(t1, t0)
        i0, i1 = self.boundary_index(t0), self.boundary_index(t1)
        return _ordered_product(self._forward_steps, i0, i1)

    def reversed(self, t1: float, t0: float) -> ComplexMatrix:
        self._require_order(t1, t0)
        i0 = self.boundary_index(t0, reverse=True)
        i1 = self.boundary_index(t1, reverse=True)
        return _ordered_product(self._reversed_steps, i0, i1)

    def split_index(self) -> int:
        """Number of forward steps before the interference point: ``ceil(N / 2)``."""
        return math.ceil(self.n_steps / 2)

    def split_time(self, exact_half: bool = False) -> float:
        t_split = float(self._bounds[self.split_index()])
        if exact_half and abs(t_split - self.duration / 2) > self._tolerance:
            raise OddSplitBoundary(
                f"No step boundary at τ/2 for a {self.n_steps}-step schedule "
                f"(nearest split at t={t_split!r})"
            )
        return t_split

    def with_corrupted_step(self, k: int | None = None) -> "StepSchedule":
        """Copy whose forward step *k* (default: the middle one) is conjugate-transposed."""
        return StepSchedule(
            list(zip(self.generators, self.durations)),
            self.initial_hamiltonian,
            self.final_hamiltonian,
            corrupt_step=self.split_index() - 1 if k is None else k,
        )

    def __repr__(self) -> str:
        return f"StepSchedule(steps={self.n_steps}, d={self.dimension}, τ={self.duration!r})"


class RotationSchedule(HamiltonianSchedule):
    """Continuous rotation ``Λ(t) = Ωt`` solved in the co-rotating frame."""

    def __init__(self, protocol: QubitRotationProtocol):
        if protocol.steps is not None:
            raise DiscreteModeRequested(f"{protocol} is a step protocol")
        self.protocol = protocol
        self.initial_hamiltonian = hamiltonian_at(protocol, 0.0)
        self.final_hamiltonian = hamiltonian_at(protocol, math.pi / 2)
        self.duration = protocol.tau

        rate = protocol.Omega
        # co-rotating generators of the forward and reversed rotations
        self._forward_generator = self.initial_hamiltonian - rate / 2 * SIGMA_Y
        self._reversed_generator = self.initial_hamiltonian + rate / 2 * SIGMA_Y

    @property
    def is_continuous(self) -> bool:
        return True

    def _check_time(self, t: float) -> float:
        if not -self._tolerance <= t <= self.duration + self._tolerance:
            raise NonBoundaryTime(f"t={t!r} outside [0, τ={self.duration!r}]")
        return min(max(t, 0.0), self.duration)

    def forward_from_zero(self, t: float) -> ComplexMatrix:
        t = self._check_time(t)
        frame = _y_rotation(self.protocol.Omega * t)
        return frame @ exp_hermitian_generator(self._forward_generator, t)

    def reversed_from_zero(self, t: float) -> ComplexMatrix:
        t = self._check_time(t)
        frame = _y_rotation(math.pi / 2 - self.protocol.Omega * t)
        start = _y_rotation(math.pi / 2).conj().T
        return frame @ exp_hermitian_generator(self._reversed_generator, t) @ start

    def forward(self, t1: float, t0: float) -> ComplexMatrix:
        self._require_order(t1, t0)
        return self.forward_from_zero(t1) @ self.forward_from_zero(t0).conj().T

    def reversed(self, t1: float, t0: float) -> ComplexMatrix:
        self._require_order(t1, t0)
        return self.reversed_from_zero(t1) @ self.reversed_from_zero(t0).conj().T

    def checkpoints(self) -> list[float]:
        return [self.duration * q for q in (0.0, 0.25, 0.5, 0.75, 1.0)]

    def split_time(self, exact_half: bool = False) -> float:
        return self.duration / 2

    def __repr__(self) -> str:
        return f"RotationSchedule({self.protocol})"


def _real_hermitian(m: npt.ArrayLike, label: str) -> ComplexMatrix:
    arr = as_matrix(m)
    if float(np.max(np.abs(arr.imag))) > HERMITIAN_ATOL:
        raise NonHermitianInput(f"The {label} must be real in the computational basis")
    return require_hermitian(arr.real)


def _ordered_product(unitaries: Sequence[ComplexMatrix], i0: int, i1: int) -> ComplexMatrix:
    dim = unitaries[0].shape[0]
    result = np.eye(dim, dtype=complex)
    for u in unitaries[i0:i1]:
        result = u @ result
    return result


# --------------------------------------------------------------------------- #
# Module-level operations
# --------------------------------------------------------------------------- #

ScheduleLike = HamiltonianSchedule | QubitRotationProtocol


def as_schedule(s: ScheduleLike) -> HamiltonianSchedule:
    return s.schedule() if isinstance(s, QubitRotationProtocol) else s


def step_hamiltonians(p: QubitRotationProtocol) -> StepSchedule:
    """Steps ``H_k = H(kπ / 2N)``, ``k = 1..N``, each held for Δt."""
    if p.steps is None:
        raise ContinuousModeRequested(f"{p} has no discrete steps")
    dt = p.dt
    steps = [(hamiltonian_at(p, k * math.pi / (2 * p.steps)), dt) for k in range(1, p.steps + 1)]
    return StepSchedule(steps, hamiltonian_at(p, 0.0), hamiltonian_at(p, math.pi / 2))


def custom_schedule(
    steps: Sequence[tuple[npt.ArrayLike, float]],
    initial: npt.ArrayLike | None = None,
    final: npt.ArrayLike | None = None,
) -> StepSchedule:
    """d-level schedule from arbitrary real Hermitian steps."""
    return StepSchedule(steps, initial, final)


def forward_unitary(s: ScheduleLike, t1: float, t0: float = 0.0) -> ComplexMatrix:
    return as_schedule(s).forward(t1, t0)


def reversed_unitary(s: ScheduleLike, t1: float, t0: float = 0.0) -> ComplexMatrix:
    return as_schedule(s).reversed(t1, t0)


def continuous_unitary(p: QubitRotationProtocol, t: float) -> ComplexMatrix:
    """``U(t, 0) = e^{-iΩtσy/2} e^{-i[ω(1 + σz) - Ωσy] t / 2}``, global phase kept."""
    if p.steps is not None:
        raise DiscreteModeRequested(f"{p} is a step protocol")
    return RotationSchedule(p).forward_from_zero(t)


def continuous_reversed_unitary(p: QubitRotationProtocol, t: float) -> ComplexMatrix:
    """``Ũ(t, 0)`` of the reversed rotation ``Λ̃(t) = π/2 - Ωt``."""
    if p.steps is not None:
        raise DiscreteModeRequested(f"{p} is a step protocol")
    return RotationSchedule(p).reversed_from_zero(t)


def closed_form_state(p: QubitRotationProtocol, initial: ZState, t: float) -> ComplexVector:
    """
    Closed-form state of the continuous rotation started in ``|z±>``.

    The solution is expanded on the eigenbasis ``|n±>`` of ``n·σ`` with
    ``n = (0, cos ξ, sin ξ)``, ``sin ξ = ω/r``, ``cos ξ = -Ω/r`` and
    ``r = sqrt(ω² + Ω²)``. The global phase ``e^{-iωt/2}`` is dropped.
    """
    if p.steps is not None:
        raise DiscreteModeRequested(f"{p} is a step protocol")
    rate = p.Omega
    r = math.hypot(p.omega, rate)
    xi = math.atan2(p.omega / r, -rate / r)
    c, s = math.cos(xi / 2), math.sin(xi / 2)

    if initial is ZState.PLUS:
        c1, c2 = (c + s) / math.sqrt(2), -(s - c) / math.sqrt(2)
    else:
        c1, c2 = -1j * (c - s) / math.sqrt(2), 1j * (s + c) / math.sqrt(2)

    slow, fast = np.exp(-0.5j * r * t), np.exp(0.5j * r * t)
    along_y_plus = (c1 * slow * c - c2 * fast * s) * np.exp(-0.5j * rate * t)
    along_y_minus = (c1 * slow * s + c2 * fast * c) * np.exp(0.5j * rate * t)
    return np.asarray(along_y_plus * Y_PLUS + along_y_minus * Y_MINUS, dtype=complex)


@overload
def apply_time_reversal(v: DensityOperator) -> DensityOperator: ...
@overload
def apply_time_reversal(v: ComplexVector) -> ComplexVector: ...
def apply_time_reversal(v: DensityOperator | ComplexVector) -> DensityOperator | ComplexVector:
    """Θ: entrywise complex conjugation in the computational basis."""
    if isinstance(v, DensityOperator):
        return v.conjugate()
    return np.conj(np.asarray(v, dtype=complex))
