"""
Thermal ensembles and two-point-measurement work statistics
===========================================================

Probabilities are carried together with their natural logarithms. Fluctuation
theorems compare ratios of masses that can be far below double precision at
low temperature, so every check in this module works in log space.
"""

from __future__ import annotations

import logging
import math
import numbers
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.special import logsumexp

from .abstraction import Direction, Role
from .config import MERGE_RTOL
from .errors import DimensionMismatch, InvalidBeta, SupportMismatch
from .matcore import (
    ComplexMatrix,
    DensityOperator,
    RealVector,
    SpectralDecomposition,
    as_matrix,
    hermitian_eig,
    relative_entropy,
)
from .protocol import ScheduleLike, as_schedule

LOG = logging.getLogger(__name__)

_CROOKS_FLOOR = 1e-12


# --------------------------------------------------------------------------- #
# Gibbs states
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ThermalState:
    """Gibbs ensemble ``ρ = e^{-β(H - F)}`` of one Hamiltonian."""

    beta: float
    hamiltonian: ComplexMatrix = field(repr=False)
    spectrum: SpectralDecomposition = field(repr=False)
    log_partition_function: float

    @property
    def energies(self) -> RealVector:
        return self.spectrum.eigenvalues

    @property
    def eigenvectors(self) -> ComplexMatrix:
        return self.spectrum.eigenvectors

    @property
    def log_probabilities(self) -> RealVector:
        return -self.beta * self.energies - self.log_partition_function

    @property
    def probabilities(self) -> RealVector:
        return np.exp(self.log_probabilities)

    @property
    def partition_function(self) -> float:
        return math.exp(self.log_partition_function)

    @property
    def free_energy(self) -> float:
        """``F = -ln Z / β``."""
        return -self.log_partition_function / self.beta

    def density(self, role: Role = Role.SYSTEM) -> DensityOperator:
        """The state as a :class:`DensityOperator` carrying its exact spectrum."""
        probs = self.probabilities
        exact = SpectralDecomposition(probs, self.eigenvectors, self.log_probabilities)
        matrix = (self.eigenvectors * probs) @ self.eigenvectors.conj().T
        return DensityOperator(matrix / np.trace(matrix).real, role, exact)


def _check_beta(beta: float) -> float:
    if not isinstance(beta, numbers.Real) or isinstance(beta, bool):
        raise InvalidBeta(f"beta must be a real number, got {beta!r}")
    if not math.isfinite(beta) or beta <= 0:
        raise InvalidBeta(f"beta must be finite and > 0, got {beta!r}")
    return float(beta)


def thermal_state(h: npt.ArrayLike, beta: float) -> ThermalState:
    """
    Gibbs state of *h* at inverse temperature *beta*.

    Raises
    ------
    InvalidBeta
        For non-positive, NaN or infinite *beta*.
    """
    beta = _check_beta(beta)
    matrix = as_matrix(h)
    spectrum = hermitian_eig(matrix)
    log_z = float(logsumexp(-beta * spectrum.eigenvalues))
    return ThermalState(beta, matrix, spectrum, log_z)


def free_energy(h: npt.ArrayLike, beta: float) -> float:
    return thermal_state(h, beta).free_energy


# --------------------------------------------------------------------------- #
# Work distributions
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class WorkDistribution:
    """
    Atomic distribution of work values.

    Attributes
    ----------
    works : ndarray
        Ascending support points, pairwise separated by more than ``tolerance``.
    log_probabilities : ndarray
        Natural logarithm of the mass of each support point.
    direction : Direction
        Forward protocol or its time-reversed twin.
    delta_F : float
        Free-energy difference of this direction (``F_τ - F_0`` forward).
    tolerance : float
        Distance below which two work values are one peak.
    """

    works: RealVector
    log_probabilities: RealVector
    direction: Direction = Direction.FORWARD
    delta_F: float = 0.0  # noqa: N815
    tolerance: float = MERGE_RTOL

    def __post_init__(self) -> None:
        works = np.asarray(self.works, dtype=float)
        logs = np.asarray(self.log_probabilities, dtype=float)
        if works.shape != logs.shape or works.ndim != 1:
            raise DimensionMismatch("works and log_probabilities must be equal-length vectors")
        if np.any(np.diff(works) <= self.tolerance):
            raise ValueError("Work support must be ascending and separated by the tolerance")
        total = float(np.exp(logsumexp(logs))) if logs.size else 0.0
        if abs(total - 1) > 1e-10:
            raise ValueError(f"Work probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "works", works)
        object.__setattr__(self, "log_probabilities", logs)

    @classmethod
    def from_probabilities(
        cls,
        works: npt.ArrayLike,
        probabilities: npt.ArrayLike,
        direction: Direction = Direction.FORWARD,
        delta_F: float = 0.0,  # noqa: N803
        tolerance: float = MERGE_RTOL,
    ) -> "WorkDistribution":
        probs = np.asarray(probabilities, dtype=float)
        if np.any(probs < 0):
            raise ValueError("Probabilities must be non-negative")
        with np.errstate(divide="ignore"):
            logs = np.log(probs)
        return _merged(np.asarray(works, dtype=float), logs, direction, delta_F, tolerance)

    @property
    def probabilities(self) -> RealVector:
        return np.exp(self.log_probabilities)

    @property
    def support(self) -> list[tuple[float, float]]:
        return [(float(w), float(p)) for w, p in zip(self.works, self.probabilities)]

    def index_of(self, w: float, atol: float | None = None) -> int | None:
        atol = self.tolerance if atol is None else atol
        (hits,) = np.nonzero(np.abs(self.works - w) <= atol)
        return int(hits[0]) if hits.size else None

    def probability_at(self, w: float) -> float:
        idx = self.index_of(w)
        return 0.0 if idx is None else float(self.probabilities[idx])

    def __len__(self) -> int:
        return int(self.works.size)


def _merged(
    works: RealVector,
    log_masses: RealVector,
    direction: Direction,
    delta_f: float,
    tolerance: float,
) -> WorkDistribution:
    """Drop zero-mass entries, sort, and collapse work values closer than *tolerance*."""
    keep = np.isfinite(log_masses)
    works, log_masses = works[keep], log_masses[keep]
    order = np.argsort(works, kind="stable")
    works, log_masses = works[order], log_masses[order]

    merged_w: list[float] = []
    merged_log: list[float] = []
    start = 0
    for stop in range(1, works.size + 1):
        if stop < works.size and works[stop] - works[stop - 1] <= tolerance:
            continue
        merged_w.append(float(np.mean(works[start:stop])))
        merged_log.append(float(logsumexp(log_masses[start:stop])))
        start = stop
    return WorkDistribution(np.array(merged_w), np.array(merged_log), direction, delta_f, tolerance)


def merge_tolerance(*energies: RealVector) -> float:
    """``1e-9`` times the energy scale of the spectra involved."""
    scale = max((float(np.max(np.abs(e))) for e in energies if e.size), default=0.0)
    return MERGE_RTOL * (scale if scale > 0 else 1.0)


def tpm_conditional(u: npt.ArrayLike, h0: npt.ArrayLike, htau: npt.ArrayLike) -> RealVector:
    """
    Transition matrix ``P[m, n] = |<E_m(τ)| U |E_n(0)>|²``.

    Rows are indexed by the final eigenstate, columns by the initial one; for
    unitary *u* the matrix is doubly stochastic.
    """
    unitary = as_matrix(u)
    start, end = hermitian_eig(h0), hermitian_eig(htau)
    if not unitary.shape[0] == start.dim == end.dim:
        raise DimensionMismatch(
            f"U is {unitary.shape[0]}-dimensional, H0 is {start.dim}, Htau is {end.dim}"
        )
    return np.abs(end.eigenvectors.conj().T @ unitary @ start.eigenvectors) ** 2


def tpm_distribution(
    conditional: npt.ArrayLike,
    initial: ThermalState,
    final: ThermalState,
    direction: Direction = Direction.FORWARD,
) -> WorkDistribution:
    """
    Work statistics from a transition matrix and the two Gibbs states.

    Forward: ``P(W) = Σ p_n p_{m|n} δ(W - (E_m - E_n))``. Reversed uses the
    Gibbs weights of the final Hamiltonian and ``p̃_{n|m} = p_{m|n}``.
    """
    cond = np.asarray(conditional, dtype=float)
    with np.errstate(divide="ignore"):
        log_cond = np.log(np.clip(cond, 0.0, None))
    delta_f = final.free_energy - initial.free_energy
    tol = merge_tolerance(initial.energies, final.energies)

    if direction is Direction.FORWARD:
        works = final.energies[:, None] - initial.energies[None, :]
        log_masses = initial.log_probabilities[None, :] + log_cond
    else:
        works = initial.energies[None, :] - final.energies[:, None]
        log_masses = final.log_probabilities[:, None] + log_cond
        delta_f = -delta_f
    return _merged(works.ravel(), log_masses.ravel(), direction, delta_f, tol)


def work_distribution(
    u: npt.ArrayLike,
    h0: npt.ArrayLike,
    htau: npt.ArrayLike,
    beta: float,
    direction: Direction = Direction.FORWARD,
) -> WorkDistribution:
    """TPM work distribution of the unitary *u* between Gibbs states of *h0* and *htau*."""
    initial, final = thermal_state(h0, beta), thermal_state(htau, beta)
    return tpm_distribution(tpm_conditional(u, h0, htau), initial, final, direction)


def protocol_work_distribution(
    protocol: ScheduleLike, beta: float, direction: Direction = Direction.FORWARD
) -> WorkDistribution:
    schedule = as_schedule(protocol)
    u = schedule.forward(schedule.duration, 0.0)
    return work_distribution(
        u, schedule.initial_hamiltonian, schedule.final_hamiltonian, beta, direction
    )


# --------------------------------------------------------------------------- #
# Averages and fluctuation theorems
# --------------------------------------------------------------------------- #


def average_work(p: WorkDistribution) -> float:
    return float(np.sum(p.works * p.probabilities))


def work_moments(p: WorkDistribution, order: int = 2) -> list[float]:
    """Raw moments ``<W^k>`` for ``k = 1..order``."""
    probs = p.probabilities
    return [float(np.sum(p.works**k * probs)) for k in range(1, order + 1)]


def dissipative_work(p: WorkDistribution) -> float:
    """``<W> - ΔF``."""
    return average_work(p) - p.delta_F


def jarzynski_check(p: WorkDistribution, beta: float) -> float:
    """``<e^{-β(W - ΔF)}>``; equals 1 for any unitary-generated distribution."""
    beta = _check_beta(beta)
    return float(np.exp(logsumexp(p.log_probabilities - beta * (p.works - p.delta_F))))


def crooks_check(
    p: WorkDistribution, p_rev: WorkDistribution, beta: float
) -> list[tuple[float, float]]:
    """
    Crooks residuals ``|ln P(W) - ln P̃(-W) - β(W - ΔF)|``.

    Evaluated at every forward support point with ``P(W) > 1e-12``.

    Raises
    ------
    SupportMismatch
        ``-W`` is missing from the reversed support.
    """
    beta = _check_beta(beta)
    atol = max(p.tolerance, p_rev.tolerance)
    residuals: list[tuple[float, float]] = []
    for w, log_p in zip(p.works, p.log_probabilities):
        if log_p <= math.log(_CROOKS_FLOOR):
            continue
        idx = p_rev.index_of(-w, atol)
        if idx is None or not np.isfinite(p_rev.log_probabilities[idx]):
            raise SupportMismatch(
                f"P(W={w:.6g}) = {math.exp(log_p):.3e} but -W is outside the reversed support"
            )
        log_rev = float(p_rev.log_probabilities[idx])
        residuals.append((float(w), abs(log_p - log_rev - beta * (w - p.delta_F))))
    return residuals


def dissipation_relative_entropy(protocol: ScheduleLike, beta: float, t: float) -> float:
    """
    ``S(ρ(t) || Θ†ρ̃(τ - t)Θ)`` in nats; equals ``β <W_diss>`` at every time slice.

    Both legs start in Gibbs states (of ``H_0`` forward, of ``H_τ`` reversed).
    """
    schedule = as_schedule(protocol)
    initial = thermal_state(schedule.initial_hamiltonian, beta).density()
    final = thermal_state(schedule.final_hamiltonian, beta).density()

    rho_t = initial.evolve(schedule.forward(t, 0.0))
    rho_rev = final.evolve(schedule.reversed(schedule.duration - t, 0.0)).conjugate()
    value = relative_entropy(rho_t, rho_rev)
    LOG.debug("S(rho(t) || rho_rev) at t=%r: %r", t, value)
    return value
