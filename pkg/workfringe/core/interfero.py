"""
Mach-Zehnder work interferometer
================================

The system (optionally purified with an environment ``E``) travels along two
paths of an auxiliary qubit ``A``. Path ``|0>`` runs the forward protocol,
path ``|1>`` the time-reversed one followed by ``Θ†``. The fringe visibility
of ``A`` after recombination gives ``sqrt(p_{m|n})`` for pure eigenstate
inputs and the overlap of the purified thermal legs for thermal inputs.

Tensor order of every joint state is ``S ⊗ E ⊗ A`` (``E`` absent for pure
preparations). The visibility is ``V = 2 |<0|ρ_A|1>|``, i.e. the fringe
contrast ``max_φ |p+(φ) - p-(φ)|``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .abstraction import Direction, Role, Subsystem
from .config import ALPHA_FLOOR, PHASE_SCAN_POINTS, STOCHASTIC_ATOL
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidAlpha,
    NonStochasticVisibilities,
    NumericFailure,
)
from .matcore import (
    ComplexMatrix,
    ComplexVector,
    DensityOperator,
    RealVector,
    frobenius_norm,
    hermitian_eig,
    kron,
    partial_trace,
    relative_entropy,
    trace_distance,
    trace_norm,
)
from .protocol import HamiltonianSchedule, ScheduleLike, as_schedule
from .thermo import ThermalState, WorkDistribution, thermal_state, tpm_distribution

LOG = logging.getLogger(__name__)

_CONSISTENCY_ATOL = 1e-10


# --------------------------------------------------------------------------- #
# Modes
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class PureEigenpair:
    """Arm ``|0>`` starts in ``|E_n(0)>``, arm ``|1>`` in ``|E_m(τ)>`` (ascending energy order)."""

    n: int
    m: int


@dataclass(frozen=True)
class ThermalPurified:
    """Both arms start in purified Gibbs states of ``H_0`` and ``H_τ``."""

    beta: float


PreparationMode = PureEigenpair | ThermalPurified


@dataclass(frozen=True)
class SplitHalf:
    """
    Forward ``U(t*, 0)`` on arm ``|0>``, ``Θ†Ũ(τ - t*, 0)`` on arm ``|1>``.

    ``t*`` is the boundary after ``ceil(N/2)`` steps (``τ/2`` for the continuous
    rotation). With ``exact_half`` an odd step count is rejected instead.
    """

    exact_half: bool = False


@dataclass(frozen=True)
class FullForward:
    """Whole protocol ``U(τ, 0)`` on arm ``|0>``; arm ``|1>`` untouched."""


@dataclass(frozen=True)
class FullReversed:
    """Whole reversed protocol ``Θ†Ũ(τ, 0)`` on arm ``|1>``; arm ``|0>`` untouched."""


SchemeMode = SplitHalf | FullForward | FullReversed


def scheme_label(scheme: SchemeMode) -> str:
    if isinstance(scheme, SplitHalf):
        return "split"
    if isinstance(scheme, FullForward):
        return "full"
    return "full-reversed"


# --------------------------------------------------------------------------- #
# Results
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class InterferometerRun:
    """
    Outcome of one interferometer configuration.

    Attributes
    ----------
    visibility : float
        ``2 |<0|ρ_A|1>|`` in ``[0, 1]``.
    port_probabilities : tuple[float, float]
        ``(p+, p-)`` at zero reference phase.
    optimal_port_probabilities : tuple[float, float]
        ``(p+, p-)`` at the phase that maximises the fringe.
    optimal_phase : float
        Reference phase of ``optimal_port_probabilities``.
    ancilla : DensityOperator
        Reduced path state.
    system_marginal : DensityOperator | None
        Reduced system state at the interference time.
    interference_time : float
        Forward time at which both arms are recombined.
    """

    preparation: PreparationMode
    scheme: SchemeMode
    visibility: float
    port_probabilities: tuple[float, float]
    optimal_port_probabilities: tuple[float, float]
    optimal_phase: float
    ancilla: DensityOperator
    system_marginal: DensityOperator | None
    interference_time: float

    @property
    def fringe(self) -> float:
        p_plus, p_minus = self.optimal_port_probabilities
        return abs(p_plus - p_minus)


@dataclass(frozen=True)
class ComplementarityReport:
    v_squared: float
    d_joint_squared: float
    d_marginal_squared: float

    @property
    def joint_sum(self) -> float:
        return self.v_squared + self.d_joint_squared

    @property
    def marginal_sum(self) -> float:
        return self.v_squared + self.d_marginal_squared


@dataclass(frozen=True)
class DissipationBounds:
    """Quadratic and logarithmic upper bounds on ``<W_diss>`` (energy units)."""

    b2: float
    blog: float
    alpha: float
    log_alpha: float
    visibility: float
    assumes_equality: bool = False


@dataclass(frozen=True)
class RelativeEntropyBounds:
    """Chain ``S <= ||ρ-σ||₂²/α <= ||ρ-σ||₁²/α`` and ``S <= D log(d²/α) + 1/e``."""

    relative_entropy: float
    frobenius_bound: float
    trace_bound: float
    log_bound: float
    alpha: float


# --------------------------------------------------------------------------- #
# Ports
# --------------------------------------------------------------------------- #


def port_probabilities(ancilla: DensityOperator, phase: float = 0.0) -> tuple[float, float]:
    """Outcomes of measuring ``A`` in ``(|0> ± e^{iφ}|1>)/√2``."""
    coherence = complex(ancilla.matrix[0, 1])
    swing = float(np.real(np.exp(1j * phase) * coherence))
    return 0.5 + swing, 0.5 - swing


def _scan_fringe(ancilla: DensityOperator) -> tuple[float, float]:
    """Coarse phase scan refined analytically; returns ``(phase, contrast)``."""
    phases = np.linspace(0.0, 2 * np.pi, PHASE_SCAN_POINTS, endpoint=False)
    coherence = complex(ancilla.matrix[0, 1])
    contrast = np.abs(2 * np.real(np.exp(1j * phases) * coherence))
    best = int(np.argmax(contrast))
    candidates = [(float(phases[best]), float(contrast[best]))]
    if coherence != 0:
        # p+ - p- = 2|c| cos(φ + arg c) peaks at φ = -arg c
        refined = -math.atan2(coherence.imag, coherence.real)
        p_plus, p_minus = port_probabilities(ancilla, refined)
        candidates.append((refined, abs(p_plus - p_minus)))
    return max(candidates, key=lambda item: item[1])


# --------------------------------------------------------------------------- #
# Purification and arms
# --------------------------------------------------------------------------- #


def aligned_final_basis(
    h0: npt.ArrayLike, htau: npt.ArrayLike
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """
    Eigenbases of *h0* and *htau* with ``<E_n(τ)|E_n(0)> >= 0`` for every ``n``.

    Falls back to the eigensolver phase when an overlap vanishes.
    """
    start = hermitian_eig(h0).eigenvectors
    end = np.array(hermitian_eig(htau).eigenvectors)
    if start.shape != end.shape:
        raise DimensionMismatch(f"H0 is {start.shape[0]}-dimensional, Htau is {end.shape[0]}")
    overlaps = np.einsum("in,in->n", end.conj(), start)
    for k, overlap in enumerate(overlaps):
        if abs(overlap) > 1e-12:
            end[:, k] *= overlap / abs(overlap)
    return start, end


def canonical_purification(
    h0: npt.ArrayLike, htau: npt.ArrayLike, beta: float
) -> tuple[ComplexVector, ComplexVector]:
    """
    Index-matched purifications on ``S ⊗ E``.

    ``|ψ> = Σ √p_n |E_n(0)>|n>`` and ``|ψ̃> = Σ √p̃_n |E_n(τ)>|n>`` with the
    same environment labels on both legs.
    """
    start, end = aligned_final_basis(h0, htau)
    weights = np.sqrt(thermal_state(h0, beta).probabilities)
    weights_rev = np.sqrt(thermal_state(htau, beta).probabilities)
    labels = np.eye(start.shape[0], dtype=complex)
    psi = sum(w * np.kron(start[:, k], labels[k]) for k, w in enumerate(weights))
    psi_rev = sum(w * np.kron(end[:, k], labels[k]) for k, w in enumerate(weights_rev))
    return np.asarray(psi, dtype=complex), np.asarray(psi_rev, dtype=complex)


def _interference_time(schedule: HamiltonianSchedule, scheme: SchemeMode) -> float:
    if isinstance(scheme, SplitHalf):
        return schedule.split_time(scheme.exact_half)
    if isinstance(scheme, FullForward):
        return schedule.duration
    return 0.0


def _arms(
    schedule: HamiltonianSchedule,
    scheme: SchemeMode,
    start: ComplexVector,
    target: ComplexVector,
) -> tuple[ComplexVector, ComplexVector, float]:
    """Propagate the two arm states; extra (environment) factors ride along untouched."""
    t_split = _interference_time(schedule, scheme)
    extra = start.shape[0] // schedule.dimension
    identity = np.eye(extra, dtype=complex)

    forward = schedule.forward(t_split, 0.0)
    arm0 = kron(forward, identity) @ start
    if isinstance(scheme, FullForward):
        return arm0, target, t_split
    backward = schedule.reversed(schedule.duration - t_split, 0.0)
    # Θ† acts on the system; environment labels are real
    arm1 = np.conj(kron(backward, identity) @ target)
    return arm0, arm1, t_split


def _recombine(
    arm0: ComplexVector,
    arm1: ComplexVector,
    preparation: PreparationMode,
    scheme: SchemeMode,
    system_dim: int,
    t_split: float,
) -> InterferometerRun:
    path = np.eye(2, dtype=complex)
    joint_vector = (np.kron(arm0, path[0]) + np.kron(arm1, path[1])) / math.sqrt(2)
    joint = DensityOperator.pure(joint_vector, Role.JOINT)

    body = arm0.shape[0]
    ancilla = partial_trace(joint, Subsystem.B, (body, 2), Role.AUXILIARY)
    body_state = partial_trace(joint, Subsystem.A, (body, 2), Role.JOINT)
    system = partial_trace(body_state, Subsystem.A, (system_dim, body // system_dim))

    visibility = min(2 * abs(complex(ancilla.matrix[0, 1])), 1.0)
    phase, contrast = _scan_fringe(ancilla)
    if abs(contrast - visibility) > _CONSISTENCY_ATOL:
        raise NumericFailure(
            f"Fringe contrast {contrast!r} disagrees with coherence {visibility!r}"
        )

    ports = port_probabilities(ancilla)
    if abs(sum(ports) - 1) > 1e-12:
        raise NumericFailure(f"Port probabilities {ports} do not sum to 1")
    return InterferometerRun(
        preparation=preparation,
        scheme=scheme,
        visibility=visibility,
        port_probabilities=ports,
        optimal_port_probabilities=port_probabilities(ancilla, phase),
        optimal_phase=phase,
        ancilla=ancilla,
        system_marginal=system,
        interference_time=t_split,
    )


# --------------------------------------------------------------------------- #
# Runs
# --------------------------------------------------------------------------- #


def run_pure(protocol: ScheduleLike, scheme: SchemeMode, n: int, m: int) -> InterferometerRun:
    """
    Interfere ``|E_n(0)>`` (forward arm) with ``|E_m(τ)>`` (reversed arm).

    ``V² = p_{m|n}`` for every scheme mode.

    Raises
    ------
    IndexOutOfRange
        *n* or *m* outside ``0..d-1``.
    OddSplitBoundary
        ``SplitHalf(exact_half=True)`` on a schedule with no boundary at ``τ/2``.
    """
    schedule = as_schedule(protocol)
    d = schedule.dimension
    for label, idx in (("n", n), ("m", m)):
        if not 0 <= idx < d:
            raise IndexOutOfRange(f"{label}={idx} outside 0..{d - 1}")
    start, end = aligned_final_basis(schedule.initial_hamiltonian, schedule.final_hamiltonian)
    arm0, arm1, t_split = _arms(schedule, scheme, start[:, n], end[:, m])
    return _recombine(arm0, arm1, PureEigenpair(n, m), scheme, d, t_split)


def run_thermal(protocol: ScheduleLike, scheme: SchemeMode, beta: float) -> InterferometerRun:
    """
    Interfere the canonical purifications of both Gibbs states.

    ``V = |<ψ̃| U(τ, 0) ⊗ 1_E |ψ>|``, independent of the scheme mode.
    """
    schedule = as_schedule(protocol)
    psi, psi_rev = canonical_purification(
        schedule.initial_hamiltonian, schedule.final_hamiltonian, beta
    )
    arm0, arm1, t_split = _arms(schedule, scheme, psi, psi_rev)
    run = _recombine(arm0, arm1, ThermalPurified(beta), scheme, schedule.dimension, t_split)
    LOG.debug("thermal run beta=%r scheme=%s: V=%r", beta, scheme_label(scheme), run.visibility)
    return run


def run_interferometer(
    protocol: ScheduleLike, scheme: SchemeMode, preparation: PreparationMode
) -> InterferometerRun:
    if isinstance(preparation, PureEigenpair):
        return run_pure(protocol, scheme, preparation.n, preparation.m)
    return run_thermal(protocol, scheme, preparation.beta)


def visibility_matrix(protocol: ScheduleLike, scheme: SchemeMode) -> RealVector:
    """All pure-eigenpair visibilities, ``V[m, n]``."""
    schedule = as_schedule(protocol)
    d = schedule.dimension
    out = np.zeros((d, d))
    for n in range(d):
        for m in range(d):
            out[m, n] = run_pure(schedule, scheme, n, m).visibility
    return out


def complete_visibilities(partial: npt.ArrayLike) -> RealVector:
    """
    Rebuild the full ``d × d`` visibility matrix from its leading ``(d-1) × (d-1)`` block.

    Uses double stochasticity of ``V²``; only ``(d-1)²`` preparations are needed.
    """
    block = np.asarray(partial, dtype=float) ** 2
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise DimensionMismatch(f"Expected a square block, got shape {block.shape}")
    d = block.shape[0] + 1
    full = np.zeros((d, d))
    full[:-1, :-1] = block
    full[:-1, -1] = 1 - block.sum(axis=1)
    full[-1, :-1] = 1 - block.sum(axis=0)
    full[-1, -1] = 1 - full[-1, :-1].sum()
    if np.min(full) < -STOCHASTIC_ATOL:
        raise NonStochasticVisibilities(
            f"Partial visibilities overfill a row or column (min entry {np.min(full):.3e})"
        )
    return np.sqrt(np.clip(full, 0.0, None))


# --------------------------------------------------------------------------- #
# Limited preparation: detectors, complementarity, bounds
# --------------------------------------------------------------------------- #


def detector_states(
    protocol: ScheduleLike, beta: float, scheme: SchemeMode | None = None
) -> tuple[DensityOperator, DensityOperator]:
    """
    Which-path detector states ``ρ_SE(+)`` and ``ρ_SE(-)`` at the interference time.

    Their system marginals are ``ρ_S(t*)`` and ``Θ†ρ̃_S(τ - t*)Θ``.
    """
    schedule = as_schedule(protocol)
    scheme = SplitHalf() if scheme is None else scheme
    psi, psi_rev = canonical_purification(
        schedule.initial_hamiltonian, schedule.final_hamiltonian, beta
    )
    arm0, arm1, _ = _arms(schedule, scheme, psi, psi_rev)
    return DensityOperator.pure(arm0, Role.JOINT), DensityOperator.pure(arm1, Role.JOINT)


def detector_marginals(
    detectors: tuple[DensityOperator, DensityOperator],
) -> tuple[DensityOperator, DensityOperator]:
    plus, minus = detectors
    d = math.isqrt(plus.dim)
    return (
        partial_trace(plus, Subsystem.A, (d, d)),
        partial_trace(minus, Subsystem.A, (d, d)),
    )


def complementarity_report(
    run: InterferometerRun, detectors: tuple[DensityOperator, DensityOperator]
) -> ComplementarityReport:
    """``(V², D²_joint, D²_marginal)``; the joint pair sums to 1 for pure detectors."""
    plus, minus = detectors
    d_joint = min(0.5 * trace_norm(plus.matrix - minus.matrix), 1.0)
    d_marginal = trace_distance(*detector_marginals(detectors))
    return ComplementarityReport(run.visibility**2, d_joint**2, d_marginal**2)


def dissipation_bounds(
    run: InterferometerRun,
    beta: float,
    htau: npt.ArrayLike,
    d: int | None = None,
    *,
    d_marginal: float | None = None,
    allow_underflow: bool = False,
) -> DissipationBounds:
    """
    Upper bounds on the average dissipative work from a thermal visibility.

    Parameters
    ----------
    run : InterferometerRun
        Thermal interferometer run.
    beta : float
        Inverse temperature of both legs.
    htau : array-like
        Final Hamiltonian; fixes ``α = e^{-β(E_max - F_τ)}``.
    d : int | None
        Hilbert-space dimension, defaults to that of *htau*.
    d_marginal : float | None
        When given, the partial-trace inequality is taken as an equality and
        ``V² = 1 - d_marginal²`` replaces the measured visibility.
    allow_underflow : bool
        Report ``B₂ = inf`` instead of raising when α underflows.

    Returns
    -------
    DissipationBounds
        ``B₂ = 4(1 - V²) / (β α)``, ``B_log = [√(1 - V²) log(d²/α) + 1/e] / β``.

    Raises
    ------
    InvalidAlpha
        α at or below ``1e-300`` and *allow_underflow* is off.
    """
    final: ThermalState = thermal_state(htau, beta)
    dim = final.energies.shape[0] if d is None else d
    log_alpha = float(np.min(final.log_probabilities))
    alpha = math.exp(log_alpha)

    v_squared = run.visibility**2 if d_marginal is None else 1.0 - d_marginal**2
    deficit = max(1.0 - v_squared, 0.0)
    kt = 1.0 / final.beta

    if alpha <= ALPHA_FLOOR:
        if not allow_underflow:
            raise InvalidAlpha(f"alpha = exp({log_alpha:.6g}) underflows the quadratic bound")
        LOG.warning("alpha = exp(%.6g) underflows; B2 reported as inf", log_alpha)
        b2 = math.inf
    else:
        b2 = kt * 4 * deficit / alpha
    blog = kt * (math.sqrt(deficit) * (2 * math.log(dim) - log_alpha) + math.exp(-1))
    return DissipationBounds(
        b2, blog, alpha, log_alpha, math.sqrt(max(v_squared, 0.0)), d_marginal is not None
    )


def relative_entropy_bounds(
    rho: DensityOperator, sigma: DensityOperator
) -> RelativeEntropyBounds:
    """Evaluate both relative-entropy bounds on explicit, strictly positive states."""
    spectrum = sigma.eigen()
    log_alpha = float(np.min(spectrum.logs()))
    alpha = math.exp(log_alpha)
    if alpha <= ALPHA_FLOOR:
        raise InvalidAlpha(f"sigma is not strictly positive (alpha = {alpha:.3e})")
    diff = rho.matrix - sigma.matrix
    distance = trace_distance(rho, sigma)
    return RelativeEntropyBounds(
        relative_entropy=relative_entropy(rho, sigma),
        frobenius_bound=frobenius_norm(diff) ** 2 / alpha,
        trace_bound=trace_norm(diff) ** 2 / alpha,
        log_bound=distance * (2 * math.log(sigma.dim) - log_alpha) + math.exp(-1),
        alpha=alpha,
    )


# --------------------------------------------------------------------------- #
# Reconstruction from visibilities
# --------------------------------------------------------------------------- #


def _squared_visibilities(visibilities: npt.ArrayLike, direction: Direction) -> RealVector:
    squared = np.asarray(visibilities, dtype=float) ** 2
    if squared.ndim != 2 or squared.shape[0] != squared.shape[1]:
        raise DimensionMismatch(f"Expected a square visibility matrix, got {squared.shape}")
    column_error = float(np.max(np.abs(squared.sum(axis=0) - 1)))
    if column_error > STOCHASTIC_ATOL:
        raise NonStochasticVisibilities(f"Σ_m V²[m, n] deviates from 1 by {column_error:.3e}")
    if direction is Direction.REVERSED:
        row_error = float(np.max(np.abs(squared.sum(axis=1) - 1)))
        if row_error > STOCHASTIC_ATOL:
            raise NonStochasticVisibilities(f"Σ_n V²[m, n] deviates from 1 by {row_error:.3e}")
        # reversed masses are p̃_m V²[m, n], so each row must sum to exactly 1
        return squared / squared.sum(axis=1, keepdims=True)
    return squared / squared.sum(axis=0, keepdims=True)


def reconstruct_work_distribution(
    visibilities: npt.ArrayLike,
    h0: npt.ArrayLike,
    htau: npt.ArrayLike,
    beta: float,
    direction: Direction = Direction.FORWARD,
) -> WorkDistribution:
    """``P(W) = Σ p_n V²[m, n] δ(W - (E_m(τ) - E_n(0)))`` (or its reversed twin)."""
    squared = _squared_visibilities(visibilities, direction)
    return tpm_distribution(squared, thermal_state(h0, beta), thermal_state(htau, beta), direction)


def reconstruct_dissipation(
    visibilities: npt.ArrayLike, h0: npt.ArrayLike, htau: npt.ArrayLike, beta: float
) -> float:
    """``β <W_diss> = Σ p_n ln p_n - Σ p_n V²[m, n] ln p̃_m`` in nats."""
    squared = _squared_visibilities(visibilities, Direction.FORWARD)
    initial, final = thermal_state(h0, beta), thermal_state(htau, beta)
    p, log_p = initial.probabilities, initial.log_probabilities
    cross = np.sum(squared * p[None, :] * final.log_probabilities[:, None])
    return float(np.sum(p * log_p) - cross)
