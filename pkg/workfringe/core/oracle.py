"""
Brute-force cross-checks
========================

Every routine here recomputes its quantity along a route that shares no code
with the primary modules: propagators come from closed-form qubit rotations or
:func:`scipy.linalg.expm`, spectra from :func:`scipy.linalg.eigh`, and
Gibbs weights, work merging and partial traces are coded again locally. The
result types of the primary modules are reused only as containers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np
import scipy.linalg

from .abstraction import Direction, Role
from .config import REFERENCE_TAU, GridPoint
from .interfero import (
    FullForward,
    FullReversed,
    InterferometerRun,
    PreparationMode,
    PureEigenpair,
    SchemeMode,
    SplitHalf,
    ThermalPurified,
    complementarity_report,
    detector_states,
    reconstruct_dissipation,
    reconstruct_work_distribution,
    run_thermal,
    visibility_matrix,
)
from .matcore import DensityOperator
from .protocol import QubitRotationProtocol, StepSchedule, continuous_unitary
from .thermo import (
    WorkDistribution,
    crooks_check,
    dissipation_relative_entropy,
    dissipative_work,
    jarzynski_check,
    protocol_work_distribution,
)

LOG = logging.getLogger(__name__)

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# --------------------------------------------------------------------------- #
# Reports
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class OracleReport:
    """Maximum deviation of one check against its pass threshold."""

    name: str
    deviation: float
    threshold: float
    context: str = ""

    def __post_init__(self) -> None:
        if self.deviation < 0:
            raise ValueError(f"Deviation must be >= 0, got {self.deviation!r}")

    @property
    def passed(self) -> bool:
        # NaN never passes
        return bool(self.deviation <= self.threshold)


def _worst(name: str, threshold: float, values: Iterable[tuple[float, str]]) -> OracleReport:
    deviation, context = 0.0, ""
    for value, where in values:
        if math.isnan(value) or value > deviation:
            deviation, context = value, where
            if math.isnan(value):
                break
    return OracleReport(name, deviation, threshold, context)


# --------------------------------------------------------------------------- #
# Independent model of a protocol
# --------------------------------------------------------------------------- #


def _rotation(omega: float, lam: float) -> np.ndarray:
    return 0.5 * omega * (np.eye(2) + math.cos(lam) * _PAULI_Z + math.sin(lam) * _PAULI_X)


def _qubit_step(omega: float, lam: float, dt: float) -> np.ndarray:
    """``e^{-iH(Λ)Δt} = e^{-iωΔt/2}[cos(ωΔt/2) - i sin(ωΔt/2) d·σ]``."""
    half = omega * dt / 2
    axis = math.sin(lam) * _PAULI_X + math.cos(lam) * _PAULI_Z
    return np.exp(-1j * half) * (math.cos(half) * np.eye(2) - 1j * math.sin(half) * axis)


class _Model:
    """Hamiltonians and step propagators of a protocol, rebuilt from its parameters."""

    def __init__(self, protocol: QubitRotationProtocol | StepSchedule):
        self.continuous = False
        if isinstance(protocol, QubitRotationProtocol):
            self.omega, self.tau = protocol.omega, protocol.tau
            self.rate = math.pi / (2 * protocol.tau)
            self.h0 = _rotation(self.omega, 0.0)
            self.htau = _rotation(self.omega, math.pi / 2)
            if protocol.steps is None:
                self.continuous = True
                self.forward_steps: list[np.ndarray] = []
                self.reversed_steps: list[np.ndarray] = []
                self.durations: list[float] = []
                return
            n, dt = protocol.steps, protocol.tau / protocol.steps
            self.durations = [dt] * n
            lambdas = [k * math.pi / (2 * n) for k in range(1, n + 1)]
            self.forward_steps = [_qubit_step(self.omega, lam, dt) for lam in lambdas]
            self.reversed_steps = [_qubit_step(self.omega, lam, dt) for lam in lambdas[::-1]]
        else:
            self.h0 = np.array(protocol.initial_hamiltonian)
            self.htau = np.array(protocol.final_hamiltonian)
            self.tau = float(sum(protocol.durations))
            self.durations = list(protocol.durations)
            pairs = list(zip(protocol.generators, protocol.durations))
            self.forward_steps = [scipy.linalg.expm(-1j * h * dt) for h, dt in pairs]
            self.reversed_steps = [
                scipy.linalg.expm(-1j * np.conj(h) * dt) for h, dt in pairs[::-1]
            ]

    @property
    def n_steps(self) -> int:
        return len(self.forward_steps)

    @property
    def dim(self) -> int:
        return int(self.h0.shape[0])

    @staticmethod
    def _count(t: float, durations: list[float]) -> int:
        """Number of steps completed at the boundary nearest to *t*."""
        edges = np.concatenate(([0.0], np.cumsum(durations)))
        return int(np.argmin(np.abs(edges - t)))

    @staticmethod
    def _fold(steps: list[np.ndarray], count: int, dim: int) -> np.ndarray:
        out = np.eye(dim, dtype=complex)
        for step in steps[:count]:
            out = step @ out
        return out

    def _frame(self, lam: float) -> np.ndarray:
        return scipy.linalg.expm(-0.5j * lam * _PAULI_Y)

    def forward(self, t: float) -> np.ndarray:
        """``U(t, 0)``; discrete *t* snaps to the nearest step boundary."""
        if self.continuous:
            generator = 0.5 * (self.omega * (np.eye(2) + _PAULI_Z) - self.rate * _PAULI_Y)
            return self._frame(self.rate * t) @ scipy.linalg.expm(-1j * generator * t)
        return self._fold(self.forward_steps, self._count(t, self.durations), self.dim)

    def reversed(self, t: float) -> np.ndarray:
        """``Ũ(t, 0)`` of the reversed protocol."""
        if self.continuous:
            generator = 0.5 * (self.omega * (np.eye(2) + _PAULI_Z) + self.rate * _PAULI_Y)
            return (
                self._frame(math.pi / 2 - self.rate * t)
                @ scipy.linalg.expm(-1j * generator * t)
                @ self._frame(math.pi / 2).conj().T
            )
        count = self._count(t, self.durations[::-1])
        return self._fold(self.reversed_steps, count, self.dim)

    def boundaries(self) -> list[float]:
        if self.continuous:
            return [self.tau * q for q in (0.0, 0.25, 0.5, 0.75, 1.0)]
        return [float(t) for t in np.concatenate(([0.0], np.cumsum(self.durations)))]

    def split(self) -> float:
        if self.continuous:
            return self.tau / 2
        return self.boundaries()[math.ceil(self.n_steps / 2)]


def _spectrum(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values, vectors = scipy.linalg.eigh(np.real_if_close(h))
    return values, np.asarray(vectors, dtype=complex)


def _gibbs(energies: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Log-weights and free energy, shifted by the ground energy."""
    shifted = -beta * (energies - energies.min())
    log_z = math.log(float(np.sum(np.exp(shifted))))
    free = float(energies.min()) - log_z / beta
    return shifted - log_z, free


def _phase_matched(start: np.ndarray, end: np.ndarray) -> np.ndarray:
    end = end.copy()
    for k in range(end.shape[1]):
        overlap = np.vdot(end[:, k], start[:, k])
        if abs(overlap) > 1e-12:
            end[:, k] = end[:, k] * overlap / abs(overlap)
    return end


# --------------------------------------------------------------------------- #
# Oracles
# --------------------------------------------------------------------------- #


def tpm_direct(
    protocol: QubitRotationProtocol | StepSchedule,
    beta: float,
    direction: Direction = Direction.FORWARD,
) -> WorkDistribution:
    """Two-point-measurement statistics by explicit enumeration over ``(n, m)``."""
    model = _Model(protocol)
    u = model.forward(model.tau)
    e0, v0 = _spectrum(model.h0)
    e1, v1 = _spectrum(model.htau)
    log_p0, f0 = _gibbs(e0, beta)
    log_p1, f1 = _gibbs(e1, beta)

    entries: list[tuple[float, float]] = []
    for n in range(model.dim):
        for m in range(model.dim):
            amplitude = np.vdot(v1[:, m], u @ v0[:, n])
            mass = abs(amplitude) ** 2
            if mass == 0:
                continue
            if direction is Direction.FORWARD:
                entries.append((e1[m] - e0[n], log_p0[n] + math.log(mass)))
            else:
                entries.append((e0[n] - e1[m], log_p1[m] + math.log(mass)))
    entries.sort()

    scale = max(float(np.max(np.abs(e0))), float(np.max(np.abs(e1))), 0.0) or 1.0
    tol = 1e-9 * scale
    works: list[float] = []
    logs: list[float] = []
    group: list[tuple[float, float]] = []
    for entry in entries + [(math.inf, -math.inf)]:
        if group and entry[0] - group[-1][0] > tol:
            ws, ls = zip(*group)
            peak = max(ls)
            works.append(sum(ws) / len(ws))
            logs.append(peak + math.log(sum(math.exp(x - peak) for x in ls)))
            group = []
        group.append(entry)
    delta_f = f1 - f0 if direction is Direction.FORWARD else f0 - f1
    return WorkDistribution(np.array(works), np.array(logs), direction, delta_f, tol)


def _reduce_to_path(joint: np.ndarray, body: int) -> np.ndarray:
    blocks = np.outer(joint, joint.conj()).reshape(body, 2, body, 2)
    return np.einsum("iaib->ab", blocks)


def full_joint_simulation(
    protocol: QubitRotationProtocol | StepSchedule,
    preparation: PreparationMode,
    scheme: SchemeMode,
) -> InterferometerRun:
    """
    Explicit ``S ⊗ E ⊗ A`` simulation with one arm-controlled global unitary.

    Inputs are real, so the anti-unitary ``Θ†`` on arm ``|1>`` reduces to the
    conjugated reversed propagator ``conj(Ũ)``.
    """
    model = _Model(protocol)
    d = model.dim
    e0, v0 = _spectrum(model.h0)
    e1, v1 = _spectrum(model.htau)
    v1 = _phase_matched(v0, v1)

    if isinstance(preparation, PureEigenpair):
        psi, psi_rev, env = v0[:, preparation.n], v1[:, preparation.m], 1
    else:
        log_p0, _ = _gibbs(e0, preparation.beta)
        log_p1, _ = _gibbs(e1, preparation.beta)
        labels = np.eye(d)
        psi = sum(math.exp(lp / 2) * np.kron(v0[:, k], labels[k]) for k, lp in enumerate(log_p0))
        psi_rev = sum(
            math.exp(lp / 2) * np.kron(v1[:, k], labels[k]) for k, lp in enumerate(log_p1)
        )
        env = d

    if isinstance(scheme, FullForward):
        t_split = model.tau
        arm0, arm1 = model.forward(model.tau), np.eye(d)
    elif isinstance(scheme, FullReversed):
        t_split = 0.0
        arm0, arm1 = np.eye(d), np.conj(model.reversed(model.tau))
    else:
        t_split = model.split()
        arm0, arm1 = model.forward(t_split), np.conj(model.reversed(model.tau - t_split))

    project = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    identity_env = np.eye(env)
    controlled = np.kron(np.kron(arm0, identity_env), project[0]) + np.kron(
        np.kron(arm1, identity_env), project[1]
    )
    path = np.eye(2)
    initial = (np.kron(psi, path[0]) + np.kron(psi_rev, path[1])) / math.sqrt(2)
    final = controlled @ initial

    rho_path = _reduce_to_path(final, d * env)
    coherence = complex(rho_path[0, 1])
    phase = -math.atan2(coherence.imag, coherence.real) if coherence != 0 else 0.0
    swing0 = coherence.real
    swing = abs(coherence)
    return InterferometerRun(
        preparation=preparation,
        scheme=scheme,
        visibility=min(2 * abs(coherence), 1.0),
        port_probabilities=(0.5 + swing0, 0.5 - swing0),
        optimal_port_probabilities=(0.5 + swing, 0.5 - swing),
        optimal_phase=phase,
        ancilla=DensityOperator(rho_path, Role.AUXILIARY),
        system_marginal=None,
        interference_time=t_split,
    )


def microreversibility_audit(
    protocol: QubitRotationProtocol | StepSchedule, corrupt_step: int | None = None
) -> OracleReport:
    """
    ``Θ†Ũ(τ - t, 0)Θ = U†(τ, t)`` at every boundary.

    ``U`` comes from the primary schedule (optionally with one corrupted step),
    ``Ũ`` is re-simulated here from the clean Hamiltonians.
    """
    schedule = protocol.schedule() if isinstance(protocol, QubitRotationProtocol) else protocol
    if corrupt_step is not None:
        if not isinstance(schedule, StepSchedule):
            raise ValueError("Only step schedules can be corrupted")
        schedule = schedule.with_corrupted_step(corrupt_step)
    model = _Model(protocol)

    def deviations() -> Iterator[tuple[float, str]]:
        for t in model.boundaries():
            expected = np.conj(model.reversed(model.tau - t))
            actual = schedule.forward(model.tau, t).conj().T
            yield float(np.max(np.abs(expected - actual))), f"t={t:.6g}"

    return _worst("microreversibility", 1e-10, deviations())


def _analytic_rotation_state(omega: float, rate: float, plus: bool, t: float) -> np.ndarray:
    """Co-rotating-frame closed form for an ``|z±>`` start, written out in the z basis."""
    r = math.hypot(omega, rate)
    xi = math.atan2(omega, -rate)
    c, s = math.cos(xi / 2), math.sin(xi / 2)
    root2 = math.sqrt(2)
    if plus:
        c1, c2 = (c + s) / root2, (c - s) / root2
    else:
        c1, c2 = -1j * (c - s) / root2, 1j * (s + c) / root2
    a = (c1 * np.exp(-0.5j * r * t) * c - c2 * np.exp(0.5j * r * t) * s) * np.exp(-0.5j * rate * t)
    b = (c1 * np.exp(-0.5j * r * t) * s + c2 * np.exp(0.5j * r * t) * c) * np.exp(0.5j * rate * t)
    # |y±> = (|z+> ± i|z->)/√2
    return np.array([a + b, 1j * (a - b)], dtype=complex) / root2


def closed_form_final_state(protocol: QubitRotationProtocol, beta: float) -> np.ndarray:
    """Gibbs mixture of the two closed-form trajectories at ``t = τ``."""
    rate = math.pi / (2 * protocol.tau)
    energies = np.array([protocol.omega, 0.0])  # |z+>, |z->
    log_p, _ = _gibbs(energies, beta)
    rho = np.zeros((2, 2), dtype=complex)
    for plus, lp in zip((True, False), log_p):
        psi = _analytic_rotation_state(protocol.omega, rate, plus, protocol.tau)
        rho += math.exp(lp) * np.outer(psi, psi.conj())
    return rho


def closed_form_audit(protocol: QubitRotationProtocol, beta: float = 1.2) -> OracleReport:
    """Closed-form thermal evolution vs ``U(τ, 0) ρ₀ U†(τ, 0)`` of the primary propagator."""
    continuous = QubitRotationProtocol(protocol.omega, protocol.tau, None)
    analytic = closed_form_final_state(continuous, beta)

    energies = np.array([continuous.omega, 0.0])
    log_p, _ = _gibbs(energies, beta)
    rho0 = np.diag(np.exp(log_p)).astype(complex)
    u = continuous_unitary(continuous, continuous.tau)
    numeric = u @ rho0 @ u.conj().T

    distance = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(analytic - numeric))))
    return OracleReport("closed-form", distance, 1e-10, f"ω/Ω={continuous.ratio:g}")


# --------------------------------------------------------------------------- #
# Grid audit
# --------------------------------------------------------------------------- #

_THRESHOLDS = {
    "closed-form": 1e-10,
    "complementarity": 1e-10,
    "crooks": 1e-9,
    "dissipation-identity": 1e-10,
    "jarzynski": 1e-10,
    "joint-simulation": 1e-12,
    "microreversibility": 1e-10,
    "reconstruction": 1e-10,
    "scheme-equivalence": 1e-12,
}


def audit_point(
    point: GridPoint, corrupt: bool = False, tau: float = REFERENCE_TAU
) -> dict[str, float]:
    """Every check at one grid point; returns ``{check name: deviation}``."""
    protocol = QubitRotationProtocol.from_ratio(point.omega_over_Omega, tau, point.steps)
    beta = point.beta / protocol.Omega
    schedule = protocol.schedule()
    h0, htau = schedule.initial_hamiltonian, schedule.final_hamiltonian
    out: dict[str, float] = {}

    forward = protocol_work_distribution(schedule, beta)
    backward = protocol_work_distribution(schedule, beta, Direction.REVERSED)
    out["jarzynski"] = abs(jarzynski_check(forward, beta) - 1)
    out["crooks"] = max((res for _, res in crooks_check(forward, backward, beta)), default=0.0)

    split = visibility_matrix(schedule, SplitHalf())
    full = visibility_matrix(schedule, FullForward())
    out["scheme-equivalence"] = float(np.max(np.abs(split**2 - full**2)))

    reference = tpm_direct(protocol, beta)
    rebuilt = reconstruct_work_distribution(split, h0, htau, beta)
    out["reconstruction"] = _distribution_gap(rebuilt, reference)

    tpm_value = beta * dissipative_work(forward)
    values = [dissipation_relative_entropy(schedule, beta, t) for t in schedule.checkpoints()]
    values += [reconstruct_dissipation(split, h0, htau, beta), tpm_value]
    out["dissipation-identity"] = max(values) - min(values)

    thermal = run_thermal(schedule, SplitHalf(), beta)
    report = complementarity_report(thermal, detector_states(schedule, beta))
    excess = max(report.marginal_sum - 1.0, 0.0)
    out["complementarity"] = max(abs(report.joint_sum - 1.0), excess)
    joint = full_joint_simulation(protocol, ThermalPurified(beta), SplitHalf())
    out["joint-simulation"] = abs(joint.visibility - thermal.visibility)

    corrupt_step = None
    if corrupt and protocol.steps is not None:
        corrupt_step = math.ceil(protocol.steps / 2) - 1
    out["microreversibility"] = microreversibility_audit(protocol, corrupt_step).deviation
    out["closed-form"] = closed_form_audit(protocol, beta).deviation
    return out


def _distribution_gap(a: WorkDistribution, b: WorkDistribution) -> float:
    """Largest mass difference over the union of both supports."""
    gap = 0.0
    for w, p in a.support:
        gap = max(gap, abs(p - b.probability_at(w)))
    for w, p in b.support:
        gap = max(gap, abs(p - a.probability_at(w)))
    return gap


def run_audits(
    points: Iterable[GridPoint],
    corrupt: bool = False,
    mapper: Callable[..., Iterable[dict[str, float]]] = map,
    tau: float = REFERENCE_TAU,
) -> list[OracleReport]:
    """Aggregate every check over *points* into reports sorted by check name."""
    grid = list(points)
    results = list(mapper(lambda p: audit_point(p, corrupt, tau), grid))
    reports = []
    for name in sorted(_THRESHOLDS):
        values = ((res[name], _describe(p)) for p, res in zip(grid, results))
        reports.append(_worst(name, _THRESHOLDS[name], values))
    return reports


def _describe(point: GridPoint) -> str:
    steps = "continuous" if point.steps is None else str(point.steps)
    return f"β={point.beta:g} ω/Ω={point.omega_over_Omega:g} N={steps}"

