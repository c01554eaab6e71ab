import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from workfringe.core.abstraction import ZState
from workfringe.core.config import REFERENCE_TAU
from workfringe.core.errors import (
    ContinuousModeRequested,
    DimensionMismatch,
    DiscreteModeRequested,
    IndexOutOfRange,
    NonBoundaryTime,
    NonHermitianInput,
    OddSplitBoundary,
)
from workfringe.core.matcore import DensityOperator, hermitian_eig, is_unitary
from workfringe.core.protocol import (
    Z_MINUS,
    Z_PLUS,
    QubitRotationProtocol,
    RotationSchedule,
    StepSchedule,
    closed_form_state,
    apply_time_reversal,
    continuous_reversed_unitary,
    continuous_unitary,
    custom_schedule,
    forward_unitary,
    hamiltonian_at,
    retardance,
    reversed_unitary,
    rotation_axis,
    step_hamiltonians,
)


# ---------- helpers ------------------------------------------------
def qubit(ratio: float = 1.5, steps: int | None = 7) -> QubitRotationProtocol:
    return QubitRotationProtocol.from_ratio(ratio, steps=steps)


def overlap(a: np.ndarray, b: np.ndarray) -> float:
    return abs(np.vdot(a, b))


def microreversibility_gap(schedule, t: float) -> float:
    tau = schedule.duration
    lhs = schedule.reversed(tau - t, 0.0).conj()
    rhs = schedule.forward(tau, t).conj().T
    return float(np.max(np.abs(lhs - rhs)))


# =================================================================
#                Q U B I T  R O T A T I O N  P R O T O C O L
# =================================================================
def test_reference_tau_gives_unit_rate():
    p = qubit(3.0)
    assert p.tau == REFERENCE_TAU
    assert p.Omega == pytest.approx(1.0)
    assert p.omega == pytest.approx(3.0)
    assert p.ratio == pytest.approx(3.0)
    assert p.dt == pytest.approx(math.pi / 14)


def test_protocol_validation():
    with pytest.raises(ValueError):
        QubitRotationProtocol(omega=0.0)
    with pytest.raises(ValueError):
        QubitRotationProtocol(omega=1.0, tau=-1.0)
    with pytest.raises(ValueError):
        QubitRotationProtocol(omega=1.0, steps=0)
    with pytest.raises(ContinuousModeRequested):
        _ = qubit(steps=None).dt


@pytest.mark.parametrize("lam", [0.0, 0.3, math.pi / 4, math.pi / 2])
def test_hamiltonian_spectrum_is_zero_and_omega(lam):
    h = hamiltonian_at(qubit(2.0), lam)
    assert np.all(np.isreal(h))
    assert_allclose(hermitian_eig(h).eigenvalues, [0.0, 2.0], atol=1e-14)


def test_endpoints_are_sigma_z_and_sigma_x_like():
    p = qubit(1.0)
    assert_allclose(hamiltonian_at(p, 0.0), np.diag([1.0, 0.0]), atol=1e-15)
    assert_allclose(hamiltonian_at(p, math.pi / 2), [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)


def test_rotation_axis_and_retardance():
    p = qubit(1.5, steps=7)
    assert rotation_axis(p, 7) == pytest.approx((1.0, 0.0, 0.0), abs=1e-15)
    x, y, z = rotation_axis(p, 1)
    assert x == pytest.approx(math.sin(math.pi / 14)) and z == pytest.approx(math.cos(math.pi / 14))
    assert retardance(p) == pytest.approx(math.pi / 14 * 1.5)
    with pytest.raises(IndexOutOfRange):
        rotation_axis(p, 8)
    with pytest.raises(ContinuousModeRequested):
        retardance(qubit(steps=None))


# =================================================================
#                      S T E P  S C H E D U L E
# =================================================================
def test_step_hamiltonians_layout():
    p = qubit(1.5, steps=7)
    schedule = step_hamiltonians(p)
    assert schedule.n_steps == 7
    assert schedule.duration == pytest.approx(p.tau)
    assert_allclose(schedule.generators[0], hamiltonian_at(p, math.pi / 14), atol=1e-15)
    assert_allclose(schedule.generators[-1], hamiltonian_at(p, math.pi / 2), atol=1e-15)
    assert_allclose(schedule.initial_hamiltonian, hamiltonian_at(p, 0.0), atol=1e-15)
    assert_allclose(schedule.final_hamiltonian, hamiltonian_at(p, math.pi / 2), atol=1e-15)


def test_forward_unitary_matches_scipy_expm():
    p = qubit(3.0, steps=7)
    expected = np.eye(2, dtype=complex)
    for k in range(1, 8):
        expected = expm(-1j * hamiltonian_at(p, k * math.pi / 14) * p.dt) @ expected
    assert_allclose(forward_unitary(p, p.tau), expected, atol=1e-12)


def test_single_step_identity_and_composition():
    schedule = step_hamiltonians(qubit(0.5, steps=4))
    bounds = schedule.boundaries()
    assert_allclose(schedule.forward(bounds[2], bounds[2]), np.eye(2), atol=0)
    full = schedule.forward(bounds[-1], bounds[0])
    split = schedule.forward(bounds[-1], bounds[2]) @ schedule.forward(bounds[2], bounds[0])
    assert_allclose(full, split, atol=1e-14)
    assert is_unitary(full)


@pytest.mark.parametrize("steps", [1, 2, 7, 14])
@pytest.mark.parametrize("ratio", [0.01, 1.0, 3.0, 100.0])
def test_microreversibility_at_every_boundary(steps, ratio):
    schedule = step_hamiltonians(qubit(ratio, steps))
    for t in schedule.boundaries():
        assert microreversibility_gap(schedule, t) <= 1e-10


def test_corrupted_step_breaks_microreversibility():
    schedule = step_hamiltonians(qubit(3.0, 7)).with_corrupted_step()
    assert schedule.corrupt_step == 3
    assert microreversibility_gap(schedule, 0.0) > 1e-6


def test_non_boundary_time_is_rejected():
    schedule = step_hamiltonians(qubit(1.0, 7))
    with pytest.raises(NonBoundaryTime):
        schedule.forward(schedule.duration / 3 + 1e-3, 0.0)
    with pytest.raises(ValueError):
        schedule.forward(0.0, schedule.duration)


def test_split_boundary_convention():
    odd = step_hamiltonians(qubit(1.0, 7))
    assert odd.split_index() == 4
    assert odd.split_time() == pytest.approx(4 * odd.durations[0])
    with pytest.raises(OddSplitBoundary):
        odd.split_time(exact_half=True)

    even = step_hamiltonians(qubit(1.0, 14))
    assert even.split_time(exact_half=True) == pytest.approx(even.duration / 2)


def test_custom_schedule_checks():
    with pytest.raises(NonHermitianInput):
        custom_schedule([([[0, 1j], [-1j, 0]], 0.1)])
    with pytest.raises(DimensionMismatch):
        custom_schedule([(np.eye(2), 0.1), (np.eye(3), 0.1)])
    with pytest.raises(ValueError):
        custom_schedule([(np.eye(2), 0.0)])
    with pytest.raises(ValueError):
        StepSchedule([])


def test_custom_three_level_schedule_is_microreversible():
    rng = np.random.default_rng(5)
    steps = []
    for _ in range(5):
        a = rng.normal(size=(3, 3))
        steps.append(((a + a.T) / 2, float(rng.uniform(0.1, 0.5))))
    schedule = custom_schedule(steps)
    assert schedule.dimension == 3
    for t in schedule.boundaries():
        assert microreversibility_gap(schedule, t) <= 1e-10


# =================================================================
#                   C O N T I N U O U S  R O T A T I O N
# =================================================================
def test_continuous_requires_continuous_protocol():
    with pytest.raises(DiscreteModeRequested):
        continuous_unitary(qubit(1.0, 7), 0.1)
    with pytest.raises(DiscreteModeRequested):
        RotationSchedule(qubit(1.0, 7))
    with pytest.raises(NonBoundaryTime):
        continuous_unitary(qubit(1.0, None), 10.0)


def test_continuous_unitary_solves_schrodinger_equation():
    p = qubit(1.5, None)
    t, h = 0.4, 1e-6
    derivative = (continuous_unitary(p, t + h) - continuous_unitary(p, t - h)) / (2 * h)
    generator = hamiltonian_at(p, p.lambda_at(t))
    assert_allclose(derivative, -1j * generator @ continuous_unitary(p, t), atol=1e-7)


def test_continuous_reversed_starts_from_final_hamiltonian():
    p = qubit(1.5, None)
    t, h = 0.3, 1e-6
    u = continuous_reversed_unitary(p, t)
    derivative = (continuous_reversed_unitary(p, t + h) - continuous_reversed_unitary(p, t - h))
    generator = hamiltonian_at(p, math.pi / 2 - p.Omega * t)
    assert_allclose(derivative / (2 * h), -1j * generator @ u, atol=1e-7)
    assert_allclose(continuous_reversed_unitary(p, 0.0), np.eye(2), atol=1e-14)


@pytest.mark.parametrize("ratio", [0.01, 1.5, 100.0])
def test_continuous_microreversibility(ratio):
    schedule = qubit(ratio, None).schedule()
    for t in schedule.checkpoints():
        assert microreversibility_gap(schedule, t) <= 1e-10


def test_step_schedule_converges_to_continuous():
    continuous = forward_unitary(qubit(1.5, None), REFERENCE_TAU)
    gaps = [
        np.max(np.abs(forward_unitary(qubit(1.5, n), REFERENCE_TAU) - continuous))
        for n in (7, 14, 28, 56)
    ]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


@settings(max_examples=50, deadline=None)
@given(
    ratio=st.floats(min_value=0.05, max_value=20.0),
    frac=st.floats(min_value=0.0, max_value=1.0),
    plus=st.booleans(),
)
def test_closed_form_state_matches_propagator(ratio, frac, plus):
    p = qubit(ratio, None)
    t = frac * p.tau
    start, label = (Z_PLUS, ZState.PLUS) if plus else (Z_MINUS, ZState.MINUS)
    numeric = continuous_unitary(p, t) @ start
    analytic = closed_form_state(p, label, t)
    assert 1.0 - overlap(numeric, analytic) <= 1e-10


def test_reversed_unitary_module_helper():
    p = qubit(1.0, 4)
    schedule = p.schedule()
    assert_allclose(
        reversed_unitary(p, schedule.duration), schedule.reversed(schedule.duration, 0.0)
    )


# =================================================================
#                        T I M E  R E V E R S A L
# =================================================================
def test_time_reversal_conjugates_vectors_and_states():
    psi = np.array([1, 1j]) / math.sqrt(2)
    assert_allclose(apply_time_reversal(psi), psi.conj())
    rho = DensityOperator.pure(psi)
    assert_allclose(apply_time_reversal(rho).matrix, rho.matrix.conj())


# =================================================================
#                  С Т А Т И С Т И Ч Е С К И Е  П Р О В Е Р К И
# =================================================================
@pytest.mark.parametrize("ratio", [0.01, 1.5, 100.0])
def test_hamiltonian_spectrum_at_random_angles(ratio):
    p = qubit(ratio)
    rng = np.random.default_rng(31)
    for lam in rng.uniform(0.0, math.pi / 2, size=200):
        h = hamiltonian_at(p, float(lam))
        assert np.max(np.abs(h.imag)) == 0.0
        assert_allclose(np.linalg.eigvalsh(h), [0.0, p.omega], atol=1e-12)


def test_step_schedule_converges_at_first_order():
    continuous = forward_unitary(qubit(1.0, None), REFERENCE_TAU)
    gaps = []
    for n in (7, 14, 28, 56, 112):
        stepped = forward_unitary(qubit(1.0, n), REFERENCE_TAU)
        phase = np.angle(np.trace(continuous.conj().T @ stepped))
        gaps.append(np.linalg.norm(stepped - np.exp(1j * phase) * continuous))
    ratios = [a / b for a, b in zip(gaps, gaps[1:])]
    assert all(1.5 <= r <= 2.5 for r in ratios), ratios
