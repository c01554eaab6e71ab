"""
Dense complex linear algebra for small Hilbert spaces
=====================================================

Matrices are plain :class:`numpy.ndarray` objects of dtype ``complex128``.
Functions of Hermitian matrices (exponential, logarithm) always go through the
spectral decomposition returned by :func:`hermitian_eig`, never through a
series, so results are deterministic for a given input.

Units: ħ = 1 and k_B = 1 throughout the package.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, TypeAlias

import numpy as np
import numpy.typing as npt

from .abstraction import Role, Subsystem
from .config import (
    DEGENERACY_GAP,
    HERMITIAN_ATOL,
    POSITIVITY_ATOL,
    SINGULAR_EIGENVALUE,
    SUPPORT_RHO,
    SUPPORT_SIGMA,
    TRACE_ATOL,
    UNITARY_ATOL,
)
from .errors import DimensionMismatch, NonHermitianInput, SingularInput, SupportMismatch

LOG = logging.getLogger(__name__)

ComplexMatrix: TypeAlias = npt.NDArray[np.complex128]
ComplexVector: TypeAlias = npt.NDArray[np.complex128]
RealVector: TypeAlias = npt.NDArray[np.float64]

# Pauli matrices in the (|z+>, |z->) basis.
IDENTITY_2: ComplexMatrix = np.eye(2, dtype=complex)
SIGMA_X: ComplexMatrix = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y: ComplexMatrix = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z: ComplexMatrix = np.array([[1, 0], [0, -1]], dtype=complex)

_PHASE_ATOL = 1e-12


# --------------------------------------------------------------------------- #
# Validation helpers
# --------------------------------------------------------------------------- #


def as_matrix(m: npt.ArrayLike) -> ComplexMatrix:
    """Copy *m* into a finite, square ``complex128`` matrix."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"Expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix entries must be finite (no NaN/Inf)")
    return arr


def hermiticity_error(m: ComplexMatrix) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def unitarity_error(u: ComplexMatrix) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def is_hermitian(m: npt.ArrayLike, atol: float = HERMITIAN_ATOL) -> bool:
    return hermiticity_error(as_matrix(m)) <= atol


def is_unitary(u: npt.ArrayLike, atol: float = UNITARY_ATOL) -> bool:
    return unitarity_error(as_matrix(u)) <= atol


def require_hermitian(m: npt.ArrayLike) -> ComplexMatrix:
    """Return *m* as a matrix, symmetrised, or raise :class:`NonHermitianInput`."""
    arr = as_matrix(m)
    err = hermiticity_error(arr)
    if err > HERMITIAN_ATOL:
        raise NonHermitianInput(f"max|M - M†| = {err:.3e} exceeds {HERMITIAN_ATOL:.0e}")
    return (arr + arr.conj().T) / 2


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------- #
# Spectral decomposition
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    ``log_eigenvalues`` is only set when the exact logarithms are known
    analytically (Gibbs states); it lets :func:`relative_entropy` work with
    weights far below the eigensolver's resolution.
    """

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix
    log_eigenvalues: RealVector | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "eigenvalues", _frozen(np.asarray(self.eigenvalues, float)))
        object.__setattr__(self, "eigenvectors", _frozen(np.asarray(self.eigenvectors, complex)))
        if self.log_eigenvalues is not None:
            logs = _frozen(np.asarray(self.log_eigenvalues, float))
            object.__setattr__(self, "log_eigenvalues", logs)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def apply(self, func: Callable[[RealVector], npt.ArrayLike]) -> ComplexMatrix:
        """Matrix function ``V f(Λ) V†``."""
        v = self.eigenvectors
        return (v * np.asarray(func(self.eigenvalues))) @ v.conj().T

    def reconstruct(self) -> ComplexMatrix:
        return self.apply(lambda values: values)

    def logs(self) -> RealVector:
        """Natural logarithms of the eigenvalues, ``-inf`` where not positive."""
        if self.log_eigenvalues is not None:
            return np.array(self.log_eigenvalues)
        out = np.full(self.dim, -np.inf)
        positive = self.eigenvalues > 0
        out[positive] = np.log(self.eigenvalues[positive])
        return out

    def transformed(self, u: ComplexMatrix) -> "SpectralDecomposition":
        """Spectrum of ``U M U†``: same eigenvalues, eigenvectors ``U V``."""
        return SpectralDecomposition(self.eigenvalues, u @ self.eigenvectors, self.log_eigenvalues)

    def conjugated(self) -> "SpectralDecomposition":
        """Spectrum of the entrywise complex conjugate ``M*``."""
        return SpectralDecomposition(
            self.eigenvalues, self.eigenvectors.conj(), self.log_eigenvalues
        )


def _orthonormalize_clusters(values: RealVector, vectors: ComplexMatrix) -> ComplexMatrix:
    vectors = vectors.copy()
    start = 0
    for stop in range(1, len(values) + 1):
        if stop < len(values) and values[stop] - values[stop - 1] < DEGENERACY_GAP:
            continue
        if stop - start > 1:
            q, _ = np.linalg.qr(vectors[:, start:stop])
            vectors[:, start:stop] = q
        start = stop
    return vectors


def _fix_phases(vectors: ComplexMatrix) -> ComplexMatrix:
    """Make the first non-negligible component of every column real positive."""
    vectors = vectors.copy()
    for k in range(vectors.shape[1]):
        column = vectors[:, k]
        (nonzero,) = np.nonzero(np.abs(column) > _PHASE_ATOL)
        if nonzero.size:
            lead = column[nonzero[0]]
            vectors[:, k] = column * (np.conj(lead) / abs(lead))
    return vectors


def hermitian_eig(m: npt.ArrayLike) -> SpectralDecomposition:
    """
    Eigen-decompose a Hermitian matrix.

    Parameters
    ----------
    m : array-like
        Hermitian within ``1e-12`` entrywise.

    Returns
    -------
    SpectralDecomposition
        Ascending eigenvalues; orthonormal eigenvectors whose first
        non-negligible component is real positive. Vectors inside a degenerate
        cluster (gap ``< 1e-10``) are re-orthonormalised.

    Raises
    ------
    NonHermitianInput
        If the Hermiticity tolerance is violated.
    """
    herm = require_hermitian(m)
    values, vectors = np.linalg.eigh(herm)
    vectors = _fix_phases(_orthonormalize_clusters(values, vectors))
    return SpectralDecomposition(values, vectors)


def exp_hermitian_generator(h: npt.ArrayLike, t: float) -> ComplexMatrix:
    """Propagator ``exp(-i H t)`` (ħ = 1) computed on the eigenbasis of *H*."""
    spectrum = hermitian_eig(h)
    if t == 0:
        return np.eye(spectrum.dim, dtype=complex)
    return spectrum.apply(lambda values: np.exp(-1j * values * t))


def log_psd(m: npt.ArrayLike) -> ComplexMatrix:
    """Matrix logarithm of a positive-definite Hermitian matrix."""
    spectrum = hermitian_eig(m)
    smallest = float(spectrum.eigenvalues[0])
    if smallest <= SINGULAR_EIGENVALUE:
        raise SingularInput(f"Smallest eigenvalue {smallest:.3e} is not positive enough for log")
    return spectrum.apply(np.log)


# --------------------------------------------------------------------------- #
# States
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace, positive semi-definite matrix with a role label."""

    matrix: ComplexMatrix
    role: Role = Role.SYSTEM
    spectrum: SpectralDecomposition | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        arr = require_hermitian(self.matrix)
        trace = np.trace(arr).real
        if abs(trace - 1) > TRACE_ATOL:
            raise ValueError(f"Density operator trace {trace!r} differs from 1")
        smallest = float(np.linalg.eigvalsh(arr)[0])
        if smallest < -POSITIVITY_ATOL:
            raise ValueError(f"Density operator has negative eigenvalue {smallest:.3e}")
        object.__setattr__(self, "matrix", _frozen(arr))

    @classmethod
    def pure(cls, vector: npt.ArrayLike, role: Role = Role.SYSTEM) -> "DensityOperator":
        psi = np.asarray(vector, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), role)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def eigen(self) -> SpectralDecomposition:
        return self.spectrum if self.spectrum is not None else hermitian_eig(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def evolve(self, u: ComplexMatrix) -> "DensityOperator":
        """``U ρ U†``; a known spectrum is carried along exactly."""
        spectrum = None if self.spectrum is None else self.spectrum.transformed(u)
        return DensityOperator(u @ self.matrix @ u.conj().T, self.role, spectrum)

    def conjugate(self) -> "DensityOperator":
        """Entrywise complex conjugate (time reversal in the computational basis)."""
        spectrum = None if self.spectrum is None else self.spectrum.conjugated()
        return DensityOperator(self.matrix.conj(), self.role, spectrum)


def _as_density(state: "DensityOperator | npt.ArrayLike") -> DensityOperator:
    return state if isinstance(state, DensityOperator) else DensityOperator(as_matrix(state))


# --------------------------------------------------------------------------- #
# Norms, distances, entropies
# --------------------------------------------------------------------------- #


def frobenius_norm(m: npt.ArrayLike) -> float:
    """``||M||₂ = sqrt(Tr[M† M])``."""
    return float(np.linalg.norm(np.asarray(m, dtype=complex), "fro"))


def trace_norm(m: npt.ArrayLike) -> float:
    """``||M||₁``: sum of singular values."""
    return float(np.sum(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)))


def trace_distance(
    rho: "DensityOperator | npt.ArrayLike", sigma: "DensityOperator | npt.ArrayLike"
) -> float:
    """``D = ½ ||ρ - σ||₁`` from the eigenvalues of the Hermitian difference."""
    a, b = _as_density(rho), _as_density(sigma)
    if a.dim != b.dim:
        raise DimensionMismatch(f"Cannot compare states of dimension {a.dim} and {b.dim}")
    distance = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))
    return min(max(distance, 0.0), 1.0)


def relative_entropy(
    rho: "DensityOperator | npt.ArrayLike", sigma: "DensityOperator | npt.ArrayLike"
) -> float:
    """
    Quantum relative entropy ``S(ρ||σ) = Tr[ρ ln ρ - ρ ln σ]`` in nats.

    Both operators are used through their spectral decompositions; a spectrum
    carried by a :class:`DensityOperator` (e.g. a Gibbs state) is used as is.
    ``0 ln 0 = 0`` on the null space of ρ.

    Raises
    ------
    DimensionMismatch
        Different dimensions.
    SupportMismatch
        An eigenvector of ρ with weight above ``1e-12`` has σ-expectation at
        or below ``1e-14``.
    """
    a, b = _as_density(rho), _as_density(sigma)
    if a.dim != b.dim:
        raise DimensionMismatch(f"Cannot compare states of dimension {a.dim} and {b.dim}")
    r, s = a.eigen(), b.eigen()

    weights = np.clip(r.eigenvalues, 0.0, None)
    overlaps = np.abs(s.eigenvectors.conj().T @ r.eigenvectors) ** 2  # [l, k] = |<s_l|r_k>|²

    expectations = np.clip(s.eigenvalues, 0.0, None) @ overlaps
    for k in np.nonzero(weights > SUPPORT_RHO)[0]:
        if expectations[k] <= SUPPORT_SIGMA and s.log_eigenvalues is None:
            raise SupportMismatch(
                f"Eigenvector {k} of rho (weight {weights[k]:.3e}) lies outside supp(sigma)"
            )

    r_logs = r.logs()
    entropy_term = float(np.sum(weights[weights > 0] * r_logs[weights > 0]))

    s_logs = s.logs()
    mass = overlaps @ weights  # weight of rho on each sigma eigenvector
    finite = np.isfinite(s_logs)
    stray = float(np.max(mass[~finite], initial=0.0))
    if stray > SUPPORT_SIGMA:
        raise SupportMismatch(f"rho puts weight {stray:.3e} on the null space of sigma")
    cross_term = float(np.sum(mass[finite] * s_logs[finite]))
    return entropy_term - cross_term


# --------------------------------------------------------------------------- #
# Tensor structure
# --------------------------------------------------------------------------- #


def kron(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(
    joint: "DensityOperator | npt.ArrayLike",
    keep: Subsystem,
    dims: tuple[int, int],
    role: Role = Role.SYSTEM,
) -> DensityOperator:
    """
    Trace out one factor of a bipartite state on ``A ⊗ B``.

    Parameters
    ----------
    joint : DensityOperator | array-like
        State of dimension ``d_A * d_B``.
    keep : Subsystem
        Factor that survives.
    dims : tuple[int, int]
        ``(d_A, d_B)``.
    role : Role
        Label attached to the reduced state.
    """
    state = _as_density(joint)
    d_a, d_b = dims
    if d_a * d_b != state.dim:
        raise DimensionMismatch(f"dims {dims} do not factor a state of dimension {state.dim}")
    blocks = state.matrix.reshape(d_a, d_b, d_a, d_b)
    if keep is Subsystem.A:
        reduced = np.einsum("ijkj->ik", blocks)
    else:
        reduced = np.einsum("ijil->jl", blocks)
    return DensityOperator(reduced, role)
