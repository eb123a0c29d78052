"""Dense state vectors, operators, and density matrices.

Registers are stored as flat complex amplitude vectors of length 2**n with
qubit 0 as the most significant bit, so ``tensor(a, b)`` puts ``a`` on the
high-order wires.  Operators are plain dense matrices and are allowed to have
any dimension up to the register limit, not just powers of two; the
measurement layer is the only place that insists on qubit shapes.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .config import ATOL_ALGEBRA, ATOL_CIRCUIT, max_qubits
from .errors import CapacityError, ValidationError

_NORM_SLACK = 1e-6


def _as_complex_vector(values) -> np.ndarray:
    vec = np.asarray(values, dtype=complex)
    if vec.ndim != 1:
        raise ValidationError(f"amplitudes must be one-dimensional, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("amplitudes contain NaN or infinity")
    return vec


class QState:
    """Normalized pure state of ``n_qubits`` qubits."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes, *, normalize: bool = False):
        vec = _as_complex_vector(amplitudes)
        n = int(vec.size).bit_length() - 1
        if vec.size != 2**n or vec.size < 2:
            raise ValidationError(f"amplitude count {vec.size} is not a power of two >= 2")
        budget = max_qubits()
        if n > budget:
            raise CapacityError(f"register of {n} qubits exceeds the limit of {budget}")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise ValidationError("cannot normalize the zero vector")
        if not normalize and abs(norm - 1.0) > _NORM_SLACK:
            raise ValidationError(f"state norm {norm} is not 1; pass normalize=True to rescale")
        self.amplitudes = vec / norm
        self.n_qubits = n

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "QState":
        """Computational basis state |index> of an n-qubit register."""
        dim = 2**n_qubits
        if not 0 <= index < dim:
            raise ValidationError(f"basis index {index} out of range for {n_qubits} qubits")
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls(vec)

    @classmethod
    def zero(cls, n_qubits: int) -> "QState":
        return cls.basis(n_qubits, 0)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: "QState") -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def prob_of_bit(self, qubit: int, bit: int) -> float:
        """Marginal probability that ``qubit`` reads ``bit``."""
        if not 0 <= qubit < self.n_qubits:
            raise ValidationError(f"qubit {qubit} out of range")
        tensor_view = self.amplitudes.reshape((2,) * self.n_qubits)
        slab = np.take(tensor_view, bit, axis=qubit)
        return float(np.sum(np.abs(slab) ** 2))

    def __repr__(self) -> str:
        return f"QState(n_qubits={self.n_qubits})"


class Operator:
    """Dense square matrix acting on a register or subsystem."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"operator must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("operator contains NaN or infinity")
        if mat.shape[0] > 2 ** max_qubits():
            raise CapacityError(
                f"operator dimension {mat.shape[0]} exceeds the {max_qubits()}-qubit limit"
            )
        self.matrix = mat

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.matrix.conj().T)

    def is_hermitian(self, atol: float = ATOL_ALGEBRA) -> bool:
        return bool(np.allclose(self.matrix, self.matrix.conj().T, atol=atol))

    def is_unitary(self, atol: float = ATOL_ALGEBRA) -> bool:
        eye = np.eye(self.dim)
        return bool(np.allclose(self.matrix.conj().T @ self.matrix, eye, atol=atol))

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix @ other.matrix)

    def conjugate_with(self, u: "Operator") -> "Operator":
        """u . self . u^dagger, the similarity transform by a unitary."""
        return Operator(u.matrix @ self.matrix @ u.matrix.conj().T)

    def __repr__(self) -> str:
        return f"Operator(dim={self.dim})"


class DensityOp:
    """Density matrix: Hermitian, unit trace, positive semidefinite."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, atol: float = 1e-9):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValidationError("density matrix contains NaN or infinity")
        if not np.allclose(mat, mat.conj().T, atol=atol):
            raise ValidationError("density matrix is not Hermitian")
        mat = (mat + mat.conj().T) / 2
        trace = float(np.trace(mat).real)
        if abs(trace - 1.0) > atol:
            raise ValidationError(f"density matrix trace {trace} is not 1")
        mat = mat / trace
        eigs = np.linalg.eigvalsh(mat)
        if eigs.min() < -atol:
            raise ValidationError(f"density matrix has negative eigenvalue {eigs.min()}")
        self.matrix = mat

    @classmethod
    def from_state(cls, state: QState) -> "DensityOp":
        vec = state.amplitudes
        return cls(np.outer(vec, vec.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityOp(dim={self.dim})"


def tensor(a, b):
    """Kronecker product of two states or two operators, left factor on top."""
    if isinstance(a, QState) and isinstance(b, QState):
        return QState(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.matrix, b.matrix))
    raise ValidationError(
        f"tensor needs two states or two operators, got {type(a).__name__} and {type(b).__name__}"
    )


def matfun_hermitian(g: Operator, f: Callable[[np.ndarray], np.ndarray]) -> Operator:
    """Apply a scalar function to a Hermitian operator through its eigenbasis."""
    if not g.is_hermitian(atol=1e-9):
        raise ValidationError("matfun_hermitian requires a Hermitian operator")
    eigvals, eigvecs = np.linalg.eigh(g.matrix)
    fvals = np.asarray(f(eigvals))
    result = (eigvecs * fvals) @ eigvecs.conj().T
    if np.isrealobj(fvals) or np.allclose(fvals.imag, 0.0, atol=ATOL_ALGEBRA):
        result = (result + result.conj().T) / 2
    return Operator(result)


def equal_up_to_global_phase(a, b, atol: float = ATOL_CIRCUIT):
    """Whether two states or matrices agree after removing one global phase.

    Returns ``(flag, phase)`` where ``b ~ phase * a`` when the flag is true;
    the phase is None on failure.
    """
    x = a.amplitudes if isinstance(a, QState) else (a.matrix if isinstance(a, Operator) else np.asarray(a, dtype=complex))
    y = b.amplitudes if isinstance(b, QState) else (b.matrix if isinstance(b, Operator) else np.asarray(b, dtype=complex))
    if x.shape != y.shape:
        return False, None
    overlap = np.vdot(x, y)
    if abs(overlap) < atol * max(1.0, float(np.linalg.norm(x)) ** 2):
        # Orthogonal or one side is zero: no phase can align them unless both vanish.
        if np.allclose(x, 0, atol=atol) and np.allclose(y, 0, atol=atol):
            return True, 1.0 + 0.0j
        return False, None
    phase = overlap / abs(overlap)
    if np.allclose(y, phase * x, atol=atol):
        return True, complex(phase)
    return False, None


def fidelity(a: QState, b: QState) -> float:
    """|<a|b>|^2 for pure states."""
    return float(abs(a.inner(b)) ** 2)


def random_state(n_qubits: int, rng: np.random.Generator) -> QState:
    """Haar-ish random pure state from a complex Gaussian draw."""
    dim = 2**n_qubits
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return QState(vec, normalize=True)


def random_unitary(dim: int, rng: np.random.Generator) -> Operator:
    """Haar random unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return Operator(q)


def random_hermitian(dim: int, rng: np.random.Generator) -> Operator:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Operator((z + z.conj().T) / 2)


def random_density(dim: int, rng: np.random.Generator) -> DensityOp:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = z @ z.conj().T
    return DensityOp(rho / np.trace(rho).real)
