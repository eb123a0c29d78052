"""Gate application and projective measurement on dense registers.

Branch enumeration is written so that evaluations share no mutable state:
each branch works on its own amplitude copy and results are merged in a
fixed order (+1 before -1), which is what makes reports reproducible and
would let the branches run concurrently if anyone cared to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import PROB_EPS
from .errors import ImpossibleBranchError, ValidationError
from .gates import Observable
from .states import DensityOp, Operator, QState, matfun_hermitian

_SIGN_ORDER = (+1, -1)


def _check_wires(targets: Sequence[int], n_qubits: int, width: int) -> tuple[int, ...]:
    wires = tuple(int(t) for t in targets)
    if len(wires) != width:
        raise ValidationError(f"expected {width} target wires, got {len(wires)}")
    if len(set(wires)) != len(wires):
        raise ValidationError(f"target wires must be distinct, got {wires}")
    for w in wires:
        if not 0 <= w < n_qubits:
            raise ValidationError(f"wire {w} out of range for {n_qubits} qubits")
    return wires


def apply_matrix(vec: np.ndarray, mat: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Apply a k-wire matrix to the chosen wires of a flat amplitude vector."""
    k = int(mat.shape[0]).bit_length() - 1
    if mat.shape != (2**k, 2**k):
        raise ValidationError(f"matrix shape {mat.shape} is not a k-qubit operator")
    wires = _check_wires(targets, n_qubits, k)
    psi = vec.reshape((2,) * n_qubits)
    op = mat.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(tuple(range(k, 2 * k)), wires))
    out = np.moveaxis(out, tuple(range(k)), wires)
    return np.ascontiguousarray(out).reshape(-1)


def apply_gate(state: QState, gate, targets: Sequence[int]) -> QState:
    """Unitary gate application; raises if the result drifts off unit norm."""
    mat = gate.matrix if isinstance(gate, Operator) else np.asarray(gate, dtype=complex)
    out = apply_matrix(state.amplitudes, mat, targets, state.n_qubits)
    norm = float(np.linalg.norm(out))
    if abs(norm - 1.0) > 1e-9:
        raise ValidationError(f"gate application changed the norm to {norm}; gate is not unitary")
    return QState(out)


def partial_inner(vec: np.ndarray, local: np.ndarray, wire: int, n_qubits: int) -> np.ndarray:
    """Contract <local| against one wire, returning the remaining register."""
    psi = vec.reshape((2,) * n_qubits)
    out = np.tensordot(local.conj(), psi, axes=([0], [wire]))
    return np.ascontiguousarray(out).reshape(-1)


@dataclass(frozen=True)
class Branch:
    """One measurement outcome: signed results, probability, normalized state."""

    outcomes: tuple[tuple[str, int], ...]
    probability: float
    state: QState

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(sign for _, sign in self.outcomes)

    @property
    def bits(self) -> tuple[int, ...]:
        """Reporting convention: outcome +1 is bit 0, outcome -1 is bit 1."""
        return tuple((1 - sign) // 2 for sign in self.signs)


def project_outcome(state: QState, obs: Observable, targets: Sequence[int], sign: int) -> tuple[float, QState]:
    """Probability and post-state of one outcome; error if it cannot occur."""
    wires = _check_wires(targets, state.n_qubits, obs.n_qubits)
    projected = apply_matrix(state.amplitudes, obs.projector(sign), wires, state.n_qubits)
    prob = float(np.vdot(projected, projected).real)
    if prob < PROB_EPS:
        raise ImpossibleBranchError(
            f"outcome {sign:+d} of {obs.label} on wires {wires} has probability {prob:.3e}"
        )
    return prob, QState(projected / np.sqrt(prob))


def measure(state: QState, obs: Observable, targets: Sequence[int], mode: str = "enumerate",
            rng: np.random.Generator | None = None):
    """Measure a binary observable on the chosen wires.

    ``enumerate`` returns every realizable branch (+1 first); ``sample``
    draws a single branch with the given generator.
    """
    wires = _check_wires(targets, state.n_qubits, obs.n_qubits)
    branches = []
    for sign in _SIGN_ORDER:
        projected = apply_matrix(state.amplitudes, obs.projector(sign), wires, state.n_qubits)
        prob = float(np.vdot(projected, projected).real)
        if prob < PROB_EPS:
            continue
        branches.append(Branch(
            outcomes=((obs.label, sign),),
            probability=prob,
            state=QState(projected / np.sqrt(prob)),
        ))
    if mode == "enumerate":
        return branches
    if mode == "sample":
        if rng is None:
            raise ValidationError("sample mode needs an rng")
        probs = np.array([b.probability for b in branches])
        pick = int(rng.choice(len(branches), p=probs / probs.sum()))
        return branches[pick]
    raise ValidationError(f"mode must be 'enumerate' or 'sample', got {mode!r}")


def sample_outcomes(state: QState, obs: Observable, targets: Sequence[int],
                    rng: np.random.Generator, n: int) -> np.ndarray:
    """Vector of n independent outcome signs for repeated preparations."""
    if n < 1:
        raise ValidationError("need at least one draw")
    branches = measure(state, obs, targets, mode="enumerate")
    probs = np.array([b.probability for b in branches])
    signs = np.array([b.outcomes[0][1] for b in branches])
    idx = rng.choice(len(branches), size=int(n), p=probs / probs.sum())
    return signs[idx]


@dataclass(frozen=True)
class InterfaceResult:
    """Yes/no interrogation of a system through a coupled pointer.

    The affirmative branch evolves under the cosine half of the coupling and
    the negative branch under the sine half; a branch whose weight vanishes
    is flagged by a None density matrix.
    """

    p_plus: float
    p_minus: float
    rho_plus: DensityOp | None
    rho_minus: DensityOp | None


def interface_yes_no(rho: DensityOp, g: Operator, coupling: float) -> InterfaceResult:
    """Split a state into yes/no branches for coupling angle ``coupling``.

    Implements the back-action of reading one bit off an apparatus coupled
    through the Hermitian generator ``g``: rho -> cos(c g) rho cos(c g) on
    the yes branch and sin(c g) rho sin(c g) on the no branch.
    """
    if not g.is_hermitian(atol=1e-9):
        raise ValidationError("coupling generator must be Hermitian")
    if g.dim != rho.dim:
        raise ValidationError(f"generator dim {g.dim} does not match state dim {rho.dim}")
    scaled = Operator(coupling * g.matrix)
    cos_part = matfun_hermitian(scaled, np.cos).matrix
    sin_part = matfun_hermitian(scaled, np.sin).matrix

    def _branch(op: np.ndarray) -> tuple[float, DensityOp | None]:
        unnorm = op @ rho.matrix @ op
        weight = float(np.trace(unnorm).real)
        if weight < PROB_EPS:
            return max(weight, 0.0), None
        return weight, DensityOp(unnorm / weight)

    p_plus, rho_plus = _branch(cos_part)
    p_minus, rho_minus = _branch(sin_part)
    return InterfaceResult(p_plus=p_plus, p_minus=p_minus, rho_plus=rho_plus, rho_minus=rho_minus)
