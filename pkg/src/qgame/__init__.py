"""Quantum game toolbox: dense simulation, measurement-driven gates, markets."""

from .config import ATOL_ALGEBRA, ATOL_CIRCUIT, ATOL_QUAD, max_qubits, seeded_rng
from .errors import (
    CapacityError,
    GridTruncationError,
    ImpossibleBranchError,
    ImpossibleTransactionError,
    QGameError,
    StepCapError,
    ValidationError,
)
from .states import (
    DensityOp,
    Operator,
    QState,
    equal_up_to_global_phase,
    fidelity,
    matfun_hermitian,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL_ALGEBRA",
    "ATOL_CIRCUIT",
    "ATOL_QUAD",
    "CapacityError",
    "DensityOp",
    "GridTruncationError",
    "ImpossibleBranchError",
    "ImpossibleTransactionError",
    "Operator",
    "QGameError",
    "QState",
    "StepCapError",
    "ValidationError",
    "equal_up_to_global_phase",
    "fidelity",
    "matfun_hermitian",
    "max_qubits",
    "seeded_rng",
    "tensor",
    "__version__",
]
