"""Two-player protocols built on small registers.

Three self-contained games live here: the Newcomb prediction circuit in its
plain and measurement-hiding wirings, a verified gambling protocol with an
exact payoff engine next to its Monte-Carlo mirror, and a one-way quantum
finite automaton runner.  Everything is deterministic given a seed; exact
engines take no randomness at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ValidationError
from .gates import DEFAULT_GATES, GateSet
from .measure import apply_gate
from .states import Operator, QState

_BREAKERS = ("absent", "I", "NOT", "qutrojan")


@dataclass(frozen=True)
class NewcombConfig:
    """Wiring of the two-wire prediction circuit.

    ``control`` is the bit carried by the upper wire; ``breaker`` selects
    what happens to the lower wire before (or around) the controlled flip:
    nothing, an explicit identity, a pre-flip, or the switch sandwich that
    hides the control bit from the final readout.
    """

    control: int
    breaker: str = "absent"

    def __post_init__(self) -> None:
        if self.control not in (0, 1):
            raise ValidationError(f"control must be 0 or 1, got {self.control!r}")
        if self.breaker not in _BREAKERS:
            raise ValidationError(
                f"breaker must be one of {_BREAKERS}, got {self.breaker!r}")


def newcomb_run(cfg: NewcombConfig, gates: GateSet = DEFAULT_GATES) -> dict[int, float]:
    """Exact readout law of the lower wire for the configured circuit.

    The plain wiring lets the controlled flip copy the control bit onto the
    lower wire, so reading it reveals the upper wire's choice.  The
    sandwich wiring conjugates the controlled flip by the basis switch; the
    result acts diagonally, and the readout law is the same for both
    control values.
    """
    state = QState.basis(2, cfg.control << 1)
    if cfg.breaker == "qutrojan":
        state = apply_gate(state, gates.hadamard, [1])
        state = apply_gate(state, gates.cnot_alliance, [0, 1])
        state = apply_gate(state, gates.hadamard, [1])
    else:
        if cfg.breaker in ("I", "NOT"):
            state = apply_gate(state, gates.breaker(cfg.breaker), [1])
        state = apply_gate(state, gates.cnot_alliance, [0, 1])
    return {0: state.prob_of_bit(1, 0), 1: state.prob_of_bit(1, 1)}


@dataclass(frozen=True)
class GambleParams:
    """One parameterization of the verified gambling round.

    Alice splits a particle over two boxes as cos(theta)|a> + sin(theta)|b>;
    theta = pi/4 is the honest split.  Bob opens box B with probability
    1 - p_verify and otherwise demands the state back for a verification
    test that pays him ``reward`` when it flags a deviation.
    """

    theta: float
    p_verify: float
    reward: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ValidationError(f"theta must be finite, got {self.theta!r}")
        if not 0.0 <= self.p_verify <= 1.0:
            raise ValidationError(
                f"p_verify must lie in [0, 1], got {self.p_verify!r}")
        if not (math.isfinite(self.reward) and self.reward > 0.0):
            raise ValidationError(f"reward must be positive, got {self.reward!r}")

    @property
    def found_probability(self) -> float:
        """Chance that opening box B reveals the particle."""
        return math.sin(self.theta) ** 2

    @property
    def detection_probability(self) -> float:
        """Chance that the verification test flags the returned state.

        The test projects onto the honest split, so only the orthogonal
        component is ever flagged: 1 - |<honest|prepared>|^2, which is 0
        exactly at theta = pi/4.
        """
        return 1.0 - math.cos(self.theta - math.pi / 4) ** 2


def gvw_expected_payoffs(params: GambleParams) -> tuple[float, float]:
    """Exact (Bob, Alice) expectations by enumerating the four round events.

    Opening box B pays Bob +1 on a find and -1 on a miss; a verification
    pays him +reward on a flag and -1 otherwise.  The game is zero-sum by
    construction, so Alice's expectation is returned as the exact negative.
    """
    p_found = params.found_probability
    p_flag = params.detection_probability
    open_branch = p_found * 1.0 + (1.0 - p_found) * -1.0
    audit_branch = p_flag * params.reward + (1.0 - p_flag) * -1.0
    e_bob = (1.0 - params.p_verify) * open_branch + params.p_verify * audit_branch
    return e_bob, -e_bob


@dataclass(frozen=True)
class GambleSample:
    """Monte-Carlo summary of repeated rounds at fixed parameters."""

    mean_bob: float
    half_width: float
    trials: int
    counts: dict[str, int] = field(compare=True, default_factory=dict)


def gvw_simulate(params: GambleParams, trials: int,
                 rng: np.random.Generator) -> GambleSample:
    """Sample ``trials`` independent rounds and report Bob's mean payoff.

    The half-width is four standard errors, wide enough that the exact
    expectation falls inside it essentially always; a single round reports
    an infinite half-width since one draw carries no spread estimate.
    """
    if trials < 1:
        raise ValidationError(f"trials must be at least 1, got {trials}")
    audited = rng.random(trials) < params.p_verify
    n_audit = int(np.count_nonzero(audited))
    found = rng.random(trials - n_audit) < params.found_probability
    flagged = rng.random(n_audit) < params.detection_probability

    payoffs = np.empty(trials, dtype=float)
    payoffs[~audited] = np.where(found, 1.0, -1.0)
    payoffs[audited] = np.where(flagged, params.reward, -1.0)

    mean = float(payoffs.mean())
    if trials > 1:
        half_width = 4.0 * float(payoffs.std(ddof=1)) / math.sqrt(trials)
    else:
        half_width = float("inf")
    counts = {
        "found": int(np.count_nonzero(found)),
        "empty": int(np.count_nonzero(~found)),
        "detected": int(np.count_nonzero(flagged)),
        "clean": int(np.count_nonzero(~flagged)),
    }
    return GambleSample(mean, half_width, trials, counts)


def _best_cheat(p_verify: float, reward: float) -> tuple[float, float]:
    def e_bob(theta: float) -> float:
        return gvw_expected_payoffs(GambleParams(theta, p_verify, reward))[0]

    result = minimize_scalar(e_bob, bounds=(0.0, math.pi / 2), method="bounded",
                             options={"xatol": 1e-8})
    theta_star = float(result.x)
    # The bounded search never lands exactly on an endpoint; snap when the
    # endpoint is at least as good.
    for endpoint in (0.0, math.pi / 2):
        if e_bob(endpoint) <= e_bob(theta_star):
            theta_star = endpoint
    return theta_star, e_bob(theta_star)


def gvw_best_response(p_verify: float, reward: float) -> tuple[float, float]:
    """Alice's payoff-minimizing preparation against a known audit rate.

    Returns (theta, Bob's expectation there); theta is located by bounded
    scalar minimization over [0, pi/2] to a 1e-8 bracket.
    """
    GambleParams(0.0, p_verify, reward)  # reuse the field validation
    return _best_cheat(p_verify, reward)


def gvw_audit_response(theta: float, reward: float) -> tuple[float, float]:
    """Bob's payoff-maximizing audit rate against a known preparation.

    His expectation is linear in the audit rate, so the optimum sits at an
    endpoint; ties resolve to never auditing.
    """
    never = gvw_expected_payoffs(GambleParams(theta, 0.0, reward))[0]
    always = gvw_expected_payoffs(GambleParams(theta, 1.0, reward))[0]
    if always > never:
        return 1.0, always
    return 0.0, never


def gvw_fair_point(reward: float) -> tuple[float, float]:
    """Audit rate maximizing Bob's guaranteed expectation, and that value.

    Alice replies with her best cheat at every candidate rate, so the
    returned value is Bob's floor.  The floor is concave in the audit
    rate, which makes the bounded search reliable; as the reward grows the
    floor approaches zero and the round approaches a fair bet.
    """
    if not (math.isfinite(reward) and reward > 0.0):
        raise ValidationError(f"reward must be positive, got {reward!r}")

    def floor(p_verify: float) -> float:
        return _best_cheat(p_verify, reward)[1]

    result = minimize_scalar(lambda p: -floor(p), bounds=(0.0, 1.0),
                             method="bounded", options={"xatol": 1e-10})
    p_star = float(result.x)
    for endpoint in (0.0, 1.0):
        if floor(endpoint) >= floor(p_star):
            p_star = endpoint
    return p_star, floor(p_star)


def _as_complex_matrix(value, dim: int, what: str) -> np.ndarray:
    if isinstance(value, Operator):
        mat = value.matrix
    else:
        mat = np.asarray(value, dtype=complex)
    if mat.shape != (dim, dim):
        raise ValidationError(f"{what} must be {dim}x{dim}, got shape {mat.shape}")
    return mat


class QFA:
    """Measure-once quantum finite automaton.

    Holds a start vector, one unitary per input symbol, and an accepting
    projector.  The state space is any finite dimension, not only qubit
    registers.
    """

    __slots__ = ("initial", "transitions", "accept")

    def __init__(self, initial, transitions: Mapping[str, object], accept) -> None:
        if isinstance(initial, QState):
            vec = initial.amplitudes.copy()
        else:
            vec = np.asarray(initial, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-9:
            raise ValidationError(f"start vector norm {norm} is not 1")
        dim = vec.size
        table: dict[str, np.ndarray] = {}
        for symbol, raw in transitions.items():
            mat = _as_complex_matrix(raw, dim, f"transition {symbol!r}")
            drift = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
            if drift > 1e-12:
                raise ValidationError(
                    f"transition {symbol!r} is not unitary (defect {drift:.2e})")
            table[symbol] = mat
        proj = _as_complex_matrix(accept, dim, "accept")
        if np.max(np.abs(proj - proj.conj().T)) > 1e-12:
            raise ValidationError("accept operator is not Hermitian")
        if np.max(np.abs(proj @ proj - proj)) > 1e-12:
            raise ValidationError("accept operator is not idempotent")
        self.initial = vec
        self.transitions = table
        self.accept = proj

    @property
    def dim(self) -> int:
        return self.initial.size


def qfa_run(qfa: QFA, word: Sequence[str]) -> float:
    """Acceptance probability of ``word``: ||accept . U_w ... U_1 start||^2."""
    vec = qfa.initial
    for symbol in word:
        mat = qfa.transitions.get(symbol)
        if mat is None:
            raise ValidationError(f"symbol {symbol!r} is not in the alphabet")
        vec = mat @ vec
    kept = qfa.accept @ vec
    return float(np.vdot(kept, kept).real)


def _entries_to_array(value, rank: int, what: str) -> np.ndarray:
    """Decode a JSON-friendly array of the given rank.

    Entries are plain numbers for real data; complex data adds one trailing
    axis of [re, im] pairs.  The expected rank disambiguates the two (a 2x2
    real matrix and a two-entry pair vector share a shape otherwise).
    """
    arr = np.asarray(value, dtype=float)
    if arr.ndim == rank:
        return arr.astype(complex)
    if arr.ndim == rank + 1 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    raise ValidationError(f"{what} has unsupported shape {arr.shape}")


def qfa_from_dict(payload: Mapping[str, object]) -> QFA:
    """Build an automaton from a JSON-shaped mapping.

    Expects keys ``initial`` (vector), ``transitions`` (symbol -> matrix),
    and ``accept`` (matrix).  Entries are plain numbers for real data or
    [re, im] pairs for complex data.
    """
    missing = {"initial", "transitions", "accept"} - set(payload)
    if missing:
        raise ValidationError(f"automaton file is missing {sorted(missing)}")
    transitions = payload["transitions"]
    if not isinstance(transitions, Mapping):
        raise ValidationError("transitions must map symbols to matrices")
    try:
        initial = _entries_to_array(payload["initial"], 1, "initial")
        table = {str(sym): _entries_to_array(mat, 2, f"transition {sym!r}")
                 for sym, mat in transitions.items()}
        accept = _entries_to_array(payload["accept"], 2, "accept")
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed automaton file: {exc}") from exc
    return QFA(initial, table, accept)
