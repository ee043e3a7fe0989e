"""
State Families
Constructors for basis, equal-superposition (ES), periodic, complete ES,
GHZ, W, balanced generalized W, phased ES and Haar-random states.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional

import numpy as np

from app.core.errors import SpecError
from app.core.statevec import StateVector, basis_bits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EsSpec:
    """Nonempty set S of distinct basis indices of a q-qubit register."""

    q: int
    members: FrozenSet[int]

    def __post_init__(self):
        if self.q < 1:
            raise SpecError(f"Qubit count must be >= 1, got {self.q}")
        members = frozenset(int(k) for k in self.members)
        if not members:
            raise SpecError("ES set S must be nonempty")
        if min(members) < 0 or max(members) >= 2 ** self.q:
            raise SpecError(f"ES indices must lie in [0, {2 ** self.q})")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, q: int, members: Iterable[int]) -> "EsSpec":
        return cls(q=q, members=frozenset(members))

    @property
    def indices(self) -> np.ndarray:
        """Sorted member indices."""
        return np.array(sorted(self.members), dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class PeriodicSpec:
    """
    Periodic state parameters: indices l, l+r, ..., l+(A-1)r below Q = 2^q.

    Shifts are not reduced mod r: l >= r is rejected.
    """

    q: int
    r: int
    l: int = 0

    def __post_init__(self):
        if self.q < 1:
            raise SpecError(f"Qubit count must be >= 1, got {self.q}")
        if not 1 <= self.r <= 2 ** self.q:
            raise SpecError(f"Period must satisfy 1 <= r <= Q={2 ** self.q}, got r={self.r}")
        if not 0 <= self.l < self.r:
            raise SpecError(f"Shift must satisfy 0 <= l < r, got l={self.l}, r={self.r}")

    @property
    def Q(self) -> int:
        return 2 ** self.q

    @property
    def A(self) -> int:
        """Term count ceil((Q - l) / r)."""
        return -(-(self.Q - self.l) // self.r)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.l, self.Q, self.r, dtype=np.int64)

    def to_es(self) -> EsSpec:
        return EsSpec.of(self.q, self.indices.tolist())


def basis_state(q: int, k: int) -> StateVector:
    if q < 1:
        raise SpecError(f"Qubit count must be >= 1, got {q}")
    if not 0 <= k < 2 ** q:
        raise SpecError(f"Basis index {k} out of range [0, {2 ** q})")
    amps = np.zeros(2 ** q, dtype=np.complex128)
    amps[k] = 1.0
    return StateVector(q=q, amplitudes=amps)


def es_state(spec: EsSpec) -> StateVector:
    """Amplitude 1/sqrt|S| on every k in S."""
    amps = np.zeros(2 ** spec.q, dtype=np.complex128)
    amps[spec.indices] = 1.0 / math.sqrt(spec.size)
    return StateVector(q=spec.q, amplitudes=amps)


def periodic_state(spec: PeriodicSpec) -> StateVector:
    amps = np.zeros(spec.Q, dtype=np.complex128)
    amps[spec.indices] = 1.0 / math.sqrt(spec.A)
    return StateVector(q=spec.q, amplitudes=amps)


def complete_es(q: int) -> StateVector:
    """|+>^q, the equal superposition of all Q basis states."""
    if q < 1:
        raise SpecError(f"Qubit count must be >= 1, got {q}")
    return periodic_state(PeriodicSpec(q=q, r=1, l=0))


def ghz_spec(q: int) -> EsSpec:
    if q < 2:
        raise SpecError(f"GHZ needs q >= 2, got {q}")
    return EsSpec.of(q, [0, 2 ** q - 1])


def w_spec(q: int) -> EsSpec:
    if q < 2:
        raise SpecError(f"W needs q >= 2, got {q}")
    return EsSpec.of(q, [2 ** m for m in range(q)])


def balanced_w_spec(n: int) -> EsSpec:
    """All 2n-bit strings with exactly n ones."""
    if n < 1:
        raise SpecError(f"Balanced W needs n >= 1, got {n}")
    q = 2 * n
    members = [sum(1 << (q - 1 - pos) for pos in ones) for ones in combinations(range(q), n)]
    return EsSpec.of(q, members)


def ghz(q: int) -> StateVector:
    return es_state(ghz_spec(q))


def w(q: int) -> StateVector:
    return es_state(w_spec(q))


def balanced_w(n: int) -> StateVector:
    return es_state(balanced_w_spec(n))


def phased_es(spec: EsSpec, p: float) -> StateVector:
    """
    ES state with phase e^{-2 pi i p k / Q} on member k.

    p is any real; it is not reduced mod Q.
    """
    Q = 2 ** spec.q
    ks = spec.indices
    amps = np.zeros(Q, dtype=np.complex128)
    amps[ks] = np.exp(-2j * np.pi * p * ks / Q) / math.sqrt(spec.size)
    return StateVector(q=spec.q, amplitudes=amps)


def phase_gates(q: int, p: float) -> List[np.ndarray]:
    """
    Single-qubit gates taking es_state(S) to phased_es(S, p).

    Gate m (1-based) is diag(1, e^{-2 pi i p 2^{q-m} / Q}).
    """
    Q = 2 ** q
    return [np.diag([1.0, np.exp(-2j * np.pi * p * 2 ** (q - m) / Q)]) for m in range(1, q + 1)]


def random_state(q: int, rng: np.random.Generator) -> StateVector:
    """Haar-uniform pure state from normalized complex Gaussians."""
    if q < 1:
        raise SpecError(f"Qubit count must be >= 1, got {q}")
    Q = 2 ** q
    amps = rng.standard_normal(Q) + 1j * rng.standard_normal(Q)
    return StateVector.from_amplitudes(amps)


def constant_qubits(spec: EsSpec) -> Dict[int, int]:
    """
    Qubits that take the same bit on every member of S.

    Returns:
        Mapping 1-based qubit -> its constant bit. Empty for nonreducible states.
    """
    bits = np.array([basis_bits(k, spec.q) for k in spec.indices])
    constant = {}
    for axis in range(spec.q):
        column = bits[:, axis]
        if np.all(column == column[0]):
            constant[axis + 1] = int(column[0])
    return constant


def is_reducible(spec: EsSpec) -> bool:
    return bool(constant_qubits(spec))


def parse_index_set(text: str) -> List[int]:
    """Parse `--set` values like "0,3" or "1 2 4"."""
    tokens = [t for t in text.replace(",", " ").split() if t]
    try:
        return [int(t, 0) for t in tokens]
    except ValueError as e:
        raise SpecError(f"Invalid index set {text!r}: {e}") from e


STATE_KINDS = ("periodic", "es", "ghz", "w", "balanced-w", "random", "basis")


def build_state(
    kind: str,
    q: Optional[int] = None,
    r: Optional[int] = None,
    l: int = 0,
    members: Optional[str] = None,
    p: Optional[float] = None,
    k: int = 0,
    seed: int = 0,
) -> StateVector:
    """
    Construct a state by family name (shared by the CLI `gen` command and the API).

    `members` is an index-set string for kind "es"; `p` turns es/periodic into
    the phased variant; `q` is 2n for "balanced-w".
    """
    needed = {"periodic": ("q", "r"), "es": ("q", "members")}.get(kind, ("q",))
    given = {"q": q, "r": r, "members": members}
    missing = [name for name in needed if given[name] is None]
    if kind not in STATE_KINDS:
        raise SpecError(f"Unknown state kind {kind!r}; expected one of {', '.join(STATE_KINDS)}")
    if missing:
        raise SpecError(f"State kind {kind!r} needs {', '.join(missing)}")

    if kind in ("periodic", "es"):
        spec = PeriodicSpec(q=q, r=r, l=l).to_es() if kind == "periodic" else EsSpec.of(q, parse_index_set(members))
        return es_state(spec) if p is None else phased_es(spec, p)
    if kind == "basis":
        return basis_state(q, k)
    if kind == "random":
        return random_state(q, np.random.default_rng(seed))
    if kind == "balanced-w":
        if q % 2:
            raise SpecError(f"Balanced W needs an even qubit count, got {q}")
        return balanced_w(q // 2)
    return ghz(q) if kind == "ghz" else w(q)
