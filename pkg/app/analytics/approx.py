"""
Approximated Entanglement Formulas
Closed forms and approximations of P_max / G for ES and periodic states,
plus the structural tools behind them: even-period reduction, recursive
decomposition by the most significant bit, and Hamming shells.

Branch boundaries are compared in integers (A^2 <= Q, r^2 < Q), so odd q
with irrational sqrt(Q) needs no floating point.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from app.analytics.states import EsSpec, PeriodicSpec, basis_state, constant_qubits, es_state, periodic_state
from app.core.errors import SpecError
from app.core.statevec import StateVector, hamming, tensor

logger = logging.getLogger(__name__)

BranchName = Literal["ascending", "descending"]


@dataclass(frozen=True)
class BranchTag:
    """Ascending: complete ES is the presumed nearest product state. Descending: a basis state."""

    branch: BranchName
    boundary: float

    @property
    def ascending(self) -> bool:
        return self.branch == "ascending"


def approx_p_es(q: int, s: int) -> float:
    """1/s for s <= sqrt(Q), else s/Q (max of the basis-state and complete-ES guesses)."""
    Q = 2 ** q
    if not 1 <= s <= Q:
        raise SpecError(f"Set size must satisfy 1 <= s <= Q={Q}, got {s}")
    return 1.0 / s if s * s <= Q else s / Q


def approx_p_periodic(spec: PeriodicSpec) -> Tuple[float, BranchTag]:
    """P = 1/A if A <= sqrt(Q) else A/Q, with A = ceil((Q - l)/r)."""
    A, Q = spec.A, spec.Q
    boundary = math.sqrt(Q)
    if A * A <= Q:
        return 1.0 / A, BranchTag("descending", boundary)
    return A / Q, BranchTag("ascending", boundary)


def approx_g_periodic(q: int, r: int) -> float:
    """Simple formula: ln r if r < sqrt(Q), else ln(Q/r)."""
    Q = 2 ** q
    if not 1 <= r <= Q:
        raise SpecError(f"Period must satisfy 1 <= r <= Q={Q}, got {r}")
    return math.log(r) if r * r < Q else math.log(Q / r)


def g_simple_branch(q: int, r: int) -> BranchTag:
    boundary = math.sqrt(2 ** q)
    return BranchTag("ascending" if r * r < 2 ** q else "descending", boundary)


def closed_form_p(name: str, param: int) -> float:
    """
    Exact P_max of the named family.

    Args:
        name: "ghz" (param q >= 2), "w" (param q >= 2) or "balanced_w" (param n >= 1)
    """
    key = name.lower().replace("-", "_")
    if key == "ghz":
        if param < 2:
            raise SpecError(f"GHZ needs q >= 2, got {param}")
        return 0.5
    if key == "w":
        if param < 2:
            raise SpecError(f"W needs q >= 2, got {param}")
        return ((param - 1) / param) ** (param - 1)
    if key == "balanced_w":
        if param < 1:
            raise SpecError(f"Balanced W needs n >= 1, got {param}")
        return math.comb(2 * param, param) / 4 ** param
    raise SpecError(f"Unknown closed-form family {name!r}")


def asymptotic_balanced_w(n: int) -> float:
    """Large-n estimate 1/sqrt(pi n) of the balanced W closed form."""
    return 1.0 / math.sqrt(math.pi * n)


def w_limit() -> float:
    """P_max(W) tends to 1/e as q grows (the basis-state guess tends to 0)."""
    return 1.0 / math.e


@dataclass(frozen=True)
class Reduction:
    """Even-period reduction: original = reduced (x) |bits[-1]> ... (x) |bits[0]>."""

    original: PeriodicSpec
    reduced: PeriodicSpec
    bits: List[int] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return bool(self.bits)


def reduce_even_period(spec: PeriodicSpec, full: bool = False) -> Reduction:
    """
    Detach the constant least significant qubit of an even-period state.

    (q, 2r', l) -> (q-1, r', floor(l/2)) with detached bit l mod 2; odd
    periods come back unchanged. With `full`, repeat until r is odd (or a
    single qubit is left). bits[0] is the least significant detached qubit.
    """
    current = spec
    bits: List[int] = []
    while current.r % 2 == 0 and current.q > 1:
        bits.append(current.l % 2)
        current = PeriodicSpec(q=current.q - 1, r=current.r // 2, l=current.l // 2)
        if not full:
            break
    return Reduction(original=spec, reduced=current, bits=bits)


def expand_reduction(reduction: Reduction) -> StateVector:
    """Rebuild the original state from the reduced spec and detached bits."""
    state = periodic_state(reduction.reduced)
    for bit in reversed(reduction.bits):
        state = tensor(state, basis_state(1, bit))
    return state


@dataclass(frozen=True)
class Decomposition:
    """Split of a periodic state's index set by the most significant bit."""

    spec: PeriodicSpec
    a0: int
    a1: int
    low_indices: Tuple[int, ...]
    high_indices: Tuple[int, ...]
    l_prime_actual: Optional[int]
    l_prime_formula: int

    @property
    def degenerate(self) -> bool:
        """True when one half of the split is empty."""
        return self.a0 == 0 or self.a1 == 0

    @property
    def formula_matches(self) -> bool:
        return self.l_prime_actual == self.l_prime_formula

    @property
    def parity_rule_holds(self) -> bool:
        """A even -> A_0 = A_1 = A/2; A odd -> A_0 = (A+1)/2, A_1 = (A-1)/2."""
        A = self.a0 + self.a1
        if A % 2 == 0:
            return self.a0 == self.a1 == A // 2
        return self.a0 == (A + 1) // 2 and self.a1 == (A - 1) // 2


def decompose_recursive(spec: PeriodicSpec) -> Decomposition:
    """
    A_0 / A_1 and the high component's shift, measured by enumeration.

    The closed form -2^{q-1} mod r is recorded next to the enumerated shift;
    the two agree for l = 0 but not in general.
    """
    if spec.q < 2:
        raise SpecError(f"Recursive decomposition needs q >= 2, got {spec.q}")
    half = spec.Q // 2
    members = spec.indices
    low = members[members < half]
    high = members[members >= half] - half
    l_actual = int(high[0]) if high.size else None
    decomposition = Decomposition(
        spec=spec,
        a0=int(low.size),
        a1=int(high.size),
        low_indices=tuple(int(k) for k in low),
        high_indices=tuple(int(k) for k in high),
        l_prime_actual=l_actual,
        l_prime_formula=(-half) % spec.r,
    )
    if decomposition.degenerate:
        logger.debug(f"decomposition of {spec} has an empty component (A0={decomposition.a0}, A1={decomposition.a1})")
    return decomposition


def recompose(decomposition: Decomposition) -> StateVector:
    """sqrt(A0/A)|0> (x) low + sqrt(A1/A)|1> (x) high, built on q-1 qubit components."""
    spec = decomposition.spec
    A = decomposition.a0 + decomposition.a1
    amps = np.zeros(spec.Q, dtype=np.complex128)
    half = spec.Q // 2
    for weight, indices, offset in (
        (decomposition.a0, decomposition.low_indices, 0),
        (decomposition.a1, decomposition.high_indices, half),
    ):
        if weight == 0:
            continue
        component = es_state(EsSpec.of(spec.q - 1, indices))
        amps[offset:offset + half] = math.sqrt(weight / A) * component.amplitudes
    return StateVector(q=spec.q, amplitudes=amps)


def hamming_shells(spec: EsSpec, k0: int) -> np.ndarray:
    """|S_m| = #{k in S : d(k, k0) = m} for m = 0..q."""
    if not 0 <= k0 < 2 ** spec.q:
        raise SpecError(f"Reference index {k0} out of range for q={spec.q}")
    shells = np.zeros(spec.q + 1, dtype=np.int64)
    for k in spec.members:
        shells[hamming(k, k0)] += 1
    return shells


def agreement_fraction(spec: EsSpec, k0: int, qubits: List[int]) -> float:
    """Share of S that agrees with k0 on the given 1-based qubits."""
    mask = sum(1 << (spec.q - m) for m in qubits)
    agreeing = sum(1 for k in spec.members if (k ^ k0) & mask == 0)
    return agreeing / spec.size


def is_local_max_basis(spec: EsSpec, k: int) -> bool:
    """
    True when k is in S and no member of S is at Hamming distance 1 from k.

    Then |k> is a local maximum of the overlap function: moving any single
    x_m off its edge mixes in a basis state outside S.
    """
    return k in spec.members and all(hamming(k, other) != 1 for other in spec.members)


def factor_out_constant_qubits(spec: EsSpec) -> Tuple[Optional[EsSpec], Dict[int, int]]:
    """
    Remove qubits that are constant across S.

    Returns:
        (spec on the remaining qubits or None if every qubit is constant,
         mapping 1-based qubit -> detached bit)
    """
    constant = constant_qubits(spec)
    free = [m for m in range(1, spec.q + 1) if m not in constant]
    if not free:
        return None, constant
    reduced = set()
    for k in spec.members:
        bits = [(k >> (spec.q - m)) & 1 for m in free]
        reduced.add(int("".join(str(b) for b in bits), 2))
    return EsSpec.of(len(free), reduced), constant


@dataclass(frozen=True)
class BasisOptimality:
    p_basis: float
    p_numeric: float
    local_max: bool

    @property
    def basis_is_global(self) -> bool:
        return self.p_numeric <= self.p_basis + 1e-9


def basis_state_is_global(spec: EsSpec, k: Optional[int] = None, config=None) -> BasisOptimality:
    """
    Compare the basis-state guess 1/|S| with the numeric P_max.

    Reported, not assumed: for descending-branch periodic states a member of
    S is always a local maximum, and this tells whether it is also global.
    """
    from app.analytics.groverian import p_max

    k = int(spec.indices[0]) if k is None else k
    result = p_max(es_state(spec), config)
    return BasisOptimality(p_basis=1.0 / spec.size, p_numeric=result.p_max, local_max=is_local_max_basis(spec, k))


def approx_summary(spec: PeriodicSpec) -> Dict[str, object]:
    """Both approximations of a periodic state, as printed by `approx`."""
    p_accurate, tag = approx_p_periodic(spec)
    g_simple = approx_g_periodic(spec.q, spec.r)
    return {
        "p_accurate": p_accurate,
        "p_simple": math.exp(-g_simple),
        "g_accurate": -math.log(p_accurate),
        "g_simple": g_simple,
        "branch": tag.branch,
        "A": spec.A,
    }
