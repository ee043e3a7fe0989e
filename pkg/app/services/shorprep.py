"""
Shor Preprocessing Service
Desk-scale simulation of the order-finding stage of Shor's algorithm.

Flow per attempt:
- pick y, try the gcd shortcut
- tabulate y^a mod N over the main register (residue -> index progression)
- measure the auxiliary register -> periodic state of period r, shift l
- QFT, measure the main register -> j
- continued fractions on j/Q -> candidate r -> gcd(y^{r/2} +- 1, N)

The entangled two-register state is never built: measuring the auxiliary
register is sampled directly from the residue classes, which gives the same
outcome distribution.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from app.analytics.qft import qft
from app.analytics.states import PeriodicSpec, periodic_state
from app.core.errors import FactoringError
from app.core.statevec import StateVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModExpTable:
    """Residue z -> ordered indices a in [0, Q) with y^a = z (mod N)."""

    N: int
    y: int
    q: int
    r: int
    classes: Dict[int, np.ndarray]

    @property
    def Q(self) -> int:
        return 2 ** self.q

    def shift_of(self, z: int) -> int:
        return int(self.classes[z][0])


class ShorAttempt(BaseModel):
    y: int
    z: Optional[int] = None
    l: Optional[int] = None
    r_true: Optional[int] = None
    j: Optional[int] = None
    r_candidate: Optional[int] = None
    factor: Optional[int] = None
    note: str = ""


class ShorReport(BaseModel):
    N: int
    q: Optional[int] = None
    success: bool
    factor: Optional[int] = None
    reason: str = ""
    attempts: List[ShorAttempt] = []


def order(y: int, N: int) -> int:
    """Smallest r >= 1 with y^r = 1 (mod N), by iterated multiplication."""
    if N < 2:
        raise FactoringError(f"Modulus must be >= 2, got {N}")
    if math.gcd(y, N) != 1:
        raise FactoringError(f"y={y} is not coprime to N={N}")
    value = y % N
    r = 1
    while value != 1 % N:
        value = (value * y) % N
        r += 1
    return r


def modexp_superposition(N: int, y: int, q: int) -> ModExpTable:
    """Tabulate the auxiliary-register outcomes of sum_a |a>|y^a mod N>."""
    if 2 ** q < N:
        raise FactoringError(f"Main register too small: 2^{q} < N={N}")
    r = order(y, N)
    Q = 2 ** q
    classes = {pow(y, l, N): np.arange(l, Q, r, dtype=np.int64) for l in range(min(r, Q))}
    return ModExpTable(N=N, y=y, q=q, r=r, classes=classes)


def measure_auxiliary(table: ModExpTable, rng: np.random.Generator) -> Tuple[int, PeriodicSpec]:
    """Sample residue z with probability |indices(z)|/Q; return z and its periodic spec."""
    a = int(rng.integers(table.Q))
    l = a % table.r
    z = pow(table.y, l, table.N)
    return z, PeriodicSpec(q=table.q, r=table.r, l=l)


def measure_register(psi: StateVector, rng: np.random.Generator) -> int:
    """Sample a basis index with probability |amplitude|^2."""
    probs = psi.probabilities()
    probs = probs / probs.sum()
    return int(rng.choice(psi.dim, p=probs))


def continued_fraction(numerator: int, denominator: int) -> List[int]:
    """Exact continued-fraction terms of numerator/denominator."""
    terms = []
    while denominator:
        whole, rest = divmod(numerator, denominator)
        terms.append(whole)
        numerator, denominator = denominator, rest
    return terms


def convergents(terms: List[int]) -> List[Fraction]:
    result = []
    h_prev, h_curr = 0, 1
    k_prev, k_curr = 1, 0
    for term in terms:
        h_prev, h_curr = h_curr, term * h_curr + h_prev
        k_prev, k_curr = k_curr, term * k_curr + k_prev
        result.append(Fraction(h_curr, k_curr))
    return result


def extract_period(j: int, Q: int, N: int) -> Optional[int]:
    """
    Denominator of the last convergent of j/Q with denominator < N.

    Returns None for j = 0 (nothing to expand).
    """
    if not 0 <= j < Q:
        raise FactoringError(f"Measured index {j} out of range [0, {Q})")
    if j == 0:
        return None
    best = None
    for frac in convergents(continued_fraction(j, Q)):
        if frac.denominator >= N:
            break
        best = frac.denominator
    return best


def confirm_period(y: int, candidate: int, N: int) -> Optional[int]:
    """
    Smallest multiple of the candidate that is a true period of y mod N.

    A convergent denominator is a proper divisor of r whenever the measured
    j/Q approximates s/r with gcd(s, r) > 1.
    """
    multiple = candidate
    while multiple < N:
        if pow(y, multiple, N) == 1:
            return multiple
        multiple += candidate
    return None


def is_prime(n: int) -> bool:
    """Deterministic trial division (small n only)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_power_base(n: int) -> Optional[int]:
    """b if n = b^k for some k >= 2, else None."""
    for k in range(2, n.bit_length() + 1):
        root = round(n ** (1.0 / k))
        for candidate in (root - 1, root, root + 1):
            if candidate > 1 and candidate ** k == n:
                return candidate
    return None


def default_register_width(N: int) -> int:
    """Smallest q with 2^q >= N^2."""
    return max(1, (N * N - 1).bit_length())


def _attempt(N: int, q: int, rng: np.random.Generator) -> ShorAttempt:
    y = int(rng.integers(2, N))
    shared = math.gcd(y, N)
    if shared > 1:
        return ShorAttempt(y=y, factor=shared, note="gcd shortcut")

    table = modexp_superposition(N, y, q)
    z, spec = measure_auxiliary(table, rng)
    j = measure_register(qft(periodic_state(spec)), rng)
    attempt = ShorAttempt(y=y, z=z, l=spec.l, r_true=table.r, j=j)

    candidate = extract_period(j, table.Q, N)
    if candidate is None:
        attempt.note = "measured j = 0"
        return attempt
    period = confirm_period(y, candidate, N)
    attempt.r_candidate = period if period is not None else candidate
    if period is None:
        attempt.note = "candidate is not a period"
        return attempt
    if period % 2:
        attempt.note = "odd period"
        return attempt

    half = pow(y, period // 2, N)
    if half == N - 1:
        attempt.note = "y^(r/2) = -1 (mod N)"
        return attempt
    for factor in (math.gcd(half - 1, N), math.gcd(half + 1, N)):
        if 1 < factor < N:
            attempt.factor = factor
            return attempt
    attempt.note = "trivial gcd"
    return attempt


def shor_demo(N: int, rng: np.random.Generator, attempts: int = 10, q: Optional[int] = None) -> ShorReport:
    """
    Factor N with simulated order finding.

    Classical shortcuts (even N, prime powers) return without any attempt.

    Raises:
        FactoringError: N <= 3 or N prime
    """
    if N <= 3:
        raise FactoringError(f"N must be > 3, got {N}")
    if N % 2 == 0:
        return ShorReport(N=N, success=True, factor=2, reason="even N")
    if is_prime(N):
        raise FactoringError(f"N={N} is prime")
    base = prime_power_base(N)
    if base is not None:
        return ShorReport(N=N, success=True, factor=base, reason="prime power")

    q = q if q is not None else default_register_width(N)
    report = ShorReport(N=N, q=q, success=False)
    for index in range(attempts):
        attempt = _attempt(N, q, rng)
        report.attempts.append(attempt)
        logger.info(f"attempt {index + 1}: y={attempt.y} j={attempt.j} r={attempt.r_candidate} factor={attempt.factor} {attempt.note}")
        if attempt.factor is not None:
            report.success = True
            report.factor = attempt.factor
            report.reason = attempt.note or "order finding"
            return report

    report.reason = f"no factor within {attempts} attempts"
    return report
