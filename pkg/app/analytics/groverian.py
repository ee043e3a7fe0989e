"""
Groverian Measure
P_max (largest squared overlap with a product state) and G = -ln P_max.

Coordinate ascent: every step fixes all qubits but one (or two) and moves
the free qubits to their analytic optimum, so P never decreases within a
restart. Several restarts guard against local maxima.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.core.errors import StateError
from app.core.statevec import (
    ProductState,
    StateVector,
    max_amplitude_index,
    overlap,
    params_from_qubit_vector,
    partial_overlaps,
)

logger = logging.getLogger(__name__)

# below this squared norm the free qubit's branch overlaps are treated as zero
DEGENERATE_EPS = 1e-28
TIE_TOLERANCE = 1e-12


class OptimizerConfig(BaseModel):
    """Restart and sweep policy. `restarts=None` resolves to 8 + q."""

    restarts: Optional[int] = Field(default=None, ge=1)
    max_sweeps: int = Field(default=200, ge=1)
    tol: float = Field(default=1e-10, gt=0.0)
    pair_step: bool = True
    seed: int = 0

    def restarts_for(self, q: int) -> int:
        return self.restarts if self.restarts is not None else 8 + q


@dataclass(frozen=True)
class StepResult:
    phi: ProductState
    p: float
    degenerate: bool = False


@dataclass
class OptimizerResult:
    p_max: float
    g: float
    nearest: ProductState
    sweeps_used: int
    restart_index: int
    restarts: int
    traces: List[List[float]] = field(default_factory=list)
    degenerate_steps: int = 0

    def to_dict(self) -> dict:
        return {
            "p_max": self.p_max,
            "g": self.g,
            "nearest": self.nearest.to_dict(),
            "sweeps": self.sweeps_used,
            "restarts": self.restarts,
            "restart_index": self.restart_index,
        }


def single_qubit_max(psi: StateVector, phi: ProductState, m: int) -> StepResult:
    """
    Optimize qubit m (1-based) with the others fixed.

    With a = (a_0, a_1) the overlaps of psi with phi's other factors and
    |0> / |1> on qubit m, the optimum is qubit m proportional to a, giving
    |<phi|psi>|^2 = |a_0|^2 + |a_1|^2.
    """
    a = partial_overlaps(phi, psi, keep=(m,))
    weight = float(np.vdot(a, a).real)
    if weight <= DEGENERATE_EPS:
        return StepResult(phi=phi, p=0.0, degenerate=True)
    x_m, theta_m = params_from_qubit_vector(a)
    return StepResult(phi=phi.with_qubit(m, x_m, theta_m), p=weight)


def two_qubit_max(psi: StateVector, phi: ProductState, m1: int, m2: int) -> StepResult:
    """
    Optimize qubits m1 and m2 jointly via the SVD of their 2x2 overlap matrix.

    The top singular pair is a product across the two qubits, and the new
    P is the largest squared singular value.
    """
    if m1 == m2:
        raise StateError(f"Two-qubit step needs distinct qubits, got {m1} twice")
    lo, hi = sorted((m1, m2))
    matrix = partial_overlaps(phi, psi, keep=(lo, hi))
    u, s, vh = np.linalg.svd(matrix)
    p = float(s[0] ** 2)
    if p <= DEGENERATE_EPS:
        return StepResult(phi=phi, p=0.0, degenerate=True)

    x_lo, theta_lo = params_from_qubit_vector(u[:, 0])
    x_hi, theta_hi = params_from_qubit_vector(vh[0, :])
    updated = phi.with_qubit(lo, x_lo, theta_lo).with_qubit(hi, x_hi, theta_hi)
    return StepResult(phi=updated, p=p)


def pair_schedule(q: int, sweep_index: int) -> List[Tuple[int, int]]:
    """(1,2),(3,4),... on even sweeps and (2,3),(4,5),... on odd ones."""
    offset = sweep_index % 2
    pairs = [(m, m + 1) for m in range(1 + offset, q, 2)]
    if not pairs:
        pairs = [(m, m + 1) for m in range(1, q, 2)]
    return pairs


def _sweep(psi: StateVector, phi: ProductState, p: float, pair_step: bool, sweep_index: int) -> Tuple[ProductState, float, int]:
    degenerate = 0
    for m in range(1, psi.q + 1):
        step = single_qubit_max(psi, phi, m)
        if step.degenerate:
            degenerate += 1
            continue
        if step.p >= p:
            phi, p = step.phi, step.p

    if pair_step and psi.q >= 2:
        for m1, m2 in pair_schedule(psi.q, sweep_index):
            step = two_qubit_max(psi, phi, m1, m2)
            if step.degenerate:
                degenerate += 1
                continue
            if step.p >= p:
                phi, p = step.phi, step.p
    return phi, p, degenerate


def ascend(psi: StateVector, phi: ProductState, max_sweeps: int, tol: float, pair_step: bool) -> Tuple[ProductState, List[float], int]:
    """
    Run coordinate ascent from phi until a sweep improves P by less than tol.

    Returns:
        (final product state, P trace starting with the initial P, degenerate step count)
    """
    p = abs(overlap(phi, psi)) ** 2
    trace = [p]
    degenerate = 0
    for sweep_index in range(max_sweeps):
        phi, p_new, skipped = _sweep(psi, phi, p, pair_step, sweep_index)
        degenerate += skipped
        trace.append(p_new)
        improved = p_new - p
        p = p_new
        if improved < tol:
            break
    return phi, trace, degenerate


def initial_points(psi: StateVector, config: OptimizerConfig) -> List[ProductState]:
    """
    Restart 0: complete ES point. Restart 1: largest-amplitude basis state
    (the first member of S for ES inputs). Others: uniform in the parameter
    box, restart i seeded with (seed, i).
    """
    n = config.restarts_for(psi.q)
    points = [ProductState.uniform(psi.q)]
    if n > 1:
        points.append(ProductState.basis(psi.q, max_amplitude_index(psi)))
    for i in range(2, n):
        rng = np.random.default_rng([config.seed, i])
        points.append(ProductState.random(psi.q, rng))
    return points


def p_max(psi: StateVector, config: Optional[OptimizerConfig] = None) -> OptimizerResult:
    """Best P over all restarts; ties keep the earliest restart."""
    config = config or OptimizerConfig()
    best_phi: Optional[ProductState] = None
    best_p = -1.0
    best_index = 0
    best_sweeps = 0
    traces: List[List[float]] = []
    degenerate = 0

    for index, start in enumerate(initial_points(psi, config)):
        phi, trace, skipped = ascend(psi, start, config.max_sweeps, config.tol, config.pair_step)
        traces.append(trace)
        degenerate += skipped
        logger.debug(f"restart {index}: P={trace[-1]:.12f} after {len(trace) - 1} sweeps")
        if trace[-1] > best_p + TIE_TOLERANCE:
            best_phi, best_p, best_index, best_sweeps = phi, trace[-1], index, len(trace) - 1

    p_final = min(1.0, abs(overlap(best_phi, psi)) ** 2)
    return OptimizerResult(
        p_max=p_final,
        g=-math.log(p_final) if p_final > 0.0 else math.inf,
        nearest=best_phi,
        sweeps_used=best_sweeps,
        restart_index=best_index,
        restarts=len(traces),
        traces=traces,
        degenerate_steps=degenerate,
    )


def groverian(psi: StateVector, config: Optional[OptimizerConfig] = None) -> float:
    """G = -ln P_max."""
    return p_max(psi, config).g


def p_max_two_qubit_exact(psi: StateVector) -> float:
    """Largest squared Schmidt coefficient of a two-qubit state."""
    if psi.q != 2:
        raise StateError(f"Exact two-qubit formula needs q = 2, got q = {psi.q}")
    s = np.linalg.svd(psi.amplitudes.reshape(2, 2), compute_uv=False)
    return float(s[0] ** 2)


def _grid_candidates(grid_n: int, thetas: Sequence[float]) -> List[Tuple[float, float]]:
    candidates = []
    for x in np.linspace(0.0, 1.0, grid_n + 1):
        # the phase of a qubit at x = 0 or 1 is only a global phase
        if x == 0.0 or x == 1.0:
            candidates.append((float(x), 0.0))
        else:
            candidates.extend((float(x), float(t)) for t in thetas)
    return candidates


def p_max_grid_oracle(psi: StateVector, grid_n: int = 50, phase_grid_n: int = 8, config: Optional[OptimizerConfig] = None) -> float:
    """
    Exhaustive grid search over product states, then one coordinate-ascent polish.

    Qubits 1..q-1 run over the grid; the last qubit takes its analytic optimum
    for each grid point. The theta grid collapses to {0} when every amplitude
    is a nonnegative real: setting all phases to zero can only increase
    |overlap| there. At most 4*K^(q-2) partial overlaps are live at once
    (K candidates per qubit).
    """
    if psi.q > 4:
        raise StateError(f"Grid oracle is limited to q <= 4, got q = {psi.q}")
    if grid_n < 1 or phase_grid_n < 1:
        raise StateError("Grid sizes must be >= 1")
    config = config or OptimizerConfig()

    amps = psi.amplitudes
    real_nonneg = bool(np.all(np.abs(amps.imag) <= 1e-14) and np.all(amps.real >= -1e-14))
    thetas = [0.0] if real_nonneg else list(-np.pi + 2 * np.pi * np.arange(phase_grid_n) / phase_grid_n)
    candidates = _grid_candidates(grid_n, thetas)
    vecs_conj = np.conj(np.array([[math.sqrt(1.0 - x), math.sqrt(x) * np.exp(1j * t)] for x, t in candidates]))

    if psi.q == 1:
        best_p = float(np.vdot(amps, amps).real)
        chosen = [params_from_qubit_vector(amps)]
    else:
        # contract qubits q-1..2; axes end up as (2_first, 2_last, K_{q-1}, ..., K_2)
        t = psi.as_tensor()
        for axis in reversed(range(1, psi.q - 1)):
            t = np.tensordot(t, vecs_conj, axes=([axis], [1]))

        best_p, best_first, best_rest, best_last = -1.0, 0, (), None
        for c, (v0, v1) in enumerate(vecs_conj):
            partial = v0 * t[0] + v1 * t[1]
            vals = np.sum(np.abs(partial) ** 2, axis=0)
            flat = int(np.argmax(vals))
            value = float(np.ravel(vals)[flat])
            if value > best_p:
                rest = tuple(int(i) for i in np.unravel_index(flat, np.shape(vals))) if np.ndim(vals) else ()
                best_p, best_first, best_rest = value, c, rest
                best_last = partial[(slice(None),) + rest]

        middle = [candidates[best_rest[psi.q - 1 - m]] for m in range(2, psi.q)]
        chosen = [candidates[best_first]] + middle + [params_from_qubit_vector(best_last)]

    start = ProductState(x=[c[0] for c in chosen], theta=[c[1] for c in chosen])
    _, trace, _ = ascend(psi, start, config.max_sweeps, config.tol, config.pair_step)
    logger.debug(f"grid oracle: grid P={best_p:.10f}, polished P={trace[-1]:.10f}")
    return min(1.0, max(best_p, trace[-1]))
