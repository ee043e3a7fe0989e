"""
Experiment Runner
Entanglement-vs-period sweeps, QFT-induced entanglement change (Delta G)
for periodic and random states, and amplitude profiles before/after the QFT.

Records are written to CSV with a fixed column order. Work can be spread
over a process pool; results are always emitted in input order, so a fixed
seed gives byte-identical files regardless of worker count.

Seed scheme: the two G evaluations inside Delta G use restart seeds
derive_seed(seed, 0) (before the QFT) and derive_seed(seed, 1) (after).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import Pool
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, model_validator

from app.analytics.approx import approx_summary
from app.analytics.groverian import OptimizerConfig, OptimizerResult, p_max
from app.analytics.qft import qft
from app.analytics.states import PeriodicSpec, periodic_state, random_state
from app.core.errors import SpecError
from app.core.statevec import StateVector

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "experiment", "kind", "q", "r", "l", "seed",
    "g_before", "g_after", "delta_g", "g_accurate", "g_simple",
    "branch", "restarts", "sweeps",
]
INT_COLUMNS = ["q", "r", "l", "seed", "restarts", "sweeps"]

DEFAULT_MAX_STATES = 10_000


class ExperimentRecord(BaseModel):
    """One CSV row. Fields that do not apply stay None and serialize empty."""

    experiment: str
    kind: str
    q: int
    r: Optional[int] = None
    l: Optional[int] = None
    seed: Optional[int] = None
    g_before: Optional[float] = None
    g_after: Optional[float] = None
    delta_g: Optional[float] = None
    g_accurate: Optional[float] = None
    g_simple: Optional[float] = None
    branch: Optional[str] = None
    restarts: Optional[int] = None
    sweeps: Optional[int] = None

    @model_validator(mode="after")
    def _check_delta(self):
        if self.g_before is not None and self.g_after is not None:
            if self.delta_g != self.g_after - self.g_before:
                raise ValueError("delta_g must equal g_after - g_before")
        for name in ("g_before", "g_after", "g_accurate", "g_simple"):
            value = getattr(self, name)
            if value is not None and value < 0.0:
                raise ValueError(f"{name} must be >= 0")
        return self


def derive_seed(seed: int, counter: int) -> int:
    """Independent 32-bit seed for stream `counter` under a master seed."""
    return int(np.random.SeedSequence([seed, counter]).generate_state(1)[0])


def _with_seed(config: OptimizerConfig, counter: int) -> OptimizerConfig:
    return config.model_copy(update={"seed": derive_seed(config.seed, counter)})


def evaluate_delta_g(psi: StateVector, config: OptimizerConfig) -> Tuple[OptimizerResult, OptimizerResult]:
    """Optimizer results for psi and qft(psi), same policy, independent restart seeds."""
    before = p_max(psi, _with_seed(config, 0))
    after = p_max(qft(psi), _with_seed(config, 1))
    return before, after


def delta_g(psi: StateVector, config: Optional[OptimizerConfig] = None) -> float:
    """G(QFT(psi)) - G(psi)."""
    before, after = evaluate_delta_g(psi, config or OptimizerConfig())
    return after.g - before.g


def run_tasks(func: Callable, tasks: Sequence, workers: int = 1) -> List:
    """Map over tasks, in a process pool when workers > 1; order is preserved."""
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    with Pool(processes=workers) as pool:
        return pool.map(func, tasks)


def _approximations(spec: PeriodicSpec) -> dict:
    summary = approx_summary(spec)
    return {key: summary[key] for key in ("g_accurate", "g_simple", "branch")}


def _sweep_task(task: Tuple[int, int, int, OptimizerConfig]) -> ExperimentRecord:
    q, r, l, config = task
    spec = PeriodicSpec(q=q, r=r, l=l)
    result = p_max(periodic_state(spec), config)
    return ExperimentRecord(
        experiment="sweep", kind="periodic", q=q, r=r, l=l, seed=config.seed,
        g_before=result.g, restarts=result.restarts, sweeps=result.sweeps_used,
        **_approximations(spec),
    )


def _periodic_delta_task(task: Tuple[int, int, int, OptimizerConfig]) -> ExperimentRecord:
    q, r, l, config = task
    spec = PeriodicSpec(q=q, r=r, l=l)
    before, after = evaluate_delta_g(periodic_state(spec), config)
    return ExperimentRecord(
        experiment="delta-g", kind="periodic", q=q, r=r, l=l, seed=config.seed,
        g_before=before.g, g_after=after.g, delta_g=after.g - before.g,
        restarts=before.restarts, sweeps=before.sweeps_used + after.sweeps_used,
        **_approximations(spec),
    )


def _random_delta_task(task: Tuple[int, int, OptimizerConfig]) -> ExperimentRecord:
    q, seed, config = task
    psi = random_state(q, np.random.default_rng(seed))
    before, after = evaluate_delta_g(psi, config)
    return ExperimentRecord(
        experiment="delta-g", kind="random", q=q, seed=seed,
        g_before=before.g, g_after=after.g, delta_g=after.g - before.g,
        restarts=before.restarts, sweeps=before.sweeps_used + after.sweeps_used,
    )


def odd_periods(q: int, l: int) -> List[int]:
    """Odd r in (l, Q]."""
    return [r for r in range(1, 2 ** q + 1, 2) if r > l]


def sweep_periods(q: int, l: int, config: Optional[OptimizerConfig] = None, workers: int = 1) -> List[ExperimentRecord]:
    """Numeric G and both approximations for every odd period r > l."""
    if q < 1 or l < 0:
        raise SpecError(f"Sweep needs q >= 1 and l >= 0, got q={q}, l={l}")
    config = config or OptimizerConfig()
    tasks = [(q, r, l, config) for r in odd_periods(q, l)]
    logger.info(f"sweep q={q} l={l}: {len(tasks)} odd periods")
    return run_tasks(_sweep_task, tasks, workers)


def stride_subsample(items: List, cap: Optional[int]) -> List:
    """Every k-th item so that at most `cap` remain (deterministic)."""
    if not cap or len(items) <= cap:
        return items
    stride = math.ceil(len(items) / cap)
    return items[::stride]


@dataclass
class DeltaGSummary:
    mean_abs: float
    max_abs: float
    mean: float
    std: float
    count: int
    records: List[ExperimentRecord] = field(default_factory=list)

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.count) if self.count > 1 else 0.0


def _summarize(records: List[ExperimentRecord]) -> DeltaGSummary:
    deltas = np.array([rec.delta_g for rec in records], dtype=np.float64)
    return DeltaGSummary(
        mean_abs=float(np.mean(np.abs(deltas))),
        max_abs=float(np.max(np.abs(deltas))),
        mean=float(np.mean(deltas)),
        std=float(np.std(deltas, ddof=1)) if deltas.size > 1 else 0.0,
        count=int(deltas.size),
        records=records,
    )


def periodic_pairs(q: int) -> List[Tuple[int, int]]:
    """Every (r, l) with odd r <= Q and 0 <= l < r."""
    return [(r, l) for r in range(1, 2 ** q + 1, 2) for l in range(r)]


def delta_g_periodic_average(
    q: int,
    config: Optional[OptimizerConfig] = None,
    max_states: Optional[int] = DEFAULT_MAX_STATES,
    workers: int = 1,
) -> DeltaGSummary:
    """
    Mean and max |Delta G| over periodic states of q qubits.

    Only odd periods are enumerated: an even period factors into an odd one
    on fewer qubits times a constant qubit.
    """
    if q < 2:
        raise SpecError(f"Periodic average needs q >= 2, got {q}")
    config = config or OptimizerConfig()
    pairs = periodic_pairs(q)
    chosen = stride_subsample(pairs, max_states)
    if len(chosen) < len(pairs):
        logger.info(f"q={q}: subsampled {len(chosen)} of {len(pairs)} periodic states")
    tasks = [(q, r, l, config) for r, l in chosen]
    return _summarize(run_tasks(_periodic_delta_task, tasks, workers))


def delta_g_random(
    q: int,
    samples: int,
    config: Optional[OptimizerConfig] = None,
    rng: Optional[np.random.Generator] = None,
    workers: int = 1,
) -> DeltaGSummary:
    """Delta G over Haar-random states; each sample's seed is drawn from rng and recorded."""
    if samples < 1:
        raise SpecError(f"Need at least one sample, got {samples}")
    config = config or OptimizerConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    tasks = [(q, int(rng.integers(2 ** 32)), config) for _ in range(samples)]
    logger.info(f"random delta-g q={q}: {samples} samples")
    return _summarize(run_tasks(_random_delta_task, tasks, workers))


@dataclass
class Fig1Data:
    spec: PeriodicSpec
    before: np.ndarray
    after: np.ndarray
    r_markers: List[Fraction]
    qr_markers: List[Fraction]

    def to_frame(self) -> pd.DataFrame:
        """Long format: series,index,value,exact."""
        rows = []
        for name, values in (("before", self.before), ("after", self.after)):
            rows.extend({"series": name, "index": k, "value": float(v), "exact": ""} for k, v in enumerate(values))
        for name, markers in (("marker_r", self.r_markers), ("marker_q_over_r", self.qr_markers)):
            rows.extend({"series": name, "index": n, "value": float(m), "exact": str(m)} for n, m in enumerate(markers))
        return pd.DataFrame(rows, columns=["series", "index", "value", "exact"])


def fig1_data(spec: PeriodicSpec) -> Fig1Data:
    """|amplitudes| of the periodic state and of its QFT, with period markers."""
    psi = periodic_state(spec)
    return Fig1Data(
        spec=spec,
        before=np.abs(psi.amplitudes),
        after=np.abs(qft(psi).amplitudes),
        r_markers=[Fraction(n * spec.r) for n in range(-(-spec.Q // spec.r))],
        qr_markers=[Fraction(n * spec.Q, spec.r) for n in range(spec.r)],
    )


def records_to_frame(records: Iterable[ExperimentRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([rec.model_dump() for rec in records], columns=CSV_COLUMNS)
    return frame.astype({col: "Int64" for col in INT_COLUMNS})


def write_csv(frame: pd.DataFrame, path: str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False, na_rep="", lineterminator="\n")
    logger.info(f"✓ Wrote {len(frame)} rows to {out}")
    return out


def write_records_csv(records: Iterable[ExperimentRecord], path: str) -> Path:
    return write_csv(records_to_frame(records), path)
