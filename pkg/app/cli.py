"""
Command-line interface

    periodic-groverian gen --kind periodic --q 8 --r 7 --l 3 > psi.json
    periodic-groverian qft --input psi.json > phi.json
    periodic-groverian gmeasure --input phi.json --restarts 12
    periodic-groverian approx --q 10 --r 37 --l 13
    periodic-groverian shor --n 21 --seed 4
    periodic-groverian sweep --q 8 --l 6 --out fig2_q8_l6.csv
    periodic-groverian delta-g --kind random --q 6 --samples 500 --seed 1 --out dg.csv
    periodic-groverian fig1 --q 8 --r 10 --l 0 --out fig1.csv

Every long flag can also be set from a key-value file passed with --config
(`restarts=12`, `no_pair_step=true`, ...). Precedence: built-in defaults <
environment (GROVERIAN_*) < config file < flags.

JSON and CSV go to stdout or --out; logs go to stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from app.analytics.approx import approx_summary
from app.analytics.groverian import OptimizerConfig, p_max
from app.analytics.qft import inverse_qft, periodic_qft_amplitudes, qft
from app.analytics.states import STATE_KINDS, PeriodicSpec, build_state
from app.core.config import coerce, load_config_file, settings
from app.core.errors import GroverianError, SpecError, StateError
from app.core.statevec import StateVector
from app.services.shorprep import shor_demo
from app.workers.experiments import (
    delta_g_periodic_average,
    delta_g_random,
    fig1_data,
    records_to_frame,
    sweep_periods,
    write_csv,
)

logger = logging.getLogger("periodic_groverian")


@dataclass(frozen=True)
class Option:
    flag: str
    kind: type
    default: Any = None
    help: str = ""
    choices: Optional[Sequence[str]] = None
    required: bool = False

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


COMMON = [
    Option("--log-level", str, settings.log_level, "DEBUG, INFO, WARNING or ERROR"),
    Option("--workers", int, settings.workers, "process pool size for experiments"),
    Option("--seed", int, settings.seed, "master random seed"),
]

OPTIMIZER = [
    Option("--restarts", int, None, "restarts per state (default 8 + q)"),
    Option("--sweeps", int, 200, "max sweeps per restart"),
    Option("--tol", float, 1e-10, "stop when a sweep improves P by less than this"),
    Option("--no-pair-step", bool, False, "disable the two-qubit SVD steps"),
]

INPUT = Option("--input", str, "-", "state JSON file, '-' for stdin")
OUTPUT = Option("--out", str, None, "output file (default stdout)")

COMMAND_OPTIONS: Dict[str, List[Option]] = {
    "gen": [
        Option("--kind", str, None, "state family", choices=list(STATE_KINDS), required=True),
        Option("--q", int, None, "qubits (2n for balanced-w)"),
        Option("--r", int, None, "period"),
        Option("--l", int, 0, "shift"),
        Option("--set", str, None, "ES index set, e.g. '0,3,5'"),
        Option("--p", float, None, "phase parameter for a phased ES / periodic state"),
        Option("--k", int, 0, "basis index"),
        OUTPUT,
    ],
    "qft": [
        INPUT,
        OUTPUT,
        Option("--inverse", bool, False, "apply the inverse transform"),
        Option("--oracle", str, None, "closed form instead of input, 'periodic:q,r,l'"),
    ],
    "gmeasure": [INPUT, OUTPUT, *OPTIMIZER],
    "approx": [
        Option("--q", int, None, "qubits", required=True),
        Option("--r", int, None, "period", required=True),
        Option("--l", int, 0, "shift"),
    ],
    "shor": [
        Option("--n", int, None, "number to factor", required=True),
        Option("--attempts", int, 10, "order-finding attempts"),
        Option("--q", int, None, "main register width (default: 2^q >= N^2)"),
    ],
    "sweep": [
        Option("--q", int, None, "qubits", required=True),
        Option("--l", int, 0, "shift"),
        OUTPUT,
        *OPTIMIZER,
    ],
    "delta-g": [
        Option("--kind", str, "periodic", "state family", choices=["periodic", "random"]),
        Option("--q", int, None, "qubits", required=True),
        Option("--samples", int, 500, "random states"),
        Option("--max-states", int, 10_000, "cap on periodic states (stride subsample)"),
        OUTPUT,
        *OPTIMIZER,
    ],
    "fig1": [
        Option("--q", int, None, "qubits", required=True),
        Option("--r", int, None, "period", required=True),
        Option("--l", int, 0, "shift"),
        OUTPUT,
    ],
}


def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level.upper(),
        format="%(name)s | %(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="periodic-groverian",
        description="Groverian entanglement of periodic states, QFT and Shor preprocessing",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="key-value config file")
    for opt in COMMON:
        _add(common, opt)

    sub = parser.add_subparsers(dest="command", required=True)
    for name, options in COMMAND_OPTIONS.items():
        cmd = sub.add_parser(name, parents=[common])
        for opt in options:
            _add(cmd, opt)
    return parser


def _add(parser: argparse.ArgumentParser, opt: Option) -> None:
    # defaults are applied after the config file is merged
    if opt.kind is bool:
        parser.add_argument(opt.flag, dest=opt.dest, action="store_true", default=None, help=opt.help)
    else:
        parser.add_argument(opt.flag, dest=opt.dest, type=opt.kind, default=None, choices=opt.choices, help=opt.help)


def resolve_options(command: str, args: argparse.Namespace, file_values: Dict[str, str]) -> Dict[str, Any]:
    """Merge flags, config-file values and defaults for one subcommand."""
    options = COMMON + COMMAND_OPTIONS[command]
    known = {opt.dest for opt in options}
    for key in file_values:
        if key not in known:
            logger.warning(f"Ignoring unknown config key {key!r} for {command}")

    resolved: Dict[str, Any] = {}
    for opt in options:
        value = getattr(args, opt.dest)
        if value is None and opt.dest in file_values:
            try:
                value = coerce(file_values[opt.dest], opt.kind())
            except ValueError as e:
                raise SpecError(f"Config key {opt.dest}: {e}") from e
            if opt.choices and value not in opt.choices:
                raise SpecError(f"Config key {opt.dest}: {value!r} not in {list(opt.choices)}")
        if value is None:
            value = opt.default
        if value is None and opt.required:
            raise SpecError(f"Missing required option {opt.flag}")
        resolved[opt.dest] = value
    return resolved


def optimizer_config(opts: Dict[str, Any]) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            restarts=opts["restarts"],
            max_sweeps=opts["sweeps"],
            tol=opts["tol"],
            pair_step=not opts["no_pair_step"],
            seed=opts["seed"],
        )
    except ValidationError as e:
        raise SpecError(f"Invalid optimizer settings: {e}") from e


def _read_state(path: str) -> StateVector:
    if path == "-":
        return StateVector.from_json(sys.stdin.read())
    source = Path(path)
    if not source.is_file():
        raise StateError(f"State file not found: {path}")
    return StateVector.from_json(source.read_text())


def _emit_json(payload: Any, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
        logger.info(f"✓ Wrote {out}")
    else:
        sys.stdout.write(text)


def _emit_frame(frame, out: Optional[str]) -> None:
    if out:
        write_csv(frame, out)
    else:
        frame.to_csv(sys.stdout, index=False, na_rep="", lineterminator="\n")


def cmd_gen(opts: Dict[str, Any]) -> int:
    state = build_state(
        opts["kind"], q=opts["q"], r=opts["r"], l=opts["l"],
        members=opts["set"], p=opts["p"], k=opts["k"], seed=opts["seed"],
    )
    _emit_json(state.to_dict(), opts["out"])
    return 0


def _parse_oracle(text: str) -> PeriodicSpec:
    family, _, params = text.partition(":")
    if family != "periodic":
        raise SpecError(f"Unknown oracle {family!r} (only 'periodic:q,r,l')")
    try:
        values = [int(v) for v in params.split(",")]
    except ValueError as e:
        raise SpecError(f"Invalid oracle parameters {params!r}") from e
    if len(values) not in (2, 3):
        raise SpecError("Oracle parameters are q,r[,l]")
    return PeriodicSpec(*values)


def cmd_qft(opts: Dict[str, Any]) -> int:
    if opts["oracle"]:
        spec = _parse_oracle(opts["oracle"])
        state = StateVector.from_amplitudes(periodic_qft_amplitudes(spec))
    else:
        psi = _read_state(opts["input"])
        state = inverse_qft(psi) if opts["inverse"] else qft(psi)
    _emit_json(state.to_dict(), opts["out"])
    return 0


def cmd_gmeasure(opts: Dict[str, Any]) -> int:
    psi = _read_state(opts["input"])
    result = p_max(psi, optimizer_config(opts))
    logger.info(f"P_max={result.p_max:.10f} G={result.g:.10f} (restart {result.restart_index})")
    _emit_json(result.to_dict(), opts["out"])
    return 0


def cmd_approx(opts: Dict[str, Any]) -> int:
    _emit_json(approx_summary(PeriodicSpec(q=opts["q"], r=opts["r"], l=opts["l"])), None)
    return 0


def cmd_shor(opts: Dict[str, Any]) -> int:
    report = shor_demo(opts["n"], np.random.default_rng(opts["seed"]), attempts=opts["attempts"], q=opts["q"])
    if report.success:
        logger.info(f"✓ {report.N} = {report.factor} x {report.N // report.factor} ({report.reason})")
    else:
        logger.warning(f"✗ {report.reason}")
    _emit_json(report.model_dump(exclude_none=True), None)
    return 0 if report.success else 1


def cmd_sweep(opts: Dict[str, Any]) -> int:
    records = sweep_periods(opts["q"], opts["l"], optimizer_config(opts), workers=opts["workers"])
    _emit_frame(records_to_frame(records), opts["out"])
    return 0


def cmd_delta_g(opts: Dict[str, Any]) -> int:
    config = optimizer_config(opts)
    if opts["kind"] == "periodic":
        summary = delta_g_periodic_average(opts["q"], config, max_states=opts["max_states"], workers=opts["workers"])
    else:
        rng = np.random.default_rng(opts["seed"])
        summary = delta_g_random(opts["q"], opts["samples"], config, rng, workers=opts["workers"])

    logger.info(f"{opts['kind']} q={opts['q']}: mean|dG|={summary.mean_abs:.6f} over {summary.count} states")
    frame = records_to_frame(summary.records)
    if opts["out"]:
        write_csv(frame, opts["out"])
        _emit_json(
            {
                "kind": opts["kind"],
                "q": opts["q"],
                "count": summary.count,
                "mean_abs": summary.mean_abs,
                "max_abs": summary.max_abs,
                "mean": summary.mean,
                "std": summary.std,
                "stderr": summary.stderr,
            },
            None,
        )
    else:
        _emit_frame(frame, None)
    return 0


def cmd_fig1(opts: Dict[str, Any]) -> int:
    data = fig1_data(PeriodicSpec(q=opts["q"], r=opts["r"], l=opts["l"]))
    _emit_frame(data.to_frame(), opts["out"])
    return 0


COMMANDS: Dict[str, Callable[[Dict[str, Any]], int]] = {
    "gen": cmd_gen,
    "qft": cmd_qft,
    "gmeasure": cmd_gmeasure,
    "approx": cmd_approx,
    "shor": cmd_shor,
    "sweep": cmd_sweep,
    "delta-g": cmd_delta_g,
    "fig1": cmd_fig1,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or settings.log_level)
    try:
        opts = resolve_options(args.command, args, load_config_file(args.config))
        setup_logging(opts["log_level"])
        return COMMANDS[args.command](opts)
    except FileNotFoundError as e:
        logger.error(f"✗ {e}")
        return 2
    except GroverianError as e:
        logger.error(f"✗ {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
