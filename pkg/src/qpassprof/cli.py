"""Command-line experiment runner: profile, compare-levels, verify."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .circuit import Circuit, CircuitError, build_ghz, build_qft, save_circuit
from .framework import PassFailure
from .presets import LEVELS, build_preset
from .profiler import (
    Configuration,
    ExperimentSummary,
    Recorder,
    RunRecord,
    aggregate,
    share_of_total,
    summarize,
    write_plot_data,
    write_records,
    write_summary,
)
from .passes.synthesis import expand_boxes
from .sim import MAX_SWEEP_QUBITS, SimulationError, equivalence_report
from .target import Target, TargetError, resolve_target

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPILE = 3
EXIT_VERIFY = 4

QUICK_REPS = 3


@dataclass(frozen=True)
class ExperimentConfig:
    circuit: str
    qubits: int
    level: int
    target: str
    reps: int = 30
    top: int = 10
    boxed: bool = False
    verify: bool = False
    near_tie: float = 0.01
    workers: int = 1

    @property
    def stem(self) -> str:
        return f"{self.circuit}{self.qubits}-L{self.level}"


@dataclass
class RepResult:
    records: list[RunRecord]
    total_time: int
    circuit_text: str


def build_workload(name: str, n: int, boxed: bool = False) -> Circuit:
    if name == "qft":
        return build_qft(n, boxed=boxed)
    if name == "ghz":
        return build_ghz(n)
    raise ValueError(f"unknown circuit {name!r}")


def _one_rep(args: tuple[ExperimentConfig, int]) -> RepResult:
    cfg, rep = args
    target = resolve_target(cfg.target)
    circuit = build_workload(cfg.circuit, cfg.qubits, cfg.boxed)
    pm = build_preset(cfg.level, target)
    result = pm.run(circuit, Recorder(f"{cfg.stem}-r{rep}"))
    return RepResult(result.records, result.total_time, result.circuit.to_text())


def run_experiment(cfg: ExperimentConfig) -> tuple[ExperimentSummary, list[RepResult]]:
    jobs = [(cfg, i) for i in range(cfg.reps)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            reps = list(pool.map(_one_rep, jobs))
    else:
        reps = [_one_rep(j) for j in jobs]
    config = Configuration(cfg.circuit, cfg.qubits, cfg.level, cfg.target)
    summary = summarize([aggregate(r.records) for r in reps], config,
                        [r.total_time for r in reps], cfg.top, cfg.near_tie)
    return summary, reps


def verify_compile(circuit: Circuit, target: Target, level: int):
    result = build_preset(level, target).run(circuit)
    layout = result.layout
    n = circuit.num_qubits
    return equivalence_report(expand_boxes(circuit), result.circuit, layout.final[:n], 1e-8, layout.initial[:n])


class _Style:
    def __init__(self, stream):
        self.on = stream.isatty() and "NO_COLOR" not in os.environ

    def bold(self, s: str) -> str:
        return f"\033[1m{s}\033[0m" if self.on else s


def format_top_table(summary: ExperimentSummary, n: int) -> str:
    total = summary.total_time.median
    ties = {name for pair in summary.near_ties for name in pair}
    lines = [f"{'rank':>4}  {'pass':<22} {'category':<21} {'median ms':>11} {'share %':>8}"]
    for i, p in enumerate(summary.top_n(n), 1):
        share = share_of_total(int(p.stats.median), int(total)) if total > 0 else 0.0
        mark = " ~" if p.name in ties else ""
        lines.append(f"{i:>4}  {p.name:<22} {p.category:<21} {p.stats.median / 1e6:>11.3f} {share:>8.2f}{mark}")
    if summary.near_ties:
        lines.append("~ near-tie: adjacent medians differ by less than the near-tie threshold")
    return "\n".join(lines)


def write_experiment(cfg: ExperimentConfig, summary: ExperimentSummary, reps: Sequence[RepResult], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_records([r for rep in reps for r in rep.records], out / f"{cfg.stem}.records.csv")
    write_summary(summary, out / f"{cfg.stem}.summary.json")
    write_plot_data(summary, out / f"{cfg.stem}.plot.csv")
    (out / f"{cfg.stem}.compiled.circ").write_text(reps[0].circuit_text)


def _add_common(p: argparse.ArgumentParser, with_level: bool) -> None:
    p.add_argument("--circuit", choices=["qft", "ghz"], required=True)
    p.add_argument("--qubits", type=int, required=True)
    if with_level:
        p.add_argument("--level", type=int, choices=LEVELS, required=True)
    p.add_argument("--target", required=True, help="file path, shipped target name, line:N or grid:RxC")
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--quick", action="store_true", help=f"use {QUICK_REPS} repetitions")
    p.add_argument("--out", type=Path, default=Path("profile-out"))
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--boxed", action="store_true", help="feed QFT as one unexpanded high-level block")
    p.add_argument("--seedless-deterministic", action=argparse.BooleanOptionalAction, default=True,
                   help="all passes are deterministic; kept for reproducibility records")
    p.add_argument("--near-tie", type=float, default=0.01)
    p.add_argument("--workers", type=int, default=1)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpassprof", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("profile", help="profile one circuit at one level"), True)
    _add_common(sub.add_parser("compare-levels", help="profile one circuit at levels 0-3"), False)
    v = sub.add_parser("verify", help="compile and check equivalence")
    v.add_argument("--circuit", choices=["qft", "ghz"], required=True)
    v.add_argument("--qubits", type=int, required=True)
    v.add_argument("--level", type=int, choices=LEVELS, default=3)
    v.add_argument("--target", required=True)
    v.add_argument("--boxed", action="store_true")
    return parser


def _config(args, level: int) -> ExperimentConfig:
    return ExperimentConfig(args.circuit, args.qubits, level, args.target,
                            QUICK_REPS if args.quick else args.reps, args.top, args.boxed,
                            args.verify, args.near_tie, args.workers)


def _check_args(parser, args) -> Target:
    if args.qubits < 1:
        parser.error("--qubits must be >= 1")
    if getattr(args, "reps", 1) < 1 or getattr(args, "top", 1) < 1:
        parser.error("--reps and --top must be >= 1")
    try:
        target = resolve_target(args.target)
    except (TargetError, ValueError, OSError) as exc:
        parser.error(f"--target: {exc}")
    if args.qubits > target.num_qubits:
        parser.error(f"--qubits {args.qubits} exceeds the {target.num_qubits}-qubit target")
    return target


def _verify_step(args, target: Target, level: int, out) -> int | None:
    if args.qubits > MAX_SWEEP_QUBITS:
        print(f"verify skipped: {args.qubits} qubits exceeds the {MAX_SWEEP_QUBITS}-qubit size limit", file=out)
        return None
    try:
        rep = verify_compile(build_workload(args.circuit, args.qubits, getattr(args, "boxed", False)), target, level)
    except SimulationError as exc:
        print(f"verify skipped: {exc}", file=out)
        return None
    if not rep.equivalent:
        print(f"verification FAILED at level {level}: basis input {rep.failing_input}, "
              f"max deviation {rep.max_deviation:.3e}", file=out)
        return EXIT_VERIFY
    print(f"verification passed at level {level}: max deviation {rep.max_deviation:.3e}", file=out)
    return None


def cmd_profile(args, parser, out=None) -> int:
    out = out or sys.stdout
    target = _check_args(parser, args)
    cfg = _config(args, args.level)
    style = _Style(out)
    try:
        summary, reps = run_experiment(cfg)
    except PassFailure as exc:
        print(f"compile failed: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    write_experiment(cfg, summary, reps, args.out)
    print(style.bold(f"{cfg.stem} on {target.name}, {cfg.reps} repetition(s); "
                     f"median compile {summary.total_time.median / 1e6:.3f} ms"), file=out)
    print(format_top_table(summary, cfg.top), file=out)
    if args.verify:
        code = _verify_step(args, target, cfg.level, out)
        if code is not None:
            return code
    return EXIT_OK


COMPARE_FIELDS = ("level", "total_median_ns", "total_min_ns", "total_max_ns", "top1", "top1_share", "passes", "verified")


def cmd_compare_levels(args, parser, out=None) -> int:
    out = out or sys.stdout
    target = _check_args(parser, args)
    rows = []
    status = EXIT_OK
    for level in LEVELS:
        cfg = _config(args, level)
        try:
            summary, reps = run_experiment(cfg)
        except PassFailure as exc:
            print(f"compile failed at level {level}: {exc}", file=sys.stderr)
            return EXIT_COMPILE
        write_experiment(cfg, summary, reps, args.out)
        verified = ""
        if args.verify:
            code = _verify_step(args, target, level, out)
            verified = "no" if code else ("yes" if args.qubits <= MAX_SWEEP_QUBITS else "skipped")
            status = code or status
        top1 = summary.top[0] if summary.top else ""
        total = summary.total_time.median
        share = share_of_total(int(summary.passes[top1].stats.median), int(total)) if top1 and total > 0 else 0.0
        passes = ";".join(sorted(summary.passes))
        rows.append([level, repr(total), repr(summary.total_time.min), repr(summary.total_time.max),
                     top1, f"{share:.2f}", passes, verified])
        print(f"level {level}: median compile {total / 1e6:.3f} ms, top-1 {top1} ({share:.1f}%)", file=out)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / f"{args.circuit}{args.qubits}-levels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COMPARE_FIELDS)
        w.writerows(rows)
    return status


def read_comparison(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["level"] = int(row["level"])
        row["passes"] = row["passes"].split(";") if row["passes"] else []
        for k in ("total_median_ns", "total_min_ns", "total_max_ns", "top1_share"):
            row[k] = float(row[k])
    return rows


def cmd_verify(args, parser, out=None) -> int:
    out = out or sys.stdout
    if args.qubits > MAX_SWEEP_QUBITS:
        parser.error(f"size limit: verify supports at most {MAX_SWEEP_QUBITS} qubits, got {args.qubits}")
    target = _check_args(parser, args)
    try:
        rep = verify_compile(build_workload(args.circuit, args.qubits, args.boxed), target, args.level)
    except PassFailure as exc:
        print(f"compile failed: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except SimulationError as exc:
        parser.error(str(exc))
    if not rep.equivalent:
        print(f"NOT equivalent: first failing basis input {rep.failing_input}, "
              f"max deviation {rep.max_deviation:.3e}", file=out)
        return EXIT_VERIFY
    print(f"equivalent: max deviation {rep.max_deviation:.3e}", file=out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"profile": cmd_profile, "compare-levels": cmd_compare_levels, "verify": cmd_verify}[args.command]
        return handler(args, parser)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except CircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
