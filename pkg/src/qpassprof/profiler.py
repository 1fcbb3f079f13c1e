"""Per-pass timing records, cumulative aggregation, categorization, top-N
ranking and repeated-run five-number summaries."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .registry import PassDescriptor, Stage, lookup

GATE_SYNTHESIS = "gate-synthesis"
QUBIT_MAPPING = "qubit-mapping"
CIRCUIT_OPTIMIZATION = "circuit-optimization"
SCHEDULING = "scheduling"
UNCATEGORIZED = "uncategorized"
CATEGORIES = (GATE_SYNTHESIS, QUBIT_MAPPING, CIRCUIT_OPTIMIZATION, SCHEDULING, UNCATEGORIZED)

_MODULE_CATEGORY = {
    "synthesis": GATE_SYNTHESIS,
    "layout": QUBIT_MAPPING,
    "routing": QUBIT_MAPPING,
    "optimization": CIRCUIT_OPTIMIZATION,
    "scheduling": SCHEDULING,
}
# generic modules fall back to the single stage they ran in
_STAGE_CATEGORY = {
    Stage.TRANSLATION: GATE_SYNTHESIS,
    Stage.LAYOUT: QUBIT_MAPPING,
    Stage.ROUTING: QUBIT_MAPPING,
    Stage.OPTIMIZATION: CIRCUIT_OPTIMIZATION,
    Stage.SCHEDULING: SCHEDULING,
}

RECORD_FIELDS = ("run_id", "stage", "pass_name", "iteration", "wall_time_ns", "cpu_time_ns")


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class RunRecord:
    pass_name: str
    stage: Stage
    iteration: int
    wall_time: int  # ns, monotonic clock
    run_id: str
    cpu_time: int = 0  # ns, thread CPU clock

    def __post_init__(self):
        if self.wall_time < 0:
            raise ProfileError(f"negative wall time for {self.pass_name}")
        object.__setattr__(self, "stage", Stage(self.stage))


class Recorder:
    """Collects the records of exactly one pipeline run."""

    def __init__(self, run_id: str = "run-0"):
        self.run_id = run_id
        self.records: list[RunRecord] = []

    def add(self, pass_name: str, stage: Stage, iteration: int, wall_ns: int, cpu_ns: int = 0) -> None:
        self.records.append(RunRecord(pass_name, stage, iteration, wall_ns, self.run_id, cpu_ns))

    def total(self) -> int:
        return sum(r.wall_time for r in self.records)


@dataclass
class PassAggregate:
    pass_name: str
    cumulative_time: int
    invocation_count: int
    category: str
    stages_seen: frozenset[Stage]


def categorize(descriptor: PassDescriptor, stages_seen: Iterable[Stage]) -> str:
    lookup(descriptor.name)  # raises for unregistered passes
    category = _MODULE_CATEGORY.get(descriptor.module)
    if category is not None:
        return category
    stages = {Stage(s) for s in stages_seen}
    if len(stages) == 1:
        return _STAGE_CATEGORY.get(stages.pop(), UNCATEGORIZED)
    return UNCATEGORIZED


def aggregate(records: Sequence[RunRecord]) -> list[PassAggregate]:
    """Cumulative time per pass name, summed over stages and loop iterations."""
    if not records:
        return []
    run_ids = {r.run_id for r in records}
    if len(run_ids) > 1:
        raise ProfileError(f"records from several runs: {sorted(run_ids)}")
    totals: dict[str, int] = {}
    counts: dict[str, int] = {}
    stages: dict[str, set[Stage]] = {}
    for r in records:
        totals[r.pass_name] = totals.get(r.pass_name, 0) + r.wall_time
        counts[r.pass_name] = counts.get(r.pass_name, 0) + 1
        stages.setdefault(r.pass_name, set()).add(r.stage)
    return [
        PassAggregate(name, totals[name], counts[name], categorize(lookup(name), stages[name]), frozenset(stages[name]))
        for name in totals
    ]


def rank_key(agg: PassAggregate) -> tuple[int, str]:
    return (-agg.cumulative_time, agg.pass_name)


def top_n(aggregates: Sequence[PassAggregate], n: int = 10) -> list[PassAggregate]:
    if n < 1:
        raise ProfileError("n must be >= 1")
    return sorted(aggregates, key=rank_key)[:n]


def share_of_total(agg: PassAggregate | int, total_compile_time: int) -> float:
    if total_compile_time <= 0:
        raise ProfileError("share of total is undefined for a zero total compile time")
    t = agg.cumulative_time if isinstance(agg, PassAggregate) else agg
    return 100.0 * t / total_compile_time


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> FiveNumber:
        if len(values) == 0:
            raise ProfileError("five-number summary of an empty sample")
        # numpy's default "linear" method is the type-7 quantile
        qs = np.quantile(np.asarray(values, dtype=float), [0.0, 0.25, 0.5, 0.75, 1.0])
        return cls(*(float(v) for v in qs))


@dataclass(frozen=True)
class Configuration:
    circuit: str
    qubits: int
    level: int
    target: str


@dataclass
class PassSummary:
    name: str
    category: str
    stages: list[str]
    invocations: int  # per repetition, taken from the maximum observed
    stats: FiveNumber


@dataclass
class ExperimentSummary:
    configuration: Configuration
    repetitions: int
    passes: dict[str, PassSummary]
    total_time: FiveNumber
    top: list[str] = field(default_factory=list)
    near_ties: list[tuple[str, str]] = field(default_factory=list)

    def ranking(self) -> list[PassSummary]:
        return sorted(self.passes.values(), key=lambda p: (-p.stats.median, p.name))

    def top_n(self, n: int = 10) -> list[PassSummary]:
        return self.ranking()[:n]


def summarize(
    runs: Sequence[Sequence[PassAggregate]],
    configuration: Configuration | Sequence[Configuration],
    total_times: Sequence[int] | None = None,
    top: int = 10,
    near_tie: float = 0.01,
) -> ExperimentSummary:
    """Five-number summaries across repetitions.

    ``configuration`` may be one configuration or one per repetition, in
    which case they must all agree.  A pass missing from a repetition counts
    as 0 there.  ``total_times`` defaults to the per-repetition sum of pass
    times.
    """
    if len(runs) < 1:
        raise ProfileError("need at least one repetition")
    if not isinstance(configuration, Configuration):
        configs = list(configuration)
        if len(configs) != len(runs) or any(c != configs[0] for c in configs):
            raise ProfileError("repetitions come from mismatched configurations")
        configuration = configs[0]
    names = sorted({a.pass_name for run in runs for a in run})
    passes = {}
    for name in names:
        sample = []
        category = None
        stages: set[Stage] = set()
        invocations = 0
        for run in runs:
            hit = [a for a in run if a.pass_name == name]
            if hit:
                sample.append(hit[0].cumulative_time)
                category = hit[0].category
                stages |= hit[0].stages_seen
                invocations = max(invocations, hit[0].invocation_count)
            else:
                sample.append(0)
        passes[name] = PassSummary(name, category, sorted(s.value for s in stages), invocations, FiveNumber.of(sample))
    if total_times is None:
        total_times = [sum(a.cumulative_time for a in run) for run in runs]
    elif len(total_times) != len(runs):
        raise ProfileError("one total time per repetition required")
    summary = ExperimentSummary(configuration, len(runs), passes, FiveNumber.of(total_times))
    ranked = summary.top_n(top)
    summary.top = [p.name for p in ranked]
    summary.near_ties = find_near_ties(ranked, near_tie)
    return summary


def find_near_ties(ranked: Sequence[PassSummary], threshold: float = 0.01) -> list[tuple[str, str]]:
    """Adjacent ranked passes whose medians differ by less than ``threshold`` (relative)."""
    ties = []
    for a, b in zip(ranked, ranked[1:]):
        hi = max(a.stats.median, b.stats.median)
        if hi == 0 or (hi - min(a.stats.median, b.stats.median)) / hi < threshold:
            ties.append((a.name, b.name))
    return ties


# -- exports -------------------------------------------------------------
def write_records(records: Iterable[RunRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([r.run_id, r.stage.value, r.pass_name, r.iteration, r.wall_time, r.cpu_time])


def read_records(path: str | Path) -> list[RunRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(RECORD_FIELDS[:5]) - set(reader.fieldnames or ())
        if missing:
            raise ProfileError(f"{path}: missing columns {sorted(missing)}")
        return [
            RunRecord(
                row["pass_name"], Stage(row["stage"]), int(row["iteration"]), int(row["wall_time_ns"]),
                row["run_id"], int(row.get("cpu_time_ns") or 0),
            )
            for row in reader
        ]


def summary_to_dict(summary: ExperimentSummary) -> dict:
    return {
        "configuration": asdict(summary.configuration),
        "repetitions": summary.repetitions,
        "total_time_ns": asdict(summary.total_time),
        "passes": {
            name: {"category": p.category, "stages": p.stages, "invocations": p.invocations, **asdict(p.stats)}
            for name, p in summary.passes.items()
        },
        "top": summary.top,
        "near_ties": [list(t) for t in summary.near_ties],
    }


def summary_from_dict(data: Mapping) -> ExperimentSummary:
    passes = {}
    for name, p in data["passes"].items():
        stats = FiveNumber(*(float(p[k]) for k in ("min", "q1", "median", "q3", "max")))
        passes[name] = PassSummary(name, p["category"], list(p["stages"]), int(p["invocations"]), stats)
    return ExperimentSummary(
        Configuration(**data["configuration"]),
        int(data["repetitions"]),
        passes,
        FiveNumber(**data["total_time_ns"]),
        list(data["top"]),
        [tuple(t) for t in data["near_ties"]],
    )


def write_summary(summary: ExperimentSummary, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary_to_dict(summary), indent=2, sort_keys=True) + "\n")


def read_summary(path: str | Path) -> ExperimentSummary:
    return summary_from_dict(json.loads(Path(path).read_text()))


PLOT_FIELDS = ("rank", "pass_name", "category", "min_ns", "q1_ns", "median_ns", "q3_ns", "max_ns")


def write_plot_data(summary: ExperimentSummary, path: str | Path) -> None:
    """Boxplot input: one row per pass in rank order."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PLOT_FIELDS)
        for i, p in enumerate(summary.ranking(), 1):
            s = p.stats
            w.writerow([i, p.name, p.category, repr(s.min), repr(s.q1), repr(s.median), repr(s.q3), repr(s.max)])


def read_plot_data(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["rank"] = int(row["rank"])
        for k in PLOT_FIELDS[3:]:
            row[k] = float(row[k])
    return rows


# -- profiler-style trace --------------------------------------------------
def trace_rows(records: Sequence[RunRecord]) -> list[tuple[str, str, float]]:
    """Rows shaped like a call profiler's output: ``(path, function, cumulative_s)``.

    Each pass contributes a ``run`` row under ``qpassprof/passes/<module>/``;
    the pipeline driver contributes a non-pass row so filters have something
    to reject.
    """
    rows = []
    for agg in aggregate(records):
        module = lookup(agg.pass_name).module
        rows.append((f"qpassprof/passes/{module}/{agg.pass_name}.py", f"{agg.pass_name}.run", agg.cumulative_time / 1e9))
    rows.append(("qpassprof/framework.py", "run_pipeline", sum(r.wall_time for r in records) / 1e9))
    return rows


def filter_trace(rows: Iterable[tuple[str, str, float]], location: str = "qpassprof/passes") -> dict[str, float]:
    """Keep rows whose path contains ``location`` and whose function name contains ``run``."""
    out = {}
    for path, func, cum in rows:
        if location in path.replace("\\", "/") and "run" in func:
            out[func.split(".")[0]] = out.get(func.split(".")[0], 0.0) + cum
    return out
