"""Pass abstraction, flow controllers and the staged pass manager."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, ClassVar, Iterable, Sequence

from .circuit import Circuit, DagCircuit, metrics
from .profiler import Recorder, RunRecord
from .registry import STAGE_ORDER, PassDescriptor, Stage, amend_stage, register
from .target import Target


class PropertySet(dict):
    """Shared state channel between passes of one pipeline run."""

    def __missing__(self, key):
        return None


class PassFailure(RuntimeError):
    """A pass raised; carries the records of the passes that completed."""

    def __init__(self, pass_name: str, stage: Stage, cause: BaseException, records: Sequence[RunRecord] = ()):
        super().__init__(f"pass {pass_name} failed in stage {stage.value}: {cause}")
        self.pass_name = pass_name
        self.stage = stage
        self.cause = cause
        self.records = list(records)


class AnalysisContractError(RuntimeError):
    pass


class BasePass:
    """A compilation task.

    Subclasses set ``name``, ``kind`` and ``module`` and implement ``run``.
    Transformation passes return the new DAG (or ``None`` to keep the input);
    analysis passes only write to the property set.
    """

    name: ClassVar[str]
    kind: ClassVar[str] = "transformation"
    module: ClassVar[str]
    stages: ClassVar[tuple[Stage, ...]] = ()

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "name" in cls.__dict__:
            register(PassDescriptor(cls.name, cls.kind, cls.module, frozenset(cls.stages)))

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit | None:
        raise NotImplementedError

    def describe(self) -> list[str]:
        return [self.name]

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class _Execution:
    """Per-run bookkeeping: current stage, recorder, debug contract checks."""

    def __init__(self, recorder: Recorder, debug: bool):
        self.recorder = recorder
        self.debug = debug
        self.stage = Stage.INITIALIZATION
        self.accounted = 0  # ns already attributed to some record

    def invoke(self, entry: BasePass, dag: DagCircuit, props: PropertySet, iteration: int) -> DagCircuit:
        if isinstance(entry, FlowController):
            return entry.execute(dag, props, self, iteration)
        before = _fingerprint(dag) if self.debug and entry.kind == "analysis" else None
        c0 = time.thread_time_ns()
        t0 = time.perf_counter_ns()
        try:
            out = entry.run(dag, props)
        except PassFailure:
            raise
        except Exception as exc:
            raise PassFailure(entry.name, self.stage, exc, self.recorder.records) from exc
        t1 = time.perf_counter_ns()
        c1 = time.thread_time_ns()
        self.recorder.add(entry.name, self.stage, iteration, t1 - t0, c1 - c0)
        self.accounted += t1 - t0
        if before is not None:
            if out is not None or _fingerprint(dag) != before:
                raise PassFailure(entry.name, self.stage,
                                  AnalysisContractError("analysis pass modified the circuit"), self.recorder.records)
        return dag if out is None else out


def _fingerprint(dag: DagCircuit) -> int:
    return hash(dag.to_circuit().instructions)


class FlowController(BasePass):
    """Entry that orchestrates child passes.

    The controller's own record covers only its orchestration time; each
    child invocation is recorded separately.
    """

    module = "utils"

    def __init__(self, passes: Iterable[BasePass]):
        self.passes = list(passes)

    def execute(self, dag: DagCircuit, props: PropertySet, ex: _Execution, iteration: int) -> DagCircuit:
        t0 = time.perf_counter_ns()
        c0 = time.thread_time_ns()
        acc0 = ex.accounted
        try:
            dag = self.iterate(dag, props, ex)
        except PassFailure:
            raise
        except Exception as exc:
            raise PassFailure(self.name, ex.stage, exc, ex.recorder.records) from exc
        elapsed = time.perf_counter_ns() - t0
        cpu = time.thread_time_ns() - c0
        children = ex.accounted - acc0
        own = max(0, elapsed - children)
        ex.recorder.add(self.name, ex.stage, iteration, own, max(0, cpu - children))
        ex.accounted += own
        return dag

    def iterate(self, dag: DagCircuit, props: PropertySet, ex: _Execution) -> DagCircuit:
        raise NotImplementedError

    def run_children(self, dag: DagCircuit, props: PropertySet, ex: _Execution, iteration: int) -> DagCircuit:
        for p in self.passes:
            dag = ex.invoke(p, dag, props, iteration)
        return dag

    def describe(self) -> list[str]:
        lines = [self.name]
        for p in self.passes:
            lines.extend("  " + line for line in p.describe())
        return lines


METRIC_KEYS = ("depth", "size", "two_qubit_count")


class FixedPointController(FlowController):
    """Repeat the children until the watched metrics stop changing."""

    name = "FixedPointLoop"
    kind = "transformation"
    stages = (Stage.OPTIMIZATION,)

    def __init__(self, passes: Iterable[BasePass], metric_keys: Iterable[str] = ("size", "depth"),
                 max_iterations: int = 100):
        super().__init__(passes)
        if max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        self.metric_keys = tuple(metric_keys)
        unknown = set(self.metric_keys) - set(METRIC_KEYS)
        if unknown:
            raise ValueError(f"unknown metrics {sorted(unknown)}")
        self.max_iterations = max_iterations

    def iterate(self, dag, props, ex):
        previous = None
        for it in range(1, self.max_iterations + 1):
            dag = self.run_children(dag, props, ex, it)
            m = metrics(dag)
            current = tuple(getattr(m, k) for k in self.metric_keys)
            for k in self.metric_keys:
                props[k] = getattr(m, k)
            props["fixed_point_iterations"] = it
            if current == previous:
                break
            previous = current
        return dag


def fixed_point_controller(passes, metric_keys=("size", "depth"), max_iterations=100) -> FixedPointController:
    return FixedPointController(passes, metric_keys, max_iterations)


@dataclass
class PipelineResult:
    circuit: Circuit
    properties: PropertySet
    records: list[RunRecord]
    total_time: int  # ns, whole pipeline wall time

    @property
    def layout(self):
        return self.properties["final_layout"]


class PassManager:
    """Ordered stages, each an ordered list of passes or controllers."""

    def __init__(self, target: Target | None = None, optimization_level: int | None = None):
        self.target = target
        self.optimization_level = optimization_level
        self.stages: dict[Stage, list[BasePass]] = {s: [] for s in STAGE_ORDER}

    def append(self, stage: Stage | str, entry: BasePass) -> PassManager:
        stage = Stage(stage)
        self._declare(entry, stage)
        self.stages[stage].append(entry)
        return self

    def _declare(self, entry: BasePass, stage: Stage) -> None:
        amend_stage(entry.name, stage)
        for child in getattr(entry, "passes", ()):
            self._declare(child, stage)

    def entries(self, stage: Stage | str) -> list[BasePass]:
        return self.stages[Stage(stage)]

    def pass_names(self) -> list[str]:
        names = []

        def walk(e):
            names.append(e.name)
            for c in getattr(e, "passes", ()):
                walk(c)

        for stage in STAGE_ORDER:
            for e in self.stages[stage]:
                walk(e)
        return names

    def dump(self) -> str:
        """One ``stage/pass`` line per entry; controller children indented."""
        lines = []
        for stage in STAGE_ORDER:
            for entry in self.stages[stage]:
                for line in entry.describe():
                    indent = len(line) - len(line.lstrip(" "))
                    lines.append(" " * indent + f"{stage.value}/{line.strip()}")
        return "\n".join(lines) + ("\n" if lines else "")

    def run(self, circuit: Circuit, recorder: Recorder | None = None, debug: bool = False) -> PipelineResult:
        return run_pipeline(self, circuit, recorder, debug)


def run_pipeline(pm: PassManager, circuit: Circuit, recorder: Recorder | None = None,
                 debug: bool = False) -> PipelineResult:
    """Run every stage in order on a fresh property set.

    Raises ``PassFailure`` naming the failing pass and stage; its ``records``
    hold the entries of the passes that completed.
    """
    recorder = recorder if recorder is not None else Recorder()
    props = PropertySet()
    props["target"] = pm.target
    props["virtual_qubits"] = circuit.num_qubits
    ex = _Execution(recorder, debug)
    t0 = time.perf_counter_ns()
    dag = DagCircuit.from_circuit(circuit)
    for stage in STAGE_ORDER:
        ex.stage = stage
        for entry in pm.stages[stage]:
            dag = ex.invoke(entry, dag, props, 0)
    out = dag.to_circuit()
    total = time.perf_counter_ns() - t0
    return PipelineResult(out, props, recorder.records, total)
