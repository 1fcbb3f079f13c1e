"""As-soon-as-possible scheduling with explicit idle delays."""

from __future__ import annotations

from ..circuit import Circuit, DagCircuit, Instruction
from ..framework import BasePass, PropertySet
from ..registry import Stage
from ..target import Target


class SchedulingError(ValueError):
    pass


def asap_schedule(circuit: Circuit, target: Target) -> tuple[Circuit, list[int], int]:
    """Schedule every gate at the earliest tick its wires are free.

    Idle gaps before a gate become DELAY instructions; trailing idle time is
    left implicit.  Returns the scheduled circuit, the start tick of each of
    its instructions, and the total duration.
    """
    free_at = [0] * circuit.num_qubits
    timed: list[tuple[int, float, Instruction]] = []
    for i, inst in enumerate(circuit.instructions):
        if inst.name == "DELAY":
            dur = int(inst.params[0])
        else:
            cost = target.cost(inst.name, inst.qubits)
            if cost is None:
                raise SchedulingError(f"no duration for {inst.name} on qubits {inst.qubits}")
            dur = cost.duration
        start = max(free_at[q] for q in inst.qubits)
        for q in inst.qubits:
            gap = start - free_at[q]
            if gap > 0:
                timed.append((free_at[q], i - 0.5, Instruction("DELAY", (q,), (gap,))))
            free_at[q] = start + dur
        timed.append((start, float(i), inst))
    timed.sort(key=lambda t: (t[0], t[1]))
    total = max(free_at, default=0)
    return circuit.replace(t[2] for t in timed), [t[0] for t in timed], total


class ASAPSchedule(BasePass):
    name = "ASAPSchedule"
    module = "scheduling"
    stages = (Stage.SCHEDULING,)

    def __init__(self, target: Target):
        self.target = target

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit:
        scheduled, starts, total = asap_schedule(dag.to_circuit(), self.target)
        props["node_start_time"] = starts
        props["schedule_duration"] = total
        return DagCircuit.from_circuit(scheduled)
