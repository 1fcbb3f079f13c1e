"""Circuit optimization: inverse-pair cancellation, single-qubit resynthesis
and the best-snapshot loop controller."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..circuit import Circuit, DagCircuit, Instruction, metrics, rz, sx, x
from ..framework import BasePass, FlowController, PropertySet
from ..registry import Stage
from ..sim import gate_matrix

ANGLE_EPS = 1e-12
SELF_INVERSE = frozenset({"CX", "H", "X", "SWAP"})
_TWO_PI = 2 * math.pi


def _is_zero_angle(theta: float) -> bool:
    r = math.remainder(theta, _TWO_PI)
    return abs(r) <= ANGLE_EPS


def _cancels(a: Instruction, b: Instruction) -> bool:
    if a.name != b.name:
        return False
    if a.name in SELF_INVERSE:
        if a.name == "SWAP":
            return set(a.qubits) == set(b.qubits)
        return a.qubits == b.qubits
    if a.name == "RZ":
        return a.qubits == b.qubits and _is_zero_angle(a.params[0] + b.params[0])
    return False


def inverse_cancellation(circuit: Circuit) -> Circuit:
    """Remove DAG-adjacent inverse pairs until none are left.

    Each wire keeps a stack of surviving gates.  A gate cancels the survivor
    that is on top of every one of its wires when the two are inverses, which
    also exposes the next survivor for cascading cancellations.
    """
    insts = circuit.instructions
    alive = [True] * len(insts)
    stacks: list[list[int]] = [[] for _ in range(circuit.num_qubits)]
    for i, inst in enumerate(insts):
        qs = inst.qubits
        top = stacks[qs[0]][-1] if stacks[qs[0]] else None
        if top is not None and all(stacks[q] and stacks[q][-1] == top for q in qs[1:]):
            other = insts[top]
            if len(other.qubits) == len(qs) and _cancels(other, inst):
                for q in qs:
                    stacks[q].pop()
                alive[top] = False
                alive[i] = False
                continue
        for q in qs:
            stacks[q].append(i)
    return circuit.replace(inst for inst, keep in zip(insts, alive) if keep)


class InverseCancellation(BasePass):
    name = "InverseCancellation"
    module = "optimization"
    stages = (Stage.OPTIMIZATION,)

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit:
        return DagCircuit.from_circuit(inverse_cancellation(dag.to_circuit()))


# -- single-qubit resynthesis ---------------------------------------------
RUN_GATES = frozenset({"H", "X", "SX", "RZ"})


def _wrap(theta: float) -> float:
    """Normalize to (-pi, pi]."""
    r = math.remainder(theta, _TWO_PI)
    return math.pi if r == -math.pi else r


def u3_angles(u: np.ndarray) -> tuple[float, float, float]:
    """``(theta, phi, lam)`` with ``u`` proportional to U3(theta, phi, lam)."""
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    v = u / cmath.sqrt(det)
    theta = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    phi_plus_lam = 2 * cmath.phase(v[1, 1])
    phi_minus_lam = 2 * cmath.phase(v[1, 0])
    return theta, (phi_plus_lam + phi_minus_lam) / 2, (phi_plus_lam - phi_minus_lam) / 2


def _rz_unless_zero(theta: float, q: int) -> list[Instruction]:
    theta = _wrap(theta)
    return [] if _is_zero_angle(theta) else [rz(theta, q)]


def zsx_decompose(u: np.ndarray, q: int) -> list[Instruction]:
    """Circuit (in application order) for ``u`` as RZ·SX·RZ·SX·RZ, shortened
    where the middle angle makes fewer gates suffice."""
    theta, phi, lam = u3_angles(u)
    if abs(theta) <= ANGLE_EPS:
        # the off-diagonal magnitude carries no phase information here
        phase_sum = cmath.phase(u[1, 1]) - cmath.phase(u[0, 0])
        return _rz_unless_zero(phase_sum, q)
    if abs(theta - math.pi / 2) <= ANGLE_EPS:
        return _rz_unless_zero(lam - math.pi / 2, q) + [sx(q)] + _rz_unless_zero(phi + math.pi / 2, q)
    if abs(theta - math.pi) <= ANGLE_EPS:
        return _rz_unless_zero(lam + math.pi, q) + [x(q)] + _rz_unless_zero(phi, q)
    return (_rz_unless_zero(lam, q) + [sx(q)] + _rz_unless_zero(theta + math.pi, q) + [sx(q)]
            + _rz_unless_zero(phi + math.pi, q))


def _run_matrix(run: Iterable[Instruction]) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for inst in run:
        u = gate_matrix(inst) @ u
    return u


def optimize_1q_gates(circuit: Circuit) -> Circuit:
    """Resynthesize maximal single-qubit runs; a run is replaced only when the
    result is strictly shorter, so size never grows."""
    pending: list[list[Instruction]] = [[] for _ in range(circuit.num_qubits)]
    out: list[Instruction] = []

    def flush(q: int) -> None:
        run = pending[q]
        if not run:
            return
        if len(run) == 1:
            inst = run[0]
            if not (inst.name == "RZ" and _is_zero_angle(inst.params[0])):
                out.append(inst)
        elif len(run) == 2 and run[0].name == "RZ" and run[1].name == "RZ":
            out.extend(_rz_unless_zero(run[0].params[0] + run[1].params[0], q))
        else:
            new = zsx_decompose(_run_matrix(run), q)
            out.extend(new if len(new) < len(run) else run)
        pending[q] = []

    for inst in circuit.instructions:
        if inst.name in RUN_GATES:
            pending[inst.qubits[0]].append(inst)
            continue
        for q in inst.qubits:
            flush(q)
        out.append(inst)
    for q in range(circuit.num_qubits):
        flush(q)
    return circuit.replace(out)


class Optimize1QGates(BasePass):
    name = "Optimize1QGates"
    module = "optimization"
    stages = (Stage.OPTIMIZATION,)

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit:
        return DagCircuit.from_circuit(optimize_1q_gates(dag.to_circuit()))


# -- MinimumPoint ------------------------------------------------------------
@dataclass
class MinimumPointState:
    best_cost: tuple[int, int]
    best_circuit: Circuit
    since_improvement: int = 0
    backtrack_window: int = 5
    iterations: int = 0


def circuit_cost(circuit: Circuit | DagCircuit) -> tuple[int, int]:
    m = metrics(circuit)
    return (m.depth, m.size)


class MinimumPointController(FlowController):
    """Loop the children, keep the lowest (depth, size) circuit seen, and stop
    after ``backtrack_window`` consecutive iterations without improvement.

    The input circuit counts as the first candidate, so the result is never
    worse than what entered the loop.
    """

    name = "MinimumPoint"
    kind = "transformation"
    module = "utils"
    stages = (Stage.OPTIMIZATION,)

    def __init__(self, passes: Iterable[BasePass], backtrack_window: int = 5, max_iterations: int = 1000):
        super().__init__(passes)
        if backtrack_window < 1 or max_iterations < 1:
            raise ValueError("backtrack_window and max_iterations must be >= 1")
        self.backtrack_window = backtrack_window
        self.max_iterations = max_iterations

    def iterate(self, dag, props, ex):
        start = dag.to_circuit()
        state = MinimumPointState(circuit_cost(start), start, 0, self.backtrack_window)
        history = []
        for it in range(1, self.max_iterations + 1):
            dag = self.run_children(dag, props, ex, it)
            snapshot = dag.to_circuit()
            cost = circuit_cost(snapshot)
            history.append(cost)
            state.iterations = it
            if cost < state.best_cost:
                state.best_cost = cost
                state.best_circuit = snapshot
                state.since_improvement = 0
            else:
                state.since_improvement += 1
            if state.since_improvement >= state.backtrack_window:
                break
        props["minimum_point_state"] = state
        props["minimum_point_history"] = history
        return DagCircuit.from_circuit(state.best_circuit)


def minimum_point_controller(children, backtrack_window: int = 5, max_iterations: int = 1000):
    return MinimumPointController(children, backtrack_window, max_iterations)
