"""Gate synthesis: high-level operation expansion and basis translation."""

from __future__ import annotations

import math
from typing import Callable

from ..circuit import Circuit, DagCircuit, Instruction, cx, qft_body, rz, sx
from ..framework import BasePass, PropertySet
from ..registry import Stage
from ..target import Target


class UnsupportedOperationError(ValueError):
    pass


class TranslationError(ValueError):
    pass


# BOX label -> expansion over the box's qubits
BOX_SYNTHESIZERS: dict[str, Callable[[tuple[int, ...]], list[Instruction]]] = {
    "qft": lambda qubits: qft_body(qubits),
}

MAX_EXPANSION_ROUNDS = 64


def expand_boxes(circuit: Circuit) -> Circuit:
    """Expand every BOX, repeating until no BOX remains."""
    insts = circuit.instructions
    for _ in range(MAX_EXPANSION_ROUNDS):
        if not any(i.name == "BOX" for i in insts):
            return circuit.replace(insts)
        out: list[Instruction] = []
        for inst in insts:
            if inst.name != "BOX":
                out.append(inst)
                continue
            synth = BOX_SYNTHESIZERS.get(inst.label)
            if synth is None:
                raise UnsupportedOperationError(f"no synthesis rule for BOX({inst.label})")
            out.extend(synth(inst.qubits))
        insts = tuple(out)
    raise UnsupportedOperationError("BOX expansion did not terminate")


def high_level_synthesis(circuit: Circuit, target: Target | None = None) -> Circuit:
    return expand_boxes(circuit)


class HighLevelSynthesis(BasePass):
    name = "HighLevelSynthesis"
    module = "synthesis"
    stages = (Stage.TRANSLATION,)

    def __init__(self, target: Target | None = None):
        self.target = target

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit | None:
        if not dag.has_op("BOX"):
            return None
        return DagCircuit.from_circuit(expand_boxes(dag.to_circuit()))


class PreExpandBoxes(BasePass):
    """Hardware-independent expansion of high-level operations before layout."""

    name = "PreExpandBoxes"
    module = "synthesis"
    stages = (Stage.INITIALIZATION,)

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit | None:
        if not dag.has_op("BOX"):
            return None
        return DagCircuit.from_circuit(expand_boxes(dag.to_circuit()))


_HALF_PI = math.pi / 2


def _h_rule(inst: Instruction) -> list[Instruction]:
    (q,) = inst.qubits
    return [rz(_HALF_PI, q), sx(q), rz(_HALF_PI, q)]


def _swap_rule(inst: Instruction) -> list[Instruction]:
    a, b = inst.qubits
    return [cx(a, b), cx(b, a), cx(a, b)]


def _cp_rule(inst: Instruction) -> list[Instruction]:
    c, t = inst.qubits
    theta = inst.params[0]
    return [rz(theta / 2, c), cx(c, t), rz(-theta / 2, t), cx(c, t), rz(theta / 2, t)]


def _x_rule(inst: Instruction) -> list[Instruction]:
    (q,) = inst.qubits
    return [sx(q), sx(q)]


# every rule is exact up to global phase
TRANSLATION_RULES: dict[str, Callable[[Instruction], list[Instruction]]] = {
    "H": _h_rule,
    "SWAP": _swap_rule,
    "CP": _cp_rule,
    "X": _x_rule,
}

_PASS_THROUGH = frozenset({"DELAY"})


def basis_translate(circuit: Circuit, target: Target) -> Circuit:
    basis = target.basis | _PASS_THROUGH
    cache: dict[str, bool] = {}

    def reachable(name: str, depth: int = 0) -> bool:
        if name in basis:
            return True
        if name in cache:
            return cache[name]
        cache[name] = False  # guards rule cycles
        ok = False
        if name in TRANSLATION_RULES and depth < 8:
            probe = _probe(name)
            ok = all(reachable(r.name, depth + 1) for r in TRANSLATION_RULES[name](probe))
        cache[name] = ok
        return ok

    out: list[Instruction] = []

    def emit(inst: Instruction) -> None:
        if inst.name in basis:
            out.append(inst)
            return
        if not reachable(inst.name):
            raise TranslationError(f"no rule chain translates {inst.name} into basis {sorted(target.basis)}")
        for r in TRANSLATION_RULES[inst.name](inst):
            emit(r)

    for inst in circuit.instructions:
        if inst.name == "BOX":
            raise TranslationError(f"unexpanded BOX({inst.label}) reached basis translation")
        emit(inst)
    return circuit.replace(out)


def _probe(name: str) -> Instruction:
    if name in ("SWAP", "CX"):
        return Instruction(name, (0, 1))
    if name == "CP":
        return Instruction(name, (0, 1), (0.0,))
    if name in ("RZ",):
        return Instruction(name, (0,), (0.0,))
    return Instruction(name, (0,))


class BasisTranslate(BasePass):
    name = "BasisTranslate"
    module = "basis"
    stages = (Stage.TRANSLATION,)

    def __init__(self, target: Target):
        self.target = target

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit | None:
        basis = self.target.basis | _PASS_THROUGH
        if all(name in basis for name in dag.count_ops()):
            return None
        return DagCircuit.from_circuit(basis_translate(dag.to_circuit(), self.target))
