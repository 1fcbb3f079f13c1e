"""Circuit intermediate representation: instruction lists, the dependency DAG,
workload generators and the line-oriented text format."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

ONE_QUBIT_GATES = frozenset({"H", "X", "SX", "RZ", "DELAY"})
TWO_QUBIT_GATES = frozenset({"CP", "CX", "SWAP"})
GATE_NAMES = ONE_QUBIT_GATES | TWO_QUBIT_GATES | {"BOX"}
_PARAM_COUNT = {"H": 0, "X": 0, "SX": 0, "CX": 0, "SWAP": 0, "RZ": 1, "CP": 1, "DELAY": 1, "BOX": 0}


class CircuitError(ValueError):
    """Malformed circuit, instruction or circuit file."""


@dataclass(frozen=True, slots=True)
class Instruction:
    """One gate application.

    ``params`` holds the rotation angle (radians) for RZ/CP and the tick count
    for DELAY.  ``label`` names the high-level operation of a BOX; the box
    arity is the number of qubits it acts on.
    """

    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    label: str | None = None

    def __post_init__(self):
        name = self.name
        if name not in GATE_NAMES:
            raise CircuitError(f"unknown gate {name!r}")
        nq = len(self.qubits)
        if name == "BOX":
            if nq < 1:
                raise CircuitError("BOX arity must be >= 1")
            if not self.label:
                raise CircuitError("BOX requires a label")
        elif nq != (1 if name in ONE_QUBIT_GATES else 2):
            raise CircuitError(f"{name} acts on {1 if name in ONE_QUBIT_GATES else 2} qubit(s), got {nq}")
        if nq > 1 and len(set(self.qubits)) != nq:
            raise CircuitError(f"repeated qubit in {name}{self.qubits}")
        if len(self.params) != _PARAM_COUNT[name]:
            raise CircuitError(f"{name} takes {_PARAM_COUNT[name]} parameter(s)")
        for p in self.params:
            if not math.isfinite(p):
                raise CircuitError(f"non-finite parameter in {name}")
        if name == "DELAY" and self.params[0] < 0:
            raise CircuitError("DELAY duration must be >= 0")

    @property
    def num_qubits(self) -> int:
        return len(self.qubits)

    def remap(self, mapping: Sequence[int]) -> Instruction:
        return Instruction(self.name, tuple(mapping[q] for q in self.qubits), self.params, self.label)

    def to_text(self) -> str:
        head = self.name
        if self.name == "BOX":
            head += f"({self.label})"
        elif self.name == "DELAY":
            head += f"({int(self.params[0])})" if float(self.params[0]).is_integer() else f"({self.params[0]!r})"
        elif self.params:
            head += "(" + ", ".join(repr(float(p)) for p in self.params) + ")"
        return head + " " + ", ".join(f"q{q}" for q in self.qubits)


# Gate constructors.  Short names follow the usual circuit-library idiom.
def h(q: int) -> Instruction:
    return Instruction("H", (q,))


def x(q: int) -> Instruction:
    return Instruction("X", (q,))


def sx(q: int) -> Instruction:
    return Instruction("SX", (q,))


def rz(theta: float, q: int) -> Instruction:
    return Instruction("RZ", (q,), (float(theta),))


def cp(theta: float, a: int, b: int) -> Instruction:
    return Instruction("CP", (a, b), (float(theta),))


def cx(a: int, b: int) -> Instruction:
    return Instruction("CX", (a, b))


def swap(a: int, b: int) -> Instruction:
    return Instruction("SWAP", (a, b))


def delay(duration: int, q: int) -> Instruction:
    return Instruction("DELAY", (q,), (duration,))


def box(label: str, qubits: Sequence[int]) -> Instruction:
    return Instruction("BOX", tuple(qubits), (), label)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    instructions: tuple[Instruction, ...] = ()
    name: str = "circuit"

    def __post_init__(self):
        if self.num_qubits < 0:
            raise CircuitError("num_qubits must be >= 0")
        if not isinstance(self.instructions, tuple):
            object.__setattr__(self, "instructions", tuple(self.instructions))
        n = self.num_qubits
        for inst in self.instructions:
            for q in inst.qubits:
                if not 0 <= q < n:
                    raise CircuitError(f"qubit {q} out of range for {n}-qubit circuit in {inst.to_text()}")

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def count_ops(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for inst in self.instructions:
            counts[inst.name] = counts.get(inst.name, 0) + 1
        return counts

    def replace(self, instructions: Iterable[Instruction], num_qubits: int | None = None) -> Circuit:
        return Circuit(self.num_qubits if num_qubits is None else num_qubits, tuple(instructions), self.name)

    def wire(self, q: int) -> list[Instruction]:
        """Instructions touching qubit ``q``, in program order."""
        return [inst for inst in self.instructions if q in inst.qubits]

    def to_text(self) -> str:
        lines = [f"qubits {self.num_qubits}", f"name {self.name}"]
        lines.extend(inst.to_text() for inst in self.instructions)
        return "\n".join(lines) + "\n"


class DagCircuit:
    """Dependency-DAG view of a circuit.

    Each op node is linked on every qubit it touches to the previous and next
    node on that wire; the wire ends are the per-qubit input/output boundary
    nodes.  The linkage is built lazily so passes that only sweep the
    instruction list never pay for it.
    """

    def __init__(self, num_qubits: int, name: str = "circuit"):
        self.num_qubits = num_qubits
        self.name = name
        self._ops: dict[int, Instruction] = {}
        self._next_id = 0
        self._cached: tuple[Instruction, ...] | None = ()
        self._linked = True
        # (node, qubit) -> neighbouring node on that wire
        self._prev: dict[tuple[int, int], int] = {}
        self._succ: dict[tuple[int, int], int] = {}
        self._counts: dict[str, int] = {}
        for q in range(num_qubits):
            self._succ[(self.input_node(q), q)] = self.output_node(q)
            self._prev[(self.output_node(q), q)] = self.input_node(q)

    # boundary nodes carry negative ids so op ids stay dense from 0
    @staticmethod
    def input_node(q: int) -> int:
        return -2 * q - 1

    @staticmethod
    def output_node(q: int) -> int:
        return -2 * q - 2

    @staticmethod
    def is_op_node(node: int) -> bool:
        return node >= 0

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> DagCircuit:
        dag = cls.__new__(cls)
        dag.num_qubits = circuit.num_qubits
        dag.name = circuit.name
        dag._ops = dict(enumerate(circuit.instructions))
        dag._next_id = len(circuit.instructions)
        dag._cached = circuit.instructions
        dag._linked = False
        dag._prev = {}
        dag._succ = {}
        dag._counts = circuit.count_ops()
        return dag

    def _link(self) -> None:
        if self._linked:
            return
        last = {q: self.input_node(q) for q in range(self.num_qubits)}
        prev, succ = self._prev, self._succ
        for node, inst in self._ops.items():
            for q in inst.qubits:
                p = last[q]
                succ[(p, q)] = node
                prev[(node, q)] = p
                last[q] = node
        for q in range(self.num_qubits):
            out = self.output_node(q)
            succ[(last[q], q)] = out
            prev[(out, q)] = last[q]
        self._linked = True

    def to_circuit(self) -> Circuit:
        if self._cached is None:
            self._cached = tuple(self._ops[n] for n in self.topological_op_nodes())
        return Circuit(self.num_qubits, self._cached, self.name)

    # -- queries ---------------------------------------------------------
    def size(self) -> int:
        return len(self._ops)

    def count_ops(self) -> dict[str, int]:
        return {k: v for k, v in self._counts.items() if v}

    def has_op(self, name: str) -> bool:
        return self._counts.get(name, 0) > 0

    def op(self, node: int) -> Instruction:
        return self._ops[node]

    def op_nodes(self) -> list[int]:
        return list(self._ops)

    def successor_on(self, node: int, q: int) -> int:
        self._link()
        return self._succ[(node, q)]

    def predecessor_on(self, node: int, q: int) -> int:
        self._link()
        return self._prev[(node, q)]

    def successors(self, node: int) -> list[int]:
        self._link()
        qubits = self._ops[node].qubits if node >= 0 else (self._boundary_qubit(node),)
        return sorted({self._succ[(node, q)] for q in qubits if (node, q) in self._succ})

    def predecessors(self, node: int) -> list[int]:
        self._link()
        qubits = self._ops[node].qubits if node >= 0 else (self._boundary_qubit(node),)
        return sorted({self._prev[(node, q)] for q in qubits if (node, q) in self._prev})

    @staticmethod
    def _boundary_qubit(node: int) -> int:
        return (-node - 1) // 2

    def edges(self) -> list[tuple[int, int, int]]:
        """All wire edges ``(src, dst, qubit)``, boundary nodes included."""
        self._link()
        return [(src, dst, q) for (src, q), dst in self._succ.items()]

    def topological_op_nodes(self) -> list[int]:
        """Kahn's algorithm, smallest node id first among ready nodes.

        For an unmodified DAG this reproduces the original list order.
        """
        self._link()
        indeg = {n: 0 for n in self._ops}
        for n, inst in self._ops.items():
            for q in inst.qubits:
                if self._prev[(n, q)] >= 0:
                    indeg[n] += 1
        ready = [n for n, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            n = heapq.heappop(ready)
            order.append(n)
            for q in self._ops[n].qubits:
                s = self._succ[(n, q)]
                if s >= 0:
                    indeg[s] -= 1
                    if indeg[s] == 0:
                        heapq.heappush(ready, s)
        return order

    # -- mutation --------------------------------------------------------
    def _dirty(self) -> None:
        self._cached = None

    def remove_op(self, node: int) -> None:
        self._link()
        inst = self._ops.pop(node)
        self._counts[inst.name] -= 1
        for q in inst.qubits:
            p = self._prev.pop((node, q))
            s = self._succ.pop((node, q))
            self._succ[(p, q)] = s
            self._prev[(s, q)] = p
        self._dirty()

    def apply_back(self, inst: Instruction) -> int:
        self._link()
        node = self._next_id
        self._next_id += 1
        self._ops[node] = inst
        self._counts[inst.name] = self._counts.get(inst.name, 0) + 1
        for q in inst.qubits:
            out = self.output_node(q)
            p = self._prev[(out, q)]
            self._succ[(p, q)] = node
            self._prev[(node, q)] = p
            self._succ[(node, q)] = out
            self._prev[(out, q)] = node
        if self._cached is not None:
            self._cached = self._cached + (inst,)
        return node

    def substitute(self, node: int, replacement: Sequence[Instruction]) -> list[int]:
        """Replace ``node`` by a sequence acting on a subset of its qubits."""
        self._link()
        inst = self._ops[node]
        allowed = set(inst.qubits)
        for r in replacement:
            if not allowed.issuperset(r.qubits):
                raise CircuitError(f"replacement {r.to_text()} leaves the qubits of {inst.to_text()}")
        new_nodes = []
        for r in replacement:
            nid = self._next_id
            self._next_id += 1
            self._ops[nid] = r
            self._counts[r.name] = self._counts.get(r.name, 0) + 1
            for q in r.qubits:
                s = node  # insert just before the node being replaced
                p = self._prev[(s, q)]
                self._succ[(p, q)] = nid
                self._prev[(nid, q)] = p
                self._succ[(nid, q)] = s
                self._prev[(s, q)] = nid
            new_nodes.append(nid)
        self.remove_op(node)
        return new_nodes


def to_dag(circuit: Circuit) -> DagCircuit:
    return DagCircuit.from_circuit(circuit)


def from_dag(dag: DagCircuit) -> Circuit:
    return dag.to_circuit()


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    size: int
    two_qubit_count: int


def metrics(circuit: Circuit | DagCircuit) -> CircuitMetrics:
    if isinstance(circuit, DagCircuit):
        circuit = circuit.to_circuit()
    level = [0] * circuit.num_qubits
    depth = 0
    two_q = 0
    for inst in circuit.instructions:
        qs = inst.qubits
        if len(qs) == 1:
            d = level[qs[0]] + 1
            level[qs[0]] = d
        else:
            d = max(level[q] for q in qs) + 1
            for q in qs:
                level[q] = d
            if len(qs) == 2:
                two_q += 1
        if d > depth:
            depth = d
    return CircuitMetrics(depth=depth, size=len(circuit.instructions), two_qubit_count=two_q)


# -- workloads ---------------------------------------------------------------
def qft_body(qubits: Sequence[int]) -> list[Instruction]:
    """Textbook QFT on ``qubits``: H and controlled phases, then reversal swaps."""
    n = len(qubits)
    out: list[Instruction] = []
    for i in range(n):
        out.append(h(qubits[i]))
        for j in range(i + 1, n):
            out.append(cp(math.pi / 2 ** (j - i), qubits[j], qubits[i]))
    for i in range(n // 2):
        out.append(swap(qubits[i], qubits[n - 1 - i]))
    return out


def build_qft(n: int, boxed: bool = False) -> Circuit:
    if n < 1:
        raise CircuitError(f"invalid size {n}: need at least one qubit")
    if boxed:
        return Circuit(n, (box("qft", range(n)),), f"qft{n}")
    return Circuit(n, tuple(qft_body(range(n))), f"qft{n}")


def build_ghz(n: int) -> Circuit:
    if n < 1:
        raise CircuitError(f"invalid size {n}: need at least one qubit")
    return Circuit(n, (h(0),) + tuple(cx(i, i + 1) for i in range(n - 1)), f"ghz{n}")


# -- text format -------------------------------------------------------------
def parse_instruction(text: str) -> Instruction:
    text = text.strip()
    head, _, rest = text.partition(" ")
    params: tuple[float, ...] = ()
    label = None
    if "(" in head:
        if not head.endswith(")"):
            # parameters may contain spaces, e.g. "CP(0.1, 0.2) q0, q1"
            close = text.index(")")
            head, rest = text[: close + 1], text[close + 1 :]
        name, _, arg = head.partition("(")
        arg = arg[:-1]
        if name == "BOX":
            label = arg.strip()
        else:
            params = tuple(float(a) for a in arg.split(","))
    else:
        name = head
    qubits = []
    for tok in rest.split(","):
        tok = tok.strip()
        if not tok.startswith("q"):
            raise CircuitError(f"bad qubit token {tok!r}")
        qubits.append(int(tok[1:]))
    if name == "DELAY":
        params = tuple(int(p) if float(p).is_integer() else p for p in params)
    return Instruction(name, tuple(qubits), params, label)


def loads_circuit(text: str) -> Circuit:
    num_qubits = None
    name = "circuit"
    insts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("qubits "):
                num_qubits = int(line.split()[1])
            elif line.startswith("name "):
                name = line[5:].strip()
            else:
                insts.append(parse_instruction(line))
        except (ValueError, IndexError) as exc:
            raise CircuitError(f"line {lineno}: {exc}") from exc
    if num_qubits is None:
        raise CircuitError("missing 'qubits <n>' header")
    return Circuit(num_qubits, tuple(insts), name)


def load_circuit(path: str | Path) -> Circuit:
    return loads_circuit(Path(path).read_text())


def save_circuit(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(circuit.to_text())
