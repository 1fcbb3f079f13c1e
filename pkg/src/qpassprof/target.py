"""Hardware target: coupling graph, native basis and per-gate cost table."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

DEFAULT_BASIS = frozenset({"CX", "RZ", "SX", "X"})
DEFAULT_1Q_DURATION = 1
DEFAULT_2Q_DURATION = 10
DEFAULT_1Q_ERROR = 0.0001


class TargetError(ValueError):
    """Invalid target description or target file."""


@dataclass(frozen=True)
class GateCost:
    duration: int
    error: float


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def default_edge_error(a: int, b: int, num_qubits: int) -> float:
    return 0.001 * (1 + (a + b) / num_qubits)


@dataclass(frozen=True, eq=True)
class Target:
    """Undirected coupling graph plus gate costs.

    Two-qubit basis gates take their cost from the edge they act on; one-qubit
    gates are costed per gate name (wildcard over qubits).
    """

    num_qubits: int
    edge_costs: dict[tuple[int, int], GateCost]
    gate1q_costs: dict[str, GateCost]
    basis: frozenset[str] = DEFAULT_BASIS
    name: str = "target"
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise TargetError(f"invalid size: num_qubits={self.num_qubits}")
        adj: list[set[int]] = [set() for _ in range(self.num_qubits)]
        normalized = {}
        for (a, b), cost in self.edge_costs.items():
            if a == b:
                raise TargetError(f"coupling: self-loop on qubit {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise TargetError(f"coupling: edge ({a}, {b}) out of range for {self.num_qubits} qubits")
            _check_cost(cost, f"edge ({a}, {b})")
            normalized[_edge(a, b)] = cost
            adj[a].add(b)
            adj[b].add(a)
        for gname, cost in self.gate1q_costs.items():
            _check_cost(cost, f"gate1q {gname}")
        object.__setattr__(self, "edge_costs", normalized)
        object.__setattr__(self, "basis", frozenset(self.basis))
        object.__setattr__(self, "_adj", tuple(tuple(sorted(s)) for s in adj))

    __hash__ = None  # type: ignore[assignment]

    @property
    def coupling(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edge_costs)

    @property
    def gate_costs(self) -> dict[tuple[str, tuple[int, ...] | None], GateCost]:
        """Flat view keyed by ``(gate, qubits)``; ``None`` is the qubit wildcard."""
        table: dict[tuple[str, tuple[int, ...] | None], GateCost] = {
            (g, None): c for g, c in self.gate1q_costs.items()
        }
        for g in sorted(self.basis):
            if g in self.gate1q_costs:
                continue
            for e, c in self.edge_costs.items():
                table[(g, e)] = c
        return table

    def neighbors(self, q: int) -> tuple[int, ...]:
        return self._adj[q]

    def degree(self, q: int) -> int:
        return len(self._adj[q])

    def are_coupled(self, a: int, b: int) -> bool:
        return _edge(a, b) in self.edge_costs

    def edge_error(self, a: int, b: int) -> float:
        return self.edge_costs[_edge(a, b)].error

    def cost(self, gate: str, qubits: tuple[int, ...]) -> GateCost | None:
        if len(qubits) == 1:
            return self.gate1q_costs.get(gate)
        if len(qubits) == 2 and gate in self.basis:
            return self.edge_costs.get(_edge(*qubits))
        return None

    def is_connected(self) -> bool:
        seen = {0}
        todo = deque([0])
        while todo:
            for nb in self._adj[todo.popleft()]:
                if nb not in seen:
                    seen.add(nb)
                    todo.append(nb)
        return len(seen) == self.num_qubits

    def to_text(self) -> str:
        lines = [f"# {self.name}", f"qubits {self.num_qubits}", "basis " + " ".join(sorted(self.basis))]
        for g in sorted(self.gate1q_costs):
            c = self.gate1q_costs[g]
            lines.append(f"gate1q {g} {c.duration} {c.error!r}")
        for (a, b) in sorted(self.edge_costs):
            c = self.edge_costs[(a, b)]
            lines.append(f"edge {a} {b} {c.duration} {c.error!r}")
        return "\n".join(lines) + "\n"


def _check_cost(cost: GateCost, where: str) -> None:
    if cost.duration < 0:
        raise TargetError(f"{where}: duration must be >= 0, got {cost.duration}")
    if not 0.0 <= cost.error <= 1.0:
        raise TargetError(f"{where}: error must lie in [0, 1], got {cost.error}")


def _default_1q(basis: Iterable[str]) -> dict[str, GateCost]:
    return {g: GateCost(DEFAULT_1Q_DURATION, DEFAULT_1Q_ERROR) for g in basis if g in {"X", "SX", "RZ", "H"}}


def from_edges(num_qubits: int, edges: Iterable[tuple[int, int]], name: str = "target",
               basis: Iterable[str] = DEFAULT_BASIS) -> Target:
    """Target with default durations and the synthetic error gradient."""
    if num_qubits < 1:
        raise TargetError(f"invalid size: num_qubits={num_qubits}")
    costs = {
        _edge(a, b): GateCost(DEFAULT_2Q_DURATION, default_edge_error(a, b, num_qubits)) for a, b in edges
    }
    return Target(num_qubits, costs, _default_1q(basis), frozenset(basis), name)


def line_target(n: int) -> Target:
    if n < 1:
        raise TargetError(f"invalid size: line of {n} qubits")
    return from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"line:{n}")


def grid_target(rows: int, cols: int) -> Target:
    if rows < 1 or cols < 1:
        raise TargetError(f"invalid size: grid {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                edges.append((q, q + 1))
            if r + 1 < rows:
                edges.append((q, q + cols))
    return from_edges(rows * cols, edges, name=f"grid:{rows}x{cols}")


def loads_target(text: str, name: str = "target") -> Target:
    num_qubits = None
    basis = None
    edges: dict[tuple[int, int], GateCost] = {}
    raw_edges: list[tuple[int, int, int | None, float | None, int]] = []
    gate1q: dict[str, GateCost] = {}
    raw_1q: list[tuple[str, int | None, float | None]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            # the first comment line names the target
            if lineno == 1 and stripped[1:].strip():
                name = stripped[1:].strip()
            continue
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key, args = line[0], line[1:]
        try:
            if key == "qubits":
                (num,) = args
                num_qubits = int(num)
            elif key == "basis":
                basis = frozenset(args)
            elif key == "edge":
                if not 2 <= len(args) <= 4:
                    raise ValueError("expected 'edge <a> <b> [duration] [error]'")
                a, b = int(args[0]), int(args[1])
                dur = int(args[2]) if len(args) > 2 else None
                err = float(args[3]) if len(args) > 3 else None
                raw_edges.append((a, b, dur, err, lineno))
            elif key == "gate1q":
                if not 1 <= len(args) <= 3:
                    raise ValueError("expected 'gate1q <name> [duration] [error]'")
                dur = int(args[1]) if len(args) > 1 else None
                err = float(args[2]) if len(args) > 2 else None
                raw_1q.append((args[0], dur, err))
            else:
                raise ValueError(f"unknown directive {key!r}")
        except ValueError as exc:
            raise TargetError(f"line {lineno}: {exc}") from exc
    if num_qubits is None:
        raise TargetError("missing 'qubits <n>' line")
    if num_qubits < 1:
        raise TargetError(f"qubits: invalid size {num_qubits}")
    basis = DEFAULT_BASIS if basis is None else basis
    for a, b, dur, err, lineno in raw_edges:
        if not (0 <= a < num_qubits and 0 <= b < num_qubits):
            raise TargetError(f"coupling: edge ({a}, {b}) on line {lineno} out of range for {num_qubits} qubits")
        edges[_edge(a, b)] = GateCost(
            DEFAULT_2Q_DURATION if dur is None else dur,
            default_edge_error(a, b, num_qubits) if err is None else err,
        )
    if raw_1q:
        for g, dur, err in raw_1q:
            gate1q[g] = GateCost(DEFAULT_1Q_DURATION if dur is None else dur, DEFAULT_1Q_ERROR if err is None else err)
    else:
        gate1q = _default_1q(basis)
    return Target(num_qubits, edges, gate1q, basis, name)


def load_target(path: str | Path) -> Target:
    path = Path(path)
    return loads_target(path.read_text(), name=path.stem)


def save_target(target: Target, path: str | Path) -> None:
    Path(path).write_text(target.to_text())


def shipped_target_path(name: str) -> Path:
    if not name.endswith(".target"):
        name += ".target"
    return Path(str(resources.files("qpassprof") / "data" / name))


def resolve_target(ref: str) -> Target:
    """``line:N``, ``grid:RxC``, a file path, or the name of a shipped target."""
    if ref.startswith("line:"):
        return line_target(int(ref[5:]))
    if ref.startswith("grid:"):
        r, _, c = ref[5:].lower().partition("x")
        return grid_target(int(r), int(c))
    path = Path(ref)
    if path.exists():
        return load_target(path)
    shipped = shipped_target_path(path.name)
    if shipped.exists():
        return load_target(shipped)
    raise TargetError(f"no such target: {ref}")
