"""Initial layout selection: trivial identity map and VF2 monomorphism search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..circuit import Circuit, DagCircuit
from ..framework import BasePass, PropertySet
from ..registry import Stage
from ..target import Target


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class Layout:
    """Virtual-to-physical placement over the whole target.

    Virtual qubits ``num_virtual..`` are ancillas.  ``output_permutation[v]``
    is the virtual qubit whose initial physical position ``v`` occupies at the
    end of the circuit, so ``final[v] == initial[output_permutation[v]]``.
    """

    initial: tuple[int, ...]
    num_virtual: int
    output_permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(set(self.initial)) != len(self.initial):
            raise ValueError("layout is not injective")
        if self.output_permutation is None:
            object.__setattr__(self, "output_permutation", tuple(range(len(self.initial))))
        elif sorted(self.output_permutation) != list(range(len(self.initial))):
            raise ValueError("output_permutation is not a permutation")

    @property
    def virtual_to_physical(self) -> dict[int, int]:
        return {v: self.initial[v] for v in range(self.num_virtual)}

    @property
    def final(self) -> tuple[int, ...]:
        return tuple(self.initial[p] for p in self.output_permutation)

    @classmethod
    def from_partial(cls, mapping: Sequence[int], num_physical: int) -> Layout:
        """Extend a map of the circuit qubits with ancillas on the unused physical qubits."""
        used = set(mapping)
        free = [p for p in range(num_physical) if p not in used]
        return cls(tuple(mapping) + tuple(free), len(mapping))


def interaction_graph(circuit: Circuit) -> dict[tuple[int, int], int]:
    """Undirected interaction edges with their multi-qubit gate counts."""
    edges: dict[tuple[int, int], int] = {}
    for inst in circuit.instructions:
        qs = inst.qubits
        if len(qs) < 2:
            continue
        for i in range(len(qs)):
            for j in range(i + 1, len(qs)):
                e = (qs[i], qs[j]) if qs[i] < qs[j] else (qs[j], qs[i])
                edges[e] = edges.get(e, 0) + 1
    return edges


def trivial_layout(circuit: Circuit, target: Target) -> Layout:
    if circuit.num_qubits > target.num_qubits:
        raise CapacityError(f"{circuit.num_qubits}-qubit circuit does not fit a {target.num_qubits}-qubit target")
    return Layout.from_partial(range(circuit.num_qubits), target.num_qubits)


@dataclass
class VF2Result:
    mapping: tuple[int, ...] | None  # virtual -> physical for the circuit qubits
    stop_reason: str
    states: int
    solutions: int
    score: float | None = None


SOLUTION_FOUND = "solution found"
NO_SOLUTION = "nonexistent solution"
BUDGET_REACHED = "max states reached"


def vf2_mapping(
    num_virtual: int,
    edges: dict[tuple[int, int], int],
    target: Target,
    max_states: int | None = None,
    scoring: str = "first",
) -> VF2Result:
    """Depth-first monomorphism search from the interaction graph into the coupling graph.

    ``scoring="first"`` stops at the first complete mapping.
    ``"exhaustive"`` keeps enumerating until the search space or the state
    budget runs out and returns the mapping with the lowest gate-count
    weighted edge error (ties: lexicographically smallest mapping).
    """
    if scoring not in ("first", "exhaustive"):
        raise ValueError(f"unknown scoring {scoring!r}")
    N = target.num_qubits
    adj1: list[set[int]] = [set() for _ in range(num_virtual)]
    for a, b in edges:
        adj1[a].add(b)
        adj1[b].add(a)
    active = [v for v in range(num_virtual) if adj1[v]]
    isolated = [v for v in range(num_virtual) if not adj1[v]]
    if num_virtual > N or len(edges) > len(target.coupling):
        return VF2Result(None, NO_SOLUTION, 0, 0)

    order = _match_order(active, adj1)
    pos_in_order = {v: i for i, v in enumerate(order)}
    # neighbours already placed when each position is reached
    prior = [[w for w in adj1[v] if pos_in_order[w] < i] for i, v in enumerate(order)]
    deg1 = [len(adj1[v]) for v in order]
    future = [deg1[i] - len(prior[i]) for i in range(len(order))]
    adj2 = [target.neighbors(p) for p in range(N)]
    adj2_sets = [set(a) for a in adj2]
    deg2 = [len(a) for a in adj2]
    used = [False] * N
    assign: list[int | None] = [None] * len(order)
    phys_of: dict[int, int] = {}

    def candidates(k: int) -> list[int]:
        d = deg1[k]
        nf = future[k]
        if prior[k]:
            anchors = [phys_of[w] for w in prior[k]]
            pool = adj2[anchors[0]]
            rest = [adj2_sets[a] for a in anchors[1:]]
        else:
            pool = range(N)
            rest = []
        out = []
        for p in pool:
            if used[p] or deg2[p] < d:
                continue
            if rest and not all(p in s for s in rest):
                continue
            if nf:
                free_nb = 0
                for r in adj2[p]:
                    if not used[r]:
                        free_nb += 1
                if free_nb < nf:
                    continue
            out.append(p)
        return out

    def free_physical(taken) -> list[int]:
        return [p for p in range(N) if p not in taken]

    if not order:
        mapping = [0] * num_virtual
        for v, p in zip(isolated, range(N)):
            mapping[v] = p
        return VF2Result(tuple(mapping), SOLUTION_FOUND, 0, 1, 0.0)

    weighted = sorted(edges.items())
    best: tuple[float, tuple[int, ...]] | None = None
    states = 0
    solutions = 0
    budget_hit = False
    stack = [iter(candidates(0))]
    n = len(order)
    while stack:
        k = len(stack) - 1
        if assign[k] is not None:
            used[assign[k]] = False
            del phys_of[order[k]]
            assign[k] = None
        p = next(stack[-1], None)
        if p is None:
            stack.pop()
            continue
        if max_states is not None and states >= max_states:
            budget_hit = True
            break
        states += 1
        assign[k] = p
        used[p] = True
        phys_of[order[k]] = p
        if k + 1 < n:
            stack.append(iter(candidates(k + 1)))
            continue
        solutions += 1
        mapping = [-1] * num_virtual
        for v, pv in phys_of.items():
            mapping[v] = pv
        taken = set(phys_of.values())
        for v, pv in zip(isolated, free_physical(taken)):
            mapping[v] = pv
        vec = tuple(mapping)
        if scoring == "first":
            return VF2Result(vec, SOLUTION_FOUND, states, 1, _score(weighted, vec, target))
        score = _score(weighted, vec, target)
        if best is None or (score, vec) < best:
            best = (score, vec)
    if best is None:
        return VF2Result(None, BUDGET_REACHED if budget_hit else NO_SOLUTION, states, 0)
    return VF2Result(best[1], BUDGET_REACHED if budget_hit else SOLUTION_FOUND, states, solutions, best[0])


def _score(weighted, vec, target: Target) -> float:
    return sum(w * target.edge_error(vec[a], vec[b]) for (a, b), w in weighted)


def _match_order(active: list[int], adj1: list[set[int]]) -> list[int]:
    """Most-connected-first ordering: start at the highest-degree node, then
    repeatedly take the node with the most already-ordered neighbours
    (ties: higher degree, then lower index)."""
    remaining = set(active)
    order: list[int] = []
    placed_nb = {v: 0 for v in active}
    while remaining:
        v = min(remaining, key=lambda u: (-placed_nb[u], -len(adj1[u]), u))
        order.append(v)
        remaining.discard(v)
        for w in adj1[v]:
            if w in remaining:
                placed_nb[w] += 1
    return order


def vf2_layout(circuit: Circuit, target: Target, max_states: int | None = None,
               scoring: str = "first") -> Layout | None:
    res = vf2_mapping(circuit.num_qubits, interaction_graph(circuit), target, max_states, scoring)
    if res.mapping is None:
        return None
    return Layout.from_partial(res.mapping, target.num_qubits)


class TrivialLayout(BasePass):
    """Identity placement; leaves an already chosen layout alone."""

    name = "TrivialLayout"
    kind = "analysis"
    module = "layout"
    stages = (Stage.LAYOUT,)

    def __init__(self, target: Target):
        self.target = target

    def run(self, dag: DagCircuit, props: PropertySet) -> None:
        if props["layout"] is None:
            props["layout"] = trivial_layout(dag.to_circuit(), self.target)


class VF2Layout(BasePass):
    name = "VF2Layout"
    kind = "analysis"
    module = "layout"
    stages = (Stage.LAYOUT,)

    def __init__(self, target: Target, max_states: int | None = None, scoring: str = "first"):
        self.target = target
        self.max_states = max_states
        self.scoring = scoring

    def run(self, dag: DagCircuit, props: PropertySet) -> None:
        circuit = dag.to_circuit()
        res = vf2_mapping(circuit.num_qubits, interaction_graph(circuit), self.target, self.max_states, self.scoring)
        props["VF2Layout_stop_reason"] = res.stop_reason
        props["VF2Layout_states"] = res.states
        props["VF2Layout_solutions"] = res.solutions
        if res.mapping is not None:
            props["layout"] = Layout.from_partial(res.mapping, self.target.num_qubits)

    def __repr__(self) -> str:
        return f"VF2Layout(max_states={self.max_states}, scoring={self.scoring!r})"
