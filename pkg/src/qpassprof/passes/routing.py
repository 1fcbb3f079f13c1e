"""Greedy shortest-path SWAP insertion."""

from __future__ import annotations

from collections import deque

from ..circuit import Circuit, DagCircuit, Instruction
from ..framework import BasePass, PropertySet
from ..registry import Stage
from ..target import Target
from .layout import Layout


class RoutingError(RuntimeError):
    pass


class _PathCache:
    """BFS trees rooted at each destination; neighbours visited in ascending order."""

    def __init__(self, target: Target):
        self.target = target
        self._parents: dict[int, dict[int, int]] = {}

    def parents(self, root: int) -> dict[int, int]:
        tree = self._parents.get(root)
        if tree is None:
            tree = {root: root}
            todo = deque([root])
            while todo:
                u = todo.popleft()
                for w in self.target.neighbors(u):
                    if w not in tree:
                        tree[w] = u
                        todo.append(w)
            self._parents[root] = tree
        return tree


def swap_route(circuit: Circuit, layout: Layout, target: Target) -> tuple[Circuit, Layout]:
    """Place ``circuit`` with ``layout`` and make every 2-qubit gate act on a coupled pair.

    Gates are processed in list order (a topological order of the DAG).  For a
    non-adjacent pair the first qubit is swapped along the BFS shortest path
    toward the second until the two are neighbours.  Returns the physical
    circuit and the layout carrying the accumulated output permutation.
    """
    N = target.num_qubits
    if len(layout.initial) != N:
        raise RoutingError(f"layout covers {len(layout.initial)} qubits, target has {N}")
    pos = list(layout.initial)  # virtual -> physical
    at = [0] * N  # physical -> virtual
    for v, p in enumerate(pos):
        at[p] = v
    paths = _PathCache(target)
    coupled = target.coupling
    out: list[Instruction] = []
    for inst in circuit.instructions:
        qs = inst.qubits
        if len(qs) == 1:
            out.append(Instruction(inst.name, (pos[qs[0]],), inst.params, inst.label))
            continue
        if len(qs) > 2:
            raise RoutingError(f"cannot route unexpanded {inst.name}({inst.label}) on {len(qs)} qubits")
        a, b = qs
        pa, pb = pos[a], pos[b]
        if ((pa, pb) if pa < pb else (pb, pa)) not in coupled:
            tree = paths.parents(pb)
            if pa not in tree:
                raise RoutingError(f"routing infeasible: physical qubits {pa} and {pb} are disconnected")
            cur = pa
            while tree[cur] != pb:
                nxt = tree[cur]
                out.append(Instruction("SWAP", (cur, nxt)))
                va, vb = at[cur], at[nxt]
                at[cur], at[nxt] = vb, va
                pos[va], pos[vb] = nxt, cur
                cur = nxt
            pa = cur
        out.append(Instruction(inst.name, (pa, pb), inst.params, inst.label))
    inverse_initial = {p: v for v, p in enumerate(layout.initial)}
    perm = tuple(inverse_initial[pos[v]] for v in range(N))
    routed = Circuit(N, tuple(out), circuit.name)
    return routed, Layout(layout.initial, layout.num_virtual, perm)


class SwapRoute(BasePass):
    name = "SwapRoute"
    module = "routing"
    stages = (Stage.ROUTING,)

    def __init__(self, target: Target):
        self.target = target

    def run(self, dag: DagCircuit, props: PropertySet) -> DagCircuit:
        layout = props["layout"]
        if layout is None:
            raise RoutingError("no layout chosen before routing")
        routed, final = swap_route(dag.to_circuit(), layout, self.target)
        props["final_layout"] = final
        props["swaps_inserted"] = sum(1 for i in routed.instructions if i.name == "SWAP") - dag.count_ops().get("SWAP", 0)
        return DagCircuit.from_circuit(routed)
