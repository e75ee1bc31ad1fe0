"""Staggering: layered circuits to register programs of width w+1.

Each layer transition V_i -> V_{i+1} is summarized by a multigraph on
the layer-i gates.  A layer-(i+1) gate whose operands are both held in
registers becomes an edge between them (a self-loop when they coincide
or when one operand is a leaf); a gate reading two leaves costs no
registers until it is emitted and goes to the constant list.  Because
each layer-(i+1) gate contributes one edge or one constant entry,
|V(G)| <= w and |E(G)| + |V'| <= w.

order_edges schedules the edges so that the running register demand --
results already computed plus layer-i values still needed -- never
exceeds max{|V(G)|, |E(G)|+1, |E(G)|+|V'|}.  Acyclic components go
first; inside a component, an edge lying on a cycle (loops and parallel
copies included) is preferred, and once the component is a tree, leaf
edges are peeled.  The result register can reuse the register of an
operand that dies with the edge; a self-loop reads its register twice
and therefore always takes a fresh one.

staggerize replays the schedule as straight-line code, giving at most
w+1 registers and one apply step per internal gate: leaf operands are
embedded as immediates, so no loads are spent on them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import (
    ApplyStep,
    BinGate,
    ConstLeaf,
    ConstOperand,
    LayeredCircuit,
    Operand,
    RegOperand,
    SlpBuilder,
    StraightLineProgram,
    VarLeaf,
    VarOperand,
    validate,
)
from .errors import ParamError


@dataclass(frozen=True)
class MultiEdge:
    """Edge of a layer multigraph; u <= v, u == v for self-loops."""

    u: int
    v: int
    gate: int  # id of the layer-(i+1) gate this edge computes

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class LayerMultigraph:
    vertices: frozenset[int]
    edges: tuple[MultiEdge, ...]
    constant_gates: tuple[int, ...]


def build_layer_multigraph(circuit: LayeredCircuit, layer_index: int) -> LayerMultigraph:
    """Multigraph for the transition V_layer_index -> V_{layer_index+1}.

    For layer_index 1 the register-resident set is empty (leaves are
    immediates), so every layer-2 gate lands in constant_gates.
    """
    if not 1 <= layer_index < circuit.layer_count:
        raise ParamError(
            f"no transition starting at layer {layer_index} in a "
            f"{circuit.layer_count}-layer circuit"
        )
    resident = set(circuit.layers[layer_index - 1]) if layer_index >= 2 else set()
    edges = []
    constants = []
    for gid in circuit.layers[layer_index]:
        g = circuit.gates[gid]
        if not isinstance(g, BinGate):
            raise ParamError(f"gate {gid} in layer {layer_index + 1} is not internal")
        ends = [ref for ref in (g.left, g.right) if ref in resident]
        if not ends:
            constants.append(gid)
        elif len(ends) == 1:
            edges.append(MultiEdge(ends[0], ends[0], gid))
        else:
            a, b = sorted(ends)
            edges.append(MultiEdge(a, b, gid))
    return LayerMultigraph(frozenset(resident), tuple(edges), tuple(constants))


@dataclass(frozen=True)
class EdgeStep:
    """One scheduled edge removal with its register bookkeeping."""

    edge: MultiEdge
    fresh: bool  # result needs a register not freed by this step
    freed: tuple[int, ...]  # vertices isolated by this removal


@dataclass(frozen=True)
class OrderResult:
    order: tuple[MultiEdge, ...]
    census: tuple[int, ...]  # census[0] before any step, then one peak per step
    steps: tuple[EdgeStep, ...]


def _edge_key(e: MultiEdge) -> tuple[int, int, int]:
    return (e.u, e.v, e.gate)


def _components(edges: list[MultiEdge]) -> list[set[int]]:
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        for x in (e.u, e.v):
            parent.setdefault(x, x)
        ru, rv = find(e.u), find(e.v)
        if ru != rv:
            parent[ru] = rv
    groups: dict[int, set[int]] = {}
    for x in parent:
        groups.setdefault(find(x), set()).add(x)
    return list(groups.values())


def _connected_without(edges: list[MultiEdge], skip: MultiEdge, start: int, goal: int) -> bool:
    """Is goal reachable from start when one copy of skip is removed?"""
    adjacency: dict[int, list[int]] = {}
    skipped = False
    for e in edges:
        if not skipped and e == skip:
            skipped = True
            continue
        adjacency.setdefault(e.u, []).append(e.v)
        adjacency.setdefault(e.v, []).append(e.u)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        if x == goal:
            return True
        for y in adjacency.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return goal in seen


def order_edges(graph: LayerMultigraph) -> OrderResult:
    """Schedule the edges within the documented register census."""
    remaining = list(graph.edges)

    def degree(x: int) -> int:
        return sum((e.u == x) + (e.v == x) for e in remaining)

    def nonisolated() -> int:
        alive = set()
        for e in remaining:
            alive.add(e.u)
            alive.add(e.v)
        return len(alive)

    components = _components(remaining)

    def is_acyclic(comp: set[int]) -> bool:
        count = sum(1 for e in remaining if e.u in comp)
        return count == len(comp) - 1

    components.sort(key=lambda comp: (0 if is_acyclic(comp) else 1, min(comp)))

    order: list[MultiEdge] = []
    steps: list[EdgeStep] = []
    census = [nonisolated()]
    removed = 0
    for comp in components:
        while True:
            local = [e for e in remaining if e.u in comp]
            if not local:
                break
            non_cut = [
                e
                for e in local
                if e.is_loop or _connected_without(local, e, e.u, e.v)
            ]
            if non_cut:
                e = min(non_cut, key=_edge_key)
            else:
                leafy = [e for e in local if degree(e.u) == 1 or degree(e.v) == 1]
                e = min(leafy, key=_edge_key)
            ni_before = nonisolated()
            remaining.remove(e)
            freed = tuple(
                sorted({x for x in (e.u, e.v) if degree(x) == 0})
            )
            fresh = e.is_loop or not freed
            census.append(removed + ni_before + (1 if fresh else 0))
            removed += 1
            order.append(e)
            steps.append(EdgeStep(e, fresh, freed))
    return OrderResult(tuple(order), tuple(census), tuple(steps))


def census_bound(graph: LayerMultigraph) -> int:
    """max{|V|, |E|+1, |E|+|V'|}, the register budget for one transition."""
    v = len(graph.vertices)
    e = len(graph.edges)
    return max(v, e + 1, e + len(graph.constant_gates))


def staggerize(circuit: LayeredCircuit, name: str | None = None) -> StraightLineProgram:
    """Equivalent straight-line program over at most width+1 registers."""
    validate(circuit)
    width = circuit.width
    register_count = max(width + 1, 1)
    sb = SlpBuilder(
        circuit.ring,
        circuit.mode,
        circuit.num_variables,
        register_count,
        name or f"{circuit.name}-staggered",
    )

    layer_of = circuit.layer_of()
    out_layer = layer_of[circuit.output_id]
    leaf_ids = set(circuit.layers[0])

    def leaf_operand(gid: int) -> Operand:
        g = circuit.gates[gid]
        if isinstance(g, VarLeaf):
            return VarOperand(g.index)
        if isinstance(g, ConstLeaf):
            return ConstOperand(g.value)
        raise ParamError(f"gate {gid} is not a leaf")

    if out_layer == 1:
        sb.load(0, leaf_operand(circuit.output_id))
        return sb.finish(0)

    free = list(range(register_count - 1, -1, -1))  # pop() yields smallest

    def alloc() -> int:
        if not free:
            raise AssertionError("register budget exhausted; scheduling bug")
        return free.pop()

    def release(reg: int) -> None:
        free.append(reg)
        free.sort(reverse=True)

    register_of: dict[int, int] = {}
    for i in range(1, out_layer):
        graph = build_layer_multigraph(circuit, i)
        # Layer-i gates nothing consumes die now.
        used = {e.u for e in graph.edges} | {e.v for e in graph.edges}
        for vid in sorted(graph.vertices - used):
            release(register_of.pop(vid))

        def operand_for(ref: int) -> Operand:
            if ref in leaf_ids:
                return leaf_operand(ref)
            return RegOperand(register_of[ref])

        schedule = order_edges(graph)
        for step in schedule.steps:
            gate = circuit.gates[step.edge.gate]
            left, right = operand_for(gate.left), operand_for(gate.right)
            if step.fresh:
                dest = alloc()
                sb.apply(dest, gate.op, left, right)
                for vid in step.freed:
                    release(register_of.pop(vid))
            else:
                freed_regs = sorted(register_of[vid] for vid in step.freed)
                dest = freed_regs[0]
                sb.apply(dest, gate.op, left, right)
                for vid in step.freed:
                    reg = register_of.pop(vid)
                    if reg != dest:
                        release(reg)
            register_of[step.edge.gate] = dest
        for gid in graph.constant_gates:
            gate = circuit.gates[gid]
            dest = alloc()
            sb.apply(dest, gate.op, operand_for(gate.left), operand_for(gate.right))
            register_of[gid] = dest
        # Registers now hold exactly the layer-(i+1) values.
        assert set(register_of) == set(circuit.layers[i]), "layer not fully consumed"

    return sb.finish(register_of[circuit.output_id])
