"""Seeded random generators and small oracles shared across test modules."""

from __future__ import annotations

import random

from slpforge.circuits import (
    BinGate,
    CircuitBuilder,
    ConstLeaf,
    LayeredCircuit,
    SlpBuilder,
    StraightLineProgram,
)
from slpforge.formulas import FConst, FOp, Formula, FormulaNode, FVar
from slpforge.polynomials import COMMUTATIVE, SparsePolynomial
from slpforge.rings import Ring


def random_layered_circuit(
    rng: random.Random,
    ring: Ring,
    mode: str,
    width: int,
    num_variables: int = 4,
    internal_layers: int = 4,
    degree_budget: int = 10,
    name: str = "rand",
) -> LayeredCircuit:
    """A valid layered circuit hitting the requested width in some layer.

    Gate operands come from the previous layer or the leaves, and a mul
    whose syntactic degree would pass the budget is demoted to add so
    test oracles can expand the result cheaply.
    """
    cb = CircuitBuilder(ring, mode, num_variables, name=name)
    degree: dict[int, int] = {}
    leaves = []
    for v in range(1, num_variables + 1):
        gid = cb.var_leaf(v)
        degree[gid] = 1
        leaves.append(gid)
    for _ in range(rng.randrange(1, 3)):
        gid = cb.const_leaf(rng.randrange(1, 7))
        degree[gid] = 0
        leaves.append(gid)

    previous: list[int] = []
    last_gate = None
    for layer_index in range(2, internal_layers + 2):
        # Force full width once so the generator exercises the bound.
        count = width if layer_index == 2 else rng.randrange(1, width + 1)
        current = []
        for _ in range(count):
            pool = leaves + previous
            left = rng.choice(pool)
            right = rng.choice(pool)
            op = rng.choice(("add", "mul"))
            if op == "mul" and degree[left] + degree[right] > degree_budget:
                op = "add"
            gid = cb.gate(layer_index, op, left, right)
            degree[gid] = (
                max(degree[left], degree[right])
                if op == "add"
                else degree[left] + degree[right]
            )
            current.append(gid)
        previous = current
        last_gate = current[-1]
    cb.set_output(last_gate if last_gate is not None else leaves[0])
    return cb.build()


def random_slp(
    rng: random.Random,
    ring: Ring,
    mode: str,
    register_count: int,
    num_variables: int = 3,
    step_count: int = 20,
    degree_budget: int = 6,
    name: str = "rslp",
) -> StraightLineProgram:
    """A random program whose syntactic degree respects the budget."""
    sb = SlpBuilder(ring, mode, num_variables, register_count=register_count, name=name)
    degree = [0] * register_count

    def operand():
        kind = rng.randrange(3)
        if kind == 0:
            r = rng.randrange(register_count)
            return sb.reg(r), degree[r]
        if kind == 1:
            return sb.var(rng.randrange(1, num_variables + 1)), 1
        return sb.const(rng.randrange(7)), 0

    written = []
    for _ in range(step_count):
        dest = rng.randrange(register_count)
        if rng.random() < 0.25:
            if rng.random() < 0.5:
                sb.load(dest, sb.var(rng.randrange(1, num_variables + 1)))
                degree[dest] = 1
            else:
                sb.load(dest, sb.const(rng.randrange(7)))
                degree[dest] = 0
        else:
            left, dl = operand()
            right, dr = operand()
            op = rng.choice(("add", "mul"))
            if op == "mul" and dl + dr > degree_budget:
                op = "add"
            sb.apply(dest, op, left, right)
            degree[dest] = max(dl, dr) if op == "add" else dl + dr
        written.append(dest)
    return sb.finish(written[-1] if written else 0)


def random_formula(
    rng: random.Random,
    ring: Ring,
    mode: str,
    depth: int,
    num_variables: int = 4,
    max_fanin: int = 3,
    top_op: str = "add",
) -> Formula:
    """An alternating formula of exactly the requested gate depth."""

    def leaf() -> FormulaNode:
        if rng.random() < 0.8:
            return FVar(rng.randrange(1, num_variables + 1))
        return FConst(ring.scalar(rng.randrange(3)))

    def node(op: str, remaining: int) -> FormulaNode:
        if remaining == 0:
            return leaf()
        other = "mul" if op == "add" else "add"
        fanin = rng.randrange(1, max_fanin + 1)
        children = [node(other, remaining - 1)]
        for _ in range(fanin - 1):
            children.append(
                node(other, rng.randrange(remaining)) if remaining > 1 else leaf()
            )
        rng.shuffle(children)
        return FOp(op, children)

    if depth == 0:
        return Formula(ring, mode, num_variables, leaf())
    return Formula(ring, mode, num_variables, node(top_op, depth))


def formula_expand(f: Formula) -> SparsePolynomial:
    """Direct recursive expansion, independent of the circuit pipeline."""

    def walk(node: FormulaNode) -> SparsePolynomial:
        if isinstance(node, FVar):
            return SparsePolynomial.variable(f.ring, f.mode, f.num_variables, node.index)
        if isinstance(node, FConst):
            return SparsePolynomial.constant(f.ring, f.mode, f.num_variables, node.value)
        parts = [walk(child) for child in node.children]
        acc = parts[0]
        for part in parts[1:]:
            acc = acc.add(part) if node.op == "add" else acc.mul(part)
        return acc

    return walk(f.root)


def corrupt_circuit(rng: random.Random, circuit: LayeredCircuit) -> LayeredCircuit:
    """Perturb one gate: flip an op, or bump a constant leaf.

    The result is structurally valid but usually computes a different
    polynomial; callers that need a guaranteed change should compare
    expansions and redraw.
    """
    gates = dict(circuit.gates)
    internal = [
        gid for gid, g in gates.items() if isinstance(g, BinGate)
    ]
    consts = [gid for gid, g in gates.items() if isinstance(g, ConstLeaf)]
    if consts and (not internal or rng.random() < 0.3):
        gid = rng.choice(consts)
        bumped = gates[gid].value + circuit.ring.one()
        gates[gid] = ConstLeaf(bumped)
    else:
        gid = rng.choice(internal)
        g = gates[gid]
        gates[gid] = BinGate("mul" if g.op == "add" else "add", g.left, g.right)
    return LayeredCircuit(
        circuit.name,
        circuit.ring,
        circuit.mode,
        circuit.num_variables,
        circuit.layers,
        gates,
        circuit.output_id,
    )


def planted_root_program(
    rng: random.Random,
    ring: Ring,
    n: int,
    r: int,
    name: str = "planted",
) -> tuple[StraightLineProgram, list[SparsePolynomial], object]:
    """P = prod_j (y - f_j) for r random linear f_j with distinct constants.

    Returns the program (over n+1 variables, y last), the list of f_j as
    polynomials in the x variables, and f_1(0) as the starting scalar.
    """
    constants = rng.sample(range(1, 40), r)
    planted = []
    for j in range(r):
        poly = SparsePolynomial.constant(ring, COMMUTATIVE, n, constants[j])
        for v in range(1, n + 1):
            coeff = rng.randrange(-4, 5)
            if coeff:
                poly = poly.add(
                    SparsePolynomial.variable(ring, COMMUTATIVE, n, v).scale(coeff)
                )
        planted.append(poly)

    y = n + 1
    sb = SlpBuilder(ring, COMMUTATIVE, n + 1, register_count=3, name=name)
    acc, factor, scratch = 0, 1, 2
    sb.load(acc, sb.const(1))
    for poly in planted:
        # factor := y - f_j, accumulated term by term
        sb.load(factor, sb.var(y))
        for mono in poly.monomials():
            coeff = poly.terms[mono]
            if mono.degree == 0:
                sb.apply(factor, "add", sb.reg(factor), sb.const(-coeff))
            else:
                (var,) = mono.variables()
                sb.load(scratch, sb.var(var))
                sb.apply(scratch, "mul", sb.reg(scratch), sb.const(-coeff))
                sb.apply(factor, "add", sb.reg(factor), sb.reg(scratch))
        sb.apply(acc, "mul", sb.reg(acc), sb.reg(factor))
    program = sb.finish(acc)
    return program, planted, planted[0].evaluate([0] * n)
