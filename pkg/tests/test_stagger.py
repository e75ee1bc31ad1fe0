"""Layer multigraphs, edge scheduling, and the staggering transform."""

import random
from fractions import Fraction

from slpforge.circuits import (
    CircuitBuilder,
    circuit_to_slp,
    expand,
    slp_to_circuit,
    validate,
)
from slpforge.polynomials import COMMUTATIVE, MODES, NONCOMMUTATIVE
from slpforge.rings import PrimeField, RationalField
from slpforge.stagger import (
    LayerMultigraph,
    MultiEdge,
    build_layer_multigraph,
    census_bound,
    order_edges,
    staggerize,
)

F = PrimeField(101)


def census_ok(graph: LayerMultigraph) -> bool:
    result = order_edges(graph)
    return all(c <= census_bound(graph) for c in result.census)


def test_single_edge_census():
    g = LayerMultigraph(frozenset({1, 2}), (MultiEdge(1, 2, 10),), ())
    result = order_edges(g)
    assert result.order == (MultiEdge(1, 2, 10),)
    assert max(result.census) == 2


def test_self_loop_census():
    g = LayerMultigraph(frozenset({1}), (MultiEdge(1, 1, 10),), ())
    result = order_edges(g)
    assert result.census == (1, 2)


def test_triangle_census():
    edges = (MultiEdge(1, 2, 10), MultiEdge(2, 3, 11), MultiEdge(1, 3, 12))
    g = LayerMultigraph(frozenset({1, 2, 3}), edges, ())
    result = order_edges(g)
    assert len(result.order) == 3
    assert max(result.census) <= 4  # |E| + 1


def test_parallel_edges_and_loops_schedule():
    edges = (
        MultiEdge(1, 2, 10),
        MultiEdge(1, 2, 11),
        MultiEdge(2, 2, 12),
        MultiEdge(3, 4, 13),
    )
    g = LayerMultigraph(frozenset({1, 2, 3, 4}), edges, ())
    result = order_edges(g)
    assert sorted((e.u, e.v, e.gate) for e in result.order) == [
        (1, 2, 10),
        (1, 2, 11),
        (2, 2, 12),
        (3, 4, 13),
    ]
    assert max(result.census) <= census_bound(g)


def test_multigraph_construction_classifies_operands():
    cb = CircuitBuilder(F, COMMUTATIVE, 2)
    x1, x2 = cb.var_leaf(1), cb.var_leaf(2)
    a = cb.gate(2, "mul", x1, x2)
    b = cb.gate(2, "add", x1, x1)
    both = cb.gate(3, "mul", a, b)  # edge {a, b}
    half = cb.gate(3, "add", a, x1)  # self-loop at a
    const_pair = cb.gate(3, "mul", x1, x2)  # neither operand resident
    cb.set_output(both)
    c = cb.build()

    g = build_layer_multigraph(c, 2)
    assert g.vertices == frozenset({a, b})
    kinds = sorted((e.u, e.v) for e in g.edges)
    assert kinds == [(min(a, b), max(a, b)), (a, a)] or kinds == [
        (a, a),
        (min(a, b), max(a, b)),
    ]
    assert g.constant_gates == (const_pair,)
    # Layer-1 transitions see no resident registers: everything is constant-like.
    g1 = build_layer_multigraph(c, 1)
    assert g1.vertices == frozenset()
    assert len(g1.constant_gates) == 2


def test_multigraph_invariants_on_random_circuits():
    rng = random.Random(7)
    from genutil import random_layered_circuit

    for _ in range(40):
        width = rng.randrange(1, 6)
        mode = rng.choice(MODES)
        c = random_layered_circuit(rng, F, mode, width, internal_layers=rng.randrange(1, 5))
        w = c.width
        for layer_index in range(1, c.layer_count):
            g = build_layer_multigraph(c, layer_index)
            assert len(g.vertices) <= w
            assert len(g.edges) + len(g.constant_gates) <= w
            assert census_ok(g)


def test_staggerize_register_bound_and_equivalence():
    rng = random.Random(11)
    from genutil import random_layered_circuit

    for trial in range(30):
        width = rng.randrange(1, 6)
        mode = rng.choice(MODES)
        c = random_layered_circuit(rng, F, mode, width, internal_layers=rng.randrange(1, 5))
        slp = staggerize(c)
        assert slp.register_count <= c.width + 1, f"trial {trial}"
        assert expand(slp) == expand(c), f"trial {trial}"


def test_staggerize_size_bound():
    rng = random.Random(13)
    from genutil import random_layered_circuit

    for _ in range(20):
        width = rng.randrange(1, 6)
        c = random_layered_circuit(rng, F, COMMUTATIVE, width, internal_layers=3)
        staggered = slp_to_circuit(staggerize(c))
        report = validate(staggered)
        assert report.staggered
        assert report.size <= 4 * c.width * c.size


def test_staggerize_width2_uses_three_registers():
    cb = CircuitBuilder(F, COMMUTATIVE, 4)
    m1 = cb.gate(2, "mul", cb.var_leaf(1), cb.var_leaf(2))
    m2 = cb.gate(2, "mul", cb.var_leaf(3), cb.var_leaf(4))
    out = cb.gate(3, "add", m1, m2)
    cb.set_output(out)
    c = cb.build()
    assert c.width == 2

    slp = staggerize(c)
    assert slp.register_count <= 3
    expected = expand(c)
    assert expand(slp) == expected
    assert {m.text() for m in expected.terms} == {"x1*x2", "x3*x4"}


def test_staggerize_idempotent_on_staggered_circuits():
    cb = CircuitBuilder(F, COMMUTATIVE, 2)
    g1 = cb.gate(2, "mul", cb.var_leaf(1), cb.var_leaf(2))
    g2 = cb.gate(3, "mul", g1, cb.const_leaf(1))
    g3 = cb.gate(4, "add", g2, cb.var_leaf(1))
    cb.set_output(g3)
    c = cb.build()
    assert validate(c).staggered

    slp = staggerize(c)
    assert slp.register_count <= c.width + 1
    assert expand(slp) == expand(c)


def test_staggerize_noncommutative_order_preserved():
    cb = CircuitBuilder(F, NONCOMMUTATIVE, 2)
    a = cb.gate(2, "mul", cb.var_leaf(1), cb.var_leaf(2))
    b = cb.gate(2, "mul", cb.var_leaf(2), cb.var_leaf(1))
    out = cb.gate(3, "mul", a, b)
    cb.set_output(out)
    c = cb.build()

    slp = staggerize(c)
    expansion = expand(slp)
    assert [m.key for m in expansion.monomials()] == [(1, 2, 2, 1)]


def test_staggerize_rational_constants():
    R = RationalField()
    cb = CircuitBuilder(R, COMMUTATIVE, 1)
    half = cb.const_leaf(Fraction(1, 2))
    g = cb.gate(2, "mul", cb.var_leaf(1), half)
    cb.set_output(g)
    c = cb.build()
    slp = staggerize(c)
    assert expand(slp) == expand(c)


def test_roundtrip_through_circuit_to_slp():
    rng = random.Random(17)
    from genutil import random_layered_circuit

    for _ in range(10):
        c = random_layered_circuit(rng, F, COMMUTATIVE, rng.randrange(1, 5))
        staggered = slp_to_circuit(staggerize(c))
        back = circuit_to_slp(staggered)
        assert expand(back) == expand(c)
