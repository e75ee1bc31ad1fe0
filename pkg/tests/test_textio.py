"""Text format parsing and serialization."""

import pytest

from slpforge.circuits import (
    AlgebraicBranchingProgram,
    LayeredCircuit,
    evaluate,
    expand,
    validate,
)
from slpforge.errors import (
    CircuitSemanticError,
    CircuitSyntaxError,
    DanglingOutput,
)
from slpforge.polynomials import (
    COMMUTATIVE,
    NONCOMMUTATIVE,
    Monomial,
    SparsePolynomial,
)
from slpforge.rings import PrimeField, RATIONALS
from slpforge.textio import (
    parse_circuit,
    parse_polynomial,
    serialize_circuit,
    serialize_polynomial,
)

SAMPLE = """\
circuit demo
ring prime 101
mode commutative
vars 4
gate 1 1 var 1
gate 2 1 var 2
gate 3 1 var 3
gate 4 1 var 4
gate 5 2 mul 1 2
gate 6 2 mul 3 4
gate 7 3 add 5 6
output 7
"""


def test_parse_sample_circuit():
    c = parse_circuit(SAMPLE)
    assert isinstance(c, LayeredCircuit)
    assert c.name == "demo"
    assert c.ring == PrimeField(101)
    report = validate(c)
    assert report.width == 2
    assert evaluate(c, [1, 2, 3, 4]).value == 14


def test_serialize_parse_roundtrip_is_identity():
    c = parse_circuit(SAMPLE)
    text = serialize_circuit(c)
    again = parse_circuit(text)
    assert serialize_circuit(again) == text
    assert expand(again) == expand(c)
    assert again.output_id == c.output_id
    assert again.layers == c.layers


def test_comments_and_blank_lines_ignored():
    text = "# header comment\n\n" + SAMPLE
    assert expand(parse_circuit(text)) == expand(parse_circuit(SAMPLE))


def test_rational_ring_and_fraction_constants():
    text = (
        "circuit frac\n"
        "ring rational\n"
        "mode commutative\n"
        "vars 1\n"
        "gate 1 1 var 1\n"
        "gate 2 1 const 3/4\n"
        "gate 3 2 mul 1 2\n"
        "output 3\n"
    )
    c = parse_circuit(text)
    assert c.ring == RATIONALS
    value = evaluate(c, [RATIONALS.scalar(4)])
    assert value == RATIONALS.scalar(3)
    assert "const 3/4" in serialize_circuit(c)


def test_undefined_reference_is_semantic_error():
    text = SAMPLE.replace("gate 7 3 add 5 6", "gate 7 3 add 5 9")
    with pytest.raises(CircuitSemanticError):
        parse_circuit(text)


def test_duplicate_gate_id_is_semantic_error():
    text = SAMPLE.replace("gate 6 2 mul 3 4", "gate 5 2 mul 3 4")
    with pytest.raises(CircuitSemanticError):
        parse_circuit(text)


def test_undefined_output_raises_dangling_output():
    text = SAMPLE.replace("output 7", "output 12")
    with pytest.raises(DanglingOutput):
        parse_circuit(text)


def test_syntax_errors_carry_line_numbers():
    bad_mode = SAMPLE.replace("mode commutative", "mode sideways")
    with pytest.raises(CircuitSyntaxError) as err:
        parse_circuit(bad_mode)
    assert err.value.line == 3

    bad_gate = SAMPLE.replace("gate 5 2 mul 1 2", "gate 5 2 mul 1")
    with pytest.raises(CircuitSyntaxError) as err:
        parse_circuit(bad_gate)
    assert err.value.line == 9


def test_leaf_grammar_enforced():
    text = SAMPLE.replace("gate 1 1 var 1", "gate 1 2 var 1")
    with pytest.raises(CircuitSyntaxError):
        parse_circuit(text)


ABP_SAMPLE = """\
abp walk
ring prime 101
vars 3
vertex 1 0
vertex 2 1
vertex 3 1
vertex 4 2
edge 1 2 0 1:1
edge 1 3 2
edge 2 4 0 2:1
edge 3 4 0 3:5
source 1
sink 4
"""


def test_parse_abp_and_roundtrip():
    abp = parse_circuit(ABP_SAMPLE)
    assert isinstance(abp, AlgebraicBranchingProgram)
    assert abp.size == 4
    # x1*x2 + 2*5*x3 at (3, 4, 1) = 12 + 10.
    assert evaluate(abp, [3, 4, 1]).value == 22
    text = serialize_circuit(abp)
    assert serialize_circuit(parse_circuit(text)) == text


def test_abp_layer_contiguity_required():
    text = ABP_SAMPLE.replace("vertex 4 2", "vertex 4 3")
    with pytest.raises(CircuitSemanticError):
        parse_circuit(text)


def test_abp_undefined_vertex_in_edge():
    text = ABP_SAMPLE.replace("edge 3 4 0 3:5", "edge 3 9 0 3:5")
    with pytest.raises(CircuitSemanticError):
        parse_circuit(text)


def test_polynomial_serialization_is_canonical():
    c = parse_circuit(SAMPLE)
    text = serialize_polynomial(expand(c), name="prodsum")
    lines = text.splitlines()
    assert lines[0] == "polynomial prodsum"
    assert lines[4:] == ["term 1 x1*x2", "term 1 x3*x4"]


def test_polynomial_roundtrip_commutative():
    poly = SparsePolynomial(
        RATIONALS,
        COMMUTATIVE,
        3,
        {
            Monomial.from_exponents({1: 2, 3: 1}): RATIONALS.parse("-5/2"),
            Monomial.unit(COMMUTATIVE): RATIONALS.scalar(7),
        },
    )
    text = serialize_polynomial(poly, name="mixed")
    name, again = parse_polynomial(text)
    assert name == "mixed"
    assert again == poly
    assert serialize_polynomial(again, name=name) == text


def test_polynomial_roundtrip_noncommutative():
    poly = SparsePolynomial(
        PrimeField(101),
        NONCOMMUTATIVE,
        2,
        {
            Monomial.word([1, 2, 1]): PrimeField(101).scalar(3),
            Monomial.word([2, 2]): PrimeField(101).scalar(1),
        },
    )
    text = serialize_polynomial(poly, name="words")
    name, again = parse_polynomial(text)
    assert again == poly
    assert serialize_polynomial(again, name=name) == text


def test_polynomial_parse_errors():
    good = (
        "polynomial p\n"
        "ring rational\n"
        "mode commutative\n"
        "vars 2\n"
        "term 3 x1*x2\n"
    )
    name, poly = parse_polynomial(good)
    assert len(poly.terms) == 1

    with pytest.raises(CircuitSyntaxError):
        parse_polynomial(good.replace("term 3 x1*x2", "term 3 y1*x2"))
    with pytest.raises(CircuitSyntaxError):
        parse_polynomial(good.replace("term 3 x1*x2", "term 3 x1^0"))
    with pytest.raises(CircuitSyntaxError):
        parse_polynomial(good.replace("term 3 x1*x2", "blob 3 x1*x2"))
    with pytest.raises(CircuitSemanticError):
        parse_polynomial(good.replace("vars 2", "vars 1"))
    with pytest.raises(CircuitSemanticError):
        parse_polynomial(good + "term 4 x1*x2\n")


def test_polynomial_zero_coefficients_dropped():
    text = (
        "polynomial p\n"
        "ring prime 7\n"
        "mode commutative\n"
        "vars 1\n"
        "term 7 x1\n"
    )
    _, poly = parse_polynomial(text)
    assert poly.terms == {}
