"""Identity testers, design construction, and the permanent verifier."""

import math
import random

import pytest

from genutil import corrupt_circuit
from slpforge.circuits import (
    CircuitBuilder,
    expand,
    slp_to_circuit,
    validate,
)
from slpforge.errors import (
    FieldTooSmall,
    GridTooLarge,
    ModeMismatch,
    ParamError,
)
from slpforge.families import build_permanent_sparse, permanent_var_index
from slpforge.pit import (
    HARD_FAMILIES,
    nw_design,
    nw_pit,
    perm_check_instance,
    schwartz_zippel,
    verify_permanent_circuit,
)
from slpforge.polynomials import COMMUTATIVE, NONCOMMUTATIVE
from slpforge.rings import RATIONALS, PrimeField
from slpforge.transforms import sparse_to_width2

BIG = PrimeField((1 << 61) - 1)


def _zero_circuit(ring=RATIONALS):
    # x1 + (-1)*x1, zero by cancellation
    cb = CircuitBuilder(ring, COMMUTATIVE, 2)
    x1 = cb.var_leaf(1)
    neg = cb.gate(2, "mul", x1, cb.const_leaf(-1))
    cb.set_output(cb.gate(3, "add", x1, neg))
    return cb.build()


def _product_circuit(ring=BIG):
    cb = CircuitBuilder(ring, COMMUTATIVE, 2)
    cb.set_output(cb.gate(2, "mul", cb.var_leaf(1), cb.var_leaf(2)))
    return cb.build()


# ---------------------------------------------------------------------------
# Randomized tester

def test_sz_zero_circuit_always_zero():
    verdict = schwartz_zippel(_zero_circuit(), trials=50, seed=1)
    assert verdict.is_zero
    assert verdict.witness is None


def test_sz_nonzero_eventually_with_witness():
    c = _product_circuit()
    verdict = schwartz_zippel(c, trials=20, seed=7)
    assert verdict.status == "nonzero"
    x, y = verdict.witness
    assert not (x * y).is_zero


def test_sz_deterministic_per_seed():
    c = _product_circuit()
    a = schwartz_zippel(c, trials=5, seed=123)
    b = schwartz_zippel(c, trials=5, seed=123)
    assert a == b


def test_sz_parameter_errors():
    with pytest.raises(ParamError):
        schwartz_zippel(_product_circuit(), trials=0)
    cb = CircuitBuilder(RATIONALS, NONCOMMUTATIVE, 2)
    cb.set_output(cb.gate(2, "mul", cb.var_leaf(1), cb.var_leaf(2)))
    with pytest.raises(ModeMismatch):
        schwartz_zippel(cb.build(), trials=1)
    with pytest.raises(FieldTooSmall):
        schwartz_zippel(_product_circuit(PrimeField(3)), trials=1, degree_bound=5)


# ---------------------------------------------------------------------------
# Designs

def test_design_single_set():
    d = nw_design(1, 3)
    assert len(d.sets) == 1
    assert len(d.sets[0]) == 3


def test_design_four_sets_over_f2():
    d = nw_design(4, 2)
    assert (d.q, d.degree_bound) == (2, 2)
    assert [sorted(s) for s in d.sets] == [[0, 2], [1, 3], [0, 3], [1, 2]]


def test_design_nine_sets_over_f3():
    d = nw_design(9, 3)
    assert (d.q, d.degree_bound) == (3, 2)
    for i in range(9):
        for j in range(i + 1, 9):
            assert len(d.sets[i] & d.sets[j]) <= 1


def test_design_restricts_to_m_points():
    d = nw_design(3, 4)  # q = 5 > m, graphs restricted to first 4 points
    assert d.q == 5
    assert all(len(s) == 4 for s in d.sets)
    assert all(max(s) < d.universe_size for s in d.sets)


def test_design_invariants_small_sweep():
    for n in range(1, 21):
        for m in range(1, 6):
            d = nw_design(n, m)
            assert all(len(s) == m for s in d.sets)
            assert len(d.sets) == n
            log_bound = math.ceil(math.log2(n)) if n > 1 else 0
            assert d.degree_bound - 1 <= max(log_bound, 0) or n == 1
            for i in range(n):
                for j in range(i + 1, n):
                    assert len(d.sets[i] & d.sets[j]) <= d.degree_bound - 1


# ---------------------------------------------------------------------------
# Hard families and the grid tester

def test_hard_families_are_deterministic_full_support():
    for fam in HARD_FAMILIES.values():
        poly = fam.polynomial(3, BIG)
        again = fam.polynomial(3, BIG)
        assert poly == again
        assert len(poly.terms) == 8
        assert all(c.value in (1, 2) for c in poly.terms.values())


def test_parity_rule_values():
    fam = HARD_FAMILIES["parity-rule"]
    assert fam.coefficient_rule(3, frozenset()) == 1
    assert fam.coefficient_rule(3, frozenset((0,))) == 2
    assert fam.coefficient_rule(3, frozenset((0, 2))) == 1


def test_hard_family_evaluate_matches_expansion():
    rng = random.Random(40)
    ring = PrimeField(1009)
    for fam in HARD_FAMILIES.values():
        for m in (1, 2, 4):
            poly = fam.polynomial(m, ring)
            for _ in range(4):
                point = [ring.scalar(rng.randrange(1009)) for _ in range(m)]
                assert fam.evaluate(m, ring, point) == poly.evaluate(point)


def test_nw_pit_completeness_both_families():
    zc = _zero_circuit()
    for fam in HARD_FAMILIES.values():
        assert nw_pit(zc, fam, 2).is_zero


def test_nw_pit_commutative_cancellation():
    cb = CircuitBuilder(RATIONALS, COMMUTATIVE, 2)
    x1, x2 = cb.var_leaf(1), cb.var_leaf(2)
    ab = cb.gate(2, "mul", x1, x2)
    ba = cb.gate(2, "mul", x2, x1)
    neg = cb.gate(3, "mul", ba, cb.const_leaf(-1))
    cb.set_output(cb.gate(4, "add", cb.copy(3, ab), neg))
    c = cb.build()
    assert expand(c).is_zero
    assert nw_pit(c, HARD_FAMILIES["desk-rule"], 2).is_zero


def test_nw_pit_single_variable_nonzero():
    cb = CircuitBuilder(BIG, COMMUTATIVE, 1)
    cb.set_output(cb.var_leaf(1))
    verdict = nw_pit(cb.build(), HARD_FAMILIES["desk-rule"], 2)
    assert verdict.status == "nonzero"


def test_nw_pit_grid_budget():
    with pytest.raises(GridTooLarge):
        nw_pit(_zero_circuit(), HARD_FAMILIES["desk-rule"], 2, grid_budget=10)


def test_nw_pit_mode_mismatch():
    cb = CircuitBuilder(RATIONALS, NONCOMMUTATIVE, 1)
    cb.set_output(cb.gate(2, "mul", cb.var_leaf(1), cb.var_leaf(1)))
    with pytest.raises(ModeMismatch):
        nw_pit(cb.build(), HARD_FAMILIES["desk-rule"], 2)


# ---------------------------------------------------------------------------
# Permanent verification

def _perm_candidate(n: int):
    return slp_to_circuit(sparse_to_width2(build_permanent_sparse(n)))


def test_perm_accepts_trivial_candidate():
    cb = CircuitBuilder(RATIONALS, COMMUTATIVE, 1)
    cb.set_output(cb.var_leaf(1))
    assert verify_permanent_circuit(cb.build(), seed=5).accepted


def test_perm_accepts_correct_candidates():
    for n in (2, 3):
        verdict = verify_permanent_circuit(_perm_candidate(n), seed=11)
        assert verdict.accepted, n


def test_perm_accepts_with_grid_backend():
    verdict = verify_permanent_circuit(_perm_candidate(2), backend="nw_pit")
    assert verdict.accepted


def test_perm_identities_expand_to_zero_and_stay_narrow():
    cand = _perm_candidate(3)
    w = validate(cand).width
    instance = perm_check_instance(cand)
    assert instance.n == 3
    for identity in instance.identities:
        assert expand(identity).is_zero
        assert validate(identity).width <= w + 2


def test_perm_rejects_corruptions():
    rng = random.Random(77)
    cand = _perm_candidate(2)
    truth = expand(cand)
    rejected = 0
    for _ in range(10):
        bad = corrupt_circuit(rng, cand)
        if expand(bad) == truth:
            continue
        verdict = verify_permanent_circuit(bad, seed=rng.randrange(1 << 30))
        assert verdict.status == "reject"
        assert verdict.failing_index is not None
        rejected += 1
    assert rejected >= 5


def test_perm_rejects_wrong_polynomial_with_witness():
    # candidate computes x11*x22 only, missing the second permanent term
    cb = CircuitBuilder(RATIONALS, COMMUTATIVE, 4)
    cb.set_output(
        cb.gate(2, "mul", cb.var_leaf(permanent_var_index(2, 1, 1)),
                cb.var_leaf(permanent_var_index(2, 2, 2)))
    )
    verdict = verify_permanent_circuit(cb.build(), seed=3)
    assert verdict.status == "reject"
    assert verdict.witness is not None


def test_perm_requires_square_grid():
    cb = CircuitBuilder(RATIONALS, COMMUTATIVE, 3)
    cb.set_output(cb.var_leaf(1))
    with pytest.raises(ParamError):
        verify_permanent_circuit(cb.build())
    with pytest.raises(ParamError):
        verify_permanent_circuit(_perm_candidate(2), backend="montecarlo")
