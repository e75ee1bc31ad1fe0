"""Newton series roots and the circuit assembly that replays them."""

import random
from fractions import Fraction

import pytest

from genutil import planted_root_program
from slpforge.circuits import SlpBuilder, expand
from slpforge.errors import (
    CharacteristicTooSmall,
    DegenerateRoot,
    DegreeBoundViolated,
    ParamError,
    SizeBudgetExceeded,
    UnsolvableSystem,
)
from slpforge.polynomials import COMMUTATIVE, Monomial, SparsePolynomial
from slpforge.rings import DEFAULT_PRIME, PrimeField, RATIONALS
from slpforge.rootfind import (
    RootProblem,
    _solve_exact,
    newton_series_root,
    root_circuit,
)

BIG = PrimeField(DEFAULT_PRIME)


def mono(**exps):
    return Monomial.from_exponents({int(k[1:]): v for k, v in exps.items()})


def _program_y_minus_x1_plus_x1x2():
    """P = y - (x1 + x1*x2) over (x1, x2, y)."""
    sb = SlpBuilder(BIG, COMMUTATIVE, 3, register_count=2, name="lin")
    sb.load(0, sb.var(3))
    sb.load(1, sb.var(1))
    sb.apply(1, "mul", sb.reg(1), sb.var(2))
    sb.apply(1, "add", sb.reg(1), sb.var(1))
    sb.apply(1, "mul", sb.reg(1), sb.const(-1))
    sb.apply(0, "add", sb.reg(0), sb.reg(1))
    return sb.finish(0)


def _program_y2_minus_1_plus_x1(ring):
    """P = y^2 - (1 + x1) over (x1, y)."""
    sb = SlpBuilder(ring, COMMUTATIVE, 2, register_count=2, name="sqrt")
    sb.load(0, sb.var(2))
    sb.apply(0, "mul", sb.reg(0), sb.var(2))
    sb.apply(0, "add", sb.reg(0), sb.const(-1))
    sb.load(1, sb.var(1))
    sb.apply(1, "mul", sb.reg(1), sb.const(-1))
    sb.apply(0, "add", sb.reg(0), sb.reg(1))
    return sb.finish(0)


def test_newton_explicit_linear_root():
    rp = RootProblem(_program_y_minus_x1_plus_x1x2(), r=1, m=2, y0=0)
    f = newton_series_root(rp)
    assert f == SparsePolynomial(
        BIG, COMMUTATIVE, 2, {mono(x1=1): 1, mono(x1=1, x2=1): 1}
    )


def test_newton_square_root_series():
    rp = RootProblem(_program_y2_minus_1_plus_x1(BIG), r=2, m=2, y0=1)
    f = newton_series_root(rp)
    expected = SparsePolynomial(
        BIG,
        COMMUTATIVE,
        1,
        {
            Monomial.unit(COMMUTATIVE): 1,
            mono(x1=1): Fraction(1, 2),
            mono(x1=2): Fraction(-1, 8),
        },
    )
    assert f == expected
    # Separately confirm f really squares back to 1 + x1 through degree 2.
    square = f.mul(f).truncate(2)
    assert square == SparsePolynomial(
        BIG, COMMUTATIVE, 1, {Monomial.unit(COMMUTATIVE): 1, mono(x1=1): 1}
    )


def test_newton_over_rationals():
    rp = RootProblem(_program_y2_minus_1_plus_x1(RATIONALS), r=2, m=3, y0=1)
    f = newton_series_root(rp)
    assert f.coefficient(mono(x1=3)) == RATIONALS.scalar(Fraction(1, 16))


def test_degenerate_root_rejected():
    sb = SlpBuilder(BIG, COMMUTATIVE, 1, register_count=1, name="ysq")
    sb.load(0, sb.var(1))
    sb.apply(0, "mul", sb.reg(0), sb.var(1))
    with pytest.raises(DegenerateRoot):
        RootProblem(sb.finish(0), r=2, m=2, y0=0)


def test_not_a_root_rejected():
    sb = SlpBuilder(BIG, COMMUTATIVE, 1, register_count=1, name="y1")
    sb.load(0, sb.var(1))
    with pytest.raises(ParamError):
        RootProblem(sb.finish(0), r=1, m=1, y0=5)


def test_degree_bound_enforced():
    sb = SlpBuilder(BIG, COMMUTATIVE, 1, register_count=1, name="ycubed")
    sb.load(0, sb.var(1))
    sb.apply(0, "mul", sb.reg(0), sb.var(1))
    sb.apply(0, "mul", sb.reg(0), sb.var(1))
    with pytest.raises(DegreeBoundViolated):
        RootProblem(sb.finish(0), r=2, m=1, y0=0)


def test_newton_characteristic_guard():
    tiny = PrimeField(3)
    sb = SlpBuilder(tiny, COMMUTATIVE, 2, register_count=1, name="small")
    sb.load(0, sb.var(2))
    rp = RootProblem(sb.finish(0), r=1, m=4, y0=0)
    with pytest.raises(CharacteristicTooSmall):
        newton_series_root(rp)


def test_index_set_shape():
    rp = RootProblem(_program_y2_minus_1_plus_x1(BIG), r=2, m=2, y0=1)
    alphas = rp.index_set()
    assert len(alphas) == 10  # compositions of <= 2 into 3 slots
    assert len(alphas) <= rp.index_bound == 16
    assert all(sum(a) <= 2 for a in alphas)


def test_root_circuit_trivial_linear():
    sb = SlpBuilder(BIG, COMMUTATIVE, 2, register_count=1, name="ymx")
    sb.load(0, sb.var(2))
    sb.apply(0, "add", sb.reg(0), sb.var(1))
    sb.apply(0, "add", sb.reg(0), sb.var(1))  # y + 2*x1; root f = -2*x1
    program = sb.finish(0)
    rp = RootProblem(program, r=1, m=1, y0=0)
    slp = root_circuit(rp)
    assert slp.register_count <= program.register_count + 6
    assert expand(slp) == newton_series_root(rp)


def test_root_circuit_square_root():
    rp = RootProblem(_program_y2_minus_1_plus_x1(BIG), r=2, m=3, y0=1)
    slp = root_circuit(rp)
    assert slp.register_count <= rp.program.register_count + 6
    assert expand(slp) == newton_series_root(rp)


def test_root_circuit_planted_products():
    rng = random.Random(53)
    for _ in range(6):
        n = rng.randrange(1, 4)
        r = rng.choice((2, 3))
        m = rng.randrange(1, 5)
        program, planted, y0 = planted_root_program(rng, BIG, n, r)
        rp = RootProblem(program, r=r, m=m, y0=y0)
        f = newton_series_root(rp)
        assert f == planted[0].truncate(m)
        slp = root_circuit(rp)
        assert slp.register_count <= program.register_count + 6
        assert expand(slp) == f


def test_root_circuit_budget_trips():
    rp = RootProblem(_program_y2_minus_1_plus_x1(BIG), r=2, m=2, y0=1)
    with pytest.raises(SizeBudgetExceeded):
        root_circuit(rp, size_budget=3)


def test_solver_inconsistent_system():
    one = BIG.one()
    zero = BIG.zero()
    with pytest.raises(UnsolvableSystem):
        _solve_exact(BIG, [[one], [one]], [zero, one])


def test_solver_prefers_zero_free_variables():
    one = BIG.one()
    zero = BIG.zero()
    solution = _solve_exact(BIG, [[one, one]], [one])
    assert solution[0] == one
    assert solution[1] == zero
