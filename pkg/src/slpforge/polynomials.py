"""Sparse exact polynomials, commutative or noncommutative.

A Monomial is either a sorted exponent map (commutative) or a word of
variable indices (noncommutative).  Variable indices are 1-based
throughout, matching the x1..xn naming of the file format.

SparsePolynomial stores a map from monomials to nonzero scalars.  All
arithmetic is exact and mode-checked; products of noncommutative
polynomials concatenate words left-to-right.  Operations optionally take
ExpansionCaps and fail loudly, never truncating, when an intermediate
result would exceed them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityMismatch,
    DegreeCapExceeded,
    ModeMismatch,
    ParamError,
    RingMismatch,
    TermCapExceeded,
)
from .rings import Ring, Scalar, ScalarLike

COMMUTATIVE = "commutative"
NONCOMMUTATIVE = "noncommutative"
MODES = (COMMUTATIVE, NONCOMMUTATIVE)


@dataclass(frozen=True)
class ExpansionCaps:
    """Hard limits on symbolic expansion.  Exceeding either raises."""

    max_degree: int = 64
    max_terms: int = 1 << 20


DEFAULT_CAPS = ExpansionCaps()


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ParamError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


class Monomial:
    """A single power product.

    Commutative key: tuple of (variable, exponent) pairs, variables
    ascending, exponents positive.  Noncommutative key: tuple of variable
    indices in order of multiplication.  The empty key is the unit.
    """

    __slots__ = ("mode", "key")

    def __init__(self, mode: str, key: tuple):
        object.__setattr__(self, "mode", _check_mode(mode))
        object.__setattr__(self, "key", key)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @classmethod
    def unit(cls, mode: str) -> "Monomial":
        return cls(mode, ())

    @classmethod
    def variable(cls, mode: str, index: int) -> "Monomial":
        if index < 1:
            raise ParamError(f"variable index must be >= 1, got {index}")
        if mode == COMMUTATIVE:
            return cls(mode, ((index, 1),))
        return cls(mode, (index,))

    @classmethod
    def from_exponents(cls, exponents: Mapping[int, int]) -> "Monomial":
        items = []
        for var, exp in sorted(exponents.items()):
            if var < 1:
                raise ParamError(f"variable index must be >= 1, got {var}")
            if exp < 0:
                raise ParamError(f"negative exponent {exp} on x{var}")
            if exp:
                items.append((var, exp))
        return cls(COMMUTATIVE, tuple(items))

    @classmethod
    def word(cls, indices: Iterable[int]) -> "Monomial":
        w = tuple(indices)
        if any(i < 1 for i in w):
            raise ParamError("variable indices must be >= 1")
        return cls(NONCOMMUTATIVE, w)

    @property
    def degree(self) -> int:
        if self.mode == COMMUTATIVE:
            return sum(e for _, e in self.key)
        return len(self.key)

    def variables(self) -> frozenset[int]:
        if self.mode == COMMUTATIVE:
            return frozenset(v for v, _ in self.key)
        return frozenset(self.key)

    def max_variable(self) -> int:
        vs = self.variables()
        return max(vs) if vs else 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        if other.mode != self.mode:
            raise ModeMismatch("cannot multiply monomials of different modes")
        if self.mode == NONCOMMUTATIVE:
            return Monomial(self.mode, self.key + other.key)
        merged = dict(self.key)
        for var, exp in other.key:
            merged[var] = merged.get(var, 0) + exp
        return Monomial.from_exponents(merged)

    def evaluate(self, assignment: Sequence[Scalar], ring: Ring) -> Scalar:
        acc = ring.one()
        if self.mode == COMMUTATIVE:
            for var, exp in self.key:
                acc = acc * assignment[var - 1] ** exp
        else:
            for var in self.key:
                acc = acc * assignment[var - 1]
        return acc

    def sort_key(self) -> tuple:
        return (self.degree, self.key)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Monomial)
            and other.mode == self.mode
            and other.key == self.key
        )

    def __hash__(self) -> int:
        return hash((self.mode, self.key))

    def text(self) -> str:
        if not self.key:
            return "1"
        if self.mode == COMMUTATIVE:
            parts = [f"x{v}" if e == 1 else f"x{v}^{e}" for v, e in self.key]
        else:
            parts = [f"x{v}" for v in self.key]
        return "*".join(parts)

    def __repr__(self) -> str:
        return f"Monomial({self.mode!r}, {self.text()})"


def _cap_degree(mono: Monomial, caps: ExpansionCaps | None) -> Monomial:
    if caps is not None and mono.degree > caps.max_degree:
        raise DegreeCapExceeded(
            f"monomial degree {mono.degree} exceeds cap {caps.max_degree}"
        )
    return mono


class SparsePolynomial:
    """A finite map monomial -> nonzero scalar over a fixed ring and mode."""

    __slots__ = ("ring", "mode", "num_variables", "terms")

    def __init__(
        self,
        ring: Ring,
        mode: str,
        num_variables: int,
        terms: Mapping[Monomial, ScalarLike] | None = None,
    ):
        _check_mode(mode)
        if num_variables < 0:
            raise ParamError(f"num_variables must be >= 0, got {num_variables}")
        clean: dict[Monomial, Scalar] = {}
        for mono, coeff in (terms or {}).items():
            if mono.mode != mode:
                raise ModeMismatch(
                    f"{mono!r} in a {mode} polynomial"
                )
            if mono.max_variable() > num_variables:
                raise ParamError(
                    f"{mono.text()} uses a variable beyond x{num_variables}"
                )
            c = ring.scalar(coeff)
            if not c.is_zero:
                clean[mono] = c
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "num_variables", num_variables)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("SparsePolynomial is immutable")

    @classmethod
    def zero(cls, ring: Ring, mode: str, num_variables: int) -> "SparsePolynomial":
        return cls(ring, mode, num_variables)

    @classmethod
    def constant(
        cls, ring: Ring, mode: str, num_variables: int, value: ScalarLike
    ) -> "SparsePolynomial":
        return cls(ring, mode, num_variables, {Monomial.unit(mode): value})

    @classmethod
    def variable(
        cls, ring: Ring, mode: str, num_variables: int, index: int
    ) -> "SparsePolynomial":
        if not 1 <= index <= num_variables:
            raise ParamError(f"variable x{index} outside 1..{num_variables}")
        return cls(ring, mode, num_variables, {Monomial.variable(mode, index): 1})

    def _check_compatible(self, other: "SparsePolynomial") -> None:
        if other.ring != self.ring:
            raise RingMismatch("polynomials over different rings")
        if other.mode != self.mode:
            raise ModeMismatch("polynomials of different modes")
        if other.num_variables != self.num_variables:
            raise ParamError(
                f"variable counts differ: {self.num_variables} vs {other.num_variables}"
            )

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree; 0 for the zero polynomial."""
        return max((m.degree for m in self.terms), default=0)

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.terms.get(mono, self.ring.zero())

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=Monomial.sort_key)

    def add(
        self, other: "SparsePolynomial", caps: ExpansionCaps | None = None
    ) -> "SparsePolynomial":
        self._check_compatible(other)
        merged = dict(self.terms)
        for mono, coeff in other.terms.items():
            acc = merged.get(mono)
            total = coeff if acc is None else acc + coeff
            if total.is_zero:
                merged.pop(mono, None)
            else:
                merged[mono] = total
        if caps is not None and len(merged) > caps.max_terms:
            raise TermCapExceeded(
                f"{len(merged)} terms exceeds cap {caps.max_terms}"
            )
        return SparsePolynomial(self.ring, self.mode, self.num_variables, merged)

    def neg(self) -> "SparsePolynomial":
        return SparsePolynomial(
            self.ring,
            self.mode,
            self.num_variables,
            {m: -c for m, c in self.terms.items()},
        )

    def sub(self, other: "SparsePolynomial") -> "SparsePolynomial":
        return self.add(other.neg())

    def scale(self, factor: ScalarLike) -> "SparsePolynomial":
        f = self.ring.scalar(factor)
        return SparsePolynomial(
            self.ring,
            self.mode,
            self.num_variables,
            {m: c * f for m, c in self.terms.items()},
        )

    def mul(
        self, other: "SparsePolynomial", caps: ExpansionCaps | None = None
    ) -> "SparsePolynomial":
        self._check_compatible(other)
        acc: dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _cap_degree(m1 * m2, caps)
                coeff = c1 * c2
                prev = acc.get(mono)
                total = coeff if prev is None else prev + coeff
                if total.is_zero:
                    acc.pop(mono, None)
                else:
                    acc[mono] = total
            if caps is not None and len(acc) > caps.max_terms:
                raise TermCapExceeded(
                    f"{len(acc)} terms exceeds cap {caps.max_terms}"
                )
        return SparsePolynomial(self.ring, self.mode, self.num_variables, acc)

    def evaluate(self, assignment: Sequence[ScalarLike]) -> Scalar:
        """Evaluate at assignment[i-1] for variable xi."""
        if len(assignment) != self.num_variables:
            raise ArityMismatch(
                f"expected {self.num_variables} scalars, got {len(assignment)}"
            )
        point = [self.ring.scalar(v) for v in assignment]
        acc = self.ring.zero()
        for mono, coeff in self.terms.items():
            acc = acc + coeff * mono.evaluate(point, self.ring)
        return acc

    def homogeneous_part(self, d: int) -> "SparsePolynomial":
        return SparsePolynomial(
            self.ring,
            self.mode,
            self.num_variables,
            {m: c for m, c in self.terms.items() if m.degree == d},
        )

    def is_homogeneous(self) -> bool:
        degrees = {m.degree for m in self.terms}
        return len(degrees) <= 1

    def truncate(self, max_degree: int) -> "SparsePolynomial":
        """Drop every term of degree above max_degree."""
        return SparsePolynomial(
            self.ring,
            self.mode,
            self.num_variables,
            {m: c for m, c in self.terms.items() if m.degree <= max_degree},
        )

    def coefficients_in(self, var: int) -> dict[int, "SparsePolynomial"]:
        """Split a commutative polynomial by the exponent of one variable.

        Returns {e: P_e} with self = sum_e P_e * var**e; each P_e keeps the
        same variable count but never mentions var.
        """
        if self.mode != COMMUTATIVE:
            raise ModeMismatch("coefficient split needs a commutative polynomial")
        buckets: dict[int, dict[Monomial, Scalar]] = {}
        for mono, coeff in self.terms.items():
            exps = dict(mono.key)
            e = exps.pop(var, 0)
            rest = Monomial.from_exponents(exps)
            buckets.setdefault(e, {})[rest] = coeff
        return {
            e: SparsePolynomial(self.ring, self.mode, self.num_variables, t)
            for e, t in buckets.items()
        }

    def substitute_scalar(self, var: int, value: ScalarLike) -> "SparsePolynomial":
        """Replace one variable by a ring constant."""
        val = self.ring.scalar(value)
        acc: dict[Monomial, Scalar] = {}
        for mono, coeff in self.terms.items():
            if self.mode == COMMUTATIVE:
                exps = dict(mono.key)
                e = exps.pop(var, 0)
                new_mono = Monomial.from_exponents(exps)
                new_coeff = coeff * val**e
            else:
                kept = []
                new_coeff = coeff
                for idx in mono.key:
                    if idx == var:
                        new_coeff = new_coeff * val
                    else:
                        kept.append(idx)
                new_mono = Monomial.word(kept)
            if new_coeff.is_zero:
                continue
            prev = acc.get(new_mono)
            total = new_coeff if prev is None else prev + new_coeff
            if total.is_zero:
                acc.pop(new_mono, None)
            else:
                acc[new_mono] = total
        return SparsePolynomial(self.ring, self.mode, self.num_variables, acc)

    def formal_derivative(self, var: int, order: int = 1) -> "SparsePolynomial":
        """Iterated formal partial derivative with respect to one variable."""
        if self.mode != COMMUTATIVE:
            raise ModeMismatch("formal derivative needs a commutative polynomial")
        if order < 0:
            raise ParamError(f"derivative order must be >= 0, got {order}")
        poly = self
        for _ in range(order):
            acc: dict[Monomial, Scalar] = {}
            for mono, coeff in poly.terms.items():
                exps = dict(mono.key)
                e = exps.get(var, 0)
                if e == 0:
                    continue
                if e == 1:
                    exps.pop(var)
                else:
                    exps[var] = e - 1
                new_mono = Monomial.from_exponents(exps)
                new_coeff = coeff * e
                if new_coeff.is_zero:
                    continue
                prev = acc.get(new_mono)
                total = new_coeff if prev is None else prev + new_coeff
                if total.is_zero:
                    acc.pop(new_mono, None)
                else:
                    acc[new_mono] = total
            poly = SparsePolynomial(self.ring, self.mode, self.num_variables, acc)
        return poly

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return (
            other.ring == self.ring
            and other.mode == self.mode
            and other.terms == self.terms
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.mode, frozenset(self.terms.items())))

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in self.monomials():
            coeff = self.terms[mono]
            if not mono.key:
                parts.append(coeff.text())
            elif coeff == self.ring.one():
                parts.append(mono.text())
            else:
                parts.append(f"{coeff.text()}*{mono.text()}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        body = self.text()
        if len(body) > 120:
            body = f"{self.term_count} terms, degree {self.degree()}"
        return f"SparsePolynomial({self.mode!r}, {body})"
