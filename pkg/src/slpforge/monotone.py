"""Monomial-support analysis for monotone circuits.

A monotone circuit (characteristic-zero ring, no negative constants)
can never cancel a term, so the support of its expansion is computable
over plain sets: union for addition, pairwise products for
multiplication.  All operations here work on that set level and refuse
circuits where cancellation could hide a monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .circuits import ConstLeaf, LayeredCircuit, VarLeaf, validate
from .errors import (
    DegreeCapExceeded,
    ModeMismatch,
    NotMonotone,
    ParamError,
    TermCapExceeded,
)
from .families import FamilyParams, family_monomial_set
from .polynomials import COMMUTATIVE, DEFAULT_CAPS, ExpansionCaps, Monomial


@dataclass(frozen=True)
class MonomialSet:
    """The support of a polynomial, with no coefficient information."""

    mode: str
    num_variables: int
    members: frozenset[Monomial]
    origin_degree_bound: int

    def __post_init__(self):
        for mono in self.members:
            if mono.mode != self.mode:
                raise ModeMismatch("monomial mode differs from the set mode")
            if mono.degree > self.origin_degree_bound:
                raise ParamError(
                    f"monomial degree {mono.degree} exceeds declared "
                    f"bound {self.origin_degree_bound}"
                )

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class GraphComponent:
    variables: frozenset[int]
    monomials: frozenset[Monomial]


@dataclass(frozen=True)
class MonVarGraph:
    """Bipartite occurrence graph between variables and monomials."""

    monomial_vertices: frozenset[Monomial]
    variable_vertices: frozenset[int]
    edges: frozenset[tuple[int, Monomial]]
    components: tuple[GraphComponent, ...]


def mon_set(c: LayeredCircuit, caps: ExpansionCaps = DEFAULT_CAPS) -> MonomialSet:
    """Support of expand(c), computed without coefficients.

    Sound only for monotone circuits; anything else raises NotMonotone
    because a cancellation could make the set overshoot the support.
    """
    report = validate(c)
    if not report.monotone:
        raise NotMonotone("set semantics require a monotone circuit")
    unit = frozenset((Monomial.unit(c.mode),))
    empty: frozenset[Monomial] = frozenset()
    support: dict[int, frozenset[Monomial]] = {}
    for layer in c.layers:
        for gid in layer:
            g = c.gates[gid]
            if isinstance(g, VarLeaf):
                s = frozenset((Monomial.variable(c.mode, g.index),))
            elif isinstance(g, ConstLeaf):
                s = empty if g.value.is_zero else unit
            elif g.op == "add":
                s = support[g.left] | support[g.right]
            else:
                out = set()
                for a in support[g.left]:
                    for b in support[g.right]:
                        mono = a * b
                        if mono.degree > caps.max_degree:
                            raise DegreeCapExceeded(
                                f"support monomial degree {mono.degree} "
                                f"exceeds cap {caps.max_degree}"
                            )
                        out.add(mono)
                        if len(out) > caps.max_terms:
                            raise TermCapExceeded(
                                f"support grew past {caps.max_terms} monomials"
                            )
                s = frozenset(out)
            support[gid] = s
    members = support[c.output_id]
    bound = max((m.degree for m in members), default=0)
    return MonomialSet(c.mode, c.num_variables, members, bound)


def mon_var_graph(s: MonomialSet) -> MonVarGraph:
    """Occurrence graph of a monomial set and its connected components.

    Components are reported smallest-variable first; a constant monomial
    touches no variable and forms a component of its own.
    """
    parent: dict[object, object] = {}

    def find(x):
        root = x
        while parent[root] is not root:
            root = parent[root]
        while parent[x] is not root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra is not rb:
            parent[ra] = rb

    edges = set()
    variables = set()
    for mono in s.members:
        mkey = ("m", mono)
        parent.setdefault(mkey, mkey)
        for var in mono.variables():
            vkey = ("v", var)
            parent.setdefault(vkey, vkey)
            variables.add(var)
            edges.add((var, mono))
            union(mkey, vkey)

    groups: dict[object, tuple[set[int], set[Monomial]]] = {}
    for key in parent:
        kind, value = key
        vars_, monos = groups.setdefault(find(key), (set(), set()))
        if kind == "v":
            vars_.add(value)
        else:
            monos.add(value)
    components = tuple(
        sorted(
            (
                GraphComponent(frozenset(v), frozenset(m))
                for v, m in groups.values()
            ),
            key=lambda comp: min(comp.variables) if comp.variables else float("inf"),
        )
    ) if groups else ()
    return MonVarGraph(
        monomial_vertices=frozenset(s.members),
        variable_vertices=frozenset(variables),
        edges=frozenset(edges),
        components=components,
    )


@dataclass(frozen=True)
class CoverageReport:
    contained: bool
    circuit_count: int
    family_count: int
    fraction: Fraction


def coverage(
    c: LayeredCircuit,
    params: FamilyParams,
    caps: ExpansionCaps = DEFAULT_CAPS,
) -> CoverageReport:
    """Compare a monotone circuit's support against a block-family instance."""
    if c.mode != COMMUTATIVE:
        raise ModeMismatch("coverage compares against a commutative family")
    circuit_support = mon_set(c, caps).members
    family_support = family_monomial_set(params, caps)
    return CoverageReport(
        contained=circuit_support <= family_support,
        circuit_count=len(circuit_support),
        family_count=len(family_support),
        fraction=Fraction(len(circuit_support), len(family_support)),
    )
