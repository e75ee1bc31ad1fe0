"""Circuit intermediate representations and their semantics.

Three forms share one polynomial semantics:

* LayeredCircuit: gates arranged in layers V_1..V_t.  V_1 holds the
  leaves (variables and constants).  An internal gate in V_i (i > 1)
  reads operands from V_1 or V_{i-1} only.  Width is the largest
  internal layer; a circuit with no internal layer has width 0.  Size
  counts every gate, leaves included.

* StraightLineProgram: a register program over w registers.  Steps are
  load (register := variable or constant) and apply (register :=
  operand op operand), where apply operands may be registers, variables,
  or constants, and the destination may coincide with a source.
  Registers start at zero.  An SLP over w registers is the same object
  as a staggered layered circuit of width w: each layer of such a
  circuit has at most one gate that is not a copy (u times 1), and the
  copy chains are exactly registers kept alive.  slp_to_circuit and
  circuit_to_slp realize the two directions.

* AlgebraicBranchingProgram: a layered DAG with a unique source and
  sink whose edges carry linear forms; it computes the sum over all
  source-to-sink paths of the ordered product of edge labels.  Size is
  the vertex count.  Evaluation and expansion run layer by layer, never
  by path enumeration.

evaluate() computes a scalar from an assignment, expand() the exact
sparse polynomial under hard caps.  Both are pure and share no state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import (
    ArityMismatch,
    BadOperandLayer,
    CircuitSemanticError,
    DanglingOutput,
    ModeMismatch,
    ParamError,
    RingMismatch,
)
from .polynomials import (
    COMMUTATIVE,
    DEFAULT_CAPS,
    ExpansionCaps,
    Monomial,
    NONCOMMUTATIVE,
    SparsePolynomial,
    _check_mode,
)
from .rings import Ring, Scalar, ScalarLike

ADD = "add"
MUL = "mul"
OPS = (ADD, MUL)


# ---------------------------------------------------------------------------
# Layered circuits


@dataclass(frozen=True)
class VarLeaf:
    index: int


@dataclass(frozen=True)
class ConstLeaf:
    value: Scalar


@dataclass(frozen=True)
class BinGate:
    op: str
    left: int
    right: int


Gate = Union[VarLeaf, ConstLeaf, BinGate]


class LayeredCircuit:
    """Immutable layered circuit.  Built via CircuitBuilder or the parser."""

    __slots__ = ("name", "ring", "mode", "num_variables", "layers", "gates", "output_id")

    def __init__(
        self,
        name: str,
        ring: Ring,
        mode: str,
        num_variables: int,
        layers: Sequence[Sequence[int]],
        gates: Mapping[int, Gate],
        output_id: int,
    ):
        _check_mode(mode)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "num_variables", num_variables)
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in layers))
        object.__setattr__(self, "gates", dict(gates))
        object.__setattr__(self, "output_id", output_id)

    def __setattr__(self, key, value):
        raise AttributeError("LayeredCircuit is immutable")

    @property
    def width(self) -> int:
        return max((len(layer) for layer in self.layers[1:]), default=0)

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    def layer_of(self) -> dict[int, int]:
        """Gate id -> 1-based layer index."""
        out = {}
        for i, layer in enumerate(self.layers, start=1):
            for gid in layer:
                out[gid] = i
        return out


def _is_one_const(circuit: LayeredCircuit, gid: int) -> bool:
    g = circuit.gates.get(gid)
    return isinstance(g, ConstLeaf) and g.value == circuit.ring.one()


def _is_copy_gate(circuit: LayeredCircuit, g: Gate) -> bool:
    """True for gates of the shape u*1 or 1*u."""
    return isinstance(g, BinGate) and g.op == MUL and (
        _is_one_const(circuit, g.left) or _is_one_const(circuit, g.right)
    )


@dataclass(frozen=True)
class ValidationReport:
    width: int
    size: int
    layer_count: int
    staggered: bool
    monotone: bool
    homogeneous: bool | None  # None when the degree analysis hit its cap


_HOMOGENEITY_SET_CAP = 4096


def validate(circuit: LayeredCircuit) -> ValidationReport:
    """Check structural invariants and summarize the circuit.

    Raises BadOperandLayer, DanglingOutput, CircuitSemanticError,
    RingMismatch, or ParamError on ill-formed circuits.
    """
    seen: set[int] = set()
    layer_of: dict[int, int] = {}
    for i, layer in enumerate(circuit.layers, start=1):
        for gid in layer:
            if gid in seen:
                raise CircuitSemanticError(f"gate {gid} appears in two layers")
            seen.add(gid)
            layer_of[gid] = i
    if set(circuit.gates) != seen:
        stray = set(circuit.gates) ^ seen
        raise CircuitSemanticError(f"gate table and layers disagree on ids {sorted(stray)}")

    monotone = circuit.ring.characteristic == 0
    for gid, g in circuit.gates.items():
        layer = layer_of[gid]
        if isinstance(g, VarLeaf):
            if layer != 1:
                raise BadOperandLayer(f"variable leaf {gid} in layer {layer}")
            if not 1 <= g.index <= circuit.num_variables:
                raise ParamError(f"gate {gid} reads x{g.index} beyond vars {circuit.num_variables}")
        elif isinstance(g, ConstLeaf):
            if layer != 1:
                raise BadOperandLayer(f"constant leaf {gid} in layer {layer}")
            if g.value.ring != circuit.ring:
                raise RingMismatch(f"gate {gid} constant from a different ring")
            if monotone and g.value.value < 0:
                monotone = False
        else:
            if layer == 1:
                raise BadOperandLayer(f"internal gate {gid} in the leaf layer")
            if g.op not in OPS:
                raise ParamError(f"gate {gid} has unknown op {g.op!r}")
            for ref in (g.left, g.right):
                if ref not in circuit.gates:
                    raise CircuitSemanticError(f"gate {gid} reads undefined gate {ref}")
                ref_layer = layer_of[ref]
                if ref_layer not in (1, layer - 1):
                    raise BadOperandLayer(
                        f"gate {gid} in layer {layer} reads layer {ref_layer}"
                    )
    if circuit.output_id not in circuit.gates:
        raise DanglingOutput(f"output {circuit.output_id} is not a gate")

    staggered = all(
        sum(1 for gid in layer if not _is_copy_gate(circuit, circuit.gates[gid])) <= 1
        for layer in circuit.layers[1:]
    )

    # Syntactic homogeneity: possible total degrees per gate, add unions,
    # mul takes sumsets.  Abandon (None) if a set grows past the cap.
    degrees: dict[int, frozenset[int]] = {}
    homogeneous: bool | None = True
    for layer in circuit.layers:
        for gid in layer:
            g = circuit.gates[gid]
            if isinstance(g, VarLeaf):
                ds = frozenset((1,))
            elif isinstance(g, ConstLeaf):
                ds = frozenset((0,))
            else:
                a, b = degrees[g.left], degrees[g.right]
                ds = a | b if g.op == ADD else frozenset(x + y for x in a for y in b)
                if len(ds) > _HOMOGENEITY_SET_CAP:
                    homogeneous = None
                    break
            degrees[gid] = ds
            if homogeneous is True and len(ds) > 1:
                homogeneous = False
        if homogeneous is None:
            break

    return ValidationReport(
        width=circuit.width,
        size=circuit.size,
        layer_count=circuit.layer_count,
        staggered=staggered,
        monotone=monotone,
        homogeneous=homogeneous,
    )


class CircuitBuilder:
    """Incremental construction of a LayeredCircuit with auto-assigned ids."""

    def __init__(self, ring: Ring, mode: str, num_variables: int, name: str = "c"):
        _check_mode(mode)
        self.ring = ring
        self.mode = mode
        self.num_variables = num_variables
        self.name = name
        self._gates: dict[int, Gate] = {}
        self._layers: list[list[int]] = []
        self._next_id = 1
        self._output: int | None = None
        self._var_ids: dict[int, int] = {}
        self._const_ids: dict[Scalar, int] = {}

    def _fresh(self, layer: int, gate: Gate) -> int:
        if layer < 1:
            raise ParamError(f"layer must be >= 1, got {layer}")
        while len(self._layers) < layer:
            self._layers.append([])
        gid = self._next_id
        self._next_id += 1
        self._gates[gid] = gate
        self._layers[layer - 1].append(gid)
        return gid

    def var_leaf(self, index: int) -> int:
        """Leaf for xindex, deduplicated."""
        if index not in self._var_ids:
            self._var_ids[index] = self._fresh(1, VarLeaf(index))
        return self._var_ids[index]

    def const_leaf(self, value: ScalarLike) -> int:
        v = self.ring.scalar(value)
        if v not in self._const_ids:
            self._const_ids[v] = self._fresh(1, ConstLeaf(v))
        return self._const_ids[v]

    def gate(self, layer: int, op: str, left: int, right: int) -> int:
        if op not in OPS:
            raise ParamError(f"op must be add or mul, got {op!r}")
        return self._fresh(layer, BinGate(op, left, right))

    def copy(self, layer: int, source: int) -> int:
        """Ferry gate source*1 into the given layer."""
        return self.gate(layer, MUL, source, self.const_leaf(1))

    def set_output(self, gid: int) -> None:
        self._output = gid

    def build(self, check: bool = True) -> LayeredCircuit:
        if self._output is None:
            raise DanglingOutput("no output designated")
        circuit = LayeredCircuit(
            self.name,
            self.ring,
            self.mode,
            self.num_variables,
            self._layers,
            self._gates,
            self._output,
        )
        if check:
            validate(circuit)
        return circuit


# ---------------------------------------------------------------------------
# Straight-line programs


@dataclass(frozen=True)
class RegOperand:
    register: int


@dataclass(frozen=True)
class VarOperand:
    index: int


@dataclass(frozen=True)
class ConstOperand:
    value: Scalar


Operand = Union[RegOperand, VarOperand, ConstOperand]


@dataclass(frozen=True)
class LoadStep:
    dest: int
    source: Union[VarOperand, ConstOperand]


@dataclass(frozen=True)
class ApplyStep:
    dest: int
    op: str
    left: Operand
    right: Operand


Step = Union[LoadStep, ApplyStep]


class StraightLineProgram:
    """Immutable register program; see the module docstring for semantics."""

    __slots__ = ("name", "ring", "mode", "num_variables", "register_count", "steps", "output_register")

    def __init__(
        self,
        name: str,
        ring: Ring,
        mode: str,
        num_variables: int,
        register_count: int,
        steps: Sequence[Step],
        output_register: int,
    ):
        _check_mode(mode)
        if register_count < 1:
            raise ParamError(f"register_count must be >= 1, got {register_count}")
        if not 0 <= output_register < register_count:
            raise ParamError(f"output register {output_register} out of range")

        def _check_operand(op: Operand) -> None:
            if isinstance(op, RegOperand):
                if not 0 <= op.register < register_count:
                    raise ParamError(f"register {op.register} out of range")
            elif isinstance(op, VarOperand):
                if not 1 <= op.index <= num_variables:
                    raise ParamError(f"variable x{op.index} beyond vars {num_variables}")
            elif isinstance(op, ConstOperand):
                if op.value.ring != ring:
                    raise RingMismatch("constant operand from a different ring")
            else:
                raise ParamError(f"bad operand {op!r}")

        for step in steps:
            if isinstance(step, LoadStep):
                if not 0 <= step.dest < register_count:
                    raise ParamError(f"register {step.dest} out of range")
                if isinstance(step.source, RegOperand):
                    raise ParamError("load source must be a variable or constant")
                _check_operand(step.source)
            elif isinstance(step, ApplyStep):
                if not 0 <= step.dest < register_count:
                    raise ParamError(f"register {step.dest} out of range")
                if step.op not in OPS:
                    raise ParamError(f"op must be add or mul, got {step.op!r}")
                _check_operand(step.left)
                _check_operand(step.right)
            else:
                raise ParamError(f"bad step {step!r}")

        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "num_variables", num_variables)
        object.__setattr__(self, "register_count", register_count)
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "output_register", output_register)

    def __setattr__(self, key, value):
        raise AttributeError("StraightLineProgram is immutable")

    @property
    def step_count(self) -> int:
        return len(self.steps)


class SlpBuilder:
    """Incremental SLP construction with operand helpers."""

    def __init__(
        self,
        ring: Ring,
        mode: str,
        num_variables: int,
        register_count: int | None = None,
        name: str = "slp",
    ):
        self.ring = ring
        self.mode = mode
        self.num_variables = num_variables
        self.register_count = register_count
        self.name = name
        self._steps: list[Step] = []
        self._high_register = -1

    def reg(self, index: int) -> RegOperand:
        return RegOperand(index)

    def var(self, index: int) -> VarOperand:
        return VarOperand(index)

    def const(self, value: ScalarLike) -> ConstOperand:
        return ConstOperand(self.ring.scalar(value))

    def _touch(self, *operands) -> None:
        for op in operands:
            if isinstance(op, int):
                self._high_register = max(self._high_register, op)
            elif isinstance(op, RegOperand):
                self._high_register = max(self._high_register, op.register)

    def load(self, dest: int, source: Union[VarOperand, ConstOperand]) -> None:
        self._touch(dest)
        self._steps.append(LoadStep(dest, source))

    def apply(self, dest: int, op: str, left: Operand, right: Operand) -> None:
        self._touch(dest, left, right)
        self._steps.append(ApplyStep(dest, op, left, right))

    def finish(self, output_register: int) -> StraightLineProgram:
        self._touch(output_register)
        count = self.register_count
        if count is None:
            count = self._high_register + 1
        return StraightLineProgram(
            self.name,
            self.ring,
            self.mode,
            self.num_variables,
            count,
            self._steps,
            output_register,
        )


# ---------------------------------------------------------------------------
# Algebraic branching programs


class LinearForm:
    """constant + sum of coefficient*variable, the label of an ABP edge."""

    __slots__ = ("constant", "coefficients")

    def __init__(self, constant: Scalar, coefficients: Mapping[int, Scalar] | None = None):
        object.__setattr__(self, "constant", constant)
        clean = {}
        for var, coeff in (coefficients or {}).items():
            if var < 1:
                raise ParamError(f"variable index must be >= 1, got {var}")
            if coeff.ring != constant.ring:
                raise RingMismatch("mixed rings inside a linear form")
            if not coeff.is_zero:
                clean[var] = coeff
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    def __setattr__(self, key, value):
        raise AttributeError("LinearForm is immutable")

    def evaluate(self, assignment: Sequence[Scalar]) -> Scalar:
        acc = self.constant
        for var, coeff in self.coefficients.items():
            acc = acc + coeff * assignment[var - 1]
        return acc

    def to_polynomial(self, ring: Ring, mode: str, num_variables: int) -> SparsePolynomial:
        terms: dict[Monomial, Scalar] = {}
        if not self.constant.is_zero:
            terms[Monomial.unit(mode)] = self.constant
        for var, coeff in self.coefficients.items():
            terms[Monomial.variable(mode, var)] = coeff
        return SparsePolynomial(ring, mode, num_variables, terms)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LinearForm)
            and other.constant == self.constant
            and other.coefficients == self.coefficients
        )

    def __hash__(self) -> int:
        return hash((self.constant, tuple(self.coefficients.items())))


class AlgebraicBranchingProgram:
    """Layered source-to-sink DAG with linear-form edge labels.

    The mode governs expansion only: in the default noncommutative mode,
    expand() keeps the source-to-sink order of each path as a word.
    """

    __slots__ = ("name", "ring", "mode", "num_variables", "layers", "edges", "source", "sink")

    def __init__(
        self,
        name: str,
        ring: Ring,
        num_variables: int,
        layers: Sequence[Sequence[int]],
        edges: Sequence[tuple[int, int, LinearForm]],
        source: int,
        sink: int,
        mode: str = NONCOMMUTATIVE,
    ):
        _check_mode(mode)
        layer_tuple = tuple(tuple(layer) for layer in layers)
        layer_of: dict[int, int] = {}
        for i, layer in enumerate(layer_tuple):
            for vid in layer:
                if vid in layer_of:
                    raise CircuitSemanticError(f"vertex {vid} appears twice")
                layer_of[vid] = i
        if not layer_tuple or len(layer_tuple[0]) != 1 or layer_tuple[0][0] != source:
            raise CircuitSemanticError("layer 0 must hold exactly the source")
        if len(layer_tuple[-1]) != 1 or layer_tuple[-1][0] != sink:
            raise CircuitSemanticError("the last layer must hold exactly the sink")
        indeg = {v: 0 for v in layer_of}
        outdeg = {v: 0 for v in layer_of}
        for u, v, label in edges:
            if u not in layer_of or v not in layer_of:
                raise CircuitSemanticError(f"edge ({u}, {v}) uses an undefined vertex")
            if layer_of[v] != layer_of[u] + 1:
                raise BadOperandLayer(f"edge ({u}, {v}) skips layers")
            if label.constant.ring != ring:
                raise RingMismatch("edge label from a different ring")
            indeg[v] += 1
            outdeg[u] += 1
        if indeg[source]:
            raise CircuitSemanticError("source has incoming edges")
        if outdeg[sink]:
            raise CircuitSemanticError("sink has outgoing edges")

        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "num_variables", num_variables)
        object.__setattr__(self, "layers", layer_tuple)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "sink", sink)

    def __setattr__(self, key, value):
        raise AttributeError("AlgebraicBranchingProgram is immutable")

    @property
    def size(self) -> int:
        """Vertex count."""
        return sum(len(layer) for layer in self.layers)


# ---------------------------------------------------------------------------
# Shared semantics

IRForm = Union[LayeredCircuit, StraightLineProgram, AlgebraicBranchingProgram]


def _check_assignment(obj: IRForm, assignment: Sequence[ScalarLike]) -> list[Scalar]:
    if len(assignment) != obj.num_variables:
        raise ArityMismatch(
            f"expected {obj.num_variables} scalars, got {len(assignment)}"
        )
    return [obj.ring.scalar(v) for v in assignment]


def evaluate(obj: IRForm, assignment: Sequence[ScalarLike]) -> Scalar:
    """Evaluate any IR form at a point, exactly."""
    point = _check_assignment(obj, assignment)
    ring = obj.ring

    if isinstance(obj, LayeredCircuit):
        values: dict[int, Scalar] = {}
        for layer in obj.layers:
            for gid in layer:
                g = obj.gates[gid]
                if isinstance(g, VarLeaf):
                    values[gid] = point[g.index - 1]
                elif isinstance(g, ConstLeaf):
                    values[gid] = g.value
                else:
                    a, b = values[g.left], values[g.right]
                    values[gid] = a + b if g.op == ADD else a * b
        return values[obj.output_id]

    if isinstance(obj, StraightLineProgram):
        regs = [ring.zero()] * obj.register_count

        def val(op: Operand) -> Scalar:
            if isinstance(op, RegOperand):
                return regs[op.register]
            if isinstance(op, VarOperand):
                return point[op.index - 1]
            return op.value

        for step in obj.steps:
            if isinstance(step, LoadStep):
                regs[step.dest] = val(step.source)
            else:
                a, b = val(step.left), val(step.right)
                regs[step.dest] = a + b if step.op == ADD else a * b
        return regs[obj.output_register]

    if isinstance(obj, AlgebraicBranchingProgram):
        values = {obj.source: ring.one()}
        by_source: dict[int, list[tuple[int, LinearForm]]] = {}
        for u, v, label in obj.edges:
            by_source.setdefault(u, []).append((v, label))
        for layer in obj.layers[:-1]:
            nxt: dict[int, Scalar] = {}
            for u in layer:
                base = values.get(u)
                if base is None:
                    continue
                for v, label in by_source.get(u, []):
                    contrib = base * label.evaluate(point)
                    nxt[v] = nxt.get(v, ring.zero()) + contrib
            values.update(nxt)
        return values.get(obj.sink, ring.zero())

    raise ParamError(f"cannot evaluate {type(obj).__name__}")


def expand(obj: IRForm, caps: ExpansionCaps = DEFAULT_CAPS) -> SparsePolynomial:
    """The exact sparse polynomial computed by any IR form.

    Raises TermCapExceeded or DegreeCapExceeded rather than truncating.
    """
    ring, mode, n = obj.ring, obj.mode, obj.num_variables

    def var(i: int) -> SparsePolynomial:
        return SparsePolynomial.variable(ring, mode, n, i)

    def const(c: Scalar) -> SparsePolynomial:
        return SparsePolynomial.constant(ring, mode, n, c)

    if isinstance(obj, LayeredCircuit):
        polys: dict[int, SparsePolynomial] = {}
        for layer in obj.layers:
            for gid in layer:
                g = obj.gates[gid]
                if isinstance(g, VarLeaf):
                    polys[gid] = var(g.index)
                elif isinstance(g, ConstLeaf):
                    polys[gid] = const(g.value)
                else:
                    a, b = polys[g.left], polys[g.right]
                    polys[gid] = a.add(b, caps) if g.op == ADD else a.mul(b, caps)
        return polys[obj.output_id]

    if isinstance(obj, StraightLineProgram):
        regs = [SparsePolynomial.zero(ring, mode, n)] * obj.register_count

        def poly(op: Operand) -> SparsePolynomial:
            if isinstance(op, RegOperand):
                return regs[op.register]
            if isinstance(op, VarOperand):
                return var(op.index)
            return const(op.value)

        for step in obj.steps:
            if isinstance(step, LoadStep):
                regs[step.dest] = poly(step.source)
            else:
                a, b = poly(step.left), poly(step.right)
                regs[step.dest] = a.add(b, caps) if step.op == ADD else a.mul(b, caps)
        return regs[obj.output_register]

    if isinstance(obj, AlgebraicBranchingProgram):
        values = {obj.source: SparsePolynomial.constant(ring, mode, n, 1)}
        by_source: dict[int, list[tuple[int, LinearForm]]] = {}
        for u, v, label in obj.edges:
            by_source.setdefault(u, []).append((v, label))
        for layer in obj.layers[:-1]:
            nxt: dict[int, SparsePolynomial] = {}
            for u in layer:
                base = values.get(u)
                if base is None:
                    continue
                for v, label in by_source.get(u, []):
                    contrib = base.mul(label.to_polynomial(ring, mode, n), caps)
                    if v in nxt:
                        nxt[v] = nxt[v].add(contrib, caps)
                    else:
                        nxt[v] = contrib
            values.update(nxt)
        return values.get(obj.sink, SparsePolynomial.zero(ring, mode, n))

    raise ParamError(f"cannot expand {type(obj).__name__}")


# ---------------------------------------------------------------------------
# SLP <-> staggered circuit conversion


def slp_to_circuit(slp: StraightLineProgram, name: str | None = None) -> LayeredCircuit:
    """Staggered layered circuit equivalent to the program.

    Loads bind registers straight to leaves (readable from every layer),
    so only apply steps create layers: one real gate plus a copy gate for
    every other register that is still needed later and is not currently
    bound to a leaf.  The resulting width is at most the register count.
    """
    b = CircuitBuilder(slp.ring, slp.mode, slp.num_variables, name or slp.name)

    # Liveness per step: registers read strictly later, plus the output.
    live_after: list[set[int]] = []
    live: set[int] = {slp.output_register}
    for step in reversed(slp.steps):
        live_after.append(set(live))
        live.discard(step.dest)
        operands = (step.source,) if isinstance(step, LoadStep) else (step.left, step.right)
        for op in operands:
            if isinstance(op, RegOperand):
                live.add(op.register)
    live_after.reverse()

    def leaf_for(op: Operand) -> int:
        if isinstance(op, VarOperand):
            return b.var_leaf(op.index)
        if isinstance(op, ConstOperand):
            return b.const_leaf(op.value)
        raise ParamError(f"not a leaf operand: {op!r}")

    # binding: register -> (gate id, is_leaf).  Unwritten registers are zero.
    binding: dict[int, tuple[int, bool]] = {}
    zero_leaf: int | None = None
    layer = 1

    def gate_of(reg: int) -> tuple[int, bool]:
        nonlocal zero_leaf
        if reg not in binding:
            if zero_leaf is None:
                zero_leaf = b.const_leaf(0)
            binding[reg] = (zero_leaf, True)
        return binding[reg]

    for idx, step in enumerate(slp.steps):
        if isinstance(step, LoadStep):
            binding[step.dest] = (leaf_for(step.source), True)
            continue
        operand_ids = []
        for op in (step.left, step.right):
            if isinstance(op, RegOperand):
                operand_ids.append(gate_of(op.register)[0])
            else:
                operand_ids.append(leaf_for(op))
        layer += 1
        new_gate = b.gate(layer, step.op, operand_ids[0], operand_ids[1])
        next_binding: dict[int, tuple[int, bool]] = {}
        for reg in live_after[idx]:
            if reg == step.dest:
                continue
            gid, is_leaf = gate_of(reg)
            if is_leaf:
                next_binding[reg] = (gid, True)
            else:
                next_binding[reg] = (b.copy(layer, gid), False)
        next_binding[step.dest] = (new_gate, False)
        binding = next_binding

    out_gid, _ = gate_of(slp.output_register)
    b.set_output(out_gid)
    return b.build()


def circuit_to_slp(circuit: LayeredCircuit, name: str | None = None) -> StraightLineProgram:
    """Register program for a staggered circuit.

    Copy gates become register inheritances and cost nothing; each layer
    contributes at most one apply step.  The register count equals the
    circuit width (or 1 for a circuit that is a bare leaf).
    """
    report = validate(circuit)
    if not report.staggered:
        raise ParamError("circuit is not staggered")
    width = max(report.width, 1)
    sb = SlpBuilder(
        circuit.ring, circuit.mode, circuit.num_variables, width, name or circuit.name
    )

    def leaf_operand(gid: int) -> Operand:
        g = circuit.gates[gid]
        if isinstance(g, VarLeaf):
            return sb.var(g.index)
        if isinstance(g, ConstLeaf):
            return ConstOperand(g.value)
        raise ParamError(f"gate {gid} is not a leaf")

    leaf_ids = set(circuit.layers[0])
    register_of: dict[int, int] = {}
    for layer in circuit.layers[1:]:
        copies = [gid for gid in layer if _is_copy_gate(circuit, circuit.gates[gid])]
        real = [gid for gid in layer if gid not in set(copies)]
        taken: set[int] = set()
        for gid in copies:
            g = circuit.gates[gid]
            source = g.left if not _is_one_const(circuit, g.left) else g.right
            if source in leaf_ids:
                # A copy of a leaf still needs a register of its own.
                real.append(gid)
                continue
            register_of[gid] = register_of[source]
            taken.add(register_of[gid])
        for gid in real:
            g = circuit.gates[gid]
            dest = next(r for r in range(width) if r not in taken)
            taken.add(dest)
            operands = []
            for ref in (g.left, g.right):
                if ref in leaf_ids:
                    operands.append(leaf_operand(ref))
                else:
                    operands.append(sb.reg(register_of[ref]))
            sb.apply(dest, g.op, operands[0], operands[1])
            register_of[gid] = dest

    if circuit.output_id in leaf_ids:
        sb.load(0, leaf_operand(circuit.output_id))
        return sb.finish(0)
    return sb.finish(register_of[circuit.output_id])


# ---------------------------------------------------------------------------
# Helpers shared by transforms and analyses


def substitute_constants(
    circuit: LayeredCircuit, values: Mapping[int, ScalarLike], name: str | None = None
) -> LayeredCircuit:
    """Replace variable leaves by ring constants, keeping the shape."""
    gates: dict[int, Gate] = {}
    for gid, g in circuit.gates.items():
        if isinstance(g, VarLeaf) and g.index in values:
            gates[gid] = ConstLeaf(circuit.ring.scalar(values[g.index]))
        else:
            gates[gid] = g
    return LayeredCircuit(
        name or circuit.name,
        circuit.ring,
        circuit.mode,
        circuit.num_variables,
        circuit.layers,
        gates,
        circuit.output_id,
    )


def syntactic_degree(obj: Union[LayeredCircuit, StraightLineProgram]) -> int:
    """Upper bound on the output degree: leaves 1/0, add max, mul sum."""
    if isinstance(obj, LayeredCircuit):
        deg: dict[int, int] = {}
        for layer in obj.layers:
            for gid in layer:
                g = obj.gates[gid]
                if isinstance(g, VarLeaf):
                    deg[gid] = 1
                elif isinstance(g, ConstLeaf):
                    deg[gid] = 0
                else:
                    a, b = deg[g.left], deg[g.right]
                    deg[gid] = max(a, b) if g.op == ADD else a + b
        return deg[obj.output_id]

    regs = [0] * obj.register_count

    def d(op: Operand) -> int:
        if isinstance(op, RegOperand):
            return regs[op.register]
        if isinstance(op, VarOperand):
            return 1
        return 0

    for step in obj.steps:
        if isinstance(step, LoadStep):
            regs[step.dest] = d(step.source)
        else:
            a, b = d(step.left), d(step.right)
            regs[step.dest] = max(a, b) if step.op == ADD else a + b
    return regs[obj.output_register]
