"""Root extraction and identity testing, end to end.

Plants a polynomial root, recovers it as a narrow circuit via Newton
iteration plus interpolation, then puts the two identity testers and
the permanent verifier through their paces.  Run it directly:

    python3 demos/root_and_identity.py
"""

from slpforge import (
    RATIONALS,
    RootProblem,
    SlpBuilder,
    build_permanent_sparse,
    expand,
    root_circuit,
    schwartz_zippel,
    slp_to_circuit,
    sparse_to_width2,
    validate,
    verify_permanent_circuit,
)

# P(x1, x2, y) = (y - (1 + x1 + 2 x2)) * (y - 5).  The first factor is
# the planted root; y0 = 1 tells the solver which branch to follow.
sb = SlpBuilder(RATIONALS, "commutative", 3, register_count=3, name="planted")
acc, fac, tmp = 0, 1, 2
sb.load(acc, sb.var(3))
sb.apply(acc, "add", sb.reg(acc), sb.const(-5))
sb.load(fac, sb.var(3))
sb.apply(fac, "add", sb.reg(fac), sb.const(-1))
sb.load(tmp, sb.var(1))
sb.apply(tmp, "mul", sb.reg(tmp), sb.const(-1))
sb.apply(fac, "add", sb.reg(fac), sb.reg(tmp))
sb.load(tmp, sb.var(2))
sb.apply(tmp, "mul", sb.reg(tmp), sb.const(-2))
sb.apply(fac, "add", sb.reg(fac), sb.reg(tmp))
sb.apply(acc, "mul", sb.reg(acc), sb.reg(fac))
program = sb.finish(acc)

problem = RootProblem(program, r=2, m=1, y0=1)
solved = root_circuit(problem)
print(f"planted root recovered: {expand(solved).text()}")
print(f"  width {validate(slp_to_circuit(solved)).width} "
      f"(input program used {program.register_count} registers)")

# Identity testing, randomized: x1^2 - x1*x1 written as a program that
# is not syntactically zero.  The tester needs one lucky point to say
# nonzero; zero verdicts are only probably right.
sq = SlpBuilder(RATIONALS, "commutative", 1, register_count=2, name="zero")
sq.load(0, sq.var(1))
sq.apply(0, "mul", sq.reg(0), sq.var(1))
sq.load(1, sq.var(1))
sq.apply(1, "mul", sq.reg(1), sq.var(1))
sq.apply(1, "mul", sq.reg(1), sq.const(-1))
sq.apply(0, "add", sq.reg(0), sq.reg(1))
verdict = schwartz_zippel(sq.finish(0), trials=5, seed=42)
print(f"\nidentity test on a hidden zero: {verdict.status}")

nz = SlpBuilder(RATIONALS, "commutative", 2, register_count=1, name="nz")
nz.load(0, nz.var(1))
nz.apply(0, "mul", nz.reg(0), nz.var(2))
verdict = schwartz_zippel(nz.finish(0), trials=5, seed=42)
print(f"identity test on x1*x2: {verdict.status}, "
      f"witness {[v.text() for v in verdict.witness]}")

# The permanent verifier restricts the candidate to successive minors
# and checks one expansion identity per order.  A correct candidate
# passes; corrupting a single coefficient flips some identity.
perm3 = slp_to_circuit(sparse_to_width2(build_permanent_sparse(3), name="perm3"))
print(f"\npermanent candidate (order 3): "
      f"{verify_permanent_circuit(perm3, seed=7).status}")

wrong = slp_to_circuit(
    sparse_to_width2(build_permanent_sparse(3).scale(2), name="wrong")
)
bad = verify_permanent_circuit(wrong, seed=7)
print(f"doubled candidate: {bad.status} "
      f"(identity {bad.failing_index} failed)")
