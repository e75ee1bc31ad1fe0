"""A tour of the hard polynomial families.

Walks through the block family (many monomials, tiny width), the
palindrome polynomial (noncommutative, two registers), and the
balanced-word polynomial built two independent ways.  Run it directly:

    python3 demos/block_family_tour.py
"""

import math

from slpforge import (
    BenOrParams,
    FamilyParams,
    RATIONALS,
    build_E_abp,
    build_E_width2,
    build_P,
    build_palindrome,
    expand,
    mon_set,
    validate,
)

# The block family: ell summands of ell factors per level, alternating
# k times.  Parameters (2, 2) give 16 variables and 8 monomials, yet
# the circuit form stays at width 2k = 4.
params = FamilyParams(ell=2, k=2)
circuit = build_P(params, form="circuit")
report = validate(circuit)
print(f"block family (2,2): {params.num_variables} variables, "
      f"{params.monomial_count} monomials, degree {params.degree}")
print(f"  circuit width {report.width}, size {report.size}, "
      f"monotone: {report.monotone}")

# The monomial support is computable without expanding coefficients,
# because every gate in a monotone circuit can only grow the support.
support = mon_set(circuit)
print(f"  support size via set semantics: {len(support.members)}")

# Doubling k squares the monomial count but only adds 2 to the width.
bigger = FamilyParams(ell=2, k=3)
report3 = validate(build_P(bigger, form="circuit"))
print(f"block family (2,3): {bigger.monomial_count} monomials, "
      f"circuit width {report3.width}")

# Palindromes: the sum of all words w * reverse(w) over the alphabet
# {x1, x2}.  Exponentially many words, two registers, linear size.
print()
for n in (3, 6):
    pal = build_palindrome(n)
    rep = validate(pal)
    print(f"palindromes n={n}: {2**n} words, width {rep.width}, "
          f"size {rep.size} (bound {12 * n})")

# Balanced words: every word over {x1, x2} with as many x1s as x2s.
# The branching program counts the imbalance; the width-2 program gets
# there by interpolating a power of (1 + x1 t + x2 t^-1) in disguise,
# so each coefficient needs a multiplicity correction.  Both routes
# must land on the same polynomial.
print()
n = 3
abp = build_E_abp(n)
prog = build_E_width2(BenOrParams(n), RATIONALS)
left, right = expand(abp), expand(prog)
print(f"balanced words n={n}: {math.comb(2 * n, n)} words")
print(f"  branching program: {abp.size} vertices (bound {4 * n * n})")
print(f"  register program:  {prog.register_count} registers, "
      f"{prog.step_count} steps")
print(f"  expansions agree: {left == right}")
