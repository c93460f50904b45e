"""
Polarizing a character of u4(Z/5)
=================================

Walks the Heisenberg chain for a generic character chi of the strictly
upper triangular 4x4 Lie ring: start at the radical of the skew form
B_chi(x, y) = chi([x, y]), enlarge until [h-perp, h] lands inside h,
then greedily extend to a Lagrangian (self-perpendicular) subring.
"""

from orbitlab.lazard import bracket_span, catalog
from orbitlab.orbits import SkewForm, generic_character, radical
from orbitlab.polarizations import lagrangian_extend, polarize

ring = catalog()["u4_p5"]
chi = generic_character(ring)
print(f"chi = ({', '.join(str(v) for v in chi.covector())}) on {ring.name}")

form = SkewForm(chi)
rad = radical(form)
print(f"radical of B_chi: size {rad.size()}, "
      f"generators {[tuple(g) for g in rad.generators()]}")
print()

# The chain.  Each step keeps |h| * |perp| = |g| * |radical| and grows h;
# the start h = radical need not be an ideal (here it is not), which is
# exactly what the enlargement repairs.
steps, final, lag = polarize(form)
for i, pol in enumerate(steps):
    print(f"step {i}: |h| = {pol.h.size():5d}  |perp| = {pol.perp.size():5d}  "
          f"heisenberg = {pol.heisenberg}")
assert all(final.h.contains(g)
           for g in bracket_span(final.perp, final.h).generators())
print()

# Lagrangian extension: h grows inside h-perp until the two meet.
assert lag is not None
print(f"lagrangian: size {lag.h.size()}, self-perp = "
      f"{lag.h.rows == lag.perp.rows}")
print(f"generators: {[tuple(g) for g in lag.h.generators()]}")

# Same walk via the step-by-step interface, for comparison.
again = lagrangian_extend(final)
assert again.h.rows == lag.h.rows
print("greedy extension is deterministic: same Lagrangian both times")
