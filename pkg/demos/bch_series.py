"""
The Campbell-Hausdorff series, exactly
======================================

Computes log(exp(x) exp(y)) in the free Lie ring on two generators,
prints the coefficients in the Hall basis, and certifies that every
degree-d denominator divides a power of d!.
"""

from orbitlab.freelie import (
    bch,
    certify,
    hall_basis,
    lambda_coefficients,
    tree_degree,
    tree_str,
)

# Hall basis sizes follow Witt's formula: 2, 1, 2, 3, 6, 9 in degrees 1..6.
for degree in range(1, 7):
    basis = hall_basis(2, degree)
    count = sum(1 for t in basis.elements if tree_degree(t) == degree)
    print(f"degree {degree}: {count} Hall trees")
print()

# The series itself, through class 4.  Coefficients are exact Fractions.
series = bch(4)
for tree, coeff in sorted(series.coeffs.items(),
                          key=lambda it: (tree_degree(it[0]), str(it[0]))):
    print(f"  {tree_str(tree):28s} {coeff}")
print()

# Certificate: per degree, the lcm of the denominators and the least e
# with lcm | (d!)^e.  Degree 3 needs e = 2 (the 1/12 terms).
cert = certify("bch", 6)
for degree in sorted(cert.bounds):
    lcm, exp = cert.bounds[degree]
    print(f"degree {degree}: denominator lcm {lcm} divides ({degree}!)^{exp}")
print()

# The lambda series inverts t -> exp(t) - 1; its coefficients drive the
# class-2 square-root inversion used by the group-to-ring direction.
print("lambda coefficients:", [str(c) for c in lambda_coefficients(6)])
