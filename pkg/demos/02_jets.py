"""
Truncated power series
======================

Christoffel symbols live in a ring of polynomials cut off at a fixed total
degree.  Differentiation lowers the trusted order by one.
"""

from curvforge import Jet

m, order = 3, 5
z1, z2, z3 = (Jet.var(m, order, k) for k in range(m))

a = (1 + z1) * (1 - z2) + z3 ** 2 / 3
print("a          =", a)
print("a * a      =", a * a)
print("d/dz1 a    =", a.partial(0), " (order", a.partial(0).order, ")")

# the ray integral along z2 undoes d/dz2
b = a.antider(1)
print("antider_2 a =", b)
print("d/dz2 of it equals a through order 4:", b.partial(1) == a.with_order(order - 1))

# anything past the cutoff is dropped
print("z1^5 * z2 =", z1 ** 5 * z2)
