"""
Splitting a curvature operator
==============================

A curvature operator on a 3-dimensional space breaks into a Ricci-free
(Weyl projective) piece and the symmetric and antisymmetric halves of its
Ricci tensor.  Everything here is exact rational arithmetic.
"""

from curvforge import component_dimensions, decompose, random_curvature, recompose, ricci

A = random_curvature(seed=7, m=3)
print("nonzero entries of A:", len(A.nonzero()))

W, rho_s, rho_a = decompose(A)
print("Ricci tensor of A:")
print(ricci(A))
print("symmetric part:")
print(rho_s)
print("antisymmetric part:")
print(rho_a)

# the Weyl piece has no Ricci trace
print("ricci(W) is zero:", ricci(W).is_zero())

# and the three pieces put A back together exactly
print("recompose(W, rho_s, rho_a) == A:", recompose(W, rho_s, rho_a) == A)

# dimensions of the three summands, checked against exact ranks
for m in (3, 4, 5):
    weyl, sym, alt, total = component_dimensions(m)
    print(f"m={m}: weyl {weyl}, sym {sym}, alt {alt}, total {total}")
