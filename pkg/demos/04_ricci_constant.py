"""
Connections with constant Ricci tensor
======================================

Starting from the linear realizer, trace-free corrections are added one
degree at a time until the Ricci tensor agrees with that of A at every
point, up to the truncation order.
"""

from curvforge import BilinearField, random_curvature, realize_ricci_constant, ricci, ricci_field

order = 6
A = random_curvature(seed=4, m=3)
result = realize_ricci_constant(A, order, check_accumulation=True)

print("corrections:", result.iterations)
print("lowest residual degree at each step:", result.residual_degrees)
print("curvature rebuilt incrementally and compared", result.accumulation_checked, "times")

rho = ricci_field(result.curvature)
target = BilinearField.constant(ricci(A), order - 1)
print("Ricci tensor constant through degree", (rho - target).vanishes_through())
print("R(0) == A:", result.curvature.at_origin() == A)
