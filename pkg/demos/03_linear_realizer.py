"""
Linear connections with prescribed curvature
=============================================

Every curvature operator A is the curvature at the origin of a torsion-free
connection whose Christoffel symbols are linear in the coordinates.
"""

from curvforge import curvature, random_curvature, realize_linear

A = random_curvature(seed=1, m=3)
nabla = realize_linear(A, order=4)
print(nabla)

for (i, j, k), jet in list(nabla.symbols())[:5]:
    print(f"Gamma[{i + 1},{j + 1},{k + 1}] =", jet)

R = curvature(nabla)
print("curvature trusted through degree", R.valid_order)
print("R(0) == A:", R.at_origin() == A)

# away from the origin the quadratic Gamma * Gamma terms show up
print("R[1,2,1,2] =", R[0, 1, 0, 1])
