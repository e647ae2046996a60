"""
Projectively flat connections and the missing row
=================================================

``nabla_x y = theta(x) y + theta(y) x`` with a linear 1-form ``theta`` is
projectively flat, and its curvature at the origin is ``H(Theta)``.  With an
antisymmetric ``Theta`` the Ricci tensor picks up a symmetric part away from
the origin, which is why a nonzero purely antisymmetric Ricci operator has
no projectively flat, Ricci-antisymmetric realization.
"""

from curvforge import (
    BilinearForm,
    Connection,
    curvature,
    h_map,
    obstruction_audit,
    realize_projectively_flat,
    ricci_field,
    weyl_project_field,
)

order = 6
theta = BilinearForm.unit(3, 0, 1) - BilinearForm.unit(3, 1, 0)
nabla = realize_projectively_flat(theta, order)
R = curvature(nabla)

print("R(0) == H(Theta):", R.at_origin() == h_map(theta))
print("Weyl field zero through degree", weyl_project_field(R).vanishes_through())
print("Ricci at the origin:")
print(ricci_field(R).at_origin())
print("first symmetric Ricci coefficient:", ricci_field(R).sym().first_nonzero())

report = obstruction_audit(nabla)
for name, witness in report.hypothesis_failures:
    print(f"audit hypothesis '{name}' fails: {witness}")

flat = obstruction_audit(Connection.flat(3, order))
print("flat connection:", flat.verdict, "certified through degree", flat.certified_order)
