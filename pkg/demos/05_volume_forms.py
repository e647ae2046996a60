"""
Parallel volume forms and the antisymmetric Ricci tensor
=========================================================

A torsion-free connection has a parallel volume form exactly when its Ricci
tensor is symmetric.  The obstruction is the exterior derivative of the
trace 1-form ``omega_i = sum_j Gamma[i, j, j]``.
"""

from curvforge import (
    NotClosedError,
    curvature,
    d_one_form,
    random_curvature,
    realize_linear,
    ricci_field,
    trace_one_form,
    trace_two_form,
    volume_potential,
)

order = 5
for mask in ({"weyl", "sym"}, {"weyl", "alt"}):
    nabla = realize_linear(random_curvature(seed=2, m=3, mask=mask), order)
    R = curvature(nabla)
    d_omega = d_one_form(trace_one_form(nabla))
    print(f"mask {sorted(mask)}")
    print("  Ricci symmetric:", ricci_field(R).alt().first_nonzero() is None)
    print("  d omega zero:   ", d_omega.first_nonzero() is None)
    print("  trace of R equals d omega:", trace_two_form(R) == d_omega)
    try:
        phi = volume_potential(nabla)
        print("  exp(Phi) dz1^dz2^dz3 is parallel, Phi =", phi)
    except NotClosedError as exc:
        print("  no parallel volume form:", exc.witness)
