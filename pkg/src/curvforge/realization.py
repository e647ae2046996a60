"""Realizing curvature operators as curvature of torsion-free polynomial connections.

Three constructions, all exact on jets of a fixed order ``D``:

* :func:`realize_linear` -- linear Christoffel symbols with ``R(0) = A``.
* :func:`realize_ricci_constant` -- corrects the linear realizer degree by
  degree until the Ricci tensor equals ``rho(A)`` at every point, to order
  ``D - 1``.
* :func:`realize_projectively_flat` -- ``nabla_x y = theta(x) y + theta(y) x``
  for the linear 1-form ``theta_j = z_i Theta_ij``; projectively flat with
  ``R(0) = H(Theta)``.

:func:`obstruction_audit` checks the one case that cannot be realized: a
connection that is projectively flat with antisymmetric Ricci tensor must be
flat.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import BilinearForm, CurvatureOp, h_map, ricci, weyl_project
from .connection import (
    BilinearField,
    Connection,
    CurvatureField,
    JetTensor,
    OneFormField,
    Witness,
    _zero_array,
    covariant_derivative_two_form,
    curvature,
    h_field,
    projective_perturb,
    ricci_field,
    second_bianchi_residual,
    weyl_project_field,
)
from .jets import Jet, accumulate

__all__ = [
    "AuditReport",
    "NotProjectivelyFlatError",
    "RicciConstantResult",
    "free_index",
    "linear_curvature",
    "obstruction_audit",
    "realize_linear",
    "realize_projectively_flat",
    "realize_projectively_flat_from_A",
    "realize_ricci_constant",
    "ricci_primitive",
    "star",
]


def realize_linear(A: CurvatureOp, order: int) -> Connection:
    """``gamma[u, v, l] = (1/3) sum_w (A[w,u,v,l] + A[w,v,u,l]) z_w``."""
    if order < 2:
        raise ValueError(f"order must be at least 2, got {order}")
    m = A.m
    z = [Jet.var(m, order, w) for w in range(m)]
    gamma = np.empty((m,) * 3, dtype=object)
    for u, v, l in itertools.product(range(m), repeat=3):
        gamma[u, v, l] = accumulate(
            m, order, [((A[w, u, v, l] + A[w, v, u, l]) / 3, z[w]) for w in range(m)])
    return Connection(gamma)


# -- pieces of the curvature expansion ----------------------------------------

def linear_curvature(nabla: Connection) -> CurvatureField:
    """Derivative part ``L[i,j,k,l] = d_i G[j,k,l] - d_j G[i,k,l]``."""
    m, G = nabla.m, nabla.gamma
    order = max(nabla.order - 1, 0)
    out = _zero_array((m,) * 4, m, order)
    for i, j in itertools.combinations(range(m), 2):
        for k, l in itertools.product(range(m), repeat=2):
            jet = G[j, k, l].partial(i) - G[i, k, l].partial(j)
            out[i, j, k, l] = jet
            out[j, i, k, l] = -jet
    return CurvatureField(out, m)


def star(first: Connection, second: Connection) -> CurvatureField:
    """Symmetrized quadratic term; ``R = L(G) + star(G, G) / 2``.

    ``(a * b)[i,j,k,l] = a[i,n,l] b[j,k,n] + b[i,n,l] a[j,k,n]
    - a[j,n,l] b[i,k,n] - b[j,n,l] a[i,k,n]``.
    """
    if first.m != second.m:
        raise ValueError("dimension mismatch")
    m, a, b = first.m, first.gamma, second.gamma
    order = min(first.order, second.order)
    out = _zero_array((m,) * 4, m, order)
    for i, j in itertools.combinations(range(m), 2):
        for k, l in itertools.product(range(m), repeat=2):
            products = []
            for n in range(m):
                products += [(1, a[i, n, l], b[j, k, n]), (1, b[i, n, l], a[j, k, n]),
                             (-1, a[j, n, l], b[i, k, n]), (-1, b[j, n, l], a[i, k, n])]
            jet = accumulate(m, order, products=[(c, x, y) for c, x, y in products if x and y])
            out[i, j, k, l] = jet
            out[j, i, k, l] = -jet
    return CurvatureField(out, m)


def free_index(i: int, j: int, m: int) -> int:
    """Smallest index distinct from both ``i`` and ``j``."""
    for k in range(m):
        if k != i and k != j:
            return k
    raise ValueError(f"need m >= 3 for a free index, got m={m}")


def ricci_primitive(theta: BilinearField, order: int) -> Connection:
    """Trace-free ``G`` whose derivative part has Ricci tensor ``theta``.

    ``theta`` must be symmetric.  Each ``G[i, j, :]`` points along a single
    free direction ``k = free_index(i, j)`` and is the ray integral of
    ``theta[i, j]`` in ``z_k``, so ``G[i, j, j] = 0`` and
    ``sum_i d_i G[j, k, i] = theta[j, k]``.
    """
    m = theta.m
    if theta.entries.tolist() != theta.entries.T.tolist():
        raise ValueError("ricci_primitive needs a symmetric form")
    symbols = {}
    for i, j in itertools.combinations_with_replacement(range(m), 2):
        k = free_index(i, j, m)
        jet = theta[i, j].with_order(order).antider(k)
        if jet:
            symbols[i, j, k] = jet
    return Connection.from_symbols(m, order, symbols)


@dataclass
class RicciConstantResult:
    connection: Connection
    iterations: int
    residual_cleared_through: int
    gamma_layers: list[Connection]
    curvature: CurvatureField
    residual_degrees: list[int] = field(default_factory=list)
    accumulation_checked: int = 0


def realize_ricci_constant(A: CurvatureOp, order: int,
                           check_accumulation: bool = False) -> RicciConstantResult:
    """Connection with ``R(0) = A`` and Ricci tensor ``rho(A)`` through ``order - 1``.

    Starts from :func:`realize_linear` and repeatedly removes the lowest
    homogeneous part ``s_d`` of ``rho_s(R) - rho_s(A)`` by adding
    ``ricci_primitive(-s_d)``.  Corrections are trace-free, which keeps the
    antisymmetric Ricci part fixed at ``rho_a(A)``; each one raises the lowest
    residual degree, so at most ``order`` rounds are needed.

    With ``check_accumulation`` each step also rebuilds the curvature as
    ``R_prev + L(G_new) + (sum of layers) * G_new - (G_new * G_new)/2`` and
    compares it with the directly computed curvature.
    """
    if A.m < 3:
        raise ValueError("dimension must be at least 3")
    if order < 2:
        raise ValueError(f"order must be at least 2, got {order}")
    m = A.m
    target = BilinearField.constant(ricci(A).sym(), order - 1)
    total = realize_linear(A, order)
    layers = [total]
    R = curvature(total)
    degrees = []
    checked = 0
    while True:
        residual = ricci_field(R).sym() - target
        if residual.is_zero_through(order - 1):
            break
        low = residual.vanishes_through() + 1
        if degrees and low <= degrees[-1]:
            raise RuntimeError(f"residual degree did not increase ({degrees[-1]} -> {low})")
        if len(degrees) >= order:
            raise RuntimeError(f"no convergence after {order} corrections")
        degrees.append(low)
        correction = ricci_primitive(-residual.homogeneous_part(low), order)
        for (i, j, k), jet in correction.symbols():
            if i == k or j == k:
                raise RuntimeError("correction layer is not trace-free")
        new_total = total + correction
        R_next = curvature(new_total)
        if check_accumulation:
            rebuilt = R + linear_curvature(correction) + star(new_total, correction) \
                - star(correction, correction) / 2
            if rebuilt != R_next:
                raise RuntimeError(f"curvature accumulation mismatch at correction {len(degrees)}")
            checked += 1
        layers.append(correction)
        total, R = new_total, R_next
    return RicciConstantResult(total, len(degrees), order - 1, layers, R, degrees, checked)


# -- projectively flat realizations -------------------------------------------

def realize_projectively_flat(theta: BilinearForm, order: int) -> Connection:
    """Projectively flat connection ``G[i,j,k] = t_i d_jk + t_j d_ik`` with ``t_j = z_i Theta_ij``."""
    if theta.m < 3:
        raise ValueError("dimension must be at least 3")
    if order < 3:
        raise ValueError(f"order must be at least 3, got {order}")
    one_form = OneFormField.from_bilinear(theta, order)
    return projective_perturb(Connection.flat(theta.m, order), one_form)


class NotProjectivelyFlatError(ValueError):
    def __init__(self, weyl: CurvatureOp):
        idx, value = next(iter(weyl.nonzero().items()))
        where = ",".join(str(i + 1) for i in idx)
        super().__init__(f"Weyl projective component is nonzero: P(A)[{where}] = {value}")
        self.weyl = weyl
        self.index = idx
        self.value = value


def projectively_flat_potential(A: CurvatureOp) -> BilinearForm:
    """``Theta`` with ``H(Theta) = A`` for projectively flat ``A``."""
    weyl = weyl_project(A)
    if not weyl.is_zero():
        raise NotProjectivelyFlatError(weyl)
    m = A.m
    rho = ricci(A)
    theta = -(rho.sym() / (m - 1)) - rho.alt() / (m + 1)
    assert h_map(theta) == A
    return theta


def realize_projectively_flat_from_A(A: CurvatureOp, order: int) -> Connection:
    return realize_projectively_flat(projectively_flat_potential(A), order)


# -- flatness audit ---------------------------------------------------------------

FLAT = "flat-through-order"
OBSTRUCTION = "obstruction-witness"


@dataclass
class AuditReport:
    """Outcome of :func:`obstruction_audit`; every order is a total degree."""

    valid_order: int
    omega: BilinearField
    hypothesis_failures: list[tuple[str, Witness]]
    omega_vanishes_through: int
    curvature_vanishes_through: int
    reconstruction_witness: Witness | None = None
    nabla_omega_checked_through: int | None = None
    nabla_omega_vanishes_through: int | None = None
    nabla_omega_witness: Witness | None = None
    second_bianchi_vanishes_through: int | None = None
    quadratic_vanishes_through: int | None = None
    certified_order: int | None = None
    verdict: str | None = None

    @property
    def hypotheses_hold(self) -> bool:
        return not self.hypothesis_failures


def _quadratic_from_curvature(R: CurvatureField, omega: BilinearField) -> JetTensor:
    # Q[x,y,z,w] = omega(R(x,y)z, w) + omega(z, R(x,y)w)
    m = R.m
    order = min(R.valid_order, omega.valid_order)
    out = _zero_array((m,) * 4, m, order)
    for x, y, z, w in itertools.product(range(m), repeat=4):
        products = [(1, R[x, y, z, l], omega[l, w]) for l in range(m)]
        products += [(1, R[x, y, w, l], omega[z, l]) for l in range(m)]
        out[x, y, z, w] = accumulate(m, order, products=[p for p in products if p[1] and p[2]])
    return JetTensor(out, m)


def _quadratic_from_omega(omega: BilinearField) -> JetTensor:
    # 4 w(x,y) w(z,w) + 2 w(x,z) w(y,w) - 2 w(x,w) w(y,z)
    m, o = omega.m, omega.entries
    out = _zero_array((m,) * 4, m, omega.valid_order)
    for x, y, z, w in itertools.product(range(m), repeat=4):
        out[x, y, z, w] = accumulate(m, omega.valid_order, products=[
            (4, o[x, y], o[z, w]), (2, o[x, z], o[y, w]), (-2, o[x, w], o[y, z])])
    return JetTensor(out, m)


def obstruction_audit(nabla: Connection) -> AuditReport:
    """Check whether a projectively flat, Ricci antisymmetric connection is flat.

    Hypotheses are tested on every coefficient the curvature determines.  If
    either fails, the report carries the first failing coefficient and no
    verdict.  Otherwise ``omega = -rho/(m+1)`` is computed, the curvature is
    rebuilt from it, ``nabla omega`` is checked, and the quadratic identity
    ``omega(R(x,y)z,w) + omega(z,R(x,y)w) = 4w(x,y)w(z,w) + 2w(x,z)w(y,w) -
    2w(x,w)w(y,z)`` is evaluated.  If ``nabla omega`` vanishes through degree
    ``k``, the quadratic form vanishes through ``k - 1``, and since its
    diagonal is ``6 omega(x,y)^2``, ``omega`` (hence ``R``) vanishes through
    ``(k - 1) // 2``: that is the certified order.
    """
    m = nabla.m
    R = curvature(nabla)
    v = R.valid_order
    rho = ricci_field(R)
    omega = rho * (-1) / (m + 1)
    failures = []
    hit = weyl_project_field(R).first_nonzero()
    if hit is not None:
        failures.append(("projectively-flat", hit))
    hit = rho.sym().first_nonzero()
    if hit is not None:
        failures.append(("ricci-antisymmetric", hit))
    report = AuditReport(v, omega, failures, omega.vanishes_through(), R.vanishes_through())
    if failures:
        return report

    report.reconstruction_witness = (R - h_field(omega)).first_nonzero()
    nabla_omega = covariant_derivative_two_form(nabla, omega)
    k = nabla_omega.vanishes_through()
    report.nabla_omega_checked_through = nabla_omega.valid_order
    report.nabla_omega_vanishes_through = k
    report.nabla_omega_witness = nabla_omega.first_nonzero()
    report.second_bianchi_vanishes_through = second_bianchi_residual(nabla, R).vanishes_through()
    quad = _quadratic_from_curvature(R, omega)
    if quad != _quadratic_from_omega(omega):
        report.verdict = OBSTRUCTION
        return report
    report.quadratic_vanishes_through = quad.vanishes_through()
    certified = (k - 1) // 2
    report.certified_order = certified
    sound = (report.reconstruction_witness is None
             and report.omega_vanishes_through >= certified
             and report.curvature_vanishes_through >= certified)
    report.verdict = FLAT if sound else OBSTRUCTION
    return report
