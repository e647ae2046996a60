"""Exact realization of curvature operators by torsion-free connections.

Curvature operators are dense rational tensors; connections carry truncated
polynomial (jet) Christoffel symbols.  All arithmetic is exact.
"""

from .algebra import (
    BilinearForm,
    CurvatureOp,
    CurvatureViolation,
    Decomposition,
    bianchi_project,
    component_dimensions,
    decompose,
    h_map,
    random_bilinear,
    random_curvature,
    recompose,
    ricci,
    split_bilinear,
    trace_form,
    validate_curvature,
    weyl_project,
)
from .connection import (
    BilinearField,
    Connection,
    CurvatureField,
    NotClosedError,
    OneFormField,
    TwoFormField,
    Witness,
    covariant_derivative_curvature,
    covariant_derivative_two_form,
    curvature,
    d_one_form,
    h_field,
    projective_perturb,
    random_connection,
    random_one_form,
    ricci_field,
    second_bianchi_residual,
    trace_one_form,
    trace_two_form,
    volume_potential,
    weyl_project_field,
)
from .jets import Jet
from .rational import Q, format_rational, parse_rational
from .realization import (
    AuditReport,
    NotProjectivelyFlatError,
    RicciConstantResult,
    obstruction_audit,
    projectively_flat_potential,
    realize_linear,
    realize_projectively_flat,
    realize_projectively_flat_from_A,
    realize_ricci_constant,
    ricci_primitive,
)

__version__ = "0.1.0"
