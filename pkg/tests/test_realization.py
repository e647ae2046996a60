import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvforge.algebra import BilinearForm, CurvatureOp, h_map, random_bilinear, random_curvature, ricci
from curvforge.connection import (
    BilinearField,
    Connection,
    OneFormField,
    curvature,
    projective_perturb,
    random_connection,
    ricci_field,
    second_bianchi_residual,
    weyl_project_field,
)
from curvforge.jets import Jet
from curvforge.realization import (
    FLAT,
    NotProjectivelyFlatError,
    free_index,
    linear_curvature,
    obstruction_audit,
    projectively_flat_potential,
    realize_linear,
    realize_projectively_flat,
    realize_projectively_flat_from_A,
    realize_ricci_constant,
    ricci_primitive,
    star,
)

M, D = 3, 6


def sym_field(seed, m=M, order=D, degree=2):
    """Seeded symmetric field, homogeneous of the given degree."""
    g = random_connection(seed, m, order, max_degree=degree, terms=2, density=1.0)
    entries = [[g.gamma[i, j, 0].homogeneous_part(degree) + g.gamma[j, i, 0].homogeneous_part(degree)
                for j in range(m)] for i in range(m)]
    return BilinearField(np.array(entries, dtype=object), m)


class TestRealizeLinear:
    def test_zero(self):
        assert realize_linear(CurvatureOp.zero(M), D) == Connection.flat(M, D)

    @pytest.mark.parametrize("m", [3, 4])
    def test_round_trip(self, m):
        A = random_curvature(m + 20, m)
        assert curvature(realize_linear(A, 4)).at_origin() == A

    def test_symbols_are_linear(self):
        nabla = realize_linear(random_curvature(1, M), D)
        assert all(jet.homogeneous_part(1) == jet for _, jet in nabla.symbols())

    def test_linear_part_is_constant_A(self):
        A = random_curvature(1, M)
        L = linear_curvature(realize_linear(A, D))
        assert L.at_origin() == A
        assert L == L.homogeneous_part(0)

    def test_order_too_small(self):
        with pytest.raises(ValueError):
            realize_linear(CurvatureOp.zero(M), 1)


class TestStar:
    @pytest.mark.parametrize("seed", range(3))
    def test_curvature_split(self, seed):
        nabla = random_connection(seed, M, 4)
        assert curvature(nabla) == linear_curvature(nabla) + star(nabla, nabla) / 2

    def test_symmetric_and_bilinear(self):
        a, b = random_connection(1, M, 4), random_connection(2, M, 4)
        assert star(a, b) == star(b, a)
        assert star(a + a, b) == star(a, b) * 2

    def test_free_index(self):
        assert [free_index(i, j, 3) for i, j in [(0, 0), (0, 1), (1, 2), (0, 2)]] == [1, 2, 0, 1]
        with pytest.raises(ValueError):
            free_index(0, 1, 2)


class TestRicciPrimitive:
    @pytest.mark.parametrize("seed", range(4))
    def test_contract(self, seed):
        theta = sym_field(seed)
        G = ricci_primitive(theta, D)
        rho = ricci_field(linear_curvature(G))
        for j, k in itertools.product(range(M), repeat=2):
            assert rho[j, k] == theta[j, k].with_order(D - 1)

    def test_trace_free(self):
        G = ricci_primitive(sym_field(3), D)
        for (i, j, k), _ in G.symbols():
            assert k not in (i, j)

    def test_raises_degree(self):
        theta = sym_field(5, degree=2)
        G = ricci_primitive(theta, D)
        assert all(jet.lowest_degree() == 3 for _, jet in G.symbols())

    def test_rejects_asymmetric(self):
        theta = BilinearField.constant(BilinearForm.unit(M, 0, 1), D)
        with pytest.raises(ValueError):
            ricci_primitive(theta, D)


class TestRicciConstant:
    def test_zero(self):
        res = realize_ricci_constant(CurvatureOp.zero(M), D)
        assert res.connection == Connection.flat(M, D)
        assert res.iterations == 0

    @pytest.mark.parametrize("seed", range(3))
    def test_random_full(self, seed):
        A = random_curvature(seed, M)
        res = realize_ricci_constant(A, D, check_accumulation=True)
        R = res.curvature
        assert R.at_origin() == A
        rho = ricci_field(R)
        target = BilinearField.constant(ricci(A), D - 1)
        assert (rho - target).vanishes_through() == D - 1
        assert res.iterations <= D
        assert res.accumulation_checked == res.iterations
        assert res.residual_degrees == sorted(set(res.residual_degrees))
        for layer in res.gamma_layers[1:]:
            assert all(k not in (i, j) for (i, j, k), _ in layer.symbols())

    def test_weyl_only_needs_no_correction_at_degree_zero(self):
        A = random_curvature(4, M, {"weyl"})
        res = realize_ricci_constant(A, D)
        assert ricci_field(res.curvature).vanishes_through() == D - 1
        assert all(d >= 1 for d in res.residual_degrees)

    def test_m4(self):
        A = random_curvature(2, 4)
        res = realize_ricci_constant(A, 4)
        target = BilinearField.constant(ricci(A), 3)
        assert (ricci_field(res.curvature) - target).vanishes_through() == 3

    def test_second_bianchi(self):
        res = realize_ricci_constant(random_curvature(7, M), D)
        residual = second_bianchi_residual(res.connection, res.curvature)
        assert residual.vanishes_through() == residual.valid_order


class TestProjectivelyFlat:
    def test_zero(self):
        assert realize_projectively_flat(BilinearForm.zero(M), D) == Connection.flat(M, D)

    def test_e1e1(self):
        theta = BilinearForm.unit(M, 0, 0)
        nabla = realize_projectively_flat(theta, D)
        R = curvature(nabla)
        assert R.at_origin() == h_map(theta)
        assert weyl_project_field(R).vanishes_through() == D - 1
        assert ricci_field(R).alt().vanishes_through() == D - 1

    def test_antisymmetric_theta_breaks_ricci_antisymmetry(self):
        theta = BilinearForm.unit(M, 0, 1) - BilinearForm.unit(M, 1, 0)
        R = curvature(realize_projectively_flat(theta, D))
        assert R.at_origin() == h_map(theta)
        hit = ricci_field(R).sym().first_nonzero()
        assert hit is not None and hit.degree > 0

    def test_matches_perturbation_definition(self):
        theta = random_bilinear(3, M)
        expected = projective_perturb(Connection.flat(M, D), OneFormField.from_bilinear(theta, D))
        assert realize_projectively_flat(theta, D) == expected

    def test_from_A(self):
        theta0 = random_bilinear(8, M)
        A = h_map(theta0)
        assert h_map(projectively_flat_potential(A)) == A
        assert curvature(realize_projectively_flat_from_A(A, D)).at_origin() == A
        assert realize_projectively_flat_from_A(CurvatureOp.zero(M), D) == Connection.flat(M, D)

    def test_from_A_rejects_weyl(self):
        A = random_curvature(1, M)
        with pytest.raises(NotProjectivelyFlatError) as err:
            realize_projectively_flat_from_A(A, D)
        assert err.value.value != 0
        assert err.value.weyl[err.value.index] == err.value.value

    def test_order_too_small(self):
        with pytest.raises(ValueError):
            realize_projectively_flat(BilinearForm.zero(M), 2)


class TestAudit:
    def test_flat(self):
        report = obstruction_audit(Connection.flat(M, D))
        assert report.hypotheses_hold
        assert report.verdict == FLAT
        assert report.omega_vanishes_through == D - 1
        assert report.certified_order == (report.nabla_omega_vanishes_through - 1) // 2

    def test_antisymmetric_projective_fails_hypothesis(self):
        theta = random_bilinear(2, M, "alt")
        report = obstruction_audit(realize_projectively_flat(theta, D))
        assert report.verdict is None
        names = [name for name, _ in report.hypothesis_failures]
        assert names == ["ricci-antisymmetric"]
        witness = report.hypothesis_failures[0][1]
        assert witness.degree > 0 and witness.value != 0

    def test_symmetric_perturbation_fails_hypothesis(self):
        # exact theta = d(z1^2 / 2 + z2 z3): the perturbed flat connection is Ricci symmetric
        z = [Jet.var(M, D, i) for i in range(M)]
        form = OneFormField(np.array([z[0], z[2], z[1]], dtype=object))
        nabla = projective_perturb(Connection.flat(M, D), form)
        assert ricci_field(curvature(nabla)).alt().vanishes_through() == D - 1
        report = obstruction_audit(nabla)
        assert report.verdict is None
        assert "ricci-antisymmetric" in [name for name, _ in report.hypothesis_failures]

    def test_weyl_connection_fails_projective_flatness(self):
        report = obstruction_audit(realize_linear(random_curvature(1, M, {"weyl"}), D))
        assert [name for name, _ in report.hypothesis_failures][0] == "projectively-flat"


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000))
def test_projective_realizer_properties(seed):
    theta = random_bilinear(seed, M)
    R = curvature(realize_projectively_flat(theta, 4))
    assert R.at_origin() == h_map(theta)
    assert weyl_project_field(R).vanishes_through() == R.valid_order
