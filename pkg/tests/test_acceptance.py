"""Acceptance suite: every check is exact, with zero tolerance.

Run ``pytest tests/test_acceptance.py`` and read the "acceptance criteria"
section at the end of the output; it prints one PASS/FAIL line per criterion.
"""

import json
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from curvforge import cli
from curvforge.algebra import (
    component_dimensions,
    decompose,
    h_map,
    random_bilinear,
    random_curvature,
    recompose,
    ricci,
    split_bilinear,
    weyl_project,
)
from curvforge.connection import (
    BilinearField,
    Connection,
    NotClosedError,
    curvature,
    d_one_form,
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
from curvforge.jets import Jet
from curvforge.realization import (
    FLAT,
    obstruction_audit,
    realize_linear,
    realize_projectively_flat,
    realize_ricci_constant,
)

DIMS = (3, 4, 5)
BATCH = 100
SMALL = 25
KIND_CODE = {"any": 0, "sym": 1, "alt": 2}
D = 6


def criterion(number, title):
    return pytest.mark.criterion(number, title)


def nonzero_bilinear(seed, m, kind="any"):
    theta = random_bilinear(seed, m, kind)
    assert not theta.is_zero()
    return theta


# -- shared builders (criterion 8 reuses every connection built here) ------------

@lru_cache(maxsize=None)
def linear_batch(m):
    out = []
    for n in range(BATCH):
        A = random_curvature([1, m, n], m)
        out.append((A, realize_linear(A, 4)))
    return out


@lru_cache(maxsize=None)
def ricci_constant_batch():
    out = []
    for n in range(SMALL):
        A = random_curvature([4, n], 3)
        out.append((A, realize_ricci_constant(A, D, check_accumulation=True)))
    return out


@lru_cache(maxsize=None)
def masked_linear_batch(side):
    mask = {"weyl", side}
    out = []
    for n in range(SMALL):
        A = random_curvature([5, KIND_CODE[side], n], 3, mask)
        out.append((A, realize_linear(A, D)))
    return out


@lru_cache(maxsize=None)
def projective_batch(kind):
    out = []
    for n in range(SMALL):
        theta = nonzero_bilinear([6, KIND_CODE[kind], n], 3, kind)
        out.append((theta, realize_projectively_flat(theta, D)))
    return out


@lru_cache(maxsize=None)
def perturbed_pairs():
    out = []
    for n in range(SMALL):
        nabla = random_connection([7, n], 3, 5)
        theta = random_one_form([7, n, 1], 3, 5)
        out.append((nabla, projective_perturb(nabla, theta)))
    return out


# -- criterion 1 ---------------------------------------------------------------

@criterion(1, "linear realizer round trip R(0) = A")
@pytest.mark.parametrize("m", DIMS)
def test_c1_linear_round_trip(m):
    for A, nabla in linear_batch(m):
        assert curvature(nabla).at_origin() == A


# -- criterion 2 ---------------------------------------------------------------

@criterion(2, "Ricci of H(Theta) is (1-m) Theta_s - (1+m) Theta_a")
@pytest.mark.parametrize("m", DIMS)
def test_c2_ricci_of_h(m):
    for n in range(BATCH):
        theta = random_bilinear([2, m, n], m)
        s, a = split_bilinear(theta)
        assert ricci(h_map(theta)) == s * (1 - m) - a * (1 + m)


# -- criterion 3 ---------------------------------------------------------------

@criterion(3, "decomposition identities and component dimensions")
@pytest.mark.parametrize("m", DIMS)
def test_c3_decomposition(m):
    for n in range(BATCH):
        A = random_curvature([3, m, n], m)
        P = weyl_project(A)
        assert weyl_project(P) == P
        assert ricci(P).is_zero()
        assert recompose(*decompose(A)) == A


@criterion(3, "decomposition identities and component dimensions")
def test_c3_dimensions():
    assert component_dimensions(3) == (15, 6, 3, 24)
    for m in (4, 5, 6):
        weyl, sym, alt, total = component_dimensions(m)
        assert weyl + sym + alt == total == m * m * (m * m - 1) // 3


# -- criterion 4 ---------------------------------------------------------------

@criterion(4, "constant-Ricci realization, m=3, D=6")
def test_c4_ricci_constant():
    for A, res in ricci_constant_batch():
        R = res.curvature
        rho = ricci_field(R)
        rho_A = ricci(A)
        assert R.at_origin() == A
        assert (rho.sym() - BilinearField.constant(rho_A.sym(), D - 1)).vanishes_through() == D - 1
        assert (rho.alt() - BilinearField.constant(rho_A.alt(), D - 1)).vanishes_through() == D - 1
        assert res.iterations <= 6
        for layer in res.gamma_layers[1:]:
            assert all(k not in (i, j) for (i, j, k), _ in layer.symbols())


# -- criterion 5 ---------------------------------------------------------------

@criterion(5, "closed trace form iff Ricci symmetric; volume potential; Tr = 2 d omega")
@pytest.mark.parametrize("side", ["sym", "alt"])
def test_c5_ricci_symmetry_chain(side):
    for A, nabla in masked_linear_batch(side):
        R = curvature(nabla)
        v = R.valid_order
        omega = trace_one_form(nabla)
        d_omega = d_one_form(omega)
        closed = d_omega.vanishes_through(v) >= v
        ricci_symmetric = ricci_field(R).alt().vanishes_through(v) >= v
        assert closed == ricci_symmetric == (side == "sym")
        # sum_ij Tr_ij dz_i ^ dz_j = 2 d(omega) as forms, i.e. Tr[i, j] = (d omega)[i, j]
        assert (trace_two_form(R) - d_omega).vanishes_through(v) >= v
        if side == "sym":
            phi = volume_potential(nabla)
            assert all(phi.partial(i) == omega[i].with_order(D - 1) for i in range(3))
        else:
            with pytest.raises(NotClosedError) as err:
                volume_potential(nabla)
            assert err.value.witness.value != 0


# -- criterion 6 ---------------------------------------------------------------

@criterion(6, "projectively flat realizer: P(R) = 0 and R(0) = H(Theta)")
@pytest.mark.parametrize("kind", ["any", "sym"])
def test_c6_projectively_flat(kind):
    for theta, nabla in projective_batch(kind):
        R = curvature(nabla)
        assert weyl_project_field(R).vanishes_through() == D - 1
        assert R.at_origin() == h_map(theta)
        if kind == "sym":
            assert ricci_field(R).alt().vanishes_through() == D - 1


# -- criterion 7 ---------------------------------------------------------------

@criterion(7, "Weyl field invariant under projective change")
def test_c7_projective_invariance():
    for nabla, perturbed in perturbed_pairs():
        before = weyl_project_field(curvature(nabla))
        after = weyl_project_field(curvature(perturbed))
        assert before.valid_order == after.valid_order
        assert (after - before).vanishes_through() == before.valid_order


# -- criterion 8 ---------------------------------------------------------------

def _all_connections():
    for m in DIMS:
        yield from (nabla for _, nabla in linear_batch(m))
    yield from (res.connection for _, res in ricci_constant_batch())
    for side in ("sym", "alt"):
        yield from (nabla for _, nabla in masked_linear_batch(side))
    for kind in ("any", "sym"):
        yield from (nabla for _, nabla in projective_batch(kind))
    for pair in perturbed_pairs():
        yield from pair


@criterion(8, "second Bianchi identity on every connection above")
def test_c8_second_bianchi():
    count = 0
    for nabla in _all_connections():
        residual = second_bianchi_residual(nabla)
        assert residual.vanishes_through() == residual.valid_order
        count += 1
    assert count == len(DIMS) * BATCH + SMALL + 2 * SMALL + 2 * SMALL + 2 * SMALL


# -- criterion 9 ---------------------------------------------------------------

@criterion(9, "antisymmetric Ricci obstruction and the realization table")
def test_c9_antisymmetric_theta_witness():
    for n in range(10):
        theta = nonzero_bilinear([9, n], 3, "alt")
        nabla = realize_projectively_flat(theta, D)
        hit = ricci_field(curvature(nabla)).sym().first_nonzero()
        assert hit is not None and hit.value != 0
        report = obstruction_audit(nabla)
        assert report.verdict is None
        assert [name for name, _ in report.hypothesis_failures] == ["ricci-antisymmetric"]


@criterion(9, "antisymmetric Ricci obstruction and the realization table")
def test_c9_flat_audit():
    assert obstruction_audit(Connection.flat(3, D)).verdict == FLAT


@criterion(9, "antisymmetric Ricci obstruction and the realization table")
@pytest.mark.parametrize("m", DIMS)
def test_c9_table(m, capsys):
    code = cli.main(["table", "--m", str(m), "--order", str(D)])
    report = json.loads(capsys.readouterr().out)
    assert code == 0
    rows = report["rows"]
    assert [r["expected"] for r in rows] == [expected for _, expected in cli.TABLE_ROWS]
    results = [r["result"] for r in rows]
    assert results.count("yes") == 7 and results.count("obstructed") == 1
    assert [r["components"] for r in rows if r["result"] == "obstructed"] == [
        {"weyl": "0", "sym": "0", "alt": "*"}]
    assert all(r["matches_expected"] for r in rows)


# -- criterion 10 ----------------------------------------------------------------

@st.composite
def jets(draw, m=3, order=D):
    terms = {}
    for _ in range(draw(st.integers(0, 6))):
        exps = tuple(draw(st.lists(st.integers(0, order), min_size=m, max_size=m)))
        if sum(exps) <= order:
            terms[exps] = draw(st.integers(-9, 9))
    return Jet(m, order, terms)


@criterion(10, "jet engine laws and curvature accumulation")
@settings(max_examples=100, deadline=None)
@given(jets(order=D - 1), st.integers(0, 2))
def test_c10_partial_antider(a, k):
    assert a.with_order(D).antider(k).partial(k) == a


@criterion(10, "jet engine laws and curvature accumulation")
@settings(max_examples=100, deadline=None)
@given(jets(), jets(), st.integers(0, D), st.integers(0, D))
def test_c10_graded_product(a, b, d1, d2):
    prod = a.homogeneous_part(d1) * b.homogeneous_part(d2)
    assert all(sum(e) == d1 + d2 for e, _ in prod.items())
    if d1 + d2 <= D:
        full = (a * b).homogeneous_part(d1 + d2)
        assert full == sum((a.homogeneous_part(i) * b.homogeneous_part(d1 + d2 - i)
                            for i in range(d1 + d2 + 1)), Jet.zero(3, D))


@criterion(10, "jet engine laws and curvature accumulation")
def test_c10_accumulation():
    for _, res in ricci_constant_batch():
        assert res.accumulation_checked == res.iterations
    assert sum(res.iterations for _, res in ricci_constant_batch()) > 0
