import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _models import GRID, arrays, s3, s7, s7_conn
from skewtorsion.catalog import broken_jacobi, product_s3xs3, su2_model
from skewtorsion.homogeneous import (
    LieModel,
    bianchi_check,
    bianchi_residual,
    canonical_homogeneous,
    check_invariant_splitting,
    curvature,
    curvature_tensor,
    d_invariant,
    holonomy_algebra,
    levi_civita,
    lie_derivative,
    validate_model,
    with_torsion,
)
from skewtorsion.quaternion import sp2_basis, sp2_structure_constants
from skewtorsion.sasaki import EVEN
from skewtorsion.tensors import as_float, max_abs, wedge

# quaternion units as 2x2 complex matrices, independent of the Hamilton table
Q = [np.eye(2, dtype=complex), np.array([[1j, 0], [0, -1j]]), np.array([[0, 1], [-1, 0]], dtype=complex),
     np.array([[0, 1j], [1j, 0]])]


def complex_sp2(x):
    """(2, 2, 4) quaternionic matrix -> 4x4 complex matrix."""
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = sum(x[i, j, a] * Q[a] for a in range(4))
    return out


def test_sp2_structure_constants_match_complex_representation():
    basis, _ = sp2_basis()
    mats = [complex_sp2(b) for b in basis]
    flat = np.array([m.ravel() for m in mats]).T
    c = sp2_structure_constants()
    for i in range(10):
        for j in range(10):
            br = mats[i] @ mats[j] - mats[j] @ mats[i]
            coef = np.linalg.lstsq(flat, br.ravel(), rcond=None)[0]
            assert max_abs(coef.real - c[i, j]) < 1e-12 and max_abs(coef.imag) < 1e-12


@pytest.mark.parametrize("exact", [False, True])
def test_catalog_models_validate(exact):
    for model in (s7(1, 2, exact).model, s3(1, 2, exact).model, product_s3xs3(exact)):
        assert validate_model(model).passed


def test_broken_jacobi_fails_named_check():
    rep = validate_model(broken_jacobi())
    assert [c.name for c in rep.failures] == ["jacobi identity"]


def test_non_invariant_metric_fails_validation():
    m = s7(1, 2).model
    g = m.metric.copy()
    g[3, 3] = 2 * g[3, 3]
    rep = validate_model(LieModel(m.structure, m.isotropy, m.complement, g, m.labels))
    assert "metric ad(h)-invariant" in [c.name for c in rep.failures]


def test_levi_civita_of_bi_invariant_metric_is_half_ad():
    model = su2_model(1)
    lc = levi_civita(model)
    for a in range(3):
        assert max_abs(lc.Lambda[a] - model.ad_m(np.eye(3)[a]) / 2) < 1e-15


@pytest.mark.parametrize("ad", GRID)
def test_levi_civita_torsion_free_and_metric(ad):
    lc = levi_civita(s7(*ad).model)
    assert max_abs(lc.torsion) < 1e-14
    assert lc.skew_residual() < 1e-14


def sectional(conn, x, y):
    g = as_float(conn.model.metric)
    r = as_float(curvature(conn))
    rxy = np.einsum("a,b,abij->ij", x, y, r)
    return (x @ g @ rxy @ y) / ((x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2)


@given(arrays((7,)), arrays((7,)))
def test_round_s7_has_unit_sectional_curvature(x, y):
    # (alpha, delta) = (1, 1) is the round unit sphere
    conn = levi_civita(s7(1, 1).model)
    g = as_float(conn.model.metric)
    if (x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2 < 1e-3:
        return
    assert abs(sectional(conn, x, y) - 1.0) < 1e-10


def test_round_s3_sectional_curvature():
    conn = levi_civita(su2_model(1))
    assert abs(sectional(conn, np.eye(3)[0], np.eye(3)[1]) - 1.0) < 1e-14


@pytest.mark.parametrize("ad", GRID)
def test_curvature_skew_in_both_pairs(ad):
    conn = s7_conn(*ad)
    r4 = curvature_tensor(conn)
    assert max_abs(r4 + np.transpose(r4, (1, 0, 2, 3))) < 1e-12
    assert max_abs(r4 + np.transpose(r4, (0, 1, 3, 2))) < 1e-12


@given(arrays((3,)), arrays((3, 3)).map(lambda a: a - a.T))
def test_d_squared_vanishes_on_su2(a1, a2):
    model = su2_model(1)
    assert max_abs(d_invariant(model, d_invariant(model, a1))) < 1e-12
    assert max_abs(d_invariant(model, d_invariant(model, a2))) < 1e-12


@given(arrays((6,)))
def test_d_squared_vanishes_on_product(a):
    model = product_s3xs3()
    assert max_abs(d_invariant(model, d_invariant(model, a))) < 1e-12


def test_d_squared_on_invariant_forms_exact():
    t = s7(1, 2, True).triple
    for i in range(3):
        assert max_abs(d_invariant(t.model, d_invariant(t.model, t.eta[i]))) == 0
        assert max_abs(d_invariant(t.model, d_invariant(t.model, t.Phi[i]))) == 0


def test_d_rejects_non_invariant_form():
    model = s7(1, 2).model
    with pytest.raises(ValueError, match="not isotropy-invariant"):
        d_invariant(model, np.eye(7)[3])


def test_d_is_antiderivation_on_invariant_forms():
    t = s7(1, 2).triple
    m = t.model
    for i, j, _ in EVEN:
        lhs = d_invariant(m, wedge(t.eta[i], t.eta[j]))
        rhs = wedge(d_invariant(m, t.eta[i]), t.eta[j]) - wedge(t.eta[i], d_invariant(m, t.eta[j]))
        assert max_abs(lhs - rhs) < 1e-12


@pytest.mark.parametrize("ad", GRID)
@pytest.mark.parametrize("family", ["s7", "s3"])
def test_lie_derivative_identities(ad, family):
    entry = (s7 if family == "s7" else s3)(*ad, exact=True)
    t = entry.triple
    d = t.delta
    for i, j, k in EVEN:
        xi = t.xi
        assert max_abs(lie_derivative(t.model, xi[i], t.phi[j], 1) - 2 * d * t.phi[k]) == 0
        assert max_abs(lie_derivative(t.model, xi[j], t.phi[i], 1) + 2 * d * t.phi[k]) == 0
        assert max_abs(lie_derivative(t.model, xi[i], xi[j], 1) - 2 * d * xi[k]) == 0
        assert max_abs(lie_derivative(t.model, xi[i], t.phi[i], 1)) == 0
        assert max_abs(lie_derivative(t.model, xi[i], t.model.metric)) == 0


def test_bianchi_with_tampered_torsion_detected():
    conn = s7_conn(1, 2)
    assert max_abs(bianchi_residual(conn)) < 1e-10
    tampered = with_torsion(levi_civita(conn.model), 1.01 * conn.torsion)
    assert max_abs(bianchi_residual(tampered)) > 1e-4
    assert not bianchi_check(tampered).passed


def test_canonical_homogeneous_on_bi_invariant_group():
    conn = canonical_homogeneous(su2_model(1))
    assert bianchi_check(conn).passed
    assert max_abs(conn.torsion + su2_model(1).bracket_m @ np.eye(3)) < 1e-15


@pytest.mark.parametrize("ad", [(1, 1), (1, 2)])
def test_holonomy_contains_curvature_and_is_closed(ad):
    conn = s7_conn(*ad)
    hol = holonomy_algebra(conn)
    flat = np.array([h.ravel() for h in hol]).T

    def in_span(m):
        coef = np.linalg.lstsq(flat, m.ravel(), rcond=None)[0]
        return max_abs(flat @ coef - m.ravel()) < 1e-9

    r = as_float(curvature(conn))
    assert all(in_span(r[a, b]) for a in range(7) for b in range(7))
    assert all(in_span(a @ b - b @ a) for a in hol for b in hol)


def test_holonomy_dimension_jumps_at_parallel_relation():
    assert len(holonomy_algebra(s7_conn(1, 2))) == 3
    assert len(holonomy_algebra(s7_conn(1, 1))) == 6


def test_invariant_splitting_gate():
    conn = s7_conn(1, 2)
    t = s7(1, 2).triple
    xi1 = t.xi[0][:, None]
    comp = conn.model.fiber.complement(xi1)
    assert check_invariant_splitting(conn, [xi1, comp]).passed
    conn11 = s7_conn(1, 1)
    assert not check_invariant_splitting(conn11, [xi1, comp]).passed
    with pytest.raises(ValueError, match="span"):
        check_invariant_splitting(conn, [xi1])
    with pytest.raises(ValueError, match="orthogonal"):
        check_invariant_splitting(conn, [xi1, np.eye(7)[:, [0, 1, 2, 3, 4, 5]] + 0.5])


@given(st.integers(0, 6), st.integers(0, 6))
def test_exact_and_float_curvature_agree(a, b):
    r_exact = curvature(s7_conn(1, 2, True))[a, b]
    r_float = curvature(s7_conn(1, 2))[a, b]
    assert max_abs(as_float(r_exact) - r_float) < 1e-14
