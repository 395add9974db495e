import numpy as np
import pytest
from hypothesis import given, settings

from _models import GRID, arrays, cp3, s3, s7, s7_conn
from skewtorsion.catalog import product_s3xs3
from skewtorsion.homogeneous import canonical_homogeneous, levi_civita, with_torsion
from skewtorsion.report import RefusedError
from skewtorsion.submersion import (
    SubmersionSpec,
    basic_derivative,
    build_quotient,
    check_base_reducibility,
    check_fiber_geometry,
    check_nablavert,
    check_product_splitting,
    check_projecttau,
    check_torsion_in_torsion,
    horizontal_of,
)
from skewtorsion.sasaki import canonical_connection
from skewtorsion.tensors import max_abs, restrict, wedge_all


def xi1(alpha=1, delta=2):
    return s7(alpha, delta).triple.xi[0][:, None]


@pytest.mark.parametrize("ad", GRID)
def test_hypotheses_hold_for_reeb_span(ad):
    t = s7(*ad).triple
    conn = s7_conn(*ad)
    for f in (check_projecttau, check_torsion_in_torsion, check_fiber_geometry, check_nablavert):
        assert f(conn, t.vertical).passed, f.__name__


def test_hypotheses_hold_for_single_reeb_field_when_parallel():
    conn = s7_conn(1, 2)
    for f in (check_projecttau, check_torsion_in_torsion, check_fiber_geometry, check_nablavert):
        assert f(conn, xi1()).passed, f.__name__


def test_projecttau_detects_vertical_vertical_horizontal_component():
    t = s7(1, 2).triple
    conn = s7_conn(1, 2)
    x_flat = t.model.metric[:, 3]  # F1 is horizontal
    tampered = conn.torsion + wedge_all(t.eta[0], t.eta[1], x_flat)
    bad = with_torsion(levi_civita(t.model), tampered)
    rep = check_projecttau(bad, t.vertical)
    assert not rep.passed
    assert rep["T(V, W, X) = 0"].residual > 0.1


@settings(max_examples=25)
@given(arrays((7, 2)))
def test_generic_plane_is_not_totally_geodesic(cols):
    # a random 2-plane in m mixing Reeb and horizontal directions has nonzero second fundamental form
    model = s7(1, 2).model
    if np.linalg.matrix_rank(cols) < 2 or np.min(np.abs(cols[3:])) < 0.2:
        return
    rep = check_fiber_geometry(s7_conn(1, 2), cols)
    assert rep["(a) nabla^g_V W in V"].residual > 1e-6
    assert model.dm == 7


@pytest.mark.parametrize("alpha", [1, 0.5])
def test_vertical_derivative_of_basic_fields(alpha):
    # along xi_1 the only torsion component touching H x H is 2 alpha Phi_1
    t = s7(alpha, 2 * alpha).triple
    conn = s7_conn(alpha, 2 * alpha)
    h = horizontal_of(t.model, t.vertical)
    n = basic_derivative(conn, t.vertical)
    assert max_abs(n[0] - 2 * alpha * restrict(t.Phi[0], h, h)) < 1e-12
    assert max_abs(n[1] - 2 * alpha * restrict(t.Phi[1], h, h)) < 1e-12


def test_quotient_dimensions():
    conn = s7_conn(1, 2)
    t = s7(1, 2).triple
    q1 = build_quotient(SubmersionSpec(conn, t.xi[0]))
    assert (q1.base.dh, q1.base.dm) == (4, 6)
    q3 = build_quotient(SubmersionSpec(conn, t.vertical))
    assert (q3.base.dh, q3.base.dm) == (6, 4)
    assert q1.report.passed and q3.report.passed


def test_quotient_of_s3_is_two_sphere():
    t = s3(1, 2).triple
    q = build_quotient(SubmersionSpec(canonical_connection(t), t.xi[0]))
    assert q.base.dm == 2
    assert max_abs(q.torsion) == 0


def test_quotient_refuses_non_invariant_vertical():
    conn = s7_conn(1, 2)
    bad = np.zeros(7)
    bad[0], bad[3] = 1.0, 1.0
    with pytest.raises(RefusedError) as err:
        build_quotient(SubmersionSpec(conn, bad))
    assert err.value.gate == "submersion hypotheses"


def test_base_reducibility_of_twistor_split():
    res = cp3(1)
    rep = check_base_reducibility(res.quotient, res.vertical, res.horizontal)
    assert rep.passed


def test_single_reeb_direction_is_not_projectable():
    res = cp3(1)
    h1 = res.vertical[:, :1]
    rest = res.base.fiber.complement(h1)
    with pytest.raises(RefusedError) as err:
        check_base_reducibility(res.quotient, h1, rest)
    assert err.value.gate == "projectability"


def test_product_splitting():
    model = product_s3xs3()
    conn = canonical_homogeneous(model)
    first = np.eye(6)[:, :3]
    rep = check_product_splitting(conn, first, np.eye(6)[:, 3:])
    assert rep.passed
    assert max_abs(conn.torsion) > 0


def test_sphere_torsion_is_not_decomposable():
    t = s7(1, 2).triple
    rep = check_product_splitting(s7_conn(1, 2), t.vertical, t.horizontal)
    assert not rep.passed


def test_exact_quotient_residuals_vanish():
    t = s7(1, 2, exact=True).triple
    q = build_quotient(SubmersionSpec(s7_conn(1, 2, True), t.vertical))
    assert all(c.residual == 0 for c in q.report.checks)


def test_quotient_torsion_is_restriction():
    t = s7(1, 2).triple
    conn = s7_conn(1, 2)
    q = build_quotient(SubmersionSpec(conn, t.xi[0]))
    assert max_abs(q.torsion - restrict(conn.torsion, q.lift, q.lift, q.lift)) == 0
    assert max_abs(q.base.metric - q.lift.T @ t.model.metric @ q.lift) == 0
