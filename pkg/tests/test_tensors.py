from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _models import arrays
from skewtorsion.tensors import (
    Fiber,
    alternate,
    antisymmetry_residual,
    as_float,
    cyclic_sum,
    cyclic_sum_array,
    endo_action,
    exact,
    exact_sqrt,
    independent_columns,
    interior_product,
    inv,
    max_abs,
    pullback,
    restrict,
    sqrt,
    wedge,
    wedge_all,
)

DIM = 5


def form(k, data):
    return alternate(data) / np.math.factorial(k) if k > 1 else data


one_forms = arrays((DIM,))
two_forms = arrays((DIM, DIM)).map(lambda a: a - a.T)
vectors = arrays((DIM,))


@given(one_forms, two_forms)
def test_wedge_graded_commutative(a, b):
    assert max_abs(wedge(a, b) - wedge(b, a)) < 1e-12
    assert max_abs(wedge(a, a)) < 1e-12


@given(one_forms, one_forms, one_forms)
def test_wedge_associative(a, b, c):
    assert max_abs(wedge(wedge(a, b), c) - wedge(a, wedge(b, c))) < 1e-12


@given(one_forms, two_forms)
def test_wedge_result_alternating(a, b):
    assert antisymmetry_residual(wedge(a, b)) < 1e-12


def test_wedge_one_two_explicit():
    a = np.array([1.0, 0, 0])
    b = np.zeros((3, 3))
    b[1, 2], b[2, 1] = 1.0, -1.0
    w = wedge(a, b)
    assert w[0, 1, 2] == 1.0 and w[1, 2, 0] == 1.0 and w[1, 0, 2] == -1.0


@given(vectors, one_forms, two_forms)
def test_interior_product_is_antiderivation(v, a, b):
    lhs = interior_product(v, wedge(a, b))
    rhs = interior_product(v, a) * b - wedge(a, interior_product(v, b))
    assert max_abs(lhs - rhs) < 1e-10


@given(arrays((DIM, DIM)), arrays((DIM, DIM)), two_forms)
def test_endo_action_is_lie_algebra_action(a, b, s):
    lhs = endo_action(a @ b - b @ a, s)
    rhs = endo_action(a, endo_action(b, s)) - endo_action(b, endo_action(a, s))
    assert max_abs(lhs - rhs) < 1e-9


@given(arrays((DIM, DIM)), arrays((DIM, DIM)))
def test_endo_action_on_endomorphism_is_commutator(a, s):
    assert max_abs(endo_action(a, s, contra=1) - (a @ s - s @ a)) < 1e-10


@given(arrays((DIM, DIM)), one_forms, two_forms)
def test_endo_action_is_derivation_of_wedge(a, x, y):
    lhs = endo_action(a, wedge(x, y))
    rhs = wedge(endo_action(a, x), y) + wedge(x, endo_action(a, y))
    assert max_abs(lhs - rhs) < 1e-9


@given(arrays((DIM, DIM, DIM)))
def test_cyclic_sum_array_matches_callable(t):
    f = cyclic_sum(lambda x, y, z: t[x, y, z])
    arr = cyclic_sum_array(t)
    assert all(abs(arr[x, y, z] - f(x, y, z)) < 1e-12 for x in range(DIM) for y in range(DIM) for z in range(DIM))


@given(arrays((3, 3, 3)), arrays((3, 2)), arrays((3, 2)), arrays((3, 2)))
def test_restrict_matches_einsum(t, a, b, c):
    assert max_abs(restrict(t, a, b, c) - np.einsum("abc,ax,by,cz->xyz", t, a, b, c)) < 1e-10


well_conditioned = arrays((4, 2)).filter(lambda b: np.linalg.cond(b) < 1e3)


@given(arrays((4, 4)).map(lambda m: m @ m.T + np.eye(4)), well_conditioned)
def test_projector_idempotent_and_self_adjoint(g, basis):
    fib = Fiber(g)
    p = fib.projector(basis)
    assert max_abs(p @ p - p) < 1e-8
    assert max_abs(g @ p - (g @ p).T) < 1e-8
    comp = fib.complement(basis)
    assert comp.shape[1] == 2
    assert max_abs(basis.T @ g @ comp) < 1e-8


def test_fiber_rejects_bad_metrics():
    with pytest.raises(ValueError, match="symmetric"):
        Fiber(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="positive definite"):
        Fiber(np.diag([1.0, -1.0]))


@given(st.lists(st.integers(-5, 5), min_size=9, max_size=9))
def test_exact_inverse(entries):
    m = exact(np.array(entries).reshape(3, 3))
    if np.linalg.matrix_rank(as_float(m)) < 3:
        with pytest.raises(np.linalg.LinAlgError):
            inv(m)
        return
    assert np.all(m @ inv(m) == exact(np.eye(3)))


def test_exact_and_float_wedge_agree():
    a = np.array([1.0, 2.0, -1.0])
    b = np.array([[0.0, 1.0, 3.0], [-1.0, 0.0, 0.5], [-3.0, -0.5, 0.0]])
    w = wedge(exact(a), exact(b))
    assert isinstance(w[0, 1, 2], Fraction)
    assert max_abs(as_float(w) - wedge(a, b)) == 0


def test_degree_errors():
    a = np.ones(2)
    with pytest.raises(ValueError, match="exceeds dimension"):
        wedge(a, np.array([[0.0, 1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError, match="0-form"):
        interior_product(a, np.float64(1.0))


def test_wedge_all_top_form_on_r3():
    e = np.eye(3)
    vol = wedge_all(e[0], e[1], e[2])
    assert vol[0, 1, 2] == 1 and vol[2, 1, 0] == -1


def test_sqrt_modes():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(2)) is None
    assert sqrt(Fraction(1, 4), True) == Fraction(1, 2)
    assert abs(sqrt(2, True) - 2 ** 0.5) < 1e-15


def test_pullback_and_independent_columns():
    t = np.arange(27.0).reshape(3, 3, 3)
    assert max_abs(pullback(t, np.eye(3)) - t) == 0
    v = np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
    assert independent_columns(v) == [0, 2]


def test_complement_is_well_conditioned_for_nearly_coordinate_vertical():
    # a vertical direction tilted by 3e-8 off a coordinate axis must not yield a near-null horizontal column
    fib = Fiber(np.diag([0.25, 0.25, 0.25, 0.5, 0.5, 0.5, 0.5]))
    v = np.zeros((7, 1))
    v[1, 0], v[2, 0] = 1.0, 3e-8
    h = fib.complement(v)
    assert h.shape == (7, 6)
    assert np.linalg.cond(h) < 10
    assert max_abs(v.T @ fib.metric @ h) < 1e-15
