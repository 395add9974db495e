"""Canonical submersions: hypothesis checks and quotient models.

A quotient along a vertical subspace V of m is realized by enlarging the
isotropy algebra to h' = h + span(zeta_a), where the caller supplies lifts
zeta_a in g whose m-parts span V.  The base is the reductive model
g = h' + m' with m' the g-orthogonal complement of V in m.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .homogeneous import (
    LieModel,
    NomizuConnection,
    check_invariant_splitting,
    holonomy_algebra,
    levi_civita,
    lie_derivative,
    nabla_all,
    torsion_endomorphisms,
    validate_model,
    with_torsion,
)
from .report import RefusedError, VerificationReport
from .tensors import (
    cyclic_sum_array,
    eye,
    inv,
    is_exact,
    lstsq_residual,
    max_abs,
    pullback,
    restrict,
    zeros,
)


def _mode(model: LieModel) -> str:
    return "rational" if model.exact else "float"


def _as_columns(vertical: np.ndarray) -> np.ndarray:
    v = np.asarray(vertical)
    return v[:, None] if v.ndim == 1 else v


def horizontal_of(model: LieModel, vertical: np.ndarray) -> np.ndarray:
    return model.fiber.complement(_as_columns(vertical))


def horizontal_torsion(conn: NomizuConnection, vertical: np.ndarray) -> np.ndarray:
    """T^H = T(P_H ., P_H ., P_H .) as a 3-form on m."""
    ph = eye(conn.model.dm, conn.model.exact) - conn.model.fiber.projector(_as_columns(vertical))
    return pullback(conn.torsion, ph.T)


def check_projecttau(conn: NomizuConnection, vertical: np.ndarray, tol: float = DEFAULT.check) -> VerificationReport:
    """The Lambda^2 V ^ H part of T vanishes: T(V, W, X) = 0."""
    model = conn.model
    v = _as_columns(vertical)
    h = horizontal_of(model, v)
    rep = VerificationReport("projecttau", fingerprint=model.fingerprint(), mode=_mode(model))
    block = restrict(conn.torsion, v, v, h)
    rep.add("T(V, W, X) = 0", max_abs(block), tol, anchor="no Lambda^2 V ^ H torsion component",
            vacuous=v.shape[1] == 0 or h.shape[1] == 0)
    return rep


def check_torsion_in_torsion(conn: NomizuConnection, vertical: np.ndarray,
                             tol: float = DEFAULT.check) -> VerificationReport:
    """cyclic_{X,Y,Z} T^H(X, Y, T(V, Z)) = 0 for V vertical, X, Y, Z in m."""
    model = conn.model
    v = _as_columns(vertical)
    th = horizontal_torsion(conn, v)
    tv = torsion_endomorphisms(model, conn.torsion)  # tv[a][:, z] = T(X_a, X_z)^sharp
    tvz = np.einsum("ap,pkz->akz", v.T, tv)  # T(V_a, X_z) as vectors, axes (a, k, z)
    e = np.einsum("xyk,akz->xyza", th, tvz)
    rep = VerificationReport("torsion in torsion", fingerprint=model.fingerprint(), mode=_mode(model))
    rep.add("cyclic T^H(X, Y, T(V, Z)) = 0", max_abs(cyclic_sum_array(e)), tol,
            anchor="horizontal torsion is constant along fibers", vacuous=v.shape[1] == 0)
    return rep


def check_fiber_geometry(conn: NomizuConnection, vertical: np.ndarray,
                         tol: float = DEFAULT.check) -> VerificationReport:
    model = conn.model
    fib = model.fiber
    v = _as_columns(vertical)
    h = horizontal_of(model, v)
    ph = eye(model.dm, model.exact) - fib.projector(v)
    lc = levi_civita(model)
    rep = VerificationReport("fiber geometry", fingerprint=model.fingerprint(), mode=_mode(model))
    tg = max((max_abs(ph @ lc.at(v[:, a]) @ v[:, b]) for a in range(v.shape[1]) for b in range(v.shape[1])),
             default=0.0)
    rep.add("(a) nabla^g_V W in V", tg, tol, anchor="fibers are totally geodesic")
    th = horizontal_torsion(conn, v)
    lg, lt = 0.0, 0.0
    for a in range(v.shape[1]):
        lgv = lie_derivative(model, v[:, a], model.metric, check=False)
        lg = max(lg, max_abs(h.T @ lgv @ h))
        lt = max(lt, max_abs(lie_derivative(model, v[:, a], th, check=False)))
    rep.add("(b) (L_V g)(X, Y) = 0 on H", lg, tol, anchor="metric projectable (Riemannian submersion)",
            vacuous=h.shape[1] == 0)
    rep.add("(c) L_V T^H = 0", lt, tol, anchor="horizontal torsion projectable")
    return rep


def basic_derivative(conn: NomizuConnection, vertical: np.ndarray) -> np.ndarray:
    """N[x, y, z] = g(nabla_{V_x} Y_y, H_z) for basic extensions Y of horizontal vectors.

    The basic extension of y in H is the horizontal part of the fundamental
    field y*, for which nabla_X Y = Lambda(X) y - P_H [X, y]_m at the origin.
    """
    model = conn.model
    v = _as_columns(vertical)
    h = horizontal_of(model, v)
    ph = eye(model.dm, model.exact) - model.fiber.projector(v)
    out = zeros((v.shape[1], h.shape[1], h.shape[1]), model.exact or is_exact(v))
    for a in range(v.shape[1]):
        op = conn.at(v[:, a]) - ph @ model.ad_m(v[:, a])
        out[a] = h.T @ model.metric @ op @ h
        out[a] = out[a].T  # index order (y, z)
    return out


def check_nablavert(conn: NomizuConnection, vertical: np.ndarray, tol: float = DEFAULT.check) -> VerificationReport:
    """g(nabla_X Y, Z) = T(X, Y, Z) for X vertical, Y basic, Z horizontal."""
    model = conn.model
    v = _as_columns(vertical)
    h = horizontal_of(model, v)
    rep = VerificationReport("nablavert", fingerprint=model.fingerprint(), mode=_mode(model))
    if v.shape[1] == 0 or h.shape[1] == 0:
        rep.add("g(nabla_X Y, Z) = T(X, Y, Z)", 0.0, tol, anchor="vertical derivative of basic fields",
                vacuous=True)
        return rep
    lhs = basic_derivative(conn, v)
    rhs = restrict(conn.torsion, v, h, h)
    rep.add("g(nabla_X Y, Z) = T(X, Y, Z)", max_abs(lhs - rhs), tol, anchor="vertical derivative of basic fields")
    return rep


def check_product_splitting(conn: NomizuConnection, v1: np.ndarray, v2: np.ndarray,
                            tol: float = DEFAULT.check) -> VerificationReport:
    """Decomposability T = T_1 + T_2 with T_i in Lambda^3 V_i."""
    model = conn.model
    rep = VerificationReport("product splitting", fingerprint=model.fingerprint(), mode=_mode(model))
    p1 = model.fiber.projector(_as_columns(v1))
    p2 = eye(model.dm, model.exact) - p1
    t = conn.torsion
    mixed = t - pullback(t, p1.T) - pullback(t, p2.T)
    check = rep.add("torsion decomposable", max_abs(mixed), tol, anchor="product iff decomposable torsion")
    if check.status == "pass":
        rep.extend(check_projecttau(conn, v1, tol), "V1 vertical: ")
        rep.extend(check_projecttau(conn, v2, tol), "V2 vertical: ")
    return rep


# ---------------------------------------------------------------- quotients

@dataclass
class SubmersionSpec:
    connection: NomizuConnection
    vertical: np.ndarray
    lifts: np.ndarray | None = None  # (r, n) elements of g; default: the vertical vectors themselves

    def __post_init__(self):
        self.vertical = _as_columns(self.vertical)
        if self.lifts is None:
            model = self.connection.model
            self.lifts = np.stack([model.embed(self.vertical[:, a]) for a in range(self.vertical.shape[1])])


@dataclass
class QuotientModel:
    total: NomizuConnection
    vertical: np.ndarray
    base: LieModel
    connection: NomizuConnection  # nabla^{T check} on the base
    torsion: np.ndarray  # T check on m'
    lift: np.ndarray  # (dm, dm') columns: base basis as vectors of m
    change_of_basis: np.ndarray  # (n, n) new basis of g in old coordinates
    report: VerificationReport = field(default_factory=lambda: VerificationReport("quotient"))

    def push_endomorphism(self, a: np.ndarray) -> np.ndarray:
        """pi_* o A o lift as a matrix on m'."""
        return self.total.model.fiber.coordinates(self.lift, a @ self.lift)

    def push_vector(self, x: np.ndarray) -> np.ndarray:
        return self.total.model.fiber.coordinates(self.lift, x)

    def lift_element(self, x: np.ndarray) -> np.ndarray:
        """Base m'-coordinates -> element of g in the base algebra basis."""
        return self.base.embed(x)


def build_quotient(spec: SubmersionSpec, tol: float = DEFAULT.check) -> QuotientModel:
    conn, v, lifts = spec.connection, spec.vertical, spec.lifts
    model = conn.model
    exact_mode = model.exact
    rep = VerificationReport("quotient", fingerprint=model.fingerprint(), mode=_mode(model))
    h = horizontal_of(model, v)
    rep.extend(check_invariant_splitting(conn, [v, h], tol), "vertical invariant: ")
    rep.extend(check_projecttau(conn, v, tol))
    if not rep.passed:
        raise RefusedError("submersion hypotheses", rep, "vertical not holonomy-invariant or projecttau fails")

    r = v.shape[1]
    lift_m = np.stack([model.m_part(lifts[a]) for a in range(r)], axis=1) if r else v
    rep.add("lifts project onto vertical", max_abs(lift_m - v), tol)
    # h' = h + span(zeta): closure under brackets
    hbasis = [eye(model.n, exact_mode)[:, p] for p in model.isotropy]
    hprime = np.stack(hbasis + [lifts[a] for a in range(r)], axis=1)
    clos = 0.0
    for i in range(hprime.shape[1]):
        for j in range(i + 1, hprime.shape[1]):
            _, res = lstsq_residual(hprime, model.bracket(hprime[:, i], hprime[:, j]))
            clos = max(clos, max_abs(res))
    rep.add("h' closes under bracket", clos, tol, anchor="enlarged isotropy is a subalgebra")
    mprime = np.stack([model.embed(h[:, b]) for b in range(h.shape[1])], axis=1)
    p = np.concatenate([hprime, mprime], axis=1)
    try:
        pinv = inv(p)
    except np.linalg.LinAlgError:
        raise RefusedError("enlarged isotropy", rep, "h' + m' is not a basis of g")
    nh = hprime.shape[1]
    red = 0.0
    for i in range(nh):
        for b in range(h.shape[1]):
            coords = pinv @ model.bracket(hprime[:, i], mprime[:, b])
            red = max(red, max_abs(coords[:nh]))
    rep.add("[h', m'] in m'", red, tol, anchor="quotient is reductive")
    if not rep.passed:
        raise RefusedError("enlarged isotropy", rep, "; ".join(c.name for c in rep.failures))

    cnew = np.tensordot(restrict(model.structure, p, p), pinv, axes=(0, 1))
    labels = tuple([model.labels[q] for q in model.isotropy] + [f"zeta{a + 1}" for a in range(r)]
                   + [f"m'{b + 1}" for b in range(h.shape[1])])
    gbase = h.T @ model.metric @ h
    if not exact_mode:
        gbase = (gbase + gbase.T) / 2  # rounding can break exact symmetry of the induced metric
    base = LieModel(cnew, tuple(range(nh)), tuple(range(nh, model.n)), gbase, labels, f"{model.name}/V")
    rep.extend(validate_model(base, tol), "base: ")
    tcheck = pullback(conn.torsion, h)
    rep.add("T check isotropy-invariant", base.invariance_residual(tcheck), tol, vacuous=base.dh == 0)
    bconn = with_torsion(levi_civita(base), tcheck, tol)
    # pi_*(nabla_{X bar} Y bar) against the base Nomizu map
    pushed = np.stack([model.fiber.coordinates(h, conn.at(h[:, a]) @ h) for a in range(h.shape[1])]) \
        if h.shape[1] else bconn.Lambda
    rep.add("nabla^Tcheck = pi_* nabla on lifts", max_abs(pushed - bconn.Lambda), tol,
            anchor="base connection is the projected connection")
    rep.add("torsion_of(base) = T check", max_abs(bconn.torsion - tcheck), tol)
    rep.add("nabla^Tcheck T check = 0", max_abs(nabla_all(bconn, tcheck)) if base.dm else 0.0, tol,
            anchor="projected torsion is parallel")
    rep.add("Riemannian submersion g_N = g|_H", max_abs(base.metric - h.T @ model.metric @ h), tol)
    if not rep.passed:
        raise RefusedError("quotient postconditions", rep, "; ".join(c.name for c in rep.failures))
    return QuotientModel(conn, v, base, bconn, tcheck, h, p, rep)


def check_base_reducibility(quotient: QuotientModel, h1: np.ndarray, h2: np.ndarray,
                            tol: float = DEFAULT.check) -> VerificationReport:
    """Holonomy of the base connection preserves pi_* H_1 and pi_* H_2."""
    base = quotient.base
    h1, h2 = _as_columns(h1), _as_columns(h2)
    fib = base.fiber
    for name, s in (("H1", h1), ("H2", h2)):
        comp = eye(base.dm, base.exact) - fib.projector(s)
        res = max((max_abs(comp @ a @ s) for a in base.ad_h), default=0.0)
        if res > tol:
            raise RefusedError("projectability", None, f"{name} is not invariant under the enlarged isotropy")
    rep = VerificationReport("base reducibility", fingerprint=base.fingerprint(), mode=_mode(base))
    split = check_invariant_splitting(quotient.connection, [h1, h2], tol,
                                      holonomy=holonomy_algebra(quotient.connection))
    return rep.extend(split)
