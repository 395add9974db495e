"""Nearly Kaehler quotient of a parallel 3-(alpha, delta)-Sasaki model along one Reeb field."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT
from .homogeneous import check_invariant_splitting, holonomy_algebra, levi_civita, nabla_all
from .report import RefusedError, VerificationReport
from .sasaki import AlmostContactTriple, NearlyKahlerStructure, canonical_connection, check_nearly_kahler
from .submersion import QuotientModel, SubmersionSpec, build_quotient, check_base_reducibility
from .tensors import antisymmetry_residual, as_float, eye, inv, is_exact, max_abs, pullback, restrict, wedge

log = logging.getLogger(__name__)


@dataclass
class NKQuotientResult:
    triple: AlmostContactTriple  # rotated so that the quotient axis is xi_1
    quotient: QuotientModel
    J: np.ndarray
    nk: NearlyKahlerStructure
    vertical: np.ndarray  # base coordinates of pi_* xi_2, pi_* xi_3
    horizontal: np.ndarray  # base coordinates of pi_* H
    report: VerificationReport

    @property
    def base(self):
        return self.quotient.base

    @property
    def alpha(self):
        return self.triple.alpha

    @property
    def torsion(self) -> np.ndarray:
        return self.quotient.torsion

    def base_forms(self):
        """pi_* eta_i, and Phi_i^H on the base (i = 1..3)."""
        lift = self.quotient.lift
        t = self.triple
        ph = t.proj_horizontal
        eta = t.eta @ lift
        phi_h = np.stack([pullback(t.Phi[i], ph.T @ lift) for i in range(3)])
        return eta, phi_h


def tilde_phi(triple: AlmostContactTriple, i: int = 0) -> np.ndarray:
    """phi_i on H, -phi_i on V."""
    return triple.phi[i] @ triple.proj_horizontal - triple.phi[i] @ triple.proj_vertical


def rotation_to_axis(axis) -> np.ndarray:
    """R in SO(3) with R^T e_1 = axis, so that the rotated triple has xi'_1 = sum a_i xi_i."""
    a = np.asarray(as_float(np.asarray(axis)), dtype=float)
    a = a / np.linalg.norm(a)
    e1 = np.array([1.0, 0.0, 0.0])
    w = np.cross(e1, a)
    s, c = np.linalg.norm(w), float(e1 @ a)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([-1.0, -1.0, 1.0])
    k = w / s
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    rot = np.eye(3) + s * kx + (1 - c) * kx @ kx  # rot @ e1 = a
    return rot.T


def _relation_holds(triple: AlmostContactTriple) -> bool:
    gap = triple.delta - 2 * triple.alpha
    if gap == 0:
        return True
    if not is_exact(np.asarray([triple.alpha, triple.delta], dtype=object)) and abs(float(gap)) < DEFAULT.parallel_relation:
        log.warning("delta = 2 alpha holds only to %.1e; proceeding", abs(float(gap)))
        return True
    return False


def build_nk_quotient(triple: AlmostContactTriple, axis=None, tol: float = DEFAULT.check) -> NKQuotientResult:
    if axis is not None:
        triple = triple.rotated(rotation_to_axis(axis))
    model = triple.model
    xi1 = triple.xi[0][:, None]
    if not _relation_holds(triple):
        conn = canonical_connection(triple, tol, check=False)
        gate = check_invariant_splitting(conn, [xi1, model.fiber.complement(xi1)], tol)
        raise RefusedError("xi-invariance", gate,
                           f"span(xi) is not holonomy-invariant (delta != 2 alpha, beta = {triple.beta})")
    conn = canonical_connection(triple, tol)
    q = build_quotient(SubmersionSpec(conn, xi1), tol)
    base = q.base
    fib = model.fiber
    J = q.push_endomorphism(tilde_phi(triple))
    vertical = fib.coordinates(q.lift, triple.xi[1:3].T)
    horizontal = fib.coordinates(q.lift, triple.horizontal)
    nk = NearlyKahlerStructure(base, J)
    res = NKQuotientResult(triple, q, J, nk, vertical, horizontal,
                           VerificationReport("nk quotient", fingerprint=base.fingerprint(),
                                              mode="rational" if base.exact else "float"))
    rep = res.report
    rep.extend(q.report, "quotient: ")
    rep.add("J^2 = -id", max_abs(J @ J + eye(base.dm, base.exact)), tol, anchor="almost complex structure on the base")
    eta, phi_h = res.base_forms()
    a = triple.alpha
    if base.dm >= 3:
        predicted = 2 * a * (wedge(eta[1], phi_h[1]) + wedge(eta[2], phi_h[2]))
    else:
        predicted = 0 * q.torsion  # no room for a 3-form
    rep.add("T check = 2 alpha (eta_2 ^ Phi_2^H + eta_3 ^ Phi_3^H)", max_abs(q.torsion - predicted), tol,
            anchor="projected torsion of the nearly Kaehler base")
    rep.add("nabla^Tcheck J = 0", max_abs(nabla_all(q.connection, J, contra=1)), tol,
            anchor="J parallel for the projected connection")
    rep.extend(check_nearly_kahler(base, J, tol), "nk: ")
    if not rep.passed:
        raise RefusedError("nk postconditions", rep, "; ".join(c.name for c in rep.failures))
    return res


def _blocks(res: NKQuotientResult):
    return {"V": res.vertical, "H": res.horizontal}


def check_TJ_formulas(res: NKQuotientResult, tol: float = DEFAULT.check) -> VerificationReport:
    """g((T_X . J) Y, Z) = T(X, JY, Z) + T(X, Y, JZ) per vertical/horizontal block."""
    base = res.base
    J, t = res.J, res.torsion
    rep = VerificationReport("TJ formulas", fingerprint=base.fingerprint(), mode="rational" if base.exact else "float")
    e = np.einsum("xwz,wy->xyz", t, J) + np.einsum("xyw,wz->xyz", t, J)
    eta, phi_h = res.base_forms()
    a = res.alpha
    first = -4 * a * (np.einsum("x,yz->xyz", eta[1], phi_h[2]) - np.einsum("x,yz->xyz", eta[2], phi_h[1]))
    second = 4 * a * (np.einsum("y,xz->xyz", eta[1], phi_h[2]) - np.einsum("y,xz->xyz", eta[2], phi_h[1]))
    blocks = _blocks(res)
    if res.horizontal.shape[1] == 0:
        rep.add("X vertical, Y, Z horizontal", 0.0, tol, anchor="T_X . J for vertical X", vacuous=True)
        rep.add("Y vertical, X, Z horizontal", 0.0, tol, anchor="T_X . J for vertical Y", vacuous=True)
    else:
        def block(arr, kx, ky, kz):
            return restrict(arr, blocks[kx], blocks[ky], blocks[kz])
        rep.add("X vertical, Y, Z horizontal", max_abs(block(e - first, "V", "H", "H")), tol,
                anchor="T_X . J for vertical X")
        rep.add("Y vertical, X, Z horizontal", max_abs(block(e - second, "H", "V", "H")), tol,
                anchor="T_X . J for vertical Y")
        rep.add("Z vertical, X, Y horizontal (skew in Y, Z)",
                max_abs(block(e + np.transpose(second, (0, 2, 1)), "H", "H", "V")), tol,
                anchor="T_X . J for vertical Y")
        vanish = 0.0
        for kx, ky, kz in [("H", "H", "H"), ("V", "V", "V"), ("V", "V", "H"), ("V", "H", "V"), ("H", "V", "V")]:
            vanish = max(vanish, max_abs(block(e, kx, ky, kz)))
        rep.add("remaining blocks vanish", vanish, tol, anchor="torsion in V ^ Lambda^2 H")
    return rep


def check_characteristic_match(res: NKQuotientResult, tol: float = DEFAULT.check) -> VerificationReport:
    base = res.base
    rep = VerificationReport("characteristic match", fingerprint=base.fingerprint(),
                             mode="rational" if base.exact else "float")
    tc = res.nk.characteristic_torsion
    rep.add("T check = g((nabla^g_X J) J Y, Z)", max_abs(res.torsion - tc), tol,
            anchor="projected torsion is the characteristic torsion")
    if antisymmetry_residual(tc) < tol:
        rep.add("characteristic connection = nabla^Tcheck",
                max_abs(res.nk.characteristic_connection.Lambda - res.quotient.connection.Lambda), tol,
                anchor="projected torsion is the characteristic torsion")
    else:
        rep.refuse("characteristic connection = nabla^Tcheck", notes="characteristic torsion not alternating")
    flipped = NearlyKahlerStructure(base, -res.J).characteristic_torsion
    rep.add("same identity with J -> -J", max_abs(res.torsion - flipped), tol,
            notes="both sides are even in J")
    return rep


def _orthonormal_sum_of_squares(fiber, vectors: np.ndarray, op) -> np.ndarray:
    """sum_i op(e_i)^2 over an orthonormal basis of span(vectors), via the Gram inverse."""
    gram_inv = inv(vectors.T @ fiber.metric @ vectors)
    mats = [op(vectors[:, i]) for i in range(vectors.shape[1])]
    out = 0 * fiber.metric
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            out = out + gram_inv[i, j] * (a @ b)
    return out


def compute_F(res: NKQuotientResult, tol: float = DEFAULT.check):
    """F = sum_i (nabla^g_{V_i} J)^2 restricted to H, computed two ways.

    Returns (F on H in horizontal coordinates, report).
    """
    base = res.base
    fib = base.fiber
    rep = VerificationReport("F tensor", fingerprint=base.fingerprint(), mode="rational" if base.exact else "float")
    lc = levi_civita(base)
    h = res.horizontal

    def dj(v):
        lam = lc.at(v)
        return lam @ res.J - res.J @ lam

    def tj(v):
        return fib.endomorphism(np.einsum("a,abc->bc", v, res.torsion))

    f1 = _orthonormal_sum_of_squares(fib, res.vertical, dj)
    f2 = _orthonormal_sum_of_squares(fib, res.vertical, tj)
    if h.shape[1] == 0:
        rep.add("F two paths agree on H", 0.0, tol, vacuous=True)
        return f1[:0, :0], rep
    fh1 = fib.coordinates(h, f1 @ h)
    fh2 = fib.coordinates(h, f2 @ h)
    rep.add("F two paths agree on H", max_abs(fh1 - fh2), tol, anchor="F from nabla J and from torsion")
    rep.add("F maps H into H", max_abs(f1 @ h - h @ fh1), tol, anchor="F: H -> H")
    target = -8 * res.alpha * res.alpha
    rep.add("F = -8 alpha^2 id on H", max_abs(fh1 - target * eye(h.shape[1], base.exact)), tol,
            anchor="F = -8 alpha^2")
    return fh1, rep


def check_special_algebraic_torsion(res: NKQuotientResult, torsion: np.ndarray | None = None,
                                    tol: float = DEFAULT.check) -> VerificationReport:
    base = res.base
    t = res.torsion if torsion is None else torsion
    v, h = res.vertical, res.horizontal
    rep = VerificationReport("special algebraic torsion", fingerprint=base.fingerprint(),
                             mode="rational" if base.exact else "float")
    vvv = restrict(t, v, v, v)
    vvh = restrict(t, v, v, h)
    hhh = restrict(t, h, h, h)
    anchor = "special algebraic torsion"
    rep.add("Lambda^3 V part", max_abs(vvv), tol, anchor=anchor, vacuous=v.shape[1] < 3)
    rep.add("Lambda^2 V ^ H part", max_abs(vvh), tol, anchor=anchor, vacuous=v.shape[1] < 2 or h.shape[1] == 0)
    rep.add("Lambda^3 H part", max_abs(hhh), tol, anchor=anchor, vacuous=h.shape[1] < 3)
    return rep


def check_reducible_holonomy(res: NKQuotientResult, tol: float = DEFAULT.check) -> VerificationReport:
    return check_base_reducibility(res.quotient, res.vertical, res.horizontal, tol)


def check_axis_equivariance(triple: AlmostContactTriple, axis, tol: float = DEFAULT.check) -> VerificationReport:
    """Quotients along xi_1 and along sum a_i xi_i are related by an isometric automorphism.

    exp(t ad xi_w) rotates the Reeb sphere by angle 2 delta t about w, fixes the
    isotropy, and is an isometry of m; it carries one quotient onto the other.
    """
    model = triple.model
    a = np.asarray(as_float(np.asarray(axis)), dtype=float)
    a = a / np.linalg.norm(a)
    xi = as_float(triple.xi)
    e1 = np.array([1.0, 0.0, 0.0])
    w = np.cross(e1, a)
    s, c = np.linalg.norm(w), float(e1 @ a)
    theta = math.atan2(s, c)
    w = w / s if s > 1e-15 else np.array([0.0, 0.0, 1.0])
    delta = float(triple.delta)
    t = theta / (2 * delta)
    struct = as_float(model.structure)
    gen = as_float(model.embed(xi.T @ w))
    ad = np.einsum("i,ijk->kj", gen, struct)
    auto = expm(t * ad)
    rep = VerificationReport("axis equivariance", fingerprint=model.fingerprint(), mode="float")
    m_idx = list(model.complement)
    h_idx = list(model.isotropy)
    rep.add("automorphism preserves h", max_abs(auto[np.ix_(m_idx, h_idx)]), tol)
    am = auto[np.ix_(m_idx, m_idx)]
    g = as_float(model.metric)
    rep.add("automorphism is an isometry of m", max_abs(am.T @ g @ am - g), tol)
    rep.add("automorphism maps xi_1 to the axis", max_abs(am @ xi[0] - xi.T @ a), tol)
    lhs = np.einsum("ia,jb,ijk->abk", auto, auto, struct)
    rep.add("automorphism of g", max_abs(lhs - np.einsum("kl,abl->abk", auto, struct)), tol)
    first = build_nk_quotient(triple, tol=tol)
    second = build_nk_quotient(triple, axis=a, tol=tol)
    h1 = as_float(first.quotient.lift)
    h2 = as_float(second.quotient.lift)
    # m'-coordinates of the transported first base in the second base
    transport = np.linalg.solve(h2.T @ g @ h2, h2.T @ g @ am @ h1)
    rep.add("transport lands in second base", max_abs(h2 @ transport - am @ h1), tol)
    g1, g2 = as_float(first.base.metric), as_float(second.base.metric)
    rep.add("metrics isometric", max_abs(transport.T @ g2 @ transport - g1), tol,
            anchor="quotient independent of the axis")
    t1, t2 = as_float(first.torsion), as_float(second.torsion)
    rep.add("torsions correspond", max_abs(pullback(t2, transport) - t1), tol,
            anchor="quotient independent of the axis")
    j1, j2 = as_float(first.J), as_float(second.J)
    rep.add("complex structures correspond", max_abs(j2 @ transport - transport @ j1), tol,
            anchor="quotient independent of the axis")
    return rep


def holonomy_dimension(res: NKQuotientResult) -> int:
    return len(holonomy_algebra(res.quotient.connection))
