"""Second canonical submersion: nearly Kaehler base -> quaternionic Kaehler base."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .config import DEFAULT
from .homogeneous import check_invariant_splitting, curvature, levi_civita
from .report import RefusedError, VerificationReport
from .sasaki import NearlyKahlerStructure
from .submersion import QuotientModel, SubmersionSpec, build_quotient
from .tensors import as_float, eye, inv, lstsq_residual, max_abs, restrict, sqrt


def _mode(model) -> str:
    return "rational" if model.exact else "float"


@dataclass
class QKResult:
    quotient: QuotientModel
    I: np.ndarray  # (3, d, d): I_1, I_2, I_3 on the base
    k: object
    report: VerificationReport

    @property
    def base(self):
        return self.quotient.base


def interior_endomorphism(fiber, torsion: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Endomorphism Y -> T(v, Y, .)^sharp."""
    return fiber.endomorphism(np.einsum("a,abc->bc", v, torsion))


def qk_F(nk: NearlyKahlerStructure, vertical: np.ndarray, horizontal: np.ndarray) -> np.ndarray:
    """-sum_i (nabla^g_{e_i} J)^2 over an orthonormal frame of V, in horizontal coordinates."""
    model = nk.model
    fib = model.fiber
    lc = levi_civita(model)
    gram_inv = inv(vertical.T @ model.metric @ vertical)
    mats = []
    for i in range(vertical.shape[1]):
        lam = lc.at(vertical[:, i])
        mats.append(lam @ nk.J - nk.J @ lam)
    total = 0 * model.metric
    for i, a in enumerate(mats):
        for j, b in enumerate(mats):
            total = total + gram_inv[i, j] * (a @ b)
    return -fib.coordinates(horizontal, total @ horizontal)


def build_qk_quotient(nk: NearlyKahlerStructure, vertical: np.ndarray, V: np.ndarray,
                      tol: float = DEFAULT.check) -> QKResult:
    model = nk.model
    fib = model.fiber
    J = nk.J
    rep = VerificationReport("qk quotient", fingerprint=model.fingerprint(), mode=_mode(model))
    if vertical.ndim != 2 or vertical.shape[1] != 2:
        raise RefusedError("vertical dimension", None, "vertical distribution must be 2-dimensional")
    horizontal = fib.complement(vertical)
    pv = fib.projector(vertical)
    comp = eye(model.dm, model.exact) - pv
    rep.add("V is J-invariant", max_abs(comp @ J @ vertical), tol, anchor="J-invariant splitting")
    rep.add("|V| = 1", abs(float(fib.inner(V, V)) - 1.0), tol)
    rep.add("V lies in the vertical plane", max_abs(comp @ V), tol)
    if not rep.passed:
        raise RefusedError("J-invariance", rep, "; ".join(c.name for c in rep.failures))
    tn = nk.characteristic_torsion
    conn = nk.characteristic_connection
    rep.extend(check_invariant_splitting(conn, [vertical, horizontal], tol), "holonomy: ")
    if not rep.passed:
        raise RefusedError("holonomy invariance", rep, "vertical not invariant under characteristic holonomy")
    v, h = vertical, horizontal
    parts = {
        "Lambda^3 V": restrict(tn, v, v, v),
        "Lambda^2 V ^ H": restrict(tn, v, v, h),
        "Lambda^3 H": restrict(tn, h, h, h),
    }
    for name, arr in parts.items():
        rep.add(f"torsion has no {name} part", max_abs(arr), tol, anchor="torsion in Lambda^2 H ^ V")
    if not rep.passed:
        raise RefusedError("torsion type", rep, "torsion is not in Lambda^2 H ^ V")
    F = qk_F(nk, v, h)
    k = F[0, 0]
    rep.add("F = k id on H", max_abs(F - k * eye(h.shape[1], model.exact)), tol, anchor="F = k id")
    if not rep.passed or not float(k) > 0:
        raise RefusedError("F scalar", rep, f"F is not a positive multiple of the identity (k = {float(k)})")

    q = build_quotient(SubmersionSpec(conn, v), tol)
    rep.extend(q.report, "quotient: ")
    norm = sqrt(2 / k, model.exact)
    i2 = norm * interior_endomorphism(fib, tn, J @ V)
    i3 = norm * interior_endomorphism(fib, tn, V)
    lift = q.lift
    invariance = max(max_abs(comp_h @ lift) for comp_h in
                     [(eye(model.dm, model.exact) - fib.projector(lift)) @ e for e in (J, i2, i3)])
    rep.add("I_a preserve H", invariance, tol)
    I = np.stack([q.push_endomorphism(e) for e in (J, i2, i3)])
    res = QKResult(q, I, k, rep)
    rep.extend(check_quaternion_relations(res.base, I, tol))
    # the enlarged isotropy rotates the triple, so only the span is invariant
    iso = max((_span_coefficients(I, ad @ a - a @ ad)[1] for ad in res.base.ad_h for a in I), default=0.0)
    rep.add("span(I) isotropy-invariant", iso, tol, vacuous=res.base.dh == 0)
    if not rep.passed:
        raise RefusedError("qk postconditions", rep, "; ".join(c.name for c in rep.failures))
    return res


def check_quaternion_relations(model, I: np.ndarray, tol: float = DEFAULT.check) -> VerificationReport:
    rep = VerificationReport("quaternion relations", fingerprint=model.fingerprint(), mode=_mode(model))
    one = eye(model.dm, model.exact)
    g = model.metric
    rep.add("I_a^2 = -id", max(max_abs(a @ a + one) for a in I), tol, anchor="quaternionic triple")
    cyc = max(max_abs(I[i] @ I[j] - I[k]) for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)))
    rep.add("I_1 I_2 = I_3 and cyclic", cyc, tol, anchor="quaternionic triple")
    anti = max(max_abs(I[i] @ I[j] + I[j] @ I[i]) for i, j in permutations(range(3), 2))
    rep.add("I_a I_b = -I_b I_a (a != b)", anti, tol, anchor="quaternionic triple")
    rep.add("I_a orthogonal", max(max_abs(a.T @ g @ a - g) for a in I), tol, anchor="almost Hermitian triple")
    return rep


def _span_coefficients(I: np.ndarray, d: np.ndarray):
    basis = as_float(I).reshape(3, -1).T
    coef, res = lstsq_residual(basis, as_float(d).ravel())
    return coef, max_abs(res)


def check_quaternionic_parallelism(res: QKResult, tol: float = DEFAULT.check) -> VerificationReport:
    """nabla^g preserves span(I_1, I_2, I_3); plus Einstein and self-dual Weyl checks in dim 4."""
    base = res.base
    I = res.I
    rep = VerificationReport("quaternionic parallelism", fingerprint=base.fingerprint(), mode=_mode(base))
    lc = levi_civita(base)
    worst, diag, killing = 0.0, 0.0, 0.0
    for x in range(base.dm):
        lam = lc.at(eye(base.dm, base.exact)[:, x])
        for a in range(3):
            coef, r = _span_coefficients(I, lam @ I[a] - I[a] @ lam)
            worst = max(worst, r)
            diag = max(diag, abs(coef[a]))
            if a == 1:
                killing = max(killing, abs(coef[1]))
    rep.add("nabla_X I_a in span(I)", worst, tol, anchor="parallel quaternionic subbundle")
    rep.add("nabla_X I_a has no I_a component", diag, tol, notes="from I_a^2 = -id")
    rep.add("nabla_X I_2 in span(I_1, I_3)", killing, tol, anchor="Killing direction remark")
    iso = max((_span_coefficients(I, ad @ a - a @ ad)[1] for ad in base.ad_h for a in I), default=0.0)
    rep.add("ad(h) preserves span(I)", iso, tol, vacuous=base.dh == 0)
    if base.dm == 4:
        rep.extend(four_dim_curvature(base, I, tol))
    return rep


def _orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns e_i with e^T g e = id."""
    return np.linalg.inv(np.linalg.cholesky(g)).T


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    return (np.einsum("ik,jl->ijkl", h, k) + np.einsum("jl,ik->ijkl", h, k)
            - np.einsum("il,jk->ijkl", h, k) - np.einsum("jk,il->ijkl", h, k))


def weyl_decomposition(model):
    """Riemann tensor, Ricci, scalar curvature and Weyl tensor in an orthonormal frame.

    K_{ijkl} = g(R(e_i, e_j) e_l, e_k), so K_{ijij} is the sectional curvature.
    """
    g = as_float(model.metric)
    e = _orthonormal_frame(g)
    r = as_float(curvature(levi_civita(model)))  # r[a, b][i, c]
    rm = np.einsum("abic,ik->abck", r, g)  # g(R(X_a, X_b) X_c, X_k)
    k = np.einsum("abcd,ai,bj,cl,dk->ijkl", rm, e, e, e, e)
    n = g.shape[0]
    ric = np.einsum("ijil->jl", k)
    scal = float(np.trace(ric))
    one = np.eye(n)
    weyl = k - kulkarni_nomizu(ric - scal / n * one, one) / (n - 2) - scal / (2 * n * (n - 1)) * kulkarni_nomizu(one, one)
    return k, ric, scal, weyl


def _hodge4(a: np.ndarray) -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for p in permutations(range(4)):
        eps[p] = np.linalg.det(np.eye(4)[list(p)])
    return 0.5 * np.einsum("ijkl,kl->ij", eps, a)


def four_dim_curvature(model, I: np.ndarray, tol: float = DEFAULT.check) -> VerificationReport:
    """Einstein residual and the Weyl part on the 2-forms of the quaternionic triple.

    Orientation is chosen so that the Kaehler forms of I_a are self-dual.
    """
    rep = VerificationReport("four-dimensional curvature", fingerprint=model.fingerprint(), mode="float")
    g = as_float(model.metric)
    e = _orthonormal_frame(g)
    k, ric, scal, weyl = weyl_decomposition(model)
    rep.add("Einstein: Ric = (scal/4) g", max_abs(ric - scal / 4 * np.eye(4)), tol, anchor="Einstein in dimension 4",
            notes=f"scal = {scal:.12g}")
    forms = [e.T @ g @ as_float(a) @ e for a in I]  # omega_a(e_i, e_j) = g(e_i, I_a e_j)
    star = [_hodge4(w) for w in forms]
    sd = max(max_abs(s - w) for s, w in zip(star, forms))
    asd = max(max_abs(s + w) for s, w in zip(star, forms))
    orientation = 1 if sd <= asd else -1
    rep.add("Kaehler forms of I_a span one half of Lambda^2", min(sd, asd), tol,
            notes="orientation " + ("given" if orientation > 0 else "reversed"))
    norms = [0.5 * np.sum(w * w) for w in forms]
    plus = [w / np.sqrt(nw) for w, nw in zip(forms, norms)]
    wplus = np.array([[0.25 * np.einsum("ijkl,ij,kl->", weyl, a, b) for b in plus] for a in plus])
    rep.add("self-dual Weyl W+ = 0", max_abs(wplus), tol, anchor="anti-self-dual in dimension 4")
    rep.add("full Weyl tensor", max_abs(weyl), np.inf, notes="informational")
    return rep


def measure_nablaJ2(nk: NearlyKahlerStructure, vertical: np.ndarray, V: np.ndarray, k,
                    tol: float = DEFAULT.check):
    """(nabla^g_V J)^2 on H as a multiple -c id; report which of k/2, k^2/2 equals c."""
    model = nk.model
    fib = model.fiber
    h = fib.complement(vertical)
    lc = levi_civita(model)
    J = nk.J

    def dj(v):
        lam = lc.at(v)
        return lam @ J - J @ lam

    a, b = dj(V), dj(J @ V)
    sq = fib.coordinates(h, a @ a @ h)
    c = -sq[0, 0]
    rep = VerificationReport("nablaJ2", fingerprint=model.fingerprint(), mode=_mode(model))
    rep.add("(nabla_V J)^2 scalar on H", max_abs(sq + c * eye(h.shape[1], model.exact)), tol)
    cands = {"k/2": k / 2, "k^2/2": k * k / 2}
    matches = [name for name, val in cands.items() if abs(float(c) - float(val)) < tol]
    rep.add("measured scalar matches exactly one candidate", 0.0 if len(matches) == 1 else 1.0, tol,
            anchor="(nabla_V J)^2 = -(1/2) F",
            notes=f"measured {float(c):.12g}; k/2 = {float(k) / 2:.12g}; k^2/2 = {float(k) ** 2 / 2:.12g}; "
                  f"matches {','.join(matches) or 'none'}")
    sqb = fib.coordinates(h, b @ b @ h)
    rep.add("(nabla_JV J)^2 = (nabla_V J)^2 on H", max_abs(sqb - sq), tol, anchor="J-conjugation of nabla J")
    rep.add("J (nabla_V J) = -(nabla_V J) J", max_abs(J @ a + a @ J), tol, anchor="anticommutation")
    rep.add("(nabla_V J) J = nabla_JV J", max_abs(a @ J - b), tol, anchor="anticommutation")
    return c, matches[0] if len(matches) == 1 else None, rep


def check_V_rotation(nk: NearlyKahlerStructure, vertical: np.ndarray, theta: float,
                     tol: float = DEFAULT.check) -> VerificationReport:
    """Rotating V inside the vertical plane rotates I_2, I_3 and keeps span(I)."""
    if nk.model.exact:
        raise ValueError("V rotation uses irrational angles; pass a float model")
    v0 = vertical[:, 0] / np.sqrt(nk.model.fiber.inner(vertical[:, 0], vertical[:, 0]))
    first = build_qk_quotient(nk, vertical, v0, tol)
    v1 = np.cos(theta) * v0 + np.sin(theta) * (nk.J @ v0)
    second = build_qk_quotient(nk, vertical, v1, tol)
    rep = VerificationReport("V rotation", fingerprint=nk.model.fingerprint(), mode="float")
    res = max(_span_coefficients(first.I, b)[1] for b in as_float(second.I))
    rep.add("span(I) independent of V", res, tol, anchor="choice of V within the plane")
    rep.add("I_1 unchanged", max_abs(as_float(first.I[0]) - as_float(second.I[0])), tol)
    return rep
