"""Reductive homogeneous models g = h + m and their invariant connections.

Conventions (all at the origin):

* invariant vector fields bracket as ``[X, Y]_m``;
* an invariant connection is a Nomizu map ``Lambda: m -> End(m)`` acting on
  invariant tensors as a derivation, ``nabla_X S = Lambda(X) . S``;
* a fundamental (Killing) field ``Z*`` with ``Z*_o = Z`` has
  ``nabla_X Z* = Lambda(X) Z - [X, Z]_m``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .config import DEFAULT
from .report import VerificationReport, fingerprint
from .tensors import (
    Fiber,
    antisymmetry_residual,
    as_float,
    cyclic_sum_array,
    endo_action,
    is_exact,
    max_abs,
    zeros,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LieModel:
    """Lie algebra with structure constants ``[e_i, e_j] = sum_k c[i,j,k] e_k``,
    split into isotropy ``h`` and complement ``m`` with a metric on ``m``."""

    structure: np.ndarray
    isotropy: tuple
    complement: tuple
    metric: np.ndarray
    labels: tuple = ()
    name: str = ""

    def __post_init__(self):
        c = self.structure
        n = c.shape[0]
        if c.ndim != 3 or c.shape != (n, n, n):
            raise ValueError(f"structure constants must be n x n x n, got {c.shape}")
        idx = sorted(tuple(self.isotropy) + tuple(self.complement))
        if idx != list(range(n)):
            raise ValueError("isotropy and complement indices must partition the basis")
        dm = len(self.complement)
        if self.metric.shape != (dm, dm):
            raise ValueError(f"metric must be {dm}x{dm}, got {self.metric.shape}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(n)))

    @property
    def n(self) -> int:
        return self.structure.shape[0]

    @property
    def dm(self) -> int:
        return len(self.complement)

    @property
    def dh(self) -> int:
        return len(self.isotropy)

    @property
    def exact(self) -> bool:
        return is_exact(self.structure)

    @cached_property
    def fiber(self) -> Fiber:
        return Fiber(self.metric)

    @cached_property
    def bracket_m(self) -> np.ndarray:
        """[X_a, X_b]_m coefficients, shape (dm, dm, dm)."""
        m = list(self.complement)
        return self.structure[np.ix_(m, m, m)]

    @cached_property
    def bracket_h(self) -> np.ndarray:
        m, h = list(self.complement), list(self.isotropy)
        return self.structure[np.ix_(m, m, h)]

    @cached_property
    def ad_h(self) -> np.ndarray:
        """Matrices of ad(h_p) restricted to m, shape (dh, dm, dm)."""
        m = list(self.complement)
        out = zeros((self.dh, self.dm, self.dm), self.exact)
        for p, hp in enumerate(self.isotropy):
            out[p] = self.structure[hp][np.ix_(m, m)].T
        return out

    def ad_m(self, v: np.ndarray) -> np.ndarray:
        """Matrix of X -> [v, X]_m for v in m."""
        return np.einsum("a,abc->cb", v, self.bracket_m)

    def embed(self, v: np.ndarray) -> np.ndarray:
        """m-coordinates -> full algebra coordinates."""
        out = zeros(self.n, is_exact(v) or self.exact)
        for a, i in enumerate(self.complement):
            out[i] = v[a]
        return out

    def m_part(self, x: np.ndarray) -> np.ndarray:
        return x[list(self.complement)]

    def h_part(self, x: np.ndarray) -> np.ndarray:
        return x[list(self.isotropy)]

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def invariance_residual(self, s: np.ndarray, contra: int = 0) -> float:
        """Max of |ad(h) . s| over the isotropy basis."""
        return max((max_abs(endo_action(a, s, contra)) for a in self.ad_h), default=0.0)

    def fingerprint(self) -> str:
        return fingerprint(self.structure, np.array(self.isotropy), self.metric)


def validate_model(model: LieModel, tol: float = DEFAULT.check) -> VerificationReport:
    c = model.structure
    rep = VerificationReport("model", fingerprint=model.fingerprint(), mode=_mode(model))
    rep.add("structure antisymmetry", max_abs(c + np.swapaxes(c, 0, 1)), tol)
    cc = np.einsum("ijp,pkl->ijkl", c, c)
    jac = cc + np.transpose(cc, (1, 2, 0, 3)) + np.transpose(cc, (2, 0, 1, 3))
    rep.add("jacobi identity", max_abs(jac), tol)
    h, m = list(model.isotropy), list(model.complement)
    rep.add("[h,h] in h", max_abs(c[np.ix_(h, h, m)]), tol, vacuous=not h)
    rep.add("[h,m] in m", max_abs(c[np.ix_(h, m, h)]), tol, vacuous=not h)
    g = model.metric
    rep.add("metric symmetric", max_abs(g - g.T), tol)
    inv_res = max((max_abs(a.T @ g + g @ a) for a in model.ad_h), default=0.0)
    rep.add("metric ad(h)-invariant", inv_res, tol, vacuous=not h)
    return rep


def _mode(model: LieModel) -> str:
    return "rational" if model.exact else "float"


# ---------------------------------------------------------------- forms

def d_invariant(model: LieModel, a: np.ndarray, tol: float = DEFAULT.check, check: bool = True) -> np.ndarray:
    """Exterior derivative of an invariant k-form at the origin.

    (da)(X_0..X_k) = sum_{i<j} (-1)^{i+j} a([X_i, X_j]_m, X_0, ^i, ^j, .., X_k)
    """
    a = np.asarray(a)
    if check:
        res = model.invariance_residual(a)
        if res > tol:
            raise ValueError(f"form is not isotropy-invariant (residual {res:.2e})")
    k = a.ndim
    if k == 0:
        return zeros(model.dm, model.exact or is_exact(a))
    b = np.tensordot(model.bracket_m, a, axes=(2, 0))  # axes: (x_i, x_j, rest...)
    out = None
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            rest = [p for p in range(k + 1) if p not in (i, j)]
            pos = [i, j] + rest
            term = np.transpose(b, np.argsort(pos)) * (-1) ** (i + j)
            out = term if out is None else out + term
    return out


# ---------------------------------------------------------------- connections

@dataclass(frozen=True, eq=False)
class NomizuConnection:
    """Invariant metric connection: ``Lambda[a]`` is the matrix of Lambda(X_a)."""

    model: LieModel
    Lambda: np.ndarray

    @cached_property
    def torsion(self) -> np.ndarray:
        return torsion_of(self)

    def at(self, v: np.ndarray) -> np.ndarray:
        return np.tensordot(v, self.Lambda, axes=(0, 0))

    def skew_residual(self) -> float:
        g = self.model.metric
        return max((max_abs(L.T @ g + g @ L) for L in self.Lambda), default=0.0)


def levi_civita(model: LieModel) -> NomizuConnection:
    """Koszul formula: Lambda(X)Y = 1/2 [X,Y]_m + U(X,Y)."""
    cached = model.__dict__.get("_levi_civita")
    if cached is not None:
        return cached
    g = model.metric
    bg = np.einsum("abk,kc->abc", model.bracket_m, g)  # g([X_a, X_b]_m, X_c)
    lower = (bg + np.transpose(bg, (1, 2, 0)) + np.transpose(bg, (2, 1, 0))) / 2
    # lower[a,b,c] = g(Lambda(X_a) X_b, X_c)
    lam = np.einsum("ic,abc->aib", model.fiber.inverse, lower)
    conn = NomizuConnection(model, lam)
    model.__dict__["_levi_civita"] = conn
    return conn


def torsion_of(conn: NomizuConnection) -> np.ndarray:
    """T(X,Y,Z) = g(Lambda(X)Y - Lambda(Y)X - [X,Y]_m, Z)."""
    lam = conn.Lambda
    vec = np.transpose(lam, (0, 2, 1)) - np.transpose(lam, (2, 0, 1)) - conn.model.bracket_m
    return np.einsum("abk,kc->abc", vec, conn.model.metric)


def torsion_endomorphisms(model: LieModel, torsion: np.ndarray) -> np.ndarray:
    """Matrices of Y -> T(X_a, Y, .)^sharp."""
    return np.einsum("il,abl->aib", model.fiber.inverse, torsion)


def with_torsion(base: NomizuConnection, torsion: np.ndarray, tol: float = DEFAULT.check) -> NomizuConnection:
    """g(nabla_X Y, Z) = g(nabla^base_X Y, Z) + 1/2 T(X, Y, Z)."""
    res = antisymmetry_residual(torsion)
    if res > tol:
        raise ValueError(f"torsion is not a 3-form (antisymmetry residual {res:.2e})")
    return NomizuConnection(base.model, base.Lambda + torsion_endomorphisms(base.model, torsion) / 2)


def canonical_homogeneous(model: LieModel) -> NomizuConnection:
    """The connection with Lambda = 0."""
    return NomizuConnection(model, zeros((model.dm,) * 3, model.exact))


# ---------------------------------------------------------------- curvature

def curvature(conn: NomizuConnection) -> np.ndarray:
    """R[a,b] = [L_a, L_b] - L([X_a,X_b]_m) - ad([X_a,X_b]_h)|_m."""
    lam, model = conn.Lambda, conn.model
    prod = np.einsum("aij,bjk->abik", lam, lam)
    r = prod - np.transpose(prod, (1, 0, 2, 3))
    r = r - np.einsum("abc,cij->abij", model.bracket_m, lam)
    if model.dh:
        r = r - np.einsum("abp,pij->abij", model.bracket_h, model.ad_h)
    return r


def curvature_tensor(conn: NomizuConnection) -> np.ndarray:
    """R(X,Y,Z,V) = g(R(X,Y)Z, V)."""
    return np.einsum("xyiz,iv->xyzv", curvature(conn), conn.model.metric)


def nabla_invariant(conn: NomizuConnection, s: np.ndarray, x: np.ndarray, contra: int = 0,
                    tol: float = DEFAULT.check, check: bool = True) -> np.ndarray:
    if check:
        res = conn.model.invariance_residual(s, contra)
        if res > tol:
            raise ValueError(f"tensor is not isotropy-invariant (residual {res:.2e})")
    return endo_action(conn.at(x), s, contra)


def nabla_all(conn: NomizuConnection, s: np.ndarray, contra: int = 0) -> np.ndarray:
    """Stack of nabla_{X_a} s over the basis of m."""
    return np.stack([endo_action(L, s, contra) for L in conn.Lambda]) if conn.model.dm else np.zeros((0,))


def lie_derivative(model: LieModel, v: np.ndarray, s: np.ndarray, contra: int = 0,
                   tol: float = DEFAULT.check, check: bool = True) -> np.ndarray:
    """L_V S = nabla^g_V S - A_V . S with A_V(X) = nabla^g_X V."""
    if check:
        res = model.invariance_residual(s, contra)
        if res > tol:
            raise ValueError(f"tensor is not isotropy-invariant (residual {res:.2e})")
    lc = levi_civita(model)
    a_v = np.einsum("aib,b->ia", lc.Lambda, v)
    return endo_action(lc.at(v), s, contra) - endo_action(a_v, s, contra)


def bianchi_residual(conn: NomizuConnection) -> np.ndarray:
    """cyclic_{XYZ} R(X,Y,Z,V) - sigma_T(X,Y,Z,V) as a 4-index array."""
    r4 = curvature_tensor(conn)
    t = conn.torsion
    tt = np.einsum("xyl,lm,zvm->xyzv", t, conn.model.fiber.inverse, t)
    return cyclic_sum_array(r4) - cyclic_sum_array(tt)


def bianchi_check(conn: NomizuConnection, tol: float = DEFAULT.check) -> VerificationReport:
    rep = VerificationReport("bianchi", fingerprint=conn.model.fingerprint(), mode=_mode(conn.model))
    par = max_abs(nabla_all(conn, conn.torsion))
    rep.add("torsion parallel", par, tol, anchor="parallel skew torsion",
            notes="" if par < tol else "torsion not parallel; identity not expected")
    rep.add("cyclic R = sigma_T", max_abs(bianchi_residual(conn)), tol,
            anchor="first Bianchi identity for parallel skew torsion")
    return rep


# ---------------------------------------------------------------- holonomy

def _orth_rows(rows: np.ndarray, thresh: float) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    u, s, vt = np.linalg.svd(rows, full_matrices=False)
    scale = max(1.0, s[0]) if s.size else 1.0
    return vt[s > thresh * scale]


def holonomy_algebra(conn: NomizuConnection, thresh: float = DEFAULT.rank,
                     max_rounds: int = DEFAULT.max_closure_rounds) -> list[np.ndarray]:
    """Computed holonomy algebra: span of curvature closed under [Lambda(m), .],
    [ad(h), .] and commutators.  Always evaluated in floating point."""
    model = conn.model
    d = model.dm
    full = d * (d - 1) // 2
    r = as_float(curvature(conn))
    gens = [r[a, b] for a in range(d) for b in range(a + 1, d)]
    if not gens:
        return []
    ops = [as_float(L) for L in conn.Lambda] + [as_float(a) for a in model.ad_h]
    basis = _orth_rows(np.array([g.ravel() for g in gens]), thresh)
    for _ in range(max_rounds):
        mats = [b.reshape(d, d) for b in basis]
        cands = [op @ m - m @ op for op in ops for m in mats]
        cands += [a @ b - b @ a for i, a in enumerate(mats) for b in mats[i + 1:]]
        if not cands:
            break
        new = _orth_rows(np.vstack([basis] + [c.ravel()[None] for c in cands]), thresh)
        if new.shape[0] == basis.shape[0]:
            break
        basis = new
        if basis.shape[0] >= full:
            break
    else:
        log.warning("holonomy closure did not stabilize; returning current span")
    if basis.shape[0] >= full:
        log.info("holonomy closure reached dim so(m) = %d", full)
    return [b.reshape(d, d) for b in basis]


def check_invariant_splitting(conn: NomizuConnection, subspaces: list[np.ndarray],
                              tol: float = DEFAULT.check, holonomy: list | None = None) -> VerificationReport:
    """Every holonomy element maps each subspace into itself."""
    model = conn.model
    fib = model.fiber
    g = as_float(model.metric)
    dims = [s.shape[1] for s in subspaces]
    allv = np.concatenate([as_float(s) for s in subspaces], axis=1) if subspaces else np.zeros((model.dm, 0))
    if sum(dims) != model.dm or (allv.size and np.linalg.matrix_rank(allv) != model.dm):
        raise ValueError("subspaces do not span m")
    for i in range(len(subspaces)):
        for j in range(i + 1, len(subspaces)):
            if max_abs(as_float(subspaces[i]).T @ g @ as_float(subspaces[j])) > 1e-9:
                raise ValueError("subspaces are not orthogonal")
    rep = VerificationReport("invariant splitting", fingerprint=model.fingerprint(), mode=_mode(model))
    hol = holonomy_algebra(conn) if holonomy is None else holonomy
    for k, s in enumerate(subspaces):
        sf = as_float(s)
        if sf.shape[1] == 0:
            rep.add(f"subspace {k} invariant", 0.0, tol, anchor="holonomy-invariant splitting", vacuous=True)
            continue
        comp = np.eye(model.dm) - as_float(fib.projector(s))
        res = max((max_abs(comp @ a @ sf) for a in hol), default=0.0)
        rep.add(f"subspace {k} invariant", res, tol, anchor="holonomy-invariant splitting")
    return rep
