"""Almost 3-contact metric structures, 3-(alpha, delta)-Sasaki checks, the
canonical connection, and nearly Kaehler checks."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .config import DEFAULT
from .homogeneous import (
    LieModel,
    NomizuConnection,
    check_invariant_splitting,
    d_invariant,
    levi_civita,
    nabla_all,
    with_torsion,
)
from .report import RefusedError, VerificationReport
from .tensors import (
    antisymmetry_residual,
    eye,
    is_exact,
    max_abs,
    scalar,
    wedge,
    wedge_all,
)

EVEN = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass(frozen=True, eq=False)
class AlmostContactTriple:
    """(xi_i, eta_i, phi_i), i = 1..3, on a model's m, with parameters.

    ``xi`` has shape (3, dm); ``phi`` has shape (3, dm, dm).
    """

    model: LieModel
    xi: np.ndarray
    phi: np.ndarray
    alpha: object = 1
    delta: object = 1

    def __post_init__(self):
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    @cached_property
    def eta(self) -> np.ndarray:
        return self.xi @ self.model.metric

    @cached_property
    def Phi(self) -> np.ndarray:
        """Fundamental 2-forms Phi_i(X, Y) = g(X, phi_i Y)."""
        return np.einsum("ab,ibc->iac", self.model.metric, self.phi)

    @property
    def vertical(self) -> np.ndarray:
        return self.xi.T

    @cached_property
    def horizontal(self) -> np.ndarray:
        return self.model.fiber.complement(self.vertical)

    @cached_property
    def proj_vertical(self) -> np.ndarray:
        return self.model.fiber.projector(self.vertical)

    @cached_property
    def proj_horizontal(self) -> np.ndarray:
        return eye(self.model.dm, self.model.exact) - self.proj_vertical

    @property
    def beta(self):
        return 2 * (self.delta - 2 * self.alpha)

    @property
    def is_parallel(self) -> bool:
        return self.delta == 2 * self.alpha

    def rotated(self, rot: np.ndarray) -> "AlmostContactTriple":
        """Act on the associated sphere: xi'_i = sum_j rot[i,j] xi_j (rot in SO(3))."""
        return replace(self, xi=np.tensordot(rot, self.xi, axes=(1, 0)),
                       phi=np.tensordot(rot, self.phi, axes=(1, 0)))


ThreeADStructure = AlmostContactTriple


def validate_acm(triple: AlmostContactTriple, tol: float = DEFAULT.check) -> VerificationReport:
    model = triple.model
    dm = model.dm
    if dm % 4 != 3:
        raise ValueError(f"dimension {dm} is not of the form 4n+3")
    g, xi, eta, phi = model.metric, triple.xi, triple.eta, triple.phi
    one = eye(dm, model.exact)
    rep = VerificationReport("acm", fingerprint=model.fingerprint(), mode=_mode(model))
    anchor = "almost contact metric axioms"

    def worst(f):
        return max(max_abs(f(i)) for i in range(3))

    rep.add("|xi_i| = 1", worst(lambda i: np.array([eta[i] @ xi[i] - 1])), tol, anchor)
    rep.add("phi_i xi_i = 0", worst(lambda i: phi[i] @ xi[i]), tol, anchor)
    rep.add("eta_i o phi_i = 0", worst(lambda i: eta[i] @ phi[i]), tol, anchor)
    rep.add("phi_i^2 = -id + xi_i (x) eta_i",
            worst(lambda i: phi[i] @ phi[i] + one - np.multiply.outer(xi[i], eta[i])), tol, anchor)
    rep.add("g(phi X, phi Y) = g - eta (x) eta",
            worst(lambda i: phi[i].T @ g @ phi[i] - g + np.multiply.outer(eta[i], eta[i])), tol, anchor)
    anchor3 = "almost 3-contact compatibility"
    rep.add("phi_i xi_j = xi_k", max(max_abs(phi[i] @ xi[j] - xi[k]) for i, j, k in EVEN), tol, anchor3)
    rep.add("eta_i o phi_j = eta_k", max(max_abs(eta[i] @ phi[j] - eta[k]) for i, j, k in EVEN), tol, anchor3)
    rep.add("phi_i phi_j = phi_k + xi_i (x) eta_j",
            max(max_abs(phi[i] @ phi[j] - phi[k] - np.multiply.outer(xi[i], eta[j])) for i, j, k in EVEN),
            tol, anchor3)
    inv = max(max(model.invariance_residual(xi[i], 1), model.invariance_residual(phi[i], 1)) for i in range(3))
    rep.add("structure isotropy-invariant", inv, tol, vacuous=model.dh == 0)
    return rep


def _mode(model: LieModel) -> str:
    return "rational" if model.exact else "float"


def check_3ad(triple: AlmostContactTriple, tol: float = DEFAULT.check) -> VerificationReport:
    """d eta_i = 2 alpha Phi_i + 2 (alpha - delta) eta_j ^ eta_k."""
    model, a, d = triple.model, triple.alpha, triple.delta
    rep = VerificationReport("3ad", fingerprint=model.fingerprint(), mode=_mode(model))
    for i, j, k in EVEN:
        deta = d_invariant(model, triple.eta[i], tol=tol)
        rhs = 2 * a * triple.Phi[i] + 2 * (a - d) * wedge(triple.eta[j], triple.eta[k])
        rep.add(f"d eta_{i + 1} = 2a Phi_{i + 1} + 2(a-d) eta_{j + 1}^eta_{k + 1}", max_abs(deta - rhs), tol,
                anchor="3-(alpha,delta)-Sasaki structure equation")
    return rep


def canonical_torsion(triple: AlmostContactTriple) -> np.ndarray:
    """T = 2 alpha sum_i eta_i ^ Phi_i - 2 (alpha - delta) eta_1 ^ eta_2 ^ eta_3."""
    a, d = triple.alpha, triple.delta
    t = sum(wedge(triple.eta[i], triple.Phi[i]) for i in range(3)) * (2 * a)
    return t - 2 * (a - d) * wedge_all(*triple.eta)


def measure_beta(conn: NomizuConnection, triple: AlmostContactTriple):
    """Least-squares beta in nabla_X phi_i = beta (eta_k(X) phi_j - eta_j(X) phi_k).

    Returns (beta, residual of the fitted law).
    """
    dphi = np.stack([nabla_all(conn, triple.phi[i], contra=1) for i in range(3)])  # (i, a, ., .)
    basis = np.zeros_like(dphi)
    eta, phi = triple.eta, triple.phi
    for i, j, k in EVEN:
        basis[i] = np.einsum("a,pq->apq", eta[k], phi[j]) - np.einsum("a,pq->apq", eta[j], phi[k])
    num = np.sum(dphi * basis)
    den = np.sum(basis * basis)
    beta = num / den
    return beta, max_abs(dphi - beta * basis)


def canonical_connection_report(triple: AlmostContactTriple, conn: NomizuConnection,
                                tol: float = DEFAULT.check) -> VerificationReport:
    model = triple.model
    rep = VerificationReport("canonical connection", fingerprint=model.fingerprint(), mode=_mode(model))
    rep.add("torsion consistency", max_abs(conn.torsion - canonical_torsion(triple)), tol,
            anchor="torsion formula of the canonical connection")
    rep.add("metric compatibility", conn.skew_residual(), tol)
    beta, fit = measure_beta(conn, triple)
    rep.add("(a) nabla phi_i law", fit, tol, anchor="covariant derivative of phi_i")
    rep.add("(a) beta = 2(delta - 2 alpha)", abs(beta - triple.beta), tol,
            anchor="value of beta", notes=f"measured beta = {float(beta):.12g}")
    rep.add("(b) nabla T = 0", max_abs(nabla_all(conn, conn.torsion)), tol, anchor="parallel torsion")
    horiz = triple.horizontal
    split = check_invariant_splitting(conn, [triple.vertical, horiz], tol=tol)
    for c in split.checks:
        rep.add(f"(c) V+H splitting: {c.name}", c.residual, tol, anchor="canonical connection preserves V+H",
                vacuous=c.status == "vacuous")
    return rep


def canonical_connection(triple: AlmostContactTriple, tol: float = DEFAULT.check,
                         check: bool = True) -> NomizuConnection:
    conn = with_torsion(levi_civita(triple.model), canonical_torsion(triple), tol=tol)
    if check:
        rep = canonical_connection_report(triple, conn, tol)
        if not rep.passed:
            failed = ", ".join(c.name for c in rep.failures)
            raise RefusedError("canonical-connection postconditions", rep, failed)
    return conn


# ---------------------------------------------------------------- nearly Kaehler

@dataclass(frozen=True, eq=False)
class NearlyKahlerStructure:
    model: LieModel
    J: np.ndarray

    @cached_property
    def nabla_J(self) -> np.ndarray:
        """Stack of (nabla^g_{X_a} J)."""
        return nabla_all(levi_civita(self.model), self.J, contra=1)

    @cached_property
    def characteristic_torsion(self) -> np.ndarray:
        """T^c(X, Y, Z) = g((nabla^g_X J) J Y, Z)."""
        return np.einsum("aij,jb,ic->abc", self.nabla_J, self.J, self.model.metric)

    @cached_property
    def characteristic_connection(self) -> NomizuConnection:
        return with_torsion(levi_civita(self.model), self.characteristic_torsion)


def check_nearly_kahler(model: LieModel, J: np.ndarray, tol: float = DEFAULT.check) -> VerificationReport:
    rep = VerificationReport("nearly kaehler", fingerprint=model.fingerprint(), mode=_mode(model))
    g, dm = model.metric, model.dm
    rep.add("J^2 = -id", max_abs(J @ J + eye(dm, model.exact)), tol, anchor="almost Hermitian")
    rep.add("g(JX, JY) = g(X, Y)", max_abs(J.T @ g @ J - g), tol, anchor="almost Hermitian")
    rep.add("J isotropy-invariant", model.invariance_residual(J, 1), tol, vacuous=model.dh == 0)
    nk = NearlyKahlerStructure(model, J)
    dj = nk.nabla_J  # dj[a] = nabla_{X_a} J
    # (nabla_X J) X for basis X and pairwise sums X + Y
    diag = max((max_abs(dj[a] @ _e(dm, a, model.exact)) for a in range(dm)), default=0.0)
    pol = 0.0
    for a in range(dm):
        for b in range(a + 1, dm):
            x = _e(dm, a, model.exact) + _e(dm, b, model.exact)
            pol = max(pol, max_abs((dj[a] + dj[b]) @ x))
    rep.add("(nabla_X J) X = 0 (basis and polarized)", max(diag, pol), tol,
            anchor="nearly Kaehler condition")
    form = np.einsum("aib,ic->abc", dj, g)  # g((nabla_X J) Y, Z)
    skew = max_abs(form + np.transpose(form, (1, 0, 2)))
    rep.add("g((nabla_X J)Y, Z) skew in X, Y", skew, tol, anchor="nearly Kaehler condition",
            notes="agrees with polarized form" if (skew < tol) == (max(diag, pol) < tol) else "DISAGREE")
    tc = nk.characteristic_torsion
    rep.add("characteristic torsion alternating", antisymmetry_residual(tc), tol,
            anchor="characteristic torsion of a nearly Kaehler manifold")
    if antisymmetry_residual(tc) < tol:
        cc = nk.characteristic_connection
        rep.add("nabla^c J = 0", max_abs(nabla_all(cc, J, contra=1)), tol,
                anchor="characteristic connection is Hermitian")
        rep.add("nabla^c T^c = 0", max_abs(nabla_all(cc, tc)), tol,
                anchor="characteristic torsion is parallel")
        rep.add("g((nabla_X J)Y, Z) alternating", antisymmetry_residual(form), tol,
                anchor="characteristic torsion of a nearly Kaehler manifold",
                notes="J-rotated variant of T^c")
        rep.add("nabla^c g((nabla J).,.) = 0", max_abs(nabla_all(cc, form)), tol,
                anchor="characteristic torsion is parallel")
    else:
        rep.refuse("nabla^c T^c = 0", notes="characteristic torsion not alternating")
    return rep


def _e(n, a, exact_mode):
    v = eye(n, exact_mode)[:, a]
    return v


def as_params(alpha, delta, exact_mode: bool):
    return scalar(alpha, exact_mode), scalar(delta, exact_mode)


__all__ = [
    "AlmostContactTriple",
    "ThreeADStructure",
    "NearlyKahlerStructure",
    "EVEN",
    "validate_acm",
    "check_3ad",
    "canonical_torsion",
    "canonical_connection",
    "canonical_connection_report",
    "measure_beta",
    "check_nearly_kahler",
    "is_exact",
]
