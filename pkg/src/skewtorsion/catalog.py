"""Built-in models: homogeneous 3-(alpha, delta)-Sasaki spheres, derived
quotients, and negative controls."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .homogeneous import LieModel, validate_model
from .quaternion import right_mult_matrix, sp2_structure_constants, sp2_basis, unit
from .report import VerificationReport
from .sasaki import AlmostContactTriple, check_3ad, validate_acm
from .tensors import convert, scalar, zeros

EVEN = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass
class CatalogEntry:
    name: str
    model: LieModel
    triple: AlmostContactTriple | None = None
    J: np.ndarray | None = None
    V: np.ndarray | None = None
    params: dict = field(default_factory=dict)
    notes: str = ""
    expected: dict = field(default_factory=dict)

    def validate(self, tol: float = 1e-9) -> VerificationReport:
        rep = VerificationReport(f"load {self.name}", fingerprint=self.model.fingerprint(),
                                 mode="rational" if self.model.exact else "float")
        rep.extend(validate_model(self.model, tol), "model: ")
        if self.triple is not None and rep.passed:
            rep.extend(validate_acm(self.triple, tol), "acm: ")
            rep.extend(check_3ad(self.triple, tol), "3ad: ")
        return rep


def _reeb_phi_on_v(dm: int, v_idx, exact_mode: bool) -> np.ndarray:
    """phi_i on span(xi) with phi_i xi_j = xi_k (even permutations)."""
    phi = zeros((3, dm, dm), exact_mode)
    one = Fraction(1) if exact_mode else 1.0
    for i, j, k in EVEN:
        phi[i][v_idx[k], v_idx[j]] = one
        phi[i][v_idx[j], v_idx[k]] = -one
    return phi


def su2_model(delta=1, exact_mode: bool = False, bracket_constant: int = 2, name: str = "") -> LieModel:
    """su(2) with [e_i, e_j] = c0 e_k, metric making delta e_i * (c0/2)^-1 unit."""
    c = zeros((3, 3, 3), exact_mode)
    for i, j, k in EVEN:
        c[i, j, k] = scalar(bracket_constant, exact_mode)
        c[j, i, k] = -c[i, j, k]
    d = scalar(delta, exact_mode)
    s_v = (scalar(bracket_constant, exact_mode) / (2 * d)) ** 2
    metric = convert(np.eye(3), exact_mode) * s_v
    return LieModel(c, (), (0, 1, 2), metric, ("e1", "e2", "e3"), name or "su2")


def su2_3ad(alpha=1, delta=1, exact_mode: bool = False) -> CatalogEntry:
    """S^3 = SU(2) with Reeb fields xi_i = delta e_i, so [xi_i, xi_j] = 2 delta xi_k."""
    a, d = scalar(alpha, exact_mode), scalar(delta, exact_mode)
    if d == 0:
        raise ValueError("su2 family has no model with delta = 0")
    model = su2_model(d, exact_mode, name=f"su2_3ad({alpha},{delta})")
    xi = convert(np.eye(3), exact_mode) * d
    phi = _reeb_phi_on_v(3, (0, 1, 2), exact_mode)
    triple = AlmostContactTriple(model, xi, phi, a, d)
    return CatalogEntry(f"su2_3ad", model, triple, params={"alpha": a, "delta": d},
                        notes="SU(2) with bi-invariant metric; horizontal space is zero")


def sp2_scalings(alpha, delta):
    """Metric scalings (s_V, s_H) realizing (alpha, delta) on Sp(2)/Sp(1).

    Frozen from the scaling solver in ``oracles.solve_scalings``.
    """
    return 1 / (delta * delta), 1 / (alpha * delta)


def sp2_s7(alpha=1, delta=2, exact_mode: bool = False, scalings=None) -> CatalogEntry:
    """S^7 = Sp(2)/Sp(1) with the homogeneous 3-(alpha, delta)-Sasaki structure."""
    a, d = scalar(alpha, exact_mode), scalar(delta, exact_mode)
    if scalings is None:
        if d == 0 or a * d <= 0:
            raise ValueError(f"no Sp(2)/Sp(1) scaling for (alpha, delta) = ({alpha}, {delta})")
        s_v, s_h = sp2_scalings(a, d)
    else:
        s_v, s_h = (scalar(s, exact_mode) for s in scalings)
    model = sp2_model(s_v, s_h, exact_mode, name=f"sp2_s7({alpha},{delta})")
    xi = zeros((3, 7), exact_mode)
    for i in range(3):
        xi[i, i] = d
    phi = _reeb_phi_on_v(7, (0, 1, 2), exact_mode)
    for i in range(3):
        # phi_i on H is right multiplication by -e_i
        phi[i][3:7, 3:7] = convert(-right_mult_matrix(unit(i + 1)), exact_mode)
    triple = AlmostContactTriple(model, xi, phi, a, d)
    return CatalogEntry("sp2_s7", model, triple, params={"alpha": a, "delta": d},
                        notes=f"scalings s_V = {s_v}, s_H = {s_h}")


def sp2_model(s_v, s_h, exact_mode: bool = False, name: str = "sp2") -> LieModel:
    c = convert(sp2_structure_constants(), exact_mode)
    _, labels = sp2_basis()
    metric = zeros((7, 7), exact_mode)
    for i in range(3):
        metric[i, i] = s_v
    for i in range(3, 7):
        metric[i, i] = s_h
    return LieModel(c, (7, 8, 9), tuple(range(7)), metric, tuple(labels), name)


def product_s3xs3(exact_mode: bool = False) -> LieModel:
    """su(2) + su(2) with the bi-invariant metric; pair with the Lambda = 0 connection."""
    c = zeros((6, 6, 6), exact_mode)
    two = scalar(2, exact_mode)
    for off in (0, 3):
        for i, j, k in EVEN:
            c[off + i, off + j, off + k] = two
            c[off + j, off + i, off + k] = -two
    return LieModel(c, (), tuple(range(6)), convert(np.eye(6), exact_mode),
                    ("a1", "a2", "a3", "b1", "b2", "b3"), "product_s3xs3")


def broken_jacobi(exact_mode: bool = False) -> LieModel:
    """su(2) with one bracket tampered so that the Jacobi identity fails."""
    base = su2_model(1, exact_mode)
    c = base.structure.copy()
    c[0, 1, 0] = scalar(1, exact_mode)
    c[1, 0, 0] = -c[0, 1, 0]
    return LieModel(c, (), (0, 1, 2), base.metric, base.labels, "broken_jacobi")


def broken_acm(alpha=1, delta=2, exact_mode: bool = False) -> CatalogEntry:
    """sp2_s7 with phi_1 negated: fails the quaternionic compatibility."""
    entry = sp2_s7(alpha, delta, exact_mode)
    phi = entry.triple.phi.copy()
    phi[0] = -phi[0]
    triple = AlmostContactTriple(entry.model, entry.triple.xi, phi, entry.triple.alpha, entry.triple.delta)
    return CatalogEntry("broken_acm", entry.model, triple, params=entry.params)


def broken_3ad(exact_mode: bool = False) -> CatalogEntry:
    """Scalings for (1, 2) checked against (alpha, delta) = (1, 1)."""
    entry = sp2_s7(1, 2, exact_mode)
    t = entry.triple
    triple = AlmostContactTriple(t.model, t.xi, t.phi, scalar(1, exact_mode), scalar(1, exact_mode))
    return CatalogEntry("broken_3ad", t.model, triple, params={"alpha": 1, "delta": 1})


BASE_MODELS = {
    "su2_3ad": "S^3 = SU(2), 3-(alpha,delta)-Sasaki for any alpha, delta != 0",
    "sp2_s7": "S^7 = Sp(2)/Sp(1) with solved scalings (alpha*delta > 0)",
    "cp3_nk": "nearly Kaehler CP^3 = quotient of sp2_s7(a, 2a) along xi_1",
    "s4_qk": "quaternionic Kaehler S^4 = quotient of cp3_nk along pi_* span(xi_2, xi_3)",
    "product_s3xs3": "su(2)+su(2) with decomposable torsion (Lambda = 0)",
    "broken_jacobi": "negative control: fails the Jacobi identity",
    "broken_acm": "negative control: phi_1 negated on sp2_s7",
    "broken_3ad": "negative control: sp2_s7(1,2) scalings checked against (1,1)",
}


def catalog_list() -> list[dict]:
    return [{"name": k, "description": v} for k, v in BASE_MODELS.items()]


def load(name: str, params=None, exact_mode: bool = False) -> CatalogEntry:
    """Build a catalog entry; derived models are built by running the pipeline."""
    params = tuple(params) if params else None
    if name == "su2_3ad":
        return su2_3ad(*(params or (1, 2)), exact_mode=exact_mode)
    if name == "sp2_s7":
        return sp2_s7(*(params or (1, 2)), exact_mode=exact_mode)
    if name in ("cp3_nk", "s4_qk"):
        from .nearly_kahler import build_nk_quotient

        alpha = params[0] if params else 1
        src = sp2_s7(alpha, 2 * scalar(alpha, exact_mode), exact_mode)
        nk = build_nk_quotient(src.triple)
        if name == "cp3_nk":
            return CatalogEntry("cp3_nk", nk.quotient.base, J=nk.J, V=nk.vertical[:, 0],
                                params={"alpha": src.triple.alpha}, notes="derived quotient")
        from .quaternionic import build_qk_quotient

        qk = build_qk_quotient(nk.nk, nk.vertical, nk.vertical[:, 0])
        return CatalogEntry("s4_qk", qk.quotient.base, params={"k": qk.k}, notes="derived quotient")
    if name == "product_s3xs3":
        return CatalogEntry(name, product_s3xs3(exact_mode))
    if name == "broken_jacobi":
        return CatalogEntry(name, broken_jacobi(exact_mode))
    if name == "broken_acm":
        return broken_acm(*(params or (1, 2)), exact_mode=exact_mode)
    if name == "broken_3ad":
        return broken_3ad(exact_mode)
    raise KeyError(f"unknown catalog model '{name}'")
