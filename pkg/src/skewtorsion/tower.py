"""Parallel 3-(alpha, delta)-Sasaki -> nearly Kaehler -> quaternionic Kaehler, against the direct quotient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .nearly_kahler import NKQuotientResult, build_nk_quotient
from .quaternionic import QKResult, _span_coefficients, build_qk_quotient
from .report import RefusedError, VerificationReport
from .sasaki import AlmostContactTriple, canonical_connection
from .submersion import QuotientModel, SubmersionSpec, build_quotient
from .tensors import as_float, max_abs


@dataclass
class TowerResult:
    nk: NKQuotientResult | None
    qk: QKResult | None
    direct: QuotientModel | None
    direct_I: np.ndarray | None
    report: VerificationReport
    stages: dict


def direct_quotient(triple: AlmostContactTriple, tol: float = DEFAULT.check):
    """Quotient along span(xi_1, xi_2, xi_3) with I_i = pi_* phi_i."""
    conn = canonical_connection(triple, tol)
    q = build_quotient(SubmersionSpec(conn, triple.vertical), tol)
    I = np.stack([q.push_endomorphism(triple.phi[i]) for i in range(3)])
    return q, I


def compare_tower(nk: NKQuotientResult, qk: QKResult, direct: QuotientModel, direct_I: np.ndarray,
                  tol: float = DEFAULT.check) -> VerificationReport:
    """Identify both 4-dimensional bases inside the original m and compare metric and span(I)."""
    rep = VerificationReport("tower consistency", fingerprint=direct.total.model.fingerprint(), mode="float")
    g = as_float(direct.total.model.metric)
    tower_vecs = as_float(nk.quotient.lift) @ as_float(qk.quotient.lift)
    dl = as_float(direct.lift)
    m = np.linalg.solve(dl.T @ g @ dl, dl.T @ g @ tower_vecs)  # tower coords -> direct coords
    rep.add("same horizontal space", max_abs(dl @ m - tower_vecs), tol, anchor="composed submersions")
    rep.add("metrics agree", max_abs(m.T @ as_float(direct.base.metric) @ m - as_float(qk.base.metric)), tol,
            anchor="composed submersions")
    minv = np.linalg.inv(m)
    carried = np.stack([m @ as_float(a) @ minv for a in qk.I])
    span = max(_span_coefficients(direct_I, c)[1] for c in carried)
    back = max(_span_coefficients(carried, as_float(d))[1] for d in direct_I)
    rep.add("quaternionic spans agree", max(span, back), tol, anchor="composed submersions")
    rep.add("torsion-free direct base", max_abs(direct.torsion), tol)
    return rep


def run_tower(triple: AlmostContactTriple, tol: float = DEFAULT.check) -> TowerResult:
    rep = VerificationReport("tower", fingerprint=triple.model.fingerprint(),
                             mode="rational" if triple.model.exact else "float")
    stages = {}
    nk = build_nk_quotient(triple, tol=tol)
    stages["nk"] = nk.report
    rep.extend(nk.report, "stage 1 (nearly Kaehler): ")
    if nk.base.dm < 4:
        rep.add("stage 2 (quaternionic)", 0.0, tol, vacuous=True,
                notes=f"base of dimension {nk.base.dm} leaves no room for a vertical plane")
        return TowerResult(nk, None, None, None, rep, stages)
    v = nk.vertical[:, 0]
    qk = build_qk_quotient(nk.nk, nk.vertical, v, tol)
    stages["qk"] = qk.report
    rep.extend(qk.report, "stage 2 (quaternionic): ")
    try:
        direct, direct_I = direct_quotient(triple, tol)
    except RefusedError as err:
        rep.refuse("stage 3 (direct quotient)", notes=str(err))
        return TowerResult(nk, qk, None, None, rep, stages)
    stages["direct"] = direct.report
    rep.extend(direct.report, "stage 3 (direct quotient): ")
    cmp = compare_tower(nk, qk, direct, direct_I, tol)
    stages["consistency"] = cmp
    rep.extend(cmp, "consistency: ")
    return TowerResult(nk, qk, direct, direct_I, rep, stages)
