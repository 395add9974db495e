"""Pre-build oracles: solve for metric scalings realizing a target (alpha, delta).

The catalog freezes the scalings found here; tests re-derive them independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from .catalog import _reeb_phi_on_v, sp2_model, su2_model
from .homogeneous import LieModel, d_invariant
from .quaternion import right_mult_matrix, unit
from .sasaki import EVEN, AlmostContactTriple, check_3ad
from .tensors import convert, scalar, wedge, zeros


class NoScalingError(ValueError):
    """No positive scalings in the search box reproduce the target structure."""

    def __init__(self, message: str, landscape: dict):
        self.landscape = landscape
        super().__init__(message)


@dataclass(frozen=True)
class ScalingFamily:
    """Vertical/horizontal rescalings of a fixed background, with xi_i = delta * E_i."""

    name: str
    n_params: int

    def model(self, scalings, exact_mode: bool = False) -> LieModel:
        if self.name == "su2":
            m = su2_model(1, exact_mode)
            return LieModel(m.structure, m.isotropy, m.complement, m.metric / m.metric[0, 0] * scalings[0],
                            m.labels, "su2 family")
        return sp2_model(scalings[0], scalings[1], exact_mode, name="sp2 family")

    def triple(self, scalings, alpha, delta, exact_mode: bool = False) -> AlmostContactTriple:
        model = self.model(scalings, exact_mode)
        dm = model.dm
        xi = zeros((3, dm), exact_mode)
        for i in range(3):
            xi[i, i] = scalar(delta, exact_mode)
        phi = _reeb_phi_on_v(dm, (0, 1, 2), exact_mode)
        if dm == 7:
            for i in range(3):
                phi[i][3:7, 3:7] = convert(-right_mult_matrix(unit(i + 1)), exact_mode)
        return AlmostContactTriple(model, xi, phi, scalar(alpha, exact_mode), scalar(delta, exact_mode))


FAMILIES = {"su2": ScalingFamily("su2", 1), "sp2": ScalingFamily("sp2", 2)}


def structure_residuals(family: ScalingFamily, scalings, alpha, delta) -> np.ndarray:
    """Stacked residuals of |xi_i| = 1 and d eta_i = 2 alpha Phi_i + 2 (alpha - delta) eta_j ^ eta_k."""
    return _residual_function(family, alpha, delta)(np.asarray(scalings, dtype=float))


def _residual_function(family: ScalingFamily, alpha, delta):
    """Residuals as a function of the scalings.

    With a diagonal metric g = diag(s), eta_i = g xi_i and Phi_i = g phi_i are
    linear in s, and d is metric-independent, so the pieces are precomputed once.
    """
    t = family.triple((1.0,) * family.n_params, alpha, delta)
    dm = t.model.dm
    blocks = [slice(0, 3)] + ([slice(3, dm)] if family.n_params == 2 else [])
    d_xi = [d_invariant(t.model, t.xi[i], check=False) for i in range(3)]  # d of the unscaled xi^flat

    def fun(scalings):
        diag = np.zeros(dm)
        for b, sc in zip(blocks, scalings):
            diag[b] = sc
        eta = t.xi * diag
        out = [np.array([eta[i] @ t.xi[i] - 1.0 for i in range(3)])]
        for i, j, k in EVEN:
            rhs = 2 * alpha * diag[:, None] * t.phi[i] + 2 * (alpha - delta) * wedge(eta[j], eta[k])
            out.append((scalings[0] * d_xi[i] - rhs).ravel())
        return np.concatenate(out)

    return fun


def _rationalize(x: float, max_den: int = 1000) -> Fraction:
    return Fraction(x).limit_denominator(max_den)


def solve_scalings(alpha, delta, family: str = "sp2", grid: int = 25, tol: float = 1e-12):
    """Coarse log-grid search followed by least-squares refinement on the log scalings.

    Returns a tuple of scalings; Fractions when the rational guess re-verifies
    exactly, floats otherwise.
    """
    fam = FAMILIES[family]
    if delta == 0:
        raise NoScalingError("delta = 0: the Reeb fields xi_i = delta E_i vanish, so no unit Reeb fields exist",
                             {"min_residual": float("nan")})
    alpha, delta = float(alpha), float(delta)

    residual = _residual_function(fam, alpha, delta)

    def fun(logs):
        return residual(np.exp(logs))

    axis = np.linspace(np.log(1e-3), np.log(1e3), grid)
    pts = np.stack(np.meshgrid(*[axis] * fam.n_params), -1).reshape(-1, fam.n_params)
    norms = np.array([np.linalg.norm(fun(p)) for p in pts])
    start = pts[int(np.argmin(norms))]
    sol = least_squares(fun, start, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    resid = float(np.max(np.abs(sol.fun)))
    landscape = {"grid_min": float(norms.min()), "grid_max": float(norms.max()), "refined": resid,
                 "best_scalings": np.exp(sol.x).tolist()}
    if resid > tol:
        raise NoScalingError(f"no scalings found for (alpha, delta) = ({alpha}, {delta}); "
                             f"best residual {resid:.3e}", landscape)
    found = np.exp(sol.x)
    guess = tuple(_rationalize(s) for s in found)
    exact_params = [_rationalize(alpha), _rationalize(delta)]
    if float(exact_params[0]) == alpha and float(exact_params[1]) == delta:
        t = fam.triple(guess, *exact_params, exact_mode=True)
        if check_3ad(t, tol=tol).passed and all(t.eta[i] @ t.xi[i] == 1 for i in range(3)):
            return guess
    return tuple(float(s) for s in found)
