"""Dense multilinear algebra on the fiber m.

Tensors are plain numpy arrays.  A ``(0, k)`` tensor (in particular a
k-form) has ``k`` covariant axes; an endomorphism ``A`` is stored as a matrix
with ``A[i, j]`` the i-th component of ``A e_j``; vectors are 1-d arrays.
Arrays with ``dtype=object`` hold :class:`fractions.Fraction` entries and
are treated as exact throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg

ZERO = Fraction(0)


# ---------------------------------------------------------------- scalars

def is_exact(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x)).limit_denominator(10**12) if not float(x).is_integer() else Fraction(int(x))


def exact(a) -> np.ndarray:
    """Object array of Fractions with the same shape as ``a``."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = to_fraction(arr[idx])
    return out


def as_float(a) -> np.ndarray:
    return np.asarray(a, dtype=float)


def convert(a, exact_mode: bool) -> np.ndarray:
    return exact(a) if exact_mode else as_float(a)


def scalar(x, exact_mode: bool):
    return to_fraction(x) if exact_mode else float(x)


def zeros(shape, exact_mode: bool = False) -> np.ndarray:
    if exact_mode:
        out = np.empty(shape, dtype=object)
        out.fill(ZERO)
        return out
    return np.zeros(shape)


def eye(n: int, exact_mode: bool = False) -> np.ndarray:
    out = zeros((n, n), exact_mode)
    for i in range(n):
        out[i, i] = Fraction(1) if exact_mode else 1.0
    return out


def max_abs(a) -> float:
    """Max-norm of an array as a float (exact zero stays 0.0)."""
    arr = np.asarray(a)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a nonnegative Fraction when it is rational."""
    if x < 0:
        return None
    n, d = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


def sqrt(x, exact_mode: bool):
    if exact_mode:
        r = exact_sqrt(to_fraction(x))
        if r is not None:
            return r
    return math.sqrt(float(x))


# ---------------------------------------------------------------- linear algebra

def inv(m: np.ndarray) -> np.ndarray:
    if not is_exact(m):
        return np.linalg.inv(m)
    n = m.shape[0]
    a = np.concatenate([m.copy(), eye(n, True)], axis=1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r, col] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("singular matrix")
        a[[col, piv]] = a[[piv, col]]
        a[col] = a[col] / a[col, col]
        for r in range(n):
            if r != col and a[r, col] != 0:
                a[r] = a[r] - a[r, col] * a[col]
    return a[:, n:]


def lstsq_residual(basis: np.ndarray, y: np.ndarray):
    """Coefficients and residual of ``y`` against the columns of ``basis``.

    Works for exact arrays through the normal equations (columns must be
    independent).
    """
    if basis.shape[1] == 0:
        return basis[:0, 0] if basis.ndim == 2 else np.zeros(0), y
    if is_exact(basis) or is_exact(y):
        gram = basis.T @ basis
        coef = inv(gram) @ (basis.T @ y)
    else:
        coef = np.linalg.lstsq(basis, y, rcond=None)[0]
    return coef, y - basis @ coef


def independent_columns(vectors: np.ndarray, tol: float = 1e-10) -> list[int]:
    """Indices of a maximal independent prefix-greedy subset of columns."""
    chosen: list[int] = []
    exact_mode = is_exact(vectors)
    rows = []
    for j in range(vectors.shape[1]):
        v = vectors[:, j].copy()
        for piv, r in rows:
            if v[piv] != 0:
                v = v - v[piv] * r
        nz = [i for i in range(len(v)) if (v[i] != 0 if exact_mode else abs(v[i]) > tol)]
        if not nz:
            continue
        piv = max(nz, key=lambda i: abs(v[i]))
        rows.append((piv, v / v[piv]))
        chosen.append(j)
    return chosen


# ---------------------------------------------------------------- fiber

@dataclass(frozen=True, eq=False)
class Fiber:
    """Inner-product space (m, g)."""

    metric: np.ndarray

    def __post_init__(self):
        g = self.metric
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be square, got shape {g.shape}")
        if max_abs(g - g.T) > 0:
            raise ValueError("metric is not symmetric")
        if g.shape[0] and np.any(np.linalg.eigvalsh(as_float(g)) <= 0):
            raise ValueError("metric is not positive definite")

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.metric)

    @cached_property
    def inverse(self) -> np.ndarray:
        return inv(self.metric)

    def flat(self, v: np.ndarray) -> np.ndarray:
        return self.metric @ v

    def sharp(self, a: np.ndarray) -> np.ndarray:
        return self.inverse @ a

    def inner(self, u, v):
        return u @ self.metric @ v

    def projector(self, basis: np.ndarray) -> np.ndarray:
        """g-orthogonal projector onto the column span of ``basis``."""
        if basis.shape[1] == 0:
            return zeros((self.dim, self.dim), self.exact)
        gram = basis.T @ self.metric @ basis
        return basis @ inv(gram) @ basis.T @ self.metric

    def coordinates(self, basis: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Coordinates of the g-orthogonal projection of ``v`` in ``basis``."""
        gram = basis.T @ self.metric @ basis
        return inv(gram) @ basis.T @ self.metric @ v

    def complement(self, basis: np.ndarray) -> np.ndarray:
        """Basis of the g-orthogonal complement, built from projected e_j."""
        p = eye(self.dim, self.exact) - self.projector(basis)
        if self.exact and is_exact(basis):
            return p[:, independent_columns(p)]
        # pivoted QR keeps the best-conditioned projected e_j; greedy selection can pick near-null columns
        rank = np.linalg.matrix_rank(as_float(basis)) if basis.shape[1] else 0
        _, _, piv = scipy.linalg.qr(as_float(p), pivoting=True, mode="economic")
        return p[:, sorted(piv[: self.dim - rank])]

    def endomorphism(self, form2: np.ndarray) -> np.ndarray:
        """Endomorphism Y -> form2(Y, .)^sharp of a (0,2)-tensor."""
        return self.inverse @ form2.T

    def sectional_normalize(self, v):
        n = self.inner(v, v)
        return v / sqrt(n, self.exact)


def musical_flat(fiber: Fiber, v: np.ndarray) -> np.ndarray:
    return fiber.flat(v)


def musical_sharp(fiber: Fiber, a: np.ndarray) -> np.ndarray:
    return fiber.sharp(a)


# ---------------------------------------------------------------- forms

def alternate(t: np.ndarray) -> np.ndarray:
    """Sum over permutations of all axes with signs (no normalization)."""
    k = t.ndim
    if k < 2:
        return t.copy()
    out = None
    for perm in itertools.permutations(range(k)):
        term = np.transpose(t, perm) * _perm_sign(perm)
        out = term if out is None else out + term
    return out


def _perm_sign(perm) -> int:
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def antisymmetry_residual(t: np.ndarray) -> float:
    """Max deviation from total antisymmetry."""
    res = 0.0
    for i in range(t.ndim - 1):
        res = max(res, max_abs(t + np.swapaxes(t, i, i + 1)))
    return res


def wedge(a, b) -> np.ndarray:
    """Shuffle-sum wedge product, no factorial normalization.

    For a 1-form and a 2-form this gives
    (a^b)(X,Y,Z) = a(X)b(Y,Z) + a(Y)b(Z,X) + a(Z)b(X,Y).
    """
    a, b = np.asarray(a), np.asarray(b)
    p, q = a.ndim, b.ndim
    if p + q > 0 and a.shape[:1] and b.shape[:1] and p and q and a.shape[0] != b.shape[0]:
        raise ValueError("forms live on different fibers")
    dim = a.shape[0] if p else (b.shape[0] if q else 0)
    if p + q > dim and p and q:
        raise ValueError(f"degree {p + q} exceeds dimension {dim}")
    if p == 0 or q == 0:
        return a * b
    prod = np.multiply.outer(a, b)
    return alternate(prod) / (math.factorial(p) * math.factorial(q))


def wedge_all(*forms) -> np.ndarray:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def interior_product(v: np.ndarray, a: np.ndarray) -> np.ndarray:
    """(v _| a)(X_2..X_k) = a(v, X_2, ..., X_k)."""
    a = np.asarray(a)
    if a.ndim == 0:
        raise ValueError("interior product of a 0-form")
    return np.tensordot(v, a, axes=(0, 0))


def cyclic_sum(f: Callable) -> Callable:
    """(X, Y, Z) -> f(X,Y,Z) + f(Y,Z,X) + f(Z,X,Y)."""

    def summed(x, y, z, *rest):
        return f(x, y, z, *rest) + f(y, z, x, *rest) + f(z, x, y, *rest)

    return summed


def cyclic_sum_array(t: np.ndarray) -> np.ndarray:
    """Array form of :func:`cyclic_sum` over the first three axes."""
    rest = tuple(range(3, t.ndim))
    return t + np.transpose(t, (2, 0, 1) + rest) + np.transpose(t, (1, 2, 0) + rest)


def endo_action(a: np.ndarray, s: np.ndarray, contra: int = 0) -> np.ndarray:
    """Derivation action of the endomorphism ``a`` on the tensor ``s``.

    The first ``contra`` axes of ``s`` are contravariant, the rest covariant:
    (a.s)(X_1..X_k) = -sum_j s(.., a X_j, ..) on covariant slots and
    a applied to each contravariant slot.  For an endomorphism this is the
    commutator a s - s a.
    """
    s = np.asarray(s)
    out = None
    for slot in range(s.ndim):
        if slot < contra:
            term = np.moveaxis(np.tensordot(a, s, axes=(1, slot)), 0, slot)
        else:
            term = -np.moveaxis(np.tensordot(s, a, axes=(slot, 0)), -1, slot)
        out = term if out is None else out + term
    if out is None:
        return s * 0
    return out


def pullback(t: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Restrict a covariant tensor to the column span of ``basis``."""
    out = t
    for _ in range(t.ndim):
        out = np.tensordot(out, basis, axes=(0, 0))
    return out


def restrict(t: np.ndarray, *bases: np.ndarray) -> np.ndarray:
    """t(B_1 ., B_2 ., ...): one basis per covariant slot, contracted one slot at a time."""
    out = t
    for b in bases:
        out = np.tensordot(out, b, axes=(0, 0))
    return out
