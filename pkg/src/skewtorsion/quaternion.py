"""Integer quaternion arithmetic and the 2x2 quaternionic model of sp(2)."""

from __future__ import annotations

import numpy as np

# Hamilton product table on the basis (1, i, j, k): MULT[a, b, c] is the
# c-th component of e_a e_b.
MULT = np.zeros((4, 4, 4), dtype=int)
for a in range(4):
    MULT[0, a, a] = MULT[a, 0, a] = 1
for a in range(1, 4):
    MULT[a, a, 0] = -1
for a, b, c in [(1, 2, 3), (2, 3, 1), (3, 1, 2)]:
    MULT[a, b, c] = 1
    MULT[b, a, c] = -1


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.einsum("a,b,abc->c", p, q, MULT)


def qconj(p: np.ndarray) -> np.ndarray:
    return p * np.array([1, -1, -1, -1])


def unit(a: int) -> np.ndarray:
    e = np.zeros(4, dtype=int)
    e[a] = 1
    return e


def right_mult_matrix(q: np.ndarray) -> np.ndarray:
    """Real 4x4 matrix of v -> v q."""
    return np.stack([qmul(unit(b), q) for b in range(4)], axis=1)


def left_mult_matrix(q: np.ndarray) -> np.ndarray:
    return np.stack([qmul(q, unit(b)) for b in range(4)], axis=1)


def matmul2(x, y):
    """Product of 2x2 quaternionic matrices given as (2, 2, 4) arrays."""
    out = np.zeros((2, 2, 4), dtype=int)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                out[i, j] += qmul(x[i, k], y[k, j])
    return out


def sp2_basis():
    """Basis of sp(2) = quaternionic anti-Hermitian 2x2 matrices.

    Order: E_1..E_3 = diag(e_a, 0)  (Reeb directions),
           F_1, F_i, F_j, F_k with lower-left entry v, upper-right -conj(v),
           K_1..K_3 = diag(0, e_a)  (isotropy sp(1)).
    """
    basis, labels = [], []
    for a in range(1, 4):
        x = np.zeros((2, 2, 4), dtype=int)
        x[0, 0] = unit(a)
        basis.append(x)
        labels.append(f"E{a}")
    for a, name in enumerate("1ijk"):
        x = np.zeros((2, 2, 4), dtype=int)
        x[1, 0] = unit(a)
        x[0, 1] = -qconj(unit(a))
        basis.append(x)
        labels.append(f"F{name}")
    for a in range(1, 4):
        x = np.zeros((2, 2, 4), dtype=int)
        x[1, 1] = unit(a)
        basis.append(x)
        labels.append(f"K{a}")
    return basis, labels


def sp2_coordinates(x) -> np.ndarray:
    coords = np.zeros(10, dtype=int)
    coords[0:3] = x[0, 0, 1:]
    coords[3:7] = x[1, 0]
    coords[7:10] = x[1, 1, 1:]
    return coords


def sp2_structure_constants() -> np.ndarray:
    basis, _ = sp2_basis()
    c = np.zeros((10, 10, 10), dtype=int)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            br = matmul2(x, y) - matmul2(y, x)
            coords = sp2_coordinates(br)
            # reconstruction guards against leaving the sp(2) basis span
            recon = sum(coords[k] * basis[k] for k in range(10))
            if not np.array_equal(recon, br):
                raise AssertionError("bracket left the basis span")
            c[i, j] = coords
    return c
