"""Cached model builds shared across test modules."""

from functools import cache

import numpy as np
from hypothesis import strategies as st

from skewtorsion.catalog import sp2_s7, su2_3ad
from skewtorsion.nearly_kahler import build_nk_quotient
from skewtorsion.quaternionic import build_qk_quotient
from skewtorsion.sasaki import canonical_connection

GRID = [(1, 1), (1, 2), (2, 1), (1, 5)]


@cache
def s7(alpha=1, delta=2, exact=False):
    return sp2_s7(alpha, delta, exact)


@cache
def s3(alpha=1, delta=2, exact=False):
    return su2_3ad(alpha, delta, exact)


@cache
def s7_conn(alpha=1, delta=2, exact=False):
    return canonical_connection(s7(alpha, delta, exact).triple)


@cache
def cp3(alpha=1, exact=False):
    return build_nk_quotient(s7(alpha, 2 * alpha, exact).triple)


@cache
def s4(alpha=1, exact=False):
    nk = cp3(alpha, exact)
    return build_qk_quotient(nk.nk, nk.vertical, nk.vertical[:, 0])


def arrays(shape, lo=-3.0, hi=3.0):
    n = int(np.prod(shape))
    return st.lists(st.floats(lo, hi, allow_nan=False), min_size=n, max_size=n).map(
        lambda xs: np.array(xs).reshape(shape))


unit_vectors3 = arrays((3,)).filter(lambda v: np.linalg.norm(v) > 0.1).map(lambda v: v / np.linalg.norm(v))
