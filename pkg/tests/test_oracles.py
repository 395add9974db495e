from fractions import Fraction

import numpy as np
import pytest

from _models import GRID
from skewtorsion.catalog import sp2_scalings
from skewtorsion.oracles import FAMILIES, NoScalingError, solve_scalings, structure_residuals


@pytest.mark.parametrize("ad", GRID)
def test_solver_recovers_catalog_scalings(ad):
    found = solve_scalings(*ad)
    assert all(isinstance(s, Fraction) for s in found)
    assert found == tuple(Fraction(x).limit_denominator() for x in sp2_scalings(Fraction(ad[0]), Fraction(ad[1])))


def test_su2_family_has_one_scaling():
    assert solve_scalings(1, 2, family="su2") == (Fraction(1, 4),)


@pytest.mark.parametrize("ad", [(1, 0), (1, -1)])
def test_no_scaling(ad):
    with pytest.raises(NoScalingError) as err:
        solve_scalings(*ad)
    assert "min_residual" in err.value.landscape or "refined" in err.value.landscape


def test_negative_delta_on_three_sphere_is_an_orientation_flip():
    # S^3 has no horizontal part, so xi_i = -E_i only reverses orientation
    assert solve_scalings(1, -1, family="su2") == (Fraction(1),)


def test_residuals_vanish_only_at_solution():
    fam = FAMILIES["sp2"]
    assert np.max(np.abs(structure_residuals(fam, (0.25, 0.5), 1, 2))) < 1e-14
    assert np.max(np.abs(structure_residuals(fam, (0.25, 0.6), 1, 2))) > 1e-3


def test_solver_on_irrational_target_returns_floats():
    found = solve_scalings(1, 2 ** 0.5)
    assert abs(found[0] - 0.5) < 1e-10 and abs(found[1] - 2 ** -0.5) < 1e-10
