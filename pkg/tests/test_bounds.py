from decimal import Decimal
from fractions import Fraction

import pytest

from mlagg.bounds import (
    argmin_caterpillar,
    argmin_depth,
    caterpillar_bound,
    caterpillar_factor,
    depth_bound,
    depth_ratio_vs_e,
    e_decimal,
    optimal_theta,
    optimal_thetas,
    to_decimal,
)


def test_depth_bound_values():
    assert depth_bound(3, 3) == Fraction(4, 3) ** 3 * 4
    assert depth_bound(0, 5) == 6
    with pytest.raises(ValueError):
        depth_bound(2, 0)


def test_caterpillar_bound_values():
    assert caterpillar_bound(1, 3, 2) == 6 * Fraction(4, 3) ** 2 * Fraction(3, 2)
    assert caterpillar_factor(1) == Fraction(8, 3)
    with pytest.raises(ValueError):
        caterpillar_bound(0, 1, 1)


def test_e_digits():
    assert str(e_decimal())[:12] == "2.7182818284"
    assert to_decimal(Fraction(1, 3), 5) == Decimal("0.33333")


@pytest.mark.parametrize("D", [1, 2, 5, 40])
def test_depth_ratio_below_e(D):
    r, bound = depth_ratio_vs_e(D)
    assert r <= bound


def test_optimal_parameters_win_on_grid():
    for D in range(1, 15):
        grid = [Fraction(k, 4) for k in range(1, 4 * 3 * D)]
        assert argmin_depth(D, grid) == optimal_theta(D)
    for H in range(1, 6):
        grid = [(Fraction(a), Fraction(b)) for a in range(1, 4 * H + 3) for b in range(1, 4 * H + 3)]
        assert argmin_caterpillar(H, grid) == optimal_thetas(H)
