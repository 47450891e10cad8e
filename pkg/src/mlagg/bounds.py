"""Closed-form competitive bounds and their optimal parameters."""
from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable

from .model import to_fraction

DIGITS = 30


def depth_bound(D: int, theta) -> Fraction:
    """(1 + 1/theta)^D (1 + theta)."""
    theta = to_fraction(theta)
    if D < 0 or theta <= 0:
        raise ValueError("need D >= 0 and theta > 0")
    return (1 + 1 / theta) ** D * (1 + theta)


def caterpillar_bound(H: int, theta1, theta2) -> Fraction:
    """(1 + theta1 + theta2) (1 + 1/theta1)^(H+1) (1 + 1/theta2)^H."""
    theta1, theta2 = to_fraction(theta1), to_fraction(theta2)
    if H < 1 or theta1 <= 0 or theta2 <= 0:
        raise ValueError("need H >= 1 and positive thetas")
    return (1 + theta1 + theta2) * (1 + 1 / theta1) ** (H + 1) * (1 + 1 / theta2) ** H


def optimal_theta(D: int) -> Fraction:
    return Fraction(max(D, 1))


def optimal_thetas(H: int) -> tuple[Fraction, Fraction]:
    return Fraction(2 * H + 1), Fraction(2 * H)


def to_decimal(q: Fraction, digits: int = DIGITS) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(q.numerator) / Decimal(q.denominator)


def e_decimal(digits: int = DIGITS) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(1).exp()


def depth_ratio_vs_e(D: int, digits: int = DIGITS) -> tuple[Decimal, Decimal]:
    """Return (R(D) at theta = D, e (D + 1)) as decimals."""
    with localcontext() as ctx:
        ctx.prec = digits
        return to_decimal(depth_bound(D, D), digits), e_decimal(digits) * (D + 1)


def caterpillar_factor(H: int) -> Fraction:
    """(1 + 1/(2H+1))^(H+1) (1 + 1/(2H))^H, which stays below e."""
    return caterpillar_bound(H, 2 * H + 1, 2 * H) / (4 * H + 2)


def argmin_depth(D: int, grid: Iterable) -> Fraction:
    return min((to_fraction(th) for th in grid), key=lambda th: (depth_bound(D, th), th))


def argmin_caterpillar(H: int, grid: Iterable[tuple]) -> tuple[Fraction, Fraction]:
    pairs = [(to_fraction(a), to_fraction(b)) for a, b in grid]
    return min(pairs, key=lambda p: (caterpillar_bound(H, *p), p))
