"""Closed-form payoffs and derivative signs for the game G.

These are written out by hand and never call the chain solver, so they serve
as an independent check on it.  ``p1``/``p2`` are the quit probabilities.
"""
from __future__ import annotations

from fractions import Fraction

VARIANTS = ("continue-at-L2", "quit-at-L2")
THRESHOLD = Fraction(4, 7)


def sgn(x) -> int:
    return (x > 0) - (x < 0)


def u11_closed(p1, p2) -> Fraction:
    p1, p2 = Fraction(p1), Fraction(p2)
    if p1 == 0 and p2 == 0:
        # infinite play: Player 1 never leaves the safe set
        return Fraction(1)
    return ((8 - 3 * p2) * p1 + 4 * p2) / ((12 - 9 * p2) * p1 + 12 * p2)


def u11_closed_alt(p1, p2) -> Fraction:
    """Same function, grouped by ``p2``."""
    p1, p2 = Fraction(p1), Fraction(p2)
    if p1 == 0 and p2 == 0:
        return Fraction(1)
    return ((4 - 3 * p1) * p2 + 8 * p1) / ((12 - 9 * p1) * p2 + 12 * p1)


def u21_closed(p1, p2) -> Fraction:
    p1, p2 = Fraction(p1), Fraction(p2)
    return ((8 - 3 * p2) * p1 + 4 * p2) / ((9 - 6 * p2) * p1 + 8 * p2 + 4)


def u21_closed_alt(p1, p2) -> Fraction:
    p1, p2 = Fraction(p1), Fraction(p2)
    return ((4 - 3 * p1) * p2 + 8 * p1) / ((8 - 6 * p1) * p2 + 9 * p1 + 4)


def sign_du11_dp1(p2) -> int:
    return sgn(48 * Fraction(p2))


def sign_du21_dp2(p1) -> int:
    p1 = Fraction(p1)
    return sgn((4 - 3 * p1) * (4 - 7 * p1))


def best_reply_value_1(p2) -> Fraction:
    """Player 1's best value against ``p2``: stay put at 0, quit otherwise."""
    p2 = Fraction(p2)
    if p2 == 0:
        return Fraction(1)
    return (8 + p2) / (12 + 3 * p2)


def best_reply_value_2(p1) -> Fraction:
    p1 = Fraction(p1)
    if p1 <= THRESHOLD:
        return (4 + 5 * p1) / (12 + 3 * p1)
    return 8 * p1 / (4 + 9 * p1)


def modified_u11_closed(variant: str, p1, p2) -> Fraction:
    """Player 1's payoff when entering L2 ends play at value 1 or 3/5."""
    p1, p2 = Fraction(p1), Fraction(p2)
    if variant == "continue-at-L2":
        return (5 * p1 + 4) / ((9 - 6 * p2) * p1 + 4 + 8 * p2)
    if variant == "quit-at-L2":
        return ((31 - 6 * p2) * p1 + 8 * p2 + 12) / (5 * ((9 - 6 * p2) * p1 + 4 + 8 * p2))
    raise ValueError(f"unknown variant {variant!r}")


def sign_modified_du11_dp1(variant: str, p2) -> int:
    p2 = Fraction(p2)
    if variant == "continue-at-L2":
        return sgn(64 * p2 - 16)
    if variant == "quit-at-L2":
        return sgn(1120 * p2 + 80)
    raise ValueError(f"unknown variant {variant!r}")
