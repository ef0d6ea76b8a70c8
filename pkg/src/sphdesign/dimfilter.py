"""Arithmetic nonexistence filter on dimensions d = (2m+1)^2 - 2.

Four conditions on m rule out the minimal-type property in dimension d:
m odd, m not congruent to 1 mod 3, m(m+1) not divisible by the square of
an odd prime, and m+1 not a multiple of 8.  The counting function over m
comes in two variants because the nonexistence statement uses the
odd-prime square-free condition while the density statement asks for
m(m+1) fully square-free; both are enumerated by sieve, never conflated.

The density constant C = 0.82963... is the Euler product of (1 - 2/p^2)
over primes p >= 5; the hardcoded truncation is cross-checked against a
direct product in the test suite.  The asymptotic (C/24) x is a proved
lower bound on the counting function, not its density, so reports carry
the relative gap rather than asserting closeness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded
from .scalars import odd_part_square_free, square_free_decompose

# truncated decimal of the Euler product over primes >= 5 of (1 - 2/p^2)
C_DENSITY = Fraction(82963, 100000)

ENUMERATION_BUDGET = 10**7


@dataclass(frozen=True)
class FilterVerdict:
    m: int
    d: int
    conditions: dict  # name -> (passed, witness text)
    applies: bool


@dataclass(frozen=True)
class DensityReport:
    x: int
    f_x: int
    variant: str
    predicted: Fraction  # (C/24) * x, a proved lower-bound scale
    relative_gap: str

    def ratio(self) -> Fraction:
        return Fraction(self.f_x, self.x)


def thm37_filter(m: int) -> FilterVerdict:
    """Evaluate the four arithmetic conditions at m, with exact witnesses."""
    if m < 1:
        raise ValueError("m must be >= 1")
    conditions = {}
    conditions["odd"] = (m % 2 == 1, f"m = {m} is {'odd' if m % 2 else 'even'}")
    conditions["mod3"] = (m % 3 != 1, f"m mod 3 = {m % 3}")
    dec = square_free_decompose(m * (m + 1))
    odd_ok = odd_part_square_free(m * (m + 1))
    conditions["oddsquarefree"] = (
        odd_ok,
        f"m(m+1) = {m * (m + 1)} = {dec.square}^2 * {dec.core}",
    )
    conditions["mod8"] = ((m + 1) % 8 != 0, f"m+1 = {m + 1}")
    applies = all(ok for ok, _ in conditions.values())
    return FilterVerdict(
        m=m, d=(2 * m + 1) ** 2 - 2, conditions=conditions, applies=applies
    )


def excluded_dims(m_max: int) -> list[FilterVerdict]:
    """All m <= m_max whose dimension is ruled out by the filter."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    return [v for v in (thm37_filter(m) for m in range(1, m_max + 1)) if v.applies]


def _square_free_mask(limit: int, odd_primes_only: bool) -> bytearray:
    # marking composite p^2 multiples is redundant but harmless: any odd
    # composite square multiple is already covered by an odd prime square
    mask = bytearray([1]) * (limit + 1)
    p = 3 if odd_primes_only else 2
    step = 2 if odd_primes_only else 1
    while p * p <= limit:
        pp = p * p
        mask[pp :: pp] = b"\x00" * len(mask[pp::pp])
        p += step
    return mask


def count_valid_m(x: int, variant: str = "thm38") -> DensityReport:
    """Enumerate m <= x passing the congruence and square-free conditions.

    variant "thm38": m(m+1) fully square-free; "thm37": no odd prime
    square divides m(m+1).
    """
    if variant not in ("thm37", "thm38"):
        raise ValueError(f"unknown variant {variant!r}")
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"x = {x} exceeds the enumeration budget")
    mask = _square_free_mask(x + 1, odd_primes_only=(variant == "thm37"))
    count = 0
    for m in range(1, x + 1, 2):
        if m % 3 == 1 or (m + 1) % 8 == 0:
            continue
        if mask[m] and mask[m + 1]:
            count += 1
    predicted = C_DENSITY / 24 * x
    gap = (Fraction(count) - predicted) / predicted
    return DensityReport(
        x=x,
        f_x=count,
        variant=variant,
        predicted=predicted,
        relative_gap=f"{float(gap):+.4f}",
    )


def euler_product_constant(prime_limit: int = 10**6) -> float:
    """Direct evaluation of the density constant over primes < prime_limit."""
    sieve = bytearray([1]) * prime_limit
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(prime_limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = b"\x00" * len(sieve[i * i :: i])
    value = 1.0
    for p in range(5, prime_limit):
        if sieve[p]:
            value *= 1.0 - 2.0 / (p * p)
    return value
