"""Gegenbauer polynomials normalized so that G_k(1) is the harmonic dimension.

Coefficients are exact rationals obtained from the three-term recursion

    G_0 = 1,  G_1 = d*x,
    (k+1)/(d+2k) * G_{k+1}(x) = x*G_k(x) - (d+k-3)/(d+2k-4) * G_{k-1}(x),

never from closed forms, so the recursion is the single source of truth.
Polynomials are memoized per (d, k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DegreeCapExceeded
from .scalars import QuadExt

DEGREE_CAP = 12


def harm_dim(d: int, k: int) -> int:
    """Dimension of the degree-k harmonic space on the (d-1)-sphere."""
    if d < 1 or k < 0:
        raise ValueError(f"harm_dim needs d >= 1, k >= 0; got ({d}, {k})")
    if k == 0:
        return 1
    if k == 1:
        return d
    return math.comb(d + k - 1, k) - math.comb(d + k - 3, k - 2)


@dataclass(frozen=True)
class GegenbauerPoly:
    dim: int
    degree: int
    coeffs: tuple[Fraction, ...]  # ascending powers

    def eval_fraction(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_quad(self, x: QuadExt) -> QuadExt:
        acc = QuadExt(0)
        for c in reversed(self.coeffs):
            acc = acc * x + QuadExt(c)
        return acc


@lru_cache(maxsize=None)
def _coeff_table(d: int, k_max: int) -> tuple[tuple[Fraction, ...], ...]:
    polys = [(Fraction(1),), (Fraction(0), Fraction(d))]
    for k in range(1, k_max):
        xg = (Fraction(0),) + polys[k]
        # at d = 2, k = 1 the coefficient is 0/0; the value forced by the
        # normalization G_2(1) = h_2 is 1, matching the Chebyshev case
        if d + 2 * k - 4 == 0:
            c = Fraction(1)
        else:
            c = Fraction(d + k - 3, d + 2 * k - 4)
        prev = polys[k - 1] + (Fraction(0),) * (len(xg) - len(polys[k - 1]))
        scale = Fraction(d + 2 * k, k + 1)
        polys.append(tuple((u - c * v) * scale for u, v in zip(xg, prev)))
    return tuple(polys[: k_max + 1])


def gegenbauer_poly(d: int, k: int, degree_cap: int = DEGREE_CAP) -> GegenbauerPoly:
    # d = 1 is the degenerate S^0 case: the recursion still produces
    # polynomials with G_k(+-1) = 0 for k >= 2, consistent with h_k = 0
    if d < 1:
        raise ValueError(f"gegenbauer_poly needs d >= 1, got {d}")
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    if k > degree_cap:
        raise DegreeCapExceeded(f"degree {k} exceeds cap {degree_cap}")
    table = _coeff_table(d, max(k, 1))
    return GegenbauerPoly(dim=d, degree=k, coeffs=table[k])


def gegenbauer_eval(d: int, k: int, x, degree_cap: int = DEGREE_CAP) -> QuadExt:
    """Exact Horner evaluation of G_k at a QuadExt (or rational) point."""
    poly = gegenbauer_poly(d, k, degree_cap)
    return poly.eval_quad(QuadExt.of(x))


def monomial_moment(d: int, degree: int) -> Fraction:
    """Mean of t^degree for t the first coordinate on the unit (d-1)-sphere.

    Equals the G_0-coefficient when the monomial is expanded in the
    Gegenbauer basis: 0 for odd degrees and
    (degree-1)!! / (d (d+2) ... (d+degree-2)) for even ones.
    """
    if degree < 0:
        raise ValueError("negative degree")
    if degree % 2:
        return Fraction(0)
    num = 1
    den = 1
    for i in range(degree // 2):
        num *= 2 * i + 1
        den *= d + 2 * i
    return Fraction(num, den)


def monomial_in_gegenbauer(d: int, degree: int) -> tuple[Fraction, ...]:
    """Expansion coefficients of x^degree over G_0..G_degree (exact).

    Back-substitution against the recursion-generated coefficient table;
    used as an independent cross-check of monomial_moment.
    """
    table = _coeff_table(d, max(degree, 1))
    target = [Fraction(0)] * (degree + 1)
    target[degree] = Fraction(1)
    coeffs = [Fraction(0)] * (degree + 1)
    for k in range(degree, -1, -1):
        poly = table[k]
        lead = poly[k]
        c = target[k] / lead
        coeffs[k] = c
        for i in range(len(poly)):
            target[i] -= c * poly[i]
    if any(target):
        raise AssertionError("monomial expansion did not terminate")  # unreachable
    return tuple(coeffs)
