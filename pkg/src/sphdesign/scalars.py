"""Exact scalar arithmetic in Q and in real quadratic extensions Q(sqrt(n)).

A QuadExt value a + b*sqrt(r) keeps r square-free and collapses to a pure
rational (r = 0) whenever possible, so equality is syntactic on the
canonical form.  Values from different extensions cannot be combined: a
single computation lives inside one Q(sqrt(n)), and mixing radicands is a
hard error rather than a silent approximation.

Rationals are plain fractions.Fraction, which already maintains the
reduced-form invariants (positive denominator, gcd 1).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, IncompatibleRadicands, ParseError

Rational = Fraction

_RAT_TYPES = (int, Fraction)


@dataclass(frozen=True)
class SqFreeDecomp:
    """n = square**2 * core with core square-free."""

    square: int
    core: int

    def reconstruct(self) -> int:
        return self.square * self.square * self.core


def square_free_decompose(n: int) -> SqFreeDecomp:
    """Split a positive integer as s^2 * r with r square-free.

    Trial division; intended for inputs within ~10^10.
    """
    if n < 1:
        raise ValueError(f"square_free_decompose needs n >= 1, got {n}")
    s, r = 1, 1
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                r *= p
        p += 1 if p == 2 else 2
    r *= m
    return SqFreeDecomp(square=s, core=r)


def is_square_free(n: int) -> bool:
    return square_free_decompose(n).square == 1


def odd_part_square_free(n: int) -> bool:
    """True when no *odd* prime square divides n."""
    while n % 2 == 0:
        n //= 2
    return is_square_free(n)


class QuadExt:
    """An element a + b*sqrt(r) of Q(sqrt(r)), r square-free and >= 0.

    r == 0 is the canonical pure-rational form (then b == 0).  Instances
    are immutable and hashable; arithmetic returns new values.
    """

    __slots__ = ("a", "b", "r")

    def __init__(self, a=0, b=0, r=0):
        a = Fraction(a)
        b = Fraction(b)
        if b == 0:
            r = 0
        else:
            if r < 0:
                raise ValueError("negative radicand")
            if r == 0:
                b = Fraction(0)
            else:
                dec = square_free_decompose(r)
                if dec.square != 1:
                    b *= dec.square
                    r = dec.core
                if r == 1:
                    a += b
                    b = Fraction(0)
                    r = 0
        self.a = a
        self.b = b
        self.r = r

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def of(value) -> "QuadExt":
        if isinstance(value, QuadExt):
            return value
        return QuadExt(Fraction(value))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise IncompatibleRadicands(f"{self} is not rational")
        return self.a

    # -- radicand plumbing ---------------------------------------------------

    def _join(self, other: "QuadExt") -> int:
        if self.b == 0:
            return other.r
        if other.b == 0:
            return self.r
        if self.r != other.r:
            raise IncompatibleRadicands(
                f"cannot combine sqrt({self.r}) with sqrt({other.r})"
            )
        return self.r

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, _RAT_TYPES):
            return QuadExt(other)
        return NotImplemented

    # -- field operations ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        r = self._join(o)
        return QuadExt(self.a + o.a, self.b + o.b, r)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        r = self._join(o)
        return QuadExt(self.a - o.a, self.b - o.b, r)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.r)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.b and o.b and self.r != o.r:
            # pure radicals from different fields multiply exactly:
            # sqrt(r1) * sqrt(r2) = sqrt(r1 r2), renormalized square-free
            if self.a == 0 and o.a == 0:
                return QuadExt(0, self.b * o.b, self.r * o.r)
        r = self._join(o)
        return QuadExt(self.a * o.a + self.b * o.b * r, self.a * o.b + self.b * o.a, r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.a == 0 and o.b == 0:
            raise DivisionByZero(f"{self} / 0")
        # invert via the conjugate; the field norm a^2 - b^2 r is nonzero
        # for o != 0, and multiplication handles radicand compatibility
        norm = o.a * o.a - o.b * o.b * o.r
        return self * QuadExt(o.a / norm, -o.b / norm, o.r)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out = QuadExt(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- exact comparisons ---------------------------------------------------

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(r)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with b^2 r
        lhs, rhs = a * a, b * b * self.r
        if a > 0:
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError(f"cannot compare QuadExt with {type(other)!r}")
        return (self - o).sign()

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except Exception:
            return NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b and self.r == o.r

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.r))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- rendering -----------------------------------------------------------

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.r)

    def __repr__(self):
        return f"QuadExt({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


ZERO = QuadExt(0)
ONE = QuadExt(1)


def quad_sqrt(value) -> QuadExt:
    """Exact square root of a non-negative rational, as a QuadExt.

    sqrt(p/q) = sqrt(p*q)/q = (s/q) * sqrt(core) after extracting the
    square part of p*q.
    """
    v = Fraction(value) if not isinstance(value, QuadExt) else value.rational_value()
    if v < 0:
        raise ValueError(f"square root of negative value {v}")
    if v == 0:
        return ZERO
    pq = v.numerator * v.denominator
    dec = square_free_decompose(pq)
    coef = Fraction(dec.square, v.denominator)
    if dec.core == 1:
        return QuadExt(coef)
    return QuadExt(0, coef, dec.core)


# -- the scalar text grammar --------------------------------------------------
#
# Shared by configuration files, certificate files and CLI output:
#   p/q            pure rational (q optional)
#   p/q+r/s*sqrt(n)  with optional signs; whitespace is insignificant;
#   a bare sqrt(n) or r/s*sqrt(n) without rational part is accepted.

_TERM = re.compile(
    r"""(?P<sign>[+-]?)
        (?: (?P<coef>\d+(?:/\d+)?) \* )?
        (?: (?P<rat>\d+(?:/\d+)?) | sqrt\((?P<rad>\d+)\) )
    """,
    re.VERBOSE,
)


def parse_scalar(text: str, line: int | None = None) -> QuadExt:
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty scalar", line=line)
    pos = 0
    a = Fraction(0)
    b = Fraction(0)
    rad = 0
    nterms = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"bad scalar syntax near {s[pos:]!r}", line=line, column=pos + 1)
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("rad") is not None:
            coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            n = int(m.group("rad"))
            dec = square_free_decompose(n) if n > 0 else SqFreeDecomp(1, 0)
            if n == 0 or dec.core == 1:
                a += sign * coef * dec.square
            else:
                if rad and dec.core != rad:
                    raise ParseError(
                        f"mixed radicands sqrt({rad}) and sqrt({dec.core})",
                        line=line, column=pos + 1,
                    )
                rad = dec.core
                b += sign * coef * dec.square
        else:
            if m.group("coef") is not None:
                raise ParseError("coefficient without sqrt term", line=line, column=pos + 1)
            a += sign * Fraction(m.group("rat"))
        pos = m.end()
        nterms += 1
        if nterms > 2:
            raise ParseError("more than two terms in scalar", line=line, column=pos)
    return QuadExt(a, b, rad)


def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(value) -> str:
    q = QuadExt.of(value)
    if q.b == 0:
        return _fmt_fraction(q.a)
    root = f"sqrt({q.r})"
    babs = abs(q.b)
    term = root if babs == 1 else f"{_fmt_fraction(babs)}*{root}"
    sign = "-" if q.b < 0 else "+"
    if q.a == 0:
        return term if sign == "+" else "-" + term
    return f"{_fmt_fraction(q.a)}{sign}{term}"


def decimal_render(value, digits: int = 12) -> str:
    """Display-only decimal rendering; never feeds back into computation."""
    return f"{float(QuadExt.of(value)):.{digits}g}"
