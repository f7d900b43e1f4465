"""Exact scalar arithmetic: Gaussian rationals and real quadratic irrationals.

Matrix entries elsewhere in the package are plain ``Fraction`` whenever the
imaginary part is zero, and :class:`GaussRational` otherwise; both interoperate
through the arithmetic dunders.  No value in the trusted path is ever converted
to floating point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rat = Fraction
Scalar = Union[Fraction, "GaussRational"]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, GaussRational):
        if x.im != 0:
            raise ValueError("nonzero imaginary part: %r" % (x,))
        return x.re
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("cannot interpret %r as a rational" % (x,))


class GaussRational:
    """Exact element of Q(i), stored as a pair of Fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re) if not isinstance(re, Fraction) else re)
        object.__setattr__(self, "im", as_fraction(im) if not isinstance(im, Fraction) else im)

    def __setattr__(self, name, value):
        raise AttributeError("GaussRational is immutable")

    # -- basic protocol ----------------------------------------------------
    def __repr__(self):
        return "GaussRational(%s, %s)" % (self.re, self.im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return "%s*i" % self.im
        sign = "+" if self.im > 0 else "-"
        return "%s%s%s*i" % (self.re, sign, abs(self.im))

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __bool__(self):
        return self.re != 0 or self.im != 0

    # -- field operations --------------------------------------------------
    def __add__(self, other):
        if isinstance(other, GaussRational):
            return gauss(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return gauss(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return gauss(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, GaussRational):
            return gauss(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return gauss(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return gauss(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GaussRational):
            return gauss(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, (int, Fraction)):
            return gauss(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return gauss(self.re / other, self.im / other)
        if isinstance(other, GaussRational):
            n = other.norm2()
            if n == 0:
                raise ZeroDivisionError("division by zero")
            return self * other.conjugate() / n
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            n = self.norm2()
            if n == 0:
                raise ZeroDivisionError("division by zero")
            return self.conjugate() * (as_fraction(other) / n)
        return NotImplemented

    # -- structure ---------------------------------------------------------
    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im


def gauss(re=0, im=0) -> Scalar:
    """Build a scalar, collapsing to Fraction when the imaginary part is zero."""
    re = as_fraction(re)
    im = as_fraction(im)
    if im == 0:
        return re
    return GaussRational(re, im)


def to_gauss(x) -> GaussRational:
    """Coerce to a GaussRational (exponents always live here)."""
    if isinstance(x, GaussRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussRational(as_fraction(x), ZERO)
    if isinstance(x, complex):
        raise TypeError("floating complex not allowed in exact paths")
    raise TypeError("cannot interpret %r as Gaussian rational" % (x,))


def sre(x: Scalar) -> Fraction:
    return x.re if isinstance(x, GaussRational) else x


def sim(x: Scalar) -> Fraction:
    return x.im if isinstance(x, GaussRational) else ZERO


def sconj(x: Scalar) -> Scalar:
    return x.conjugate() if isinstance(x, GaussRational) else x


def is_rational(x: Scalar) -> bool:
    return not isinstance(x, GaussRational) or x.im == 0


def sign(x: Fraction) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def sqrt_sign(a: Fraction, b: Fraction, d: Fraction) -> int:
    """Exact sign of a + b*sqrt(d) for rational a, b and d >= 0."""
    if d < 0:
        raise ValueError("negative radicand")
    if b == 0 or d == 0:
        return sign(a)
    if a == 0:
        return sign(b)
    sa, sb = sign(a), sign(b)
    if sa == sb:
        return sa
    # opposite signs: compare a^2 with b^2 d
    cmp = sign(a * a - b * b * d)
    if cmp > 0:
        return sa
    if cmp < 0:
        return sb
    return 0


def two_sqrt_sign(a: Fraction, b: Fraction, d: Fraction, c: Fraction, e: Fraction) -> int:
    """Exact sign of a + b*sqrt(d) + c*sqrt(e), rational inputs, d, e >= 0."""
    if c == 0 or e == 0:
        return sqrt_sign(a, b, d)
    if b == 0 or d == 0:
        return sqrt_sign(a, c, e)
    sf = sqrt_sign(a, b, d)  # f = a + b sqrt(d)
    sg = sign(c)             # g = c sqrt(e)
    if sf == 0:
        return sg
    if sf == sg:
        return sf
    # compare f^2 = (a^2 + b^2 d) + 2ab sqrt(d) against g^2 = c^2 e
    cmp = sqrt_sign(a * a + b * b * d - c * c * e, 2 * a * b, d)
    if cmp > 0:
        return sf
    if cmp < 0:
        return sg
    return 0


class QuadReal:
    """Exact real number of the form a + b*sqrt(d), with a, b, d rational, d >= 0.

    Values with different radicands are comparable; the comparison squares out
    the radicals with explicit sign case analysis (no floating point).
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=0):
        a = as_fraction(a)
        b = as_fraction(b)
        d = as_fraction(d)
        if d < 0:
            raise ValueError("negative radicand")
        if b == 0 or d == 0:
            b, d = ZERO, ZERO
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadReal is immutable")

    def __repr__(self):
        if self.b == 0:
            return "QuadReal(%s)" % (self.a,)
        return "QuadReal(%s + %s*sqrt(%s))" % (self.a, self.b, self.d)

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        return sqrt_sign(self.a, self.b, self.d)

    def compare(self, other) -> int:
        """Sign of self - other; other may be QuadReal, Fraction or int."""
        if isinstance(other, (int, Fraction)):
            return sqrt_sign(self.a - other, self.b, self.d)
        if not isinstance(other, QuadReal):
            raise TypeError("cannot compare QuadReal with %r" % (other,))
        if other.b == 0:
            return sqrt_sign(self.a - other.a, self.b, self.d)
        if self.b == 0:
            return -sqrt_sign(other.a - self.a, other.b, other.d)
        if self.d == other.d:
            return sqrt_sign(self.a - other.a, self.b - other.b, self.d)
        return two_sqrt_sign(self.a - other.a, self.b, self.d, -other.b, other.d)

    # Total order (consistent with real values).
    def __eq__(self, other):
        if isinstance(other, (QuadReal, int, Fraction)):
            return self.compare(other) == 0
        return NotImplemented

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        # not canonical across equal values with different radicands
        # (e.g. 2*sqrt(2) vs sqrt(8)); square-free reduction keeps hashing sane
        # for the small radicands used here, so normalize lazily on demand.
        return hash((self.a, self.b * self.b * self.d, self.b > 0))

    # arithmetic within one radicand (or with rationals)
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadReal(self.a + other, self.b, self.d)
        if isinstance(other, QuadReal):
            if other.b == 0:
                return QuadReal(self.a + other.a, self.b, self.d)
            if self.b == 0:
                return QuadReal(self.a + other.a, other.b, other.d)
            if self.d != other.d:
                raise ValueError("mixed radicands in QuadReal arithmetic")
            return QuadReal(self.a + other.a, self.b + other.b, self.d)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QuadReal(-self.a, -self.b, self.d)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QuadReal)):
            return self + (-other if isinstance(other, QuadReal) else QuadReal(-as_fraction(other)))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadReal(self.a * other, self.b * other, self.d)
        if isinstance(other, QuadReal):
            if other.b == 0:
                return self * other.a
            if self.b == 0:
                return other * self.a
            if self.d != other.d:
                raise ValueError("mixed radicands in QuadReal arithmetic")
            return QuadReal(self.a * other.a + self.b * other.b * self.d,
                            self.a * other.b + self.b * other.a, self.d)
        return NotImplemented

    __rmul__ = __mul__


def quad_compare(x: QuadReal, y: QuadReal) -> int:
    """Exact total-order comparison: -1, 0 or 1 as x <, =, > y."""
    return x.compare(y)


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (q > 0 after reduction) or plain integers/decimals."""
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator)


def parse_gauss(text: str) -> GaussRational:
    """Parse Gaussian rationals: "3", "-1/2", "i", "-i", "1/2+3/4i", "2-i"."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if s in ("i", "+i"):
        return GaussRational(0, 1)
    if s == "-i":
        return GaussRational(0, -1)
    if s.endswith("i"):
        body = s[:-1]
        # split into real and imaginary at the last +/- that is not leading
        # and not part of an exponent (no exponents in rationals).
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-":
                re_part, im_part = body[:k], body[k:]
                if im_part in ("+", "-"):
                    im_part += "1"
                return GaussRational(Fraction(re_part), Fraction(im_part))
        if body in ("+", "-"):
            body += "1"
        return GaussRational(0, Fraction(body))
    return GaussRational(Fraction(s), 0)
