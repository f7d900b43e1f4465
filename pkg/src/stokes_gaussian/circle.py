"""Exact points of the circle and the direction-dependent order on exponents.

A point is stored through e^{2i\theta} (up to positive real scale) plus a
branch bit, so every angular decision reduces to signs of Gaussian-rational
expressions; angles are never materialized as floats.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence

from .scalars import GaussRational, sign, sconj, sim, sre, to_gauss


class DegeneratePair(ValueError):
    """Raised when asked for Stokes directions of a pair with c = c'."""


class Order(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def _primitive(q: GaussRational) -> tuple[int, int]:
    """Canonical integer representative of q up to positive rational scale."""
    a, b = q.re, q.im
    den = a.denominator * b.denominator // _gcd(a.denominator, b.denominator)
    x = a.numerator * (den // a.denominator)
    y = b.numerator * (den // b.denominator)
    g = _gcd(abs(x), abs(y))
    return (x // g, y // g)


def _gcd(x: int, y: int) -> int:
    while y:
        x, y = y, x % y
    return x if x else 1


class CirclePoint:
    """theta = Arg(doubled)/2 + branch*pi, with Arg in [0, 2*pi).

    ``doubled`` represents e^{2i theta} up to positive real scale; ``branch``
    selects theta in [0, pi) (branch 0) or [pi, 2 pi) (branch 1).
    """

    __slots__ = ("x", "y", "branch")

    def __init__(self, doubled, branch: int = 0):
        q = to_gauss(doubled)
        if q.re == 0 and q.im == 0:
            raise ValueError("doubled direction must be nonzero")
        if branch not in (0, 1):
            raise ValueError("branch must be 0 or 1")
        x, y = _primitive(q)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "branch", branch)

    def __setattr__(self, name, value):
        raise AttributeError("CirclePoint is immutable")

    @property
    def doubled(self) -> GaussRational:
        return GaussRational(self.x, self.y)

    def __repr__(self):
        return "CirclePoint(%d%+di, branch=%d)" % (self.x, self.y, self.branch)

    def __eq__(self, other):
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.branch == other.branch

    def __hash__(self):
        return hash((self.x, self.y, self.branch))

    # -- exact angular position ---------------------------------------------
    def _quadrant(self) -> int:
        """Quadrant of Arg(doubled): 0: [0,pi/2), 1: [pi/2,pi), 2: [pi,3pi/2), 3: [3pi/2,2pi)."""
        x, y = self.x, self.y
        if x > 0 and y >= 0:
            return 0
        if x <= 0 and y > 0:
            return 1
        if x < 0 and y <= 0:
            return 2
        return 3

    def angle_cmp(self, other: "CirclePoint") -> int:
        """Compare theta values in [0, 2*pi)."""
        if self.branch != other.branch:
            return -1 if self.branch < other.branch else 1
        qa, qb = self._quadrant(), other._quadrant()
        if qa != qb:
            return -1 if qa < qb else 1
        cross = self.x * other.y - self.y * other.x  # Im(conj(self) * other)
        if cross > 0:
            return -1
        if cross < 0:
            return 1
        return 0

    def antipode(self) -> "CirclePoint":
        return CirclePoint(self.doubled, 1 - self.branch)

    def rotate_quarter(self) -> "CirclePoint":
        """theta + pi/2 (mod 2 pi); doubled negates, branch flips iff Arg >= pi."""
        arg_ge_pi = self._quadrant() >= 2
        return CirclePoint(-self.doubled, (1 - self.branch) if arg_ge_pi else self.branch)

    def rotate_quarters(self, k: int) -> "CirclePoint":
        p = self
        for _ in range(k % 4):
            p = p.rotate_quarter()
        return p

    def hat(self) -> "CirclePoint":
        """pi - theta (mod 2 pi): doubled conjugates; involution."""
        positive_real = self.y == 0 and self.x > 0
        branch = (1 - self.branch) if positive_real else self.branch
        return CirclePoint(self.doubled.conjugate(), branch)


def sort_circle_points(points: Iterable[CirclePoint]) -> list[CirclePoint]:
    return sorted(points, key=cmp_to_key(lambda a, b: a.angle_cmp(b)))


def in_open_arc(p: CirclePoint, start: CirclePoint, end: CirclePoint) -> bool:
    """True iff p lies strictly inside the ccw arc from start to end (start != end)."""
    cs, ce = start.angle_cmp(p), p.angle_cmp(end)
    wraps = start.angle_cmp(end) > 0
    if not wraps:
        return cs < 0 and ce < 0
    return cs < 0 or ce < 0


def leq_at(c, cp, theta: CirclePoint) -> Order:
    """Order of exponents at a direction: c <_theta c' iff Re((c-c') e^{-2 i theta}) < 0."""
    c = to_gauss(c)
    cp = to_gauss(cp)
    d = c - cp
    if not d:
        return Order.EQUAL
    s = sign(sre(d * sconj(theta.doubled)))
    if s < 0:
        return Order.LESS
    if s > 0:
        return Order.GREATER
    return Order.INCOMPARABLE


def stokes_directions(c, cp) -> list[CirclePoint]:
    """The four directions where c and c' are incomparable, in cyclic order."""
    c = to_gauss(c)
    cp = to_gauss(cp)
    d = c - cp
    if not d:
        raise DegeneratePair("Stokes directions need c != c'")
    i_d = GaussRational(-sim(d), sre(d))  # i * d
    pts = [CirclePoint(i_d, 0), CirclePoint(i_d, 1), CirclePoint(-i_d, 0), CirclePoint(-i_d, 1)]
    return sort_circle_points(pts)


def is_generic(theta: CirclePoint, exponents: Sequence) -> bool:
    exps = [to_gauss(c) for c in exponents]
    for i in range(len(exps)):
        for j in range(i + 1, len(exps)):
            if leq_at(exps[i], exps[j], theta) is Order.INCOMPARABLE:
                return False
    return True


def sign_on_cell_after(v: CirclePoint, d) -> int:
    """Constant sign of Re(d e^{-2 i theta}) on a short open arc ccw from v.

    First nonzero of [sign of the value at v, sign of the theta-derivative],
    the derivative being proportional to Im(d conj(doubled)).
    """
    d = to_gauss(d)
    if not d:
        raise ValueError("d must be nonzero")
    w = d * sconj(v.doubled)
    s = sign(sre(w))
    if s:
        return s
    s = sign(sim(w))
    assert s, "both value and derivative vanish only for d = 0"
    return s
