import mpmath
import pytest
from fractions import Fraction as F
from hypothesis import given, strategies as st

from stokes_gaussian.circle import (
    CirclePoint,
    DegeneratePair,
    Order,
    in_open_arc,
    is_generic,
    leq_at,
    sign_on_cell_after,
    sort_circle_points,
    stokes_directions,
)
from stokes_gaussian.scalars import GaussRational, gauss

P0 = CirclePoint(1, 0)          # theta = 0
P14 = CirclePoint(GaussRational(0, 1), 0)   # theta = pi/4

small = st.fractions(min_value=-6, max_value=6, max_denominator=5)


def gaussians(draw_re, draw_im):
    return st.builds(GaussRational, draw_re, draw_im)


nonzero_gauss = st.builds(GaussRational, small, small).filter(lambda z: bool(z))
points = st.builds(CirclePoint, nonzero_gauss, st.integers(min_value=0, max_value=1))


def theta_float(p: CirclePoint) -> float:
    import math
    a = math.atan2(p.y, p.x) % (2 * math.pi)
    return a / 2 + p.branch * math.pi


def test_leq_examples():
    assert leq_at(gauss(-1), gauss(0), P0) is Order.LESS
    assert leq_at(gauss(1), gauss(0), P0) is Order.GREATER
    assert leq_at(gauss(1), gauss(1), P14) is Order.EQUAL
    assert leq_at(gauss(1), gauss(0), P14) is Order.INCOMPARABLE
    assert leq_at(GaussRational(0, 1), gauss(0), P14) is Order.GREATER


def test_leq_branch_independent():
    assert leq_at(gauss(-1), gauss(0), P0.antipode()) is Order.LESS


def test_stokes_directions_examples():
    dirs = stokes_directions(gauss(1), gauss(2))
    expect = [CirclePoint(GaussRational(0, 1), 0), CirclePoint(GaussRational(0, -1), 0),
              CirclePoint(GaussRational(0, 1), 1), CirclePoint(GaussRational(0, -1), 1)]
    assert dirs == expect  # pi/4, 3pi/4, 5pi/4, 7pi/4
    dirs = stokes_directions(GaussRational(0, 1), gauss(0))
    assert dirs == [CirclePoint(1, 0), CirclePoint(-1, 0), CirclePoint(1, 1), CirclePoint(-1, 1)]
    d = GaussRational(3, 4)
    dirs = stokes_directions(d, gauss(0))
    assert len(dirs) == 4
    for p in dirs:
        assert leq_at(d, gauss(0), p) is Order.INCOMPARABLE
    with pytest.raises(DegeneratePair):
        stokes_directions(gauss(2), gauss(2))


def test_consecutive_quarter_turns():
    for c, cp in [(gauss(1), gauss(2)), (GaussRational(3, 4), gauss(0)), (GaussRational(1, 1), GaussRational(-2, 5))]:
        dirs = stokes_directions(c, cp)
        for a, b in zip(dirs, dirs[1:] + [dirs[0]]):
            assert a.rotate_quarter() == b


def test_is_generic_examples():
    assert is_generic(P0, [gauss(1), gauss(2)])
    assert not is_generic(P14, [gauss(1), gauss(2)])
    assert is_generic(P0, [gauss(1)])


def test_sign_on_cell_after_examples():
    assert sign_on_cell_after(P0, gauss(-1)) == -1
    assert sign_on_cell_after(P14, gauss(1)) == -1
    assert sign_on_cell_after(CirclePoint(GaussRational(0, -1), 0), gauss(1)) == 1


def test_sign_on_cell_after_numeric_oracle():
    """Compare against numeric differentiation of Re(d e^{-2 i theta})."""
    mpmath.mp.prec = 120
    cases = [(CirclePoint(GaussRational(0, 1), 0), GaussRational(1, 0)),
             (CirclePoint(GaussRational(0, -1), 0), GaussRational(1, 0)),
             (CirclePoint(GaussRational(1, 1), 1), GaussRational(-2, 3)),
             (CirclePoint(GaussRational(-5, 2), 0), GaussRational(0, 7))]
    eps = mpmath.mpf(1) / 10**12
    for v, d in cases:
        th = mpmath.atan2(v.y, v.x) % (2 * mpmath.pi)
        th = th / 2 + v.branch * mpmath.pi
        dd = mpmath.mpc(d.re.numerator, d.im.numerator) / mpmath.mpc(d.re.denominator) \
            if d.re.denominator == d.im.denominator else \
            mpmath.mpc(mpmath.mpf(d.re.numerator) / d.re.denominator,
                       mpmath.mpf(d.im.numerator) / d.im.denominator)
        val = mpmath.re(dd * mpmath.e ** (-2j * (th + eps)))
        assert sign_on_cell_after(v, d) == (1 if val > 0 else -1)


@given(nonzero_gauss, nonzero_gauss, points)
def test_additivity(c, cp, theta):
    e = GaussRational(F(1, 3), F(-2, 5))
    assert leq_at(c, cp, theta) == leq_at(c + e, cp + e, theta)


@given(nonzero_gauss, points)
def test_antisymmetry_and_quarter_reversal(d, theta):
    c, cp = d, gauss(0)
    o = leq_at(c, cp, theta)
    if o is Order.INCOMPARABLE or o is Order.EQUAL:
        return
    rev = leq_at(cp, c, theta)
    assert {o, rev} == {Order.LESS, Order.GREATER}
    assert leq_at(cp, c, theta.rotate_quarter()) == o


@given(points)
def test_rotation_and_hat(p):
    q = p
    for _ in range(4):
        q = q.rotate_quarter()
    assert q == p
    assert p.hat().hat() == p
    assert p.antipode().antipode() == p


def test_hat_examples():
    assert CirclePoint(1, 0).hat() == CirclePoint(1, 1)                      # 0 -> pi
    assert CirclePoint(GaussRational(0, 1), 0).hat() == CirclePoint(GaussRational(0, -1), 0)  # pi/4 -> 3pi/4


def test_one_stokes_direction_per_quarter():
    import random
    rng = random.Random(7)
    for _ in range(40):
        d = GaussRational(F(rng.randint(-6, 6)), F(rng.randint(-6, 6)))
        if not d:
            continue
        start = CirclePoint(GaussRational(F(rng.randint(-6, 6)), F(rng.randint(-6, 6)) or F(1)), rng.randint(0, 1))
        if leq_at(d, gauss(0), start) is Order.INCOMPARABLE:
            continue
        end = start.rotate_quarter()
        dirs = stokes_directions(d, gauss(0))
        inside = [p for p in dirs if in_open_arc(p, start, end)]
        assert len(inside) == 1


def test_sorting_cyclic():
    pts = [CirclePoint(GaussRational(1, 1), 0), CirclePoint(1, 0),
           CirclePoint(GaussRational(0, 1), 1), CirclePoint(GaussRational(-1, 1), 0)]
    srt = sort_circle_points(pts)
    vals = [theta_float(p) for p in srt]
    assert vals == sorted(vals)
