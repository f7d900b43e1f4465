"""The Laplace transformation rule on Stokes data of aligned pure Gaussian type.

For exponent sets with constant argument and base direction theta0 = arg(C)/2,
the transform sends C to -1/C, theta0 to pi - theta0, and keeps the space and
all four filtrations identical; the inverse transform composes to the identity.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .circle import CirclePoint, Order, in_open_arc, leq_at, stokes_directions
from .scalars import GaussRational, sim, sre, to_gauss
from .stokes_data import (
    ExponentLayout,
    StokesFiltrations,
    StokesMatrices,
    sort_exponents,
    to_filtrations,
)


class NotAligned(ValueError):
    pass


class NotCanonicalTheta(ValueError):
    pass


class NotPure(ValueError):
    pass


class ZeroExponent(ValueError):
    pass


def positive_real_ratio(c, cp) -> Optional[Fraction]:
    """c / c' as a positive rational, or None if the ratio is not one."""
    c = to_gauss(c)
    cp = to_gauss(cp)
    if not cp:
        return None
    q = c / cp
    if sim(q) != 0:
        return None
    r = sre(q)
    return r if r > 0 else None


def is_aligned(exponents: Sequence) -> bool:
    """All pairwise ratios positive real (constant argument on C)."""
    exps = [to_gauss(c) for c in exponents]
    if any(not c for c in exps):
        return False
    return all(positive_real_ratio(c, exps[0]) is not None for c in exps)


def canonical_theta(exponents: Sequence) -> CirclePoint:
    """theta0 = arg(C)/2 encoded as CirclePoint(doubled = any c in C, branch 0)."""
    exps = [to_gauss(c) for c in exponents]
    if not is_aligned(exps):
        raise NotAligned("exponents do not share an argument")
    return CirclePoint(exps[0], 0)


def require_aligned_layout(layout: ExponentLayout) -> None:
    """Aligned exponents with a canonical base direction.

    theta0 = arg(C)/2 has e^{2 i theta0} proportional to +C; the transform of
    such a layout carries theta0-hat = pi - theta0 with e^{2 i theta} ~ -C-hat
    (the paper's choice pi/2 + arg(C-hat)/2), so both orientations are legal.
    """
    if not layout.pure:
        raise NotPure("the Laplace rule applies to pure data")
    if not is_aligned(layout.exponents):
        raise NotAligned("exponents do not share an argument")
    d = to_gauss(layout.theta0.doubled)
    c = layout.exponents[0]
    if positive_real_ratio(d, c) is None and positive_real_ratio(-d, c) is None:
        raise NotCanonicalTheta("theta0 must be one of the directions arg(C)/2 + k pi/2")


def laplace_exponents(exponents: Sequence) -> list[GaussRational]:
    """c -> -1/c, keeping the induced numbering."""
    out = []
    for c in exponents:
        c = to_gauss(c)
        if not c:
            raise ZeroExponent("0 has no Laplace image")
        out.append(to_gauss(-1 / c))
    return out


def hat_theta(theta: CirclePoint) -> CirclePoint:
    """pi - theta, exactly; involutive."""
    return theta.hat()


def transformed_layout(layout: ExponentLayout) -> ExponentLayout:
    require_aligned_layout(layout)
    hat_exps = laplace_exponents(layout.exponents)
    hat_t = hat_theta(layout.theta0)
    out = ExponentLayout(exponents=tuple(hat_exps), ranks=layout.ranks,
                         theta0=hat_t, pure=True)
    # the numbering of -1/C at pi - theta0 must be the induced one
    resorted = sort_exponents(list(zip(hat_exps, layout.ranks)), hat_t)
    if resorted.exponents != out.exponents:
        raise AssertionError("induced numbering of the transformed exponents is not sorted")
    return out


def laplace_transform(data: StokesFiltrations) -> StokesFiltrations:
    """Theorem rule: same space and filtrations on the transformed layout."""
    new_layout = transformed_layout(data.layout)
    return StokesFiltrations(layout=new_layout, steps=[list(f) for f in data.steps])


def inverse_laplace_transform(data: StokesFiltrations) -> StokesFiltrations:
    """Kernel e^{t tau}: same exponent and direction maps; composes to id."""
    return laplace_transform(data)


def laplace_transform_matrices(data: StokesMatrices) -> StokesFiltrations:
    """Convenience: accept matrix form via the filtration encoding."""
    return laplace_transform(to_filtrations(data))


def resort_to_canonical(data: StokesFiltrations) -> StokesFiltrations:
    """Re-anchor a layout given at any generic theta in the canonical chamber.

    Rejects directions separated from arg(C)/2 by a Stokes direction of some
    pair (chamber-crossing transport is out of scope).
    """
    layout = data.layout
    if not layout.pure:
        raise NotPure("the Laplace rule applies to pure data")
    if not is_aligned(layout.exponents):
        raise NotAligned("exponents do not share an argument")
    target = canonical_theta(layout.exponents)
    if layout.theta0 == target:
        return data
    dirs = set()
    for i in range(layout.n):
        for j in range(i + 1, layout.n):
            dirs.update(stokes_directions(layout.exponents[i], layout.exponents[j]))
    same_chamber = (not any(in_open_arc(p, layout.theta0, target) for p in dirs)
                    or not any(in_open_arc(p, target, layout.theta0) for p in dirs))
    if not same_chamber:
        raise NotCanonicalTheta("theta0 lies in a different chamber than arg(C)/2")
    new_layout = ExponentLayout(exponents=layout.exponents, ranks=layout.ranks,
                                theta0=target, pure=True)
    return StokesFiltrations(layout=new_layout, steps=[list(f) for f in data.steps])
