"""Exact cell decomposition of the blown-up disc fiber for the Laplace oracle.

Aligned data is rescaled so that the rapid-decay quadratic of the exponent
c = r * c_1 on the fiber over theta-hat_o^(nu) becomes

    Q_r(x, y) = r (x^2 - y^2) - 2 x + t,      r = c / c_1,  t = gamma / (-1/c_1),

with all-rational coefficients; a summand is present on a cell iff
(-1)^nu Q_r < 0 there, while the boundary circle and the collapsed inner disc
follow the asymptotic all-or-nothing rules.  The cell complex is the
arrangement of the four axes, the four diagonals, the conics Q_r = 0, the
boundary circle, the collapsed inner disc (vertex P), and, for even nu, a
vertical cut through the innermost rapid-decay band.  All sign decisions
reduce to one-dimensional orderings (axis traces, the pencil identity
Q_r - Q_{r'} = (r - r')(x^2 - y^2) on conic arcs, and asymptotic octant signs).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .cellsheaf import Cell, CellComplex
from .scalars import QuadReal, sign, sim, sre, to_gauss
from .stokes_data import ExponentLayout


class DegeneratePencil(ValueError):
    pass


class OracleGeometryError(AssertionError):
    """Inconsistent exact-sign bookkeeping; aborts rather than perturbs."""


def aligned_ratios(layout: ExponentLayout) -> list[Fraction]:
    """c_j / c_1 as positive rationals (raises if not aligned)."""
    from .laplace import NotAligned, positive_real_ratio

    out = []
    for c in layout.exponents:
        q = positive_real_ratio(c, layout.exponents[0])
        if q is None:
            raise NotAligned("exponents do not share an argument")
        out.append(q)
    if any(b <= a for a, b in zip(out, out[1:])):
        raise OracleGeometryError("aligned exponents must have increasing moduli")
    return out


def gamma_ratio(layout: ExponentLayout, gamma) -> Fraction:
    """gamma / (-1/c_1) as a positive rational (gamma on the transformed ray)."""
    from .laplace import NotAligned

    g = to_gauss(gamma)
    c1 = layout.exponents[0]
    q = g * (-c1)
    if sim(q) != 0 or sre(q) <= 0:
        raise NotAligned("gamma is not a positive multiple of -1/c_1")
    return sre(q)


def rational_below(v: QuadReal) -> Fraction:
    return v.a - abs(v.b) * (v.d + 1) - 1


def rational_above(v: QuadReal) -> Fraction:
    q = v.a + abs(v.b) * (v.d + 1) + 1
    assert v.compare(q) < 0
    return q


def rational_between(lo: QuadReal, hi: QuadReal, avoid: Sequence[Fraction] = ()) -> Fraction:
    """A rational strictly between two QuadReals, avoiding a finite set."""
    if lo.compare(hi) >= 0:
        raise ValueError("empty interval")
    L, H = rational_below(lo), rational_above(hi)
    while True:
        mid = (L + H) / 2
        if lo.compare(mid) >= 0:
            L = mid
        elif hi.compare(mid) <= 0:
            H = mid
        elif mid in avoid:
            L = mid  # dyadics are dense; the avoid set is finite
        else:
            return mid


OCT_SIGN = {0: 1, 1: -1, 2: -1, 3: 1, 4: 1, 5: -1, 6: -1, 7: 1}  # sign of x^2 - y^2


@dataclass
class _Vertex:
    label: str
    kind: str                      # "P", "B", "pt"
    octant: Optional[int] = None   # boundary vertices sit at angle m * pi/4
    x: Optional[QuadReal] = None
    y: Optional[QuadReal] = None
    chart: int = 0
    side: str = "cut"              # cut / plus / minus for the MV decomposition
    qsign: Optional[list[int]] = None


@dataclass
class _Edge:
    label: str
    tail: int
    head: int
    chart: int
    side: str
    qsign: Optional[list[int]]
    boundary_octant: Optional[int] = None  # set for ideal boundary arcs
    quadrant_pin: Optional[int] = None     # chart pinned onto adjacent faces
    dir_tail: Optional[tuple] = None       # direction into the edge at the tail
    dir_head: Optional[tuple] = None       # direction into the edge at the head
    conic: Optional[int] = None            # index when the edge lies on conic j


@dataclass
class DiscModel:
    layout: ExponentLayout
    nu: int
    t: Fraction
    ratios: list[Fraction]
    k: int
    x0: Optional[Fraction]
    vertices: list[_Vertex]
    edges: list[_Edge]
    faces: list[list[tuple[int, int]]]   # per face: [(edge index, orientation sign)]
    face_chart: list[int]
    face_qsign: list[list[int]]
    face_side: list[str]
    cut_vertex: int

    @property
    def n(self) -> int:
        return len(self.ratios)

    # cell ids in the assembled complex: vertices, then edges, then faces
    def vertex_cell(self, i: int) -> int:
        return i

    def edge_cell(self, i: int) -> int:
        return len(self.vertices) + i

    def face_cell(self, i: int) -> int:
        return len(self.vertices) + len(self.edges) + i

    def parity_present(self, qs: int) -> bool:
        """(-1)^nu Q < 0 for a cell where sign(Q) = qs."""
        return qs == (1 if self.nu % 2 else -1)

    def members_lt(self, qsign: list[int]) -> tuple[int, ...]:
        return tuple(j for j, qs in enumerate(qsign) if self.parity_present(qs))

    def boundary_members(self, octant: int) -> tuple[int, ...]:
        return tuple(range(self.n)) if self.parity_present(OCT_SIGN[octant]) else ()

    def cell_members(self, kind: str, idx: int, mode: str) -> tuple[int, ...]:
        if kind == "v":
            v = self.vertices[idx]
            if v.kind == "B":
                if v.octant % 2 == 1:
                    return ()  # asymptotic corners fail the strict rule
                return self.boundary_members(v.octant)
            if mode == "full":
                return tuple(range(self.n))
            if v.kind == "P":
                return tuple(range(self.n)) if self.nu % 2 else ()
            return self.members_lt(v.qsign)
        if kind == "e":
            e = self.edges[idx]
            if e.boundary_octant is not None:
                return self.boundary_members(e.boundary_octant)
            if mode == "full":
                return tuple(range(self.n))
            return self.members_lt(e.qsign)
        if mode == "full":
            return tuple(range(self.n))
        return self.members_lt(self.face_qsign[idx])

    def complex_for(self, mode: str) -> CellComplex:
        cells: list[Cell] = []
        for i, v in enumerate(self.vertices):
            cells.append(Cell(dim=0, chart=v.chart,
                              members=self.cell_members("v", i, mode), label=v.label))
        edge_ends = {}
        for i, e in enumerate(self.edges):
            cells.append(Cell(dim=1, chart=e.chart,
                              members=self.cell_members("e", i, mode), label=e.label))
            edge_ends[self.edge_cell(i)] = (e.tail, e.head)
        face_boundary = {}
        for i, bdry in enumerate(self.faces):
            cells.append(Cell(dim=2, chart=self.face_chart[i],
                              members=self.cell_members("f", i, mode), label="f%d" % i))
            face_boundary[self.face_cell(i)] = [(self.edge_cell(e), s) for e, s in bdry]
        return CellComplex(cells=cells, edge_ends=edge_ends, face_boundary=face_boundary)

    def side_cells(self, which: str) -> list[int]:
        """Closed subcomplex of one side of the cut (cut cells included)."""
        out = []
        for i, v in enumerate(self.vertices):
            if v.side in ("cut", which):
                out.append(self.vertex_cell(i))
        for i, e in enumerate(self.edges):
            if e.side in ("cut", which):
                out.append(self.edge_cell(i))
        for i, s in enumerate(self.face_side):
            if s == which:
                out.append(self.face_cell(i))
        return out

    def cut_cell_ids(self) -> list[int]:
        out = [self.vertex_cell(i) for i, v in enumerate(self.vertices) if v.side == "cut"]
        out += [self.edge_cell(i) for i, e in enumerate(self.edges) if e.side == "cut"]
        return out


def _chart_of_octant(nu: int, m: int) -> int:
    # quadrant of octants (2q, 2q+1) is Q_{q+1}; charts: Q1..Q4 = nu-1, nu-2, nu+1, nu
    return (nu - 1 - (m % 8) // 2) % 4


def _dir_cmp(d1, d2) -> int:
    """Exact ccw comparison of direction vectors sharing a radicand."""
    def quad(d):
        sx, sy = d[0].sign(), d[1].sign()
        if sx > 0 and sy >= 0:
            return 0
        if sx <= 0 and sy > 0:
            return 1
        if sx < 0 and sy <= 0:
            return 2
        return 3

    q1, q2 = quad(d1), quad(d2)
    if q1 != q2:
        return -1 if q1 < q2 else 1
    cross = (d1[0] * d2[1] - d1[1] * d2[0]).sign()
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    raise OracleGeometryError("tied tangent directions at a vertex")


_R = (QuadReal(1), QuadReal(0))
_L = (QuadReal(-1), QuadReal(0))
_U = (QuadReal(0), QuadReal(1))
_D = (QuadReal(0), QuadReal(-1))
_NE = (QuadReal(1), QuadReal(1))
_SW = (QuadReal(-1), QuadReal(-1))
_SE = (QuadReal(1), QuadReal(-1))
_NW = (QuadReal(-1), QuadReal(1))


def build_disc_model(layout: ExponentLayout, gamma, nu: int) -> DiscModel:
    ratios = aligned_ratios(layout)
    t = gamma_ratio(layout, gamma)
    n = len(ratios)
    nu %= 4
    even = nu % 2 == 0
    if any(r * t == 1 for r in ratios):
        raise DegeneratePencil("gamma equals a transformed exponent")
    k = sum(1 for r in ratios if r * t < 1)

    delta = [1 - r * t for r in ratios]
    srm = [QuadReal(1 / ratios[j], Fraction(-1, 1) / ratios[j], delta[j]) for j in range(k)]
    srp = [QuadReal(1 / ratios[j], Fraction(1, 1) / ratios[j], delta[j]) for j in range(k)]
    yv = [QuadReal(0, 1, t / ratios[j]) for j in range(n)]

    x0: Optional[Fraction] = None
    ly: list[Optional[QuadReal]] = []
    if even:
        if k >= 1:
            avoid = {s.a for s in srm + srp if s.is_rational()}
            cand = 1 / ratios[k - 1]
            x0 = cand if cand not in avoid else rational_between(
                srm[k - 1], srp[k - 1], sorted(avoid))
        else:
            x0 = t / 2 + 1
        if not x0 > t / 2:
            raise OracleGeometryError("cut position does not clear the base points")
        ly = [QuadReal(0, 1, x0 * x0 + (t - 2 * x0) / ratios[j]) if j >= k else None
              for j in range(n)]

    chartQ1, chartQ2, chartQ3, chartQ4 = ((nu - 1) % 4, (nu - 2) % 4, (nu + 1) % 4, nu)
    # MV sides: odd nu cuts along the x-diameter (plus = upper half);
    # even nu cuts along the vertical line x = x0 (plus = right half).
    UP_OR_RIGHT, DOWN_OR_LEFT = "plus", "minus"

    def side_ud(upper: bool, x_is_left: bool = True) -> str:
        if even:
            return DOWN_OR_LEFT if x_is_left else UP_OR_RIGHT
        return UP_OR_RIGHT if upper else DOWN_OR_LEFT

    V: list[_Vertex] = []

    def add_v(label, kind, octant=None, x=None, y=None, chart=0, side="cut", qsign=None):
        V.append(_Vertex(label=label, kind=kind, octant=octant, x=x, y=y,
                         chart=chart, side=side, qsign=qsign))
        return len(V) - 1

    def qsign_xaxis(x: QuadReal) -> list[int]:
        return [((x * x) * r - x * 2 + QuadReal(t)).sign() for r in ratios]

    P = add_v("P", "P", chart=nu,
              side="cut" if not even else DOWN_OR_LEFT)

    def bvert_side(m: int) -> str:
        if even:
            if m in (2, 6):
                return "cut"
            return UP_OR_RIGHT if m in (7, 0, 1) else DOWN_OR_LEFT
        if m in (0, 4):
            return "cut"
        return UP_OR_RIGHT if m in (1, 2, 3) else DOWN_OR_LEFT

    bchart = {0: nu, 1: chartQ1, 2: chartQ1, 3: chartQ2, 4: chartQ2,
              5: chartQ3, 6: chartQ3, 7: nu}
    B = [add_v("B%d" % m, "B", octant=m, chart=bchart[m], side=bvert_side(m))
         for m in range(8)]

    sxm = [add_v("s-%d" % j, "pt", x=srm[j], y=QuadReal(0), chart=nu,
                 side="cut" if not even else DOWN_OR_LEFT, qsign=qsign_xaxis(srm[j]))
           for j in range(k)]
    sxp = [add_v("s+%d" % j, "pt", x=srp[j], y=QuadReal(0), chart=nu,
                 side="cut" if not even else UP_OR_RIGHT, qsign=qsign_xaxis(srp[j]))
           for j in range(k)]
    X0 = None
    if even:
        X0 = add_v("x0", "pt", x=QuadReal(x0), y=QuadReal(0), chart=nu, side="cut",
                   qsign=qsign_xaxis(QuadReal(x0)))

    def qsign_yaxis(j: int) -> list[int]:
        # Q_i(0, +-sqrt(t/r_j)) = t (1 - r_i / r_j)
        return [sign(ratios[j] - ratios[i]) for i in range(n)]

    yvp = [add_v("y+%d" % j, "pt", x=QuadReal(0), y=yv[j], chart=chartQ1,
                 side=side_ud(True), qsign=qsign_yaxis(j)) for j in range(n)]
    yvm = [add_v("y-%d" % j, "pt", x=QuadReal(0), y=-yv[j], chart=chartQ3,
                 side=side_ud(False), qsign=qsign_yaxis(j)) for j in range(n)]
    base_up = add_v("bu", "pt", x=QuadReal(t / 2), y=QuadReal(t / 2), chart=chartQ1,
                    side=side_ud(True), qsign=[0] * n)
    base_dn = add_v("bd", "pt", x=QuadReal(t / 2), y=QuadReal(-t / 2), chart=chartQ4,
                    side=side_ud(False), qsign=[0] * n)
    d1x = d7x = None
    lxp: dict[int, int] = {}
    lxm: dict[int, int] = {}
    if even:
        d1x = add_v("d1x", "pt", x=QuadReal(x0), y=QuadReal(x0), chart=chartQ1,
                    side="cut", qsign=[sign(t - 2 * x0)] * n)
        d7x = add_v("d7x", "pt", x=QuadReal(x0), y=QuadReal(-x0), chart=chartQ4,
                    side="cut", qsign=[sign(t - 2 * x0)] * n)
        for j in range(k, n):
            q = [sign((2 * x0 - t) * (ratios[i] - ratios[j])) for i in range(n)]
            lxp[j] = add_v("l+%d" % j, "pt", x=QuadReal(x0), y=ly[j], chart=chartQ1,
                           side="cut", qsign=q)
            lxm[j] = add_v("l-%d" % j, "pt", x=QuadReal(x0), y=-ly[j], chart=chartQ4,
                           side="cut", qsign=q)

    E: list[_Edge] = []

    def add_e(label, tail, head, chart, side, qsign, boundary_octant=None,
              quadrant_pin=None, dir_tail=None, dir_head=None, conic=None):
        E.append(_Edge(label=label, tail=tail, head=head, chart=chart, side=side,
                       qsign=qsign, boundary_octant=boundary_octant,
                       quadrant_pin=quadrant_pin, dir_tail=dir_tail,
                       dir_head=dir_head, conic=conic))
        return len(E) - 1

    def qsign_x_at(q: Fraction) -> list[int]:
        return [sign(r * q * q - 2 * q + t) for r in ratios]

    # +x axis chain
    xchain = [P] + sxm + ([X0] if even else []) + list(reversed(sxp)) + [B[0]]
    xcoords: list[Optional[QuadReal]] = [QuadReal(0)] + list(srm) + \
        ([QuadReal(x0)] if even else []) + list(reversed(srp)) + [None]
    for a in range(len(xchain) - 1):
        lo, hi = xcoords[a], xcoords[a + 1]
        q = rational_between(lo, hi) if hi is not None else rational_above(lo)
        side = "cut" if not even else (DOWN_OR_LEFT if q < x0 else UP_OR_RIGHT)
        add_e("x+%d" % a, xchain[a], xchain[a + 1], nu, side, qsign_x_at(q),
              dir_tail=_R, dir_head=_L)
    # -x axis
    add_e("x-", P, B[4], chartQ2, "cut" if not even else DOWN_OR_LEFT,
          qsign_x_at(Fraction(-1)), dir_tail=_L, dir_head=_R)
    # +y / -y axes (ascending |y| = descending ratio index)
    ychain_ids = list(reversed(range(n)))
    ycoords: list[Optional[QuadReal]] = [QuadReal(0)] + [yv[j] for j in ychain_ids] + [None]
    for sgn, chain_end, chart, lbl in ((1, B[2], chartQ1, "y+"), (-1, B[6], chartQ3, "y-")):
        chain = [P] + [(yvp if sgn > 0 else yvm)[j] for j in ychain_ids] + [chain_end]
        for a in range(len(chain) - 1):
            lo, hi = ycoords[a], ycoords[a + 1]
            q = rational_between(lo, hi) if hi is not None else rational_above(lo)
            add_e("%s%d" % (lbl, a), chain[a], chain[a + 1], chart,
                  side_ud(sgn > 0), [sign(-r * q * q + t) for r in ratios],
                  dir_tail=_U if sgn > 0 else _D, dir_head=_D if sgn > 0 else _U)
    # diagonals
    d1chain = [P, base_up] + ([d1x] if even else []) + [B[1]]
    d7chain = [P, base_dn] + ([d7x] if even else []) + [B[7]]
    dcoords: list[Optional[Fraction]] = [Fraction(0), t / 2] + ([x0] if even else []) + [None]
    for chain, chart, lbl, upper, dt, dh in ((d1chain, chartQ1, "d1_", True, _NE, _SW),
                                             (d7chain, chartQ4, "d7_", False, _SE, _NW)):
        for a in range(len(chain) - 1):
            lo, hi = dcoords[a], dcoords[a + 1]
            q = (lo + hi) / 2 if hi is not None else lo + 1
            if even:
                side = DOWN_OR_LEFT if q < x0 else UP_OR_RIGHT
            else:
                side = side_ud(upper)
            add_e("%s%d" % (lbl, a), chain[a], chain[a + 1], chart, side,
                  [sign(t - 2 * q)] * n, quadrant_pin=chart, dir_tail=dt, dir_head=dh)
    add_e("d3", P, B[3], chartQ2, side_ud(True), [1] * n, quadrant_pin=chartQ2,
          dir_tail=_NW, dir_head=_SE)
    add_e("d5", P, B[5], chartQ3, side_ud(False), [1] * n, quadrant_pin=chartQ3,
          dir_tail=_SW, dir_head=_NE)
    # vertical cut (even nu only)
    if even:
        lcoords: list[Optional[QuadReal]] = [QuadReal(0)] + \
            [ly[j] for j in range(k, n)] + [QuadReal(x0), None]
        for sgn, chain_end, chart, lbl, lx in ((1, B[2], chartQ1, "l+", lxp),
                                               (-1, B[6], chartQ4, "l-", lxm)):
            chain = [X0] + [lx[j] for j in range(k, n)] + \
                [d1x if sgn > 0 else d7x, chain_end]
            for a in range(len(chain) - 1):
                lo, hi = lcoords[a], lcoords[a + 1]
                q = rational_between(lo, hi) if hi is not None else rational_above(lo)
                add_e("%s%d" % (lbl, a), chain[a], chain[a + 1], chart, "cut",
                      [sign(r * (x0 * x0 - q * q) - 2 * x0 + t) for r in ratios],
                      quadrant_pin=chart,
                      dir_tail=_U if sgn > 0 else _D, dir_head=_D if sgn > 0 else _U)
    # boundary arcs

    def arc_side(m: int) -> str:
        if even:
            return UP_OR_RIGHT if m in (6, 7, 0, 1) else DOWN_OR_LEFT
        return UP_OR_RIGHT if m in (0, 1, 2, 3) else DOWN_OR_LEFT

    barc = [add_e("arc%d" % m, B[m], B[(m + 1) % 8], _chart_of_octant(nu, m),
                  arc_side(m), None, boundary_octant=m,
                  quadrant_pin=_chart_of_octant(nu, m))
            for m in range(8)]

    # conic arcs
    def pencil_qsign(j: int, octm: int) -> list[int]:
        return [0 if i == j else sign((ratios[i] - ratios[j]) * OCT_SIGN[octm])
                for i in range(n)]

    def tang(j: int, vid: int, want: str, flip: bool):
        vx, vy = V[vid].x, V[vid].y
        d = (vy * ratios[j], vx * ratios[j] - 1)
        comp = d[1] if want.startswith("y") else d[0]
        s = comp.sign()
        if s == 0:
            raise OracleGeometryError("tangent aligned with the chain parameter")
        if (s > 0) != want.endswith(">0"):
            d = (-d[0], -d[1])
        return (-d[0], -d[1]) if flip else d

    def conic_chain(j, chain, octs, sides_odd, lbl, want):
        for a in range(len(chain) - 1):
            tail, head = chain[a], chain[a + 1]
            dt = None if V[tail].kind == "B" else tang(j, tail, want, False)
            dh = None if V[head].kind == "B" else tang(j, head, want, True)
            add_e("%s%d" % (lbl, a), tail, head, _chart_of_octant(nu, octs[a]),
                  sides_odd[a], pencil_qsign(j, octs[a]),
                  quadrant_pin=_chart_of_octant(nu, octs[a]),
                  dir_tail=dt, dir_head=dh, conic=j)

    for j in range(n):
        if j < k:
            # left branch (decreasing y) and right branch (increasing y)
            sides = [side_ud(True)] * 3 + [side_ud(False)] * 3 if not even \
                else [DOWN_OR_LEFT] * 6
            conic_chain(j, [B[3], yvp[j], base_up, sxm[j], base_dn, yvm[j], B[5]],
                        [2, 1, 0, 7, 6, 5], sides, "c%dL" % j, "y<0")
            sides = [side_ud(False), side_ud(True)] if not even else [UP_OR_RIGHT] * 2
            conic_chain(j, [B[7], sxp[j], B[1]], [7, 0], sides, "c%dR" % j, "y>0")
        else:
            # up and down branches (increasing x)
            up_chain = [B[3], yvp[j], base_up] + ([lxp[j]] if even else []) + [B[1]]
            octs = [2, 1, 0] + ([0] if even else [])
            if even:
                sides = [DOWN_OR_LEFT] * (len(up_chain) - 2) + [UP_OR_RIGHT]
            else:
                sides = [side_ud(True)] * (len(up_chain) - 1)
            conic_chain(j, up_chain, octs, sides, "c%dU" % j, "x>0")
            dn_chain = [B[5], yvm[j], base_dn] + ([lxm[j]] if even else []) + [B[7]]
            octs = [5, 6, 7] + ([7] if even else [])
            if even:
                sides = [DOWN_OR_LEFT] * (len(dn_chain) - 2) + [UP_OR_RIGHT]
            else:
                sides = [side_ud(False)] * (len(dn_chain) - 1)
            conic_chain(j, dn_chain, octs, sides, "c%dD" % j, "x>0")

    rotations = _build_rotations(V, E, P, B, barc, n, even)
    faces, _outer = _trace_faces(E, rotations)
    face_chart, face_qsign, face_side = _face_data(E, faces, n)

    model = DiscModel(layout=layout, nu=nu, t=t, ratios=ratios, k=k, x0=x0,
                      vertices=V, edges=E, faces=faces, face_chart=face_chart,
                      face_qsign=face_qsign, face_side=face_side,
                      cut_vertex=(X0 if even else P))
    euler = len(V) - len(E) + len(faces)
    if euler != 1:
        raise OracleGeometryError("disc model has Euler characteristic %d" % euler)
    return model


def _build_rotations(V, E, P, B, barc, n, even):
    """CCW cyclic order of half-edge ends around every vertex.

    Ends are (edge index, endpoint) with endpoint 0 = tail, 1 = head.
    """
    incident: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(V))}
    for ei, e in enumerate(E):
        incident[e.tail].append((ei, 0))
        incident[e.head].append((ei, 1))

    rotations: dict[int, list[tuple[int, int]]] = {}

    def only(vid, label):
        ends = [(ei, end) for (ei, end) in incident[vid] if E[ei].label == label]
        if len(ends) != 1:
            raise OracleGeometryError("incidence mismatch for %s" % label)
        return ends[0]

    def with_prefix(vid, prefix):
        return [(ei, end) for (ei, end) in incident[vid] if E[ei].label.startswith(prefix)]

    def conic_end(vid, j):
        ends = [(ei, end) for (ei, end) in incident[vid] if E[ei].conic == j]
        if len(ends) != 1:
            raise OracleGeometryError("expected a single conic end at a corner")
        return ends[0]

    rotations[P] = [only(P, lbl) for lbl in
                    ("x+0", "d1_0", "y+0", "d3", "x-", "d5", "y-0", "d7_0")]

    arc_tail = {m: (barc[m], 0) for m in range(8)}
    arc_head = {m: (barc[m], 1) for m in range(8)}

    rotations[B[0]] = [arc_tail[0]] + with_prefix(B[0], "x+") + [arc_head[7]]
    rotations[B[1]] = ([arc_tail[1]] + with_prefix(B[1], "d1_")
                       + [conic_end(B[1], j) for j in reversed(range(n))] + [arc_head[0]])
    rotations[B[2]] = ([arc_tail[2]] + with_prefix(B[2], "y+")
                       + (with_prefix(B[2], "l+") if even else []) + [arc_head[1]])
    rotations[B[3]] = ([arc_tail[3]] + with_prefix(B[3], "d3")
                       + [conic_end(B[3], j) for j in reversed(range(n))] + [arc_head[2]])
    rotations[B[4]] = [arc_tail[4]] + with_prefix(B[4], "x-") + [arc_head[3]]
    rotations[B[5]] = ([arc_tail[5]] + [conic_end(B[5], j) for j in range(n)]
                       + with_prefix(B[5], "d5") + [arc_head[4]])
    rotations[B[6]] = ([arc_tail[6]] + (with_prefix(B[6], "l-") if even else [])
                       + with_prefix(B[6], "y-") + [arc_head[5]])
    rotations[B[7]] = ([arc_tail[7]] + [conic_end(B[7], j) for j in range(n)]
                       + with_prefix(B[7], "d7_") + [arc_head[6]])

    for vid in range(len(V)):
        if vid in rotations:
            continue
        dirs = []
        for (ei, end) in incident[vid]:
            d = E[ei].dir_tail if end == 0 else E[ei].dir_head
            if d is None:
                raise OracleGeometryError("missing direction at vertex %s" % V[vid].label)
            dirs.append(((ei, end), d))
        dirs.sort(key=functools.cmp_to_key(lambda a, b: _dir_cmp(a[1], b[1])))
        rotations[vid] = [de[0] for de in dirs]
    return rotations


def _trace_faces(E, rotations):
    """Orbits of darts under 'ccw-predecessor of the entering end'.

    Interior faces come out counterclockwise; the single all-boundary reversed
    orbit is the outer face and is dropped.
    """
    pos = {}
    for vid, rot in rotations.items():
        for idx, end in enumerate(rot):
            pos[end] = (vid, idx)

    def next_dart(ei, forward):
        enter_end = (ei, 1 if forward else 0)
        vid, idx = pos[enter_end]
        rot = rotations[vid]
        nei, nend = rot[(idx - 1) % len(rot)]
        return nei, nend == 0

    seen = set()
    faces = []
    outer = None
    for ei in range(len(E)):
        for forward in (True, False):
            if (ei, forward) in seen:
                continue
            cycle = []
            cur = (ei, forward)
            while cur not in seen:
                seen.add(cur)
                cycle.append(cur)
                cur = next_dart(*cur)
            if cur != cycle[0]:
                raise OracleGeometryError("face tracing derailed")
            if all(E[c[0]].boundary_octant is not None and not c[1] for c in cycle):
                if outer is not None:
                    raise OracleGeometryError("two outer faces")
                outer = cycle
            else:
                faces.append([(c[0], 1 if c[1] else -1) for c in cycle])
    if outer is None or len(outer) != 8:
        raise OracleGeometryError("outer face not found")
    return faces, outer


def _face_data(E, faces, n):
    face_chart, face_qsign, face_side = [], [], []
    for bdry in faces:
        chart = None
        side = None
        qs: list[Optional[int]] = [None] * n
        for (ei, _sgn) in bdry:
            e = E[ei]
            if e.quadrant_pin is not None:
                if chart is None:
                    chart = e.quadrant_pin
                elif chart != e.quadrant_pin:
                    raise OracleGeometryError("face pinned to two quadrants")
            if e.side != "cut":
                if side is None:
                    side = e.side
                elif side != e.side:
                    raise OracleGeometryError("face on both sides of the cut")
            if e.boundary_octant is not None:
                s = OCT_SIGN[e.boundary_octant]
                for i in range(n):
                    if qs[i] is None:
                        qs[i] = s
                    elif qs[i] != s:
                        raise OracleGeometryError("inconsistent face sign (boundary)")
            elif e.qsign is not None:
                for i in range(n):
                    if e.conic == i or e.qsign[i] == 0:
                        continue
                    if qs[i] is None:
                        qs[i] = e.qsign[i]
                    elif qs[i] != e.qsign[i]:
                        raise OracleGeometryError("inconsistent face sign")
        if chart is None or side is None or any(q is None for q in qs):
            raise OracleGeometryError("underdetermined face data")
        face_chart.append(chart)
        face_qsign.append(qs)
        face_side.append(side)
    return face_chart, face_qsign, face_side
