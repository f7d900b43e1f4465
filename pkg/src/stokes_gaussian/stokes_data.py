"""Stokes data of (pure) Gaussian type: matrix and filtration encodings.

Matrix form (general): four r x r block-triangular isomorphisms S10, S21, S32,
S03 with invertible diagonal blocks.  Variant form: all diagonal blocks are the
identity and the formal monodromies T_i are stored separately; purity means
diag(T) . S03 . S32 . S21 . S10 = id.  Filtration form: one space L with four
pairwise-opposite filtrations indexed by the exponents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .circle import CirclePoint, Order, is_generic, leq_at, sort_circle_points, stokes_directions
from .linalg import Matrix, Subspace
from .scalars import GaussRational, ONE, ZERO, gauss, to_gauss


class NonGenericDirection(ValueError):
    pass


class MonodromyNotIdentity(ValueError):
    pass


class NotOpposite(ValueError):
    pass


class NotExtreme(ValueError):
    pass


class IncompatibleLayouts(ValueError):
    pass


class GenerationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class ExponentLayout:
    """Exponents sorted by the order at theta0, with block ranks."""

    exponents: tuple[GaussRational, ...]
    ranks: tuple[int, ...]
    theta0: CirclePoint
    pure: bool = True

    def __post_init__(self):
        n = len(self.exponents)
        if len(self.ranks) != n:
            raise ValueError("ranks/exponents length mismatch")
        if n == 0:
            if self.pure:
                raise ValueError("empty exponent set rejected for pure data")
            return
        if any(r < 1 for r in self.ranks):
            raise ValueError("rank-0 blocks rejected")
        if self.pure and any(not c for c in self.exponents):
            raise ValueError("pure data requires 0 not in C")
        if len(set(self.exponents)) != n:
            raise ValueError("exponents must be distinct")
        if not is_generic(self.theta0, self.exponents):
            raise NonGenericDirection("theta0 is a Stokes direction of a pair in C")
        for i in range(n - 1):
            if leq_at(self.exponents[i], self.exponents[i + 1], self.theta0) is not Order.LESS:
                raise ValueError("exponents not sorted by the order at theta0")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def rank(self) -> int:
        return sum(self.ranks)

    def block_slices(self) -> list[slice]:
        out, off = [], 0
        for r in self.ranks:
            out.append(slice(off, off + r))
            off += r
        return out

    def block_span(self, indices: Sequence[int]) -> Subspace:
        """Coordinate subspace spanned by the given blocks (0-based indices)."""
        sl = self.block_slices()
        vecs = []
        for i in indices:
            for j in range(sl[i].start, sl[i].stop):
                v = [ZERO] * self.rank
                v[j] = ONE
                vecs.append(v)
        return Subspace.from_vectors(vecs, self.rank)

    def index_of(self, c) -> int:
        return self.exponents.index(to_gauss(c))

    def is_field_rational(self) -> bool:
        return all(c.im == 0 for c in self.exponents)


def sort_exponents(items: Sequence[tuple], theta0: CirclePoint, pure: bool = True) -> ExponentLayout:
    """Layout from (exponent, rank) pairs, ordered by <_theta0.

    Raises NonGenericDirection if theta0 is a Stokes direction of some pair.
    """
    exps = [to_gauss(c) for c, _ in items]
    if not is_generic(theta0, exps):
        raise NonGenericDirection("theta0 is a Stokes direction of a pair in C")

    def key(c):
        return sum(1 for d in exps if d != c and leq_at(d, c, theta0) is Order.LESS)

    order = sorted(range(len(exps)), key=lambda i: key(exps[i]))
    return ExponentLayout(
        exponents=tuple(exps[i] for i in order),
        ranks=tuple(items[i][1] for i in order),
        theta0=theta0,
        pure=pure,
    )


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, msg: str):
        self.violations.append(msg)


GENERAL = "general"
VARIANT = "variant"

# For nu = 0, 2 the map S^(nu,nu-1) is block-upper triangular; lower for nu = 1, 3.
_UPPER = {0: True, 1: False, 2: True, 3: False}


@dataclass
class StokesMatrices:
    layout: ExponentLayout
    s10: Matrix
    s21: Matrix
    s32: Matrix
    s03: Matrix
    form: str = GENERAL
    t: Optional[list[Matrix]] = None  # formal monodromies, variant form only

    def s(self, nu: int) -> Matrix:
        """S^(nu, nu-1): nu=1 -> S10, nu=2 -> S21, nu=3 -> S32, nu=0 -> S03."""
        return (self.s03, self.s10, self.s21, self.s32)[nu % 4]

    def full_s03(self) -> Matrix:
        """S^(0,3) with formal monodromies folded back in (gluing matrix)."""
        if self.form == GENERAL:
            return self.s03
        return _block_diag(self.t, self.layout) * self.s03

    def full_s(self, nu: int) -> Matrix:
        return self.full_s03() if nu % 4 == 0 else self.s(nu)

    def block(self, M: Matrix, i: int, j: int) -> Matrix:
        sl = self.layout.block_slices()
        return M.submatrix(range(sl[i].start, sl[i].stop), range(sl[j].start, sl[j].stop))


@dataclass
class StokesFiltrations:
    """Space L = k^r with four filtrations indexed by the layout's numbering.

    steps[nu][i] is L_{<=nu, c_{i+1}}; for nu even the family increases with i,
    for nu odd it decreases (the order at theta0 is reversed).
    """

    layout: ExponentLayout
    steps: list[list[Subspace]]

    @property
    def space_dim(self) -> int:
        return self.layout.rank

    def step(self, nu: int, i: int) -> Subspace:
        return self.steps[nu % 4][i]

    def strict_step(self, nu: int, i: int) -> Subspace:
        """L_{<nu, c_{i+1}} = sum of the steps strictly below in the nu-order."""
        nu %= 4
        n = self.layout.n
        if nu % 2 == 0:
            return self.steps[nu][i - 1] if i > 0 else Subspace.zero(self.space_dim)
        return self.steps[nu][i + 1] if i + 1 < n else Subspace.zero(self.space_dim)

    def graded_piece(self, nu: int, i: int) -> Subspace:
        """G_i^(nu) = L_{<=nu i} /\\ L_{<=nu+1 i}."""
        return self.step(nu, i).intersect(self.step(nu + 1, i))

    def step_at(self, nu: int, c) -> Subspace:
        """L_{<=nu, c} for an arbitrary exponent c: sum of steps with c_i <=_nu c."""
        c = to_gauss(c)
        theta_nu = self.layout.theta0.rotate_quarters(nu % 4)
        out = Subspace.zero(self.space_dim)
        for i, ci in enumerate(self.layout.exponents):
            o = leq_at(ci, c, theta_nu)
            if o is Order.INCOMPARABLE:
                raise NonGenericDirection("direction is a Stokes direction of (c_i, c)")
            if o in (Order.LESS, Order.EQUAL):
                out = out.add(self.steps[nu % 4][i])
        return out


@dataclass
class StokesMorphism:
    source: StokesFiltrations
    target: StokesFiltrations
    matrix: Matrix  # dim L_target x dim L_source

    def check(self) -> bool:
        """Compatibility with the filtrations, evaluated at every exponent in play."""
        exps = set(self.source.layout.exponents) | set(self.target.layout.exponents)
        for nu in range(4):
            for c in exps:
                img = self.source.step_at(nu, c).map_by(self.matrix)
                if not self.target.step_at(nu, c).contains_subspace(img):
                    return False
        return True


def _block_diag(blocks: Sequence[Matrix], layout: ExponentLayout) -> Matrix:
    r = layout.rank
    M = Matrix.zero(r, r)
    sl = layout.block_slices()
    for b, s in zip(blocks, sl):
        for i in range(b.nrows):
            for j in range(b.ncols):
                M.rows[s.start + i][s.start + j] = b.rows[i][j]
    return M


def _check_triangular(data: StokesMatrices, nu: int, report: ValidationReport):
    M = data.s(nu)
    sl = data.layout.block_slices()
    upper = _UPPER[nu]
    for i in range(data.layout.n):
        for j in range(data.layout.n):
            blk = M.submatrix(range(sl[i].start, sl[i].stop), range(sl[j].start, sl[j].stop))
            if upper and i > j and not blk.is_zero():
                report.add("S(%d) block (%d,%d) must vanish (block-upper)" % (nu, i, j))
            if not upper and i < j and not blk.is_zero():
                report.add("S(%d) block (%d,%d) must vanish (block-lower)" % (nu, i, j))
            if i == j:
                if data.form == VARIANT:
                    if blk != Matrix.identity(blk.nrows):
                        report.add("S(%d) diagonal block %d must be id (variant)" % (nu, i))
                elif not blk.is_invertible():
                    report.add("S(%d) diagonal block %d not invertible" % (nu, i))


def validate(data) -> ValidationReport:
    """Check all type invariants; report-based, never raises on bad content."""
    report = ValidationReport()
    if isinstance(data, StokesMatrices):
        r = data.layout.rank
        for nu in range(4):
            M = data.s(nu)
            if (M.nrows, M.ncols) != (r, r):
                report.add("S(%d) has wrong shape" % nu)
                return report
        for nu in range(4):
            _check_triangular(data, nu, report)
        if data.form == VARIANT:
            if data.t is None or len(data.t) != data.layout.n:
                report.add("variant form requires one T block per exponent")
                return report
            for i, (ti, ri) in enumerate(zip(data.t, data.layout.ranks)):
                if (ti.nrows, ti.ncols) != (ri, ri):
                    report.add("T block %d has wrong shape" % i)
                elif not ti.is_invertible():
                    report.add("T block %d not invertible" % i)
        if data.layout.pure and not report.violations:
            if monodromy(data) != Matrix.identity(r):
                report.add("pure data requires total monodromy = id")
        return report
    if isinstance(data, StokesFiltrations):
        n = data.layout.n
        r = data.layout.rank
        if len(data.steps) != 4 or any(len(f) != n for f in data.steps):
            report.add("need four filtrations with one step per exponent")
            return report
        if n == 0:
            return report  # the zero object
        full = Subspace.full(r)
        for nu in range(4):
            top = data.steps[nu][n - 1] if nu % 2 == 0 else data.steps[nu][0]
            if top != full:
                report.add("filtration nu=%d is not exhaustive" % nu)
            seq = data.steps[nu] if nu % 2 == 0 else list(reversed(data.steps[nu]))
            for a, b in zip(seq, seq[1:]):
                if not b.contains_subspace(a):
                    report.add("filtration nu=%d is not nested" % nu)
                    break
        for nu in range(4):
            total = Subspace.zero(r)
            dims = 0
            for i in range(n):
                g = data.graded_piece(nu, i)
                if g.dim != data.layout.ranks[i]:
                    report.add("graded piece (nu=%d, i=%d) has dim %d, expected %d"
                               % (nu, i, g.dim, data.layout.ranks[i]))
                dims += g.dim
                total = total.add(g)
            if not (dims == r and total == full):
                report.add("filtrations nu=%d, nu+1 are not opposite" % nu)
        return report
    raise TypeError("cannot validate %r" % (data,))


def monodromy(data: StokesMatrices) -> Matrix:
    """Total monodromy (with formal monodromies folded in for variant form)."""
    return data.full_s03() * data.s32 * data.s21 * data.s10


def formal_monodromies(data: StokesMatrices) -> list[Matrix]:
    """T_c = S03_cc S32_cc S21_cc S10_cc per exponent (equals stored T in variant form)."""
    out = []
    for i in range(data.layout.n):
        m = (data.block(data.full_s03(), i, i) * data.block(data.s32, i, i)
             * data.block(data.s21, i, i) * data.block(data.s10, i, i))
        out.append(m)
    return out


def normalize(data: StokesMatrices) -> StokesMatrices:
    """Equivalent variant-form data with Lambda^(0) = id; idempotent."""
    if data.form == VARIANT:
        return data
    layout = data.layout
    n = layout.n
    sl = layout.block_slices()
    lam = [[Matrix.identity(r) for r in layout.ranks] for _ in range(4)]
    lam[1] = [data.block(data.s10, i, i).inverse() for i in range(n)]
    lam[2] = [lam[1][i] * data.block(data.s21, i, i).inverse() for i in range(n)]
    lam[3] = [lam[2][i] * data.block(data.s32, i, i).inverse() for i in range(n)]

    def act(M: Matrix, lv: list[Matrix], lw: list[Matrix]) -> Matrix:
        return _block_diag(lv, layout) * M * _block_diag([b.inverse() for b in lw], layout)

    s10 = act(data.s10, lam[1], lam[0])
    s21 = act(data.s21, lam[2], lam[1])
    s32 = act(data.s32, lam[3], lam[2])
    s03 = act(data.s03, lam[0], lam[3])
    t = [s03.submatrix(range(sl[i].start, sl[i].stop), range(sl[i].start, sl[i].stop))
         for i in range(n)]
    s03v = _block_diag([ti.inverse() for ti in t], layout) * s03
    return StokesMatrices(layout=layout, s10=s10, s21=s21, s32=s32, s03=s03v,
                          form=VARIANT, t=t)


def equivalence_action(data: StokesMatrices, lam: Sequence[Sequence[Matrix]]) -> StokesMatrices:
    """S'(nu,nu-1) = Lambda^(nu) S(nu,nu-1) (Lambda^(nu-1))^{-1}, general form out."""
    layout = data.layout
    if data.form != GENERAL:
        raise ValueError("equivalence action is defined on general-form data")

    def act(M, lv, lw):
        return _block_diag(list(lv), layout) * M * _block_diag([b.inverse() for b in lw], layout)

    return StokesMatrices(
        layout=layout,
        s10=act(data.s10, lam[1], lam[0]),
        s21=act(data.s21, lam[2], lam[1]),
        s32=act(data.s32, lam[3], lam[2]),
        s03=act(data.s03, lam[0], lam[3]),
        form=GENERAL,
    )


def to_filtrations(data: StokesMatrices) -> StokesFiltrations:
    """Filtration-form data on L = k^r (basis = the G^(0) grading).

    nu = 0, 1 are the standard increasing/decreasing flags; nu = 2, 3 transport
    the G^(2) grading through (S21 S10)^{-1} (= S03 S32, checked).
    """
    layout = data.layout
    r = layout.rank
    if monodromy(data) != Matrix.identity(r):
        raise MonodromyNotIdentity("filtration form needs total monodromy = id")
    M = (data.s21 * data.s10).inverse()
    other = data.full_s03() * data.s32
    assert M == other, "the two transports disagree, monodromy is not id"
    n = layout.n
    steps: list[list[Subspace]] = [[], [], [], []]
    for i in range(n):
        inc = layout.block_span(range(i + 1))
        dec = layout.block_span(range(i, n))
        steps[0].append(inc)
        steps[1].append(dec)
        steps[2].append(inc.map_by(M))
        steps[3].append(dec.map_by(M))
    out = StokesFiltrations(layout=layout, steps=steps)
    rep = validate(out)
    if not rep.ok:
        raise NotOpposite("conversion produced invalid filtrations: %s" % rep.violations)
    return out


def to_matrices(data: StokesFiltrations) -> StokesMatrices:
    """Variant-form matrices in the echelon bases of the graded pieces."""
    rep = validate(data)
    if not rep.ok:
        raise NotOpposite("invalid filtration data: %s" % rep.violations)
    layout = data.layout
    n, r = layout.n, layout.rank
    sigma = []
    for nu in range(4):
        cols: list[list] = []
        for i in range(n):
            g = data.graded_piece(nu, i)
            cols.extend(g.rows)
        sigma.append(Matrix(cols, ncols=r).transpose())
    s = [sigma[nu].inverse() * sigma[(nu - 1) % 4] for nu in range(4)]
    general = StokesMatrices(layout=layout, s10=s[1], s21=s[2], s32=s[3], s03=s[0],
                             form=GENERAL)
    rep = validate(general)
    if not rep.ok:
        raise NotOpposite("conversion violated matrix invariants: %s" % rep.violations)
    return normalize(general)


def direct_sum(a: StokesFiltrations, b: StokesFiltrations) -> StokesFiltrations:
    """Blockwise direct sum; both summands must share (C, theta0)."""
    if (a.layout.exponents != b.layout.exponents
            or a.layout.theta0 != b.layout.theta0):
        raise IncompatibleLayouts("direct sum needs identical (C, theta0)")
    layout = ExponentLayout(
        exponents=a.layout.exponents,
        ranks=tuple(x + y for x, y in zip(a.layout.ranks, b.layout.ranks)),
        theta0=a.layout.theta0,
        pure=a.layout.pure and b.layout.pure,
    )
    ra, rb = a.space_dim, b.space_dim
    steps: list[list[Subspace]] = [[], [], [], []]
    for nu in range(4):
        for i in range(layout.n):
            vecs = [list(v) + [ZERO] * rb for v in a.step(nu, i).rows]
            vecs += [[ZERO] * ra + list(v) for v in b.step(nu, i).rows]
            steps[nu].append(Subspace.from_vectors(vecs, ra + rb))
    return StokesFiltrations(layout=layout, steps=steps)


def trivial(c0, dim: int, theta0: CirclePoint) -> StokesFiltrations:
    """Trivial Stokes data of exponent c0: every filtration jumps from 0 to L at c0."""
    c0 = to_gauss(c0)
    layout = ExponentLayout(exponents=(c0,), ranks=(dim,), theta0=theta0, pure=bool(c0))
    full = Subspace.full(dim)
    return StokesFiltrations(layout=layout, steps=[[full], [full], [full], [full]])


def add_trivial(data: StokesFiltrations, c0, dim: int):
    """Extend by trivial data of extreme exponent c0; returns (data', incl, proj).

    The new exponent must satisfy c0 <_nu c for all c at even nu and the
    reverse at odd nu, i.e. c0 is minimal at theta0.
    """
    c0 = to_gauss(c0)
    layout = data.layout
    if c0 in layout.exponents:
        raise NotExtreme("c0 already occurs in C")
    if not is_generic(layout.theta0, list(layout.exponents) + [c0]):
        raise NonGenericDirection("theta0 not generic for C + {c0}")
    for c in layout.exponents:
        if leq_at(c0, c, layout.theta0) is not Order.LESS:
            raise NotExtreme("c0 must precede every exponent at theta0")
    new_layout = ExponentLayout(
        exponents=(c0,) + layout.exponents,
        ranks=(dim,) + layout.ranks,
        theta0=layout.theta0,
        pure=layout.pure and bool(c0),
    )
    rL, r0 = data.space_dim, dim
    rn = rL + r0

    def emb_L(v):
        return list(v) + [ZERO] * r0

    def emb_0(v):
        return [ZERO] * rL + list(v)

    L0 = Subspace.from_vectors([emb_0(row) for row in Subspace.full(r0).rows], rn)
    steps: list[list[Subspace]] = [[], [], [], []]
    for nu in range(4):
        if nu % 2 == 0:
            steps[nu].append(L0)
            for i in range(layout.n):
                vecs = [emb_L(v) for v in data.step(nu, i).rows] + list(L0.rows)
                steps[nu].append(Subspace.from_vectors(vecs, rn))
        else:
            steps[nu].append(Subspace.full(rn))
            for i in range(layout.n):
                steps[nu].append(Subspace.from_vectors(
                    [emb_L(v) for v in data.step(nu, i).rows], rn))
    out = StokesFiltrations(layout=new_layout, steps=steps)
    rep = validate(out)
    assert rep.ok, rep.violations
    incl = StokesMorphism(source=data, target=out, matrix=Matrix(
        [[ONE if i == j else ZERO for j in range(rL)] for i in range(rL)]
        + [[ZERO] * rL for _ in range(r0)], ncols=rL))
    triv = trivial(c0, dim, layout.theta0)
    proj = StokesMorphism(source=out, target=triv, matrix=Matrix(
        [[ONE if j == rL + i else ZERO for j in range(rn)] for i in range(r0)], ncols=rn))
    return out, incl, proj


def _layout_from_graded_dims(layout: ExponentLayout, dims: list[int]) -> Optional[ExponentLayout]:
    keep = [i for i, d in enumerate(dims) if d > 0]
    if not keep:
        return None
    return ExponentLayout(
        exponents=tuple(layout.exponents[i] for i in keep),
        ranks=tuple(dims[i] for i in keep),
        theta0=layout.theta0,
        pure=layout.pure,
    )


def zero_data(theta0: CirclePoint) -> StokesFiltrations:
    """The zero object (empty exponent set, L = 0); only ker/coker produce it."""
    layout = ExponentLayout(exponents=(), ranks=(), theta0=theta0, pure=False)
    return StokesFiltrations(layout=layout, steps=[[], [], [], []])


def kernel_morphism(lam: StokesMorphism):
    """Kernel Stokes data with its inclusion into the source."""
    if lam.source.layout.exponents != lam.target.layout.exponents or \
            lam.source.layout.theta0 != lam.target.layout.theta0:
        raise IncompatibleLayouts("morphism endpoints must share (C, theta0)")
    src = lam.source
    K = Subspace.from_vectors(lam.matrix.kernel_basis(), src.space_dim)
    basis = K.rows
    kdim = K.dim
    if kdim == 0:
        z = zero_data(src.layout.theta0)
        return z, StokesMorphism(source=z, target=src,
                                 matrix=Matrix([[] for _ in range(src.space_dim)], ncols=0))
    B = Matrix(basis, ncols=src.space_dim).transpose()  # k^kdim -> L
    steps: list[list[Subspace]] = [[], [], [], []]
    for nu in range(4):
        for i in range(src.layout.n):
            steps[nu].append(src.step(nu, i).preimage_under(B))
    dims = [steps[0][i].intersect(steps[1][i]).dim for i in range(src.layout.n)]
    new_layout = _layout_from_graded_dims(src.layout, dims)
    assert new_layout is not None
    keep = [i for i, d in enumerate(dims) if d > 0]
    data = StokesFiltrations(layout=new_layout, steps=[[steps[nu][i] for i in keep]
                                                       for nu in range(4)])
    rep = validate(data)
    assert rep.ok, rep.violations
    return data, StokesMorphism(source=data, target=src, matrix=B)


def cokernel_morphism(lam: StokesMorphism):
    """Cokernel Stokes data with the projection from the target."""
    if lam.source.layout.exponents != lam.target.layout.exponents or \
            lam.source.layout.theta0 != lam.target.layout.theta0:
        raise IncompatibleLayouts("morphism endpoints must share (C, theta0)")
    tgt = lam.target
    image = Subspace.from_vectors(lam.matrix.transpose().rows, tgt.space_dim)
    Q = image.quotient_map()  # L' -> k^{r'-dim im}
    qdim = Q.nrows
    if qdim == 0:
        z = zero_data(tgt.layout.theta0)
        return z, StokesMorphism(source=tgt, target=z,
                                 matrix=Matrix([], ncols=tgt.space_dim))
    steps: list[list[Subspace]] = [[], [], [], []]
    for nu in range(4):
        for i in range(tgt.layout.n):
            steps[nu].append(tgt.step(nu, i).map_by(Q))
    dims = [steps[0][i].intersect(steps[1][i]).dim for i in range(tgt.layout.n)]
    new_layout = _layout_from_graded_dims(tgt.layout, dims)
    assert new_layout is not None
    keep = [i for i, d in enumerate(dims) if d > 0]
    data = StokesFiltrations(layout=new_layout, steps=[[steps[nu][i] for i in keep]
                                                       for nu in range(4)])
    rep = validate(data)
    assert rep.ok, rep.violations
    return data, StokesMorphism(source=tgt, target=data, matrix=Q)


def rigidity_index(data) -> tuple[int, bool]:
    """rig = eta + sum r_c^2 with eta = sum_c dim centralizer(T_c); rigid iff rig = 2."""
    mats = data if isinstance(data, StokesMatrices) else to_matrices(data)
    tees = formal_monodromies(mats)
    eta = 0
    for t in tees:
        m = t.nrows
        # phi commuting with t: rows of the Sylvester system t phi - phi t = 0
        rows = []
        for i in range(m):
            for j in range(m):
                row = [ZERO] * (m * m)
                for k in range(m):
                    row[k * m + j] = row[k * m + j] + t.rows[i][k]
                    row[i * m + k] = row[i * m + k] - t.rows[k][j]
                rows.append(row)
        eta += m * m - Matrix(rows, ncols=m * m).rank()
    rig = eta + sum(r * r for r in mats.layout.ranks)
    return rig, rig == 2


def _random_block(rng: random.Random, nr: int, nc: int) -> Matrix:
    return Matrix([[Fraction(rng.randint(-3, 3)) for _ in range(nc)] for _ in range(nr)],
                  ncols=nc)


def _random_triangular(rng: random.Random, layout: ExponentLayout, upper: bool) -> Matrix:
    r = layout.rank
    M = Matrix.identity(r)
    sl = layout.block_slices()
    n = layout.n
    for i in range(n):
        for j in range(n):
            if (upper and i < j) or (not upper and i > j):
                blk = _random_block(rng, layout.ranks[i], layout.ranks[j])
                for a in range(blk.nrows):
                    for b in range(blk.ncols):
                        M.rows[sl[i].start + a][sl[j].start + b] = blk.rows[a][b]
    return M


def _block_ul(P: Matrix, layout: ExponentLayout):
    """P = U . L with U block-upper (invertible diagonals), L block-lower unit.

    Returns None when a trailing corner block is singular.
    """
    n = layout.n
    sl = layout.block_slices()

    def blk(M, i, j):
        return M.submatrix(range(sl[i].start, sl[i].stop), range(sl[j].start, sl[j].stop))

    U: list[list[Optional[Matrix]]] = [[None] * n for _ in range(n)]
    L: list[list[Optional[Matrix]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        L[i][i] = Matrix.identity(layout.ranks[i])
    for j in range(n - 1, -1, -1):
        for i in range(n - 1, j, -1):
            acc = blk(P, i, j)
            for k in range(i + 1, n):
                acc = acc - U[i][k] * L[k][j]
            if not U[i][i].is_invertible():
                return None
            L[i][j] = U[i][i].inverse() * acc
        for i in range(j, -1, -1):
            acc = blk(P, i, j)
            for k in range(j + 1, n):
                acc = acc - U[i][k] * L[k][j]
            U[i][j] = acc
        if not U[j][j].is_invertible():
            return None
    rows_U = [[U[i][j] if j >= i else Matrix.zero(layout.ranks[i], layout.ranks[j])
               for j in range(n)] for i in range(n)]
    rows_L = [[L[i][j] if j <= i else Matrix.zero(layout.ranks[i], layout.ranks[j])
               for j in range(n)] for i in range(n)]
    return Matrix.from_blocks(rows_U), Matrix.from_blocks(rows_L)


def random_data(layout: ExponentLayout, seed: int, retries: int = 32) -> StokesMatrices:
    """Deterministic random pure variant-form data; always validates."""
    if not layout.pure:
        raise ValueError("random_data generates pure data only")
    rng = random.Random(seed)
    for _ in range(retries):
        s10 = _random_triangular(rng, layout, upper=False)
        s21 = _random_triangular(rng, layout, upper=True)
        s32 = _random_triangular(rng, layout, upper=False)
        prod = s32 * s21 * s10
        P = prod.inverse()
        ul = _block_ul(P, layout)
        if ul is None:
            continue
        U, L = ul
        sl = layout.block_slices()
        t = [U.submatrix(range(s.start, s.stop), range(s.start, s.stop)) for s in sl]
        s03 = _block_diag([ti.inverse() for ti in t], layout) * U
        s32f = L * s32
        data = StokesMatrices(layout=layout, s10=s10, s21=s21, s32=s32f, s03=s03,
                              form=VARIANT, t=t)
        rep = validate(data)
        if rep.ok:
            return data
    raise GenerationFailed("no valid data after %d retries" % retries)


def hom_space(a: StokesFiltrations, b: StokesFiltrations) -> list[Matrix]:
    """Basis of Hom(a, b): matrices preserving all four filtrations."""
    if a.layout.exponents != b.layout.exponents or a.layout.theta0 != b.layout.theta0:
        raise IncompatibleLayouts("hom space needs identical (C, theta0)")
    ra, rb = a.space_dim, b.space_dim
    rows = []
    for nu in range(4):
        for i in range(a.layout.n):
            tgt = b.step(nu, i)
            if tgt.dim == rb:
                continue
            Q = tgt.quotient_map()
            for v in a.step(nu, i).rows:
                for qrow in Q.rows:
                    row = [ZERO] * (ra * rb)
                    for p in range(rb):
                        if not qrow[p]:
                            continue
                        for q in range(ra):
                            if v[q]:
                                row[p * ra + q] = row[p * ra + q] + qrow[p] * v[q]
                    rows.append(row)
    if not rows:
        vecs = Matrix.identity(ra * rb).rows
    else:
        vecs = Matrix(rows, ncols=ra * rb).kernel_basis()
    return [Matrix([v[i * ra:(i + 1) * ra] for i in range(rb)], ncols=ra) for v in vecs]


def random_morphism(a: StokesFiltrations, b: StokesFiltrations, seed: int) -> StokesMorphism:
    basis = hom_space(a, b)
    rng = random.Random(seed)
    M = Matrix.zero(b.space_dim, a.space_dim)
    for h in basis:
        M = M + h.scale(Fraction(rng.randint(-3, 3)))
    return StokesMorphism(source=a, target=b, matrix=M)
