from fractions import Fraction as F

import pytest

from stokes_gaussian.circle import CirclePoint
from stokes_gaussian.linalg import Matrix, Subspace
from stokes_gaussian.scalars import GaussRational
from stokes_gaussian.stokes_data import (
    ExponentLayout,
    NonGenericDirection,
    NotExtreme,
    StokesFiltrations,
    StokesMatrices,
    StokesMorphism,
    VARIANT,
    add_trivial,
    cokernel_morphism,
    direct_sum,
    equivalence_action,
    formal_monodromies,
    hom_space,
    kernel_morphism,
    monodromy,
    normalize,
    random_data,
    random_morphism,
    rigidity_index,
    sort_exponents,
    to_filtrations,
    to_matrices,
    trivial,
    validate,
)


def _m(rows):
    return Matrix([[F(x) for x in r] for r in rows])


def span(vectors, n):
    return Subspace.from_vectors([[F(x) for x in v] for v in vectors], n)


def test_sort_exponents(theta0):
    lay = sort_exponents([(2, 1), (1, 1), (3, 1)], theta0)
    assert [c.re for c in lay.exponents] == [1, 2, 3]
    with pytest.raises(NonGenericDirection):
        sort_exponents([(1, 1), (2, 1)], CirclePoint(GaussRational(0, 1), 0))
    lay = sort_exponents([(-1, 1), (-2, 1)], theta0)
    assert [c.re for c in lay.exponents] == [-2, -1]


def test_e1_is_valid(e1):
    assert validate(e1).ok
    assert monodromy(e1) == Matrix.identity(2)


def test_e1_triangularity_violation(e1):
    bad = StokesMatrices(layout=e1.layout, s10=_m([[1, 1], [1, 1]]), s21=e1.s21,
                         s32=e1.s32, s03=e1.s03, form=e1.form)
    rep = validate(bad)
    assert not rep.ok and any("S(1)" in v for v in rep.violations)


def test_opposite_violation(e1, theta0):
    layout = e1.layout
    e1f = span([[1, 0]], 2)
    full = Subspace.full(2)
    bad = StokesFiltrations(layout=layout, steps=[
        [e1f, full], [full, e1f], [e1f, full], [full, e1f]])
    rep = validate(bad)
    assert not rep.ok


def test_normalize_e1(e1):
    var = normalize(e1)
    assert var.form == VARIANT
    assert [t.rows[0][0] for t in var.t] == [F(1, 2), F(2)]
    assert var.s03 == _m([[1, -2], [0, 1]])
    # idempotent
    assert normalize(var) is var
    assert validate(var).ok
    assert monodromy(var) == Matrix.identity(2)


def test_normalize_rank1_pure(theta0):
    layout = ExponentLayout(exponents=(GaussRational(1),), ranks=(1,), theta0=theta0)
    data = StokesMatrices(layout=layout, s10=_m([[2]]), s21=_m([[F(1, 3)]]),
                          s32=_m([[6]]), s03=_m([[F(1, 4)]]), form="general")
    var = normalize(data)
    assert var.t[0] == _m([[1]])  # pure rank-1 forces T = id
    assert validate(var).ok


def test_normalize_equivalence_invariance(e1):
    lam = [[Matrix.identity(1), Matrix.identity(1)],
           [_m([[3]]), _m([[F(1, 2)]])],
           [_m([[-2]]), _m([[5]])],
           [_m([[F(7, 3)]]), _m([[1]])]]
    scaled = equivalence_action(e1, lam)
    a, b = normalize(e1), normalize(scaled)
    assert (a.s10, a.s21, a.s32, a.s03) == (b.s10, b.s21, b.s32, b.s03)
    assert a.t == b.t


def test_to_filtrations_e1(e1):
    filt = to_filtrations(e1)
    assert filt.step(0, 0) == span([[1, 0]], 2)
    assert filt.step(0, 1) == Subspace.full(2)
    assert filt.step(1, 0) == Subspace.full(2)
    assert filt.step(1, 1) == span([[0, 1]], 2)
    assert filt.step(2, 0) == span([[1, -1]], 2)
    assert filt.step(3, 1) == span([[-1, 2]], 2)
    assert validate(filt).ok


def test_monodromy_example(e1):
    ts = formal_monodromies(e1)
    assert [t.rows[0][0] for t in ts] == [F(1, 2), F(2)]


def test_roundtrip_e1(e1):
    filt = to_filtrations(e1)
    back = to_matrices(filt)
    var = normalize(e1)
    assert (back.s10, back.s21, back.s32, back.s03) == (var.s10, var.s21, var.s32, var.s03)
    assert back.t == var.t
    # and filtration-side round trip is exact
    again = to_filtrations(back)
    assert again.steps == filt.steps


def test_trivial_data(theta0):
    t = trivial(1, 2, theta0)
    assert validate(t).ok
    m = to_matrices(t)
    assert m.s10 == Matrix.identity(2)
    assert m.t[0] == Matrix.identity(2)


def test_trivial_rank1_matrices(theta0):
    t = trivial(5, 1, theta0)
    m = to_matrices(t)
    for nu in range(4):
        assert m.s(nu) == Matrix.identity(1)
    assert m.t[0] == Matrix.identity(1)


def test_direct_sum_componentwise(e1, theta0):
    filt = to_filtrations(e1)
    both = direct_sum(filt, filt)
    assert validate(both).ok
    assert both.layout.ranks == (2, 2)
    assert both.step(0, 0).dim == 2


def test_add_trivial(e1, theta0):
    filt = to_filtrations(e1)
    out, incl, proj = add_trivial(filt, F(1, 2), 1)
    assert validate(out).ok
    assert [c.re for c in out.layout.exponents] == [F(1, 2), 1, 2]
    assert incl.check() and proj.check()
    # exact sequence: proj . incl = 0 and dims add
    assert (proj.matrix * incl.matrix).is_zero()
    assert out.space_dim == filt.space_dim + 1
    with pytest.raises(NotExtreme):
        add_trivial(filt, 3, 1)


def test_kernel_cokernel(e1):
    filt = to_filtrations(e1)
    ident = StokesMorphism(source=filt, target=filt, matrix=Matrix.identity(2))
    k, _ = kernel_morphism(ident)
    c, _ = cokernel_morphism(ident)
    assert k.layout.n == 0 and k.space_dim == 0
    assert c.layout.n == 0 and c.space_dim == 0
    zero = StokesMorphism(source=filt, target=filt, matrix=Matrix.zero(2, 2))
    k, ik = kernel_morphism(zero)
    c, pc = cokernel_morphism(zero)
    assert k.layout.ranks == filt.layout.ranks
    assert c.layout.ranks == filt.layout.ranks
    assert k.steps == filt.steps  # kernel of 0 is the identity inclusion
    assert ik.check() and pc.check()


def test_kernel_of_add_trivial_projection(e1):
    filt = to_filtrations(e1)
    out, incl, proj = add_trivial(filt, F(1, 2), 1)
    # promote proj to a morphism out -> out-shaped trivial piece is a different
    # layout; instead check its kernel inside out recovers E1's data
    lifted = StokesMorphism(source=out, target=out, matrix=Matrix(
        [[F(1) if (i == j and i >= 2 + 1 - 1 and False) else F(0) for j in range(3)]
         for i in range(3)]))
    # direct check: kernel of the genuine projection matrix restricted by hand
    K = [v for v in proj.matrix.kernel_basis()]
    assert len(K) == 2
    # the kernel data equals the included copy of E1
    kdata_steps_dims = [[out.step(nu, i).intersect(
        Subspace.from_vectors(K, 3)).dim for i in range(3)] for nu in range(4)]
    assert kdata_steps_dims[0][1] == 1 and kdata_steps_dims[0][2] == 2


def test_rigidity(e1, theta0):
    rig, rigid = rigidity_index(e1)
    assert (rig, rigid) == (4, False)
    layout1 = ExponentLayout(exponents=(GaussRational(3),), ranks=(1,), theta0=theta0)
    rank1 = random_data(layout1, seed=0)
    assert rigidity_index(rank1) == (2, True)
    layout2 = ExponentLayout(exponents=(GaussRational(1),), ranks=(2,), theta0=theta0)
    rank2 = random_data(layout2, seed=1)
    assert formal_monodromies(rank2)[0] == Matrix.identity(2)
    assert rigidity_index(rank2) == (8, False)


def test_rigidity_lower_bound(theta0):
    for seed in range(12):
        lay = sort_exponents([(1, 1), (2, 2), (4, 1)], theta0)
        data = random_data(lay, seed=seed)
        rig, _ = rigidity_index(data)
        assert rig >= lay.n + sum(r * r for r in lay.ranks)


def test_random_data_validates_and_roundtrips(theta0):
    lay = sort_exponents([(1, 1), (2, 1)], theta0)
    for seed in range(25):
        data = random_data(lay, seed=seed)
        assert validate(data).ok
        filt = to_filtrations(data)
        back = to_matrices(filt)
        assert (back.s10, back.s21, back.s32, back.s03) == (
            data.s10, data.s21, data.s32, data.s03)
        assert back.t == data.t


def test_random_data_graded_dims(theta0):
    lay = sort_exponents([(1, 1), (2, 2), (3, 1)], theta0)
    for seed in range(8):
        data = random_data(lay, seed=seed)
        filt = to_filtrations(data)
        for nu in range(4):
            for i in range(3):
                assert filt.graded_piece(nu, i).dim == lay.ranks[i]


def test_random_data_rank1_seed0(theta0):
    lay = ExponentLayout(exponents=(GaussRational(1),), ranks=(1,), theta0=theta0)
    data = random_data(lay, seed=0)
    for nu in range(4):
        assert data.s(nu) == Matrix.identity(1)
    assert data.t[0] == Matrix.identity(1)


def test_morphism_strictness(e1):
    filt = to_filtrations(e1)
    basis = hom_space(filt, filt)
    for h in basis:
        mor = StokesMorphism(source=filt, target=filt, matrix=h)
        assert mor.check()
        for nu in range(4):
            for i in range(filt.layout.n):
                img = filt.step(nu, i).map_by(h)
                assert filt.step(nu, i).contains_subspace(img)
    # morphisms are determined by their graded blocks: the hom space embeds in
    # the product of graded homs
    for seed in range(5):
        mor = random_morphism(filt, filt, seed)
        assert mor.check()
