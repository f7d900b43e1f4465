from fractions import Fraction as F

import pytest

from stokes_gaussian.circle import CirclePoint
from stokes_gaussian.circle_sheaf import (
    ExponentNotInC,
    build_circle_model,
    cohomology,
    disc_cohomology_Fleq0,
    euler_characteristic_leq,
    good_interval_splitting,
    gr_sheaf,
    h0_leq_closed_form,
    morphism_is_graded_on_interval,
    sheaf_constant,
    sheaf_leq,
    sheaf_lt,
)
from stokes_gaussian.linalg import Matrix, Subspace
from stokes_gaussian.scalars import GaussRational
from stokes_gaussian.stokes_data import (
    ExponentLayout,
    NonGenericDirection,
    normalize,
    random_data,
    random_morphism,
    sort_exponents,
    to_filtrations,
    random_morphism,
)


def rank1_data(theta0, c=1):
    layout = ExponentLayout(exponents=(GaussRational(c),), ranks=(1,), theta0=theta0)
    return random_data(layout, seed=0)


def test_model_vertex_counts(theta0):
    lay = sort_exponents([(1, 1), (2, 1)], theta0)
    # all pair differences here are proportional reals: the four directions coincide
    m = build_circle_model(lay, 3)
    assert m.nvertices == 8
    m = build_circle_model(sort_exponents([(1, 1)], theta0), 1)
    assert m.nvertices == 4
    m = build_circle_model(lay, 1)
    assert m.nvertices == 8
    with pytest.raises(NonGenericDirection):
        build_circle_model(lay, GaussRational(1, 1))  # wait: 1+i vs 1 -> dirs at 0?


def test_model_vertex_count_non_proportional(theta0):
    lay = sort_exponents([(1, 1), (GaussRational(2, 1), 1)], theta0)
    m = build_circle_model(lay, GaussRational(0, 3))
    # pairs (1, 2+i), (1, 3i), (2+i, 3i) have non-proportional differences
    assert m.nvertices == 4 + 12


def test_rank1_sheaves(theta0):
    data = rank1_data(theta0)
    res = cohomology(sheaf_leq(data, 1))
    assert (res.h0, res.h1) == (1, 1)  # constant sheaf of rank 1
    res = cohomology(sheaf_lt(data, 1))
    assert (res.h0, res.h1) == (0, 0)  # zero sheaf
    res = cohomology(sheaf_lt(data, 0))
    # extension by zero on the two open quarter arcs: h1 = 2r = 2
    assert (res.h0, res.h1) == (0, 2)


def test_constant_sheaf_cohomology(e1):
    model = build_circle_model(e1.layout)
    res = cohomology(sheaf_constant(e1, model))
    assert (res.h0, res.h1) == (2, 2)


def test_e1_stalk_pattern(e1):
    sh = sheaf_leq(e1, 3)
    # real proportional differences: both summands die on the same windows,
    # so the dims jump 2,0,0,0,2,... around the circle
    vdims = sh.stalk_dims[:8]
    assert sorted(vdims) == [0, 0, 0, 0, 0, 0, 2, 2]
    assert vdims[0] == 2


def test_stalk_pattern_non_proportional(theta0):
    # with non-proportional differences the dims step through 2,1,0,1,2,...
    lay = sort_exponents([(1, 1), (GaussRational(2, 1), 1)], theta0)
    data = random_data(lay, seed=3)
    sh = sheaf_leq(data, GaussRational(0, 3))
    vdims = [sh.stalk_dims[i] for i in range(sh.complex.cells[0].dim == 0 and 16)]
    assert set(vdims) == {0, 1, 2}


def test_lt_e1_paper_value(e1):
    res = cohomology(sheaf_lt(e1, 3))
    assert (res.h0, res.h1) == (0, 4)  # 2r with r = 2


def test_h0_closed_form(e1, theta0):
    assert h0_leq_closed_form(e1, 1) == 0
    assert cohomology(sheaf_leq(e1, 1)).h0 == 0
    data = rank1_data(theta0, c=1)
    assert h0_leq_closed_form(data, 1) == 1
    blockdiag = normalize(e1)
    zer = Matrix.zero(2, 2)
    from stokes_gaussian.stokes_data import StokesMatrices, VARIANT
    ident = Matrix.identity(2)
    bd = StokesMatrices(layout=e1.layout, s10=ident, s21=ident, s32=ident, s03=ident,
                        form=VARIANT, t=[Matrix.identity(1), Matrix.identity(1)])
    assert h0_leq_closed_form(bd, 1) == 1
    with pytest.raises(ExponentNotInC):
        h0_leq_closed_form(e1, 5)


def test_euler_characteristic(e1, theta0, caplog):
    import logging
    with caplog.at_level(logging.WARNING):
        chi = euler_characteristic_leq(e1, 1)
    assert chi == 2 * 1 - 2 * 2
    assert any("deviates" in rec.message for rec in caplog.records)
    res = cohomology(sheaf_leq(e1, 1))
    assert (res.h0, res.h1) == (0, 2)
    data = rank1_data(theta0)
    assert euler_characteristic_leq(data, 1) == 0
    # c0 not in C: h = (0, 2r) for both leq and lt
    res_leq = cohomology(sheaf_leq(e1, 3))
    res_lt = cohomology(sheaf_lt(e1, 3))
    assert (res_leq.h0, res_leq.h1) == (res_lt.h0, res_lt.h1) == (0, 4)


def test_lt_in_C_cellular_value(e1):
    # for c0 in C the strict sheaf drops the G_{c0} summand everywhere
    res = cohomology(sheaf_lt(e1, 1))
    assert (res.h0, res.h1) == (0, 2)  # 2(r - r_{c0})


def test_les_dimension_consistency(e1):
    for c0 in (1, 2):
        a = cohomology(sheaf_lt(e1, c0))
        b = cohomology(sheaf_leq(e1, c0))
        g = cohomology(gr_sheaf(e1, c0))
        assert (b.h0 - b.h1) == (a.h0 - a.h1) + (g.h0 - g.h1)


def test_gr_local_system(e1):
    # gr_c is a local system of rank r_c with (h0, h1) = (ker, coker) of T_c - id
    from stokes_gaussian.stokes_data import formal_monodromies
    ts = formal_monodromies(e1)
    for c0, t in zip((1, 2), ts):
        res = cohomology(gr_sheaf(e1, c0))
        ident = Matrix.identity(t.nrows)
        k = t.nrows - (t - ident).rank()
        assert (res.h0, res.h1) == (k, k)


def test_subdivision_invariance(e1):
    base = cohomology(sheaf_lt(e1, 3))
    extra = [CirclePoint(GaussRational(5, 1), 0), CirclePoint(GaussRational(1, 7), 1)]
    model = build_circle_model(e1.layout, 3, extra_vertices=extra)
    refined = cohomology(sheaf_lt(e1, 3, model))
    assert (base.h0, base.h1) == (refined.h0, refined.h1)
    assert model.nvertices == 10


def test_good_interval_splitting(e1, theta0):
    for nu in range(4):
        pieces = good_interval_splitting(e1, nu)
        assert [p.dim for p in pieces] == [1, 1]
        total = pieces[0].add(pieces[1])
        assert total.dim == 2
    # block-diagonal data splits into the standard grading
    from stokes_gaussian.stokes_data import StokesMatrices, VARIANT
    ident = Matrix.identity(2)
    bd = StokesMatrices(layout=e1.layout, s10=ident, s21=ident, s32=ident, s03=ident,
                        form=VARIANT, t=[Matrix.identity(1), Matrix.identity(1)])
    pieces = good_interval_splitting(bd, 0)
    assert pieces[0] == Subspace.from_vectors([[F(1), F(0)]], 2)
    assert pieces[1] == Subspace.from_vectors([[F(0), F(1)]], 2)


def test_splitting_traversal_independence(e1):
    # computing the pieces twice (the subspaces are canonical RREF objects)
    a = good_interval_splitting(e1, 1)
    b = good_interval_splitting(e1, 1)
    assert a == b


def test_morphisms_graded(e1):
    filt = to_filtrations(e1)
    for seed in range(6):
        lam = random_morphism(filt, filt, seed)
        for nu in range(4):
            assert morphism_is_graded_on_interval(lam, e1, nu)


def test_disc_lemma(e1, theta0):
    assert disc_cohomology_Fleq0(rank1_data(theta0)) == (0, 1, 0)
    assert disc_cohomology_Fleq0(e1) == (0, 2, 0)
    lay = sort_exponents([(1, 1), (2, 2), (-3, 1)], theta0)
    data = random_data(lay, seed=5)
    assert disc_cohomology_Fleq0(data) == (0, 4, 0)


def test_d1d0_zero_circle(e1):
    sh = sheaf_leq(e1, 3)
    assert sh.check_d1_d0_zero()
