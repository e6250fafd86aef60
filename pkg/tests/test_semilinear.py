import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import window_points_of_term
from tilequipu.paths import Window, cross
from tilequipu.semilinear import (
    SemiLinearSet,
    SemiLinearTerm,
    contains,
    enumerate_points,
    intersect_terms,
    intersection_finite,
)

T = SemiLinearTerm
BOX = (-20, 19, -20, 19)
WIN = Window(*BOX, margin=0)


def brute(t, box=BOX):
    return window_points_of_term(t.base, t.gens, box)


def test_term_invariants():
    with pytest.raises(ValueError):
        T((0, 0), ((0, 0),))
    with pytest.raises(ValueError):
        T((0, 0), ((1, 2), (2, 4)))
    with pytest.raises(ValueError):
        T((0, 0), ((1, 0), (0, 1), (1, 1)))


@pytest.mark.parametrize("term,point,expected", [
    (T((0, -2), ((0, -1),)), (0, -5), True),
    (T((2, -2), ((2, 0), (0, -1))), (6, -4), True),
    (T((0, -2), ((0, -1),)), (1, -2), False),
    (T((0, -2), ((0, -1),)), (0, -1), False),
    (T((3, 3)), (3, 3), True),
    (T((0, 0), ((2, 1), (1, 2))), (1, 1), False),
    (T((0, 0), ((2, 1), (1, 2))), (3, 3), True),
])
def test_contains_examples(term, point, expected):
    assert contains(term, point) is expected
    assert (point in SemiLinearSet((term,))) is expected


def test_intersect_colinear_same_direction():
    r = intersect_terms(T((0, 0), ((1, 0),)), T((5, 0), ((2, 0),)))
    assert r.kind == "terms"
    assert r.within(WIN) == brute(T((5, 0), ((2, 0),)))


def test_intersect_disjoint_rows():
    assert intersect_terms(T((0, 0), ((1, 0),)), T((0, 1), ((1, 0),))).is_empty


def test_intersect_single_crossing():
    r = intersect_terms(T((0, 0), ((1, 0),)), T((3, 3), ((0, -1),)))
    assert r.kind == "finite" and r.points == ((3, 0),)


def test_intersect_opposite_rays():
    r = intersect_terms(T((0, 0), ((2, 0),)), T((6, 0), ((-3, 0),)))
    assert r.kind == "finite" and set(r.points) == {(0, 0), (6, 0)}


def test_intersect_same_plane_generators():
    t1 = T((0, 0), ((1, 0), (0, 1)))
    t2 = T((3, -2), ((1, 0), (0, 1)))
    r = intersect_terms(t1, t2, WIN)
    assert r.kind != "unknown"
    assert r.within(WIN) == brute(t1) & brute(t2)


def test_finite_examples():
    col = SemiLinearSet((T((0, -2), ((0, -1),)),))
    row = SemiLinearSet(tuple(T((x, -1)) for x in range(-3, 4)))
    assert intersection_finite(col, row).finite is True
    assert intersection_finite(col, row).points == ()
    line = SemiLinearSet((T((0, 0), ((1, 0),)),))
    assert intersection_finite(line, line).finite is False
    quadrant = SemiLinearSet((T((0, 0), ((1, 0), (0, 1))),))
    ray = SemiLinearSet((T((10, 10), ((1, 0),)),))
    assert intersection_finite(quadrant, ray).finite is False


def test_finite_returns_every_point():
    s1 = [T((0, 0), ((1, 0),)), T((0, 0), ((0, 1),))]
    s2 = [T((-3, 2), ((1, 0),)), T((4, 4), ((0, -1),))]
    f = intersection_finite(s1, s2)
    assert f.finite is True
    assert set(f.points) == {(0, 2), (4, 0)}


def test_enumerate_examples():
    t = T((0, -2), ((0, -1),))
    assert enumerate_points(SemiLinearSet((t,)), Window(-5, 5, -4, 0)) == {(0, -2), (0, -3), (0, -4)}
    assert enumerate_points(SemiLinearSet(()), WIN) == set()


def test_document_roundtrip():
    t = T((2, -2), ((2, 0), (0, -1)))
    assert T.from_document(t.to_document()) == t
    assert t.translate((1, 1)) == T((3, -1), ((2, 0), (0, -1)))


coord = st.integers(-8, 8)
vec = st.tuples(coord, coord)
gen = vec.filter(lambda v: v != (0, 0))


@st.composite
def terms(draw):
    base = draw(vec)
    k = draw(st.integers(0, 2))
    if k == 0:
        return T(base)
    b = draw(gen)
    if k == 1:
        return T(base, (b,))
    c = draw(gen.filter(lambda v: cross(b, v) != 0))
    return T(base, (b, c))


@settings(max_examples=150, deadline=None)
@given(terms(), terms())
def test_intersection_matches_brute_force(t1, t2):
    r = intersect_terms(t1, t2, WIN)
    assert r.within(WIN) == brute(t1) & brute(t2)


@settings(max_examples=100, deadline=None)
@given(terms())
def test_enumerate_and_contains_agree(t):
    pts = enumerate_points(SemiLinearSet((t,)), WIN)
    assert pts == brute(t)
    small = Window(-10, 10, -10, 10, margin=0)
    for p in small.points():
        assert contains(t, p) == (p in pts)


@settings(max_examples=100, deadline=None)
@given(terms(), terms())
def test_finiteness_verdict_is_consistent(t1, t2):
    f = intersection_finite([t1], [t2])
    shared = brute(t1) & brute(t2)
    if f.finite is True:
        assert set(f.points) >= shared
        assert all(contains(t1, p) and contains(t2, p) for p in f.points)
    elif f.finite is False:
        assert _far_shared_point(t1, t2, beyond=40)


def _far_shared_point(t1, t2, beyond):
    """Sweep coefficients of the smaller term looking for a shared point far out."""
    small, big = (t1, t2) if t1.dim <= t2.dim else (t2, t1)
    if small.dim == 0:
        return False
    if small.dim == 1:
        combos = [(k,) for k in range(400)]
    else:
        combos = [(k, j) for k in range(90) for j in range(90)]
    for c in combos:
        p = (small.base[0] + sum(k * g[0] for k, g in zip(c, small.gens)),
             small.base[1] + sum(k * g[1] for k, g in zip(c, small.gens)))
        if max(abs(p[0]), abs(p[1])) > beyond and contains(big, p):
            return True
    return False


def test_two_generator_terms_are_injective():
    t = T((1, -1), ((2, 1), (-1, 3)))
    seen = {}
    for k in range(12):
        for j in range(12):
            p = (1 + 2 * k - j, -1 + k + 3 * j)
            assert p not in seen
            seen[p] = (k, j)
