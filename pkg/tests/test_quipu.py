import pytest

from oracles import rooted_walks, window_points_of_term
from reference import EX1_ARCS, EX1_LABELS
from tilequipu.paths import Window
from tilequipu.quipu import (
    NoSuchCycle,
    Quipu,
    alpha_by_walks,
    alpha_within,
    build,
    cover,
    covers,
    cycles,
    find_cycle,
    from_document,
    full_unroll,
    k_multiple,
    structure_report,
    to_document,
    to_dot,
    unroll,
    validate,
    zone,
)
from tilequipu.semilinear import SemiLinearTerm as T
from tilequipu.tas import grow_max

BIG = Window(-30, 30, -30, 30, margin=0)


@pytest.fixture
def final():
    return build(EX1_LABELS, EX1_ARCS)


@pytest.fixture
def column():
    return build(["Sigma", "A", "C"], [(0, 1, "S"), (1, 2, "S"), (2, 2, "S")])


def test_final_quipu_is_valid(final, ex1):
    assert validate(final, ex1) == []


def test_determinism_violation():
    q = build(["X", "Y", "Z"], [(0, 1, "E"), (0, 2, "E")])
    assert any("determinism" in v for v in validate(q))


def test_null_cycle_violation():
    q = build(["X"] * 5, [(0, 1, "E"), (1, 2, "E"), (2, 3, "N"), (3, 4, "W"), (4, 1, "S")])
    assert validate(q)


def test_glue_violation(ex1):
    q = build(["Sigma", "B"], [(0, 1, "S")])
    assert any("glue" in v for v in validate(q, ex1))


def test_wrong_root_label(ex1):
    assert validate(build(["A"], []), ex1)


def test_overlapping_covers_rejected():
    # two loops leaving the root east and then north/east overlap along the row
    q = build(["X", "Y", "Z"], [(0, 1, "E"), (1, 1, "E"), (0, 2, "N"), (2, 2, "N")])
    assert validate(q) == []
    bad = build(["X", "Y", "Z", "W"], [(0, 1, "E"), (1, 1, "E"), (0, 2, "N"), (2, 3, "E"), (3, 2, "S")])
    assert validate(bad)


def test_cover_examples(final):
    assert cover(final, 0) == T((0, 0))
    assert cover(final, 2) == T((0, -2), ((0, -1),))
    assert cover(final, 6) == T((2, -2), ((2, 0), (0, -1)))
    assert cover(final, 9) == T((-1, -2), ((-2, 0), (0, -1)))


def test_covers_match_rooted_walks(final):
    reached = rooted_walks(EX1_LABELS, EX1_ARCS, 24)
    box = (-6, 6, -6, 0)
    terms = covers(final)
    for p, vs in reached.items():
        assert len(vs) == 1
        (v,) = vs
        assert p in window_points_of_term(terms[v].base, terms[v].gens, (p[0], p[0], p[1], p[1]))
    for v, t in terms.items():
        for p in window_points_of_term(t.base, t.gens, box):
            assert reached.get(p) == {v}


def test_zones(final):
    assert [zone(final, v) for v in range(11)] == [0, 0, 1, 1, 1, 2, 2, 1, 1, 2, 2]


def test_alpha_within_column(column):
    got = alpha_within(column, Window(-3, 3, -4, 0)).placements
    assert got == {(0, 0): "Sigma", (0, -1): "A", (0, -2): "C", (0, -3): "C", (0, -4): "C"}


def test_alpha_root_only():
    assert alpha_within(Quipu.seed_only("s"), BIG).placements == {(0, 0): "s"}


def test_alpha_equals_growth(final, ex1):
    w = Window(-10, 10, -10, 0)
    assert alpha_within(final, w).placements == grow_max(ex1, w).placements
    assert alpha_by_walks(final, w, 30).placements == alpha_within(final, w).placements


def test_unroll_loop(column):
    q = unroll(column, 2)
    assert len(q) == 4
    assert sorted(q.labels) == ["A", "C", "C", "Sigma"]
    (c,) = cycles(q)
    assert c.word == "S" and q.shape.word_to(c.entry) == "SSS"
    assert q.copy_of.count(None) == 3
    assert alpha_within(q, BIG).placements == alpha_within(column, BIG).placements
    assert validate(q) == []


def test_full_unroll_two_cycle(final):
    assert full_unroll(final, 3) == unroll(final, 3, 2)
    q = full_unroll(final, 3)
    c = find_cycle(q, q.shape.out[q.shape.out[q.shape.out[1]["E"]]["E"]]["E"])
    assert q.labels[c.entry] == "B" and q.shape.word_to(c.entry) == "SEEE"


def test_unroll_rejects_non_cycle(final):
    with pytest.raises(NoSuchCycle):
        unroll(final, 1)
    with pytest.raises(NoSuchCycle):
        k_multiple(final, 0, 2)


def test_k_multiple_loop(column):
    q = k_multiple(column, 2, 2)
    (c,) = cycles(q)
    assert c.word == "SS" and [q.labels[v] for v in c.vertices] == ["C", "C"]
    old = window_points_of_term(*_parts(cover(column, 2)), (-5, 5, -30, 0))
    new = set()
    for v in c.vertices:
        new |= window_points_of_term(*_parts(cover(q, v)), (-5, 5, -30, 0))
    assert new == old


def _parts(t):
    return t.base, t.gens


@pytest.mark.parametrize("rewrite", [
    lambda q: unroll(q, 2),
    lambda q: unroll(q, 4, 3),
    lambda q: k_multiple(q, 3, 2),
    lambda q: k_multiple(q, 10, 3),
    lambda q: k_multiple(unroll(q, 8), 7, 2),
])
def test_rewrites_preserve_everything(final, ex1, rewrite):
    q = rewrite(final)
    assert validate(q, ex1) == []
    assert alpha_within(q, BIG).placements == alpha_within(final, BIG).placements
    assert _directions(q) == _directions(final)


def _directions(q):
    from math import gcd
    out = set()
    for c in cycles(q):
        dx, dy = c.displacement
        g = gcd(abs(dx), abs(dy))
        out.add((dx // g, dy // g))
    return out


def test_structure_report(final):
    rep = structure_report(final)
    assert rep.decorations == ()
    by_backbone = {c.backbone: c for c in rep.combs}
    assert set(by_backbone) == {"S", "EE", "WW"}
    assert by_backbone["S"].teeth == ()
    for bb in ("EE", "WW"):
        teeth = by_backbone[bb].teeth
        assert sorted(t.word for t in teeth) == ["S", "S"]
        assert sorted(t.connector for t in teeth) == ["S", "S"]


def test_structure_report_trivial(column):
    assert structure_report(Quipu.seed_only("s")).combs == ()
    (comb,) = structure_report(column).combs
    assert comb.backbone == "S" and comb.teeth == () and comb.transient == "SS"


def test_document_roundtrip(final):
    doc = to_document(final)
    assert from_document(doc) == final
    assert {c["vertex"] for c in doc["covers"]} == set(range(11))
    assert doc["vertices"][5]["zone"] == "Z2"


def test_dot(final):
    dot = to_dot(final)
    assert dot.startswith("digraph quipu {")
    assert 'v0 -> v1 [label="S"];' in dot
    assert dot.count("->") == len(EX1_ARCS)


def test_filtration_result_matches_hand_built(final, ex1_run):
    assert ex1_run.outcome == "halt"
    assert len(ex1_run.quipu) == len(final)
    assert alpha_within(ex1_run.quipu, BIG).placements == alpha_within(final, BIG).placements
