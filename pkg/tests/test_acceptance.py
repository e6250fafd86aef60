"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
import random
import time
from itertools import combinations, product

import pytest

from oracles import binding_adj, on_right, simple, walk, window_points_of_term
from tilequipu import example
from tilequipu.cli import main
from tilequipu.filtration import FiltrationConfig, grid_check, make_context, run_filtration
from tilequipu.paths import UltimatelyPeriodic, Window, pump_check
from tilequipu.quipu import alpha_within, covers, cycles, from_document, k_multiple, unroll, validate
from tilequipu.regions import BiInfinitePath, Blocked, Side, cogrow, trace
from tilequipu.semilinear import SemiLinearTerm, contains, enumerate_points, intersect_terms
from tilequipu.tas import NotConfluent, grow_max

EX1_TRACE = ["SS^ω", "SE^ω", "SW^ω", "SES^ω", "SWS^ω", "SEES^ω", "SWWS^ω"]


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def _pretty(candidate):
    m, p = candidate.split("|")
    return f"{m}{p}^ω"


def test_criterion_1_worked_example(tmp_path, capsys, report):
    out = tmp_path / "q.json"
    t0 = time.perf_counter()
    code = main(["build", str(_data("ex1")), "--window", "20", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    import json
    doc = json.loads(out.read_text())
    got_trace = [_pretty(e["candidate"]) for e in doc["trace"] if e["kind"] == "cycle"]
    q = from_document(doc)
    w = Window(-20, 20, -20, 1, margin=0)
    same = alpha_within(q, w).placements == grow_max(example("ex1"), w).placements
    ok = code == 0 and doc["result"] == "halt" and got_trace == EX1_TRACE and same and elapsed < 10
    report(1, ok, f"exit={code} trace={got_trace} window-equal={same} time={elapsed:.2f}s")


def _data(name):
    from importlib import resources
    return resources.files("tilequipu") / "data" / f"{name}.json"


def _bound_walk(adj, start, word):
    pts = walk(word, start)
    return all(a in adj and b in adj[a] for a, b in zip(pts, pts[1:]))


def _periodic_in_box(adj, start, word, box):
    """Follow start.word^ω until it leaves the box; every edge must be bound."""
    x0, x1, y0, y1 = box
    pos = start
    for k in range(4 * (x1 - x0 + y1 - y0) + 4):
        nxt = walk(word[k % len(word)], pos)[1]
        if not (x0 <= nxt[0] <= x1 and y0 <= nxt[1] <= y1):
            return True
        if pos not in adj or nxt not in adj[pos]:
            return False
        pos = nxt
    return False


def test_criterion_2_grid_classification(report):
    grid1, ex1 = example("grid1"), example("ex1")
    t0 = time.perf_counter()
    res = run_filtration(grid1)
    elapsed = time.perf_counter() - t0
    box = (-15, 14, -15, 14)
    asm = grow_max(grid1, Window(*box, margin=0)).placements
    table = {t.name: {d: t.glue(d) for d in "NESW"} for t in grid1.tiles}
    adj = binding_adj(asm, table)
    w = res.witness
    paths_ok = False
    if res.outcome == "grid" and w is not None:
        m_end = walk(w.m)[-1]
        p_end = walk(w.p, m_end)[-1]
        q_end = walk(w.q, m_end)[-1]
        paths_ok = (_bound_walk(adj, (0, 0), w.m)
                    and _periodic_in_box(adj, m_end, w.p, box)
                    and _periodic_in_box(adj, m_end, w.q, box)
                    and _bound_walk(adj, p_end, w.q)
                    and _bound_walk(adj, q_end, w.p))
    # EX1: no quipu along the run forms a grid with any of the final cycles
    ex1_run = run_filtration(ex1)
    ctx = make_context(ex1, Window.square(20))
    final = ex1_run.quipu
    ex1_clean = ex1_run.outcome == "halt" and all(
        grid_check(q, c.word, [final.labels[v] for v in c.vertices], ctx) is None
        for q in ex1_run.history for c in cycles(final))
    ok = paths_ok and ex1_clean and elapsed < 5
    report(2, ok, f"grid witness={w.to_document() if w else None} five-paths={paths_ok} "
                  f"ex1-negative={ex1_clean} time={elapsed:.2f}s")


def test_criterion_3_confluence_witness(report):
    bad1 = example("bad1")
    res = run_filtration(bad1)
    try:
        grow_max(bad1, Window.square(10))
        direct = None
    except NotConfluent as exc:
        direct = (exc.point, frozenset(exc.tiles))
    ok = (res.outcome == "not-confluent" and res.conflict.point == (0, 1)
          and set(res.conflict.tiles) == {"B", "D"} and direct == ((0, 1), frozenset("BD")))
    report(3, ok, f"outcome={res.outcome} point={res.conflict.point if res.conflict else None} "
                  f"tiles={sorted(res.conflict.tiles) if res.conflict else None}")


def test_criterion_4_pumpability(report):
    t0 = time.perf_counter()
    checked = disagreements = 0
    for n in range(1, 8):
        for letters in product("ENSW", repeat=n):
            m = "".join(letters)
            if not simple(m):
                continue
            checked += 1
            if pump_check(m) != simple(m * 10):
                disagreements += 1
    elapsed = time.perf_counter() - t0
    report(4, disagreements == 0 and elapsed < 30,
           f"{checked} simple words, {disagreements} disagreements, time={elapsed:.2f}s")


def _random_periodic(rng, lo, hi, first=None):
    t = "".join(rng.choice("ENSW") for _ in range(rng.randint(lo, hi)))
    p = "".join(rng.choice("ENSW") for _ in range(rng.randint(1, 3)))
    word = t + p
    if first is not None:
        word = first + word[1:]
    return UltimatelyPeriodic(word[:len(t)], word[len(t):])


def _full_sequence(back, fwd, n=80):
    """Points of the bi-infinite path, backward part reversed, as plain lists."""
    bwd = walk(back.prefix(n))[1:]
    return bwd[::-1] + walk(fwd.prefix(n))


def _trim(seq, box):
    x0, x1, y0, y1 = box
    inside = [i for i, (x, y) in enumerate(seq) if x0 <= x <= x1 and y0 <= y <= y1]
    return seq[max(inside[0] - 1, 0):inside[-1] + 2]


def test_criterion_5_cogrowth(report):
    rng = random.Random(2024)
    box = (-8, 7, -8, 7)
    window = Window(*box, margin=0)
    pairs = blocked = 0
    failures = []
    while pairs < 1000:
        back = _random_periodic(rng, 0, 3)
        f1 = _random_periodic(rng, 0, 4)
        f2 = _random_periodic(rng, 0, 4, first=f1.letter(0))
        seqs = []
        try:
            for f in (f1, f2):
                trace(BiInfinitePath(back, (0, 0), f), window)
                seq = _full_sequence(back, f)
                if not simple_points(seq):
                    raise ValueError
                seqs.append(_trim(seq, box))
        except ValueError:
            continue
        pairs += 1
        b, s1, s2 = str(back), str(f1), str(f2)
        try:
            out = cogrow(b, s1, b, s2, Side.RIGHT, 30, window)
        except Blocked as exc:
            blocked += 1
            out = exc.prefix
        pts = walk(out)
        edges = set()
        for f in (f1, f2):
            fp = walk(f.prefix(80))
            edges.update(zip(fp, fp[1:]))
        ok = simple(out) and all(e in edges for e in zip(pts, pts[1:]))
        for seq in seqs:
            on = set(seq)
            ok = ok and all(p in on or on_right(seq, box, p) for p in pts)
        same = cogrow(b, s1, b, s1, Side.RIGHT, 30, window)
        reproduced = same == f1.prefix(len(same)) and (
            len(same) == 30 or walk(f1.prefix(len(same) + 1))[-1] not in window)
        if not (ok and reproduced):
            failures.append((b, s1, s2, out, same))
    report(5, not failures, f"{pairs} pairs ({blocked} blocked early), {len(failures)} failures")


def simple_points(seq):
    return len(set(seq)) == len(seq)


def _random_term(rng):
    base = (rng.randint(-8, 8), rng.randint(-8, 8))
    k = rng.randint(0, 2)
    gens = []
    while len(gens) < k:
        g = (rng.randint(-8, 8), rng.randint(-8, 8))
        if g == (0, 0) or (gens and gens[0][0] * g[1] - gens[0][1] * g[0] == 0):
            continue
        gens.append(g)
    return SemiLinearTerm(base, tuple(gens))


def test_criterion_6_semilinear(report):
    rng = random.Random(99)
    box = (-20, 19, -20, 19)
    window = Window(*box, margin=0)
    cells = list(window.points())
    bad_intersections = bad_contains = 0
    for _ in range(1000):
        t1, t2 = _random_term(rng), _random_term(rng)
        e1 = window_points_of_term(t1.base, t1.gens, box)
        e2 = window_points_of_term(t2.base, t2.gens, box)
        if intersect_terms(t1, t2, window).within(window) != e1 & e2:
            bad_intersections += 1
        for t, e in ((t1, e1), (t2, e2)):
            if enumerate_points([t], window) != e or any(contains(t, p) != (p in e) for p in cells):
                bad_contains += 1
    report(6, bad_intersections == 0 and bad_contains == 0,
           f"1000 pairs, {bad_intersections} intersection mismatches, {bad_contains} membership mismatches")


def test_criterion_7_quipu_algebra(ex1_run, ex1, report):
    box = (-30, 30, -30, 30)
    window = Window(*box, margin=0)
    problems = []
    for i, q in enumerate(ex1_run.history):
        if validate(q, ex1):
            problems.append(f"Q{i} invalid")
        sets = {v: window_points_of_term(t.base, t.gens, box) for v, t in covers(q).items()}
        if any(sets[u] & sets[v] for u, v in combinations(sets, 2)):
            problems.append(f"Q{i} covers overlap")
        ref = alpha_within(q, window).placements
        for c in cycles(q):
            for name, r in (("unroll", unroll(q, c.entry)), ("k_multiple", k_multiple(q, c.entry, 2))):
                if alpha_within(r, window).placements != ref or validate(r, ex1):
                    problems.append(f"Q{i} {name} at {c.entry}")
    report(7, not problems, f"{len(ex1_run.history)} quipus checked; problems={problems}")


def test_criterion_8_determinism(tmp_path, report):
    outs = []
    for k in range(2):
        q, d = tmp_path / f"q{k}.json", tmp_path / f"q{k}.dot"
        main(["build", str(_data("ex1")), "--out", str(q), "--dot", str(d)])
        outs.append((q.read_bytes(), d.read_bytes()))
    report(8, outs[0] == outs[1], f"documents identical={outs[0][0] == outs[1][0]} "
                                  f"dot identical={outs[0][1] == outs[1][1]}")


def test_cap_never_fires_on_examples(report):
    outcomes = {n: run_filtration(example(n), FiltrationConfig()).outcome for n in ("ex1", "grid1")}
    report("note", outcomes == {"ex1": "halt", "grid1": "grid"}, f"default cap outcomes {outcomes}")
