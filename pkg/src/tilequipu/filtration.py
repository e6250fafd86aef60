"""Quipu construction: candidates, extension steps, grid detection, the main loop."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterator, Mapping

from .paths import (
    DEFAULT_ORDER,
    VECTORS,
    Vec2,
    Window,
    cross,
    displacement,
    is_simple,
    order_key,
    points,
    vadd,
    vscale,
    vsub,
)
from .quipu import (
    Draft,
    Quipu,
    cover,
    covers,
    find_cycle,
    alpha_within,
    to_document,
    zone,
)
from .semilinear import (
    SemiLinearTerm,
    intersect_terms,
    intersection_finite,
    term_contains,
    term_points,
)
from .tas import (
    TAS,
    Assembly,
    NotConfluent,
    _grow,
    check_confluence,
    glues_match,
    path_assembles,
    shortest_paths,
)


class ExtensionStuck(RuntimeError):
    """The case analysis could not place a direction within the operation budget."""


class PreconditionViolated(ValueError):
    pass


class GlueMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CandidateOrder:
    order: str = DEFAULT_ORDER
    cap: int = 12

    def __post_init__(self) -> None:
        if sorted(self.order) != sorted("ENSW"):
            raise ValueError(f"direction order must be a permutation of ENSW, got {self.order!r}")
        if self.cap < 2:
            raise ValueError("cap must be at least 2")


def _words(n: int, order: str) -> Iterator[str]:
    """Simple words of length n in alphabetical order."""
    def rec(prefix: list[str], pos: Vec2, seen: set[Vec2]) -> Iterator[str]:
        if len(prefix) == n:
            yield "".join(prefix)
            return
        for c in order:
            dx, dy = VECTORS[c]
            nxt = (pos[0] + dx, pos[1] + dy)
            if nxt in seen:
                continue
            seen.add(nxt)
            prefix.append(c)
            yield from rec(prefix, nxt, seen)
            prefix.pop()
            seen.discard(nxt)

    yield from rec([], (0, 0), {(0, 0)})


def order_candidates(order: CandidateOrder = CandidateOrder()) -> Iterator[tuple[str, str]]:
    """All (m, p) with m.p.p simple, by |m|+|p|, then |m|, then the word m.p."""
    for n in range(2, order.cap + 1):
        words = list(_words(n, order.order))
        for k in range(1, n):
            for w in words:
                m, p = w[:k], w[k:]
                if is_simple(m + p + p):
                    yield m, p


@dataclass(frozen=True)
class GridWitness:
    m: str
    p: str
    q: str
    anchor: Vec2
    tile: str

    def to_document(self) -> dict[str, Any]:
        return {"m": self.m, "p": self.p, "q": self.q}


@dataclass
class ExtensionResult:
    kind: str  # "extended" | "no-change" | "grid"
    quipu: Quipu
    witness: GridWitness | None = None
    events: list[str] = field(default_factory=list)


@dataclass
class Context:
    """What the extension steps need to know about the target assembly."""

    tas: TAS
    reference: Assembly
    region: Window
    budget: int = 400

    def tile_at(self, p: Vec2) -> str | None:
        return self.reference.get(p)


def make_context(tas: TAS, window: Window, budget: int = 400) -> Context:
    region = window.expanded()
    growth = _grow(tas, region)
    check_confluence(tas, growth)
    return Context(tas, Assembly(growth.placements), region, budget)


# coverage of a target set by the quipu covers

@dataclass
class Coverage:
    kind: str  # "inside" | "disjoint" | "partial"
    moduli: tuple[int, ...] = ()
    infinite: bool = False
    covered: frozenset = frozenset()  # plane targets: covered (k, j) params in the window
    params: frozenset = frozenset()  # plane targets: all (k, j) params in the window


def _line_cover(target: SemiLinearTerm, terms: Mapping[int, SemiLinearTerm]) -> Coverage:
    a, (g,) = target.base, target.gens
    finite: set[int] = set()
    progs: list[tuple[int, int]] = []

    def param(pt: Vec2) -> int:
        d = vsub(pt, a)
        return d[0] // g[0] if g[0] else d[1] // g[1]

    for t in terms.values():
        r = intersect_terms(target, t)
        finite.update(param(pt) for pt in r.points)
        for u in r.terms:
            s = param(u.base)
            mstep = param(vadd(a, u.gens[0]))
            progs.append((s, mstep))
    if not finite and not progs:
        return Coverage("disjoint")
    lcm = 1
    for _, mstep in progs:
        lcm = lcm * mstep // math.gcd(lcm, mstep)
    start = max([0] + [s for s, _ in progs] + [f + 1 for f in finite])

    def hit(k: int) -> bool:
        return k in finite or any(k >= s and (k - s) % mstep == 0 for s, mstep in progs)

    if all(hit(k) for k in range(start + lcm)):
        return Coverage("inside")
    return Coverage("partial", tuple(sorted({mstep for _, mstep in progs})), bool(progs))


def coverage(target: SemiLinearTerm, terms: Mapping[int, SemiLinearTerm], region: Window) -> Coverage:
    if target.dim == 0:
        inside = any(term_contains(t, target.base) for t in terms.values())
        return Coverage("inside" if inside else "disjoint")
    if target.dim == 1:
        return _line_cover(target, terms)
    b, c = target.gens
    params, covered = set(), set()
    for pt in term_points(target, region):
        d = vsub(pt, target.base)
        k = cross(d, c) // cross(b, c)
        j = cross(b, d) // cross(b, c)
        params.add((k, j))
        if any(term_contains(t, pt) for t in terms.values()):
            covered.add((k, j))
    if covered == params:
        return Coverage("inside")
    if not covered:
        return Coverage("disjoint")
    return Coverage("partial", infinite=True, covered=frozenset(covered), params=frozenset(params))


def _add_child(q: Quipu, v: int, d: str, tile: str) -> Quipu:
    draft = q.draft()
    w = draft.add_vertex(tile)
    draft.arcs.append((v, w, d))
    return draft.freeze()


def _split(q: Quipu, v: int, cycle_vertex: int, budget: list[int]) -> Quipu:
    """Unroll the cycle through `cycle_vertex` until `v` gains a copy."""
    from .quipu import unroll
    n = len(q)
    steps = len(find_cycle(q, cycle_vertex).vertices) + 1
    for _ in range(steps):
        _spend(budget)
        q = unroll(q, cycle_vertex)
        if any(q.copy_of[i] == v for i in range(n, len(q))):
            return q
        n = len(q)
    raise ExtensionStuck(f"vertex {v} never split by its cycle")


def _spend(budget: list[int]) -> None:
    budget[0] -= 1
    if budget[0] < 0:
        raise ExtensionStuck("operation budget exhausted")


def extend_direction(q: Quipu, X: set[int] | frozenset[int], d: str, tile: str,
                     ctx: Context) -> ExtensionResult:
    """Make the cover of `X` shifted by `d` part of the quipu cover, labelled `tile`."""
    from .quipu import k_multiple
    tiles = ctx.tas.by_name
    for x in X:
        if not glues_match(tiles[q.labels[x]], d, tiles[tile]):
            raise GlueMismatch(f"{q.labels[x]} does not bind {tile} towards {d}")
    source = [cover(q, x) for x in X]
    budget = [ctx.budget]
    events: list[str] = []
    start = q
    while True:
        terms = covers(q)
        pending = [v for v in q.shape.order
                   if any(intersect_terms(terms[v], s, ctx.region).within(ctx.region)
                          or intersect_terms(terms[v], s).kind in ("finite", "terms")
                          for s in source)]
        changed = False
        for v in pending:
            if d in q.shape.out[v]:
                continue
            target = terms[v].translate(VECTORS[d])
            cov = coverage(target, terms, ctx.region)
            if cov.kind == "inside":
                continue
            _spend(budget)
            if cov.kind == "disjoint":
                q = _add_child(q, v, d, tile)
                events.append("vertex")
            elif target.dim == 1:
                cyc = q.shape.cycles[q.shape.path_cycles[v][0]]
                lcm = 1
                for mstep in cov.moduli:
                    lcm = lcm * mstep // math.gcd(lcm, mstep)
                if lcm > 1:
                    q = k_multiple(q, cyc.entry, lcm)
                    events.append("k-multiple")
                else:
                    q = _split(q, v, cyc.entry, budget)
                    events.append("unroll")
            else:
                q = _split_plane(q, v, cov, budget)
                events.append("unroll")
            changed = True
            break
        if not changed:
            break
    kind = "extended" if q != start else "no-change"
    return ExtensionResult(kind, q, None, events)


def _split_plane(q: Quipu, v: int, cov: Coverage, budget: list[int]) -> Quipu:
    """Peel one layer off a two-generator vertex whose target is partly covered."""
    backbone, tooth = (q.shape.cycles[i] for i in q.shape.path_cycles[v])
    uncovered = cov.params - cov.covered
    kmax = max(k for k, _ in cov.params)
    jmax = max(j for _, j in cov.params)
    for group in (cov.covered, uncovered):
        if max(j for _, j in group) * 2 <= jmax:
            return _split(q, v, tooth.entry, budget)
    for group in (cov.covered, uncovered):
        if max(k for k, _ in group) * 2 <= kmax:
            return _split(q, v, backbone.entry, budget)
    raise ExtensionStuck(f"unbounded partial overlap below vertex {v}")


def transient_step(q: Quipu, word: str, tiles: list[str], ctx: Context,
                   events: list[str] | None = None) -> Quipu:
    """Cover every point of ``(0,0).word`` one direction at a time."""
    from .quipu import vertex_at
    pts = points(word)
    for j, d in enumerate(word):
        if vertex_at(q, pts[j + 1]) is not None:
            continue
        x = vertex_at(q, pts[j])
        if x is None:
            raise PreconditionViolated(f"point {pts[j]} is not covered")
        res = extend_direction(q, {x}, d, tiles[j], ctx)
        if events is not None:
            events.extend(res.events)
        q = res.quipu
        if vertex_at(q, pts[j + 1]) is None:
            raise ExtensionStuck(f"point {pts[j + 1]} still uncovered")
    return q


def path_terms(m: str, p: str) -> list[SemiLinearTerm]:
    """Domain of ``(0,0).m p^ω`` as points and lines."""
    pts = points(m + p)
    v = displacement(p)
    return ([SemiLinearTerm(pt) for pt in pts[:len(m)]]
            + [SemiLinearTerm(pts[len(m) + j], (v,)) for j in range(len(p))])


def _index_on_path(m: str, p: str, pt: Vec2) -> int:
    pts = points(m + p)
    if pt in pts[:len(m)]:
        return pts.index(pt)
    v = displacement(p)
    for j in range(len(p)):
        d = vsub(pt, pts[len(m) + j])
        if cross(d, v) == 0:
            k = d[0] // v[0] if v[0] else d[1] // v[1]
            if k >= 0 and vadd(pts[len(m) + j], vscale(k, v)) == pt:
                return len(m) + j + k * len(p)
    raise ValueError(f"{pt} is not on the path")


def tile_cycle(tiles: list[str], m_len: int, p_len: int, start: int) -> tuple[int, int]:
    """First (i0, L) with i0 > start such that points from i0 repeat with period L.

    `tiles[s]` is the tile at point s (point 0 is the seed); only points past
    the transient, i.e. s > m_len, are eligible.
    """
    first: dict[tuple[int, str], int] = {}
    for s in range(max(start + 1, m_len + 1), len(tiles)):
        key = ((s - m_len) % p_len, tiles[s])
        if key in first:
            return first[key], s - first[key]
        first[key] = s
    raise PreconditionViolated("tile sequence too short to expose its period")


def _append_branch(q: Quipu, at: int, word: str, tiles: list[str],
                   i0: int, L: int) -> Quipu:
    """Attach steps 1..i0+L-1 of `word` at vertex `at`, closing steps i0..i0+L-1 into a cycle."""
    draft = q.draft()
    prev = at
    ids = {}
    for s in range(1, i0 + L):
        w = draft.add_vertex(tiles[s])
        ids[s] = w
        draft.arcs.append((prev, w, word[s - 1]))
        prev = w
    draft.arcs.append((prev, ids[i0], word[i0 + L - 1]))
    return draft.freeze()


def _repetitions_free(q: Quipu, a_pt: Vec2, b: Vec2, rest: str, rest_tiles: list[str],
                      ctx: Context) -> bool:
    """Every copy A + n b of the new branch is unobstructed inside the reference region."""
    terms = list(covers(q).values())
    n = 0
    while True:
        start = vadd(a_pt, vscale(n, b))
        if start not in ctx.region:
            return True
        pts = points(rest, start)
        for pt, t in zip(pts[1:], rest_tiles[1:]):
            if pt in ctx.region and ctx.tile_at(pt) != t:
                return False
            if any(term_contains(u, pt) for u in terms):
                return False
        n += 1


def periodic_step(q: Quipu, a_pt: Vec2, rest: str, tiles: list[str], m_len: int, p: str,
                  ctx: Context, events: list[str]) -> Quipu:
    """Attach the periodic tail ``A.rest`` where A is the last covered point.

    `rest` starts at A; `tiles[s]` is the tile at step s from A and `m_len`
    counts the steps from A before the periodic part begins.
    """
    from .quipu import unroll, vertex_at
    budget = [ctx.budget]
    i0, L = tile_cycle(tiles, m_len, len(p), 0)
    pv = displacement(p)
    while True:
        x = vertex_at(q, a_pt)
        if x is None:
            raise PreconditionViolated(f"{a_pt} is not covered")
        z = zone(q, x)
        if z == 2:
            tooth = q.shape.cycles[q.shape.path_cycles[x][1]]
            _spend(budget)
            q = unroll(q, tooth.entry)
            events.append("unroll")
            continue
        if z == 1:
            backbone = q.shape.cycles[q.shape.path_cycles[x][0]]
            if cover(q, x).base != a_pt:
                _spend(budget)
                q = unroll(q, backbone.entry)
                events.append("unroll")
                continue
            b = backbone.displacement
            if cross(b, pv) != 0 and _repetitions_free(q, a_pt, b, rest, tiles, ctx):
                return _append_branch(q, x, rest, tiles, i0, L)
            # fall back to an unrolled Z0 copy of A
            while zone(q, vertex_at(q, a_pt)) != 0:  # type: ignore[arg-type]
                _spend(budget)
                q = unroll(q, backbone.entry)
                events.append("unroll")
            continue
        return _append_branch(q, x, rest, tiles, i0, L)


def extend_buildup(q: Quipu, m: str, p: str, ctx: Context,
                   events: list[str] | None = None) -> ExtensionResult:
    """Add ``(0,0).m p^ω`` to the quipu with one new cycle."""
    events = [] if events is None else events
    fin = intersection_finite(path_terms(m, p), list(covers(q).values()))
    if fin.finite is not True:
        raise PreconditionViolated("path meets the quipu cover infinitely often")
    idx_a = max(_index_on_path(m, p, pt) for pt in fin.points)
    reps = (idx_a + len(m)) // len(p) + 2 * (len(ctx.tas.tiles) + 2)
    word = m + p * reps
    seq = path_assembles(ctx.tas, word)
    if seq is None:
        raise PreconditionViolated("candidate does not assemble")
    tiles = [ctx.tas.seed.name] + seq
    pts = points(word)
    rest = word[idx_a:]
    rest_tiles = tiles[idx_a:]
    cycles_before = len(q.shape.cycles)
    q = periodic_step(q, pts[idx_a], rest, rest_tiles, max(0, len(m) - idx_a), p, ctx, events)
    q = transient_step(q, word[:idx_a], tiles[1:idx_a + 1], ctx, events)
    if len(q.shape.cycles) <= cycles_before:
        raise ExtensionStuck("build-up did not add a cycle")
    return ExtensionResult("extended", q, None, events)


def _bi_points(word: str, tiles: list[str], offset: int, span: int) -> dict[Vec2, str]:
    """Points of the bi-infinite periodic path through the origin, `span` steps each way.

    Point j of the cycle (tile ``tiles[j]``) leaves along ``word[j]``; the
    origin is cycle position `offset`.
    """
    L = len(word)
    out = {(0, 0): tiles[offset]}
    pos = (0, 0)
    for s in range(span):
        j = (offset + s) % L
        pos = vadd(pos, VECTORS[word[j]])
        out[pos] = tiles[(j + 1) % L]
    pos = (0, 0)
    for s in range(1, span + 1):
        j = (offset - s) % L
        pos = vsub(pos, VECTORS[word[j]])
        out[pos] = tiles[j]
    return out


def _materialized(ctx: Context, start: Vec2, word: str, tiles: list[str], offset: int,
                  box: Window, limit: int | None = None) -> bool:
    """Whether ``start.word^ω`` (cut at `box` or `limit` steps) carries the cycle tiles."""
    pos = start
    if ctx.tile_at(pos) != tiles[offset % len(tiles)]:
        return False
    s = 0
    while limit is None or s < limit:
        j = (offset + s) % len(word)
        pos = vadd(pos, VECTORS[word[j]])
        if pos not in box:
            return True
        if ctx.tile_at(pos) != tiles[(j + 1) % len(word)]:
            return False
        s += 1
    return True


def grid_check(q: Quipu, p_word: str, p_tiles: list[str], ctx: Context,
               box: Window | None = None) -> GridWitness | None:
    """Look for a grid formed by the candidate's periodic tiles and a quipu cycle.

    `p_word[j]` leaves cycle point j whose tile is `p_tiles[j]`.
    """
    box = box or Window(-15, 14, -15, 14, 0)
    pv = displacement(p_word)
    for cyc in q.shape.cycles:
        cv = cyc.displacement
        if cross(pv, cv) == 0:
            continue
        c_tiles = [q.labels[v] for v in cyc.vertices]
        L1, L2 = len(p_word), len(cyc.word)
        span = (L1 + L2) * (1 + (L1 * L2 * 2) // abs(cross(pv, cv))) + L1 + L2
        for r1, r2 in product(range(L1), range(L2)):
            if p_tiles[r1] != c_tiles[r2]:
                continue
            one = _bi_points(p_word, p_tiles, r1, span)
            two = _bi_points(cyc.word, c_tiles, r2, span)
            if any(one[pt] != two[pt] for pt in one.keys() & two.keys()):
                continue
            w = _grid_witness(ctx, p_word, p_tiles, r1, cyc.word, c_tiles, r2, box)
            if w is not None:
                return w
    return None


def _grid_witness(ctx: Context, pw: str, pt: list[str], r1: int, cw: str, ct: list[str],
                  r2: int, box: Window) -> GridWitness | None:
    p_hat = pw[r1:] + pw[:r1]
    q_hat = cw[r2:] + cw[:r2]
    tree = shortest_paths(ctx.tas, ctx.reference)
    for z in sorted(tree, key=lambda u: (tree[u][0], u)):
        if z not in box:
            continue
        ok = (_materialized(ctx, z, pw, pt, r1, box)
              and _materialized(ctx, z, cw, ct, r2, box)
              and _materialized(ctx, vadd(z, displacement(p_hat)), cw, ct, r2, box, len(cw))
              and _materialized(ctx, vadd(z, displacement(q_hat)), pw, pt, r1, box, len(pw)))
        if ok:
            path = [z]
            while tree[path[-1]][1] is not None:
                path.append(tree[path[-1]][1])  # type: ignore[arg-type]
            path.reverse()
            from .paths import word_of
            return GridWitness(word_of(path), p_hat, q_hat, z, pt[r1])
    return None


def add_decorations(q: Quipu, bound: int, ctx: Context,
                    events: list[str] | None = None) -> tuple[Quipu, list[tuple[str, int]]]:
    """Cover every assembly point at binding distance < `bound` from the seed.

    Returns the new quipu and, per branch word added, how many vertices it cost.
    """
    from .quipu import vertex_at
    from .paths import word_of
    tree = shortest_paths(ctx.tas, ctx.reference)
    added = []
    todo = sorted((u for u in tree if tree[u][0] < bound), key=lambda u: (tree[u][0], u))
    for u in todo:
        if vertex_at(q, u) is not None:
            continue
        path = [u]
        while tree[path[-1]][1] is not None:
            path.append(tree[path[-1]][1])  # type: ignore[arg-type]
        path.reverse()
        word = word_of(path)
        tiles = [ctx.reference[pt] for pt in path[1:]]
        size = len(q)
        q = transient_step(q, word, tiles, ctx, events)
        added.append((word, len(q) - size))
    return q, added


@dataclass(frozen=True)
class FiltrationConfig:
    window: int = 20
    margin: int | None = None
    cap: int = 12
    order: str = DEFAULT_ORDER
    budget: int = 400

    @property
    def frame(self) -> Window:
        margin = self.margin if self.margin is not None else max(self.cap, 8)
        return Window.square(self.window, margin)


@dataclass(frozen=True)
class TraceEntry:
    step: int
    kind: str
    candidate: str
    vertices_added: int

    def to_document(self) -> dict[str, Any]:
        return {"step": self.step, "kind": self.kind, "candidate": self.candidate,
                "vertices_added": self.vertices_added}


@dataclass
class FiltrationResult:
    outcome: str  # "halt" | "grid" | "inconclusive" | "not-confluent"
    quipu: Quipu | None
    trace: list[TraceEntry] = field(default_factory=list)
    witness: GridWitness | None = None
    conflict: NotConfluent | None = None
    history: list[Quipu] = field(default_factory=list)
    config: FiltrationConfig = FiltrationConfig()
    note: str = ""

    @property
    def cycle_trace(self) -> list[str]:
        """Cycle insertions written as ``m p^ω``."""
        return [pretty(*e.candidate.split("|")) for e in self.trace if e.kind == "cycle"]

    def to_document(self) -> dict[str, Any]:
        if self.quipu is not None:
            doc = to_document(self.quipu)
        else:
            doc = {"vertices": [], "arcs": [], "root": 0, "covers": []}
        doc["result"] = self.outcome
        if self.witness is not None:
            doc["grid_witness"] = self.witness.to_document()
        if self.conflict is not None:
            doc["witness"] = {"point": list(self.conflict.point), "tiles": list(self.conflict.tiles)}
        doc["trace"] = [e.to_document() for e in self.trace]
        frame = self.config.frame
        doc["metadata"] = {
            "soundness": "window-sound",
            "window": [frame.x_min, frame.x_max, frame.y_min, frame.y_max],
            "margin": frame.margin,
            "cap": self.config.cap,
            "order": self.config.order,
        }
        if self.note:
            doc["metadata"]["note"] = self.note
        return doc


def pretty(m: str, p: str) -> str:
    return f"{m}{p}^ω"


def label(m: str, p: str) -> str:
    return f"{m}|{p}"


def halted(q: Quipu, ctx: Context, frame: Window) -> bool:
    """No attachable side of the quipu leads outside its cover, and the window agrees."""
    terms = covers(q)
    tiles = ctx.tas.by_name
    for v, term in terms.items():
        t = tiles[q.labels[v]]
        for d in "ENSW":
            g = t.glue(d)
            if g is None or not ctx.tas.attachable(d, g):
                continue
            if d in q.shape.out[v]:
                continue
            if coverage(term.translate(VECTORS[d]), terms, ctx.region).kind != "inside":
                return False
    return alpha_within(q, frame).placements == ctx.reference.crop(frame).placements


def _assembling_words(ctx: Context, n: int, order: str) -> list[str]:
    adj = ctx.reference.binding_graph(ctx.tas)
    out = []

    def rec(pos: Vec2, prefix: list[str], seen: set[Vec2]) -> None:
        if len(prefix) == n:
            out.append("".join(prefix))
            return
        for c in order:
            nxt = vadd(pos, VECTORS[c])
            if nxt in seen or nxt not in adj[pos]:
                continue
            seen.add(nxt)
            prefix.append(c)
            rec(nxt, prefix, seen)
            prefix.pop()
            seen.discard(nxt)

    rec((0, 0), [], {(0, 0)})
    return out


def run_filtration(tas: TAS, config: FiltrationConfig = FiltrationConfig()) -> FiltrationResult:
    frame = config.frame
    order = CandidateOrder(config.order, config.cap)
    try:
        ctx = make_context(tas, frame, config.budget)
    except NotConfluent as exc:
        return FiltrationResult("not-confluent", None, conflict=exc, config=config)
    q = Quipu.seed_only(tas.seed.name)
    trace: list[TraceEntry] = []
    history = [q]

    def record(kind: str, cand: str, before: Quipu, after: Quipu) -> None:
        trace.append(TraceEntry(len(trace), kind, cand, len(after) - len(before)))

    def decorate(bound: int) -> None:
        nonlocal q
        events: list[str] = []
        q, words = add_decorations(q, bound, ctx, events)
        for w, n_added in words:
            trace.append(TraceEntry(len(trace), "decoration", w, n_added))
        if q is not history[-1]:
            history.append(q)

    def finish(outcome: str, **kw: Any) -> FiltrationResult:
        return FiltrationResult(outcome, q, trace, history=history, config=config, **kw)

    if halted(q, ctx, frame):
        return finish("halt")
    for n in range(2, config.cap + 1):
        words = sorted(_assembling_words(ctx, n, order.order), key=lambda w: order_key(w, order.order))
        first = (order.order[0], order.order[0] * (n - 1))
        cands = [(w[:k], w[k:]) for k in range(1, n) for w in words if is_simple(w[:k] + w[k:] * 2)]
        decorated = False
        if not cands or cands[0] != first:
            decorate(n)
            decorated = True
            if halted(q, ctx, frame):
                return finish("halt")
        for m, p in cands:
            from .tas import candidate_in_alphamax
            if candidate_in_alphamax(tas, m, p):
                word = m + p * (len(m) + 2 * (len(tas.tiles) + 2))
                tiles = [tas.seed.name] + (path_assembles(tas, word) or [])
                i0, L = tile_cycle(tiles, len(m), len(p), 0)
                p_word = word[i0:i0 + L]
                p_tiles = tiles[i0:i0 + L]
                witness = grid_check(q, p_word, p_tiles, ctx)
                if any(cross(displacement(p), c.displacement) for c in q.shape.cycles):
                    trace.append(TraceEntry(len(trace), "grid-check", label(m, p), 0))
                if witness is not None:
                    return finish("grid", witness=witness)
                fin = intersection_finite(path_terms(m, p), list(covers(q).values()))
                if fin.finite is True:
                    before = q
                    events: list[str] = []
                    try:
                        res = extend_buildup(q, m, p, ctx, events)
                    except ExtensionStuck as exc:
                        return finish("inconclusive", note=f"{pretty(m, p)}: {exc}")
                    q = res.quipu
                    if "unroll" in events or "k-multiple" in events:
                        trace.append(TraceEntry(len(trace), "unroll", label(m, p), 0))
                    record("cycle", label(m, p), before, q)
                    history.append(q)
            if not decorated:
                decorate(n)
                decorated = True
            if halted(q, ctx, frame):
                return finish("halt")
    return finish("inconclusive", note=f"candidate cap {config.cap} reached")
