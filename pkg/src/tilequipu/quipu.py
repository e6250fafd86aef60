"""Quipus: rooted tile-labelled automata whose walks generate assembly paths."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Any, Iterable, Iterator

from .paths import VECTORS, Vec2, Window, cross, displacement, vadd
from .semilinear import SemiLinearTerm, intersect_terms, term_contains, term_points
from .tas import TAS, Assembly, glues_match

DIR_ORDER = "ENSW"


class InvalidQuipu(ValueError):
    pass


class NoSuchCycle(KeyError):
    pass


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]  # starting at the entry vertex
    word: str  # arc labels around the cycle, starting at the entry

    @property
    def entry(self) -> int:
        return self.vertices[0]

    @property
    def ident(self) -> int:
        return min(self.vertices)

    @property
    def displacement(self) -> Vec2:
        return displacement(self.word)


@dataclass
class Shape:
    """Structural reading of a quipu, computed once per instance."""

    out: dict[int, dict[str, int]]
    parent: dict[int, tuple[int, str] | None]
    order: list[int]  # DFS preorder of reachable vertices
    cycles: list[Cycle]
    cycle_of: dict[int, int]  # vertex -> index into cycles
    path_cycles: dict[int, tuple[int, ...]]  # cycles met on the tree path, in order
    base: dict[int, Vec2]
    problems: list[str] = field(default_factory=list)

    def tree_path(self, v: int) -> list[int]:
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]][0])  # type: ignore[index]
        return out[::-1]

    def word_to(self, v: int) -> str:
        letters = []
        while self.parent[v] is not None:
            u, d = self.parent[v]  # type: ignore[misc]
            letters.append(d)
            v = u
        return "".join(reversed(letters))


@dataclass(frozen=True)
class Quipu:
    labels: tuple[str, ...]
    arcs: tuple[tuple[int, int, str], ...] = ()
    root: int = 0
    copy_of: tuple[int | None, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "arcs", tuple(sorted(tuple(a) for a in self.arcs)))
        if not self.copy_of:
            object.__setattr__(self, "copy_of", (None,) * len(self.labels))
        if len(self.copy_of) != len(self.labels):
            raise ValueError("copy_of must have one entry per vertex")
        for u, v, d in self.arcs:
            if not (0 <= u < len(self.labels) and 0 <= v < len(self.labels)) or d not in VECTORS:
                raise ValueError(f"bad arc {(u, v, d)}")

    @classmethod
    def seed_only(cls, seed: str) -> "Quipu":
        return cls((seed,))

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def shape(self) -> Shape:
        return _analyze(self)

    def draft(self) -> "Draft":
        return Draft(list(self.labels), list(self.arcs), self.root, list(self.copy_of))


@dataclass
class Draft:
    """Mutable working copy used by the graph rewrites."""

    labels: list[str]
    arcs: list[tuple[int, int, str]]
    root: int
    copy_of: list[int | None]

    def add_vertex(self, label: str, copy_of: int | None = None) -> int:
        self.labels.append(label)
        self.copy_of.append(copy_of)
        return len(self.labels) - 1

    def freeze(self) -> Quipu:
        return Quipu(tuple(self.labels), tuple(self.arcs), self.root, tuple(self.copy_of))


def _analyze(q: Quipu) -> Shape:
    problems: list[str] = []
    out: dict[int, dict[str, int]] = {v: {} for v in range(len(q))}
    indeg = [0] * len(q)
    for u, v, d in q.arcs:
        if d in out[u]:
            problems.append(f"determinism: vertex {u} has two arcs labelled {d}")
        else:
            out[u][d] = v
        indeg[v] += 1
    if indeg[q.root]:
        problems.append("root has incoming arcs")
    parent: dict[int, tuple[int, str] | None] = {q.root: None}
    order = [q.root]
    on_stack = {q.root}
    cycles: list[Cycle] = []
    stack = [(q.root, iter(sorted(out[q.root].items(), key=lambda kv: DIR_ORDER.index(kv[0]))))]
    path = [q.root]
    while stack:
        v, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            path.pop()
            on_stack.discard(v)
            continue
        d, w = nxt
        if w in on_stack:
            k = path.index(w)
            verts = tuple(path[k:])
            word = "".join(parent[x][1] for x in verts[1:]) + d  # type: ignore[index]
            cycles.append(Cycle(verts, word))
        elif w in parent:
            problems.append(f"unique path: vertex {w} is reached twice")
        else:
            parent[w] = (v, d)
            order.append(w)
            on_stack.add(w)
            path.append(w)
            stack.append((w, iter(sorted(out[w].items(), key=lambda kv: DIR_ORDER.index(kv[0])))))
    unreachable = [v for v in range(len(q)) if v not in parent]
    if unreachable:
        problems.append(f"unreachable vertices {unreachable}")
    cycle_of: dict[int, int] = {}
    for i, c in enumerate(cycles):
        for v in c.vertices:
            if v in cycle_of:
                problems.append(f"cycles share vertex {v}")
            cycle_of[v] = i
        if c.displacement == (0, 0):
            problems.append(f"cycle through {c.entry} has null displacement")
    for v in parent:
        expected = 0 if v == q.root else 1
        if v in cycle_of and cycles[cycle_of[v]].entry == v:
            expected += 1
        if indeg[v] != expected:
            problems.append(f"vertex {v} has in-degree {indeg[v]}, expected {expected}")
    path_cycles: dict[int, tuple[int, ...]] = {}
    base: dict[int, Vec2] = {}
    for v in order:
        p = parent[v]
        if p is None:
            prev: tuple[int, ...] = ()
            base[v] = (0, 0)
        else:
            prev = path_cycles[p[0]]
            base[v] = vadd(base[p[0]], VECTORS[p[1]])
        c = cycle_of.get(v)
        path_cycles[v] = prev + ((c,) if c is not None and c not in prev else ())
        if len(path_cycles[v]) > 2:
            problems.append(f"vertex {v} is reached after {len(path_cycles[v])} cycles")
    return Shape(out, parent, order, cycles, cycle_of, path_cycles, base, problems)


def cycles(q: Quipu) -> list[Cycle]:
    return list(q.shape.cycles)


def find_cycle(q: Quipu, vertex: int) -> Cycle:
    s = q.shape
    if vertex not in s.cycle_of:
        raise NoSuchCycle(f"vertex {vertex} is not on a cycle")
    return s.cycles[s.cycle_of[vertex]]


def zone(q: Quipu, v: int) -> int:
    return len(q.shape.path_cycles[v])


def cover(q: Quipu, v: int) -> SemiLinearTerm:
    """Displacements of all rooted walks ending at `v`."""
    s = q.shape
    if v not in s.path_cycles:
        raise InvalidQuipu(f"vertex {v} is unreachable")
    cyc = s.path_cycles[v]
    if len(cyc) > 2:
        raise InvalidQuipu(f"vertex {v} lies after more than two cycles")
    gens = tuple(s.cycles[c].displacement for c in cyc)
    try:
        return SemiLinearTerm(s.base[v], gens)
    except ValueError as exc:
        raise InvalidQuipu(f"cover of {v}: {exc}") from exc


def covers(q: Quipu) -> dict[int, SemiLinearTerm]:
    return {v: cover(q, v) for v in q.shape.order}


def validate(q: Quipu, tas: TAS | None = None, window: Window | None = None) -> list[str]:
    """Violations of the quipu conditions; an empty list means valid.

    Cover disjointness is exact except for plane pairs whose recession
    cones overlap, which are checked on `window` (default 61x61).
    """
    s = q.shape
    problems = list(s.problems)
    if tas is not None:
        if q.labels[q.root] != tas.seed.name:
            problems.append("root is not labelled by the seed")
        tiles = tas.by_name
        for u, v, d in q.arcs:
            if q.labels[u] not in tiles or q.labels[v] not in tiles:
                problems.append(f"arc {u}->{v} uses an unknown tile")
            elif not glues_match(tiles[q.labels[u]], d, tiles[q.labels[v]]):
                problems.append(f"glue mismatch on arc {u}-{d}->{v}")
    if problems:
        return problems
    try:
        terms = covers(q)
    except InvalidQuipu as exc:
        return [str(exc)]
    window = window or Window.square(30, 0)
    for (u, tu), (v, tv) in combinations(terms.items(), 2):
        r = intersect_terms(tu, tv, window)
        if r.kind in ("finite", "terms") or (r.kind == "unknown" and r.window_points):
            problems.append(f"covers of {u} and {v} intersect")
    return problems


def vertex_at(q: Quipu, point: Vec2) -> int | None:
    for v in q.shape.order:
        if term_contains(cover(q, v), point):
            return v
    return None


def alpha_within(q: Quipu, window: Window) -> Assembly:
    """Placements generated by the quipu inside `window`."""
    out: dict[Vec2, str] = {}
    for v in q.shape.order:
        for p in term_points(cover(q, v), window):
            out[p] = q.labels[v]
    return Assembly(out)


def alpha_by_walks(q: Quipu, window: Window, max_len: int) -> Assembly:
    """Walk-by-walk materialization; independent of the cover computation."""
    out: dict[Vec2, str] = {}
    out_arcs: dict[int, list[tuple[int, str]]] = {}
    for u, v, d in q.arcs:
        out_arcs.setdefault(u, []).append((v, d))
    stack = [(q.root, (0, 0), 0)]
    seen = set()
    while stack:
        v, p, n = stack.pop()
        if (v, p) in seen:
            continue
        seen.add((v, p))
        if p in window:
            out[p] = q.labels[v]
        if n == max_len:
            continue
        for w, d in out_arcs.get(v, ()):
            stack.append((w, vadd(p, VECTORS[d]), n + 1))
    return Assembly(out)


def _copy_subtree(q: Quipu, draft: Draft, top: int) -> int:
    """Copy everything reachable from `top` into `draft`; returns the copy of `top`."""
    s = q.shape
    members = []
    stack = [top]
    while stack:
        v = stack.pop()
        if v in members:
            continue
        members.append(v)
        stack.extend(s.out[v].values())
    members.sort(key=s.order.index)
    mapping = {v: draft.add_vertex(q.labels[v], v) for v in members}
    for u, v, d in q.arcs:
        if u in mapping:
            draft.arcs.append((mapping[u], mapping[v], d))
    return mapping[top]


def _unroll_once(q: Quipu, vertex: int) -> Quipu:
    c = find_cycle(q, vertex)
    xc = c.entry
    members = set(c.vertices)
    draft = q.draft()
    x = draft.add_vertex(q.labels[xc], xc)
    nxt = c.vertices[1] if len(c.vertices) > 1 else xc
    arcs = []
    for u, v, d in draft.arcs:
        if v == xc and u not in members:
            arcs.append((u, x, d))
        else:
            arcs.append((u, v, d))
    draft.arcs = arcs
    draft.arcs.append((x, nxt, c.word[0]))
    for d, w in sorted(q.shape.out[xc].items()):
        if w not in members:
            draft.arcs.append((x, _copy_subtree(q, draft, w), d))
    return draft.freeze()


def unroll(q: Quipu, cycle: int, steps: int = 1) -> Quipu:
    """Apply `steps` one-step unrollings to the cycle through vertex `cycle`."""
    if steps < 1:
        raise ValueError("steps must be positive")
    find_cycle(q, cycle)
    for _ in range(steps):
        q = _unroll_once(q, cycle)
    return q


def full_unroll(q: Quipu, cycle: int) -> Quipu:
    return unroll(q, cycle, len(find_cycle(q, cycle).vertices))


def k_multiple(q: Quipu, cycle: int, k: int) -> Quipu:
    """Replace the cycle through vertex `cycle` by k consecutive copies of itself."""
    if k < 2:
        raise ValueError("k must be at least 2")
    c = find_cycle(q, cycle)
    s = q.shape
    members = set(c.vertices)
    xs = c.vertices
    draft = q.draft()
    copies = [list(xs)]
    for j in range(1, k):
        layer = []
        for v in xs:
            layer.append(draft.add_vertex(q.labels[v], v))
        copies.append(layer)
        for v, cv in zip(xs, layer):
            for d, w in sorted(s.out[v].items()):
                if w not in members:
                    draft.arcs.append((cv, _copy_subtree(q, draft, w), d))
        for i in range(len(xs) - 1):
            draft.arcs.append((layer[i], layer[i + 1], c.word[i]))
    last = c.word[-1]
    draft.arcs.remove((xs[-1], xs[0], last))
    for j in range(k):
        target = copies[j + 1][0] if j + 1 < k else xs[0]
        draft.arcs.append((copies[j][-1], target, last))
    return draft.freeze()


@dataclass(frozen=True)
class Tooth:
    connector: str
    word: str
    entry: int


@dataclass(frozen=True)
class Comb:
    transient: str
    backbone: str
    entry: int
    teeth: tuple[Tooth, ...]
    decorations: tuple[str, ...]


@dataclass(frozen=True)
class CombReport:
    combs: tuple[Comb, ...]
    decorations: tuple[str, ...]


def structure_report(q: Quipu) -> CombReport:
    s = q.shape
    if s.problems:
        raise InvalidQuipu("; ".join(s.problems))
    leaves = [v for v in s.order if not s.out[v]]
    top_decor = []
    combs = []
    for ci, c in enumerate(s.cycles):
        if len(s.path_cycles[c.entry]) != 1:
            continue
        teeth, decor = [], []
        for tj, t in enumerate(s.cycles):
            pc = s.path_cycles[t.entry]
            if len(pc) == 2 and pc[0] == ci:
                path = s.tree_path(t.entry)
                last = max(i for i, v in enumerate(path) if s.cycle_of.get(v) == ci)
                conn = s.word_to(t.entry)[last:]
                teeth.append(Tooth(conn, t.word, t.entry))
        for leaf in leaves:
            pc = s.path_cycles[leaf]
            if not pc or pc[0] != ci:
                continue
            path = s.tree_path(leaf)
            last = max(i for i, v in enumerate(path) if v in s.cycle_of)
            decor.append(s.word_to(leaf)[last:])
        bb = c.displacement
        for sign in (1, -1):
            n = sum(1 for t in teeth if (cross(bb, displacement(t.word)) > 0) == (sign > 0))
            if n > len(c.word):
                raise InvalidQuipu(f"{n} teeth on one side of a backbone of period {len(c.word)}")
        combs.append(Comb(s.word_to(c.entry), c.word, c.entry, tuple(teeth), tuple(sorted(decor))))
    for leaf in leaves:
        if not s.path_cycles[leaf] and leaf != q.root:
            top_decor.append(s.word_to(leaf))
    return CombReport(tuple(combs), tuple(sorted(top_decor)))


def to_document(q: Quipu) -> dict[str, Any]:
    terms = covers(q)
    return {
        "vertices": [{"id": v, "tile": q.labels[v], "zone": f"Z{zone(q, v)}"}
                     for v in range(len(q))],
        "arcs": [{"from": u, "to": v, "dir": d} for u, v, d in q.arcs],
        "root": q.root,
        "covers": [{"vertex": v, **terms[v].to_document()} for v in sorted(terms)],
    }


def from_document(doc: dict[str, Any]) -> Quipu:
    verts = sorted(doc["vertices"], key=lambda v: v["id"])
    if [v["id"] for v in verts] != list(range(len(verts))):
        raise InvalidQuipu("vertex ids must be 0..n-1")
    arcs = tuple((a["from"], a["to"], a["dir"]) for a in doc["arcs"])
    return Quipu(tuple(v["tile"] for v in verts), arcs, doc.get("root", 0))


def to_dot(q: Quipu) -> str:
    lines = ["digraph quipu {", "  node [shape=box];"]
    for v in range(len(q)):
        style = ", peripheries=2" if v == q.root else ""
        lines.append(f'  v{v} [label="{q.labels[v]}"{style}];')
    for u, v, d in q.arcs:
        lines.append(f'  v{u} -> v{v} [label="{d}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def build(labels: Iterable[str], arcs: Iterable[tuple[int, int, str]]) -> Quipu:
    return Quipu(tuple(labels), tuple(arcs))
