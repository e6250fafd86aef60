"""Temperature-1 tile assembly: tiles, systems, maximal assemblies, confluence."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .paths import OPPOSITE, VECTORS, Vec2, Window, is_simple, points, pump_check

SIDES = {"N": "north", "E": "east", "S": "south", "W": "west"}


class ParseError(ValueError):
    pass


class DuplicateTileName(ValueError):
    pass


class UnknownSeed(ValueError):
    pass


class PointNotInAssembly(KeyError):
    pass


class NotConfluent(RuntimeError):
    """Two distinct tiles can be placed at the same position."""

    def __init__(self, point: Vec2, tiles: tuple[str, str]):
        super().__init__(f"not confluent at {point}: tiles {tiles[0]} and {tiles[1]}")
        self.point = point
        self.tiles = tiles


@dataclass(frozen=True)
class TileType:
    name: str
    north: str | None = None
    east: str | None = None
    south: str | None = None
    west: str | None = None

    def glue(self, d: str) -> str | None:
        g = getattr(self, SIDES[d])
        return g or None

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"name": self.name}
        for d in "NESW":
            g = self.glue(d)
            if g is not None:
                doc[SIDES[d]] = g
        return doc


def glues_match(t: TileType, d: str, t2: TileType) -> bool:
    g = t.glue(d)
    return g is not None and g == t2.glue(OPPOSITE[d])


@dataclass(frozen=True)
class TAS:
    tiles: tuple[TileType, ...]
    seed: TileType
    seed_in_tileset: bool = False
    glues: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        names = [t.name for t in self.tiles]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise DuplicateTileName(f"duplicate tile names: {sorted(dup)}")
        if self.seed_in_tileset and self.seed.name not in names:
            raise UnknownSeed(f"seed {self.seed.name!r} is not in the tile set")
        if not self.seed_in_tileset and self.seed.name in names:
            raise DuplicateTileName(f"seed name {self.seed.name!r} clashes with a tile")

    @property
    def by_name(self) -> dict[str, TileType]:
        out = {t.name: t for t in self.tiles}
        out.setdefault(self.seed.name, self.seed)
        return out

    def attachable(self, d: str, glue: str) -> list[TileType]:
        """Tiles whose side facing back along `d` carries `glue`."""
        back = OPPOSITE[d]
        return [t for t in self.tiles if t.glue(back) == glue]

    def to_document(self) -> dict[str, Any]:
        return {
            "glues": list(self.glues),
            "tiles": [t.to_document() for t in self.tiles],
            "seed": self.seed.name if self.seed_in_tileset else self.seed.to_document(),
            "seed_in_tileset": self.seed_in_tileset,
        }


def _tile(doc: Any, glues: set[str] | None) -> TileType:
    if not isinstance(doc, dict) or not isinstance(doc.get("name"), str):
        raise ParseError(f"tile must be an object with a string name: {doc!r}")
    extra = set(doc) - {"name", *SIDES.values()}
    if extra:
        raise ParseError(f"unknown tile fields {sorted(extra)}")
    sides = {}
    for side in SIDES.values():
        g = doc.get(side)
        if g is not None and not isinstance(g, str):
            raise ParseError(f"glue on {side} of {doc['name']} must be a string")
        if g and glues is not None and g not in glues:
            raise ParseError(f"undeclared glue {g!r} on tile {doc['name']}")
        sides[side] = g or None
    return TileType(doc["name"], **sides)


def load_tas(source: str | Path | Mapping[str, Any]) -> TAS:
    """Build a TAS from a JSON document, a JSON string, or a file path."""
    if isinstance(source, Mapping):
        doc = source
    else:
        text = str(source)
        if isinstance(source, Path) or not text.lstrip().startswith("{"):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ParseError(f"cannot read {source}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    if not isinstance(doc, Mapping) or "tiles" not in doc or "seed" not in doc:
        raise ParseError("document needs 'tiles' and 'seed'")
    glues = doc.get("glues")
    if glues is not None and (not isinstance(glues, list)
                              or not all(isinstance(g, str) for g in glues)):
        raise ParseError("'glues' must be a list of strings")
    declared = set(glues) if glues is not None else None
    if not isinstance(doc["tiles"], list):
        raise ParseError("'tiles' must be a list")
    tiles = [_tile(t, declared) for t in doc["tiles"]]
    names = [t.name for t in tiles]
    if len(set(names)) != len(names):
        raise DuplicateTileName("duplicate tile names")
    seed_doc = doc["seed"]
    if isinstance(seed_doc, str):
        found = [t for t in tiles if t.name == seed_doc]
        if not found:
            raise UnknownSeed(f"no tile named {seed_doc!r}")
        seed = found[0]
        in_set = bool(doc.get("seed_in_tileset", True))
        if not in_set:
            tiles = [t for t in tiles if t.name != seed_doc]
    else:
        seed = _tile(seed_doc, declared)
        in_set = bool(doc.get("seed_in_tileset", False))
        if in_set:
            same = [t for t in tiles if t.name == seed.name]
            if not same:
                tiles.append(seed)
            elif same[0] != seed:
                raise DuplicateTileName(f"inline seed {seed.name!r} differs from tile")
    return TAS(tuple(tiles), seed, in_set, tuple(glues or ()))


@dataclass
class Assembly:
    placements: dict[Vec2, str] = field(default_factory=dict)

    def __contains__(self, p: object) -> bool:
        return p in self.placements

    def __getitem__(self, p: Vec2) -> str:
        return self.placements[p]

    def __len__(self) -> int:
        return len(self.placements)

    def get(self, p: Vec2) -> str | None:
        return self.placements.get(p)

    @property
    def domain(self) -> set[Vec2]:
        return set(self.placements)

    def crop(self, window: Window) -> "Assembly":
        return Assembly({p: t for p, t in self.placements.items() if p in window})

    def binding_graph(self, tas: TAS) -> dict[Vec2, list[Vec2]]:
        tiles = tas.by_name
        adj: dict[Vec2, list[Vec2]] = {p: [] for p in self.placements}
        for p, name in self.placements.items():
            t = tiles[name]
            for d, (dx, dy) in VECTORS.items():
                q = (p[0] + dx, p[1] + dy)
                other = self.placements.get(q)
                if other is not None and glues_match(t, d, tiles[other]):
                    adj[p].append(q)
        return adj


@dataclass
class Growth:
    """Result of the synchronous fixpoint on an enlarged window."""

    placements: dict[Vec2, str]
    rounds: dict[Vec2, int]
    region: Window


def _grow(tas: TAS, region: Window) -> Growth:
    placements = {(0, 0): tas.seed.name}
    rounds = {(0, 0): 0}
    tiles = tas.by_name
    frontier = [(0, 0)]
    r = 0
    while frontier:
        r += 1
        offers: dict[Vec2, set[str]] = {}
        for p in frontier:
            t = tiles[placements[p]]
            for d, (dx, dy) in VECTORS.items():
                g = t.glue(d)
                if g is None:
                    continue
                q = (p[0] + dx, p[1] + dy)
                if q in placements or q not in region:
                    continue
                for u in tas.attachable(d, g):
                    offers.setdefault(q, set()).add(u.name)
        frontier = []
        for q in sorted(offers):
            names = sorted(offers[q])
            if len(names) > 1:
                raise NotConfluent(q, (names[0], names[1]))
            placements[q] = names[0]
            rounds[q] = r
            frontier.append(q)
    return Growth(placements, rounds, region)


def _separators(adj: Mapping[Vec2, list[Vec2]], root: Vec2):
    """Iterative DFS giving entry times, subtree exits and low-links."""
    tin: dict[Vec2, int] = {root: 0}
    low: dict[Vec2, int] = {root: 0}
    tout: dict[Vec2, int] = {}
    parent: dict[Vec2, Vec2 | None] = {root: None}
    timer = 1
    stack = [(root, iter(adj[root]))]
    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w not in tin:
                tin[w] = low[w] = timer
                timer += 1
                parent[w] = v
                stack.append((w, iter(adj[w])))
                advanced = True
                break
            if w != parent[v]:
                low[v] = min(low[v], tin[w])
        if not advanced:
            stack.pop()
            tout[v] = timer
            u = parent[v]
            if u is not None:
                low[u] = min(low[u], low[v])
    return tin, tout, low, parent


def _separates(v: Vec2, n: Vec2, root: Vec2, dfs) -> bool:
    """True if every path from `root` to `n` passes through `v`."""
    tin, tout, low, parent = dfs
    if v == root:
        return n != root
    if not (tin[v] < tin[n] < tout[v]):
        return False
    # child c of v on the tree path to n
    c = n
    while parent[c] != v:
        c = parent[c]
    return low[c] >= tin[v]


def check_confluence(tas: TAS, growth: Growth) -> None:
    """Raise NotConfluent if some placed tile could have been beaten by another.

    A neighbor `n` offering tile Y at a position `p` that holds X != Y is a
    conflict when `n` can be placed before `p` in some producible order:
    either it was placed earlier in the synchronous growth, or some
    assembly path reaches `n` without passing through `p`.
    """
    placements, rounds = growth.placements, growth.rounds
    tiles = tas.by_name
    asm = Assembly(placements)
    adj = asm.binding_graph(tas)
    dfs = _separators(adj, (0, 0))
    hits = []
    for p, name in placements.items():
        if p == (0, 0):
            continue
        for d, (dx, dy) in VECTORS.items():
            n = (p[0] - dx, p[1] - dy)  # neighbor on the side opposite to d
            other = placements.get(n)
            if other is None:
                continue
            g = tiles[other].glue(d)
            if g is None:
                continue
            for u in tas.attachable(d, g):
                if u.name == name:
                    continue
                if rounds[n] < rounds[p] or not _separates(p, n, (0, 0), dfs):
                    hits.append((rounds[p], p, tuple(sorted((name, u.name)))))
    if hits:
        _, p, pair = min(hits)
        raise NotConfluent(p, pair)


def grow_max(tas: TAS, window: Window, check: bool = True) -> Assembly:
    """Maximal assembly grown in ``window`` enlarged by its margin, cropped to ``window``."""
    growth = _grow(tas, window.expanded())
    if check:
        check_confluence(tas, growth)
    return Assembly(growth.placements).crop(window)


def path_assembles(tas: TAS, word: str) -> list[str] | None:
    """Tiles placed along ``(0,0).word`` (seed excluded), or None."""
    if not is_simple(word):
        return None
    n = len(word)
    # alive[i]: tiles that can sit at point i and still complete the path
    alive: list[set[str]] = [set() for _ in range(n + 1)]
    alive[n] = {t.name for t in tas.tiles}
    for i in range(n - 1, 0, -1):
        for t in tas.tiles:
            g = t.glue(word[i])
            if g is not None and any(u.name in alive[i + 1] for u in tas.attachable(word[i], g)):
                alive[i].add(t.name)
    out = []
    cur = tas.seed
    for i, d in enumerate(word):
        g = cur.glue(d)
        nxt = None
        if g is not None:
            nxt = next((u for u in tas.attachable(d, g) if u.name in alive[i + 1]), None)
        if nxt is None:
            return None
        out.append(nxt.name)
        cur = nxt
    return out


def pumping_length(m: str, p: str, tas: TAS) -> int:
    return max(len(m), 2) + len(tas.tiles) + 1


def candidate_in_alphamax(tas: TAS, m: str, p: str) -> bool:
    """Whether ``0.m p^ω`` certainly lies in the maximal assembly.

    Requires ``p.p`` simple, and ``m p^R`` simple and assembling with R
    large enough for the tile sequence along the period to repeat.
    """
    if not p:
        raise ValueError("period must be non-empty")
    if not pump_check(p):
        return False
    word = m + p * pumping_length(m, p, tas)
    return path_assembles(tas, word) is not None


def non_causal(tas: TAS, x: Vec2, window: Window) -> set[Vec2]:
    """Points y of the window assembly such that some assembly path reaches x avoiding y."""
    growth = _grow(tas, window.expanded())
    asm = Assembly(growth.placements)
    if x not in window or x not in asm:
        raise PointNotInAssembly(x)
    adj = asm.binding_graph(tas)
    dom = [p for p in asm.placements if p in window]
    if x == (0, 0):
        return set(dom)
    path = _bfs_path(adj, (0, 0), x)
    causal = {(0, 0)}
    for v in path[1:-1]:
        if _bfs_path(adj, (0, 0), x, avoid=v) is None:
            causal.add(v)
    return {p for p in dom if p not in causal}


def _bfs_path(adj: Mapping[Vec2, list[Vec2]], src: Vec2, dst: Vec2,
              avoid: Vec2 | None = None) -> list[Vec2] | None:
    prev: dict[Vec2, Vec2 | None] = {src: None}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            out = [v]
            while prev[out[-1]] is not None:
                out.append(prev[out[-1]])  # type: ignore[arg-type]
            return out[::-1]
        for w in adj[v]:
            if w != avoid and w not in prev:
                prev[w] = v
                queue.append(w)
    return None


def shortest_paths(tas: TAS, asm: Assembly) -> dict[Vec2, tuple[int, Vec2 | None]]:
    """BFS tree of the binding graph from the origin: point -> (distance, parent)."""
    adj = asm.binding_graph(tas)
    out: dict[Vec2, tuple[int, Vec2 | None]] = {(0, 0): (0, None)}
    queue = deque([(0, 0)])
    while queue:
        v = queue.popleft()
        for w in sorted(adj[v]):
            if w not in out:
                out[w] = (out[v][0] + 1, v)
                queue.append(w)
    return out


def tiles_along(asm: Assembly, word: str, start: Vec2 = (0, 0)) -> list[str | None]:
    return [asm.get(p) for p in points(word, start)[1:]]
