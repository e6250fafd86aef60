"""Left/right regions of bi-infinite paths, co-growth, and off-the-wall analysis."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping

from .paths import (
    OPPOSITE,
    VECTORS,
    UltimatelyPeriodic,
    Vec2,
    Window,
    bounding_window,
    displacement,
    is_simple,
    parse_periodic,
    points,
    word_of,
)

# clockwise successor of each direction
CW_NEXT = {"E": "S", "S": "W", "W": "N", "N": "E"}


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"
    ON = "on"


class WindowTooSmall(RuntimeError):
    pass


class Blocked(RuntimeError):
    def __init__(self, n: int, prefix: str):
        super().__init__(f"co-growth blocked at step {n} after {prefix!r}")
        self.n = n
        self.prefix = prefix


class ValuationMismatch(ValueError):
    pass


@dataclass(frozen=True)
class BiInfinitePath:
    """``backward . anchor . forward``.

    `backward` is the word read from the anchor outwards: ``|W`` puts the
    left-infinite half on the ray west of the anchor, arriving heading east.
    """

    backward: UltimatelyPeriodic
    anchor: Vec2
    forward: UltimatelyPeriodic

    @classmethod
    def of(cls, backward: str, anchor: Vec2, forward: str) -> "BiInfinitePath":
        return cls(parse_periodic(backward), anchor, parse_periodic(forward))


def _gone_bound(window: Window, v: Vec2) -> int:
    corners = [(window.x_min, window.y_min), (window.x_min, window.y_max),
               (window.x_max, window.y_min), (window.x_max, window.y_max)]
    return max(c[0] * v[0] + c[1] * v[1] for c in corners)


def _walk(start: Vec2, letter, transient: int, period: int, v: Vec2,
          window: Window) -> list[tuple[Vec2, str]]:
    """Walk from `start` until the path has left `window` for good.

    Returns (point, letter used to reach it) pairs, excluding `start`.
    """
    if v == (0, 0):
        raise ValueError("period with null displacement never leaves the window")
    bound = _gone_bound(window, v)
    spread = period * (abs(v[0]) + abs(v[1]))
    out = []
    x, y = start
    i = 0
    while True:
        if i >= transient and (i - transient) % period == 0:
            if x * v[0] + y * v[1] - spread > bound:
                return out
        c = letter(i)
        dx, dy = VECTORS[c]
        x += dx
        y += dy
        out.append(((x, y), c))
        i += 1


def trace(bp: BiInfinitePath, window: Window) -> tuple[list[Vec2], str]:
    """Points of `bp` relevant to `window`, in path order, with connecting letters."""
    fw, bw = bp.forward, bp.backward
    fwd = _walk(bp.anchor, fw.letter, len(fw.transient), len(fw.period),
                displacement(fw.period), window)
    bwd = _walk(bp.anchor, bw.letter, len(bw.transient), len(bw.period),
                displacement(bw.period), window)
    pts = [p for p, _ in reversed(bwd)] + [bp.anchor] + [p for p, _ in fwd]
    letters = "".join(OPPOSITE[c] for _, c in reversed(bwd)) + "".join(c for _, c in fwd)
    if len(set(pts)) != len(pts):
        raise ValueError("bi-infinite path is not simple inside the window")
    return pts, letters


def _side_dirs(incoming: str, outgoing: str) -> tuple[list[str], list[str]]:
    """Neighbor directions on the right and on the left of a path vertex."""
    back = OPPOSITE[incoming]
    right, left = [], []
    d = CW_NEXT[outgoing]
    while d != back:
        right.append(d)
        d = CW_NEXT[d]
    d = CW_NEXT[back]
    while d != outgoing:
        left.append(d)
        d = CW_NEXT[d]
    return right, left


def _seeds(pts: list[Vec2], letters: str, window: Window) -> Iterator[tuple[Vec2, Side]]:
    for k in range(1, len(pts) - 1):
        p = pts[k]
        if p not in window:
            continue
        right, left = _side_dirs(letters[k - 1], letters[k])
        for dirs, side in ((right, Side.RIGHT), (left, Side.LEFT)):
            for d in dirs:
                dx, dy = VECTORS[d]
                yield (p[0] + dx, p[1] + dy), side


def classify(bp: BiInfinitePath, window: Window) -> dict[Vec2, Side]:
    """Label every point of `window` reachable from the path by its side."""
    pts, letters = trace(bp, window)
    on = set(pts)
    label: dict[Vec2, Side] = {p: Side.ON for p in pts if p in window}
    queue: deque[Vec2] = deque()
    for q, side in _seeds(pts, letters, window):
        if q in on or q not in window:
            continue
        prev = label.get(q)
        if prev is None:
            label[q] = side
            queue.append(q)
        elif prev is not side:
            raise WindowTooSmall(f"point {q} seen on both sides")
    while queue:
        p = queue.popleft()
        side = label[p]
        x, y = p
        for q in ((x + 1, y), (x, y + 1), (x, y - 1), (x - 1, y)):
            if q not in window or q in on:
                continue
            prev = label.get(q)
            if prev is None:
                label[q] = side
                queue.append(q)
            elif prev is not side:
                raise WindowTooSmall(f"point {q} seen on both sides")
    return label


def side_of(bp: BiInfinitePath, point: Vec2, window: Window) -> Side:
    if point not in window:
        raise WindowTooSmall(f"{point} is outside the window")
    label = classify(bp, window).get(point)
    if label is None:
        raise WindowTooSmall(f"flood from {point} never reaches the path")
    return label


def region_mask(bp: BiInfinitePath, side: Side, window: Window) -> set[Vec2]:
    """Closed region (path included) on `side` of `bp`, restricted to `window`."""
    return {p for p, s in classify(bp, window).items() if s is side or s is Side.ON}


def _rank(incoming: str, d: str) -> int:
    """Position of `d` in clockwise order starting at the reverse of `incoming`."""
    k, cur = 0, OPPOSITE[incoming]
    while cur != d:
        cur = CW_NEXT[cur]
        k += 1
    return k


def cogrow(b1, f1, b2, f2, side: Side = Side.RIGHT, max_steps: int = 32,
           window: Window | None = None) -> str:
    """Co-growth of ``b1.f1`` and ``b2.f2`` anchored at the origin.

    Both inputs share the anchor (0, 0). At each point the walk may use any
    edge of f1 or f2 leaving that point; it keeps to the closed `side`
    regions of both inputs, never revisits a point, and prefers the
    right-most (or left-most) candidate. The walk ends after `max_steps`
    letters or when it would leave the window.
    """
    b1, f1, b2, f2 = (parse_periodic(x) for x in (b1, f1, b2, f2))
    if side is Side.ON:
        raise ValueError("side must be LEFT or RIGHT")
    if f1.letter(0) != f2.letter(0):
        raise ValueError("forward paths must start with the same direction")
    if window is None:
        window = Window.square(max_steps + 1, 0)
    bps = [BiInfinitePath(b1, (0, 0), f1), BiInfinitePath(b2, (0, 0), f2)]
    masks = [region_mask(bp, side, window) for bp in bps]
    allowed = masks[0] & masks[1]
    # outgoing edges offered by each forward path, keyed by point
    offers: dict[Vec2, set[str]] = {}
    banned: set[Vec2] = set()
    for bp in bps:
        pts, letters = trace(bp, window)
        k0 = pts.index((0, 0))
        banned.update(pts[:k0])
        for k in range(k0, len(pts) - 1):
            offers.setdefault(pts[k], set()).add(letters[k])
    # heading into the anchor; only used for tie-breaking
    incoming = OPPOSITE[b1.letter(0)]
    pos: Vec2 = (0, 0)
    visited = {pos}
    out: list[str] = []
    for n in range(max_steps):
        cands = []
        for d in offers.get(pos, ()):
            dx, dy = VECTORS[d]
            nxt = (pos[0] + dx, pos[1] + dy)
            outside = nxt not in window
            if not outside and (nxt in visited or nxt in banned or nxt not in allowed):
                continue
            cands.append(d)
        if not cands:
            raise Blocked(n, "".join(out))
        key = lambda d: _rank(incoming, d)
        d = max(cands, key=key) if side is Side.RIGHT else min(cands, key=key)
        dx, dy = VECTORS[d]
        pos = (pos[0] + dx, pos[1] + dy)
        if pos not in window:
            return "".join(out)
        out.append(d)
        visited.add(pos)
        incoming = d
    return "".join(out)


@dataclass(frozen=True)
class WallCell:
    tile: str | None
    edges: frozenset[str]


@dataclass(frozen=True)
class OffTheWallReport:
    i: int
    l: int
    x_w: int
    delta: int
    y0: int
    valuation: tuple[WallCell, ...]
    area_above: int
    height: int


def _wall_path(pts: list[Vec2], i: int, l: int) -> BiInfinitePath:
    return BiInfinitePath(UltimatelyPeriodic("", "E"), pts[i],
                          UltimatelyPeriodic(word_of(pts[i:l + 1]), "W"))


def _valuation(pts: list[Vec2], x_w: int, delta: int, y0: int,
               tiles: Mapping[Vec2, str] | None) -> tuple[WallCell, ...]:
    index = {p: k for k, p in enumerate(pts)}
    cells = []
    for x in range(x_w, x_w + delta + 1):
        p = (x, y0)
        edges = set()
        k = index.get(p)
        if k is not None:
            if k > 0:
                edges.add(word_of([p, pts[k - 1]]))
            if k + 1 < len(pts):
                edges.add(word_of([p, pts[k + 1]]))
        tile = tiles.get(p) if tiles is not None else None
        cells.append(WallCell(tile, frozenset(edges)))
    return tuple(cells)


def off_the_wall_analyze(word: str, y0: int,
                         tiles: Mapping[Vec2, str] | None = None) -> OffTheWallReport | None:
    """Decompose the path ``(0,0).word`` as off-the-wall at row `y0`, if possible.

    The last point must lie on the wall. The smallest admissible start
    index `i` is chosen. `tiles` optionally supplies tile names for the
    wall valuation.
    """
    if not is_simple(word):
        raise ValueError("path must be simple")
    pts = points(word)
    l = len(pts) - 1
    x_w, yl = pts[l]
    if yl != y0 or l < 2:
        return None
    on_path = set(pts)
    xs = [p[0] for p in pts]
    east_free = lambda xi: not any((x, y0) in on_path for x in range(xi + 1, max(xs) + 1))
    west_free = not any((x, y0) in on_path for x in range(min(xs), x_w))
    if not west_free:
        return None
    for i in range(1, l):
        xi, yi = pts[i]
        if yi != y0 or xi <= x_w or not east_free(xi):
            continue
        bp = _wall_path(pts, i, l)
        window = bounding_window(pts, pad=2)
        label = classify(bp, window)
        if any(label.get(p) is not Side.LEFT for p in pts[:i]):
            continue
        delta = xi - x_w
        above = sum(1 for p, s in label.items()
                    if p[1] > y0 and s is not Side.RIGHT)
        wall = sum(1 for x in range(x_w, xi + 1)
                   if label.get((x, y0)) is not Side.RIGHT)
        height = max(p[1] for p in pts[i:l + 1]) - y0
        return OffTheWallReport(i, l, x_w, delta, y0,
                                _valuation(pts, x_w, delta, y0, tiles),
                                above + wall, height)
    return None


def combine_off_the_wall(word1: str, word2: str, y0: int, max_steps: int = 64,
                         tiles1: Mapping[Vec2, str] | None = None,
                         tiles2: Mapping[Vec2, str] | None = None) -> str:
    """Right co-growth of the above-the-wall parts of two off-the-wall paths.

    Both parts are re-anchored at their start point on the wall and
    continued by ``W^ω``; the result is the first `max_steps` letters.
    """
    r1 = off_the_wall_analyze(word1, y0, tiles1)
    r2 = off_the_wall_analyze(word2, y0, tiles2)
    if r1 is None or r2 is None:
        raise ValueError("both paths must be off-the-wall at this row")
    if r1.valuation != r2.valuation:
        raise ValuationMismatch("wall valuations differ")
    up1 = UltimatelyPeriodic(word1[r1.i:r1.l], "W")
    up2 = UltimatelyPeriodic(word2[r2.i:r2.l], "W")
    wall = UltimatelyPeriodic("", "E")
    reach = max(r1.l - r1.i, r2.l - r2.i) + 2
    window = Window.square(max(max_steps, reach) + 1, 0)
    return cogrow(wall, up1, wall, up2, Side.RIGHT, max_steps, window)


def points_of_interest(word: str, y0: int, start: Vec2 = (0, 0)) -> list[int]:
    """Indices k > 0 on or above the wall whose eastward ray misses the path."""
    pts = points(word, start)
    rows: dict[int, int] = {}
    for x, y in pts:
        rows[y] = max(rows.get(y, x), x)
    return [k for k, (x, y) in enumerate(pts)
            if k > 0 and y >= y0 and rows[y] == x]
