"""Words over the four lattice directions and their geometry."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Vec2 = tuple[int, int]

VECTORS: dict[str, Vec2] = {"E": (1, 0), "N": (0, 1), "S": (0, -1), "W": (-1, 0)}
OPPOSITE = {"E": "W", "W": "E", "N": "S", "S": "N"}
# counter-clockwise order
CCW = "WNES"
DEFAULT_ORDER = "SEWN"


class EmptyWord(ValueError):
    pass


class Direction(str, Enum):
    E = "E"
    N = "N"
    S = "S"
    W = "W"

    @property
    def vector(self) -> Vec2:
        return VECTORS[self.value]

    @property
    def opposite(self) -> "Direction":
        return Direction(OPPOSITE[self.value])


class Transform(Enum):
    REVERSE = "reverse"
    BACKWARD = "backward"
    REVERSE_BACKWARD = "reverse-backward"


def vadd(a: Vec2, b: Vec2) -> Vec2:
    return (a[0] + b[0], a[1] + b[1])


def vsub(a: Vec2, b: Vec2) -> Vec2:
    return (a[0] - b[0], a[1] - b[1])


def vscale(k: int, a: Vec2) -> Vec2:
    return (k * a[0], k * a[1])


def cross(a: Vec2, b: Vec2) -> int:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Vec2, b: Vec2) -> int:
    return a[0] * b[0] + a[1] * b[1]


def step(point: Vec2, letter: str) -> Vec2:
    d = VECTORS[letter]
    return (point[0] + d[0], point[1] + d[1])


def check_word(word: str) -> str:
    bad = set(word) - set(VECTORS)
    if bad:
        raise ValueError(f"invalid direction letters {sorted(bad)} in {word!r}")
    return word


def displacement(word: str) -> Vec2:
    x = y = 0
    for c in word:
        dx, dy = VECTORS[c]
        x += dx
        y += dy
    return (x, y)


def transform(word: str, mode: Transform | str) -> str:
    mode = Transform(mode)
    if mode is Transform.REVERSE:
        return word[::-1]
    if mode is Transform.BACKWARD:
        return "".join(OPPOSITE[c] for c in word)
    return "".join(OPPOSITE[c] for c in reversed(word))


def points(word: str, start: Vec2 = (0, 0)) -> list[Vec2]:
    """Prefix-sum points of `word` starting at `start` (len(word) + 1 points)."""
    out = [start]
    x, y = start
    for c in word:
        dx, dy = VECTORS[c]
        x += dx
        y += dy
        out.append((x, y))
    return out


def is_simple(word: str, start: Vec2 = (0, 0)) -> bool:
    pts = points(word, start)
    return len(set(pts)) == len(pts)


def pump_check(word: str) -> bool:
    if not word:
        raise EmptyWord("pump_check needs a non-empty word")
    return is_simple(word + word)


def rotations(word: str) -> set[str]:
    if not word:
        raise EmptyWord("rotations of the empty word")
    return {word[i:] + word[:i] for i in range(len(word))}


def order_key(word: str, order: str = DEFAULT_ORDER) -> tuple[int, ...]:
    rank = {c: i for i, c in enumerate(order)}
    return tuple(rank[c] for c in word)


@dataclass(frozen=True)
class Ribbon:
    """Points x with a <= nu.x <= b."""

    a: Fraction
    b: Fraction
    nu: Vec2

    def __post_init__(self) -> None:
        if self.nu == (0, 0):
            raise ValueError("ribbon direction must be non-null")
        norm_sq = dot(self.nu, self.nu)
        # a + |nu| <= b, compared without square roots
        gap = Fraction(self.b) - Fraction(self.a)
        if gap < 0 or gap * gap < norm_sq:
            raise ValueError("ribbon too thin: need a + |nu| <= b")


def in_ribbon(point: Vec2, r: Ribbon) -> bool:
    v = dot(point, r.nu)
    return Fraction(r.a) <= v <= Fraction(r.b)


@dataclass(frozen=True)
class UltimatelyPeriodic:
    """The infinite word transient . period^omega."""

    transient: str
    period: str

    def __post_init__(self) -> None:
        check_word(self.transient)
        check_word(self.period)
        if not self.period:
            raise EmptyWord("period must be non-empty")

    @classmethod
    def parse(cls, text: str) -> "UltimatelyPeriodic":
        if "|" not in text:
            raise ValueError(f"expected 'm|p', got {text!r}")
        m, p = text.split("|", 1)
        return cls(m, p)

    def __str__(self) -> str:
        return f"{self.transient}|{self.period}"

    def letter(self, i: int) -> str:
        m = self.transient
        if i < len(m):
            return m[i]
        return self.period[(i - len(m)) % len(self.period)]

    def prefix(self, n: int) -> str:
        return "".join(self.letter(i) for i in range(n))

    def letters(self) -> Iterator[str]:
        i = 0
        while True:
            yield self.letter(i)
            i += 1

    def pretty(self) -> str:
        return f"{self.transient}{self.period}^ω"


def parse_periodic(text: str | UltimatelyPeriodic) -> UltimatelyPeriodic:
    if isinstance(text, UltimatelyPeriodic):
        return text
    return UltimatelyPeriodic.parse(text)


def backward_points(path: UltimatelyPeriodic, anchor: Vec2, n: int) -> list[Vec2]:
    """The `n` points preceding `anchor` on a left-infinite path, nearest first.

    A left-infinite path is stored by the word read outwards from its
    anchor, so ``|W`` is the ray arriving at the anchor from the west.
    """
    return points(path.prefix(n), anchor)[1:]


@dataclass(frozen=True)
class GroundedPath:
    anchor: Vec2
    word: str

    def points(self) -> list[Vec2]:
        return points(self.word, self.anchor)

    @property
    def end(self) -> Vec2:
        return vadd(self.anchor, displacement(self.word))

    def is_valid(self) -> bool:
        return is_simple(self.word, self.anchor)


@dataclass(frozen=True)
class Window:
    """Axis-aligned box of lattice points, inclusive bounds."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int
    margin: int = 8

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("empty window")

    @classmethod
    def square(cls, r: int, margin: int = 8) -> "Window":
        return cls(-r, r, -r, r, margin)

    def __contains__(self, p: object) -> bool:
        x, y = p  # type: ignore[misc]
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def expanded(self, k: int | None = None) -> "Window":
        k = self.margin if k is None else k
        return Window(self.x_min - k, self.x_max + k, self.y_min - k, self.y_max + k, 0)

    def points(self) -> Iterator[Vec2]:
        for y in range(self.y_min, self.y_max + 1):
            for x in range(self.x_min, self.x_max + 1):
                yield (x, y)

    @property
    def size(self) -> int:
        return (self.x_max - self.x_min + 1) * (self.y_max - self.y_min + 1)


def bounding_window(pts: Iterable[Vec2], pad: int = 0) -> Window:
    xs, ys = [], []
    for x, y in pts:
        xs.append(x)
        ys.append(y)
    return Window(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad, 0)


def neighbors(p: Vec2) -> list[Vec2]:
    x, y = p
    return [(x + 1, y), (x, y + 1), (x, y - 1), (x - 1, y)]


def direction_between(a: Vec2, b: Vec2) -> str:
    d = (b[0] - a[0], b[1] - a[1])
    for k, v in VECTORS.items():
        if v == d:
            return k
    raise ValueError(f"{a} and {b} are not adjacent")


def word_of(pts: Sequence[Vec2]) -> str:
    return "".join(direction_between(a, b) for a, b in zip(pts, pts[1:]))
