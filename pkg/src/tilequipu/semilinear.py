"""Exact arithmetic on sets of the form a + N.b (+ N.c)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .paths import Vec2, Window, cross, vadd, vscale, vsub


@dataclass(frozen=True)
class SemiLinearTerm:
    base: Vec2
    gens: tuple[Vec2, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "gens", tuple(tuple(g) for g in self.gens))
        if len(self.gens) > 2:
            raise ValueError("at most two generators")
        if any(g == (0, 0) for g in self.gens):
            raise ValueError("generators must be non-null")
        if len(self.gens) == 2 and cross(*self.gens) == 0:
            raise ValueError("two generators must be non-colinear")

    @property
    def dim(self) -> int:
        return len(self.gens)

    def to_document(self) -> dict:
        return {"base": list(self.base), "gens": [list(g) for g in self.gens]}

    @classmethod
    def from_document(cls, doc: dict) -> "SemiLinearTerm":
        return cls(tuple(doc["base"]), tuple(tuple(g) for g in doc.get("gens", [])))

    def __str__(self) -> str:
        return str(self.base) + "".join(f"+N{g}" for g in self.gens)

    def translate(self, v: Vec2) -> "SemiLinearTerm":
        return SemiLinearTerm(vadd(self.base, v), self.gens)


@dataclass(frozen=True)
class SemiLinearSet:
    terms: tuple[SemiLinearTerm, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))

    def __contains__(self, p: object) -> bool:
        return contains(self, p)  # type: ignore[arg-type]

    def enumerate(self, window: Window) -> set[Vec2]:
        return enumerate_points(self, window)


def _solve2(b: Vec2, c: Vec2, v: Vec2) -> tuple[Fraction, Fraction]:
    """Coordinates (k, j) with k*b + j*c = v."""
    det = cross(b, c)
    return Fraction(cross(v, c), det), Fraction(cross(b, v), det)


def _line_param(g: Vec2, v: Vec2) -> int | None:
    """Integer k >= 0 with k*g = v, if any."""
    if cross(g, v) != 0:
        return None
    if g[0] != 0:
        k, r = divmod(v[0], g[0])
    else:
        k, r = divmod(v[1], g[1])
    if r != 0 or k < 0:
        return None
    return k


def term_contains(t: SemiLinearTerm, p: Vec2) -> bool:
    v = vsub(p, t.base)
    if t.dim == 0:
        return v == (0, 0)
    if t.dim == 1:
        return _line_param(t.gens[0], v) is not None
    k, j = _solve2(t.gens[0], t.gens[1], v)
    return k.denominator == 1 and j.denominator == 1 and k >= 0 and j >= 0


def contains(s: SemiLinearSet | SemiLinearTerm, p: Vec2) -> bool:
    terms = (s,) if isinstance(s, SemiLinearTerm) else s.terms
    return any(term_contains(t, tuple(p)) for t in terms)


def _param_range(base: Vec2, g: Vec2, window: Window) -> range:
    lo, hi = 0, None
    for b, d, wmin, wmax in ((base[0], g[0], window.x_min, window.x_max),
                             (base[1], g[1], window.y_min, window.y_max)):
        if d == 0:
            if not wmin <= b <= wmax:
                return range(0)
            continue
        a1, a2 = Fraction(wmin - b, d), Fraction(wmax - b, d)
        lo = max(lo, math.ceil(min(a1, a2)))
        top = math.floor(max(a1, a2))
        hi = top if hi is None else min(hi, top)
    return range(lo, (hi if hi is not None else lo - 1) + 1)


def term_points(t: SemiLinearTerm, window: Window) -> set[Vec2]:
    if t.dim == 0:
        return {t.base} if t.base in window else set()
    if t.dim == 1:
        g = t.gens[0]
        return {vadd(t.base, vscale(k, g)) for k in _param_range(t.base, g, window)}
    b, c = t.gens
    corners = [(window.x_min, window.y_min), (window.x_min, window.y_max),
               (window.x_max, window.y_min), (window.x_max, window.y_max)]
    ks = [_solve2(b, c, vsub(q, t.base))[0] for q in corners]
    out = set()
    for k in range(0, max(0, math.floor(max(ks))) + 1):
        a = vadd(t.base, vscale(k, b))
        for j in _param_range(a, c, window):
            out.add(vadd(a, vscale(j, c)))
    return out


def enumerate_points(s: SemiLinearSet | SemiLinearTerm | Iterable[SemiLinearTerm],
                     window: Window) -> set[Vec2]:
    if isinstance(s, SemiLinearTerm):
        terms: Iterable[SemiLinearTerm] = (s,)
    elif isinstance(s, SemiLinearSet):
        terms = s.terms
    else:
        terms = s
    out: set[Vec2] = set()
    for t in terms:
        out |= term_points(t, window)
    return out


@dataclass(frozen=True)
class Intersection:
    """Outcome of intersecting two terms.

    kind is "empty", "finite" (points), "terms" (exact union of `points`
    and `terms`), or "unknown" (only `window_points` is known).
    """

    kind: str
    points: tuple[Vec2, ...] = ()
    terms: tuple[SemiLinearTerm, ...] = ()
    window_points: frozenset[Vec2] = field(default_factory=frozenset)

    @property
    def is_empty(self) -> bool:
        return self.kind == "empty"

    def within(self, window: Window) -> set[Vec2]:
        if self.kind == "unknown":
            return {p for p in self.window_points if p in window}
        pts = {p for p in self.points if p in window}
        return pts | enumerate_points(self.terms, window)


EMPTY = Intersection("empty")


def _finite(pts: Iterable[Vec2]) -> Intersection:
    pts = sorted(set(pts))
    return Intersection("finite", tuple(pts)) if pts else EMPTY


def _primitive(v: Vec2) -> tuple[Vec2, int]:
    g = math.gcd(abs(v[0]), abs(v[1]))
    return (v[0] // g, v[1] // g), g


def _line_line(t1: SemiLinearTerm, t2: SemiLinearTerm) -> Intersection:
    (a1, (g1,)), (a2, (g2,)) = (t1.base, t1.gens), (t2.base, t2.gens)
    if cross(g1, g2) != 0:
        # a1 + k g1 = a2 + j g2
        k, j = _solve2(g1, vscale(-1, g2), vsub(a2, a1))
        if k.denominator == 1 and j.denominator == 1 and k >= 0 and j >= 0:
            return _finite([vadd(a1, vscale(int(k), g1))])
        return EMPTY
    u, s1 = _primitive(g1)
    _, s2 = _primitive(g2)
    d = vsub(a2, a1)
    if cross(u, d) != 0:
        return EMPTY
    # positions along u: a1 + (s1*k) u and a2 + (±s2*j) u, with a2 = a1 + e u
    e = d[0] // u[0] if u[0] else d[1] // u[1]
    same = (g2[0] * u[0] + g2[1] * u[1]) > 0
    if same:
        # t = s1 k = e + s2 j, t >= max(0, e)
        m = s1 * s2 // math.gcd(s1, s2)
        lo = max(0, e)
        t0 = next((t for t in range(lo, lo + m) if t % s1 == 0 and (t - e) % s2 == 0), None)
        if t0 is None:
            return EMPTY
        return Intersection("terms", (), (SemiLinearTerm(vadd(a1, vscale(t0, u)), (vscale(m, u),)),))
    # opposite directions: 0 <= t <= e
    pts = [vadd(a1, vscale(t, u)) for t in range(0, e + 1) if t % s1 == 0 and (e - t) % s2 == 0]
    return _finite(pts)


def _congruence_solutions(coefs: Sequence[tuple[int, int]], modulus: int) -> tuple[int, int] | None:
    """Smallest k0 and step M with c0 + k*c1 = 0 mod `modulus` for every (c0, c1) iff k = k0 mod M."""
    sols = [k for k in range(modulus) if all((c0 + k * c1) % modulus == 0 for c0, c1 in coefs)]
    if not sols:
        return None
    step = sols[1] - sols[0] if len(sols) > 1 else modulus
    return sols[0], step


def _line_plane(line: SemiLinearTerm, plane: SemiLinearTerm) -> Intersection:
    a1, (g,) = line.base, line.gens
    a2, (b, c) = plane.base, plane.gens
    det = cross(b, c)
    D = abs(det)
    sign = 1 if det > 0 else -1
    v0 = vsub(a1, a2)
    # x(k) = (X0 + k Xg) / det, y(k) = (Y0 + k Yg) / det
    X0, Xg = cross(v0, c), cross(g, c)
    Y0, Yg = cross(b, v0), cross(b, g)
    sol = _congruence_solutions([(X0, Xg), (Y0, Yg)], D)
    if sol is None:
        return EMPTY
    k0, step = sol
    # sign constraints: sign*(X0 + k Xg) >= 0 and sign*(Y0 + k Yg) >= 0
    lo, hi = Fraction(0), None
    for c0, c1 in ((sign * X0, sign * Xg), (sign * Y0, sign * Yg)):
        if c1 == 0:
            if c0 < 0:
                return EMPTY
        elif c1 > 0:
            lo = max(lo, Fraction(-c0, c1))
        else:
            bound = Fraction(-c0, c1)
            hi = bound if hi is None else min(hi, bound)
    first = k0 + step * max(0, math.ceil((lo - k0) / step))
    if hi is not None:
        pts = [vadd(a1, vscale(k, g)) for k in range(first, math.floor(hi) + 1, step)]
        return _finite(pts)
    return Intersection("terms", (), (SemiLinearTerm(vadd(a1, vscale(first, g)), (vscale(step, g),)),))


def _halfplanes(t: SemiLinearTerm) -> list[tuple[Vec2, int]]:
    """Constraints n.x >= r describing the real cone of a two-generator term."""
    b, c = t.gens
    s = 1 if cross(b, c) > 0 else -1
    # k >= 0  <=>  s*cross(x - a, c) >= 0 ; j >= 0 <=> s*cross(b, x - a) >= 0
    n1 = (s * c[1], -s * c[0])
    n2 = (-s * b[1], s * b[0])
    a = t.base
    return [(n1, n1[0] * a[0] + n1[1] * a[1]), (n2, n2[0] * a[0] + n2[1] * a[1])]


def _in_cone(v: Vec2, b: Vec2, c: Vec2) -> bool:
    k, j = _solve2(b, c, v)
    return k >= 0 and j >= 0


def _plane_plane(t1: SemiLinearTerm, t2: SemiLinearTerm, window: Window | None) -> Intersection:
    b1, c1 = t1.gens
    b2, c2 = t2.gens
    if {b1, c1} == {b2, c2}:
        b, c = b1, c1
        k, j = _solve2(b, c, vsub(t2.base, t1.base))
        if k.denominator != 1 or j.denominator != 1:
            return EMPTY
        base = vadd(t1.base, vadd(vscale(max(0, int(k)), b), vscale(max(0, int(j)), c)))
        return Intersection("terms", (), (SemiLinearTerm(base, (b, c)),))
    cons = _halfplanes(t1) + _halfplanes(t2)
    verts = []
    for (n1, r1), (n2, r2) in combinations(cons, 2):
        det = cross(n1, n2)
        if det == 0:
            continue
        x = Fraction(r1 * n2[1] - r2 * n1[1], det)
        y = Fraction(n1[0] * r2 - n2[0] * r1, det)
        if all(n[0] * x + n[1] * y >= r for n, r in cons):
            verts.append((x, y))
    if not verts:
        return EMPTY
    overlap = any(_in_cone(v, b2, c2) for v in (b1, c1)) or any(_in_cone(v, b1, c1) for v in (b2, c2))
    if not overlap:
        box = Window(math.floor(min(v[0] for v in verts)), math.ceil(max(v[0] for v in verts)),
                     math.floor(min(v[1] for v in verts)), math.ceil(max(v[1] for v in verts)), 0)
        return _finite(p for p in term_points(t1, box) if term_contains(t2, p))
    pts: frozenset[Vec2] = frozenset()
    if window is not None:
        pts = frozenset(p for p in term_points(t1, window) if term_contains(t2, p))
    return Intersection("unknown", window_points=pts)


def intersect_terms(t1: SemiLinearTerm, t2: SemiLinearTerm,
                    window: Window | None = None) -> Intersection:
    """Intersection of two terms; `window` feeds the fallback for unresolved cases."""
    if t1.dim > t2.dim:
        t1, t2 = t2, t1
    if t1.dim == 0:
        return _finite([t1.base]) if term_contains(t2, t1.base) else EMPTY
    if t1.dim == 1 and t2.dim == 1:
        return _line_line(t1, t2)
    if t1.dim == 1:
        return _line_plane(t1, t2)
    return _plane_plane(t1, t2, window)


@dataclass(frozen=True)
class Finiteness:
    """finite is True (with the full point list), False, or None when undecided."""

    finite: bool | None
    points: tuple[Vec2, ...] = ()


def intersection_finite(s1: SemiLinearSet | Iterable[SemiLinearTerm],
                        s2: SemiLinearSet | Iterable[SemiLinearTerm]) -> Finiteness:
    terms1 = s1.terms if isinstance(s1, SemiLinearSet) else tuple(s1)
    terms2 = s2.terms if isinstance(s2, SemiLinearSet) else tuple(s2)
    pts: set[Vec2] = set()
    unknown = False
    for t1 in terms1:
        for t2 in terms2:
            r = intersect_terms(t1, t2)
            if r.kind == "terms":
                return Finiteness(False)
            if r.kind == "unknown":
                unknown = True
            pts.update(r.points)
    if unknown:
        return Finiteness(None)
    return Finiteness(True, tuple(sorted(pts)))
