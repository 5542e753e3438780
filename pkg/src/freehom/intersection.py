"""Geometric intersection numbers of closed geodesics.

Two routes are provided.  ``intersection_number`` counts double cosets
<w> g <v> whose translated axes link on the boundary circle.  The
``tracing_oracle_count`` route traces both geodesics through a fundamental
domain and counts transverse segment crossings; it shares no code with the
first route beyond evaluating generator matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cache import IntersectionCache
from .geometry import (
    TOL_DEGEN, TOL_GEOM, Axis, DegenerateTraceError, FuchsianRep, GeodesicTrace,
    GeometryError, angle_of, axis_endpoints, disk_distance, geodesic_trace, mobius, translation_length,
)
from .words import (
    CyclicWord, Word, _free_reduce, as_word, format_word, invert, is_primitive, shortlex_key,
)


class SharedAxisError(GeometryError):
    """Two axes share an endpoint, so they cannot cross transversely."""


class RadiusExhausted(RuntimeError):
    """The double-coset count did not stabilise before the radius cap."""


class SameCurveError(ValueError):
    pass


@dataclass
class IntersectionResult:
    count: int
    certificates: list[str] = field(default_factory=list)
    radius_used: int = 0
    cached: bool = False


def axes_linked(x: Axis, y: Axis, tol: float = TOL_DEGEN) -> bool:
    ends = [x.repelling, x.attracting, y.repelling, y.attracting]
    for i in range(4):
        for j in range(i + 1, 4):
            d = abs(ends[i] - ends[j]) % (2 * math.pi)
            if min(d, 2 * math.pi - d) < tol:
                raise SharedAxisError("axes share a boundary point")
    lo = x.repelling
    span = (x.attracting - lo) % (2 * math.pi)
    inside = [0 < (t - lo) % (2 * math.pi) < span for t in (y.repelling, y.attracting)]
    return inside[0] != inside[1]


def default_radius(w: Word, v: Word, genus: int) -> int:
    return len(w) + len(v) + 4 * genus


# -- double coset route --------------------------------------------------------

class _AxisFrame:
    """Isometry from the disk to the upper half-plane putting an axis on iR+.

    The repelling end goes to 0, the attracting end to infinity and the foot
    of the perpendicular from the origin to i.
    """

    def __init__(self, m: np.ndarray):
        self.axis = axis_endpoints(m)
        self.length = translation_length(m)
        r, a = self.axis.points
        self.r, self.a = r, a
        d = a - r
        foot_k = r + (-(np.conj(d) * r).real / abs(d) ** 2) * d
        foot = foot_k / (1 + math.sqrt(max(0.0, 1 - abs(foot_k) ** 2)))
        self.scale = 1j / ((foot - r) / (foot - a))

    def __call__(self, z):
        return self.scale * (z - self.r) / (z - self.a)

    def distance_to_segment(self, z: complex) -> float:
        zeta = self(z)
        x, y = zeta.real, zeta.imag
        h = math.log(abs(zeta))
        if 0 <= h <= self.length:
            return math.asinh(abs(x) / y)
        top = 1j * math.exp(min(max(h, 0.0), self.length))
        return math.acosh(1 + abs(zeta - top) ** 2 / (2 * y * top.imag))


def _corridor(rep: FuchsianRep, frame: _AxisFrame, radius: int):
    """Tiles (word, disk matrix) of word length <= radius meeting the
    fundamental segment of the frame's axis."""
    reach = rep.circumradius + 1e-6
    slack = frame.distance_to_segment(0j) + reach
    mats = rep._disk
    out = []
    seen = {(0, 0)}
    frontier = [((), np.eye(2, dtype=complex))]
    if frame.distance_to_segment(0j) <= reach:
        out.append(frontier[0])
    for _ in range(radius):
        nxt = []
        for word, g in frontier:
            for x, s in mats.items():
                if word and word[-1] == -x:
                    continue
                h = g @ s
                c = h[0, 1] / h[1, 1]  # image of the origin
                key = (round(c.real * 1e9), round(c.imag * 1e9))
                if key in seen:
                    continue
                seen.add(key)
                d = frame.distance_to_segment(c)
                if d <= slack:
                    nxt.append((word + (x,), h))
                    if d <= reach:
                        out.append((word + (x,), h))
        frontier = nxt
        if not frontier:
            break
    return out, bool(frontier)


def _linked_cosets(rep: FuchsianRep, w: Word, v: Word, radius: int):
    pres = rep.presentation
    fw, fv = _AxisFrame(rep.evaluate(w)), _AxisFrame(rep.evaluate(v))
    tiles_w, _ = _corridor(rep, fw, radius)
    tiles_v, _ = _corridor(rep, fv, radius)
    vr, va = fv.axis.points
    self_mode = w.letters == v.letters
    wl, vl = w.letters, v.letters

    # Linked candidates g = k t^-1, each replaced by the shortest word in its
    # double coset among w^i g v^j with |i|, |j| <= 1: long products lose
    # precision when pushed towards the boundary.
    candidates: set[tuple[int, ...]] = set()
    for kw, km in tiles_w:
        for tw, tm in tiles_v:
            g = km @ np.linalg.inv(tm)
            other = Axis(angle_of(mobius(g, va)), angle_of(mobius(g, vr)))
            try:
                if not axes_linked(fw.axis, other):
                    continue
            except SharedAxisError:
                continue
            letters = _free_reduce(kw + tuple(-x for x in reversed(tw)))
            forms = [pres.shorten(Word(_power(wl, i) + letters + _power(vl, j))).letters
                     for i in (-1, 0, 1) for j in (-1, 0, 1)]
            candidates.add(min(forms, key=shortlex_key))

    found: list[_Coset] = []
    for letters in sorted(candidates, key=shortlex_key):
        if self_mode and any(pres.is_trivial(Word(_power(wl, i) + letters)) for i in range(-2, 3)):
            continue  # g preserves the axis of w: the trivial double coset
        g = rep.evaluate_disk(Word(letters))
        gr, ga = mobius(g, vr), mobius(g, va)
        a, b = fw(gr).real, fw(ga).real
        if a * b >= 0:
            continue  # rounding made a tangent candidate look linked
        height = 0.5 * math.log(-a * b)
        centre, half = (a + b) / 2, (b - a) / 2  # signed: orientation of g.axis(v)
        c = _Coset(height, height % fw.length, centre / half, letters)
        if not any(_same_coset(c, o, fw.length, pres, wl, vl) for o in found):
            found.append(c)
    found.sort(key=lambda f: (round(f.pos, 9), round(f.slope, 9)))
    return found


@dataclass
class _Coset:
    height: float  # log-height of the crossing on the axis of w
    pos: float  # height modulo the translation length of w
    slope: float
    letters: tuple[int, ...]

    @property
    def word(self) -> str:
        return format_word(self.letters)


def _same_coset(c: _Coset, o: _Coset, period: float, pres, w, v, tol: float = 0.2) -> bool:
    """Whether w^i g_c v^j = g_o for some small i, j.

    Nearby crossing keys only nominate a candidate; the decision is made on
    words, since near-tangent crossings lose several digits.
    """
    d = abs(c.pos - o.pos) % period
    near = min(d, period - d) <= tol and abs(c.slope - o.slope) <= tol
    if not near and max(abs(c.slope), abs(o.slope)) < 0.99:
        return False
    shift = round((c.height - o.height) / period)
    inv_o = tuple(-x for x in reversed(o.letters))
    for i in (shift, shift - 1, shift + 1):
        wi = _power(w, -i)
        for j in range(-2, 3):
            if pres.is_trivial(Word(inv_o + wi + c.letters + _power(v, j))):
                return True
    return False


def _power(w: tuple[int, ...], k: int) -> tuple[int, ...]:
    if k < 0:
        return tuple(-x for x in reversed(w)) * -k
    return w * k


def _count_with_stability(rep, w, v, radius, cap):
    r = radius
    while True:
        first = _linked_cosets(rep, w, v, r)
        second = _linked_cosets(rep, w, v, r + 2)
        if len(first) == len(second):
            return second, r + 2
        if r >= cap:
            raise RadiusExhausted(f"intersection of {w} and {v} unstable at radius {r}")
        r = min(2 * r, cap)


def intersection_number(w, v, rep: FuchsianRep, radius: int | None = None,
                        cache: IntersectionCache | None = None) -> IntersectionResult:
    """Number of intersection points of the closed geodesics of w and v.

    For v = w (or v conjugate to w^+-1) this returns the number of nontrivial
    linked double cosets, i.e. twice the self-intersection number.
    """
    w, v = as_word(w, rep.genus), as_word(v, rep.genus)
    sw, sv = str(w), str(v)
    key = tuple(sorted((sw, sv)))
    if cache is not None:
        hit = cache.get(rep.genus, *key)
        if hit is not None:
            return IntersectionResult(hit["count"], [], hit["radius_used"], cached=True)
    r0 = radius if radius is not None else default_radius(w, v, rep.genus)
    found, used = _count_with_stability(rep, w, v, r0, 2 * r0)
    result = IntersectionResult(len(found), [f.word for f in found], used)
    if cache is not None:
        cache.put(rep.genus, *key, result.count, result.radius_used)
    return result


def self_intersection_number(w, rep: FuchsianRep, radius: int | None = None,
                             cache: IntersectionCache | None = None) -> int:
    w = as_word(w, rep.genus)
    c = rep.presentation.canonical(w)
    if not is_primitive(c):
        raise ValueError(f"non-primitive input rejected: {w}")
    total = intersection_number(w, w, rep, radius, cache).count
    if total % 2:
        raise GeometryError(f"odd self double-coset count {total} for {w}")
    return total // 2


# -- tracing oracle ------------------------------------------------------------

@dataclass
class Crossing:
    """A transverse crossing between segment i of one trace and j of another."""

    i: int
    t: float
    j: int
    u: float
    point: complex  # Klein


def _segment_crossings(tw: GeodesicTrace, tv: GeodesicTrace, self_mode: bool,
                       strict: bool = False) -> list[Crossing]:
    """Transverse crossings of two traces.  A crossing on a side of the domain
    is counted on the lower-indexed side of its pair only; ``strict`` rejects
    such crossings altogether."""
    dom = tw.domain
    eps = 1e-9
    verts = dom.vertices
    out = []
    for i, s in enumerate(tw.segments):
        js = range(i + 1, len(tv.segments)) if self_mode else range(len(tv.segments))
        for j in js:
            r = tv.segments[j]
            p, d1 = s.start, s.end - s.start
            q, d2 = r.start, r.end - r.start
            den = (np.conj(d1) * (1j * d2)).real  # cross(d1, d2)
            if abs(den) < 1e-14:
                # parallel chords: only a problem if they overlap
                off = (np.conj(q - p) * (1j * d1)).real
                if abs(off) < 1e-12:
                    raise DegenerateTraceError("two traced segments are collinear")
                continue
            t = (np.conj(q - p) * (1j * d2)).real / den
            u = (np.conj(q - p) * (1j * d1)).real / den
            if not (-eps <= t <= 1 + eps and -eps <= u <= 1 + eps):
                continue
            x = p + t * d1
            on_edge_t = t < eps or t > 1 - eps
            on_edge_u = u < eps or u > 1 - eps
            if not on_edge_t and not on_edge_u:
                out.append(Crossing(i, t, j, u, x))
                continue
            if np.min(np.abs(verts - x)) < 1e-7:
                raise DegenerateTraceError("geodesics cross at a vertex of the domain")
            if on_edge_t != on_edge_u:
                raise DegenerateTraceError("crossing tangent to the domain boundary")
            if strict:
                raise DegenerateTraceError("crossing on a side of the domain")
            side = int(np.argmin(np.abs(dom.violation(x))))
            if side < dom.sides[side].partner:
                out.append(Crossing(i, round(t), j, round(u), x))
    return out


def _check_traceable(rep: FuchsianRep, w: Word):
    c = rep.presentation.canonical(w)
    if not is_primitive(c):
        raise ValueError(f"non-primitive input rejected: {w}")
    return c


def trace_pair(rep: FuchsianRep, w: Word, v: Word | None = None):
    """Traces of w (and v) plus their crossings, in a common non-degenerate domain."""
    last = None
    for domain in (rep.domain, rep.perturbed_domain):
        try:
            tw = geodesic_trace(w, rep, domain)
            if v is None:
                return tw, tw, _segment_crossings(tw, tw, True)
            tv = geodesic_trace(v, rep, domain)
            return tw, tv, _segment_crossings(tw, tv, False)
        except DegenerateTraceError as exc:
            last = exc
    raise DegenerateTraceError(f"no non-degenerate domain for {w}, {v}: {last}")


def tracing_oracle_count(w, v, rep: FuchsianRep) -> int:
    """Crossings of the traced geodesics; v identical to w counts self-crossings."""
    w, v = as_word(w, rep.genus), as_word(v, rep.genus)
    cw = _check_traceable(rep, w)
    if v == w:
        return len(trace_pair(rep, w)[2])
    cv = _check_traceable(rep, v)
    if cv == cw or rep.presentation.canonical(invert(v)) == cw:
        raise SameCurveError(f"{w} and {v} are the same closed curve")
    return len(trace_pair(rep, w, v)[2])
