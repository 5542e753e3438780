"""Hyperbolic structure on the genus-g surface.

Group elements are real 2x2 matrices acting on the upper half-plane.  Points
and boundary directions are reported in the Poincare disk (via the Cayley map
``z -> (z - i)/(z + i)``); fundamental domains are stored in the Klein model,
where geodesics are straight chords and a domain is a Euclidean convex polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from .words import SurfacePresentation, Word, as_word, format_word, _free_reduce

# Tolerances: algebraic identities, geometric closure, degeneracy detection.
TOL_ALG = 1e-7
TOL_GEOM = 1e-6
TOL_DEGEN = 1e-9

# Fixed centre of the fallback Dirichlet domain used when a trace hits a
# vertex or runs along a side of the regular polygon.
PERTURBED_CENTER = 0.0313 + 0.0171j

_CAYLEY = np.array([[1, -1j], [1, 1j]])
_CAYLEY_INV = np.linalg.inv(_CAYLEY)


class GeometryError(ValueError):
    pass


class DegenerateTraceError(GeometryError):
    """A traced geodesic meets a polygon vertex or runs along a side."""


class IsometryKind(str, Enum):
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"
    IDENTITY = "identity"


@dataclass(frozen=True)
class Axis:
    """Boundary fixed points of a hyperbolic isometry, as angles in [0, 2pi)."""

    attracting: float
    repelling: float

    def reversed(self) -> "Axis":
        return Axis(self.repelling, self.attracting)

    @property
    def points(self) -> tuple[complex, complex]:
        return np.exp(1j * self.repelling), np.exp(1j * self.attracting)


# -- models ----------------------------------------------------------------

def to_disk(m: np.ndarray) -> np.ndarray:
    """SL(2,R) matrix -> SU(1,1) matrix acting on the disk."""
    return _CAYLEY @ m @ _CAYLEY_INV


def to_real(g: np.ndarray) -> np.ndarray:
    m = _CAYLEY_INV @ g @ _CAYLEY
    if np.max(np.abs(m.imag)) > 1e-8 * max(1.0, np.max(np.abs(m))):
        raise GeometryError("matrix is not in SU(1,1)")
    return m.real.copy()


def mobius(g: np.ndarray, z):
    return (g[0, 0] * z + g[0, 1]) / (g[1, 0] * z + g[1, 1])


def disk_to_klein(z):
    return 2 * z / (1 + abs(z) ** 2)


def klein_to_disk(k):
    return k / (1 + np.sqrt(np.maximum(0.0, 1 - abs(k) ** 2)))


def disk_distance(z, w) -> float:
    num = abs(z - w)
    den = abs(1 - np.conj(w) * z)
    return 2 * math.atanh(min(num / den, 1 - 1e-16))


def klein_distance(a, b) -> float:
    return disk_distance(klein_to_disk(a), klein_to_disk(b))


def angle_of(z: complex) -> float:
    return math.atan2(z.imag, z.real) % (2 * math.pi)


def uhp_to_disk(z):
    return (z - 1j) / (z + 1j)


# -- matrices --------------------------------------------------------------

def check_mat2(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2) or not np.all(np.isfinite(m)):
        raise GeometryError("expected a finite 2x2 matrix")
    if abs(np.linalg.det(m) - 1) > TOL_DEGEN * max(1.0, np.max(np.abs(m)) ** 2):
        raise GeometryError(f"determinant {np.linalg.det(m)} is not 1")
    return m


def classify_isometry(m: np.ndarray, tol: float = TOL_ALG) -> IsometryKind:
    m = np.asarray(m, dtype=float)
    t = abs(m[0, 0] + m[1, 1])
    if abs(t - 2) <= tol:
        if np.allclose(m, np.eye(2), atol=tol) or np.allclose(m, -np.eye(2), atol=tol):
            return IsometryKind.IDENTITY
        return IsometryKind.PARABOLIC
    return IsometryKind.HYPERBOLIC if t > 2 else IsometryKind.ELLIPTIC


def _require_hyperbolic(m):
    kind = classify_isometry(m)
    if kind is not IsometryKind.HYPERBOLIC:
        raise GeometryError(f"expected a hyperbolic isometry, got {kind.value}")


def translation_length(m: np.ndarray) -> float:
    _require_hyperbolic(m)
    return 2 * math.acosh(abs(m[0, 0] + m[1, 1]) / 2)


def axis_endpoints(m: np.ndarray) -> Axis:
    _require_hyperbolic(m)
    g = to_disk(np.asarray(m, dtype=float))
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    roots = np.roots([c, d - a, -b])
    derivs = [abs(1 / (c * z + d) ** 2) for z in roots]
    attr, rep = (roots[0], roots[1]) if derivs[0] < derivs[1] else (roots[1], roots[0])
    return Axis(angle_of(attr), angle_of(rep))


def act_on_angle(m: np.ndarray, theta: float) -> float:
    return angle_of(mobius(to_disk(m), np.exp(1j * theta)))


def angular_gap(x: float, y: float) -> float:
    d = abs(x - y) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


# -- fundamental domains -----------------------------------------------------

@dataclass
class Side:
    """One side of a fundamental domain.

    ``pairing`` maps the domain to its neighbour across this side; it is the
    group element spelled by ``word``.  ``partner`` is the index of the side
    that ``pairing`` carries onto this one.
    """

    index: int
    word: tuple[int, ...]
    pairing: np.ndarray  # SU(1,1)
    partner: int = -1


@dataclass
class FundamentalDomain:
    """Convex Dirichlet polygon in the Klein model with its side pairings."""

    center: complex  # disk coordinate
    vertices: np.ndarray  # Klein, counter-clockwise; side k runs v[k] -> v[k+1]
    sides: list[Side]

    @cached_property
    def _normals(self):
        v = self.vertices
        e = np.roll(v, -1) - v
        # inward normal for a counter-clockwise polygon
        n = 1j * e
        n = n / np.abs(n)
        offs = (np.conj(n) * v).real
        return n, offs

    def violation(self, k: complex) -> np.ndarray:
        """Signed distance outside each side's supporting line (Klein)."""
        n, offs = self._normals
        return offs - (np.conj(n) * k).real

    def contains(self, k: complex, tol: float = 1e-12) -> bool:
        return bool(np.all(self.violation(k) <= tol))

    def reduce_point(self, z: complex, max_steps: int = 10000):
        """Move a disk point into the domain; return (point, word, matrix).

        The returned matrix gamma (SU(1,1)) satisfies z = gamma(point).
        """
        word: list[int] = []
        gamma = np.eye(2, dtype=complex)
        for _ in range(max_steps):
            viol = self.violation(disk_to_klein(z))
            k = int(np.argmax(viol))
            if viol[k] <= 1e-13:
                return z, tuple(_free_reduce(word)), gamma
            side = self.sides[k]
            z = mobius(np.linalg.inv(side.pairing), z)
            word.extend(side.word)
            gamma = gamma @ side.pairing
        raise GeometryError("point reduction did not terminate")

    def interior_angles(self) -> np.ndarray:
        dv = klein_to_disk(self.vertices)
        out = []
        n = len(dv)
        for i in range(n):
            v = dv[i]
            move = lambda z: (z - v) / (1 - np.conj(v) * z)
            a, b = move(dv[i - 1]), move(dv[(i + 1) % n])
            # geodesics through the origin are straight: compare tangent directions
            out.append((angle_of(a) - angle_of(b)) % (2 * math.pi))
        return np.array(out)

    def area(self) -> float:
        n = len(self.vertices)
        return (n - 2) * math.pi - float(np.sum(self.interior_angles()))

    def vertex_cycles(self) -> list[list[int]]:
        """Vertex classes under the side pairings (by vertex index)."""
        n = len(self.vertices)
        dv = klein_to_disk(self.vertices)
        parent = list(range(n))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for side in self.sides:
            p = self.sides[side.partner]
            # pairing maps side p's endpoints onto side k's endpoints (reversed)
            for src in (p.index, (p.index + 1) % n):
                img = mobius(side.pairing, dv[src])
                j = int(np.argmin(np.abs(dv - img)))
                if abs(dv[j] - img) < 1e-6:
                    parent[find(src)] = find(j)
        groups: dict[int, list[int]] = {}
        for i in range(n):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())


def _clip_convex(poly: list[complex], normal: complex, off: float) -> list[complex]:
    """Keep the part of ``poly`` with Re(conj(normal) * z) >= off."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = (np.conj(normal) * p).real - off
        fq = (np.conj(normal) * q).real - off
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    return out


def _hyperboloid(z: complex) -> np.ndarray:
    r2 = abs(z) ** 2
    return np.array([1 + r2, 2 * z.real, 2 * z.imag]) / (1 - r2)


# -- the representation ------------------------------------------------------

class FuchsianRep:
    """Regular 4g-gon structure on the genus-g surface.

    Side k of the polygon has its midpoint at angle 2*pi*k/(4g).  For handle
    i the generator a_i carries the polygon across side 4i and b_i across
    side 4i+3, so the product of commutators evaluates to the identity.
    """

    def __init__(self, genus: int):
        self.presentation = SurfacePresentation(genus)
        self.genus = genus
        n = 4 * genus
        self.n_sides = n
        self.vertex_angle = 2 * math.pi / n
        self.circumradius = math.acosh(1 / math.tan(math.pi / n) / math.tan(self.vertex_angle / 2))
        self.inradius = math.atanh(math.tanh(self.circumradius) * math.cos(math.pi / n))

        rho = math.tanh(self.circumradius / 2)
        self.polygon = np.array([rho * np.exp(1j * (2 * k - 1) * math.pi / n) for k in range(n)])

        partner = {}
        self.side_letter: dict[int, int] = {}
        for i in range(genus):
            a, b = 2 * i + 1, 2 * i + 2
            partner.update({4 * i: 4 * i + 2, 4 * i + 2: 4 * i,
                            4 * i + 1: 4 * i + 3, 4 * i + 3: 4 * i + 1})
            self.side_letter.update({4 * i: a, 4 * i + 2: -a, 4 * i + 3: b, 4 * i + 1: -b})
        self.letter_side = {x: k for k, x in self.side_letter.items()}
        self.side_pairings = [(k, self.side_letter[k], partner[k]) for k in range(n)]

        def rot(t):
            return np.array([[np.exp(0.5j * t), 0], [0, np.exp(-0.5j * t)]])

        d = 2 * self.inradius
        shift = np.array([[math.cosh(d / 2), math.sinh(d / 2)], [math.sinh(d / 2), math.cosh(d / 2)]])
        phi = [2 * math.pi * k / n for k in range(n)]
        self._disk: dict[int, np.ndarray] = {}
        self.gen_matrices: dict[int, np.ndarray] = {}
        for k in range(n):
            g = rot(phi[k]) @ shift @ rot(math.pi - phi[partner[k]])
            x = self.side_letter[k]
            self._disk[x] = g
        # fix signs so that x and its inverse letter multiply to +I exactly
        for x in list(self._disk):
            if x < 0:
                g = self._disk[-x]
                self._disk[x] = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
        self.gen_matrices = {x: to_real(g) for x, g in sorted(self._disk.items())}

    def __repr__(self) -> str:
        return f"FuchsianRep(genus={self.genus})"

    def evaluate(self, w) -> np.ndarray:
        w = as_word(w, self.genus)
        m = np.eye(2)
        for x in w:
            m = m @ self.gen_matrices[x]
        return m

    def evaluate_disk(self, w) -> np.ndarray:
        return to_disk(self.evaluate(w))

    def polygon_angles(self) -> np.ndarray:
        return self.domain.interior_angles()

    @cached_property
    def domain(self) -> FundamentalDomain:
        sides = [Side(k, (self.side_letter[k],), self._disk[self.side_letter[k]], p)
                 for k, _, p in self.side_pairings]
        return FundamentalDomain(0j, disk_to_klein(self.polygon), sides)

    @cached_property
    def perturbed_domain(self) -> FundamentalDomain:
        return self.dirichlet_domain(PERTURBED_CENTER)

    def dirichlet_domain(self, center: complex) -> FundamentalDomain:
        """Dirichlet polygon centred at a disk point."""
        reach = 2 * self.circumradius + 4 * disk_distance(center, 0) + 0.5
        base = _hyperboloid(center)
        found: dict[tuple, tuple[tuple[int, ...], np.ndarray]] = {}
        frontier = [((), np.eye(2, dtype=complex))]
        seen_pts = {self._key(center)}
        letters = list(self._disk)
        while frontier:
            nxt = []
            for word, g in frontier:
                for x in letters:
                    if word and word[-1] == -x:
                        continue
                    h = g @ self._disk[x]
                    p = mobius(h, center)
                    key = self._key(p)
                    if key in seen_pts or disk_distance(p, center) > reach:
                        continue
                    seen_pts.add(key)
                    found[key] = (word + (x,), h)
                    nxt.append((word + (x,), h))
            frontier = nxt
        poly = [1.5 + 1.5j, -1.5 + 1.5j, -1.5 - 1.5j, 1.5 - 1.5j]
        cuts = []
        for word, h in found.values():
            q = _hyperboloid(mobius(h, center))
            dlt = base - q
            # closer to centre:  dlt1*x + dlt2*y >= dlt0  (Klein coordinates)
            normal = complex(dlt[1], dlt[2])
            scale = abs(normal)
            cuts.append((normal / scale, dlt[0] / scale, word, h))
        for normal, off, _, _ in cuts:
            poly = _clip_convex(poly, normal, off)
        verts = _dedupe_ring(poly)
        if np.max(np.abs(verts)) >= 1:
            raise GeometryError("Dirichlet domain is not compact; enumeration too small")
        sides = []
        for k in range(len(verts)):
            mid = (verts[k] + verts[(k + 1) % len(verts)]) / 2
            best = min(cuts, key=lambda c: abs((np.conj(c[0]) * mid).real - c[1]))
            sides.append(Side(k, tuple(_free_reduce(best[2])), best[3]))
        inv_key = {}
        for s in sides:
            inv_key[self._key(mobius(s.pairing, center))] = s.index
        for s in sides:
            partner = inv_key.get(self._key(mobius(np.linalg.inv(s.pairing), center)))
            if partner is None:
                raise GeometryError("unpaired side in Dirichlet domain")
            s.partner = partner
        return FundamentalDomain(center, verts, sides)

    @staticmethod
    def _key(z: complex) -> tuple[int, int]:
        return (round(z.real * 1e7), round(z.imag * 1e7))

    def relator_defect(self) -> float:
        return float(np.min([np.max(np.abs(self.evaluate(self.presentation.relator) - s * np.eye(2)))
                             for s in (1, -1)]))


def _dedupe_ring(poly: list[complex], tol: float = 1e-12) -> np.ndarray:
    out: list[complex] = []
    for p in poly:
        if not out or abs(p - out[-1]) > tol:
            out.append(p)
    if len(out) > 1 and abs(out[0] - out[-1]) <= tol:
        out.pop()
    return np.array(out)


def build_regular_rep(genus: int) -> FuchsianRep:
    return FuchsianRep(genus)


def evaluate(w, rep: FuchsianRep) -> np.ndarray:
    return rep.evaluate(w)


# -- tracing -------------------------------------------------------------------

@dataclass
class TraceSegment:
    start: complex  # Klein
    end: complex
    entry_side: int
    exit_side: int
    exit_word: tuple[int, ...]
    length: float
    exit_at_vertex: bool = False

    def point(self, t: float) -> complex:
        return self.start + t * (self.end - self.start)


@dataclass
class GeodesicTrace:
    word: Word
    domain: FundamentalDomain
    segments: list[TraceSegment]
    holonomy: tuple[int, ...]
    closure_defect: float
    conjugator: tuple[int, ...] = field(default=())

    @property
    def length(self) -> float:
        return float(sum(s.length for s in self.segments))


def _clip_chord(domain: FundamentalDomain, e0: complex, e1: complex):
    """Intersect the chord e0 -> e1 with the domain (parametric Cyrus-Beck)."""
    n, offs = domain._normals
    d = e1 - e0
    t_in, t_out = 0.0, 1.0
    enter: list[tuple[float, int]] = []
    leave: list[tuple[float, int]] = []
    for k in range(len(offs)):
        num = offs[k] - (np.conj(n[k]) * e0).real
        den = (np.conj(n[k]) * d).real
        if abs(den) < 1e-15:
            if num > 0:
                return None
            continue
        t = num / den
        (enter if den > 0 else leave).append((t, k))
    enter.sort()
    leave.sort()
    if enter:
        t_in = max(t_in, enter[-1][0])
    if leave:
        t_out = min(t_out, leave[0][0])
    if t_out <= t_in:
        return None
    return t_in, enter, t_out, leave


def _chord_cusp(domain: FundamentalDomain, e0: complex, e1: complex, t: float, tol: float) -> bool:
    p = e0 + t * (e1 - e0)
    return bool(np.min(np.abs(domain.vertices - p)) < tol)


def geodesic_trace(w, rep: FuchsianRep, domain: FundamentalDomain | None = None,
                   max_segments: int | None = None) -> GeodesicTrace:
    """Trace one period of the closed geodesic of ``w`` through a fundamental domain.

    Each segment is the part of a lift inside the domain; ``exit_word`` names
    the side pairing used to continue.  Raises DegenerateTraceError if the
    geodesic runs along a side or passes within TOL_DEGEN of a vertex.
    """
    w = as_word(w, rep.genus)
    pres = rep.presentation
    domain = domain or rep.domain
    m = rep.evaluate(w)
    axis = axis_endpoints(m)
    e0, e1 = np.exp(1j * axis.repelling), np.exp(1j * axis.attracting)

    # closest point of the axis to the origin, then pull it into the domain
    d = e1 - e0
    t0 = -(np.conj(d) * e0).real / abs(d) ** 2
    foot = klein_to_disk(e0 + t0 * d)
    _, conj_word, gamma = domain.reduce_point(foot)
    ginv = np.linalg.inv(gamma)
    start = (mobius(ginv, e0), mobius(ginv, e1))
    e0, e1 = start
    cap = max_segments or 40 * (len(w) + 4) * max(1, len(domain.sides) // 4)

    segments: list[TraceSegment] = []
    holonomy: list[int] = []
    prev_exit: complex | None = None
    for _ in range(cap):
        clip = _clip_chord(domain, e0, e1)
        if clip is None:
            raise DegenerateTraceError("chord misses the domain")
        t_in, enter, t_out, leave = clip
        a, b = e0 + t_in * (e1 - e0), e0 + t_out * (e1 - e0)
        if abs(b - a) < TOL_DEGEN:
            raise DegenerateTraceError("geodesic touches the domain only at a vertex")
        # running along a side: chord parallel to and on a supporting line
        viol = domain.violation((a + b) / 2)
        if np.max(viol) > -TOL_DEGEN:
            raise DegenerateTraceError("geodesic runs along a side of the domain")
        at_vertex = len(leave) > 1 and leave[1][0] - t_out < TOL_DEGEN * 10 or \
            _chord_cusp(domain, e0, e1, t_out, TOL_DEGEN)
        exit_side = leave[0][1]
        entry_side = enter[-1][1] if enter else -1
        if prev_exit is not None and abs(prev_exit - a) > TOL_GEOM:
            raise GeometryError("trace lost continuity")
        if at_vertex:
            beyond = klein_to_disk(e0 + (t_out + 1e-7) * (e1 - e0))
            _, step_word, step = domain.reduce_point(beyond)
        else:
            side = domain.sides[exit_side]
            step_word, step = side.word, side.pairing
        segments.append(TraceSegment(a, b, entry_side, exit_side, tuple(step_word),
                                     klein_distance(a, b), at_vertex))
        holonomy.extend(step_word)
        sinv = np.linalg.inv(step)
        # Re-derive the chord from a word rather than pushing the endpoints
        # through ever more pairings, which loses digits at rate exp(length).
        u = tuple(conj_word) + tuple(holonomy)
        local = pres.shorten(Word(tuple(-x for x in reversed(u)) + w.letters + u))
        ax = axis_endpoints(rep.evaluate(local))
        e0, e1 = np.exp(1j * ax.repelling), np.exp(1j * ax.attracting)
        prev_exit = disk_to_klein(mobius(sinv, klein_to_disk(b)))
        if abs(e0 - start[0]) < TOL_ALG and abs(e1 - start[1]) < TOL_ALG:
            defect = klein_distance(prev_exit, segments[0].start)
            return GeodesicTrace(w, domain, segments, _free_reduce(holonomy), defect,
                                 conj_word)
    raise GeometryError(f"trace of {w} did not close after {cap} segments")


def trace_with_fallback(w, rep: FuchsianRep) -> GeodesicTrace:
    try:
        return geodesic_trace(w, rep)
    except DegenerateTraceError:
        return geodesic_trace(w, rep, rep.perturbed_domain)
