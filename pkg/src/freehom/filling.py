"""Self-intersection ribbon graph of a closed geodesic and its complement.

The curve's self-crossings are the 4-valent vertices; the arcs between
consecutive crossings are the edges, each labelled by the side pairings it
passes through.  Boundary walks of the ribbon neighbourhood are read off
from the vertex rotations, and a walk bounds a disk exactly when its
holonomy is trivial in the surface group.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .geometry import DegenerateTraceError, FuchsianRep, GeodesicTrace, geodesic_trace
from .intersection import _segment_crossings
from .words import (
    CyclicWord, SurfacePresentation, Word, _free_reduce, as_word, classes_of_length, format_word,
    is_primitive,
)


class Tristate(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"


@dataclass
class Edge:
    tail: int  # vertex index, -1 for the single loop of a simple curve
    head: int
    word: tuple[int, ...]  # side pairings crossed from tail to head


@dataclass
class FatGraph:
    """Ribbon graph of a geodesic's self-crossings.

    Darts are numbered ``2e`` (edge e leaving its tail) and ``2e+1`` (edge e
    leaving its head).  ``rotation[v]`` lists the darts leaving vertex v in
    counter-clockwise order.
    """

    genus: int
    base: CyclicWord
    trace: GeodesicTrace
    points: list[complex]  # Klein coordinates of the crossings
    edges: list[Edge]
    rotation: list[list[int]]

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def check(self) -> None:
        v, e = self.n_vertices, self.n_edges
        if v == 0:
            if e != 1:
                raise AssertionError("a simple curve is one closed edge")
            return
        if e != 2 * v:
            raise AssertionError(f"{e} edges for {v} vertices")
        if any(len(r) != 4 for r in self.rotation):
            raise AssertionError("vertex of degree other than 4")
        darts = sorted(d for r in self.rotation for d in r)
        if darts != list(range(2 * e)):
            raise AssertionError("rotation system does not cover every dart once")


@dataclass
class Walk:
    darts: list[int]
    holonomy: tuple[int, ...]
    trivial: bool

    @property
    def word(self) -> str:
        return format_word(self.holonomy)


@dataclass
class ComplementReport:
    walks: list[Walk]
    fills: bool
    nonannular_complement: Tristate | None
    euler: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "walks": [{"holonomy": w.word, "trivial": w.trivial} for w in self.walks],
            "fills": self.fills,
            "nonannular_complement": (self.nonannular_complement.value
                                      if self.nonannular_complement else None),
            "euler": dict(self.euler),
        }


def _primitive(alpha, rep: FuchsianRep) -> CyclicWord:
    c = rep.presentation.canonical(as_word(alpha, rep.genus))
    if not is_primitive(c):
        raise ValueError(f"non-primitive curve rejected: {c}")
    return c


def _trace_with_crossings(rep: FuchsianRep, alpha: CyclicWord):
    last = None
    for domain in (rep.domain, rep.perturbed_domain):
        try:
            tr = geodesic_trace(alpha, rep, domain)
            return tr, _segment_crossings(tr, tr, True, strict=True)
        except DegenerateTraceError as exc:
            last = exc
    raise DegenerateTraceError(f"no domain in general position for {alpha}: {last}")


def build_fatgraph(alpha, rep: FuchsianRep) -> FatGraph:
    alpha = _primitive(alpha, rep)
    tr, crossings = _trace_with_crossings(rep, alpha)
    segs = tr.segments
    if not crossings:
        word = tuple(x for s in segs for x in s.exit_word)
        g = FatGraph(rep.genus, alpha, tr, [], [Edge(-1, -1, word)], [])
        g.check()
        return g

    # every crossing is passed twice; order the passes along the curve
    passes = []
    for v, c in enumerate(crossings):
        passes.append((c.i, c.t, v))
        passes.append((c.j, c.u, v))
    passes.sort()
    n = len(passes)
    edges: list[Edge] = []
    out_dir: dict[int, list[tuple[float, int]]] = {v: [] for v in range(len(crossings))}
    for k in range(n):
        i0, _, v0 = passes[k]
        i1, _, v1 = passes[(k + 1) % n]
        stop = i1 if k + 1 < n else i1 + len(segs)
        word = tuple(x for m in range(i0, stop) for x in segs[m % len(segs)].exit_word)
        edges.append(Edge(v0, v1, _free_reduce(word)))
        d0 = segs[i0].end - segs[i0].start
        d1 = segs[i1].end - segs[i1].start
        out_dir[v0].append((math.atan2(d0.imag, d0.real), 2 * k))
        out_dir[v1].append((math.atan2(-d1.imag, -d1.real), 2 * k + 1))
    rotation = [[d for _, d in sorted(out_dir[v])] for v in range(len(crossings))]
    g = FatGraph(rep.genus, alpha, tr, [c.point for c in crossings], edges, rotation)
    g.check()
    return g


def _dart_word(g: FatGraph, d: int) -> tuple[int, ...]:
    w = g.edges[d // 2].word
    return w if d % 2 == 0 else tuple(-x for x in reversed(w))


def boundary_walks(g: FatGraph) -> list[Walk]:
    p = SurfacePresentation(g.genus)
    if g.n_vertices == 0:
        darts_seq = [[0], [1]]
    else:
        succ = {}
        for r in g.rotation:
            for a, b in zip(r, r[1:] + r[:1]):
                succ[a] = b
        used: set[int] = set()
        darts_seq = []
        for start in range(2 * g.n_edges):
            if start in used:
                continue
            walk, d = [], start
            while d not in used:
                used.add(d)
                walk.append(d)
                d = succ[d ^ 1]
            darts_seq.append(walk)
    walks = []
    for darts in darts_seq:
        hol = _free_reduce(x for d in darts for x in _dart_word(g, d))
        walks.append(Walk(darts, hol, p.is_trivial(Word(hol))))
    return walks


def _euler(g: FatGraph, walks: list[Walk]) -> dict:
    v, e = g.n_vertices, g.n_edges
    chi_s = 2 - 2 * g.genus
    chi_graph = -v  # 4-valent: V - E = -V, and a lone circle has chi 0
    disks = sum(w.trivial for w in walks)
    return {
        "V": v, "E": e, "F": len(walks), "chi_surface": chi_s,
        "chi_graph": chi_graph, "chi_complement": chi_s - chi_graph,
        "disk_walks": disks, "chi_remaining": chi_s - chi_graph - disks,
    }


def fills(alpha, rep: FuchsianRep) -> bool:
    """True when every complementary region of the geodesic is a disk."""
    return complement_report(alpha, rep).fills


def complement_report(alpha, rep: FuchsianRep, graph: FatGraph | None = None) -> ComplementReport:
    g = graph or build_fatgraph(alpha, rep)
    walks = boundary_walks(g)
    eu = _euler(g, walks)
    fill = bool(walks) and all(w.trivial for w in walks)
    if fill and eu["V"] - eu["E"] + eu["F"] != eu["chi_surface"]:
        raise AssertionError(f"Euler accounting failed for filling curve {g.base}: {eu}")
    return ComplementReport(walks, fill, None if fill else _nonannular(eu), eu)


def _nonannular(eu: dict) -> Tristate:
    # Disk walks are exactly the disk components; every other component has
    # chi <= 0, with equality only for annuli.
    rem = eu["chi_remaining"]
    if rem < 0:
        return Tristate.TRUE
    if rem == 0:
        return Tristate.FALSE
    return Tristate.INDETERMINATE


def has_nonannular_complement(alpha, rep: FuchsianRep) -> Tristate:
    rep_ = complement_report(alpha, rep)
    if rep_.fills:
        raise ValueError(f"{rep_.walks and format_word(_primitive(alpha, rep).letters)} fills the surface")
    return rep_.nonannular_complement


def find_filling_word(rep: FuchsianRep, max_length: int = 8) -> CyclicWord | None:
    """Shortlex-first primitive class whose complement is a union of disks."""
    for n in range(1, max_length + 1):
        for c in classes_of_length(rep.presentation, n):
            try:
                if fills(c, rep):
                    return c
            except DegenerateTraceError:
                continue
    return None
