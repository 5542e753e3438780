"""Free homotopy classes of closed orbits after flow surgery on geodesic flows.

An orbit of the surgered flow corresponds to a closed orbit of the original
geodesic flow, hence to an oriented closed geodesic beta.  Its class is
decided by the total geometric intersection of beta with the surgery curves:

* zero: beta is homotopic off the surgery locus; the class is beta and its
  reverse, one pair per sheet of the optional fibrewise cover (size 2m);
* positive: the orbit space is skewed and the class contains the infinite
  ladder of orbits built from the stable leaves fixed by beta's deck
  transformation.
"""

from __future__ import annotations

import enum
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .cache import IntersectionCache
from .filling import ComplementReport, Tristate, _nonannular, complement_report
from .geometry import DegenerateTraceError, FuchsianRep
from .intersection import RadiusExhausted, intersection_number
from .orbit_models import StripModel, enumerate_class
from .words import (
    CyclicWord, IdentityError, SurfacePresentation, WordError, as_word, classes_of_length,
    format_word, invert, is_primitive,
)

log = logging.getLogger(__name__)

ASSUMPTIONS = (
    "positivity: every positive surgery coefficient keeps the surgered flow R-covered",
    "coefficients are large enough that the piece containing the surgery curves is hyperbolic",
)


class Kind(str, enum.Enum):
    A = "A"  # infinite class
    B = "B"  # finite class of size 2m
    UNDECIDED = "undecided"


class PreconditionError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass
class SurgerySpec:
    rep: FuchsianRep
    curves: list[CyclicWord]
    coefficients: list[int]
    positivity: bool = True
    cover_degree: int = 1

    @classmethod
    def from_words(cls, genus: int, curves, coefficients=None, positivity: bool = True,
                   cover_degree: int = 1) -> "SurgerySpec":
        rep = FuchsianRep(genus)
        canon = [rep.presentation.canonical(as_word(c, genus)) for c in curves]
        coeffs = list(coefficients) if coefficients is not None else [1] * len(canon)
        return cls(rep, canon, coeffs, positivity, cover_degree)

    @property
    def presentation(self) -> SurfacePresentation:
        return self.rep.presentation


@dataclass
class PreconditionReport:
    ok: bool
    errors: list[str]
    complements: list[ComplementReport] = field(default_factory=list)
    pairwise: list[dict] = field(default_factory=list)
    union_complement: Tristate | None = None
    union_euler: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "errors": list(self.errors),
            "complements": [c.to_json() for c in self.complements],
            "pairwise_intersections": list(self.pairwise),
            "union_complement": self.union_complement.value if self.union_complement else None,
            "union_euler": dict(self.union_euler),
        }


def check_preconditions(spec: SurgerySpec, cache: IntersectionCache | None = None,
                        radius: int | None = None) -> PreconditionReport:
    errors: list[str] = []
    comps: list[ComplementReport] = []
    if not spec.curves:
        errors.append("no surgery curves given")
    if len(spec.coefficients) != len(spec.curves):
        errors.append(f"{len(spec.coefficients)} coefficients for {len(spec.curves)} curves")
    errors += [f"coefficient {n} < 1" for n in spec.coefficients if n < 1]
    if not spec.positivity:
        errors.append("positivity assumption not granted")
    if spec.cover_degree < 1:
        errors.append(f"cover degree {spec.cover_degree} < 1")

    curves_ok = True
    for c in spec.curves:
        if not is_primitive(c):
            errors.append(f"curve {c} is not primitive")
            curves_ok = False
            continue
        try:
            cr = complement_report(c, spec.rep)
        except DegenerateTraceError as exc:
            errors.append(f"curve {c}: {exc}")
            curves_ok = False
            continue
        comps.append(cr)
        if cr.fills:
            errors.append(f"α fills S: {c}")
            curves_ok = False

    pairwise = []
    for (i, a), (j, b) in itertools.combinations(enumerate(spec.curves), 2):
        if a == b or spec.presentation.canonical(invert(b)) == a:
            errors.append(f"curves {i} and {j} are the same closed geodesic")
            curves_ok = False
            continue
        try:
            n = intersection_number(a, b, spec.rep, radius, cache).count
        except RadiusExhausted as exc:
            errors.append(f"intersection of curves {i} and {j} undecided: {exc}")
            curves_ok = False
            continue
        pairwise.append({"i": i, "j": j, "count": n})
        if n:
            errors.append(f"curves not disjoint: {a} and {b} meet {n} times")
            curves_ok = False

    union_state = None
    union_eu: dict = {}
    if curves_ok and comps:
        union_eu = _union_euler(spec, comps)
        union_state = _nonannular(union_eu)
        if union_state is Tristate.FALSE:
            errors.append("complement of the surgery curves is a union of annuli and disks")
        elif union_state is Tristate.INDETERMINATE:
            errors.append("complement test indeterminate (inconsistent Euler accounting)")
    return PreconditionReport(not errors, errors, comps, pairwise, union_state, union_eu)


def _union_euler(spec: SurgerySpec, comps: list[ComplementReport]) -> dict:
    # disjoint curves have disjoint ribbon neighbourhoods
    chi_s = 2 - 2 * spec.rep.genus
    v = sum(c.euler["V"] for c in comps)
    disks = sum(c.euler["disk_walks"] for c in comps)
    return {"V": v, "chi_surface": chi_s, "chi_complement": chi_s + v, "disk_walks": disks,
            "chi_remaining": chi_s + v - disks}


@dataclass
class ClassReport:
    orbit: str
    witness: int | None
    kind: Kind
    cardinality: int | str | None  # 2m, "infinite", or None when undecided
    partners: list[dict] = field(default_factory=list)
    ladder: list[dict] = field(default_factory=list)
    intersections: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "orbit": self.orbit,
            "witness": self.witness,
            "kind": self.kind.value,
            "cardinality": self.cardinality,
            "partners": list(self.partners),
            "ladder": list(self.ladder),
            "intersections": list(self.intersections),
            "notes": list(self.notes),
        }


def _orbit_class(pres: SurfacePresentation, beta) -> CyclicWord:
    c = pres.canonical(as_word(beta, pres.genus))
    if not is_primitive(c):
        raise WordError(f"non-primitive orbit rejected: {c}")
    return c


def _partner(pres: SurfacePresentation, c: CyclicWord) -> CyclicWord:
    p = pres.canonical(invert(c))
    if p == c:
        raise AssertionError(f"{c} is conjugate to its inverse")
    return p


def classify_unsurgered(surface, beta) -> ClassReport:
    pres = surface.presentation if isinstance(surface, FuchsianRep) else surface
    if isinstance(pres, int):
        pres = SurfacePresentation(pres)
    c = _orbit_class(pres, beta)
    p = _partner(pres, c)
    return ClassReport(str(c), None, Kind.B, 2, [{"curve": str(p), "sheet": 0}])


def _ladder(c: CyclicWord, partner: CyclicWord, k: int, epsilon: float) -> list[dict]:
    out = []
    for i, pt, sign in enumerate_class(StripModel(epsilon), k):
        out.append({"index": i, "s": pt.s, "u": pt.u, "orientation": sign,
                    "homotopic_to": str(c if sign > 0 else partner)})
    return out


def classify_orbit(spec: SurgerySpec, beta, cache: IntersectionCache | None = None,
                   radius: int | None = None, ladder_k: int = 3,
                   epsilon: float = 0.2) -> ClassReport:
    pres = spec.presentation
    c = _orbit_class(pres, beta)
    partner = _partner(pres, c)
    inters, notes = [], []
    total = 0
    for i, a in enumerate(spec.curves):
        if c == a or partner == a:
            notes.append(f"orbit runs along surgery curve {i}")
        try:
            n = intersection_number(c, a, spec.rep, radius, cache)
        except RadiusExhausted as exc:
            return ClassReport(str(c), None, Kind.UNDECIDED, None,
                               intersections=inters, notes=notes + [str(exc)])
        inters.append({"curve": i, "count": n.count, "radius_used": n.radius_used})
        total += n.count
    if total > 0:
        return ClassReport(str(c), total, Kind.A, "infinite",
                           ladder=_ladder(c, partner, ladder_k, epsilon),
                           intersections=inters, notes=notes)
    m = spec.cover_degree
    partners = [{"curve": str(c), "sheet": s} for s in range(1, m)]
    partners += [{"curve": str(partner), "sheet": s} for s in range(m)]
    return ClassReport(str(c), 0, Kind.B, 2 * m, partners, intersections=inters, notes=notes)


@dataclass
class BatchReport:
    reports: list[ClassReport]
    rejected: list[dict] = field(default_factory=list)

    def partition(self, kind: Kind) -> list[ClassReport]:
        return [r for r in self.reports if r.kind is kind]

    @property
    def summary(self) -> dict:
        return {"A": len(self.partition(Kind.A)), "B": len(self.partition(Kind.B)),
                "undecided": len(self.partition(Kind.UNDECIDED)), "rejected": len(self.rejected)}

    def to_json(self) -> dict:
        return {"reports": [r.to_json() for r in self.reports],
                "rejected": list(self.rejected), "summary": self.summary}


def _classify_job(args):
    spec, beta, radius, ladder_k, epsilon = args
    try:
        return classify_orbit(spec, beta, None, radius, ladder_k, epsilon), None
    except (WordError, IdentityError) as exc:
        return None, str(exc)


def batch_classify(spec: SurgerySpec, betas, cache: IntersectionCache | None = None,
                   radius: int | None = None, ladder_k: int = 3,
                   epsilon: float = 0.2, workers: int = 1) -> BatchReport:
    """Classify orbits, reporting in input order.  Malformed, trivial or
    non-primitive words are listed as rejected instead of aborting the batch.

    With ``workers > 1`` orbits are classified in a process pool; workers do
    not touch the cache, the parent writes their counts back afterwards.
    """
    betas = list(betas)
    if workers > 1 and len(betas) > 1:
        jobs = [(spec, b, radius, ladder_k, epsilon) for b in betas]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_classify_job, jobs))
    else:
        results = []
        for b in betas:
            try:
                results.append((classify_orbit(spec, b, cache, radius, ladder_k, epsilon), None))
            except (WordError, IdentityError) as exc:
                results.append((None, str(exc)))
    reports, rejected = [], []
    for b, (r, err) in zip(betas, results):
        if r is None:
            rejected.append({"orbit": b if isinstance(b, str) else format_word(as_word(b)),
                             "error": err})
            continue
        reports.append(r)
        if workers > 1 and cache is not None:
            for entry in r.intersections:
                key = sorted((r.orbit, str(spec.curves[entry["curve"]])))
                cache.put(spec.rep.genus, *key, entry["count"], entry["radius_used"])
    return BatchReport(reports, rejected)


def disjoint_generators(spec: SurgerySpec, cache: IntersectionCache | None = None) -> list[int]:
    """Generators whose geodesics miss every surgery curve."""
    out = []
    for x in spec.presentation.generators:
        c = spec.presentation.canonical(as_word((x,)))
        if all(intersection_number(c, a, spec.rep, cache=cache).count == 0 for a in spec.curves):
            out.append(x)
    return out


def witness_words(spec: SurgerySpec, k: int, cache: IntersectionCache | None = None,
                  max_length: int = 6) -> dict[str, list[str]]:
    """k fresh orbits of each kind, each certified by classify_orbit.

    Class-B candidates are words in the generators disjoint from the
    surgery curves; class-A candidates are any words, which mostly cross.
    """
    pres = spec.presentation
    free = set(disjoint_generators(spec, cache))
    found: dict[str, list[str]] = {"A": [], "B": []}
    for n in range(1, max_length + 1):
        for c in classes_of_length(pres, n):
            if len(found["A"]) >= k and len(found["B"]) >= k:
                return found
            want_b = len(found["B"]) < k and all(abs(x) in free for x in c.letters)
            want_a = len(found["A"]) < k
            if not (want_a or want_b):
                continue
            r = classify_orbit(spec, c, cache)
            if r.kind is Kind.A and want_a:
                found["A"].append(r.orbit)
            elif r.kind is Kind.B and want_b:
                found["B"].append(r.orbit)
    if len(found["A"]) < k or len(found["B"]) < k:
        log.warning("witness search stopped at length %d with %s", max_length,
                    {key: len(v) for key, v in found.items()})
    return found
