"""Job files, classification reports and the cache plumbing around them.

Every JSON document carries ``"schema_version": 1``; field names are listed
in docs/schema.md.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .cache import IntersectionCache
from .classifier import (
    ASSUMPTIONS, Kind, SurgerySpec, batch_classify, check_preconditions,
)
from .figures import emit_strip_svg, emit_surface_svg
from .intersection import trace_pair
from .orbit_models import StripModel, SuspensionModel, singleton_check, strip_scene
from .words import WordError, parse_word

SCHEMA_VERSION = 1


class JobSpecError(ValueError):
    """A job file that does not describe a valid surgery job."""

    def __init__(self, field_path: str, message: str, line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field_path}: {message}{where}")
        self.field = field_path
        self.line = line


@dataclass
class JobOptions:
    radius: int | None = None
    epsilon: float = 0.2
    ladder_k: int = 3
    emit_figures: bool = False
    cache: str | None = None
    workers: int = 1


@dataclass
class JobSpec:
    genus: int
    curves: list[str]
    coefficients: list[int]
    positivity: bool
    cover_degree: int = 1
    orbits: list[str] = field(default_factory=list)
    options: JobOptions = field(default_factory=JobOptions)

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "surface": {"genus": self.genus},
            "curves": list(self.curves),
            "coefficients": list(self.coefficients),
            "positivity": self.positivity,
            "cover_degree": self.cover_degree,
            "orbits": list(self.orbits),
            "options": asdict(self.options),
        }

    @classmethod
    def from_json(cls, data: dict) -> "JobSpec":
        if not isinstance(data, dict):
            raise JobSpecError("<root>", "expected a JSON object")
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise JobSpecError("schema_version", f"unsupported version {version!r}")
        surface = _get(data, "surface", dict)
        genus = _get(surface, "genus", int, "surface.genus")
        if genus < 2:
            raise JobSpecError("surface.genus", f"genus must be >= 2, got {genus}")
        curves = _str_list(data, "curves")
        coeffs = _get(data, "coefficients", list)
        if not all(isinstance(n, int) and not isinstance(n, bool) for n in coeffs):
            raise JobSpecError("coefficients", "expected a list of integers")
        positivity = _get(data, "positivity", bool)
        cover = data.get("cover_degree", 1)
        if not isinstance(cover, int) or isinstance(cover, bool):
            raise JobSpecError("cover_degree", "expected an integer")
        orbits = _str_list(data, "orbits") if "orbits" in data else []
        raw = data.get("options", {}) or {}
        if not isinstance(raw, dict):
            raise JobSpecError("options", "expected an object")
        unknown = set(raw) - set(JobOptions.__dataclass_fields__)
        if unknown:
            raise JobSpecError("options", f"unknown keys {sorted(unknown)}")
        opts = JobOptions(**raw)
        for name, typ in (("ladder_k", int), ("emit_figures", bool), ("workers", int)):
            if not isinstance(getattr(opts, name), typ):
                raise JobSpecError(f"options.{name}", f"expected {typ.__name__}")
        if opts.radius is not None and not isinstance(opts.radius, int):
            raise JobSpecError("options.radius", "expected an integer or null")
        if not isinstance(opts.epsilon, (int, float)):
            raise JobSpecError("options.epsilon", "expected a number")
        opts.epsilon = float(opts.epsilon)
        # malformed orbits are reported per orbit; malformed curves stop the job
        for i, w in enumerate(curves):
            try:
                parse_word(w, genus)
            except WordError as exc:
                raise JobSpecError(f"curves[{i}]", str(exc)) from None
        return cls(genus, curves, list(coeffs), positivity, cover, orbits, opts)

    @classmethod
    def load(cls, path) -> "JobSpec":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise JobSpecError("<file>", exc.msg, exc.lineno) from None
        return cls.from_json(data)

    def surgery_spec(self) -> SurgerySpec:
        try:
            return SurgerySpec.from_words(self.genus, self.curves, self.coefficients,
                                          self.positivity, self.cover_degree)
        except WordError as exc:
            raise JobSpecError("curves", str(exc)) from None


def _get(obj: dict, key: str, typ, path: str | None = None):
    path = path or key
    if key not in obj:
        raise JobSpecError(path, "missing field")
    val = obj[key]
    if typ is int and isinstance(val, bool) or not isinstance(val, typ):
        raise JobSpecError(path, f"expected {typ.__name__}")
    return val


def _str_list(obj: dict, key: str) -> list[str]:
    val = _get(obj, key, list)
    if not all(isinstance(x, str) for x in val):
        raise JobSpecError(key, "expected a list of word strings")
    return list(val)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def build_report(job: JobSpec, cache: IntersectionCache | None = None,
                 figure_dir: str | os.PathLike | None = None) -> tuple[dict, int]:
    """Classification report for a job and the matching exit status."""
    spec = job.surgery_spec()
    opts = job.options
    pre = check_preconditions(spec, cache, opts.radius)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "classification_report",
        "tool": {"name": "freehom", "version": __version__},
        "job": job.to_json(),
        "assumptions": list(ASSUMPTIONS),
        "preconditions": pre.to_json(),
        "orbits": [],
        "rejected": [],
        "summary": {"A": 0, "B": 0, "undecided": 0, "rejected": 0},
    }
    undecided = 0
    if pre.ok and job.orbits:
        batch = batch_classify(spec, job.orbits, cache, opts.radius, opts.ladder_k, opts.epsilon,
                               opts.workers)
        doc["orbits"] = [r.to_json() for r in batch.reports]
        doc["rejected"] = batch.rejected
        doc["summary"] = batch.summary
        undecided = len(batch.partition(Kind.UNDECIDED))
    elif not pre.ok:
        doc["rejected"] = [{"orbit": w, "error": "preconditions failed"} for w in job.orbits]

    model = StripModel(opts.epsilon)
    scene = strip_scene(model, opts.ladder_k)
    sus = singleton_check(SuspensionModel(), (0.0, 0.0, 0.0), (1.0, 0.0, 0.0), t_range=(0.0, 20.0))
    doc["models"] = {"strip_scene": scene, "suspension_check": sus.to_json()}

    if figure_dir is not None:
        doc["figures"] = _emit_figures(spec, scene, figure_dir)
    status = 0 if pre.ok and undecided == 0 else 1
    return doc, status


def _emit_figures(spec: SurgerySpec, scene: dict, figure_dir) -> list[dict]:
    out = [emit_strip_svg(scene, Path(figure_dir) / "strip.svg")]
    if spec.curves:
        tw, _, crossings = trace_pair(spec.rep, spec.curves[0])
        info = emit_surface_svg(spec.rep, [tw], Path(figure_dir) / "surface.svg",
                                [c.point for c in crossings])
        out.append(info)
    for item in out:
        item["path"] = os.path.basename(item["path"])
    return out


def run_classify(job_path, out_path=None, cache_path=None, figure_dir=None) -> tuple[dict, int]:
    """Load a job file, classify, write the report; returns (report, exit status)."""
    job = JobSpec.load(job_path)
    cache = IntersectionCache(cache_path or job.options.cache) \
        if (cache_path or job.options.cache) else None
    if figure_dir is None and job.options.emit_figures:
        figure_dir = Path(out_path).parent if out_path else Path(job_path).parent
    doc, status = build_report(job, cache, figure_dir)
    if cache is not None:
        cache.save()
    if out_path is not None:
        Path(out_path).write_text(dumps(doc))
    return doc, status
