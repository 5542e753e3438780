import json

import pytest

from freehom.cli import main
from freehom.figures import emit_strip_svg, emit_surface_svg
from freehom.intersection import trace_pair, tracing_oracle_count
from freehom.orbit_models import StripModel, strip_scene
from freehom.reports import JobSpec, JobSpecError, run_classify
from freehom.words import parse_word

JOB = {
    "surface": {"genus": 2},
    "curves": ["a1b1A1B1"],
    "coefficients": [7],
    "positivity": True,
    "orbits": ["a1", "a1 a2", "b1 A1 B1"],
}


def write(tmp_path, doc, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_jobspec_roundtrip():
    job = JobSpec.from_json(JOB)
    again = JobSpec.from_json(json.loads(json.dumps(job.to_json())))
    assert again == job
    assert again.to_json() == job.to_json()


@pytest.mark.parametrize("patch,field", [
    ({"surface": {"genus": 1}}, "surface.genus"),
    ({"curves": ["a1", "q7"]}, "curves[1]"),
    ({"coefficients": ["7"]}, "coefficients"),
    ({"positivity": "yes"}, "positivity"),
    ({"options": {"bogus": 1}}, "options"),
    ({"schema_version": 2}, "schema_version"),
])
def test_jobspec_errors_name_field(patch, field):
    with pytest.raises(JobSpecError) as exc:
        JobSpec.from_json({**JOB, **patch})
    assert exc.value.field == field


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "surface": {"genus": 2},\n  "curves": [\n')
    with pytest.raises(JobSpecError) as exc:
        JobSpec.load(path)
    assert exc.value.line is not None


def test_report_contents(tmp_path):
    doc, status = run_classify(write(tmp_path, JOB))
    assert status == 0
    assert doc["schema_version"] == 1
    assert doc["summary"] == {"A": 1, "B": 2, "undecided": 0, "rejected": 0}
    assert doc["preconditions"]["ok"]
    assert doc["models"]["strip_scene"]["kind"] == "strip_scene"


def test_filling_job_fails(tmp_path):
    doc, status = run_classify(write(tmp_path, {**JOB, "curves": ["a1a2b1b2"]}))
    assert status != 0
    assert any("α fills S" in e for e in doc["preconditions"]["errors"])


def test_empty_orbit_list(tmp_path):
    doc, status = run_classify(write(tmp_path, {**JOB, "orbits": []}))
    assert status == 0 and doc["orbits"] == [] and doc["preconditions"]["ok"]


def test_warm_equals_cold(tmp_path):
    job = write(tmp_path, JOB)
    cache = tmp_path / "cache.json"
    run_classify(job, tmp_path / "cold.json", cache)
    assert cache.exists()
    run_classify(job, tmp_path / "warm.json", cache)
    run_classify(job, tmp_path / "nocache.json")
    cold = (tmp_path / "cold.json").read_bytes()
    assert cold == (tmp_path / "warm.json").read_bytes() == (tmp_path / "nocache.json").read_bytes()


def test_strip_svg_is_byte_stable(tmp_path):
    scene = strip_scene(StripModel(0.2), 2)
    info = emit_strip_svg(scene, tmp_path / "a.svg")
    emit_strip_svg(scene, tmp_path / "b.svg")
    assert info["points"] == 5
    data = (tmp_path / "a.svg").read_bytes()
    assert data == (tmp_path / "b.svg").read_bytes()
    assert data.startswith(b"<?xml") and b"<svg" in data


def test_surface_svg(tmp_path, rep2):
    w, v = parse_word("a1 b1 A1 B1", 2), parse_word("a1 a2", 2)
    tw, tv, crossings = trace_pair(rep2, w, v)
    info = emit_surface_svg(rep2, [tw, tv], tmp_path / "s.svg", [c.point for c in crossings])
    assert info["polygon_vertices"] == 8
    assert info["crossing_marks"] == tracing_oracle_count(w, v, rep2) == 2
    empty = emit_surface_svg(rep2, [], tmp_path / "e.svg")
    assert empty["traces"] == 0 and empty["crossing_marks"] == 0


def test_cli_classify_with_figures(tmp_path, capsys):
    job = write(tmp_path, JOB)
    assert main(["classify", str(job), "--emit-svg", str(tmp_path / "f1")]) == 0
    first = capsys.readouterr().out
    assert main(["classify", str(job), "--emit-svg", str(tmp_path / "f2")]) == 0
    assert capsys.readouterr().out == first
    for name in ("strip.svg", "surface.svg"):
        assert (tmp_path / "f1" / name).read_bytes() == (tmp_path / "f2" / name).read_bytes()


def test_cli_verbs(capsys):
    assert main(["--genus", "2", "intersect", "a1", "b1", "--oracle"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert (out["count"], out["oracle_count"]) == (1, 1)
    assert main(["intersect", "--genus", "3", "a3", "b3"]) == 0
    assert json.loads(capsys.readouterr().out)["genus"] == 3
    assert main(["fills", "a1a2b1b2"]) == 0
    assert json.loads(capsys.readouterr().out)["fills"] is True
    assert main(["strip-model", "--k", "2"]) == 0
    assert len(json.loads(capsys.readouterr().out)["ladder"]) == 5
    assert main(["suspension-check"]) == 0
    assert json.loads(capsys.readouterr().out)["unbounded"] is True
    assert main(["trace", "a1 b1"]) == 0
    assert json.loads(capsys.readouterr().out)["schema_version"] == 1


def test_cli_errors(tmp_path, capsys):
    assert main(["intersect", "a1", "c9"]) == 2
    assert main(["classify", str(tmp_path / "missing.json")]) == 2
    bad = write(tmp_path, {**JOB, "surface": {"genus": "two"}})
    assert main(["classify", str(bad)]) == 2
    assert "surface.genus" in capsys.readouterr().err
