import pytest

from freehom.classifier import (
    Kind, SurgerySpec, batch_classify, check_preconditions, classify_orbit, classify_unsurgered,
    disjoint_generators, witness_words,
)
from freehom.words import WordError, parse_word

SEP = "a1 b1 A1 B1"


@pytest.fixture(scope="module")
def sep_spec():
    return SurgerySpec.from_words(2, [SEP], [7])


def test_preconditions_ok(sep_spec):
    pre = check_preconditions(sep_spec)
    assert pre.ok, pre.errors
    assert pre.union_complement.value == "true"


def test_preconditions_filling():
    pre = check_preconditions(SurgerySpec.from_words(2, ["a1 a2 b1 b2"], [3]))
    assert not pre.ok
    assert any(e.startswith("α fills S") for e in pre.errors)


def test_preconditions_crossing_curves():
    pre = check_preconditions(SurgerySpec.from_words(2, ["a1", "b1"], [1, 1]))
    assert any("curves not disjoint" in e for e in pre.errors)


def test_preconditions_other_failures():
    pre = check_preconditions(SurgerySpec.from_words(2, [SEP], [0], positivity=False))
    assert "positivity assumption not granted" in pre.errors
    assert any("coefficient 0" in e for e in pre.errors)
    pre = check_preconditions(SurgerySpec.from_words(2, ["a1", "A1"], [1, 1]))
    assert any("same closed geodesic" in e for e in pre.errors)
    pre = check_preconditions(SurgerySpec.from_words(2, ["a1 b2 A1 B2 a2"], [1]))
    assert any("annuli and disks" in e for e in pre.errors)


def test_two_disjoint_curves_ok():
    pre = check_preconditions(SurgerySpec.from_words(2, ["a1", "a2"], [1, 2]))
    assert pre.ok, pre.errors
    assert pre.pairwise == [{"i": 0, "j": 1, "count": 0}]


def test_classify_examples(sep_spec):
    r = classify_orbit(sep_spec, "a1")
    assert (r.kind, r.witness, r.cardinality) == (Kind.B, 0, 2)
    assert r.partners == [{"curve": "A1", "sheet": 0}]
    r = classify_orbit(sep_spec, "a1 a2")
    assert r.kind is Kind.A and r.witness > 0 and r.cardinality == "infinite"
    assert len(r.ladder) == 7
    assert [x["orientation"] for x in r.ladder] == [-1, 1, -1, 1, -1, 1, -1]


def test_orbit_along_surgery_curve(sep_spec):
    r = classify_orbit(sep_spec, SEP)
    assert r.kind is Kind.B
    assert "orbit runs along surgery curve 0" in r.notes


@pytest.mark.parametrize("m", [1, 2, 3])
def test_cover_degree(m):
    spec = SurgerySpec.from_words(2, [SEP], [7], cover_degree=m)
    r = classify_orbit(spec, "a1")
    assert r.cardinality == 2 * m
    assert len(r.partners) == 2 * m - 1


def test_unsurgered():
    r = classify_unsurgered(2, "a1")
    assert r.partners[0]["curve"] == "A1"
    r = classify_unsurgered(2, "a1 b1")
    p = parse_word(r.partners[0]["curve"], 2)
    assert classify_unsurgered(2, p).partners[0]["curve"] == r.orbit
    with pytest.raises(WordError):
        classify_unsurgered(2, "a1 A1")


def test_non_primitive_rejected(sep_spec):
    with pytest.raises(WordError):
        classify_orbit(sep_spec, "a1 a1")
    batch = batch_classify(sep_spec, ["a1", "a1 a1", "zz", "a1 A1", "a1 a2"])
    assert [r.orbit for r in batch.reports] == ["a1", "a1a2"]
    assert batch.summary == {"A": 1, "B": 1, "undecided": 0, "rejected": 3}


def test_radius_exhaustion_is_undecided(sep_spec, monkeypatch):
    import freehom.classifier as cl
    from freehom.intersection import RadiusExhausted

    def boom(*a, **k):
        raise RadiusExhausted("unstable")

    monkeypatch.setattr(cl, "intersection_number", boom)
    r = classify_orbit(sep_spec, "a1 a2")
    assert r.kind is Kind.UNDECIDED and r.cardinality is None and r.witness is None


def test_witness_words(sep_spec):
    assert set(disjoint_generators(sep_spec)) == {1, 2, 3, 4}
    found = witness_words(sep_spec, 5)
    assert len(found["A"]) == 5 and len(found["B"]) == 5
    for w in found["A"]:
        assert classify_orbit(sep_spec, w).witness > 0
    for w in found["B"]:
        assert classify_orbit(sep_spec, w).witness == 0


def test_parallel_batch_matches_serial(sep_spec, tmp_path):
    from freehom.cache import IntersectionCache

    betas = ["a1", "a1 a2", "b2", "a1 a1", "b1 a2 B2"]
    serial_cache = IntersectionCache(tmp_path / "s.json")
    par_cache = IntersectionCache(tmp_path / "p.json")
    serial = batch_classify(sep_spec, betas, serial_cache)
    parallel = batch_classify(sep_spec, betas, par_cache, workers=2)
    assert parallel.to_json() == serial.to_json()
    assert par_cache.entries == serial_cache.entries
