import math
import random

import pytest

from freehom.cache import IntersectionCache
from freehom.geometry import FuchsianRep
from freehom.intersection import (
    SameCurveError, SharedAxisError, axes_linked, intersection_number,
    self_intersection_number, tracing_oracle_count,
)
from freehom.geometry import Axis, axis_endpoints
from freehom.words import conjugacy_classes, invert, parse_word


def test_axes_linked_examples():
    assert axes_linked(Axis(0.0, math.pi), Axis(math.pi / 2, 3 * math.pi / 2))
    assert not axes_linked(Axis(0.0, math.pi / 2), Axis(math.pi, 3 * math.pi / 2))
    with pytest.raises(SharedAxisError):
        axes_linked(Axis(0.0, math.pi), Axis(0.0, math.pi).reversed())


def test_axis_with_its_inverse_shares(rep2):
    m = rep2.evaluate("a1 b2")
    with pytest.raises(SharedAxisError):
        axes_linked(axis_endpoints(m), axis_endpoints(rep2.evaluate("B2 A1")))


@pytest.mark.parametrize("w,v,expected", [("a1", "b1", 1), ("a1", "a2", 0), ("a1", "b2", 0),
                                          ("a1b1A1B1", "a1", 0), ("a1b1A1B1", "a1a2", 2)])
def test_known_counts(rep2, w, v, expected):
    assert intersection_number(w, v, rep2).count == expected
    assert tracing_oracle_count(w, v, rep2) == expected


def test_symmetry_and_invariance(rep2):
    p = rep2.presentation
    w, v = parse_word("a1 b2 A1", 2), parse_word("b1 a2 B2", 2)
    n = intersection_number(w, v, rep2).count
    assert intersection_number(v, w, rep2).count == n
    assert intersection_number(invert(w), v, rep2).count == n
    g = parse_word("a2 b1", 2)
    assert intersection_number(g * w * invert(g), v, rep2).count == n
    assert intersection_number(p.canonical(w), p.canonical(v), rep2).count == n


@pytest.mark.parametrize("g", ["a1", "b1", "a2", "b2"])
def test_generators_are_simple(rep2, g):
    assert self_intersection_number(g, rep2) == 0
    assert tracing_oracle_count(g, g, rep2) == 0


def test_self_intersection_matches_oracle(rep2):
    for word in ("a1 b1", "a1 b1 A1 B1", "a1 a2 b1 b2", "a1 a1 b1", "a1 b2 A1 B2 a2"):
        assert self_intersection_number(word, rep2) == tracing_oracle_count(word, word, rep2)


def test_non_primitive_rejected(rep2):
    with pytest.raises(ValueError):
        self_intersection_number("a1 b1 a1 b1", rep2)


def test_same_curve_rejected_by_oracle(rep2):
    with pytest.raises(SameCurveError):
        tracing_oracle_count("a1 b2 A2", "b2 A2 a1", rep2)


def test_radius_reported(rep2):
    r = intersection_number("a1", "b1", rep2)
    assert r.radius_used > 0
    assert r.certificates


def test_cache_read_through(tmp_path, rep2):
    cache = IntersectionCache(tmp_path / "c.json")
    cold = intersection_number("a1 a2", "b1 b2", rep2, cache=cache)
    cache.save()
    warm_cache = IntersectionCache(tmp_path / "c.json")
    warm = intersection_number("a1 a2", "b1 b2", rep2, cache=warm_cache)
    assert warm.cached and not cold.cached
    assert (warm.count, warm.radius_used) == (cold.count, cold.radius_used)


def test_genus3_sample_matches_oracle(rep3):
    cl = conjugacy_classes(rep3.presentation, 3)
    rng = random.Random(3)
    for _ in range(40):
        a, b = rng.sample(cl, 2)
        if rep3.presentation.canonical(invert(b)) == a:
            continue
        assert intersection_number(a, b, rep3).count == tracing_oracle_count(a, b, rep3)
