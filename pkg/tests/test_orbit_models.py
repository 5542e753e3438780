import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freehom.orbit_models import (
    FlowDescriptor, ModelKind, OrbitPoint, StripModel, SuspensionModel, enumerate_class,
    fixed_points_in, g_apply, g_inverse, invariant_stable_leaves, is_fixed, metric_distance_lower_bound,
    model_kind, next_orbit, prev_orbit, separation_lower_bound, singleton_check, strip_scene,
    suspension_flow,
)

M = StripModel(0.2)
LAM = (3 + math.sqrt(5)) / 2


def test_strip_point_validation():
    with pytest.raises(ValueError):
        OrbitPoint(0.0, 1.0)
    with pytest.raises(ValueError):
        StripModel(0.5)


def test_g_action():
    assert g_apply(M, OrbitPoint(0.0, 0.0)) == OrbitPoint(0.0, 0.0)
    p = g_apply(M, OrbitPoint(0.5, 0.0))
    assert (p.s, p.u) == pytest.approx((0.7, 0.0), abs=1e-15)


def test_iteration_converges_to_next_fixed_point():
    p = OrbitPoint(0.5, 0.25)
    prev = p
    for _ in range(20000):
        p = g_apply(M, p)
        assert p.s >= prev.s and p.u >= prev.u
        prev = p
    assert p.s == pytest.approx(1.0, abs=1e-3) and p.u == pytest.approx(1.0, abs=1e-3)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-0.99, 0.99))
def test_g_inverse(s, d):
    p = OrbitPoint(s, s + d)
    q = g_inverse(M, g_apply(M, p))
    assert (q.s, q.u) == pytest.approx((p.s, p.u), abs=1e-10)


def test_next_prev():
    n = next_orbit(M, OrbitPoint(0.0, 0.0))
    assert (n.s, n.u) == (1.0, 1.0)
    p = OrbitPoint(3.0, 3.0)
    assert next_orbit(M, prev_orbit(M, p)) == p


def test_invariant_leaves():
    assert invariant_stable_leaves(StripModel(0.2, 5)) == [float(i) for i in range(-5, 6)]
    assert fixed_points_in(M, 0.0 + 1e-3, 1.0 - 1e-3) == []
    for eps in (0.05, 0.2, 0.3):
        assert invariant_stable_leaves(StripModel(eps, 3)) == [float(i) for i in range(-3, 4)]


def test_enumerate_class():
    assert [(i, (p.s, p.u), o) for i, p, o in enumerate_class(M, 0)] == [(0, (0.0, 0.0), 1)]
    ladder = enumerate_class(M, 2)
    assert len({(p.s, p.u) for _, p, _ in ladder}) == 5
    assert all(is_fixed(M, p) for _, p, _ in ladder)
    signs = [o for _, _, o in ladder]
    assert all(a == -b for a, b in zip(signs, signs[1:]))


def test_strip_scene_chart():
    scene = strip_scene(M, 2)
    assert scene["schema_version"] == 1
    assert len(scene["ladder"]) == 5
    for leaf in scene["unstable_leaves"]:
        (xa, ya), (xb, yb) = leaf["from"], leaf["to"]
        assert (xa, xb) == pytest.approx((0.0, 1.0))
        assert (yb - ya) / (xb - xa) == pytest.approx(2.0)
    for pt in scene["ladder"]:
        assert 0 < pt["x"] < 1


def test_suspension_flow():
    sm = SuspensionModel()
    assert suspension_flow(sm, (0, 0, 0), 1) == (0, 0, 1)
    assert suspension_flow(sm, (1, 2, 3), 0) == (1, 2, 3)
    assert suspension_flow(sm, suspension_flow(sm, (1, 2, 3), 0.5), 0.25) == suspension_flow(sm, (1, 2, 3), 0.75)
    assert sm.lam1 == pytest.approx(LAM, rel=1e-15)
    # independent eigenvalue check
    assert max(np.linalg.eigvals(np.array(sm.monodromy, float))) == pytest.approx(LAM, rel=1e-12)


def test_separation_bound():
    sm = SuspensionModel()
    p = (0.0, 0.0, 0.0)
    assert separation_lower_bound(sm, p, (1.0, 0.0, 0.0), 0.0) == 1.0
    assert separation_lower_bound(sm, p, (1.0, 0.0, 0.0), 10.0) == pytest.approx(LAM ** 10, rel=1e-12)
    r = math.log(separation_lower_bound(sm, p, (1.0, 0.0, 0.0), 11.0)) - \
        math.log(separation_lower_bound(sm, p, (1.0, 0.0, 0.0), 10.0))
    assert r == pytest.approx(math.log(LAM), abs=1e-9)
    assert separation_lower_bound(sm, p, (0.0, 1.0, 0.0), -30.0) > 1e6


def test_metric_bound_grows_and_is_below_formula():
    sm = SuspensionModel()
    p, q = (0.0, 0.0, 0.0), (1.0, 0.0, 0.0)
    vals = [metric_distance_lower_bound(sm, p, q, t) for t in (0, 5, 10, 20)]
    assert vals == sorted(vals) and vals[-1] > 10
    assert all(metric_distance_lower_bound(sm, p, q, t) <= separation_lower_bound(sm, p, q, t)
               for t in (0, 5, 10, 20))


def test_singleton_check():
    sm = SuspensionModel()
    rep = singleton_check(sm, (0, 0, 0), (1, 0, 0), T=20)
    assert rep.supremum >= LAM ** 20 * (1 - 1e-12)
    assert rep.forward_rate == pytest.approx(math.log(LAM), abs=1e-6)
    assert rep.unbounded
    with pytest.raises(ValueError):
        singleton_check(sm, (0, 0, 0), (0, 0, 1))


def test_model_kind():
    assert model_kind("surgered_geodesic") is ModelKind.SKEWED
    assert model_kind(FlowDescriptor.GEODESIC) is ModelKind.SKEWED
    assert model_kind("suspension") is ModelKind.PRODUCT
    with pytest.raises(ValueError):
        model_kind("horocycle")
