"""Planar models of the orbit space of an R-covered Anosov flow.

Skewed model
    Points are pairs (s, u): the stable leaf through the point is {s = c}
    and the unstable leaf is {u = c}.  The orbit space is the strip
    |s - u| < 1, so the unstable leaf {u = c} meets exactly the open interval
    of stable leaves (c - 1, c + 1).  A deck transformation acts on both
    coordinates by the same increasing map whose fixed set is the integers.

Product model
    The suspension of a hyperbolic toral automorphism, lifted to R^2 x R with
    the metric  lam1^(2t) dx^2 + lam2^(-2t) dy^2 + dt^2  and the vertical flow
    (x, y, t0) -> (x, y, t0 + t).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

SCAN_STEP = 1e-4


# -- skewed strip ------------------------------------------------------------------

@dataclass(frozen=True)
class StripModel:
    epsilon: float = 0.2
    window: int = 10

    def __post_init__(self):
        if not 0 < self.epsilon < 1 / math.pi:
            raise ValueError(f"pinch epsilon must lie in (0, 1/pi), got {self.epsilon}")
        if self.window < 1:
            raise ValueError("window must be >= 1")

    def f(self, t: float) -> float:
        return t + self.epsilon * math.sin(math.pi * t) ** 2

    def df(self, t: float) -> float:
        return 1 + self.epsilon * math.pi * math.sin(2 * math.pi * t)

    def displacement(self, t):
        """f(t) - t, vectorised."""
        return self.epsilon * np.sin(np.pi * np.asarray(t)) ** 2


@dataclass(frozen=True)
class OrbitPoint:
    s: float
    u: float

    def __post_init__(self):
        if not abs(self.s - self.u) < 1:
            raise ValueError(f"({self.s}, {self.u}) is outside the strip |s - u| < 1")

    def stable_interval(self) -> tuple[float, float]:
        """Stable leaves met by the unstable leaf through this point."""
        return (self.u - 1, self.u + 1)


def g_apply(m: StripModel, p: OrbitPoint) -> OrbitPoint:
    return OrbitPoint(m.f(p.s), m.f(p.u))


def g_inverse(m: StripModel, p: OrbitPoint) -> OrbitPoint:
    return OrbitPoint(_f_inverse(m, p.s), _f_inverse(m, p.u))


def _f_inverse(m: StripModel, y: float) -> float:
    lo, hi = y - m.epsilon, y
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if m.f(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def is_fixed(m: StripModel, p: OrbitPoint, tol: float = 1e-12) -> bool:
    q = g_apply(m, p)
    return abs(q.s - p.s) <= tol and abs(q.u - p.u) <= tol


def fixed_points_in(m: StripModel, a: float, b: float, step: float = SCAN_STEP) -> list[float]:
    """Fixed points of the pinch map in [a, b] by grid scan plus bisection.

    Sign changes of f(t) - t are bisected directly.  Touching zeros, where
    f(t) - t has a local minimum at level ~0, are located by bisecting the
    derivative's sign change and accepted when the displacement there
    vanishes to rounding.
    """
    # pad by a step so zeros sitting on an endpoint are interior minima
    lo, hi = a - step, b + step
    n = max(3, int(math.ceil((hi - lo) / step)) + 1)
    ts = np.linspace(lo, hi, n)
    h = m.displacement(ts)
    roots: list[float] = []
    zero = np.nonzero(h[:-1] == 0)[0]
    roots += [float(ts[k]) for k in zero]
    for k in np.nonzero(h[:-1] * h[1:] < 0)[0]:
        roots.append(_bisect(lambda t: m.f(t) - t, ts[k], ts[k + 1]))
    if h[-1] == 0:
        roots.append(float(ts[-1]))
    # touching zeros: interior local minima of the sampled displacement
    dh = lambda t: m.df(t) - 1
    floor = 4 * m.epsilon * (math.pi * step) ** 2
    mid = h[1:-1]
    cand = np.nonzero((mid <= h[:-2]) & (mid <= h[2:]) & (mid < floor))[0] + 1
    for k in cand:
        if dh(ts[k - 1]) <= 0 <= dh(ts[k + 1]):
            r = _bisect(dh, ts[k - 1], ts[k + 1])
            if abs(m.f(r) - r) <= 1e-15:
                roots.append(r)
    # a bisected root within rounding of a float that is fixed exactly is that float
    roots = [float(round(r)) if abs(r - round(r)) < 1e-9 and m.f(round(r)) == round(r) else r
             for r in roots]
    roots = sorted(r for r in roots if a - 1e-12 <= r <= b + 1e-12)
    out: list[float] = []
    for r in roots:
        if not out or r - out[-1] > step:
            out.append(float(r))
    return out


def _bisect(fn, lo: float, hi: float) -> float:
    flo = fn(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = fn(mid)
        if (fm < 0) == (flo < 0) and fm != 0:
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def invariant_stable_leaves(m: StripModel, window: int | None = None) -> list[float]:
    """Stable leaves {s = c}, |c| <= N, mapped to themselves by g."""
    n = m.window if window is None else window
    if n < 1:
        raise ValueError("window must be >= 1")
    return fixed_points_in(m, -n, n)


def _leaf_fixed_point(m: StripModel, s: float) -> OrbitPoint:
    """The unique g-fixed point on the invariant stable leaf {s}."""
    us = [u for u in fixed_points_in(m, s - 1 + SCAN_STEP, s + 1 - SCAN_STEP)]
    if len(us) != 1:
        raise ValueError(f"stable leaf {s} carries {len(us)} fixed points")
    return OrbitPoint(s, us[0])


def _check_fixed(m: StripModel, p: OrbitPoint) -> int:
    i = round(p.s)
    if not is_fixed(m, p) or abs(p.s - i) > 1e-9 or abs(p.u - i) > 1e-9:
        raise ValueError(f"{p} is not fixed by the deck transformation")
    return i


def next_orbit(m: StripModel, p: OrbitPoint) -> OrbitPoint:
    """Fixed orbit on the upper boundary leaf of the interval J_u of p."""
    _check_fixed(m, p)
    top = p.stable_interval()[1]
    q = _leaf_fixed_point(m, top)
    return OrbitPoint(float(round(q.s)), float(round(q.u)))


def prev_orbit(m: StripModel, p: OrbitPoint) -> OrbitPoint:
    _check_fixed(m, p)
    bottom = p.stable_interval()[0]
    q = _leaf_fixed_point(m, bottom)
    return OrbitPoint(float(round(q.s)), float(round(q.u)))


def orientation(i: int) -> int:
    """Consecutive ladder orbits are freely homotopic with reversed orientation."""
    return -1 if i % 2 else 1


def enumerate_class(m: StripModel, k: int) -> list[tuple[int, OrbitPoint, int]]:
    if k < 0:
        raise ValueError("k must be >= 0")
    out = [(0, OrbitPoint(0.0, 0.0), 1)]
    p = out[0][1]
    for i in range(1, k + 1):
        p = next_orbit(m, p)
        out.append((i, p, orientation(i)))
    p = out[0][1]
    for i in range(-1, -k - 1, -1):
        p = prev_orbit(m, p)
        out.append((i, p, orientation(i)))
    out.sort(key=lambda e: e[0])
    return out


def chart(s: float, u: float) -> tuple[float, float]:
    """Strip picture coordinates: stable leaves horizontal at height s,
    unstable leaves straight lines of slope 2 across 0 < x < 1."""
    return ((s - u + 1) / 2, s)


def strip_scene(m: StripModel, k: int) -> dict:
    """JSON scene for the strip figure: stable leaves l_i, unstable leaves
    through the ladder points and the ladder itself."""
    ladder = enumerate_class(m, k)
    lo, hi = -k - 1, k + 1
    stable = [{"label": f"l_{i}", "s": float(i), "y": float(i)} for i in range(lo + 1, hi)]
    unstable = []
    for i, p, _ in ladder:
        a = chart(p.u - 1, p.u)
        b = chart(p.u + 1, p.u)
        unstable.append({"u": p.u, "from": [a[0], a[1]], "to": [b[0], b[1]]})
    points = []
    for i, p, sign in ladder:
        x, y = chart(p.s, p.u)
        points.append({"index": i, "label": f"beta_{i}", "s": p.s, "u": p.u,
                       "x": x, "y": y, "orientation": sign})
    return {
        "schema_version": 1,
        "kind": "strip_scene",
        "chart": "x = (s - u + 1) / 2, y = s",
        "epsilon": m.epsilon,
        "k": k,
        "strip": {"x": [0.0, 1.0], "y": [float(lo), float(hi)]},
        "stable_leaves": stable,
        "unstable_leaves": unstable,
        "ladder": points,
    }


# -- suspension ----------------------------------------------------------------------

@dataclass(frozen=True)
class SuspensionModel:
    monodromy: tuple[tuple[int, int], tuple[int, int]] = ((2, 1), (1, 1))

    def __post_init__(self):
        a = np.array(self.monodromy)
        if a.shape != (2, 2) or not np.issubdtype(a.dtype, np.integer):
            raise ValueError("monodromy must be an integer 2x2 matrix")
        if round(np.linalg.det(a)) != 1:
            raise ValueError("monodromy must have determinant 1")
        if abs(np.trace(a)) <= 2:
            raise ValueError("monodromy must be hyperbolic (|trace| > 2)")

    @property
    def lam(self) -> float:
        tr = abs(self.monodromy[0][0] + self.monodromy[1][1])
        return (tr + math.sqrt(tr * tr - 4)) / 2

    @property
    def lam1(self) -> float:
        return self.lam

    @property
    def lam2(self) -> float:
        return self.lam


Point3 = tuple[float, float, float]


def suspension_flow(sm: SuspensionModel, p: Point3, t: float) -> Point3:
    x, y, t0 = p
    return (x, y, t0 + t)


def _offsets(p: Point3, q: Point3):
    if tuple(p) == tuple(q):
        raise ValueError("the two points coincide")
    return abs(q[0] - p[0]), abs(q[1] - p[1]), abs(q[2] - p[2])


def separation_lower_bound(sm: SuspensionModel, p: Point3, q: Point3, t: float) -> float:
    """max(lam1^h_lo |dx|, lam2^-h_hi |dy|, |dt|) after flowing both points by t.

    h_lo and h_hi are the lower and upper of the two flowed heights, the
    less expanded choice for each coordinate.
    """
    dx, dy, dt = _offsets(p, q)
    h_lo = min(p[2], q[2]) + t
    h_hi = max(p[2], q[2]) + t
    return max(sm.lam1 ** h_lo * dx, sm.lam2 ** (-h_hi) * dy, dt)


def metric_distance_lower_bound(sm: SuspensionModel, p: Point3, q: Point3, t: float) -> float:
    """A lower bound for the path distance between the flowed points.

    A path that dips to height m pays 2(h - m) vertically and at least
    lam^m |dx| horizontally; minimising the larger of the two over m gives
    (2 / ln lam) W(ln lam * lam^h |dx| / 2), and likewise for y.
    """
    dx, dy, dt = _offsets(p, q)
    h_lo = min(p[2], q[2]) + t
    h_hi = max(p[2], q[2]) + t
    l1, l2 = math.log(sm.lam1), math.log(sm.lam2)
    bx = 2 / l1 * float(lambertw(l1 * math.exp(l1 * h_lo) * dx / 2).real) if dx else 0.0
    by = 2 / l2 * float(lambertw(l2 * math.exp(-l2 * h_hi) * dy / 2).real) if dy else 0.0
    return max(bx, by, dt)


@dataclass
class SingletonReport:
    t_range: tuple[float, float]
    supremum: float
    forward_rate: float | None
    backward_rate: float | None
    threshold: float
    threshold_time: float | None
    metric_bound_at_end: float
    unbounded: bool

    def to_json(self) -> dict:
        return {
            "t_range": list(self.t_range),
            "supremum": self.supremum,
            "forward_rate": self.forward_rate,
            "backward_rate": self.backward_rate,
            "threshold": self.threshold,
            "threshold_time": self.threshold_time,
            "metric_bound_at_end": self.metric_bound_at_end,
            "unbounded": self.unbounded,
        }


def singleton_check(sm: SuspensionModel, p: Point3, q: Point3, T: float = 20.0,
                    t_range: tuple[float, float] | None = None, samples: int = 401,
                    threshold: float = 1e6) -> SingletonReport:
    """Separation of two distinct orbits over a time window.

    Orbits differing only in the flow direction are the same orbit and are
    rejected.  The fitted rates are least-squares slopes of the log bound
    where the x (forward) or y (backward) term dominates.
    """
    dx, dy, _ = _offsets(p, q)
    if dx == 0 and dy == 0:
        raise ValueError("points differ only along the flow: same orbit")
    lo, hi = t_range if t_range is not None else (-T, T)
    ts = np.linspace(lo, hi, samples)
    vals = np.array([separation_lower_bound(sm, p, q, t) for t in ts])
    h0 = min(p[2], q[2])
    h1 = max(p[2], q[2])
    x_term = np.array([sm.lam1 ** (h0 + t) * dx for t in ts])
    y_term = np.array([sm.lam2 ** (-(h1 + t)) * dy for t in ts])

    def rate(mask):
        if mask.sum() < 2:
            return None
        return float(np.polyfit(ts[mask], np.log(vals[mask]), 1)[0])

    fwd = rate((x_term >= vals) & (x_term > 0)) if dx else None
    bwd = rate((y_term >= vals) & (y_term > 0)) if dy else None
    t_star = None
    if dx:
        t_star = math.log(threshold / dx) / math.log(sm.lam1) - h0
    elif dy:
        t_star = -math.log(threshold / dy) / math.log(sm.lam2) - h1
    unbounded = (fwd is not None and fwd > 0) or (bwd is not None and bwd < 0)
    end = hi if dx else lo
    return SingletonReport((float(lo), float(hi)), float(vals.max()), fwd, bwd, threshold,
                           t_star, metric_distance_lower_bound(sm, p, q, end), unbounded)


# -- model dichotomy ---------------------------------------------------------------------

class FlowDescriptor(str, enum.Enum):
    GEODESIC = "geodesic"
    SURGERED_GEODESIC = "surgered_geodesic"
    SUSPENSION = "suspension"


class ModelKind(str, enum.Enum):
    PRODUCT = "product"
    SKEWED = "skewed"


_KINDS = {
    FlowDescriptor.GEODESIC: ModelKind.SKEWED,
    FlowDescriptor.SURGERED_GEODESIC: ModelKind.SKEWED,
    FlowDescriptor.SUSPENSION: ModelKind.PRODUCT,
}


def model_kind(desc: FlowDescriptor | str) -> ModelKind:
    try:
        return _KINDS[FlowDescriptor(desc)]
    except ValueError:
        raise ValueError(f"unknown flow descriptor {desc!r}") from None
