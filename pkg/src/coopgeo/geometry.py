"""Planar geometry for contention-based geographic forwarding.

Distances, progress areas, Gabriel proximity tests, Reuleaux relay regions
and the geographic relay-selection metric.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from coopgeo import kernels

EPS = 1e-9
# Sampling density along each Reuleaux arc (fraction of arc length).
ARC_SAMPLE_STEP = 1e-3
ARC_REL_TOL = 1e-9


class Point2D(NamedTuple):
    x: float
    y: float

    @classmethod
    def checked(cls, x: float, y: float) -> "Point2D":
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"non-finite coordinates ({x}, {y})")
        return cls(float(x), float(y))


class ProgressClass(enum.Enum):
    PPA = "PPA"
    NPA = "NPA"
    OUT_OF_RANGE = "OutOfRange"


@dataclass(frozen=True)
class RelayMetricParams:
    """Weights of the relay metric ``A^2 d_SR^p + B d_RD^p``."""

    a_squared: float
    b: float
    p: float = 2.0

    def __post_init__(self):
        if not self.a_squared > 0 or not self.b > 0:
            raise ValueError("relay metric weights must be strictly positive")
        if not self.p >= 2:
            raise ValueError(f"path-loss exponent p={self.p} must be >= 2")


@dataclass(frozen=True)
class ReuleauxRegion:
    v1: Point2D
    v2: Point2D
    v3: Point2D
    side: float


def distance(a: Point2D, b: Point2D) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def classify_progress(src: Point2D, dst: Point2D, cand: Point2D,
                      range_: float) -> ProgressClass:
    if range_ <= 0:
        raise ValueError("range must be positive")
    if distance(src, cand) > range_:
        return ProgressClass.OUT_OF_RANGE
    if distance(cand, dst) < distance(src, dst):
        return ProgressClass.PPA
    return ProgressClass.NPA


def csa_index(src: Point2D, dst: Point2D, cand: Point2D, range_: float,
              nsa: int) -> int:
    """Common sub-area of a candidate; 0 is the band with the most progress."""
    if nsa <= 0:
        raise ValueError("nsa must be a positive integer")
    progress = distance(src, dst) - distance(cand, dst)
    raw = math.floor(nsa * (range_ - progress) / (2.0 * range_))
    idx = min(max(raw, 0), nsa - 1)
    if nsa % 2 == 0:
        # Keep PPA/NPA bands disjoint when rounding lands on the boundary.
        half = nsa // 2
        if progress > 0:
            idx = min(idx, half - 1)
        else:
            idx = max(idx, half)
    return idx


def midpoint(a: Point2D, b: Point2D) -> Point2D:
    return Point2D(0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]))


def in_gabriel_region(a: Point2D, b: Point2D, q: Point2D) -> bool:
    """True iff q is strictly inside the disk with diameter ab.

    Points on the boundary (within EPS) do not count.
    """
    m = midpoint(a, b)
    return distance(q, m) < 0.5 * distance(a, b) - EPS


def reuleaux_region(src: Point2D, nexthop: Point2D,
                    upper: bool = True) -> ReuleauxRegion:
    side = distance(src, nexthop)
    if side <= EPS:
        raise ValueError("Reuleaux region needs two distinct points")
    ux = (nexthop[0] - src[0]) / side
    uy = (nexthop[1] - src[1]) / side
    # Left normal of the directed segment src -> nexthop.
    nx, ny = -uy, ux
    if not upper:
        nx, ny = -nx, -ny
    h = side * math.sqrt(3.0) / 2.0
    m = midpoint(src, nexthop)
    v3 = Point2D(m[0] + h * nx, m[1] + h * ny)
    return ReuleauxRegion(Point2D(*src), Point2D(*nexthop), v3, side)


def reuleaux_contains(region: ReuleauxRegion, q: Point2D) -> bool:
    lim = region.side + EPS
    return (distance(q, region.v1) <= lim and distance(q, region.v2) <= lim
            and distance(q, region.v3) <= lim)


def relay_metric(x: Point2D, src: Point2D, dst: Point2D,
                 params: RelayMetricParams) -> float:
    ds = distance(x, src)
    dd = distance(x, dst)
    if params.p == 2:
        return params.a_squared * ds * ds + params.b * dd * dd
    return params.a_squared * ds ** params.p + params.b * dd ** params.p


def optimal_relay_point(src: Point2D, dst: Point2D,
                        params: RelayMetricParams) -> Point2D:
    """Unconstrained minimizer of the relay metric (closed form, p = 2 only)."""
    if params.p != 2:
        raise ValueError("closed-form optimum only exists for p = 2")
    w = params.a_squared + params.b
    return Point2D((params.a_squared * src[0] + params.b * dst[0]) / w,
                   (params.a_squared * src[1] + params.b * dst[1]) / w)


def map_metric(f_val: float, f_star: float, f_max: float) -> float:
    """Affine map of a metric value onto [0, 1]."""
    span = f_max - f_star
    if not span > 0:
        raise ValueError("degenerate region: f_max must exceed f_star")
    tol = EPS * max(1.0, abs(f_max))
    if f_val < f_star - tol or f_val > f_max + tol:
        raise ValueError(f"metric value {f_val} outside [{f_star}, {f_max}]")
    return min(max((f_val - f_star) / span, 0.0), 1.0)


def _arcs(region: ReuleauxRegion):
    # Each arc is centered on one vertex and joins the other two.
    verts = (region.v1, region.v2, region.v3)
    for k in range(3):
        c = verts[k]
        a = verts[(k + 1) % 3]
        b = verts[(k + 2) % 3]
        t0 = math.atan2(a[1] - c[1], a[0] - c[0])
        t1 = math.atan2(b[1] - c[1], b[0] - c[0])
        sweep = (t1 - t0 + math.pi) % (2.0 * math.pi) - math.pi
        yield c, t0, sweep


def f_max_over_region(region: ReuleauxRegion, src: Point2D, dst: Point2D,
                      params: RelayMetricParams) -> float:
    """Maximum of the relay metric over a Reuleaux region.

    The metric is convex, so the maximum sits on the boundary; each of the
    three arcs is searched by dense sampling and golden-section refinement.
    """
    n_samples = int(round(1.0 / ARC_SAMPLE_STEP)) + 1
    best = -math.inf
    for c, t0, sweep in _arcs(region):
        f, _ = kernels.arc_metric_max(
            c[0], c[1], region.side, t0, sweep, src[0], src[1], dst[0], dst[1],
            params.a_squared, params.b, float(params.p), n_samples, ARC_REL_TOL)
        best = max(best, f)
    return best


def f_min_over_region(region: ReuleauxRegion, src: Point2D, dst: Point2D,
                      params: RelayMetricParams) -> float:
    """Minimum of the relay metric over the region.

    For p = 2 the closed-form optimum lies on the src-dst chord whenever src
    and dst are region vertices; otherwise fall back to a bounded search.
    """
    if params.p == 2:
        x_star = optimal_relay_point(src, dst, params)
        if reuleaux_contains(region, x_star):
            return relay_metric(x_star, src, dst, params)
    from scipy.optimize import minimize

    def obj(v):
        return relay_metric(Point2D(v[0], v[1]), src, dst, params)

    cons = [{"type": "ineq",
             "fun": (lambda v, c=c: region.side ** 2 - ((v[0] - c[0]) ** 2 + (v[1] - c[1]) ** 2))}
            for c in (region.v1, region.v2, region.v3)]
    cx = (region.v1[0] + region.v2[0] + region.v3[0]) / 3.0
    cy = (region.v1[1] + region.v2[1] + region.v3[1]) / 3.0
    res = minimize(obj, [cx, cy], constraints=cons, method="SLSQP",
                   options={"ftol": 1e-12, "maxiter": 200})
    return float(res.fun)
