"""Volume estimates and the sphere-measure / absolute-convex-hull volume experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError
from scipy.stats import binomtest

from .bodies import EmptyInterior, HPolytope, VPolytope, polar
from .kernel import RngStream, as_generator, chebyshev_center, random_unit_vector


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    lo: float
    hi: float
    samples: int
    method: str  # hit-miss | exact-2d | hull | formula

    def __post_init__(self):
        if not self.lo <= self.value <= self.hi:
            raise ValueError("confidence interval must bracket the estimate")


def ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _extreme_points(k) -> np.ndarray:
    if isinstance(k, VPolytope):
        return k.points
    return k.vertex_array if k.dim <= 6 else hpolytope_vertices(k)


def _membership(k):
    if isinstance(k, HPolytope):
        return k.contains
    return k.hrep.contains


def volume_mc(k, samples: int, rng, batch: int = 200_000, region: str = "ball") -> VolumeEstimate:
    """Hit-and-miss estimate with a Wilson 95% interval.

    ``region="ball"`` samples the ball around the vertex bounding box center
    that reaches the farthest vertex; ``region="box"`` samples the bounding box.
    """
    if k.dim > 6:
        raise ValueError("Monte Carlo volumes are capped at dimension 6")
    gen = as_generator(rng)
    d = k.dim
    pts = _extreme_points(k)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if region == "ball":
        center = 0.5 * (lo + hi)
        radius = float(np.linalg.norm(pts - center, axis=1).max())
        region_vol = ball_volume(d) * radius ** d

        def draw(n):
            u = random_unit_vector(d, gen, size=n)
            return center + radius * u * gen.random((n, 1)) ** (1.0 / d)
    elif region == "box":
        region_vol = float(np.prod(hi - lo))

        def draw(n):
            return lo + (hi - lo) * gen.random((n, d))
    else:
        raise ValueError(f"unknown sampling region {region!r}")
    inside = _membership(k)
    hits = 0
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        hits += int(np.count_nonzero(inside(draw(n), tol=0.0)))
        done += n
    ci = binomtest(hits, samples).proportion_ci(confidence_level=0.95, method="wilson")
    p = hits / samples
    return VolumeEstimate(p * region_vol, float(ci.low) * region_vol, float(ci.high) * region_vol,
                          samples, "hit-miss")


def volume_exact_2d(k: VPolytope) -> float:
    """Shoelace area of the angularly sorted extreme points."""
    if k.dim != 2:
        raise ValueError("volume_exact_2d needs a planar polytope")
    pts = k.points
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise EmptyInterior("degenerate hull") from exc
    ext = pts[hull.vertices]
    c = ext.mean(axis=0)
    order = np.argsort(np.arctan2(ext[:, 1] - c[1], ext[:, 0] - c[0]))
    x, y = ext[order, 0], ext[order, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def hpolytope_vertices(h: HPolytope) -> np.ndarray:
    c, r = chebyshev_center(h.normals, h.offsets)
    if r <= 1e-12:
        raise EmptyInterior("H-polytope has empty interior")
    hs = HalfspaceIntersection(np.hstack([h.normals, -h.offsets[:, None]]), c)
    return hs.intersections


def volume_hull(k) -> VolumeEstimate:
    """Exact volume through a qhull triangulation (dimension <= 8)."""
    pts = k.points if isinstance(k, VPolytope) else hpolytope_vertices(k)
    if k.dim == 1:
        v = float(pts.max() - pts.min())
    else:
        try:
            v = float(ConvexHull(pts).volume)
        except QhullError:
            # highly degenerate inputs (many points per facet): joggled input
            v = float(ConvexHull(pts, qhull_options="QJ").volume)
    return VolumeEstimate(v, v, v, 0, "hull")


def volume(k, method: str = "hull", samples: int = 200_000, rng=None) -> VolumeEstimate:
    if method == "hull":
        return volume_hull(k)
    if method == "mc":
        return volume_mc(k, samples, rng if rng is not None else RngStream(0))
    raise ValueError(f"unknown volume method {method!r}")


def sphere_measure_check(k, samples: int, rng, volume_samples: int = 200_000):
    """Frequency of uniform sphere points inside ``k`` against vol(k)/vol(B_2^d).

    Returns ``(freq, bound)``; raises AssertionError when
    ``freq > bound + 3 * stderr``.
    """
    if k.dim > 5:
        raise ValueError("sphere-measure check is capped at dimension 5")
    rng = rng if isinstance(rng, RngStream) else RngStream(int(as_generator(rng).integers(2**63)))
    x = random_unit_vector(k.dim, rng.derive(0), size=samples)
    freq = float(np.mean(_membership(k)(x, tol=0.0)))
    est = volume_mc(k, volume_samples, rng.derive(1))
    bound = est.hi / ball_volume(k.dim)
    stderr = math.sqrt(max(freq * (1 - freq), 1.0 / samples) / samples)
    if freq > bound + 3 * stderr:
        raise AssertionError(f"sphere frequency {freq:.4f} exceeds volume bound {bound:.4f}")
    return freq, bound


def cp_constant(vol: float, d: int, M: int) -> float:
    """vol^{1/d} * d / sqrt(ln(M/d))."""
    return vol ** (1.0 / d) * d / math.sqrt(math.log(M / d))


def cp_constant_fit(grid, seeds, rng: RngStream, method: str = "hull",
                    samples: int = 200_000) -> list[dict]:
    """Rows ``(d, M, seed, volume, lo, hi, C_hat)`` for absconv of M uniform unit vectors."""
    rows = []
    for d, M in grid:
        if d > 5 or M > 50 * d or M < 2 * d:
            raise ValueError("grid cells need d <= 5 and 2d <= M <= 50d")
        for s in seeds:
            stream = rng.derive(d).derive(M).derive(s)
            x = random_unit_vector(d, stream.derive(0), size=M)
            body = VPolytope(x, symmetric=True)
            est = volume(body, method, samples, stream.derive(1))
            rows.append({"d": d, "M": M, "seed": s, "volume": est.value, "lo": est.lo,
                         "hi": est.hi, "C_hat": cp_constant(est.value, d, M),
                         "C_hat_hi": cp_constant(est.hi, d, M)})
    return rows


def summarize_cp(rows: list[dict]) -> dict:
    vals = np.array([r["C_hat"] for r in rows])
    his = np.array([r["C_hat_hi"] for r in rows])
    return {"C_max": float(vals.max()), "C_min": float(vals.min()),
            "C_hi_max": float(his.max()), "spread": float(vals.max() / vals.min())}


def volume_product(k, method: str = "hull", samples: int = 200_000, rng=None):
    """(lo, value, hi) of vol(K) * vol(K°) for a body with the origin inside."""
    pol = polar(k)
    if method == "mc":
        rng = rng if rng is not None else RngStream(0)
        v1 = volume_mc(k, samples, rng.derive(0))
        v2 = volume_mc(pol, samples, rng.derive(1))
    else:
        v1, v2 = volume_hull(k), volume_hull(pol)
    return v1.lo * v2.lo, v1.value * v2.value, v1.hi * v2.hi
