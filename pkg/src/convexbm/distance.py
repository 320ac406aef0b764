"""Banach-Mazur distance: witnessed upper bounds and certified lower bounds.

Convention: a witness ``T`` with centers ``a`` (of K1) and ``b`` (of K2)
satisfies ``K1 - a ⊆ T (K2 - b) ⊆ upper (K1 - a)``, so ``T`` maps the space
of K2 onto the space of K1 and

    upper = ||T : K2 - b -> K1 - a|| * ||T^{-1} : K1 - a -> K2 - b||.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .bodies import (
    HPolytope,
    OriginNotInterior,
    VPolytope,
    gauge,
    gauges,
    john_ellipsoid,
    polar,
)
from .kernel import LPProblem, RngStream, as_generator, lp_solve, orthonormalize
from .nets import GrassmannPoint, grassmann_metric, grassmann_rotation
from .simplex import PositionedSection, ProjectedBody, km_body, project_section
from .volume import volume_hull, volume_mc

VERIFY_TOL = 1e-8
_SLACK_MIN = 1e-6


class SingularWitness(RuntimeError):
    pass


class WitnessVerificationError(RuntimeError):
    pass


class NetTooLarge(RuntimeError):
    pass


class PerturbationBoundViolation(AssertionError):
    pass


# ------------------------------------------------------------------ types


@dataclass(frozen=True, eq=False)
class BMEstimate:
    upper: float
    lower: float
    witness: np.ndarray
    a: np.ndarray
    b: np.ndarray
    upper_method: str = "search"
    lower_method: str = "trivial"
    seed: tuple = ()
    k1: object = field(default=None, repr=False)
    k2: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.lower > self.upper + 1e-6:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def with_lower(self, lower: float, method: str) -> "BMEstimate":
        if lower <= self.lower:
            return self
        return BMEstimate(self.upper, lower, self.witness, self.a, self.b, self.upper_method,
                          method, self.seed, self.k1, self.k2)

    def to_json(self) -> str:
        return json.dumps({
            "upper": self.upper, "lower": self.lower,
            "witness": np.asarray(self.witness).tolist(),
            "a": np.asarray(self.a).tolist(), "b": np.asarray(self.b).tolist(),
            "methods": {"upper": self.upper_method, "lower": self.lower_method},
            "seed": list(self.seed),
        })


@dataclass(frozen=True, eq=False)
class OperatorBall:
    """``{T : T B_1^d ⊆ eta K}`` for a symmetric body K."""

    body: object
    eta: float

    def contains(self, t) -> bool:
        cols = np.asarray(t, dtype=float).T
        return bool(np.max(gauges(self.body, cols)) <= self.eta + VERIFY_TOL)

    def entry_bounds(self) -> np.ndarray:
        """Bound on |T_ij| over the ball: eta * h_K(e_i)."""
        pts = _as_body(self.body).points
        return self.eta * np.abs(pts).max(axis=0)


@dataclass(frozen=True)
class NetCertificate:
    eta: float
    eps: float            # largest Frobenius radius among cells cleared by the norm test
    xi: float             # ball factor: ||x||_{K2} <= xi |x| / R1-normalised (see bm_lower_netcert)
    tau: float            # eta + eps * xi
    net_size: int         # net points (norm-cleared cell centers) over both sweeps
    cells: int            # all cells processed, determinant-cleared ones included
    min_margin: float     # min over net points of ||T|| - (eta + eps_cell * xi)
    success: bool
    lower: float          # eta**2 on success, 1 otherwise
    reason: str = ""


# ------------------------------------------------------------ body data


@dataclass(frozen=True, eq=False)
class _Body:
    points: np.ndarray     # extreme points (negatives included for symmetric bodies)
    normals: np.ndarray
    offsets: np.ndarray
    symmetric: bool
    source: object = None

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def john_center(self) -> np.ndarray:
        if self.symmetric:
            return np.zeros(self.dim)
        return john_ellipsoid(HPolytope(self.normals, self.offsets)).center


def _as_body(k) -> _Body:
    if isinstance(k, _Body):
        return k
    if isinstance(k, (ProjectedBody, PositionedSection)):
        k = k.body
    if isinstance(k, VPolytope):
        h = k.hrep
        pts = k.points
        if k.dim >= 2:
            try:
                pts = pts[ConvexHull(pts).vertices]
            except QhullError:
                pass
        return _Body(pts, h.normals, h.offsets, k.symmetric, k)
    if isinstance(k, HPolytope):
        if k.dim <= 6:
            pts = k.vertex_array
        else:
            from .volume import hpolytope_vertices
            pts = hpolytope_vertices(k)
        return _Body(pts, k.normals, k.offsets, _h_symmetric(k), k)
    raise TypeError(f"unsupported body type {type(k).__name__}")


def _h_symmetric(h: HPolytope) -> bool:
    rows = np.hstack([h.normals, h.offsets[:, None]]) / np.linalg.norm(h.normals, axis=1)[:, None]
    neg = rows.copy()
    neg[:, :-1] *= -1
    d2 = ((rows[:, None, :] - neg[None, :, :]) ** 2).sum(-1)
    return bool(np.all(d2.min(axis=1) < 1e-18)) and bool(np.all(h.offsets > 0))


# --------------------------------------------------------------- norms


def op_norm_body(t, k1, k2) -> float:
    """``||T : K1 -> K2||`` as the largest K2-gauge of the images of K1's vertices."""
    b1, b2 = _as_body(k1), _as_body(k2)
    if np.any(b2.offsets <= 0):
        raise OriginNotInterior("origin must be interior to the target body")
    img = b1.points @ np.asarray(t, dtype=float).T
    return float(np.max((img @ b2.normals.T) / b2.offsets))


def _norms(w, a, b, k1: _Body, k2: _Body):
    """Batched ``(fwd, bwd)``: fwd = ||W : K2-b -> K1-a||, bwd = ||W^-1 : K1-a -> K2-b||."""
    w = np.asarray(w, dtype=float)
    single = w.ndim == 2
    if single:
        w, a, b = w[None], np.asarray(a, float)[None], np.asarray(b, float)[None]
    s1 = k1.offsets[None] - a @ k1.normals.T
    s2 = k2.offsets[None] - b @ k2.normals.T
    # centers (numerically) on the boundary make the gauges meaningless
    bad = ((s1.min(axis=1) <= _SLACK_MIN * np.abs(k1.offsets).max())
           | (s2.min(axis=1) <= _SLACK_MIN * np.abs(k2.offsets).max()))
    s1 = np.where(s1 > 0, s1, np.nan)
    s2 = np.where(s2 > 0, s2, np.nan)
    x2 = k2.points[None] - b[:, None, :]
    x1 = k1.points[None] - a[:, None, :]
    y = np.einsum("bij,bnj->bni", w, x2) @ k1.normals.T / s1[:, None, :]
    with np.errstate(all="ignore"):
        winv = np.linalg.inv(w)
    z = np.einsum("bij,bnj->bni", winv, x1) @ k2.normals.T / s2[:, None, :]
    fwd = np.nanmax(y.reshape(len(w), -1), axis=1)
    bwd = np.nanmax(z.reshape(len(w), -1), axis=1)
    fwd[bad] = np.inf
    bwd[bad] = np.inf
    if single:
        return float(fwd[0]), float(bwd[0])
    return fwd, bwd


def distance_value(w, a, b, k1, k2) -> float:
    """``||W : K2-b -> K1-a|| * ||W^-1 : K1-a -> K2-b||`` for one operator."""
    f, g = _norms(w, a, b, _as_body(k1), _as_body(k2))
    return f * g


# -------------------------------------------------------------- upper bound


def bm_upper(k1, k2, restarts: int = 32, rng=None, max_iter: int = 2000, init=(),
             polish: bool = True, batch: int = 8) -> BMEstimate:
    """Witnessed upper bound on d(K1, K2) by multi-start local search.

    Each start runs a derivative-free search (random multiplicative
    perturbations of ``T`` with an adaptive step, determinant renormalised
    after every accepted step, sign flips rejected) and then a
    trust-region sequential-LP polish of ``T``.  Centers are fixed at 0 for
    two symmetric bodies and otherwise searched jointly, starting from the
    John centers.  ``init`` holds warm starts, either matrices or
    ``(T, a, b)`` triples.  The returned value is verified by gauge checks.
    """
    b1, b2 = _as_body(k1), _as_body(k2)
    d = b1.dim
    if b2.dim != d:
        raise ValueError("bodies live in different dimensions")
    if d > 8:
        raise ValueError("bm_upper is capped at dimension 8")
    stream = rng if isinstance(rng, RngStream) else RngStream(0) if rng is None else None
    gen_root = as_generator(stream if stream is not None else rng)
    sym = b1.symmetric and b2.symmetric
    a0 = np.zeros(d) if sym else b1.john_center()
    c0 = np.zeros(d) if sym else b2.john_center()

    starts = _initial_points(b1, b2, a0, c0, restarts, gen_root, init)
    best = None
    for i, (w, a, b) in enumerate(starts):
        gen = stream.derive(i).generator() if stream is not None else gen_root
        w, a, b, val = _search(w, a, b, b1, b2, sym, gen, max_iter, batch)
        if polish:
            w, a, b, val = _slp_polish(w, a, b, b1, b2, val, centers=not sym)
        if best is None or val < best[3]:
            best = (w, a, b, val)
    w, a, b, _ = best
    if abs(np.linalg.det(w)) < 1e-10 * np.abs(w).max() ** d:
        raise SingularWitness("best witness is numerically singular")
    est = _finalize(w, a, b, b1, b2, "search+slp" if polish else "search",
                    stream.path if stream is not None else ())
    return BMEstimate(est.upper, 1.0, est.witness, est.a, est.b, est.upper_method, "trivial",
                      est.seed, k1, k2)


def _initial_points(b1, b2, a0, c0, restarts, gen, init):
    d = b1.dim
    pts = []
    for item in init:
        if isinstance(item, tuple):
            w, a, b = item
            pts.append((np.asarray(w, float), np.asarray(a, float), np.asarray(b, float)))
        else:
            pts.append((np.asarray(item, float), a0.copy(), c0.copy()))
    pts.append((np.eye(d), a0.copy(), c0.copy()))
    try:
        e1 = john_ellipsoid(HPolytope(b1.normals, b1.offsets))
        e2 = john_ellipsoid(HPolytope(b2.normals, b2.offsets))
        s1, s2inv = e1.sqrt_shape(), np.linalg.inv(e2.sqrt_shape())
        if not (b1.symmetric and b2.symmetric):
            a0, c0 = e1.center, e2.center
    except Exception:  # the John map is only a heuristic start
        s1 = s2inv = None
    while len(pts) < restarts:
        q = orthonormalize(gen.standard_normal((d, d)))
        if s1 is not None and len(pts) % 2 == 0:
            pts.append((s1 @ q @ s2inv, a0.copy(), c0.copy()))
        else:
            diag = np.exp(0.3 * gen.standard_normal(d))
            pts.append((q * diag, a0.copy(), c0.copy()))
    return pts[:max(restarts, len(init) + 1)]


def _normalize_det(w):
    det = np.linalg.det(w)
    return w / abs(det) ** (1.0 / w.shape[0]), np.sign(det)


def _search(w, a, b, b1, b2, sym, gen, max_iter, batch):
    d = b1.dim
    w, sign = _normalize_det(w)
    f, g = _norms(w, a, b, b1, b2)
    val = f * g
    scale1 = np.abs(b1.points).max()
    scale2 = np.abs(b2.points).max()
    step = 0.2
    fails = 0
    for _ in range(max_iter):
        if step < 1e-7:
            break
        pert = gen.standard_normal((batch, d, d)) * (step / d)
        cand = w[None] @ (np.eye(d)[None] + pert)
        det = np.linalg.det(cand)
        ok = np.sign(det) == sign
        cand = cand / np.abs(det)[:, None, None] ** (1.0 / d)
        if sym:
            ca = np.repeat(a[None], batch, 0)
            cb = np.repeat(b[None], batch, 0)
        else:
            ca = a[None] + 0.5 * step * scale1 * gen.standard_normal((batch, d)) / d
            cb = b[None] + 0.5 * step * scale2 * gen.standard_normal((batch, d)) / d
        cf, cg = _norms(cand, ca, cb, b1, b2)
        vals = np.where(ok, cf * cg, np.inf)
        j = int(np.argmin(vals))
        if vals[j] < val * (1 - 1e-12):
            w, a, b, val = cand[j], ca[j], cb[j], float(vals[j])
            step = min(step * 1.5, 1.0)
            fails = 0
        else:
            fails += 1
            if fails >= 3:
                step *= 0.5
                fails = 0
    return w, a, b, val


def _slp_polish(w, a, b, b1, b2, val, centers: bool = False, iters: int = 80,
                max_rows: int = 1000):
    """Trust-region sequential LP in ``T`` (and the centers when ``centers``).

    At ``W0`` (scaled so the inverse norm is 1) solve ``min t`` subject to
    the linearisations of ``N1 W (v - b) <= t (o1 - N1 a)`` over K2's vertices
    and ``N2 W^-1 (u - a) <= o2 - N2 b`` over K1's vertices, using
    ``W^-1 ≈ W0^-1 - W0^-1 D W0^-1`` and a box trust region.  A step is kept
    only if the exact value improves.
    """
    d = b1.dim
    nc = 2 * d if centers else 0
    r1 = np.abs(b1.points).max()
    r2 = np.abs(b2.points).max()
    _, g = _norms(w, a, b, b1, b2)
    if not np.isfinite(g):
        return w, a, b, val
    w = w * g
    r = 0.05
    for _ in range(iters):
        if r < 1e-10:
            break
        s1 = b1.offsets - b1.normals @ a
        s2 = b2.offsets - b2.normals @ b
        n1 = b1.normals / s1[:, None]
        n2 = b2.normals / s2[:, None]
        x2 = b2.points - b
        x1 = b1.points - a
        winv = np.linalg.inv(w)
        fv = (x2 @ w.T) @ n1.T          # (n2, f1), max = current value
        bv = (x1 @ winv.T) @ n2.T       # (n1, f2), max = 1
        lam = fv.max()
        # pairs far from active cannot become active inside the trust region
        margin = min(0.25, 8 * r)
        fi = _top_pairs(fv, lam, margin, max_rows)
        bi = _top_pairs(bv, bv.max(), margin, max_rows)
        fr = np.einsum("ri,rj->rij", n1[fi[1]], x2[fi[0]]).reshape(len(fi[0]), -1)
        p = n2[bi[1]] @ winv
        q = x1[bi[0]] @ winv.T
        br = -np.einsum("ri,rj->rij", p, q).reshape(len(bi[0]), -1)
        if centers:
            # forward: + lam n1 . da - (n1 W0) . db ; backward: - p . da + n2 . db
            fr = np.hstack([fr, lam * n1[fi[1]], -(n1[fi[1]] @ w)])
            br = np.hstack([br, -p, n2[bi[1]]])
        rows = np.vstack([np.hstack([fr, -np.ones((len(fr), 1))]),
                          np.hstack([br, np.zeros((len(br), 1))])])
        rhs = np.r_[-fv[fi], 1.0 - bv[bi]]
        rw = r * np.abs(w).max()
        bounds = [(-rw, rw)] * (d * d) + [(-r * r1, r * r1)] * (nc // 2) \
            + [(-r * r2, r * r2)] * (nc // 2) + [(None, None)]
        try:
            sol = lp_solve(LPProblem(np.r_[np.zeros(d * d + nc), 1.0], rows, rhs, bounds=bounds))
        except Exception:
            r *= 0.3
            continue
        if sol.status != "optimal":
            r *= 0.3
            continue
        cand = w + sol.x[: d * d].reshape(d, d)
        ca, cb = a, b
        if centers:
            ca = a + sol.x[d * d: d * d + d]
            cb = b + sol.x[d * d + d: d * d + 2 * d]
        if np.sign(np.linalg.det(cand)) != np.sign(np.linalg.det(w)):
            r *= 0.3
            continue
        f, g = _norms(cand, ca, cb, b1, b2)
        if f * g < val * (1 - 1e-13):
            w, a, b, val = cand * g, ca, cb, f * g
            r = min(2 * r, 0.5)
        else:
            r *= 0.3
    w, _ = _normalize_det(w)
    return w, a, b, val


def _top_pairs(v, top, margin, max_rows):
    flat = v.ravel()
    thr = top - max(margin * abs(top), 1e-12)
    idx = np.flatnonzero(flat >= thr)
    if len(idx) > max_rows:
        idx = idx[np.argsort(flat[idx])[-max_rows:]]
    return np.unravel_index(idx, v.shape)


def _finalize(w, a, b, b1, b2, method, seed) -> BMEstimate:
    f, g = _norms(w, a, b, b1, b2)
    w = w * g  # now K1 - a ⊆ W (K2 - b)
    upper = float(f * g)
    inner, outer = _inclusion_ratios(w, a, b, b1, b2)
    if inner > 1 + VERIFY_TOL or outer > upper * (1 + VERIFY_TOL):
        raise WitnessVerificationError(f"witness fails its gauge check ({inner}, {outer}, {upper})")
    return BMEstimate(max(outer, 1.0), 1.0, w, np.asarray(a, float), np.asarray(b, float),
                      method, "trivial", tuple(seed), b1.source, b2.source)


def _inclusion_ratios(w, a, b, b1, b2):
    """(max K2-b gauge of W^-1 (V1 - a), max K1-a gauge of W (V2 - b))."""
    s1 = b1.offsets - b1.normals @ a
    s2 = b2.offsets - b2.normals @ b
    inner = ((b1.points - a) @ np.linalg.inv(w).T @ b2.normals.T / s2).max()
    outer = ((b2.points - b) @ w.T @ b1.normals.T / s1).max()
    return float(inner), float(outer)


def verify_witness(est: BMEstimate, k1=None, k2=None, method: str = "hrep",
                   tol: float = VERIFY_TOL) -> bool:
    """Check ``K1 - a ⊆ T (K2 - b) ⊆ upper (K1 - a)`` at every vertex.

    ``method="lp"`` evaluates V-polytope gauges by linear programs rather
    than through the facet description, an independent route.
    """
    k1 = est.k1 if k1 is None else k1
    k2 = est.k2 if k2 is None else k2
    t = np.asarray(est.witness, dtype=float)
    if method == "hrep":
        inner, outer = _inclusion_ratios(t, est.a, est.b, _as_body(k1), _as_body(k2))
    elif method == "lp":
        b1, b2 = _as_body(k1), _as_body(k2)
        inner = max(_gauge_centered(k2, est.b, y) for y in (b1.points - est.a) @ np.linalg.inv(t).T)
        outer = max(_gauge_centered(k1, est.a, y) for y in (b2.points - est.b) @ t.T)
    else:
        raise ValueError(f"unknown verification method {method!r}")
    return inner <= 1 + tol and outer <= est.upper * (1 + tol)


def _gauge_centered(k, c, y) -> float:
    k = k.body if isinstance(k, (ProjectedBody, PositionedSection)) else k
    c = np.asarray(c, dtype=float)
    if isinstance(k, VPolytope):
        if not np.any(c):
            return gauge(k, y, method="lp")
        return gauge(VPolytope(k.points - c), y, method="lp")
    return gauge(k.translated(c), y)


def compose_witness(e13: BMEstimate, e32: BMEstimate) -> BMEstimate:
    """Chain ``K1 ~ K3`` and ``K3 ~ K2`` into a witness for ``K1 ~ K2``.

    The composed map ``T13 T32`` is feasible with value at most the product
    of the two uppers; the exact value of the composed map is returned.
    """
    if not np.allclose(e13.b, e32.a, atol=1e-12):
        raise WitnessVerificationError("the middle body is centered differently in the two witnesses")
    w = np.asarray(e13.witness) @ np.asarray(e32.witness)
    b1, b2 = _as_body(e13.k1), _as_body(e32.k2)
    est = _finalize(w, e13.a, e32.b, b1, b2, "composed", e13.seed)
    if est.upper > e13.upper * e32.upper * (1 + 1e-9):
        raise WitnessVerificationError("composed witness exceeds the product of the stages")
    if not verify_witness(est):
        raise WitnessVerificationError("composed witness fails verification")
    return est


# ------------------------------------------------------------- lower bounds


def difference_body(k) -> VPolytope:
    """``K - K``, symmetric; d(K1 - K1, K2 - K2) <= d(K1, K2)."""
    pts = _as_body(k).points
    diff = (pts[:, None, :] - pts[None, :, :]).reshape(-1, pts.shape[1])
    diff = diff[np.linalg.norm(diff, axis=1) > 0]
    hull = ConvexHull(diff)
    return VPolytope(diff[hull.vertices], symmetric=True)


def _symmetric_vbody(k) -> VPolytope:
    b = _as_body(k)
    if not b.symmetric:
        return difference_body(k)
    src = b.source
    if isinstance(src, VPolytope):
        return src
    return VPolytope(b.points, symmetric=True)


def volume_product_interval(k, method: str = "hull", samples: int = 200_000, rng=None):
    """``(lo, hi)`` bracket on vol(K) * vol(K°) for a symmetric V-polytope."""
    if method == "hull":
        # the vertices of K° are the facet normals of K scaled by 1 / offset
        h = k.hrep
        pol_v = VPolytope(h.normals / h.offsets[:, None])
        v = volume_hull(k).value * volume_hull(pol_v).value
        return v, v
    pol = polar(k)
    if method == "mc":
        rng = rng if rng is not None else RngStream(0)
        v1 = volume_mc(k, samples, rng.derive(0))
        v2 = volume_mc(pol, samples, rng.derive(1))
        return v1.lo * v2.lo, v1.hi * v2.hi
    raise ValueError(f"unknown volume method {method!r}")


def bm_lower_volume(k1, k2, method: str = "hull", samples: int = 200_000, rng=None) -> float:
    """``max(1, (P1/P2)^{1/d}, (P2/P1)^{1/d})`` with ``P(K) = vol(K) vol(K°)``.

    The volume product is invariant under invertible linear maps, so for
    symmetric bodies it bounds the distance from below.  A non-symmetric
    body is replaced by its difference body, which can only decrease the
    distance.  With Monte Carlo volumes the conservative end of each
    confidence interval is used.
    """
    s1, s2 = _symmetric_vbody(k1), _symmetric_vbody(k2)
    d = s1.dim
    if d > 6:
        raise ValueError("volume lower bounds are capped at dimension 6")
    rng = rng if rng is not None else RngStream(0)
    lo1, hi1 = volume_product_interval(s1, method, samples, rng.derive(0))
    lo2, hi2 = volume_product_interval(s2, method, samples, rng.derive(1))
    return max(1.0, (lo1 / hi2) ** (1.0 / d), (lo2 / hi1) ** (1.0 / d))


def bm_estimate(k1, k2, restarts: int = 32, rng=None, lower: str = "volume", **kw) -> BMEstimate:
    """Upper bound by :func:`bm_upper` and, when requested, the volume lower bound."""
    rng = rng if rng is not None else RngStream(0)
    est = bm_upper(k1, k2, restarts=restarts, rng=rng.derive(0), **kw)
    if lower == "volume" and _as_body(k1).dim <= 6:
        lo = bm_lower_volume(k1, k2)
        est = est.with_lower(min(lo, est.upper), "volume-product")
    return est


# ---------------------------------------------------------- net certificate


def _interval_mul(alo, ahi, blo, bhi):
    c = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    return c.min(axis=0), c.max(axis=0)


def _interval_det(lo, hi):
    """Interval enclosure of det over boxes ``lo <= T <= hi`` (shape (n, d, d), d <= 3)."""
    d = lo.shape[1]
    if d == 1:
        return lo[:, 0, 0], hi[:, 0, 0]
    tot_lo = np.zeros(len(lo))
    tot_hi = np.zeros(len(lo))
    for perm in itertools.permutations(range(d)):
        sgn = _perm_sign(perm)
        plo, phi = lo[:, 0, perm[0]], hi[:, 0, perm[0]]
        for r in range(1, d):
            plo, phi = _interval_mul(plo, phi, lo[:, r, perm[r]], hi[:, r, perm[r]])
        if sgn > 0:
            tot_lo, tot_hi = tot_lo + plo, tot_hi + phi
        else:
            tot_lo, tot_hi = tot_lo - phi, tot_hi - plo
    return tot_lo, tot_hi


def _perm_sign(perm) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def _sweep(src: _Body, dst: _Body, eta: float, budget: int, chunk: int = 50_000):
    """Search for det +-1 operators T with ||T : src -> dst|| <= eta.

    Cells are boxes of matrices.  A cell is cleared when its determinant
    enclosure misses +-1, or when the center satisfies
    ``||T_c|| > eta + eps_cell * xi`` with ``eps_cell`` the Frobenius radius
    of the cell and ``xi = R_src / r_dst`` (so ``||D : src -> dst|| <= xi |D|_F``).
    Returns ``(ok, cells, net_points, eps_max, min_margin, reason)``.
    """
    d = src.dim
    r_src = float(np.linalg.norm(src.points, axis=1).max())
    r_dst = float(np.min(dst.offsets / np.linalg.norm(dst.normals, axis=1)))
    xi = r_src / r_dst
    # column j of T is T e_j, and e_j / g_j lies in src, so T e_j ∈ eta g_j dst
    g = np.array([gauge_pts(src, e) for e in np.eye(d)])
    h = np.abs(dst.points).max(axis=0)
    bound = eta * np.outer(h, g)
    lo = (-bound)[None]
    hi = bound[None]
    cells = 0
    net = 0
    eps_max = 0.0
    margin = np.inf
    n1 = dst.normals / dst.offsets[:, None]
    while len(lo):
        if cells > budget:
            return False, cells, net, eps_max, margin, "budget"
        take_lo, take_hi = lo[-chunk:], hi[-chunk:]
        lo, hi = lo[:-chunk], hi[:-chunk]
        cells += len(take_lo)
        dlo, dhi = _interval_det(take_lo, take_hi)
        live = ((dlo <= 1) & (dhi >= 1)) | ((dlo <= -1) & (dhi >= -1))
        take_lo, take_hi = take_lo[live], take_hi[live]
        if not len(take_lo):
            continue
        c = 0.5 * (take_lo + take_hi)
        rad = 0.5 * np.sqrt(((take_hi - take_lo) ** 2).sum(axis=(1, 2)))
        norms = (np.einsum("bij,nj->bni", c, src.points) @ n1.T).reshape(len(c), -1).max(axis=1)
        slack = norms - (eta + rad * xi)
        cleared = slack > 0
        if np.any(cleared):
            net += int(cleared.sum())
            eps_max = max(eps_max, float(rad[cleared].max()))
            margin = min(margin, float(slack[cleared].min()))
        rest = ~cleared
        if not np.any(rest):
            continue
        c_lo, c_hi, c_mid = take_lo[rest], take_hi[rest], c[rest]
        # a live center that is itself a near det-1 operator inside the ball ends the sweep
        det_c = np.abs(np.linalg.det(c_mid))
        bad = (norms[rest] <= eta) & (np.abs(det_c - 1) < 1e-9)
        if np.any(bad):
            return False, cells, net, eps_max, margin, "operator found"
        if rad[rest].min() < 1e-9:
            return False, cells, net, eps_max, margin, "resolution"
        width = (c_hi - c_lo).reshape(len(c_lo), -1)
        k = np.argmax(width, axis=1)
        idx = np.arange(len(c_lo))
        mid = 0.5 * (c_lo.reshape(len(c_lo), -1)[idx, k] + c_hi.reshape(len(c_lo), -1)[idx, k])
        left_hi = c_hi.reshape(len(c_lo), -1).copy()
        left_hi[idx, k] = mid
        right_lo = c_lo.reshape(len(c_lo), -1).copy()
        right_lo[idx, k] = mid
        lo = np.concatenate([lo, c_lo, right_lo.reshape(c_lo.shape)])
        hi = np.concatenate([hi, left_hi.reshape(c_hi.shape), c_hi])
    return True, cells, net, eps_max, margin, "cleared"


def gauge_pts(b: _Body, x) -> float:
    return float(np.max(b.normals @ x / b.offsets))


def bm_lower_netcert(k1, k2, eta: float, eps: float | None = None,
                     budget: int = 10**7) -> NetCertificate:
    """Certify ``d(K1, K2) >= eta**2`` by an adaptive operator net.

    K2 is rescaled to the volume of K1 (this does not change the distance).
    If no operator of determinant +-1 maps K1 into eta K2 and none maps K2
    into eta K1, every operator has one of the two norms in
    ``||T : K1 -> K2|| * ||T^-1 : K2 -> K1||`` above eta after determinant
    normalisation, so the distance is at least eta**2.  The net is refined
    adaptively; ``eps`` (when given) caps the initial cell radius only as a
    reporting device and does not affect soundness.
    """
    s1, s2 = _as_body(k1), _as_body(k2)
    d = s1.dim
    if d > 3:
        raise ValueError("net certificates are restricted to d <= 3")
    if not (s1.symmetric and s2.symmetric):
        raise ValueError("net certificates need symmetric bodies")
    v1 = volume_hull(VPolytope(s1.points)).value
    v2 = volume_hull(VPolytope(s2.points)).value
    c = (v1 / v2) ** (1.0 / d)
    s2 = _Body(s2.points * c, s2.normals, s2.offsets * c, True, s2.source)
    xi = max(np.linalg.norm(s1.points, axis=1).max() / np.min(s2.offsets / np.linalg.norm(s2.normals, axis=1)),
             np.linalg.norm(s2.points, axis=1).max() / np.min(s1.offsets / np.linalg.norm(s1.normals, axis=1)))
    ok1, cells1, net1, e1, m1, why1 = _sweep(s1, s2, eta, budget)
    if not ok1:
        return NetCertificate(eta, e1, xi, eta + e1 * xi, net1, cells1, m1, False, 1.0,
                              f"K1->K2 sweep: {why1}")
    ok2, cells2, net2, e2, m2, why2 = _sweep(s2, s1, eta, budget - cells1)
    eps_all = max(e1, e2)
    net = net1 + net2
    if cells1 + cells2 > budget:
        raise NetTooLarge(f"net certificate exceeded {budget} cells")
    if not ok2:
        return NetCertificate(eta, eps_all, xi, eta + eps_all * xi, net, cells1 + cells2,
                              min(m1, m2), False, 1.0, f"K2->K1 sweep: {why2}")
    return NetCertificate(eta, eps_all, xi, eta + eps_all * xi, net, cells1 + cells2,
                          min(m1, m2), True, eta * eta, "both sweeps cleared")


def brute_force_grid_2d(k1, k2, points: int = 10**6, smax: float = 4.0, chunk: int = 20_000) -> float:
    """Minimum of ``||T|| ||T^-1||`` over a grid of det +-1 operators in the plane.

    Operators are ``R(alpha) diag(s, 1/s) R(beta) J`` with ``J`` in
    ``{I, diag(1, -1)}``; the grid is uniform in alpha, beta and log s.
    """
    b1, b2 = _as_body(k1), _as_body(k2)
    side = max(2, int(round((points / 2) ** (1 / 3))))
    al = np.linspace(0, np.pi, side, endpoint=False)
    be = np.linspace(0, np.pi, side, endpoint=False)
    ls = np.linspace(0, math.log(smax), side)
    grid = np.array(np.meshgrid(al, be, ls, indexing="ij")).reshape(3, -1).T
    best = np.inf
    zero = np.zeros((1, 2))
    for refl in (np.eye(2), np.diag([1.0, -1.0])):
        for start in range(0, len(grid), chunk):
            g = grid[start:start + chunk]
            ca, sa, cb, sb = np.cos(g[:, 0]), np.sin(g[:, 0]), np.cos(g[:, 1]), np.sin(g[:, 1])
            s = np.exp(g[:, 2])
            ra = np.stack([np.stack([ca, -sa], -1), np.stack([sa, ca], -1)], 1)
            rb = np.stack([np.stack([cb, -sb], -1), np.stack([sb, cb], -1)], 1)
            dg = np.zeros((len(g), 2, 2))
            dg[:, 0, 0], dg[:, 1, 1] = s, 1 / s
            t = ra @ dg @ rb @ refl
            f, h = _norms(t, np.repeat(zero, len(g), 0), np.repeat(zero, len(g), 0), b1, b2)
            best = min(best, float((f * h).min()))
    return best


# ------------------------------------------------------- perturbation bounds


def perturb_section_check(l1: GrassmannPoint, l2: GrassmannPoint, m: int, restarts: int = 4,
                          rng=None, slack: float = 0.05, max_iter: int = 300):
    """``d(K_m ∩ L1, K_m ∩ L2) <= (1 + eps m^{3/2})^2`` with eps the metric upper bound.

    The rotation ``U`` with ``U L1 = L2`` is the warm start
    (``T = L1^T U^T L2`` maps the K2 coordinates to the K1 coordinates).
    Returns ``(rho_upper, bm_upper, bound)``.
    """
    if l1.dim != m or l2.dim != m or m > 5:
        raise ValueError("need m-dimensional subspaces with m <= 5")
    n1 = l1.ambient_dim - 1
    k1, k2 = km_body(n1, m, l1), km_body(n1, m, l2)
    rho = grassmann_metric(l1, l2)[1]
    bound = (1.0 + rho * m ** 1.5) ** 2
    u = grassmann_rotation(l1, l2)
    t0 = l1.basis.T @ u.T @ l2.basis
    z = np.zeros(m)
    est = bm_upper(k1, k2, restarts=restarts, rng=rng, max_iter=max_iter, init=[(t0, z, z)])
    if est.upper > bound + slack:
        raise PerturbationBoundViolation(f"d = {est.upper:.6g} exceeds {bound:.6g} + {slack}")
    return rho, est.upper, bound


def perturb_projection_check(k: PositionedSection, f1: GrassmannPoint, f2: GrassmannPoint,
                             restarts: int = 4, rng=None, slack: float = 0.05, max_iter: int = 300):
    """``d(P1 K, P2 K) <= (1 + eps m^{3/2})^2`` for orthogonal projections onto F1, F2."""
    if f1.dim != f2.dim or not f1.dim <= k.m <= 5:
        raise ValueError("need equal projection dimensions n <= m <= 5")
    m = k.m
    p1 = project_section(k, f1).body
    p2 = project_section(k, f2).body
    rho = grassmann_metric(f1, f2)[1]
    bound = (1.0 + rho * m ** 1.5) ** 2
    u = grassmann_rotation(f1, f2)
    t0 = f1.basis.T @ u.T @ f2.basis
    z = np.zeros(f1.dim)
    est = bm_upper(p1, p2, restarts=restarts, rng=rng, max_iter=max_iter, init=[(t0, z, z)])
    if est.upper > bound + slack:
        raise PerturbationBoundViolation(f"d = {est.upper:.6g} exceeds {bound:.6g} + {slack}")
    return rho, est.upper, bound
