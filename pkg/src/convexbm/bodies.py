"""Polytopes, gauges, polarity, sections, projections and the John ellipsoid.

Two representations are used throughout:

* :class:`VPolytope` -- a finite point list, read as ``conv(points)`` or, when
  ``symmetric`` is set, as ``absconv(points) = conv(points ∪ -points)``.
* :class:`HPolytope` -- ``{x : normals @ x <= offsets}``.

Gauges of V-polytopes are computed with a linear program by default; the
qhull facet description (``VPolytope.hrep``) is the fast path used inside the
optimisation loops and, independently, the oracle for the LP route.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .kernel import (
    LPProblem,
    NumericalFailure,
    RankDeficient,
    chebyshev_center,
    lp_solve,
    orthonormalize,
)

CONTAIN_TOL = 1e-9


class OriginNotInterior(ValueError):
    pass


class EmptyInterior(ValueError):
    pass


class IterationLimit(RuntimeError):
    pass


class CenterVerificationError(RuntimeError):
    pass


# ------------------------------------------------------------------- types


@dataclass(frozen=True, eq=False)
class VPolytope:
    vertices: np.ndarray
    symmetric: bool = False

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if v.size == 0:
            raise ValueError("a V-polytope needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def points(self) -> np.ndarray:
        """Every point whose convex hull is the body (negatives included)."""
        if self.symmetric:
            return np.vstack([self.vertices, -self.vertices])
        return self.vertices

    @cached_property
    def hrep(self) -> "HPolytope":
        """Facet description from qhull; requires a full-dimensional body."""
        pts = self.points
        if self.dim == 1:
            lo, hi = pts.min(), pts.max()
            return HPolytope(np.array([[1.0], [-1.0]]), np.array([hi, -lo]))
        try:
            hull = ConvexHull(pts)
        except QhullError as exc:
            raise EmptyInterior("V-polytope is not full-dimensional") from exc
        normals = hull.equations[:, :-1]
        offsets = -hull.equations[:, -1]
        normals, offsets = _dedupe_facets(normals, offsets)
        return HPolytope(normals, offsets)

    def scaled(self, t: float) -> "VPolytope":
        return VPolytope(self.vertices * t, self.symmetric)

    def transformed(self, t) -> "VPolytope":
        return VPolytope(self.vertices @ np.asarray(t, dtype=float).T, self.symmetric)


@dataclass(frozen=True, eq=False)
class HPolytope:
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.asarray(self.offsets, dtype=float).ravel()
        if a.shape[0] != b.size:
            raise ValueError("one offset per facet normal")
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def contains(self, x, tol: float = CONTAIN_TOL) -> np.ndarray | bool:
        x = np.asarray(x, dtype=float)
        ok = np.all(x @ self.normals.T <= self.offsets + tol, axis=-1)
        return ok if x.ndim > 1 else bool(ok)

    def gauge_many(self, xs) -> np.ndarray:
        """Row-wise gauge; only valid when the origin is interior."""
        if np.any(self.offsets <= 0):
            raise OriginNotInterior("origin is not interior to the H-polytope")
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        vals = (xs @ self.normals.T) / self.offsets
        return np.maximum(vals.max(axis=1), 0.0)

    def translated(self, a) -> "HPolytope":
        """The body ``K - a``."""
        return HPolytope(self.normals, self.offsets - self.normals @ np.asarray(a, float))

    def transformed(self, t) -> "HPolytope":
        """The body ``T K`` for invertible ``T``."""
        tinv = np.linalg.inv(np.asarray(t, dtype=float))
        return HPolytope(self.normals @ tinv, self.offsets)

    def scaled(self, t: float) -> "HPolytope":
        return HPolytope(self.normals, self.offsets * t)

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return enumerate_vertices(self)


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """``offset + span(basis)`` with orthonormal basis columns."""

    offset: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.basis, dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        off = np.asarray(self.offset, dtype=float).ravel()
        if off.size != q.shape[0]:
            raise ValueError("offset and basis live in different dimensions")
        if not np.allclose(q.T @ q, np.eye(q.shape[1]), atol=1e-9):
            q = orthonormalize(q)
        object.__setattr__(self, "basis", q)
        object.__setattr__(self, "offset", off)

    @classmethod
    def linear(cls, basis) -> "AffineSubspace":
        q = np.asarray(basis, dtype=float)
        if q.ndim == 1:
            q = q[:, None]
        return cls(np.zeros(q.shape[0]), orthonormalize(q))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_linear(self) -> bool:
        return bool(np.allclose(self.offset, 0.0, atol=1e-12))

    def to_ambient(self, y) -> np.ndarray:
        return self.offset + np.asarray(y, dtype=float) @ self.basis.T

    def to_intrinsic(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.offset) @ self.basis

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """``{x : (x - center)^T shape^{-1} (x - center) <= 1}``."""

    center: np.ndarray
    shape: np.ndarray

    @property
    def dim(self) -> int:
        return self.center.size

    def sqrt_shape(self) -> np.ndarray:
        w, u = np.linalg.eigh(self.shape)
        return (u * np.sqrt(w)) @ u.T

    def log_volume_ratio(self) -> float:
        """log of vol(E)/vol(B_2^d)."""
        return 0.5 * float(np.linalg.slogdet(self.shape)[1])


# --------------------------------------------------------- canned bodies


def cube(d: int, half_width: float = 1.0) -> HPolytope:
    eye = np.eye(d)
    return HPolytope(np.vstack([eye, -eye]), np.full(2 * d, float(half_width)))


def cube_vertices(d: int) -> VPolytope:
    corners = np.array(list(itertools.product([-1.0, 1.0], repeat=d)))
    return VPolytope(corners[corners[:, 0] > 0], symmetric=True)


def cross_polytope(d: int) -> VPolytope:
    return VPolytope(np.eye(d), symmetric=True)


def regular_polygon(k: int, phase: float = 0.0) -> VPolytope:
    """Regular k-gon inscribed in the unit circle (symmetric flag when k even)."""
    t = phase + 2 * np.pi * np.arange(k) / k
    pts = np.column_stack([np.cos(t), np.sin(t)])
    if k % 2 == 0:
        return VPolytope(pts[: k // 2], symmetric=True)
    return VPolytope(pts)


def hpolytope_from_vertices(v: VPolytope) -> HPolytope:
    return v.hrep


# -------------------------------------------------------------- operations


def gauge(k, x, method: str = "auto") -> float:
    """Minkowski functional ``inf{t > 0 : x in t K}``.

    For V-polytopes the default is the LP over convex (or absolutely convex)
    coefficients; ``method="hrep"`` uses the qhull facets instead.
    """
    x = np.asarray(x, dtype=float).ravel()
    if isinstance(k, HPolytope):
        return float(k.gauge_many(x[None, :])[0])
    if method == "hrep":
        return float(k.hrep.gauge_many(x[None, :])[0])
    if not np.any(x):
        return 0.0
    v = k.vertices
    n = v.shape[0]
    if k.symmetric:
        rows = np.hstack([v.T, -v.T])
        cost = np.ones(2 * n)
    else:
        rows = v.T
        cost = np.ones(n)
    sol = lp_solve(LPProblem(cost, rows, x, senses=["="] * k.dim,
                             bounds=[(0.0, None)] * cost.size))
    if sol.status != "optimal":
        raise OriginNotInterior("origin is not interior: direction outside the cone of vertices")
    return sol.value


def gauges(k, xs, method: str = "auto") -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if isinstance(k, HPolytope):
        return k.gauge_many(xs)
    if method == "hrep" or (method == "auto" and k.dim <= 8):
        return k.hrep.gauge_many(xs)
    return np.array([gauge(k, x, method="lp") for x in xs])


def origin_interior(k) -> bool:
    if isinstance(k, HPolytope):
        return bool(np.all(k.offsets > 0)) and _bounded(k)
    if np.linalg.matrix_rank(k.points) < k.dim:
        return False
    if k.symmetric:
        return True
    try:
        for s in (1.0, -1.0):
            for i in range(k.dim):
                gauge(k, s * np.eye(k.dim)[i])
    except OriginNotInterior:
        return False
    return True


def _bounded(h: HPolytope) -> bool:
    # bounded iff the normals positively span R^d: max |e_i . x| finite for all i
    for s in (1.0, -1.0):
        for i in range(h.dim):
            sol = lp_solve(LPProblem(s * np.eye(h.dim)[i], h.normals, h.offsets, maximize=True))
            if sol.status != "optimal":
                return False
    return True


def support(k, u) -> float:
    """``h_K(u) = max_{x in K} <x, u>``."""
    u = np.asarray(u, dtype=float).ravel()
    if isinstance(k, VPolytope):
        return float(np.max(k.points @ u))
    sol = lp_solve(LPProblem(u, k.normals, k.offsets, maximize=True))
    if sol.status == "unbounded":
        return float("inf")
    if sol.status != "optimal":
        raise EmptyInterior("H-polytope is empty")
    return sol.value


def supports(k, us) -> np.ndarray:
    us = np.atleast_2d(np.asarray(us, dtype=float))
    if isinstance(k, VPolytope):
        return (us @ k.points.T).max(axis=1)
    verts = k.vertex_array
    return (us @ verts.T).max(axis=1)


def polar(k):
    """Polar body.  V-polytope -> H-polytope with one facet per vertex; the
    reverse direction returns the V-polytope of scaled facet normals."""
    if isinstance(k, VPolytope):
        if not origin_interior(k):
            raise OriginNotInterior("polar needs the origin in the interior")
        pts = k.vertices
        if k.symmetric:
            return HPolytope(np.vstack([pts, -pts]), np.ones(2 * len(pts)))
        return HPolytope(pts, np.ones(len(pts)))
    if np.any(k.offsets <= 0):
        raise OriginNotInterior("polar needs the origin in the interior")
    return VPolytope(k.normals / k.offsets[:, None])


def prune_vertices(k: VPolytope, method: str = "lp") -> VPolytope:
    """Drop points that are convex combinations of the remaining ones."""
    pts = _unique_rows(k.vertices)
    if k.symmetric:
        pts = _unique_up_to_sign(pts)
    if method == "hull" and k.dim >= 2 and len(pts) > k.dim + 1:
        try:
            hull = ConvexHull(np.vstack([pts, -pts]) if k.symmetric else pts)
        except QhullError:
            pass
        else:
            idx = np.unique(hull.vertices % len(pts))
            return VPolytope(pts[idx], k.symmetric)
    keep = list(range(len(pts)))
    for i in range(len(pts)):
        others = [j for j in keep if j != i]
        if not others:
            continue
        w = pts[others]
        if k.symmetric:
            w = np.vstack([w, -w])
        if _in_hull(w, pts[i]):
            keep.remove(i)
    return VPolytope(pts[keep], k.symmetric)


def _in_hull(w: np.ndarray, p: np.ndarray) -> bool:
    n = w.shape[0]
    rows = np.vstack([w.T, np.ones((1, n))])
    rhs = np.r_[p, 1.0]
    sol = lp_solve(LPProblem(np.zeros(n), rows, rhs, senses=["="] * rows.shape[0],
                             bounds=[(0.0, None)] * n))
    return sol.status == "optimal"


def contains_scaled(k1: VPolytope, lam: float, k2) -> bool:
    """``K1 ⊆ lam * K2`` by checking the k2-gauge of every vertex of k1."""
    return bool(np.max(gauges(k2, k1.points)) <= lam + CONTAIN_TOL)


def section(k: HPolytope, f: AffineSubspace) -> HPolytope:
    """``K ∩ F`` in the intrinsic coordinates ``y`` of ``x = offset + basis @ y``."""
    a = k.normals @ f.basis
    b = k.offsets - k.normals @ f.offset
    scale = np.linalg.norm(k.normals, axis=1)
    trivial = np.linalg.norm(a, axis=1) <= 1e-12 * np.maximum(scale, 1.0)
    if np.any(b[trivial] < -CONTAIN_TOL):
        raise EmptyInterior("affine subspace misses the body")
    a, b = a[~trivial], b[~trivial]
    if a.shape[0] == 0:
        raise EmptyInterior("section is unbounded")
    _, r = chebyshev_center(a, b)
    if r <= 1e-10:
        raise EmptyInterior("section has empty relative interior")
    return HPolytope(a, b)


def project(k: VPolytope, e: AffineSubspace, prune: str | None = "lp") -> VPolytope:
    """Orthogonal projection onto the linear subspace ``e``, in its coordinates."""
    if not e.is_linear:
        raise ValueError("projection target must be a linear subspace")
    out = VPolytope(k.vertices @ e.basis, k.symmetric)
    if prune is None:
        return out
    return prune_vertices(out, method=prune)


# ---------------------------------------------------------- vertex enumeration


def enumerate_vertices(h: HPolytope, tol: float = 1e-9, chunk: int = 20000) -> np.ndarray:
    """Vertices of a bounded H-polytope by solving every ``dim``-subset of facets."""
    a, b = h.normals, h.offsets
    k, d = a.shape
    if d > 6:
        raise ValueError("facet-subset enumeration is capped at dimension 6")
    if d == 1:
        pos = a[:, 0] > 0
        neg = a[:, 0] < 0
        return np.array([[np.min(b[pos] / a[pos, 0])], [np.max(b[neg] / a[neg, 0])]])
    scale = np.maximum(np.abs(b), 1.0)
    found = []
    combos = itertools.combinations(range(k), d)
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=int)
        if block.size == 0:
            break
        mats = a[block]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-12
        if not np.any(ok):
            continue
        xs = np.linalg.solve(mats[ok], b[block[ok]][..., None])[..., 0]
        feas = np.all(xs @ a.T <= b + tol * scale, axis=1)
        found.append(xs[feas])
    if not found:
        raise EmptyInterior("no vertices: polytope empty or unbounded")
    verts = np.vstack(found)
    if verts.shape[0] == 0:
        raise EmptyInterior("no vertices: polytope empty or unbounded")
    return _unique_rows(verts, 1e-8)


# ------------------------------------------------------------ John ellipsoid


def john_ellipsoid(k: HPolytope, tol: float = 1e-10, max_iter: int = 500) -> Ellipsoid:
    """Maximal-volume inscribed ellipsoid ``{c + B u : |u| <= 1}``.

    Maximises ``log det B`` subject to ``|B a_i| <= b_i - a_i.c`` with a
    barrier-Newton scheme (second-order-cone log barrier per facet, Newton
    steps with backtracking that keep every facet strictly feasible).
    Returns ``shape = B @ B``.
    """
    d = k.dim
    if d > 10:
        raise ValueError("John ellipsoid is capped at dimension 10")
    a = k.normals / np.linalg.norm(k.normals, axis=1)[:, None]
    b = k.offsets / np.linalg.norm(k.normals, axis=1)
    c0, r0 = chebyshev_center(a, b)
    if r0 <= 1e-12:
        raise EmptyInterior("polytope has empty interior")

    sym_basis = _sym_basis(d)
    z = np.r_[c0, _vech(0.5 * r0 * np.eye(d), d)]
    n_con = len(b)
    t = 1.0
    for _ in range(80):
        for _ in range(max_iter):
            f0, grad, hess = _john_terms(z, t, a, b, sym_basis)
            try:
                step = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                step = grad * 1e-3
            dec = grad @ step
            if dec <= 1e-13 * max(1.0, abs(f0)):
                break
            s_len = 1.0
            while s_len > 1e-12:
                zn = z + s_len * step
                fn = _john_barrier(zn, t, a, b, sym_basis)
                if fn >= f0 + 0.25 * s_len * dec:
                    break
                s_len *= 0.5
            else:
                break
            z = zn
        else:
            raise IterationLimit("John ellipsoid Newton loop did not converge")
        if 2 * n_con / t < tol:
            break
        t *= 8.0
    else:
        raise IterationLimit("John ellipsoid barrier loop did not converge")
    c, bm = _john_unpack(z, sym_basis)
    return Ellipsoid(c, bm @ bm)


def _john_unpack(z, sym_basis):
    d = sym_basis.shape[1]
    return z[:d], np.einsum("j,jkl->kl", z[d:], sym_basis)


def _john_barrier(z, t, a, b, sym_basis) -> float:
    c, bm = _john_unpack(z, sym_basis)
    s = b - a @ c
    y = a @ bm
    gval = s * s - np.einsum("ij,ij->i", y, y)
    if np.any(s <= 0) or np.any(gval <= 0):
        return -np.inf
    sign, logdet = np.linalg.slogdet(bm)
    if sign <= 0:
        return -np.inf
    return t * logdet + float(np.sum(np.log(gval)))


def _john_terms(z, t, a, b, sym_basis):
    """Value, gradient and Hessian of ``t log det B + sum log(s_i^2 - |B a_i|^2)``."""
    d = sym_basis.shape[1]
    q = sym_basis.shape[0]
    c, bm = _john_unpack(z, sym_basis)
    s = b - a @ c
    y = a @ bm                                           # rows B a_i (B symmetric)
    gval = s * s - np.einsum("ij,ij->i", y, y)
    binv = np.linalg.inv(bm)
    m1 = np.einsum("kl,jlm->jkm", binv, sym_basis)       # B^-1 E_j
    p = d + q
    grad = np.zeros(p)
    hess = np.zeros((p, p))
    grad[d:] = t * np.einsum("jkk->j", m1)
    hess[d:, d:] = -t * np.einsum("jkm,imk->ji", m1, m1)
    jac = np.zeros((len(s), 1 + d, p))
    jac[:, 0, :d] = -a
    jac[:, 1:, d:] = np.einsum("jkl,il->ikj", sym_basis, a)
    w = np.concatenate([2 * s[:, None], -2 * y], axis=1) / gval[:, None]
    jdiag = np.diag(np.r_[1.0, -np.ones(d)])
    grad += np.einsum("ir,irp->p", w, jac)
    hsy = (2.0 / gval)[:, None, None] * jdiag[None] - np.einsum("ir,is->irs", w, w)
    hj = hsy @ jac
    hess += jac.reshape(-1, p).T @ hj.reshape(-1, p)
    sign, logdet = np.linalg.slogdet(bm)
    val = t * logdet + float(np.sum(np.log(gval))) if sign > 0 and np.all(gval > 0) else -np.inf
    return val, grad, hess


def _sym_basis(d: int) -> np.ndarray:
    mats = []
    for i in range(d):
        for j in range(i, d):
            e = np.zeros((d, d))
            e[i, j] = e[j, i] = 1.0
            mats.append(e)
    return np.array(mats)


def _vech(m: np.ndarray, d: int) -> np.ndarray:
    return np.array([m[i, j] for i in range(d) for j in range(i, d)])


# --------------------------------------------------------------- centering


def asymmetry_factor(k: HPolytope, a) -> float:
    """Least ``lam`` with ``-(K - a) ⊆ lam (K - a)``."""
    a = np.asarray(a, dtype=float)
    lows = _facet_minima(k)
    slack = k.offsets - k.normals @ a
    if np.any(slack <= 0):
        return float("inf")
    return float(np.max((k.normals @ a - lows) / slack))


def _facet_minima(k: HPolytope) -> np.ndarray:
    if k.dim <= 6:
        v = k.vertex_array
        return (v @ k.normals.T).min(axis=0)
    return np.array([-support(k, -n) for n in k.normals])


def center_position(k: HPolytope, tol: float = 1e-8) -> np.ndarray:
    """A point ``a`` with ``-(K - a) ⊆ dim (K - a)``.

    The John center satisfies this exactly; when floating point error pushes
    the computed center marginally outside the admissible set (the set is a
    single point for a simplex) it is moved to the nearest admissible point
    in the max-norm, found by a linear program.
    """
    m = k.dim
    a = john_ellipsoid(k).center
    if asymmetry_factor(k, a) <= m + 1e-10:
        return a
    lows = _facet_minima(k)
    # (m + 1) n_i . a' <= m b_i + low_i  and  |a' - a|_inf <= t
    n = k.normals.shape[0]
    rows = np.vstack([
        np.hstack([(m + 1) * k.normals, np.zeros((n, 1))]),
        np.hstack([np.eye(m), -np.ones((m, 1))]),
        np.hstack([-np.eye(m), -np.ones((m, 1))]),
    ])
    rhs = np.r_[m * k.offsets + lows, a, -a]
    sol = lp_solve(LPProblem(np.r_[np.zeros(m), 1.0], rows, rhs))
    if sol.status != "optimal":
        raise CenterVerificationError("no point satisfies the centering inclusion")
    a2 = sol.x[:m]
    if asymmetry_factor(k, a2) > m + tol:
        raise CenterVerificationError(
            f"centering inclusion violated: factor {asymmetry_factor(k, a2):.12g} > {m}")
    return a2


# ----------------------------------------------------------------- helpers


def _unique_rows(x: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if len(x) == 0:
        return x
    keys = np.round(x / max(tol, 1e-15)).astype(np.int64) if tol > 0 else x
    _, idx = np.unique(keys, axis=0, return_index=True)
    return x[np.sort(idx)]


def _unique_up_to_sign(x: np.ndarray) -> np.ndarray:
    keep = []
    for i, p in enumerate(x):
        if not any(np.allclose(p, -x[j], atol=1e-12) or np.allclose(p, x[j], atol=1e-12)
                   for j in keep):
            keep.append(i)
    return x[keep]


def _dedupe_facets(normals: np.ndarray, offsets: np.ndarray):
    norms = np.linalg.norm(normals, axis=1)
    n = normals / norms[:, None]
    o = offsets / norms
    keys = np.round(np.column_stack([n, o]) * 1e9).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    idx = np.sort(idx)
    return n[idx], o[idx]


# --------------------------------------------------------------------- JSON


def polytope_to_json(k) -> str:
    if isinstance(k, VPolytope):
        doc = {"dim": k.dim, "rep": "V", "symmetric": bool(k.symmetric),
               "data": k.vertices.tolist(), "offsets": []}
    else:
        doc = {"dim": k.dim, "rep": "H", "symmetric": False,
               "data": k.normals.tolist(), "offsets": k.offsets.tolist()}
    return json.dumps(doc)


def polytope_from_json(text: str | dict):
    doc = json.loads(text) if isinstance(text, str) else text
    data = np.asarray(doc["data"], dtype=float).reshape(-1, int(doc["dim"]))
    if doc["rep"] == "V":
        return VPolytope(data, bool(doc.get("symmetric", False)))
    if doc["rep"] == "H":
        return HPolytope(data, np.asarray(doc["offsets"], dtype=float))
    raise ValueError(f"unknown representation {doc['rep']!r}")


def subspace_to_json(f: AffineSubspace) -> dict:
    return {"offset": f.offset.tolist(), "basis": f.basis.tolist()}


def subspace_from_json(doc: dict) -> AffineSubspace:
    return AffineSubspace(np.asarray(doc["offset"], float), np.asarray(doc["basis"], float))


__all__ = [
    "AffineSubspace", "Ellipsoid", "HPolytope", "VPolytope", "EmptyInterior",
    "OriginNotInterior", "IterationLimit", "CenterVerificationError",
    "asymmetry_factor", "center_position", "contains_scaled", "cross_polytope",
    "cube", "cube_vertices", "enumerate_vertices", "gauge", "gauges",
    "john_ellipsoid", "origin_interior", "polar", "polytope_from_json",
    "polytope_to_json", "project", "prune_vertices", "regular_polygon",
    "section", "subspace_from_json", "subspace_to_json", "support", "supports",
    "NumericalFailure", "RankDeficient",
]
