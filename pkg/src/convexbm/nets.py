"""Sphere and Grassmannian nets, the subspace metric, and Gluskin polytopes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .bodies import AffineSubspace, VPolytope, _unique_up_to_sign
from .kernel import RngStream, as_generator, orthonormalize, random_unit_vector


class ParameterRangeError(ValueError):
    pass


# -------------------------------------------------------------- sphere nets


@dataclass(frozen=True, eq=False)
class SphereNet:
    dim: int
    radius: float
    points: np.ndarray
    symmetric: bool

    def __len__(self):
        return len(self.points)


def sphere_net(dim: int, eps: float, symmetric: bool, rng, patience: int | None = None,
               batch: int = 4096) -> SphereNet:
    """Greedy eps-separated set on S^{dim-1}.

    Candidates are uniform directions; one is accepted when it is farther
    than ``eps`` from every chosen point.  Construction stops after
    ``patience`` (default ``10**4 * dim``) consecutive rejections.  The result
    is a packing, so its size obeys the volumetric bound (1 + 2/eps)^dim.
    """
    if dim < 1 or not 0 < eps < 1:
        raise ValueError("need dim >= 1 and eps in (0, 1)")
    if dim == 1:
        return SphereNet(1, eps, np.array([[1.0], [-1.0]]), True)
    gen = as_generator(rng)
    patience = 10**4 * dim if patience is None else patience
    pts = np.empty((0, dim))
    misses = 0
    while misses < patience:
        cand = random_unit_vector(dim, gen, size=batch)
        start = 0
        while start < len(cand):
            rest = cand[start:]
            if len(pts):
                dist2 = ((rest[:, None, :] - pts[None, :, :]) ** 2).sum(-1).min(1)
                far = np.flatnonzero(dist2 > eps * eps)
            else:
                far = np.array([0])
            if far.size == 0:
                misses += len(rest)
                break
            i = int(far[0])
            misses = 0 if i == 0 else misses + i
            if misses >= patience:
                break
            p = rest[i]
            pts = np.vstack([pts, p, -p]) if symmetric else np.vstack([pts, p])
            start += i + 1
    return SphereNet(dim, eps, pts, symmetric)


def certify_net(net: SphereNet, samples: int, rng, batch: int = 8192) -> float:
    """Empirical covering radius: max over random directions of the distance to the net."""
    gen = as_generator(rng)
    if net.dim == 1:
        # S^0 is the two points +-1; exhaustive
        x = np.array([[1.0], [-1.0]])
        return float(np.sqrt(((x[:, None] - net.points[None]) ** 2).sum(-1).min(1).max()))
    worst = 0.0
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        x = random_unit_vector(net.dim, gen, size=n)
        d2 = (x * x).sum(1)[:, None] + (net.points ** 2).sum(1)[None] - 2 * x @ net.points.T
        worst = max(worst, float(np.sqrt(max(d2.min(1).max(), 0.0))))
        done += n
    return worst


# ------------------------------------------------------------- Grassmannian


@dataclass(frozen=True, eq=False)
class GrassmannPoint:
    basis: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def subspace(self) -> AffineSubspace:
        return AffineSubspace(np.zeros(self.ambient_dim), self.basis)

    def moved(self, u) -> "GrassmannPoint":
        return GrassmannPoint(np.asarray(u) @ self.basis)


def random_subspace(d: int, k: int, rng) -> GrassmannPoint:
    """Haar-random k-dimensional subspace of R^d."""
    if not 1 <= k <= d:
        raise ValueError("need 1 <= k <= d")
    gen = as_generator(rng)
    return GrassmannPoint(orthonormalize(gen.standard_normal((d, k))))


def principal_angles(e: GrassmannPoint, f: GrassmannPoint) -> np.ndarray:
    if e.basis.shape != f.basis.shape:
        raise ValueError("subspaces must share ambient and intrinsic dimension")
    s = np.linalg.svd(e.basis.T @ f.basis, compute_uv=False)
    return np.sort(np.arccos(np.clip(s, -1.0, 1.0)))


def grassmann_metric(e: GrassmannPoint, f: GrassmannPoint) -> tuple[float, float]:
    """Bracket ``(sin t, 2 sin(t/2))`` around inf{|U - I| : U orthogonal, UE = F},
    where t is the largest principal angle."""
    theta = float(principal_angles(e, f)[-1])
    if theta < 1e-12:
        return 0.0, 0.0
    return math.sin(theta), 2.0 * math.sin(theta / 2.0)


def grassmann_rotation(e: GrassmannPoint, f: GrassmannPoint) -> np.ndarray:
    """Orthogonal U with U E = F and |U - I| = 2 sin(t_max / 2).

    Rotates each principal vector of E onto its partner in F inside the
    plane they span; these planes are mutually orthogonal.
    """
    p, q = e.basis, f.basis
    y, s, zt = np.linalg.svd(p.T @ q)
    pv = p @ y
    qv = q @ zt.T
    d = p.shape[0]
    u_mat = np.eye(d)
    for i, c in enumerate(np.clip(s, -1.0, 1.0)):
        sn = math.sqrt(max(0.0, 1.0 - c * c))
        if sn < 1e-14:
            continue
        pi = pv[:, i]
        ui = (qv[:, i] - c * pi) / sn
        ui /= np.linalg.norm(ui)
        u_mat += (c - 1.0) * (np.outer(pi, pi) + np.outer(ui, ui)) + sn * (np.outer(ui, pi) - np.outer(pi, ui))
    return u_mat


def small_rotation(d: int, eps: float, rng) -> np.ndarray:
    """Random orthogonal U (det 1) with |U - I| = eps exactly.

    Built as a rotation by angle 2 arcsin(eps/2) in one random plane.
    """
    if not 0 <= eps <= 2:
        raise ValueError("eps must be in [0, 2]")
    gen = as_generator(rng)
    basis = orthonormalize(gen.standard_normal((d, 2)))
    a, b = basis[:, 0], basis[:, 1]
    th = 2.0 * math.asin(eps / 2.0)
    c, s = math.cos(th), math.sin(th)
    return np.eye(d) + (c - 1) * (np.outer(a, a) + np.outer(b, b)) + s * (np.outer(b, a) - np.outer(a, b))


@dataclass(frozen=True, eq=False)
class GrassmannNet:
    d: int
    k: int
    eps: float
    points: list[GrassmannPoint] = field(default_factory=list)

    @property
    def log_cardinality(self) -> float:
        return math.log(len(self.points))


def grassmann_net(d: int, k: int, eps: float, rng, patience: int | None = None,
                  sweep: int = 10**5, max_rounds: int = 50) -> GrassmannNet:
    """Greedy eps-separated set of Haar subspaces, separation in the metric upper bound.

    After the greedy phase, sweeps of ``sweep`` Haar subspaces add every
    uncovered sample until a full sweep finds none.
    """
    if not 1 <= k <= d <= 8:
        raise ValueError("need 1 <= k <= d <= 8")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if k == d:
        return GrassmannNet(d, k, eps, [GrassmannPoint(np.eye(d))])
    gen = as_generator(rng)
    patience = 2000 * (k * (d - k) + 1) if patience is None else patience
    # 2 sin(t/2) > eps  <=>  t > 2 arcsin(eps/2)  <=>  min singular value < cos(.)
    cos_lim = math.cos(2.0 * math.asin(eps / 2.0))
    bases: list[np.ndarray] = []
    misses = 0
    while misses < patience:
        cand = random_subspace(d, k, gen).basis
        if bases:
            stack = np.array(bases)
            svals = np.linalg.svd(np.einsum("nij,ik->njk", stack, cand), compute_uv=False)
            if np.any(svals.min(axis=1) >= cos_lim):
                misses += 1
                continue
        bases.append(cand)
        misses = 0
    for _ in range(max_rounds):
        added = False
        for start in range(0, sweep, 1024):
            cands = _random_bases(d, k, gen, min(1024, sweep - start))
            open_idx = np.flatnonzero(_coverage(np.array(bases), cands) < cos_lim)
            for i in open_idx:
                if _coverage(np.array(bases), cands[i:i + 1])[0] < cos_lim:
                    bases.append(cands[i])
                    added = True
        if not added:
            break
    return GrassmannNet(d, k, eps, [GrassmannPoint(b) for b in bases])


def _random_bases(d: int, k: int, gen, n: int) -> np.ndarray:
    """``n`` Haar-random orthonormal d x k bases (batched QR with sign fix)."""
    q, r = np.linalg.qr(gen.standard_normal((n, d, k)))
    return q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]


def _coverage(net: np.ndarray, cands: np.ndarray) -> np.ndarray:
    """Per candidate, the largest cos(theta_max) over net points."""
    prods = np.einsum("nij,bik->bnjk", net, cands)
    svals = np.linalg.svd(prods, compute_uv=False)
    return svals.min(axis=-1).max(axis=-1)


def certify_grassmann_net(net: GrassmannNet, samples: int, rng) -> float:
    """Largest sampled distance (metric upper bound) from a Haar subspace to the net."""
    gen = as_generator(rng)
    stack = np.array([p.basis for p in net.points])
    cands = _random_bases(net.d, net.k, gen, samples)
    best = min(float(_coverage(stack, cands[i:i + 1024]).min()) for i in range(0, samples, 1024))
    theta = math.acos(min(1.0, max(-1.0, best)))
    return 2.0 * math.sin(theta / 2.0)


# ---------------------------------------------------------------- Gluskin

NET_SEED = 0x5EED


@dataclass(frozen=True)
class GluskinSpec:
    """Parameters of one random Gluskin polytope in R^d with M random vertices."""

    d: int
    M: int
    seed: RngStream = RngStream(0)
    check_range: bool = True

    def __post_init__(self):
        if not self.check_range:
            return
        if self.d < 1:
            raise ParameterRangeError("d must be positive")
        if self.M < 2 * self.d or self.M > math.exp(self.d):
            raise ParameterRangeError(
                f"need 2d <= M <= e^d, got d={self.d}, M={self.M}")

    @property
    def block_length(self) -> int:
        """ceil(log_5(M/d)) computed in integer arithmetic."""
        ell = 0
        while 5**ell * self.d < self.M:
            ell += 1
        return max(ell, 1)

    @property
    def intervals(self) -> list[range]:
        ell = self.block_length
        return [range(s, min(s + ell, self.d)) for s in range(0, self.d, ell)]

    def ball_radius(self) -> float:
        """Radius R with B_2^d ⊆ R V_M."""
        return 4.0 * math.sqrt(self.d / math.log(self.M / self.d))


@lru_cache(maxsize=64)
def block_net(dim: int) -> np.ndarray:
    """Symmetric (1/2)-net of S^{dim-1}, fixed for all Gluskin draws."""
    rng = RngStream(NET_SEED, (dim,))
    net = sphere_net(dim, 0.5, True, rng.derive(0), patience=10**5 * dim)
    return extend_until_certified(net, 10**5, rng.derive(1)).points


def extend_until_certified(net: SphereNet, samples: int, rng, max_rounds: int = 50) -> SphereNet:
    """Add every sampled direction left uncovered, until a full sweep of
    ``samples`` directions finds none.  Separation is preserved because only
    points at distance > eps from the net are added."""
    gen = as_generator(rng)
    pts = net.points
    for _ in range(max_rounds):
        x = random_unit_vector(net.dim, gen, size=samples)
        added = False
        for p in x:
            if np.min(((pts - p) ** 2).sum(1)) > net.radius ** 2:
                pts = np.vstack([pts, p, -p]) if net.symmetric else np.vstack([pts, p])
                added = True
        if not added:
            return SphereNet(net.dim, net.radius, pts, net.symmetric)
    raise RuntimeError("net extension did not settle")


def gluskin_points(spec: GluskinSpec) -> dict[str, np.ndarray]:
    d = spec.d
    nets = []
    for block in spec.intervals:
        pts = block_net(len(block))
        emb = np.zeros((len(pts), d))
        emb[:, list(block)] = pts
        nets.append(emb)
    rand = random_unit_vector(d, spec.seed.derive(0), size=spec.M)
    return {"basis": np.eye(d), "nets": np.vstack(nets), "random": rand}


def gluskin_build(spec: GluskinSpec) -> VPolytope:
    """absconv of the basis vectors, the block nets and M uniform unit vectors."""
    parts = gluskin_points(spec)
    pts = np.vstack([parts["basis"], parts["nets"], parts["random"]])
    pts = _unique_up_to_sign(pts)
    return VPolytope(pts, symmetric=True)


def vertex_count(k: VPolytope) -> int:
    return len(k.points)


def gluskin_gauge_upper(spec: GluskinSpec, xs) -> np.ndarray:
    """Cheap upper bounds on the V_M-gauge from explicit decompositions.

    Uses ``|x|_1`` (basis vectors are vertices) and the block decomposition
    ``sum_k gauge_{absconv(e_j, N_k)}(x_{I_k})``.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    upper = np.abs(xs).sum(axis=1)
    block_sum = np.zeros(len(xs))
    for block in spec.intervals:
        idx = list(block)
        if len(idx) == 1:
            block_sum += np.abs(xs[:, idx[0]])
            continue
        body = VPolytope(np.vstack([np.eye(len(idx)), block_net(len(idx))]), symmetric=True)
        block_sum += body.hrep.gauge_many(xs[:, idx])
    return np.minimum(upper, block_sum)


def gauge_lower(k: VPolytope, xs) -> np.ndarray:
    """Dual lower bounds ``<x, y> / h_K(y)`` with y = x and y = sign(x)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    pts = k.points
    lo1 = (xs * xs).sum(1) / np.abs(xs @ pts.T).max(1)
    sg = np.sign(xs)
    lo2 = np.abs(xs).sum(1) / np.abs(sg @ pts.T).max(1)
    return np.maximum(lo1, lo2)
