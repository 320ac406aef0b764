"""Sections and projections of the standard simplex and their normal form.

The simplex lives in R^{N+1} as ``{x >= 0, sum x = 1}``.  A section by an
affine subspace F of the hyperplane H is repositioned by centering at a
point ``a`` with ``-(S - a) ⊆ m (S - a)`` and rescaling coordinates by
``diag(1/a_i)``; the result is the body ``{z in L : -1 <= z_i <= m}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bodies import (
    AffineSubspace,
    EmptyInterior,
    HPolytope,
    VPolytope,
    center_position,
    enumerate_vertices,
    gauge,
    prune_vertices,
    section,
)
from .kernel import as_generator, orthonormalize, random_unit_vector
from .nets import GrassmannPoint

SANDWICH_TOL = 1e-8


class DegenerateCenter(ValueError):
    pass


class SandwichViolation(RuntimeError):
    pass


class DimensionCapError(ValueError):
    pass


class DualityVerificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimplexSpec:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")

    @property
    def ambient_dim(self) -> int:
        return self.N + 1

    def barycenter(self) -> np.ndarray:
        return np.full(self.N + 1, 1.0 / (self.N + 1))

    def hyperplane(self) -> AffineSubspace:
        """H = {sum x = 1} with an orthonormal basis of the sum-zero directions."""
        n1 = self.N + 1
        q = orthonormalize(np.eye(n1)[:, : self.N] - 1.0 / n1)
        return AffineSubspace(self.barycenter(), q)

    def cone(self) -> HPolytope:
        """S = {x >= 0} as an (unbounded) H-description."""
        return HPolytope(-np.eye(self.N + 1), np.zeros(self.N + 1))

    def vertices(self) -> np.ndarray:
        return np.eye(self.N + 1)


@dataclass(frozen=True, eq=False)
class PositionedSection:
    N: int
    m: int
    L: AffineSubspace          # linear, dim m, in R^{N+1}
    body: HPolytope            # intrinsic to L: -1 <= (basis w)_i <= m
    center: np.ndarray         # the centering point a in R^{N+1}
    source: AffineSubspace | None = None
    outer_radius: float = float("nan")
    asymmetry: float = float("nan")
    inner_radius: float = float("nan")
    dropped: tuple[int, ...] = ()

    @property
    def sandwich_bound(self) -> float:
        return self.m ** 1.5

    @property
    def sandwich_holds(self) -> bool:
        return (self.inner_radius >= 1.0 - SANDWICH_TOL
                and self.outer_radius <= self.sandwich_bound + SANDWICH_TOL)

    @property
    def vertices(self) -> np.ndarray:
        return self.body.vertex_array

    def ambient_vertices(self) -> np.ndarray:
        return self.vertices @ self.L.basis.T


@dataclass(frozen=True, eq=False)
class ProjectedBody:
    source: PositionedSection | HPolytope
    E: AffineSubspace
    body: VPolytope
    meta: dict = field(default_factory=dict)


# ------------------------------------------------------------- operations


def _check_in_hyperplane(spec: SimplexSpec, f: AffineSubspace):
    if f.ambient_dim != spec.N + 1:
        raise ValueError("subspace lives in the wrong ambient dimension")
    if abs(f.offset.sum() - 1.0) > 1e-9 or np.any(np.abs(f.basis.sum(axis=0)) > 1e-9):
        raise ValueError("affine subspace must lie in the hyperplane sum x = 1")


def simplex_section(spec: SimplexSpec, f: AffineSubspace) -> HPolytope:
    """Δ_N ∩ F in F-intrinsic coordinates (facets from x_i >= 0)."""
    _check_in_hyperplane(spec, f)
    return section(spec.cone(), f)


def position_section(spec: SimplexSpec, f: AffineSubspace, zero_tol: float = 1e-8,
                     directions: int = 1000, rng=None) -> PositionedSection:
    """Normal form ``{z in L : -1 <= z_i <= m}`` of the section Δ_N ∩ F.

    Raises :class:`SandwichViolation` when the inner unit ball or
    ``-K ⊆ m K`` fails; the outer radius is measured exactly from the
    vertices and reported in ``outer_radius`` (compare ``sandwich_bound``).
    """
    sec = simplex_section(spec, f)
    m = f.dim
    y_c = center_position(sec)
    a = f.to_ambient(y_c)
    n1 = spec.N + 1
    zero = np.flatnonzero(a <= zero_tol)
    if len(zero):
        # the section sits inside the facet {x_j = 0}; recurse into that face
        if np.any(np.abs(f.basis[zero]) > 1e-7) or np.any(np.abs(f.offset[zero]) > 1e-7):
            raise DegenerateCenter("center touches a facet the section is not contained in")
        keep = np.setdiff1d(np.arange(n1), zero)
        if len(keep) < m + 1:
            raise DegenerateCenter("section does not fit in the reduced simplex")
        sub = AffineSubspace(f.offset[keep] / f.offset[keep].sum(), f.basis[keep])
        inner = position_section(SimplexSpec(len(keep) - 1), sub, zero_tol, directions, rng)
        basis = np.zeros((n1, m))
        basis[keep] = inner.L.basis
        center = np.zeros(n1)
        center[keep] = inner.center
        return PositionedSection(spec.N, m, AffineSubspace(np.zeros(n1), basis), inner.body,
                                 center, f, inner.outer_radius, inner.asymmetry,
                                 inner.inner_radius, tuple(int(j) for j in zero) + inner.dropped)

    basis = orthonormalize(f.basis / a[:, None])
    L = AffineSubspace(np.zeros(n1), basis)
    body = _box_section(basis, m)
    lower_only = HPolytope(-basis, np.ones(n1))
    verts = enumerate_vertices(_drop_zero_rows(lower_only))
    z = verts @ basis.T
    asym = float(z.max())  # max_i z_i over K; -K ⊆ mK iff this is <= m
    if asym > m + SANDWICH_TOL:
        raise SandwichViolation(f"-K ⊄ mK: max coordinate {asym:.12g} > {m}")
    row_norms = np.linalg.norm(body.normals, axis=1)
    inner_r = float(np.min(body.offsets / row_norms))
    if inner_r < 1.0 - SANDWICH_TOL:
        raise SandwichViolation(f"unit ball not inside K: inradius {inner_r}")
    outer_r = float(np.linalg.norm(verts, axis=1).max())
    if rng is not None and directions:
        u = random_unit_vector(m, rng, size=directions)
        h = (u @ verts.T).max(axis=1)
        outer_r = max(outer_r, float(h.max()))
    body.__dict__["vertex_array"] = verts  # upper facets are redundant once -K ⊆ mK holds
    return PositionedSection(spec.N, m, L, body, a, f, outer_r, asym / m, inner_r)


def _box_section(basis: np.ndarray, m_upper: float) -> HPolytope:
    n1 = basis.shape[0]
    return _drop_zero_rows(HPolytope(np.vstack([-basis, basis]),
                                     np.r_[np.ones(n1), np.full(n1, float(m_upper))]))


def _drop_zero_rows(h: HPolytope) -> HPolytope:
    keep = np.linalg.norm(h.normals, axis=1) > 1e-12
    return HPolytope(h.normals[keep], h.offsets[keep])


def km_body(N: int, m: int, l: AffineSubspace | GrassmannPoint) -> HPolytope:
    """K_m ∩ L in L-intrinsic coordinates, where K_m = {-1 <= x_i <= m}."""
    basis = l.basis
    if basis.shape != (N + 1, m):
        raise ValueError("subspace must be m-dimensional in R^{N+1}")
    return _box_section(basis, m)


def project_section(ps: PositionedSection | HPolytope, e: AffineSubspace | GrassmannPoint,
                    L: AffineSubspace | None = None, prune: str = "hull") -> ProjectedBody:
    """Orthogonal projection of a positioned section onto the linear subspace E of R^{N+1}.

    Vertices of the m-dimensional H-polytope are enumerated by facet subsets
    (m <= 6), mapped to R^{N+1}, projected to E coordinates and pruned.
    """
    if isinstance(ps, PositionedSection):
        body, basis = ps.body, ps.L.basis
    else:
        if L is None:
            raise ValueError("an H-polytope source needs its subspace L")
        body, basis = ps, L.basis
    m = body.dim
    if m > 6:
        raise DimensionCapError("projection of sections is capped at m <= 6")
    eb = e.basis
    n = eb.shape[1]
    if n > m:
        raise ValueError("projection dimension exceeds section dimension")
    verts = body.vertex_array @ basis.T @ eb
    pv = prune_vertices(VPolytope(verts), method=prune)
    if np.linalg.matrix_rank(pv.vertices - pv.vertices.mean(0)) < n:
        raise EmptyInterior("projection is not full-dimensional")
    ee = e if isinstance(e, AffineSubspace) else AffineSubspace(np.zeros(eb.shape[0]), eb)
    return ProjectedBody(ps, ee, pv)


# ----------------------------------------------------- random generators


def random_section(spec: SimplexSpec, m: int, rng, through_center: bool = True,
                   spread: float = 0.5) -> AffineSubspace:
    """Random m-dimensional affine subspace of H meeting the interior of Δ_N.

    The offset is a random interior point (a Dirichlet draw pulled toward the
    barycenter by ``1 - spread``); directions are Haar inside H.
    """
    if not 1 <= m <= spec.N:
        raise ValueError("need 1 <= m <= N")
    gen = as_generator(rng)
    hyper = spec.hyperplane()
    q = orthonormalize(hyper.basis @ gen.standard_normal((spec.N, m)))
    bary = spec.barycenter()
    if through_center:
        p = (1 - spread) * bary + spread * gen.dirichlet(np.ones(spec.N + 1))
    else:
        p = gen.dirichlet(np.ones(spec.N + 1))
    return AffineSubspace(p, q)


def random_subspace_of(l: AffineSubspace, n: int, rng) -> AffineSubspace:
    """Haar-random n-dimensional linear subspace of the linear subspace l."""
    gen = as_generator(rng)
    q = orthonormalize(l.basis @ orthonormalize(gen.standard_normal((l.dim, n))))
    return AffineSubspace(np.zeros(l.ambient_dim), q)


# ----------------------------------------------------- section/projection swap


def intersect_affine(a: AffineSubspace, b: AffineSubspace) -> AffineSubspace:
    """a ∩ b, assumed nonempty."""
    # offset_a + Pa s = offset_b + Pb t
    m = np.hstack([a.basis, -b.basis])
    rhs = b.offset - a.offset
    sol, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    if np.linalg.norm(m @ sol - rhs) > 1e-9:
        raise EmptyInterior("affine subspaces do not meet")
    point = a.offset + a.basis @ sol[: a.dim]
    u, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > 1e-10))
    null = vt[rank:].T
    if null.shape[1] == 0:
        raise EmptyInterior("intersection is a single point")
    dirs = orthonormalize(a.basis @ null[: a.dim])
    return AffineSubspace(point, dirs)


def complement_sum(f: AffineSubspace, e: AffineSubspace) -> AffineSubspace:
    """F ⊕ E^⊥ for affine F inside the linear subspace E."""
    n = e.ambient_dim
    perp = _orth_complement(e.basis)
    basis = np.hstack([f.basis, perp]) if perp.size else f.basis
    return AffineSubspace(f.offset, orthonormalize(basis))


def _orth_complement(q: np.ndarray) -> np.ndarray:
    n, k = q.shape
    if k == n:
        return np.zeros((n, 0))
    u, _, _ = np.linalg.svd(q, full_matrices=True)
    return u[:, k:]


def swap_representation(spec: SimplexSpec, e: AffineSubspace, f: AffineSubspace,
                        directions: int = 200, rng=None, tol: float = 1e-7):
    """Rewrite the section of a projection P_E Δ ∩ F as a projection of a section.

    For affine F inside the linear subspace E, returns ``(E_tilde, F)`` with
    ``E_tilde = F ⊕ E^⊥`` so that ``P_E Δ ∩ F = P_F(Δ ∩ E_tilde)``.  Both
    sides are evaluated independently (facet description of P_E Δ sectioned
    by F versus an LP gauge over the projected vertices of Δ ∩ E_tilde) and
    compared at random directions.
    """
    if not e.is_linear:
        raise ValueError("E must be linear")
    if np.linalg.norm(f.basis - e.projector() @ f.basis) > 1e-9 or \
            np.linalg.norm(f.offset - e.projector() @ f.offset) > 1e-9:
        raise ValueError("F must lie inside E")
    e_tilde = complement_sum(f, e)
    if rng is None:
        return e_tilde, f
    lhs, rhs = swap_sides(spec, e, f, e_tilde)
    dev = compare_bodies(lhs, rhs, directions, rng)
    if dev > tol:
        raise DualityVerificationError(f"sides disagree by {dev:.3e}")
    return e_tilde, f


def swap_sides(spec: SimplexSpec, e: AffineSubspace, f: AffineSubspace,
               e_tilde: AffineSubspace) -> tuple[HPolytope, VPolytope]:
    """(P_E Δ ∩ F as H-polytope, P_F(Δ ∩ E_tilde) as V-polytope), both in F coordinates."""
    proj = VPolytope(spec.vertices() @ e.basis)
    if e.dim == spec.N + 1:
        # P_E Δ is Δ itself, which lies in H: describe it through the cone inside H
        lhs = section(spec.cone(), f)
    else:
        lhs_e = proj.hrep
        f_in_e = AffineSubspace(e.basis.T @ f.offset, e.basis.T @ f.basis)
        lhs = section(lhs_e, f_in_e)
    g = intersect_affine(e_tilde, spec.hyperplane())
    sec = simplex_section(spec, g)
    verts = g.to_ambient(sec.vertex_array)
    rhs = VPolytope(f.to_intrinsic(verts))
    return lhs, rhs


def compare_bodies(lhs: HPolytope, rhs: VPolytope, directions: int, rng) -> float:
    """Largest gauge disagreement around a common interior point."""
    from .kernel import chebyshev_center

    c, r = chebyshev_center(lhs.normals, lhs.offsets)
    u = random_unit_vector(lhs.dim, rng, size=directions)
    g1 = lhs.translated(c).gauge_many(u)
    shifted = VPolytope(rhs.vertices - c)
    g2 = np.array([gauge(shifted, x) for x in u])
    return float(np.max(np.abs(g1 - g2) / np.maximum(1.0, np.abs(g1))))
