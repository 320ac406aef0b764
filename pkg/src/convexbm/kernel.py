"""Dense linear algebra, small linear programs and seeded random streams.

Every random draw in the package goes through :class:`RngStream`; there is no
module-level generator.  A stream is an immutable ``(seed, path)`` token, so
child streams can be handed to worker processes and the results do not depend
on scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

TOL_FEAS = 1e-9
_HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class NumericalFailure(RuntimeError):
    """Raised when a numerical routine cannot certify its result."""


class RankDeficient(ValueError):
    pass


# ---------------------------------------------------------------- randomness


@dataclass(frozen=True)
class RngStream:
    seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))

    def derive(self, index: int) -> "RngStream":
        return derive_stream(self, index)


def derive_stream(rng: RngStream, index: int) -> RngStream:
    """Child stream ``index`` of ``rng``; reproducible and independent of siblings."""
    if index < 0:
        raise ValueError("stream index must be non-negative")
    return RngStream(rng.seed, rng.path + (int(index),))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def random_unit_vector(d: int, rng, size: int | None = None) -> np.ndarray:
    """Uniform point(s) on S^{d-1} by normalising a standard Gaussian."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    gen = as_generator(rng)
    shape = (d,) if size is None else (size, d)
    while True:
        g = gen.standard_normal(shape)
        norms = np.linalg.norm(g, axis=-1, keepdims=True)
        if np.all(norms > 1e-300):
            return g / norms


# ------------------------------------------------------------ linear algebra


def orthonormalize(m, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the column span of ``m`` (same number of columns).

    Uses a QR factorisation; signs are fixed so that the diagonal of R is
    positive, which makes the result equal to classical Gram-Schmidt.
    """
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.shape[1] > a.shape[0]:
        raise RankDeficient("more columns than rows")
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.any(np.abs(diag) <= tol * scale):
        raise RankDeficient("columns are linearly dependent within tolerance")
    return q * np.sign(diag)


def operator_norm(t) -> float:
    """Spectral norm (largest singular value)."""
    t = np.asarray(t, dtype=float)
    if t.size == 0:
        return 0.0
    return float(np.linalg.svd(t, compute_uv=False)[0])


def determinant(t) -> float:
    """Determinant through LU with partial pivoting."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("determinant needs a square matrix")
    return float(np.linalg.det(t))


# ----------------------------------------------------------- linear programs


@dataclass
class LPProblem:
    """minimise (or maximise) ``objective @ x`` subject to row constraints.

    ``senses`` holds one of ``"<="``, ``"="``, ``">="`` per row.  ``bounds`` is
    a list of ``(lo, hi)`` pairs (``None`` for infinite); the default makes
    every variable free.
    """

    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    senses: list[str] = field(default_factory=list)
    bounds: list[tuple[float | None, float | None]] | None = None
    maximize: bool = False

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float).ravel()
        if not self.senses:
            self.senses = ["<="] * len(self.rhs)
        if len(self.rhs) != self.rows.shape[0] or len(self.senses) != len(self.rhs):
            raise ValueError("constraint dimensions are inconsistent")
        bad = set(self.senses) - {"<=", "=", ">="}
        if bad:
            raise ValueError(f"unknown constraint sense(s): {sorted(bad)}")
        if self.bounds is None:
            self.bounds = [(None, None)] * n
        if len(self.bounds) != n:
            raise ValueError("need one bound pair per variable")
        if self.rows.shape[0] == 0 and all(b == (None, None) for b in self.bounds):
            raise ValueError("problem has neither constraints nor bounds")


@dataclass
class LPSolution:
    status: str  # optimal | infeasible | unbounded
    value: float
    x: np.ndarray | None
    dual: np.ndarray | None


def lp_solve(p: LPProblem, tol_feas: float = TOL_FEAS) -> LPSolution:
    """Solve ``p`` with HiGHS and re-verify feasibility of the returned point.

    ``dual`` holds one multiplier per row in the sign convention of the
    original (min or max) problem, i.e. ``value == dual @ rhs + bound terms``.
    """
    c = -p.objective if p.maximize else p.objective
    le = [i for i, s in enumerate(p.senses) if s == "<="]
    ge = [i for i, s in enumerate(p.senses) if s == ">="]
    eq = [i for i, s in enumerate(p.senses) if s == "="]
    a_ub = np.vstack([p.rows[le], -p.rows[ge]]) if le or ge else None
    b_ub = np.concatenate([p.rhs[le], -p.rhs[ge]]) if le or ge else None
    a_eq = p.rows[eq] if eq else None
    b_eq = p.rhs[eq] if eq else None
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=p.bounds, method="highs", options=_HIGHS_OPTIONS)
    if res.status == 2:
        return LPSolution("infeasible", float("nan"), None, None)
    if res.status == 3:
        return LPSolution("unbounded", -np.inf if not p.maximize else np.inf, None, None)
    if res.status != 0:
        raise NumericalFailure(f"LP solver could not certify a status: {res.message}")

    x = np.asarray(res.x, dtype=float)
    viol = _constraint_violation(p, x)
    if viol > tol_feas * max(1.0, float(np.max(np.abs(p.rhs), initial=0.0))):
        raise NumericalFailure(f"LP solution violates constraints by {viol:.3e}")

    dual = np.zeros(len(p.rhs))
    sign = -1.0 if p.maximize else 1.0
    if le or ge:
        m_ub = np.asarray(res.ineqlin.marginals)
        dual[le] = sign * m_ub[: len(le)]
        dual[ge] = -sign * m_ub[len(le):]
    if eq:
        dual[eq] = sign * np.asarray(res.eqlin.marginals)
    value = float(p.objective @ x)
    return LPSolution("optimal", value, x, dual)


def _constraint_violation(p: LPProblem, x: np.ndarray) -> float:
    viol = 0.0
    if len(p.rhs):
        ax = p.rows @ x
        for s, lhs, r in zip(p.senses, ax, p.rhs):
            if s == "<=":
                viol = max(viol, lhs - r)
            elif s == ">=":
                viol = max(viol, r - lhs)
            else:
                viol = max(viol, abs(lhs - r))
    for xi, (lo, hi) in zip(x, p.bounds):
        if lo is not None:
            viol = max(viol, lo - xi)
        if hi is not None:
            viol = max(viol, xi - hi)
    return viol


def chebyshev_center(normals, offsets) -> tuple[np.ndarray, float]:
    """Largest Euclidean ball inside ``{x : normals @ x <= offsets}``."""
    a = np.asarray(normals, dtype=float)
    b = np.asarray(offsets, dtype=float)
    d = a.shape[1]
    norms = np.linalg.norm(a, axis=1)
    rows = np.hstack([a, norms[:, None]])
    bounds = [(None, None)] * d + [(0.0, None)]
    sol = lp_solve(LPProblem(np.r_[np.zeros(d), 1.0], rows, b, bounds=bounds, maximize=True))
    if sol.status != "optimal":
        raise NumericalFailure(f"Chebyshev center LP is {sol.status}")
    return sol.x[:d], float(sol.x[d])
