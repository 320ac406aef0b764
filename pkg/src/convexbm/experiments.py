"""Desk-scale experiments with seed manifests and CSV output.

Every grid cell gets its own stream ``RngStream(cfg.seed).derive(cell)``;
cells are independent tasks, so results do not depend on ``threads``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bodies import AffineSubspace, VPolytope, cross_polytope, cube, gauge, regular_polygon
from .distance import (
    PerturbationBoundViolation,
    bm_lower_volume,
    bm_upper,
    perturb_projection_check,
    perturb_section_check,
)
from .kernel import RngStream, random_unit_vector
from .nets import (
    GluskinSpec,
    GrassmannPoint,
    gauge_lower,
    gluskin_build,
    gluskin_gauge_upper,
    small_rotation,
    vertex_count,
)
from .simplex import (
    SimplexSpec,
    position_section,
    project_section,
    random_section,
    random_subspace_of,
)
from .volume import (
    ball_volume,
    cp_constant,
    cp_constant_fit,
    sphere_measure_check,
    summarize_cp,
    volume_hull,
    volume_mc,
)

EXPERIMENTS = ("ball-inside", "gluskin-distance", "simplex-approx", "euclid-projection",
               "perturbation", "volume-bounds")


@dataclass
class ExperimentConfig:
    experiment: str
    grid: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: list(range(10)))
    restarts: int = 8
    samples: int = 1000
    out: str | None = None
    seed: int = 0
    threads: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if self.restarts < 1 or self.samples < 1 or self.threads < 1:
            raise ValueError("restarts, samples and threads must be positive")
        caps = {"d": 10, "n": 3, "m": 5, "N": 15}
        for key, cap in caps.items():
            vals = self.grid.get(key, [])
            if any(int(v) > cap or int(v) < 1 for v in vals):
                raise ValueError(f"grid values for {key} must lie in [1, {cap}]")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        return cls(**doc)

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunManifest:
    config: dict
    version: str
    cells: list
    fitted: dict
    checks: dict            # exact inequality checks: name -> bool
    trends: dict = field(default_factory=dict)   # reported, never gate the exit code
    notes: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def results_key(self) -> str:
        """Canonical JSON of everything except timing, for reproducibility checks."""
        doc = {"config": self.config, "cells": self.cells, "fitted": self.fitted,
               "checks": self.checks, "trends": self.trends}
        return json.dumps(doc, sort_keys=True, default=_jsonable)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, default=_jsonable)

    def write(self, out_dir: str) -> tuple[str, str]:
        os.makedirs(out_dir, exist_ok=True)
        name = self.config["experiment"]
        mpath = os.path.join(out_dir, f"{name}.manifest.json")
        with open(mpath, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
        cpath = os.path.join(out_dir, f"{name}.csv")
        write_csv(cpath, self.cells)
        return mpath, cpath


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def write_csv(path: str, rows: list[dict]):
    """One header row, RFC-4180 quoting, CRLF line endings."""
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _csv_value(v) for k, v in r.items()})


def _csv_value(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _map(fn, tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _bootstrap_ci(samples_by_cell, stat, fit, gen, reps: int = 1000, level: float = 0.95):
    """Percentile interval of ``fit`` after resampling inside every cell."""
    vals = []
    for _ in range(reps):
        boot = [stat(s[gen.integers(0, len(s), len(s))]) for s in samples_by_cell]
        vals.append(fit(boot))
    lo, hi = np.quantile(vals, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)


def _ratio_fit(xs, ys) -> float:
    """Least squares slope through the origin."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    return float(xs @ ys / (xs @ xs))


def run(cfg: ExperimentConfig) -> RunManifest:
    fn = {
        "ball-inside": exp_ball_inside,
        "gluskin-distance": exp_gluskin_distance,
        "simplex-approx": exp_simplex_approx,
        "euclid-projection": exp_euclid_projection,
        "perturbation": exp_perturbation,
        "volume-bounds": exp_volume_bounds,
    }[cfg.experiment]
    t0 = time.perf_counter()
    man = fn(cfg)
    man.wall_time = time.perf_counter() - t0
    return man


def _manifest(cfg, cells, fitted, checks, trends=None, notes=None) -> RunManifest:
    return RunManifest(cfg.to_dict(), __version__, cells, fitted, checks, trends or {}, notes or [])


# ------------------------------------------------------------ ball inside


def _ball_cell(task):
    d, M, seed, root, directions, factor, exact = task
    stream = RngStream(root).derive(d).derive(M).derive(seed)
    spec = GluskinSpec(d, M, stream.derive(0), check_range=M <= math.exp(d))
    k = gluskin_build(spec)
    radius = factor * spec.ball_radius()
    x = random_unit_vector(d, stream.derive(1), size=directions)
    up = gluskin_gauge_upper(spec, x)
    lo = gauge_lower(k, x)
    undecided = np.flatnonzero((up > radius) & (lo <= radius))
    exact_vals = {int(i): gauge(k, x[i]) for i in undecided}
    viol = int(np.count_nonzero(lo > radius))
    viol += sum(1 for i, g in exact_vals.items() if g > radius and lo[i] <= radius)
    sub = range(min(exact, directions))
    ex = [exact_vals.get(i, None) or gauge(k, x[i]) for i in sub]
    return {"d": d, "M": M, "seed": seed, "directions": directions, "radius": radius,
            "violations": viol, "lp_fallbacks": len(undecided),
            "max_upper_ratio": float(up.max() / radius),
            "max_exact_ratio": float(max(ex) / radius) if ex else float("nan"),
            "vertices": vertex_count(k), "vertex_budget": 4 * M,
            "in_range": spec.check_range}


def exp_ball_inside(cfg: ExperimentConfig) -> RunManifest:
    """Count directions x with gauge(V_M, x) > 4 sqrt(d / ln(M/d)) over the grid."""
    ds = cfg.grid.get("d", list(range(2, 11)))
    ratios = cfg.grid.get("M_over_d", [2, 4, 8])
    factor = float(cfg.params.get("radius_factor", 1.0))
    exact = int(cfg.params.get("exact_subsample", 10))
    tasks = [(int(d), int(r * d), int(s), cfg.seed, cfg.samples, factor, exact)
             for d in ds for r in ratios for s in cfg.seeds]
    cells = _map(_ball_cell, tasks, cfg.threads)
    total = sum(c["violations"] for c in cells)
    checks = {"vertex_budget": all(c["vertices"] <= c["vertex_budget"] for c in cells)}
    notes = []
    if factor == 1.0:
        checks["ball_inside"] = total == 0
    else:
        notes.append(f"self-test with radius factor {factor}: violations expected")
    if any(not c["in_range"] for c in cells):
        notes.append("cells with M > e^d are built without the range check")
    fitted = {"violations": total, "max_exact_ratio": max(c["max_exact_ratio"] for c in cells),
              "max_upper_ratio": max(c["max_upper_ratio"] for c in cells)}
    return _manifest(cfg, cells, fitted, checks, notes=notes)


# -------------------------------------------------------- Gluskin distance


def _gluskin_pair(task):
    d, M, pair, root, restarts, max_iter = task
    stream = RngStream(root).derive(d).derive(M).derive(pair)
    k1 = gluskin_build(GluskinSpec(d, M, stream.derive(0)))
    k2 = gluskin_build(GluskinSpec(d, M, stream.derive(1)))
    lower = bm_lower_volume(k1, k2)
    est = bm_upper(k1, k2, restarts=restarts, rng=stream.derive(2), max_iter=max_iter)
    return {"d": d, "M": M, "pair": pair, "upper": est.upper, "lower": lower,
            "scale": d / math.log(M / d)}


def exp_gluskin_distance(cfg: ExperimentConfig) -> RunManifest:
    """bm_upper and the volume-product lower bound for independent Gluskin pairs."""
    grid = cfg.grid.get("dM", [[3, 6], [6, 12]])
    pairs = int(cfg.params.get("pairs", 30))
    max_iter = int(cfg.params.get("max_iter", 300))
    tasks = [(int(d), int(M), p, cfg.seed, cfg.restarts, max_iter) for d, M in grid for p in range(pairs)]
    cells = _map(_gluskin_pair, tasks, cfg.threads)
    by_cell = {}
    for c in cells:
        by_cell.setdefault((c["d"], c["M"]), []).append(c)
    keys = sorted(by_cell)
    scale = [keys_d / math.log(keys_m / keys_d) for keys_d, keys_m in keys]
    lowers = [np.array([c["lower"] for c in by_cell[k]]) for k in keys]
    uppers = [np.array([c["upper"] for c in by_cell[k]]) for k in keys]
    med_lo = [float(np.median(v)) for v in lowers]
    med_up = [float(np.median(v)) for v in uppers]
    gen = RngStream(cfg.seed).derive(10**6).generator()
    fit = lambda ys: _ratio_fit(scale, ys)
    fitted = {
        "cells": [{"d": k[0], "M": k[1], "median_lower": lo, "median_upper": up}
                  for k, lo, up in zip(keys, med_lo, med_up)],
        "a_hat_lower": fit(med_lo),
        "a_hat_lower_ci": _bootstrap_ci(lowers, np.median, fit, gen),
        "a_hat_upper": fit(med_up),
        "a_hat_upper_ci": _bootstrap_ci(uppers, np.median, fit, gen),
    }
    checks = {"lower_le_upper": all(c["lower"] <= c["upper"] + 1e-6 for c in cells)}
    trends = {}
    if (3, 6) in by_cell and (6, 12) in by_cell:
        lo36 = med_lo[keys.index((3, 6))]
        lo612 = med_lo[keys.index((6, 12))]
        trends["median_lower_6_12_gt_3_6"] = lo612 > lo36
    return _manifest(cfg, cells, fitted, checks, trends)


# -------------------------------------------------------- simplex approx


def desk_M(n: int, N: int) -> int:
    """min(ceil(8 N^2 ln(N^{3/2}) / n), 4 n^2), capped to e^n."""
    m = min(math.ceil(8 * N * N * math.log(N ** 1.5) / n), 4 * n * n)
    return min(m, int(math.floor(math.exp(n))))


def _embed(f, N_small: int, N_big: int):
    off = np.zeros(N_big + 1)
    off[: N_small + 1] = f.offset
    basis = np.zeros((N_big + 1, f.dim))
    basis[: N_small + 1] = f.basis
    return AffineSubspace(off, basis)


def _simplex_sample(task):
    n, N_src, N, i, m, root, M, restarts, max_iter = task
    stream = RngStream(root).derive(N_src).derive(i)
    spec_src = SimplexSpec(N_src)
    f = random_section(spec_src, m, stream.derive(0))
    ps_src = position_section(spec_src, f)
    e = random_subspace_of(ps_src.L, n, stream.derive(1))
    if N != N_src:
        f, e = _embed(f, N_src, N), _embed(e, N_src, N)
    ps = position_section(SimplexSpec(N), f)
    body = project_section(ps, e).body
    b = gluskin_build(GluskinSpec(n, M, RngStream(root).derive(0)))
    est = bm_upper(b, body, restarts=restarts, rng=stream.derive(2), max_iter=max_iter)
    return {"n": n, "N": N, "source_N": N_src, "sample": i, "m": m, "M": M,
            "upper": est.upper, "proj_vertices": len(body.vertices)}


def exp_simplex_approx(cfg: ExperimentConfig) -> RunManifest:
    """Sampled min of d(B, P_E (Δ_N ∩ F)) for a fixed Gluskin body B.

    The samples for a larger N include the samples of every smaller N,
    embedded as faces, so the sampled minimum can only go down with N.
    """
    n = int(cfg.grid.get("n", [3])[0])
    Ns = sorted(int(v) for v in cfg.grid.get("N", [7, 11]))
    ms = [int(v) for v in cfg.grid.get("m", [3, 4, 5])]
    if any(not n <= m <= 5 for m in ms) or max(Ns) > 12:
        raise ValueError("need n <= m <= 5 and N <= 12")
    samples = cfg.samples
    max_iter = int(cfg.params.get("max_iter", 300))
    M = desk_M(n, max(Ns))
    tasks = []
    for N in Ns:
        for src in (v for v in Ns if v <= N):
            for i in range(samples):
                m = ms[i % len(ms)]
                if m <= src:
                    tasks.append((n, src, N, i, m, cfg.seed, M, cfg.restarts, max_iter))
    cells = _map(_simplex_sample, tasks, cfg.threads)
    gen = RngStream(cfg.seed).derive(10**6).generator()
    fitted = {"M_desk": M, "per_N": []}
    mins = {}
    for N in Ns:
        vals = np.array([c["upper"] for c in cells if c["N"] == N])
        own = np.array([c["upper"] for c in cells if c["N"] == N and c["source_N"] == N])
        mins[N] = float(vals.min())
        shape = math.sqrt(n / math.log(2 * N * math.log(2 * N) / n))
        mmax = max(ms)
        shape_alt = math.sqrt(n / math.log(2 * N * mmax * math.log(2 * mmax) / n ** 2))
        c_hat = mins[N] / shape
        boot = [own[gen.integers(0, len(own), len(own))].min() / shape for _ in range(1000)]
        fitted["per_N"].append({
            "N": N, "samples": int(len(vals)), "min_upper": mins[N],
            "median_upper": float(np.median(vals)), "shape": shape, "c_hat": c_hat,
            "c_hat_ci": [float(np.quantile(boot, 0.025)), float(np.quantile(boot, 0.975))],
            "shape_alt": shape_alt, "c_hat_alt": mins[N] / shape_alt,
        })
    checks = {"distances_ge_1": all(c["upper"] >= 1 - 1e-9 for c in cells)}
    nest = True
    for N in Ns:
        for small in (v for v in Ns if v < N):
            sub = [c["upper"] for c in cells if c["N"] == N and c["source_N"] == small]
            base = [c["upper"] for c in cells if c["N"] == small and c["source_N"] == small]
            nest &= min(base) >= mins[N] - 1e-9 and bool(np.allclose(sorted(sub), sorted(base), atol=1e-6))
    checks["nesting"] = bool(nest)
    notes = [f"M_desk = {M} (8 N^2 ln(N^1.5) / n capped to 4n^2 and e^n)"]
    trends = {"min_upper": {str(N): mins[N] for N in Ns}}
    return _manifest(cfg, cells, fitted, checks, trends, notes)


# ------------------------------------------------------ Euclid projection


def euclid_proxy(n: int) -> VPolytope:
    """Dense symmetric polytope close to B_2^n (64-gon; 400-point spiral on S^2)."""
    if n == 2:
        return regular_polygon(64)
    if n == 3:
        k = 400
        i = np.arange(k) + 0.5
        phi = np.arccos(1 - 2 * i / k)
        theta = np.pi * (1 + 5 ** 0.5) * i
        pts = np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
        return VPolytope(pts[pts[:, 2] > 0], symmetric=True)
    raise ValueError("the Euclidean proxy is provided for n in {2, 3}")


def _euclid_cell(task):
    n, N, i, root, restarts, max_iter = task
    stream = RngStream(root).derive(n).derive(N).derive(i)
    spec = SimplexSpec(N)
    hyper = spec.hyperplane()
    e = random_subspace_of(AffineSubspace(np.zeros(N + 1), hyper.basis), n, stream.derive(0))
    verts = (np.eye(N + 1) - spec.barycenter()) @ e.basis
    body = VPolytope(verts)
    proxy = euclid_proxy(n)
    est = bm_upper(proxy, body, restarts=restarts, rng=stream.derive(1), max_iter=max_iter)
    lower = bm_lower_volume(proxy, body)
    return {"n": n, "N": N, "sample": i, "upper": est.upper, "lower": lower,
            "shape": math.sqrt(n / math.log(2 * N / n))}


def exp_euclid_projection(cfg: ExperimentConfig) -> RunManifest:
    """d(B_2^n proxy, P Δ_N) for Haar projections of the barycentred simplex."""
    ns = [int(v) for v in cfg.grid.get("n", [2])]
    Ns = [int(v) for v in cfg.grid.get("N", [5, 15])]
    if any(n not in (2, 3) for n in ns) or max(Ns) > 15:
        raise ValueError("need n in {2, 3} and N <= 15")
    max_iter = int(cfg.params.get("max_iter", 300))
    tasks = [(n, N, i, cfg.seed, cfg.restarts, max_iter) for n in ns for N in Ns
             for i in range(cfg.samples) if N >= n]
    cells = _map(_euclid_cell, tasks, cfg.threads)
    fitted = {"cells": []}
    for n in ns:
        for N in Ns:
            rows = [c for c in cells if c["n"] == n and c["N"] == N]
            if not rows:
                continue
            up = np.median([c["upper"] for c in rows])
            lo = np.median([c["lower"] for c in rows])
            fitted["cells"].append({"n": n, "N": N, "median_upper": float(up),
                                    "median_lower": float(lo), "shape": rows[0]["shape"],
                                    "c_hat": float(up / rows[0]["shape"])})
    checks = {"distances_ge_1": all(c["upper"] >= 1 - 1e-9 for c in cells),
              "lower_le_upper": all(c["lower"] <= c["upper"] + 1e-6 for c in cells)}
    c_hats = [c["c_hat"] for c in fitted["cells"]]
    trends = {"c_hat_within_factor_2": bool(max(c_hats) <= 2 * min(c_hats))} if c_hats else {}
    return _manifest(cfg, cells, fitted, checks, trends)


# ------------------------------------------------------------ perturbation


def _section_pair(task):
    i, root, eps_max, ms, restarts, max_iter, zero = task
    stream = RngStream(root).derive(1).derive(i)
    gen = stream.derive(0).generator()
    m = ms[i % len(ms)]
    N = int(gen.integers(max(m, 4), 13))
    spec = SimplexSpec(N)
    ps = position_section(spec, random_section(spec, m, stream.derive(1)))
    l1 = GrassmannPoint(ps.L.basis)
    eps = 0.0 if zero else eps_max * float(gen.random())
    l2 = l1.moved(small_rotation(N + 1, eps, stream.derive(2)))
    row = {"kind": "section", "index": i, "N": N, "m": m, "n": m, "eps": eps}
    try:
        rho, up, bound = perturb_section_check(l1, l2, m, restarts, stream.derive(3), max_iter=max_iter)
        row.update(rho_upper=rho, upper=up, bound=bound, violation=False)
    except PerturbationBoundViolation as exc:
        row.update(rho_upper=float("nan"), upper=float("nan"), bound=float("nan"),
                   violation=True, message=str(exc))
    return row


def _projection_pair(task):
    i, root, eps_max, ms, restarts, max_iter, zero = task
    stream = RngStream(root).derive(2).derive(i)
    gen = stream.derive(0).generator()
    m = ms[i % len(ms)]
    N = int(gen.integers(max(m, 4), 13))
    n = int(gen.integers(1, m + 1))
    spec = SimplexSpec(N)
    ps = position_section(spec, random_section(spec, m, stream.derive(1)))
    f1 = GrassmannPoint(random_subspace_of(ps.L, n, stream.derive(2)).basis)
    eps = 0.0 if zero else eps_max * float(gen.random())
    f2 = f1.moved(small_rotation(N + 1, eps, stream.derive(3)))
    row = {"kind": "projection", "index": i, "N": N, "m": m, "n": n, "eps": eps}
    try:
        rho, up, bound = perturb_projection_check(ps, f1, f2, restarts, stream.derive(4),
                                                  max_iter=max_iter)
        row.update(rho_upper=rho, upper=up, bound=bound, violation=False)
    except PerturbationBoundViolation as exc:
        row.update(rho_upper=float("nan"), upper=float("nan"), bound=float("nan"),
                   violation=True, message=str(exc))
    return row


def exp_perturbation(cfg: ExperimentConfig) -> RunManifest:
    """Randomised checks of d <= (1 + eps m^{3/2})^2 for sections and projections."""
    ms = [int(v) for v in cfg.grid.get("m", [3])]
    eps_max = float(cfg.params.get("eps_max", 0.05))
    n_sec = int(cfg.params.get("section_pairs", 50))
    n_proj = int(cfg.params.get("projection_pairs", 50))
    n_zero = int(cfg.params.get("zero_pairs", 5))
    max_iter = int(cfg.params.get("max_iter", 300))
    base = (cfg.seed, eps_max, ms, min(cfg.restarts, 4), max_iter)
    sec = _map(_section_pair, [(i, *base, False) for i in range(n_sec)], cfg.threads)
    proj = _map(_projection_pair, [(i, *base, False) for i in range(n_proj)], cfg.threads)
    zero = _map(_section_pair, [(n_sec + i, *base, True) for i in range(n_zero)], cfg.threads)
    for z in zero:
        z["kind"] = "zero"
    cells = sec + proj + zero
    fitted = {"section_violations": sum(c["violation"] for c in sec),
              "projection_violations": sum(c["violation"] for c in proj),
              "max_upper_over_bound": max(c["upper"] / c["bound"] for c in cells if not c["violation"])}
    checks = {"section_bound": fitted["section_violations"] == 0,
              "projection_bound": fitted["projection_violations"] == 0,
              "zero_perturbation": all(not c["violation"] and c["upper"] <= 1.001 for c in zero)}
    return _manifest(cfg, cells, fitted, checks)


# ---------------------------------------------------------- volume bounds


def _coverage_runs(root: RngStream, runs: int, samples: int) -> list[dict]:
    rows = []
    for d in range(2, 5):
        for name, body, exact in (("cube", cube(d), 2.0 ** d),
                                  ("cross", cross_polytope(d), 2.0 ** d / math.factorial(d))):
            for r in range(runs):
                est = volume_mc(body, samples, root.derive(d).derive(len(name)).derive(r))
                rows.append({"body": name, "d": d, "run": r, "exact": exact, "value": est.value,
                             "lo": est.lo, "hi": est.hi, "covered": est.lo <= exact <= est.hi})
    return rows


def exp_volume_bounds(cfg: ExperimentConfig) -> RunManifest:
    """Absolute-convex-hull volume constant fit, the Gluskin specialisation and volume_mc coverage."""
    ds = [int(v) for v in cfg.grid.get("d", [3, 4, 5])]
    ratios = cfg.grid.get("M_over_d", [2, 10, 50])
    grid = [(d, int(r * d)) for d in ds for r in ratios]
    root = RngStream(cfg.seed)
    rows = cp_constant_fit(grid, cfg.seeds, root.derive(0))
    for r in rows:
        r["kind"] = "random-absconv"
    summary = summarize_cp(rows)
    gl_rows = []
    for d, M in grid:
        if M > math.exp(d):
            continue
        for s in cfg.seeds:
            k = gluskin_build(GluskinSpec(d, M, root.derive(1).derive(d).derive(M).derive(int(s))))
            v = volume_hull(k).value
            gl_rows.append({"kind": "gluskin", "d": d, "M": M, "seed": s, "volume": v,
                            "lo": v, "hi": v, "C_hat": cp_constant(v, d, M),
                            "C_hat_hi": cp_constant(v, d, M)})
    cov = _coverage_runs(root.derive(2), int(cfg.params.get("coverage_runs", 20)),
                         int(cfg.params.get("coverage_samples", cfg.samples)))
    cells = rows + gl_rows + [dict(kind="coverage", **c) for c in cov]
    per_case = {}
    for c in cov:
        per_case.setdefault(f'{c["body"]}{c["d"]}', []).append(c["covered"])
    fitted = dict(summary)
    fitted["gluskin_C_max"] = max((r["C_hat"] for r in gl_rows), default=float("nan"))
    fitted["coverage"] = {k: int(sum(v)) for k, v in per_case.items()}
    sphere = []
    for i in range(int(cfg.params.get("sphere_runs", 5))):
        st = root.derive(3).derive(i)
        d = 2 + i % 4
        # cubes with 1/sqrt(d) < half width < 1 meet the sphere in a nontrivial set
        h = 1 / math.sqrt(d) + (1 - 1 / math.sqrt(d)) * float(st.derive(0).generator().random())
        body = cube(d, h)
        try:
            freq, bound = sphere_measure_check(body, cfg.samples, st.derive(1))
            sphere.append({"d": d, "freq": freq, "bound": bound, "ok": True})
        except AssertionError:
            sphere.append({"d": d, "ok": False})
    fitted["sphere_measure"] = sphere
    fitted["ball_volume_3"] = ball_volume(3)
    trends = {"C_max_le_10": summary["C_max"] <= 10,
              "spread_lt_4": summary["spread"] < 4,
              "coverage_18_of_20": all(sum(v) >= 18 for v in per_case.values()),
              "gluskin_le_C_max": fitted["gluskin_C_max"] <= summary["C_max"]}
    checks = {"sphere_measure": all(r["ok"] for r in sphere)}
    return _manifest(cfg, cells, fitted, checks, trends)
