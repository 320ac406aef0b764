"""Acceptance criteria 1-10 at their pinned settings.

Each test prints one ``[PASS]`` or ``[FAIL]`` line (visible without ``-s``)
followed by its measured values, then asserts the criterion.
"""

import math
import time

import numpy as np
import pytest

from convexbm.bodies import AffineSubspace, VPolytope, cross_polytope, cube_vertices, regular_polygon, supports
from convexbm.distance import bm_estimate, bm_lower_netcert, bm_upper, brute_force_grid_2d
from convexbm.experiments import ExperimentConfig, run
from convexbm.kernel import RngStream, orthonormalize, random_unit_vector
from convexbm.nets import GluskinSpec, block_net, gluskin_build, vertex_count
from convexbm.simplex import (
    SimplexSpec,
    compare_bodies,
    position_section,
    random_section,
    swap_representation,
    swap_sides,
)

pytestmark = pytest.mark.acceptance

SQUARE = cube_vertices(2)
DIAMOND = cross_polytope(2)
HEXAGON = regular_polygon(6)
GON64 = regular_polygon(64)


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, seconds):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail} ({seconds:.1f}s)")
    return emit


def rotation_grid_distance(p, q, n=3600):
    """min over rotations R of ||R: P -> Q|| ||R^-1: Q -> P|| by plain numpy hull facets."""
    from scipy.spatial import ConvexHull

    def gauge_max(pts, xs):
        eq = ConvexHull(np.vstack([pts, -pts])).equations
        return np.max(xs @ eq[:, :2].T / -eq[:, 2])

    best = np.inf
    for th in np.linspace(0, np.pi / 2, n, endpoint=False):
        r = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        best = min(best, gauge_max(q.points, p.points @ r.T) * gauge_max(p.points, q.points @ r))
    return best


def test_criterion_1_ball_inclusion(report):
    t0 = time.perf_counter()
    man = run(ExperimentConfig("ball-inside", grid={"d": list(range(2, 11)), "M_over_d": [2, 4, 8]},
                               seeds=list(range(20)), samples=1000))
    dt = time.perf_counter() - t0
    ok = man.checks["ball_inside"] and dt < 120
    report(1, ok, f"violations={man.fitted['violations']} over {len(man.cells)} cells x 1000 directions, "
                  f"max exact gauge/R={man.fitted['max_exact_ratio']:.3f}", dt)
    assert ok


def test_criterion_2_vertex_budget(report):
    grid = [(d, M) for d in range(2, 11) for M in (2 * d, 4 * d, 8 * d)]
    specs = [GluskinSpec(d, M, RngStream(2, (d, M)), check_range=M <= math.exp(d)) for d, M in grid]
    # block nets are fixed per block length and built once
    t0 = time.perf_counter()
    for ell in sorted({s.block_length for s in specs}):
        block_net(ell)
    t_nets = time.perf_counter() - t0
    t0 = time.perf_counter()
    counts = {(s.d, s.M): vertex_count(gluskin_build(s)) for s in specs}
    dt = time.perf_counter() - t0
    over = [k for k, v in counts.items() if v > 4 * k[1]]
    ok = not over and dt < 1.0
    report(2, ok, f"block nets built once in {t_nets:.2f}s; vertex counts (d, M, count): "
                  + ", ".join(f"({d},{M},{v})" for (d, M), v in counts.items()), dt)
    assert ok


def test_criterion_3_sandwich(report):
    t0 = time.perf_counter()
    gen = RngStream(3).generator()
    dirs_seed = RngStream(3, (1,))
    fails = {"inner": [], "outer": [], "symmetry": []}
    per_m = {}
    for i in range(100):
        m = int(gen.integers(1, 6))
        N = int(gen.integers(max(m, 2), 13))
        spec = SimplexSpec(N)
        ps = position_section(spec, random_section(spec, m, RngStream(3, (2, i))))
        u = random_unit_vector(m, dirs_seed.derive(i), size=1000)
        h = supports(VPolytope(ps.vertices), u)
        h_neg = supports(VPolytope(-ps.vertices), u)
        if np.any(h < 1 - 1e-8):
            fails["inner"].append(m)
        if np.any(h > m ** 1.5 + 1e-8):
            fails["outer"].append(m)
        if np.any(h_neg > m * h + 1e-8):
            fails["symmetry"].append(m)
        per_m[m] = max(per_m.get(m, 0.0), float(h.max()) / m ** 1.5)
    dt = time.perf_counter() - t0
    ok = not any(fails.values()) and dt < 300
    worst = ", ".join(f"m={m}: {r:.3f}" for m, r in sorted(per_m.items()))
    report(3, ok, f"violating sections inner={len(fails['inner'])} outer={len(fails['outer'])} "
                  f"(m values {sorted(set(fails['outer']))}) -K in mK={len(fails['symmetry'])}; "
                  f"max h/m^1.5 by m: {worst}", dt)
    assert ok


def test_criterion_4_perturbation(report):
    t0 = time.perf_counter()
    man = run(ExperimentConfig("perturbation", grid={"m": [1, 2, 3, 4, 5]}, seeds=[0], restarts=4,
                               params={"section_pairs": 50, "projection_pairs": 50, "zero_pairs": 5}))
    dt = time.perf_counter() - t0
    ok = man.passed and dt < 900
    report(4, ok, f"section violations={man.fitted['section_violations']}, projection "
                  f"violations={man.fitted['projection_violations']}, max upper/bound="
                  f"{man.fitted['max_upper_over_bound']:.3f}", dt)
    assert ok


def test_criterion_5_duality(report):
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        gen = RngStream(5, (i,)).generator()
        N = int(gen.integers(3, 9))
        k = int(gen.integers(max(2, N - 4), min(N + 1, 5) + 1))
        # the section of the simplex by F + E^perp has dimension j + N - k <= 6
        j = int(gen.integers(1, min(k - 1, 6 + k - N) + 1))
        spec = SimplexSpec(N)
        e = orthonormalize(gen.standard_normal((N + 1, k)))
        e = AffineSubspace.linear(e)
        point = e.projector() @ gen.dirichlet(np.ones(N + 1))
        # P_E Δ spans E unless E is everything; then it is Δ and F must lie in its hyperplane
        span = e.basis if k <= N else spec.hyperplane().basis
        f = AffineSubspace(point, span @ orthonormalize(gen.standard_normal((span.shape[1], j))))
        et, _ = swap_representation(spec, e, f)
        lhs, rhs = swap_sides(spec, e, f, et)
        worst = max(worst, compare_bodies(lhs, rhs, 200, RngStream(5, (i, 1))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-7 and dt < 120
    report(5, ok, f"max relative gauge disagreement {worst:.2e} over 50 instances x 200 directions", dt)
    assert ok


def calibration_suite():
    gen = RngStream(6).generator()
    return {
        "square": SQUARE, "diamond": DIAMOND, "hexagon": HEXAGON, "triangle": regular_polygon(3),
        "64-gon": GON64, "cube3": cube_vertices(3), "cross3": cross_polytope(3),
        "random-polygon": VPolytope(gen.standard_normal((7, 2)), symmetric=True),
        "random-absconv3": VPolytope(gen.standard_normal((9, 3)), symmetric=True),
        "gluskin(3,6)": gluskin_build(GluskinSpec(3, 6, RngStream(6, (1,)))),
    }


def test_criterion_6_calibration(report):
    t0 = time.perf_counter()
    self_d = {name: bm_upper(k, k, restarts=8, rng=RngStream(6, (2,))).upper
              for name, k in calibration_suite().items()}
    euclid = bm_upper(GON64, SQUARE, restarts=8, rng=RngStream(6, (3,))).upper
    oracle = rotation_grid_distance(GON64, SQUARE)
    l1 = bm_upper(DIAMOND, SQUARE, restarts=8, rng=RngStream(6, (4,))).upper
    dt = time.perf_counter() - t0
    ok = (max(self_d.values()) <= 1.001 and abs(euclid - math.sqrt(2)) <= 0.05
          and l1 <= 1.01 and dt < 180)
    report(6, ok, f"max d(K,K)={max(self_d.values()):.6f}; d(64-gon, square)={euclid:.4f} "
                  f"(rotation-grid oracle {oracle:.4f}); d(B1, square)={l1:.6f}", dt)
    assert ok


def test_criterion_7_lower_soundness(report):
    t0 = time.perf_counter()
    pairs = [(SQUARE, HEXAGON), (DIAMOND, GON64), (SQUARE, GON64), (HEXAGON, GON64),
             (cube_vertices(3), cross_polytope(3)), (regular_polygon(3), SQUARE)]
    ests = [bm_estimate(a, b, restarts=4, rng=RngStream(7, (i,))) for i, (a, b) in enumerate(pairs)]
    bad = [i for i, e in enumerate(ests) if e.lower > e.upper]
    certs = []
    for a, b, eta in ((SQUARE, HEXAGON, 1.15), (SQUARE, GON64, 1.1), (HEXAGON, GON64, 1.02),
                      (HEXAGON, HEXAGON, 1.05)):
        cert = bm_lower_netcert(a, b, eta)
        brute = brute_force_grid_2d(a, b, points=10**6) if cert.success else float("nan")
        certs.append((eta, cert.success, brute))
    refuted = [c for c in certs if c[1] and c[2] < c[0] ** 2 - 1e-3]
    n_ok = sum(c[1] for c in certs)
    dt = time.perf_counter() - t0
    ok = not bad and not refuted and n_ok > 0 and dt < 600
    detail = "; ".join(f"eta={e}: {'certified' if s else 'inconclusive'}"
                       + (f", grid min {g:.4f}" if s else "") for e, s, g in certs)
    report(7, ok, f"lower>upper in {len(bad)}/{len(ests)} estimates; {detail}", dt)
    assert ok


def test_criterion_8_volume(report):
    t0 = time.perf_counter()
    man = run(ExperimentConfig("volume-bounds", grid={"d": [3, 4, 5], "M_over_d": [2, 10, 50]},
                               seeds=list(range(10)), samples=20_000,
                               params={"coverage_runs": 20, "sphere_runs": 5}))
    dt = time.perf_counter() - t0
    cov = man.fitted["coverage"]
    ok = (all(v >= 18 for v in cov.values()) and man.fitted["C_max"] <= 10
          and man.fitted["spread"] < 4 and man.passed and dt < 600)
    report(8, ok, f"coverage per body (of 20) {cov}; C_max={man.fitted['C_max']:.3f}, "
                  f"spread={man.fitted['spread']:.3f}", dt)
    assert ok


def test_criterion_9_gluskin_trend(report):
    t0 = time.perf_counter()
    man = run(ExperimentConfig("gluskin-distance", grid={"dM": [[3, 6], [6, 12]]}, seeds=[0],
                               restarts=4, params={"pairs": 30}))
    dt = time.perf_counter() - t0
    cells = {(c["d"], c["M"]): c for c in man.fitted["cells"]}
    lo36, lo612 = cells[(3, 6)]["median_lower"], cells[(6, 12)]["median_lower"]
    ci = man.fitted["a_hat_lower_ci"]
    ok = lo612 > lo36 and man.passed and dt < 1800
    report(9, ok, f"median lower (3,6)={lo36:.4f}, (6,12)={lo612:.4f}; a_hat lower="
                  f"{man.fitted['a_hat_lower']:.4f} CI [{ci[0]:.4f}, {ci[1]:.4f}]; median upper "
                  f"(3,6)={cells[(3, 6)]['median_upper']:.3f}, (6,12)={cells[(6, 12)]['median_upper']:.3f}", dt)
    assert ok


def test_criterion_10_desk_surrogate(report):
    t0 = time.perf_counter()
    man = run(ExperimentConfig("simplex-approx", grid={"n": [3], "N": [7, 11], "m": [3, 4, 5]},
                               seeds=[0], samples=200, restarts=4))
    dt = time.perf_counter() - t0
    per = {r["N"]: r for r in man.fitted["per_N"]}
    ok = (all(per[N]["samples"] >= 200 and per[N]["min_upper"] >= 1.2 for N in (7, 11))
          and all(len(per[N]["c_hat_ci"]) == 2 for N in (7, 11)) and man.passed and dt < 3600)
    detail = "; ".join(f"N={N}: min={per[N]['min_upper']:.4f} over {per[N]['samples']}, "
                       f"c_hat={per[N]['c_hat']:.3f} CI [{per[N]['c_hat_ci'][0]:.3f}, "
                       f"{per[N]['c_hat_ci'][1]:.3f}]" for N in (7, 11))
    report(10, ok, detail, dt)
    assert ok
