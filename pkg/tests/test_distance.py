import json
import math

import numpy as np
import pytest

from convexbm.bodies import VPolytope, cross_polytope, cube, cube_vertices, regular_polygon
from convexbm.distance import (
    BMEstimate,
    OperatorBall,
    bm_estimate,
    bm_lower_netcert,
    bm_lower_volume,
    bm_upper,
    brute_force_grid_2d,
    compose_witness,
    distance_value,
    op_norm_body,
    perturb_projection_check,
    perturb_section_check,
    verify_witness,
)
from convexbm.kernel import RngStream, orthonormalize, random_unit_vector
from convexbm.nets import GrassmannPoint, random_subspace, small_rotation, sphere_net
from convexbm.simplex import SimplexSpec, position_section, random_section, random_subspace_of

SQUARE = cube_vertices(2)
DIAMOND = cross_polytope(2)
HEXAGON = regular_polygon(6)
GON64 = regular_polygon(64)
TRIANGLE = regular_polygon(3)


def rotation(th):
    return np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])


def hull_gauge(pts, xs):
    """Gauge of a symmetric polygon from its sorted boundary, by plain numpy."""
    from scipy.spatial import ConvexHull

    allp = np.vstack([pts, -pts])
    eq = ConvexHull(allp).equations
    return np.max(xs @ eq[:, :2].T / -eq[:, 2], axis=1)


def rotation_grid_distance(p, q, n=3600):
    """min over rotations R and scalings of ||R: P -> Q|| ||R^-1: Q -> P||."""
    pp, qp = p.points, q.points
    best = np.inf
    for th in np.linspace(0, np.pi / 2, n, endpoint=False):
        r = rotation(th)
        f = hull_gauge(qp, pp @ r.T).max()
        g = hull_gauge(pp, qp @ r).max()
        best = min(best, f * g)
    return best


class TestOperatorNorm:
    def test_identity(self):
        assert op_norm_body(np.eye(2), HEXAGON, HEXAGON) == pytest.approx(1.0)

    def test_homogeneity(self):
        assert op_norm_body(2 * np.eye(3), cross_polytope(3), cross_polytope(3)) == pytest.approx(2.0)

    def test_l1_to_linf(self):
        gen = RngStream(1).generator()
        for _ in range(20):
            t = gen.standard_normal((2, 2))
            assert op_norm_body(t, DIAMOND, SQUARE) == pytest.approx(np.abs(t).max(), rel=1e-12)

    def test_operator_ball(self):
        gen = RngStream(2).generator()
        ball = OperatorBall(HEXAGON, 1.3)
        for _ in range(50):
            t = gen.standard_normal((2, 2))
            assert ball.contains(t) == (op_norm_body(t, DIAMOND, HEXAGON) <= 1.3 + 1e-8)
        assert np.all(ball.entry_bounds() > 0)


class TestUpper:
    def test_same_body(self):
        for k in (SQUARE, HEXAGON, cube(3), TRIANGLE):
            est = bm_upper(k, k, restarts=4, rng=RngStream(3), max_iter=200)
            assert est.upper <= 1 + 1e-6
            assert verify_witness(est)

    def test_l1_linf(self):
        est = bm_upper(DIAMOND, SQUARE, restarts=4, rng=RngStream(4), max_iter=300)
        assert est.upper <= 1 + 1e-3
        # explicit witness: the square is sqrt 2 times the rotated diamond
        w = np.sqrt(2) * rotation(np.pi / 4)
        assert distance_value(np.linalg.inv(w), np.zeros(2), np.zeros(2), DIAMOND, SQUARE) == pytest.approx(1.0)

    def test_euclid_square(self):
        est = bm_upper(GON64, SQUARE, restarts=4, rng=RngStream(5), max_iter=300)
        grid = rotation_grid_distance(GON64, SQUARE)
        assert abs(grid - math.sqrt(2)) <= 0.05
        assert abs(est.upper - math.sqrt(2)) <= 0.05
        assert est.upper <= grid + 1e-6

    def test_known_planar_values(self):
        # d(square, regular hexagon) = 3/2 and d(triangle, square) = 2
        e1 = bm_upper(SQUARE, HEXAGON, restarts=6, rng=RngStream(6), max_iter=400)
        assert e1.upper <= 1.5 + 1e-3
        e2 = bm_upper(TRIANGLE, SQUARE, restarts=6, rng=RngStream(7), max_iter=400)
        assert e2.upper <= 2 + 1e-3
        assert verify_witness(e2, method="lp")

    def test_verify_lp_route(self):
        est = bm_upper(cube(3), cross_polytope(3), restarts=4, rng=RngStream(8), max_iter=300)
        assert verify_witness(est, method="hrep")
        assert verify_witness(est, method="lp")
        assert est.upper <= 3.0 + 1e-9  # the identity already gives 3

    def test_witness_transport(self):
        est = bm_upper(HEXAGON, SQUARE, restarts=4, rng=RngStream(9), max_iter=300)
        a = RngStream(10).generator().standard_normal((2, 2)) + 2 * np.eye(2)
        moved = HEXAGON.transformed(a)
        val = distance_value(a @ est.witness, np.zeros(2), np.zeros(2), moved, SQUARE)
        assert val == pytest.approx(est.upper, rel=1e-8)

    def test_reproducible(self):
        a = bm_upper(HEXAGON, TRIANGLE, restarts=2, rng=RngStream(11), max_iter=100)
        b = bm_upper(HEXAGON, TRIANGLE, restarts=2, rng=RngStream(11), max_iter=100)
        assert a.upper == b.upper
        assert np.array_equal(a.witness, b.witness)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            bm_upper(SQUARE, cube(3))

    def test_estimate_json_and_invariant(self):
        est = bm_estimate(SQUARE, HEXAGON, restarts=2, rng=RngStream(12), max_iter=200)
        doc = json.loads(est.to_json())
        assert doc["upper"] == est.upper and doc["lower"] == est.lower
        assert est.lower <= est.upper + 1e-6
        assert doc["methods"]["lower"] == "volume-product"
        with pytest.raises(ValueError):
            BMEstimate(1.0, 2.0, np.eye(2), np.zeros(2), np.zeros(2))


class TestCompose:
    def test_identity(self):
        e = bm_upper(SQUARE, SQUARE, restarts=1, rng=RngStream(13), max_iter=50)
        c = compose_witness(e, e)
        assert c.upper <= 1 + 1e-6

    def test_chain_through_euclid(self):
        e13 = bm_upper(DIAMOND, GON64, restarts=3, rng=RngStream(14), max_iter=300)
        e32 = bm_upper(GON64, SQUARE, restarts=3, rng=RngStream(15), max_iter=300)
        c = compose_witness(e13, e32)
        assert c.upper <= e13.upper * e32.upper + 1e-6
        assert verify_witness(c)

    def test_random_chain_3d(self):
        gen = RngStream(16)
        ks = [VPolytope(random_unit_vector(3, gen.derive(i), size=6), symmetric=True) for i in range(3)]
        e13 = bm_upper(ks[0], ks[2], restarts=2, rng=gen.derive(10), max_iter=200)
        e32 = bm_upper(ks[2], ks[1], restarts=2, rng=gen.derive(11), max_iter=200)
        c = compose_witness(e13, e32)
        direct = bm_upper(ks[0], ks[1], restarts=1, rng=gen.derive(12), max_iter=200,
                          init=[c.witness])
        assert c.upper >= direct.upper - 1e-6


class TestLowerVolume:
    def test_same(self):
        assert bm_lower_volume(HEXAGON, HEXAGON) == 1.0

    def test_linear_invariance(self):
        k1 = VPolytope(random_unit_vector(3, RngStream(17), size=7), symmetric=True)
        t = RngStream(18).generator().standard_normal((3, 3))
        t /= abs(np.linalg.det(t)) ** (1 / 3)
        base = bm_lower_volume(k1, cube(3))
        assert bm_lower_volume(k1.transformed(t), cube(3)) == pytest.approx(base, rel=1e-9)

    def test_cube_vs_euclid_proxy(self):
        net = sphere_net(3, 0.5, True, RngStream(19)).points
        pts = np.vstack([random_unit_vector(3, RngStream(20), size=100), net])
        proxy = VPolytope(pts, symmetric=True)
        lo = bm_lower_volume(cube_vertices(3), proxy)
        assert lo >= 1.05
        lo_mc = bm_lower_volume(cube_vertices(3), proxy, method="mc", samples=10**5, rng=RngStream(21))
        assert lo_mc <= lo + 0.02
        up = bm_upper(cube_vertices(3), proxy, restarts=2, rng=RngStream(22), max_iter=200)
        assert lo <= up.upper

    def test_non_symmetric_uses_difference_body(self):
        lo = bm_lower_volume(TRIANGLE, SQUARE)
        up = bm_upper(TRIANGLE, SQUARE, restarts=4, rng=RngStream(23), max_iter=300)
        assert 1.0 <= lo <= up.upper


class TestNetCertificate:
    def test_same_body_inconclusive(self):
        cert = bm_lower_netcert(HEXAGON, HEXAGON, 1.1)
        assert not cert.success and cert.lower == 1.0

    def test_square_hexagon(self):
        cert = bm_lower_netcert(SQUARE, HEXAGON, 1.15)
        assert cert.success
        assert cert.lower == pytest.approx(1.15**2)
        assert cert.tau == pytest.approx(cert.eta + cert.eps * cert.xi)
        up = bm_upper(SQUARE, HEXAGON, restarts=4, rng=RngStream(24), max_iter=300)
        assert cert.lower <= up.upper
        assert brute_force_grid_2d(SQUARE, HEXAGON, points=2 * 10**5) >= cert.lower - 1e-3

    def test_preconditions(self):
        with pytest.raises(ValueError):
            bm_lower_netcert(cross_polytope(4), cross_polytope(4), 1.1)
        with pytest.raises(ValueError):
            bm_lower_netcert(TRIANGLE, SQUARE, 1.1)

    def test_brute_force_grid(self):
        # the identity is a grid point; the square/diamond optimum R(pi/4) is only approximated
        assert brute_force_grid_2d(HEXAGON, HEXAGON, points=10**4) == pytest.approx(1.0, abs=1e-12)
        assert 1.0 <= brute_force_grid_2d(SQUARE, DIAMOND, points=10**4) < 1.1


class TestPerturbation:
    def test_section_zero(self):
        l1 = random_subspace(8, 3, RngStream(25))
        rho, up, bound = perturb_section_check(l1, l1, 3, rng=RngStream(26))
        assert rho == pytest.approx(0.0, abs=1e-7)
        assert bound == pytest.approx(1.0, abs=1e-6)
        assert up <= 1.001

    def test_section_small_rotation(self):
        l1 = random_subspace(8, 3, RngStream(27))
        u = small_rotation(8, 0.01, RngStream(28))
        rho, up, bound = perturb_section_check(l1, l1.moved(u), 3, rng=RngStream(29))
        assert rho <= 0.01 + 1e-9
        assert bound <= (1 + 0.01 * 3**1.5) ** 2 + 1e-9
        assert up <= bound + 0.05

    def _projection_setup(self, eps, seed):
        spec = SimplexSpec(6)
        ps = position_section(spec, random_section(spec, 3, RngStream(seed)))
        f1 = random_subspace_of(ps.L, 2, RngStream(seed + 1))
        rot = small_rotation(3, eps, RngStream(seed + 2)) if eps else np.eye(3)
        q = ps.L.basis
        u = q @ rot @ q.T + (np.eye(7) - q @ q.T)
        return ps, GrassmannPoint(f1.basis), GrassmannPoint(orthonormalize(u @ f1.basis))

    def test_projection_zero(self):
        ps, f1, _ = self._projection_setup(0.0, 30)
        rho, up, bound = perturb_projection_check(ps, f1, f1, rng=RngStream(33))
        assert bound == pytest.approx(1.0, abs=1e-6)
        assert up <= 1.001

    def test_projection_small_rotation(self):
        ps, f1, f2 = self._projection_setup(0.02, 34)
        rho, up, bound = perturb_projection_check(ps, f1, f2, rng=RngStream(37))
        assert bound <= (1 + 0.02 * 3**1.5) ** 2 + 1e-9
        assert up <= bound + 0.05

    def test_random_pairs(self):
        gen = RngStream(40)
        for i in range(5):
            l1 = random_subspace(7, 3, gen.derive(i))
            u = small_rotation(7, 0.05 * (i + 1) / 5, gen.derive(100 + i))
            rho, up, bound = perturb_section_check(l1, l1.moved(u), 3, restarts=2,
                                                   rng=gen.derive(200 + i), max_iter=150)
            assert up <= bound + 0.05
