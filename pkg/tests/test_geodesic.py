import numpy as np
import pytest

from wcluster import (
    DimMismatchError,
    GaussianMeasure,
    MeasureCollection,
    OutOfRangeError,
    check_spd,
    make_geodesic,
    point_at,
    register,
    transport_map,
    w2_distance,
    wasserstein_barycenter,
)
from wcluster.spd import inv_sqrt_spd, sqrt_spd, sym_part

from conftest import random_measure


def gauss1d(mean, var):
    return GaussianMeasure(np.array([float(mean)]), np.array([[float(var)]]))


class TestTransportMap:
    def test_identity_map(self, rng):
        m = random_measure(rng, 3)
        assert np.allclose(transport_map(m, m), np.eye(3), atol=1e-10)

    def test_scalar_reduction(self):
        # 1-d: Lambda = sqrt(S_target / S_source)
        out = transport_map(gauss1d(0, 1), gauss1d(0, 4))
        assert np.allclose(out, [[2.0]], atol=1e-12)

    def test_diagonal_reduction(self):
        a = GaussianMeasure(np.zeros(2), np.diag([1.0, 4.0]))
        b = GaussianMeasure(np.zeros(2), np.diag([4.0, 16.0]))
        assert np.allclose(transport_map(a, b), np.diag([2.0, 2.0]), atol=1e-12)

    def test_push_forward_identity(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 8))
            a, b = random_measure(rng, d), random_measure(rng, d)
            lam = transport_map(a, b)
            assert np.linalg.norm(lam @ a.cov @ lam - b.cov) <= 1e-8

    def test_dim_mismatch(self, rng):
        with pytest.raises(DimMismatchError):
            transport_map(random_measure(rng, 2), random_measure(rng, 3))


class TestSegment:
    def test_degenerate_flag(self, rng):
        m = random_measure(rng, 2)
        assert make_geodesic(m, m).degenerate
        other = random_measure(rng, 2)
        assert not make_geodesic(m, other).degenerate

    def test_endpoints(self, rng):
        for _ in range(10):
            a, b = random_measure(rng, 3), random_measure(rng, 3)
            g = make_geodesic(a, b)
            start, end = point_at(g, 0.0), point_at(g, 1.0)
            assert np.allclose(start.mean, a.mean, atol=1e-10)
            assert np.allclose(start.cov, a.cov, atol=1e-10)
            assert np.allclose(end.mean, b.mean, atol=1e-10)
            assert np.allclose(end.cov, b.cov, atol=1e-10)

    def test_scalar_map(self):
        g = make_geodesic(gauss1d(0, 1), gauss1d(2, 9))
        assert np.allclose(g.map, [[3.0]], atol=1e-12)

    def test_map_formula_invariant(self, rng):
        a, b = random_measure(rng, 4), random_measure(rng, 4)
        g = make_geodesic(a, b)
        root_t = sqrt_spd(b.cov)
        want = root_t @ inv_sqrt_spd(sym_part(root_t @ a.cov @ root_t)) @ root_t
        assert np.linalg.norm(g.map - want) <= 1e-8

    def test_midpoint_scalar(self):
        g = make_geodesic(gauss1d(0, 1), gauss1d(2, 9))
        mid = point_at(g, 0.5)
        assert mid.mean == pytest.approx([1.0])
        assert np.allclose(mid.cov, [[4.0]], atol=1e-12)

    def test_midpoint_matches_barycenter(self, rng):
        # oracle: the t=1/2 point is the equal-weight barycenter of the endpoints
        a, b = random_measure(rng, 3), random_measure(rng, 3)
        mid = point_at(make_geodesic(a, b), 0.5)
        bary = wasserstein_barycenter(MeasureCollection((a, b)), [0.5, 0.5]).barycenter
        assert np.allclose(mid.mean, bary.mean, atol=1e-8)
        assert np.allclose(mid.cov, bary.cov, atol=1e-8)

    def test_out_of_range(self, rng):
        g = make_geodesic(random_measure(rng, 2), random_measure(rng, 2))
        with pytest.raises(OutOfRangeError):
            point_at(g, -0.01)
        with pytest.raises(OutOfRangeError):
            point_at(g, 1.01)

    def test_curve_stays_spd(self, rng):
        a, b = random_measure(rng, 4), random_measure(rng, 4)
        g = make_geodesic(a, b)
        for t in np.linspace(0.0, 1.0, 33):
            check_spd(point_at(g, float(t)).cov)

    def test_constant_speed(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 6))
            a, b = random_measure(rng, d), random_measure(rng, d)
            g = make_geodesic(a, b)
            length = w2_distance(a, b)
            s, t = sorted(rng.uniform(0.0, 1.0, size=2))
            got = w2_distance(point_at(g, s), point_at(g, t))
            assert abs(got - (t - s) * length) <= 1e-7 * length


class TestRegister:
    def test_source_and_target(self, rng):
        a, b = random_measure(rng, 3), random_measure(rng, 3)
        g = make_geodesic(a, b)
        at_source = register(a, g)
        assert at_source.tau == pytest.approx(0.0, abs=1e-6)
        assert at_source.dist <= 1e-7
        at_target = register(b, g)
        assert at_target.tau == pytest.approx(1.0, abs=1e-6)
        assert at_target.dist <= 1e-7

    def test_round_trip(self, rng):
        a, b = random_measure(rng, 3), random_measure(rng, 3)
        g = make_geodesic(a, b)
        sol = register(point_at(g, 0.37), g)
        assert sol.tau == pytest.approx(0.37, abs=1e-6)
        assert sol.dist <= 1e-7

    def test_round_trip_random(self, rng):
        for _ in range(20):
            d = int(rng.integers(1, 5))
            a, b = random_measure(rng, d), random_measure(rng, d)
            g = make_geodesic(a, b)
            t_star = float(rng.uniform(0.0, 1.0))
            sol = register(point_at(g, t_star), g)
            assert abs(sol.tau - t_star) <= 1e-5
            assert sol.dist <= 1e-6

    def test_degenerate_segment(self, rng):
        m = random_measure(rng, 2)
        g = make_geodesic(m, m)
        probe = random_measure(rng, 2)
        sol = register(probe, g)
        assert sol.tau == 0.0
        assert sol.dist == pytest.approx(w2_distance(probe, m))

    def test_projection_optimality(self, rng):
        # the returned distance must not exceed any point of a fine grid
        for _ in range(5):
            a, b = random_measure(rng, 3), random_measure(rng, 3)
            g = make_geodesic(a, b)
            probe = random_measure(rng, 3)
            sol = register(probe, g)
            grid_min = min(
                w2_distance(probe, point_at(g, float(t)))
                for t in np.linspace(0.0, 1.0, 1025)
            )
            assert sol.dist <= grid_min + 1e-7

    def test_dim_mismatch(self, rng):
        g = make_geodesic(random_measure(rng, 2), random_measure(rng, 2))
        with pytest.raises(DimMismatchError):
            register(random_measure(rng, 3), g)
