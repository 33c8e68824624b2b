import itertools
import math

import mpmath
import numpy as np
import pytest

from nbilliard.bounds import (
    BoundReport,
    codim_line_bound,
    count_codim_events,
    count_hyperplane_crossings,
    exact_three_mass_bound,
    hard_rod_bounds,
    hyperplane_line_bound,
    mass_ratio_grid,
    three_body_bound,
    three_mass_bound,
    wedge_bound,
)

PI = math.pi


@pytest.fixture(scope="module")
def grid():
    return mass_ratio_grid()


def brute_codim_events(c0, slope, d, tol=1e-9):
    """Coordinate subspaces met by ``c0 + t slope``, found by trying every d-subset."""
    N = len(c0)
    hits = 0
    for idx in itertools.combinations(range(N), d):
        ts = []
        ok = True
        for k in idx:
            if abs(slope[k]) > tol:
                ts.append(-c0[k] / slope[k])
            elif abs(c0[k]) > tol:
                ok = False
        if not ok:
            continue
        if not ts or max(ts) - min(ts) <= tol:
            hits += 1
    return hits


class TestWedge:
    @pytest.mark.parametrize("alpha,expected", [(0.54, 6), (PI / 2, 2), (PI / 3, 3), (PI, 1), (PI / 7, 7)])
    def test_examples(self, alpha, expected):
        assert wedge_bound(alpha) == expected

    def test_ceiling_definition(self, rng):
        for alpha in rng.uniform(1e-3, PI, 5000):
            k = wedge_bound(alpha)
            assert k * alpha >= PI * (1 - 1e-12) and (k - 1) * alpha < PI

    @pytest.mark.parametrize("bad", [0.0, -1.0, 4.0, math.nan])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            wedge_bound(bad)


class TestThreeMass:
    def test_equal(self):
        assert three_mass_bound(1, 1, 1) == 3 == exact_three_mass_bound(1, 1, 1)

    def test_heavy_middle_is_two(self):
        assert three_mass_bound(1, 4, 1) == 2

    def test_extreme_ratio_high_precision(self):
        with mpmath.workdps(50):
            mi, mj, mk = mpmath.mpf(10), mpmath.mpf(1), mpmath.mpf("0.01")
            theta = mpmath.acos((2 * (mi + mk) - mj) / mpmath.sqrt((mi + mj + 4 * mk) * (4 * mi + mj + mk)))
            ref = int(mpmath.ceil(mpmath.pi / theta))
        assert three_mass_bound(10, 1, 0.01) == ref

    def test_exact_bound_high_precision(self, rng):
        for mi, mj, mk in np.exp(rng.uniform(math.log(1e-2), math.log(1e2), (200, 3))):
            with mpmath.workdps(40):
                theta = mpmath.acos(mpmath.sqrt(mpmath.mpf(mi) * mk / ((mi + mpmath.mpf(mj)) * (mpmath.mpf(mj) + mk))))
                ref = int(mpmath.ceil(mpmath.pi / theta))
            assert exact_three_mass_bound(mi, mj, mk) == ref

    def test_scale_and_swap_invariance(self, rng):
        for mi, mj, mk in np.exp(rng.uniform(-4, 4, (500, 3))):
            b = three_mass_bound(mi, mj, mk)
            assert three_mass_bound(mk, mj, mi) == b
            for lam in (1e-3, 1.0, 1e3):
                assert three_mass_bound(lam * mi, lam * mj, lam * mk) == b

    def test_exact_bound_never_below_two(self, rng):
        # the mass-metric angle never exceeds pi/2
        for mi, mj, mk in np.exp(rng.uniform(-4, 4, (2000, 3))):
            assert exact_three_mass_bound(mi, mj, mk) >= 2

    def test_three_body_takes_worst_middle(self):
        assert three_body_bound([1, 1, 1]) == 3
        assert three_body_bound([1, 4, 1]) == max(three_mass_bound(4, 1, 1), three_mass_bound(1, 4, 1))
        with pytest.raises(ValueError):
            three_body_bound([1, 1])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            three_mass_bound(1, 0, 1)


class TestGrid:
    def test_shape_and_axes(self, grid):
        assert grid.cells.shape == (200, 200)
        assert grid.alphas[0] == pytest.approx(0.05) and grid.alphas[-1] == pytest.approx(10.0)

    def test_unit_cell(self, grid):
        assert grid.cell(1.0, 1.0) == 3

    def test_symmetric(self, grid):
        assert np.array_equal(grid.cells, grid.cells.T)
        assert np.array_equal(grid.flags, grid.flags.T)

    def test_cells_match_formula(self, grid):
        for i, j in [(0, 0), (19, 19), (3, 150), (199, 0), (199, 199)]:
            assert grid.cells[i, j] == three_mass_bound(grid.alphas[i], 1.0, grid.betas[j])

    def test_flagged_cells_are_the_two_cells(self, grid):
        assert np.array_equal(grid.flags, grid.cells == 2)
        assert np.all(grid.cells[~grid.flags] >= 3)

    def test_flag_region_is_closed_form_sign(self, grid):
        A, B = np.meshgrid(grid.alphas, grid.betas, indexing="ij")
        assert np.array_equal(grid.flags, 2 * (A + B) <= 1.0 + 1e-12)

    @pytest.mark.xfail(strict=True, reason="bound is 4 at e.g. alpha=0.5, beta=2; the middle region is not constant")
    def test_middle_region_constant(self, grid):
        a = (grid.alphas >= 0.5 - 1e-9) & (grid.alphas <= 2 + 1e-9)
        assert np.all(grid.cells[np.ix_(a, a)] == 3)

    def test_csv(self):
        g = mass_ratio_grid(0.2, 0.1, 0.1)
        assert g.to_csv().splitlines() == [
            "alpha,beta,bound,flag",
            f"0.100000,0.100000,{three_mass_bound(0.1, 1, 0.1)},{int(g.flags[0, 0])}",
            f"0.200000,0.100000,{three_mass_bound(0.2, 1, 0.1)},{int(g.flags[1, 0])}",
        ]

    def test_worker_independent(self):
        a = mass_ratio_grid(2, 2, 0.25)
        b = mass_ratio_grid(2, 2, 0.25, workers=2)
        assert a.to_csv() == b.to_csv()

    def test_bad_step(self):
        with pytest.raises(ValueError):
            mass_ratio_grid(step=0)


class TestLines:
    @pytest.mark.parametrize("N", range(1, 9))
    def test_hyperplanes(self, N):
        rep = hyperplane_line_bound(N, trials=10_000, seed=N)
        assert rep.predicted == N and rep.witness == N
        assert rep.consistent and rep.empirical_max == N

    def test_crossings_by_brute_force(self, rng):
        normals = np.linalg.qr(rng.standard_normal((4, 4)))[0].T
        a, u = rng.standard_normal((200, 4)), rng.standard_normal((200, 4))
        got = count_hyperplane_crossings(a, u, normals, ray=True)
        for k in range(200):
            t_hit = -(a[k] @ normals.T) / (u[k] @ normals.T)
            assert got[k] == int(np.sum(t_hit > 0))

    def test_line_through_intersection_rejected(self):
        normals = np.eye(2)
        assert count_hyperplane_crossings(np.array([[1.0, 1.0]]), np.array([[-1.0, -1.0]]), normals)[0] == -1

    @pytest.mark.parametrize("N,d", [(N, d) for N in range(2, 9) for d in range(1, N)])
    def test_codim(self, N, d):
        rep = codim_line_bound(N, d, trials=10_000, seed=N * 10 + d)
        assert rep.predicted == N - d + 1 and rep.witness == N - d + 1
        assert rep.consistent

    def test_codim_examples(self):
        assert codim_line_bound(3, 2, trials=100).predicted == 2
        assert codim_line_bound(4, 1, trials=100).predicted == 4
        # a = (0, 0, 1, 2, 3), u = (0, 0, 1, 1, 1)
        assert count_codim_events([0, 0, 1, 2, 3], [0, 0, -1, -1, -1], 3) == 3

    def test_codim_events_by_brute_force(self, rng):
        for _ in range(3000):
            N = int(rng.integers(2, 7))
            d = int(rng.integers(1, N))
            times = rng.integers(0, 3, N).astype(float)
            slope = rng.choice([-1.0, 0.0, 1.0, 2.0], N)
            c0 = -times * slope
            c0[slope == 0] = rng.choice([0.0, 1.0], int(np.sum(slope == 0)))
            got = count_codim_events(c0, slope, d)
            ref = brute_codim_events(c0, slope, d)
            # lines through deeper intersections are flagged instead of counted
            if got >= 0:
                assert got == ref

    def test_codim_range(self):
        with pytest.raises(ValueError):
            codim_line_bound(3, 3)


class TestHardRods:
    def test_equal_four(self):
        reps = {r.name: r for r in hard_rod_bounds(4, [1, 1, 1, 1])}
        assert reps["binomial_equal_masses"].predicted == 6 and reps["binomial_equal_masses"].applicable

    def test_galperin_three(self):
        reps = {r.name: r for r in hard_rod_bounds(3, [1, 1, 1])}
        assert reps["galperin"].predicted == 144

    def test_geometric_condition(self):
        reps = {r.name: r for r in hard_rod_bounds(3, [1, 5, 2])}
        assert reps["binomial_geometric_mean"].applicable
        assert not reps["binomial_equal_masses"].applicable

    def test_am_implies_gm(self, rng):
        for _ in range(500):
            N = int(rng.integers(3, 8))
            reps = {r.name: r for r in hard_rod_bounds(N, np.exp(rng.uniform(-1, 1, N)))}
            if reps["binomial_arithmetic_mean"].applicable:
                assert reps["binomial_geometric_mean"].applicable

    def test_galperin_exceeds_binomial(self):
        for N in range(3, 12):
            reps = {r.name: r for r in hard_rod_bounds(N, [1.0] * N)}
            assert reps["galperin"].predicted > math.comb(N, 2)

    def test_overflow_flag(self):
        rep = {r.name: r for r in hard_rod_bounds(200, [1.0] * 199 + [1e6])}["galperin"]
        assert rep.overflow and rep.to_dict()["predicted"] is None


def test_report_consistency():
    assert BoundReport("x", {}, 3, empirical_max=3).consistent
    assert not BoundReport("x", {}, 3, empirical_max=4).consistent
    assert BoundReport("x", {}, 3).consistent
