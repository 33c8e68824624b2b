import itertools
import math

import numpy as np
import pytest

from nbilliard.spherical import (
    PlaneArrangement,
    cone_feasibility,
    diagonal_planes,
    dihedral_angle_via_tangents,
    euler_face_count,
    line_intersection_count,
    random_rotation,
    sample_face_count,
    three_planes_common_line_count,
    tiling_322,
    tiling_332,
)

PI = math.pi


def fibonacci_faces(arr, n=200_000):
    """Sign vectors over a deterministic, evenly spread point set on S^2."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = k * PI * (3 - math.sqrt(5))
    r = np.sqrt(1 - z * z)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return len({row.tobytes() for row in (pts @ arr.normals.T > 0)})


def normal_angle(n1, n2):
    return math.acos(min(1.0, abs(float(np.dot(n1, n2))) / np.linalg.norm(n1) / np.linalg.norm(n2)))


class TestDihedral:
    def test_coordinate_planes(self):
        assert dihedral_angle_via_tangents([0, 0, 1], [0, 1, 0]) == pytest.approx(PI / 2, abs=1e-15)

    def test_sixty_degrees(self):
        # y = 0 and y = sqrt(3) x
        n3 = np.array([math.sqrt(3), -1.0, 0.0]) / 2
        assert dihedral_angle_via_tangents([0, 1, 0], n3) == pytest.approx(PI / 3, abs=1e-12)

    def test_nearly_identical_rejected(self):
        with pytest.raises(ValueError):
            dihedral_angle_via_tangents([0, 0, 1], [1e-14, 0, 1])

    def test_matches_normals(self, rng):
        for _ in range(5000):
            n1, n2 = rng.standard_normal(3), rng.standard_normal(3)
            n1 /= np.linalg.norm(n1)
            n2 /= np.linalg.norm(n2)
            assert dihedral_angle_via_tangents(n1, n2) == pytest.approx(normal_angle(n1, n2), abs=1e-10)

    def test_small_angle_precision(self):
        eps = 1e-8
        n2 = np.array([0.0, math.sin(eps), math.cos(eps)])
        assert dihedral_angle_via_tangents([0, 0, 1], n2) == pytest.approx(eps, rel=1e-6)


class TestArrangement:
    def test_validation(self):
        with pytest.raises(ValueError):
            PlaneArrangement(np.array([[0, 0, 2.0]]))
        with pytest.raises(ValueError):
            PlaneArrangement(np.array([[0, 0, 1.0], [0, 0, -1.0]]))
        with pytest.raises(ValueError):
            PlaneArrangement(np.array([[0, 1.0]]))

    def test_from_normals_normalizes(self):
        assert np.allclose(np.linalg.norm(PlaneArrangement.from_normals([[3, 4, 0]]).normals, axis=1), 1)

    def test_normals_read_only(self):
        with pytest.raises(ValueError):
            tiling_322().normals[0, 0] = 1.0


class TestCones:
    def test_equilateral_impossible(self):
        v = cone_feasibility([PI / 3] * 3)
        assert not v.feasible and v.angle_sum == pytest.approx(PI)

    @pytest.mark.parametrize("angles", [(PI / 3, PI / 2, PI / 2), (PI / 3, PI / 3, PI / 2), (PI / 2,) * 3])
    def test_feasible(self, angles):
        assert cone_feasibility(angles).feasible

    def test_octant_is_realized(self):
        # the coordinate planes bound a cone with three right angles
        arr = PlaneArrangement(np.eye(3))
        got = [arr.angle(p, q) for p, q in itertools.combinations((1, 2, 3), 2)]
        assert got == pytest.approx([PI / 2] * 3)
        assert cone_feasibility(got).feasible

    def test_needs_three(self):
        with pytest.raises(ValueError):
            cone_feasibility([1.0, 1.0])


class TestTilings:
    def test_322_planes_and_angles(self):
        t = tiling_322()
        assert len(t) == 4
        assert t.angle(2, 3) == pytest.approx(PI / 3, abs=1e-12)
        assert [t.angle(1, q) for q in (2, 3, 4)] == pytest.approx([PI / 2] * 3, abs=1e-12)

    def test_332_planes_and_angles(self):
        t = tiling_332()
        assert len(t) == 6
        assert t.angle(1, 3) == pytest.approx(PI / 3, abs=1e-12)
        assert t.angle(1, 2) == pytest.approx(PI / 2, abs=1e-12)
        assert t.angle(2, 3) == pytest.approx(PI / 3, abs=1e-12)

    @pytest.mark.parametrize("make,faces", [(tiling_322, 12), (tiling_332, 24)])
    def test_face_counts(self, make, faces):
        t = make()
        e = euler_face_count(t)
        assert e.faces == faces and e.characteristic == 2
        assert sample_face_count(t, 1_000_000, seed=1) == faces
        assert fibonacci_faces(t) == faces

    @pytest.mark.parametrize("make,faces", [(tiling_322, 12), (tiling_332, 24)])
    def test_rotation_invariance(self, make, faces):
        t = make()
        for seed in range(5):
            r = t.rotated(random_rotation(seed))
            for p, q in itertools.combinations(range(1, len(t) + 1), 2):
                assert r.angle(p, q) == pytest.approx(t.angle(p, q), abs=1e-12)
            assert euler_face_count(r).faces == faces
            assert fibonacci_faces(r) == faces

    def test_332_vertex_counts(self):
        # the 24-triangle tiling has 14 vertices and 36 edges
        e = euler_face_count(tiling_332())
        assert (e.vertices, e.edges) == (14, 36)

    def test_general_position_formula(self, rng):
        # n great circles in general position cut the sphere into n(n-1)+2 faces
        for n in range(2, 7):
            arr = PlaneArrangement.from_normals(rng.standard_normal((n, 3)))
            assert euler_face_count(arr).faces == n * (n - 1) + 2


class TestLineCounts:
    @pytest.mark.parametrize("make,bound", [(tiling_322, 4), (tiling_332, 6)])
    def test_tilings(self, make, bound):
        rep = line_intersection_count(make(), 100_000, seed=3)
        assert rep.predicted == bound and rep.empirical_max == bound

    def test_single_plane(self):
        rep = line_intersection_count(PlaneArrangement(np.array([[0.0, 0.0, 1.0]])), 1000, seed=0)
        assert rep.empirical_max == 1

    def test_diagonal_planes(self):
        rep = three_planes_common_line_count(100_000, seed=4)
        assert rep.empirical_max == 3 and rep.consistent

    def test_parallel_to_common_line(self):
        from nbilliard.bounds import count_hyperplane_crossings

        arr = diagonal_planes()
        c = count_hyperplane_crossings(np.array([[1.0, 0.0, 2.0]]), np.array([[1.0, 1.0, 1.0]]), arr.normals)
        assert c[0] == 0

    def test_one_wall(self):
        from nbilliard.bounds import count_hyperplane_crossings

        arr = diagonal_planes()
        # x - z = (x - y) + (y - z), so a full line crosses 0, 2 or 3 of these planes
        a, u = np.array([[-1.0, 0.0, -5.0]]), np.array([[1.0, 0.0, 0.0]])
        assert count_hyperplane_crossings(a, u, arr.normals)[0] == 2
        # the ray from the same point meets x = y at t = 1 but x = z only behind it
        assert count_hyperplane_crossings(a, u, arr.normals, ray=True)[0] == 1

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            line_intersection_count(tiling_322(), 0)
