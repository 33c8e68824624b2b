"""Planes through the origin of R^3, the great circles they cut on S^2, and lines against them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .bounds import BoundReport, count_hyperplane_crossings

_PARALLEL = 1e-10


@dataclass(frozen=True, eq=False)
class PlaneArrangement:
    normals: np.ndarray  # (P, 3), one unit normal per plane

    def __post_init__(self):
        n = np.array(self.normals, dtype=float)
        if n.ndim != 2 or n.shape[1] != 3:
            raise ValueError(f"normals must be (P, 3), got {n.shape}")
        if np.any(np.abs(np.linalg.norm(n, axis=1) - 1.0) > 1e-12):
            raise ValueError("normals must be unit vectors")
        for p, q in itertools.combinations(range(len(n)), 2):
            if abs(n[p] @ n[q]) >= 1.0 - _PARALLEL:
                raise ValueError(f"planes {p + 1} and {q + 1} are parallel")
        n.setflags(write=False)
        object.__setattr__(self, "normals", n)

    @classmethod
    def from_normals(cls, normals) -> "PlaneArrangement":
        n = np.asarray(normals, dtype=float)
        return cls(n / np.linalg.norm(n, axis=1, keepdims=True))

    def __len__(self) -> int:
        return len(self.normals)

    def rotated(self, R: np.ndarray) -> "PlaneArrangement":
        return PlaneArrangement(self.normals @ np.asarray(R, dtype=float).T)

    def angle(self, p: int, q: int) -> float:
        """Dihedral angle between planes ``p`` and ``q`` (1-based)."""
        return dihedral_angle_via_tangents(self.normals[p - 1], self.normals[q - 1])

    def intersection_lines(self) -> np.ndarray:
        """Distinct lines ``H_p ∩ H_q`` as unit directions, one per line."""
        lines: list[np.ndarray] = []
        for a, b in itertools.combinations(self.normals, 2):
            d = np.cross(a, b)
            d /= np.linalg.norm(d)
            if not any(abs(abs(d @ e) - 1.0) < 1e-9 for e in lines):
                lines.append(d)
        return np.array(lines).reshape(-1, 3)


def dihedral_angle_via_tangents(n1, n2) -> float:
    """Angle between the great circles of two planes, read off their tangents at a crossing point."""
    n1 = np.asarray(n1, dtype=float)
    n2 = np.asarray(n2, dtype=float)
    line = np.cross(n1, n2)
    norm = np.linalg.norm(line)
    if norm < _PARALLEL * np.linalg.norm(n1) * np.linalg.norm(n2):
        raise ValueError("parallel planes have no crossing point")
    p1 = line / norm
    t1, t2 = np.cross(n1, p1), np.cross(n2, p1)
    return math.atan2(float(np.linalg.norm(np.cross(t1, t2))), abs(float(t1 @ t2)))


@dataclass(frozen=True)
class ConeVerdict:
    angles: tuple[float, float, float]
    angle_sum: float
    feasible: bool

    def to_dict(self) -> dict:
        return {"angles": list(self.angles), "angle_sum": self.angle_sum, "feasible": self.feasible}


def cone_feasibility(angles, tol: float = 1e-12) -> ConeVerdict:
    """Can three planes bound a cone whose faces meet at these dihedral angles?

    The cone cuts a spherical triangle out of S^2 with the same angles, and a
    spherical triangle's angles always sum to more than ``pi``.
    """
    a = tuple(float(x) for x in angles)
    if len(a) != 3:
        raise ValueError("three angles required")
    total = math.fsum(a)
    return ConeVerdict(a, total, total > math.pi + tol)


def tiling_322() -> PlaneArrangement:
    """z=0, y=0, y=√3x, y=−√3x: twelve (π/3, π/2, π/2) triangles."""
    s = math.sqrt(3.0) / 2.0
    return PlaneArrangement(np.array([
        [0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0],
        [s, -0.5, 0.0],
        [s, 0.5, 0.0],
    ]))


def tiling_332() -> PlaneArrangement:
    """x=0, y=0 and four tilted planes: twenty-four (π/3, π/3, π/2) triangles."""
    r = 1.0 / math.sqrt(2.0)
    return PlaneArrangement(np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-0.5, -0.5, r],
        [-0.5, 0.5, -r],
        [0.5, -0.5, -r],
        [0.5, 0.5, r],
    ]))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_face_count(arr: PlaneArrangement, samples: int = 1_000_000, seed: int = 0) -> int:
    """Distinct sign vectors of random points of S^2 under the plane forms."""
    rng = _rng(seed)
    found: set[bytes] = set()
    chunk = 250_000
    for start in range(0, samples, chunk):
        x = rng.standard_normal((min(chunk, samples - start), 3))
        signs = (x @ arr.normals.T) > 0
        for row in np.unique(np.packbits(signs, axis=1), axis=0):
            found.add(row.tobytes())
    return len(found)


@dataclass(frozen=True)
class EulerCount:
    vertices: int
    edges: int
    faces: int

    @property
    def characteristic(self) -> int:
        return self.vertices - self.edges + self.faces


def euler_face_count(arr: PlaneArrangement) -> EulerCount:
    """Exact face count of the great-circle arrangement from its vertex and edge counts.

    Every intersection line gives two antipodal vertices.  A great circle
    through ``k`` vertices is cut into ``k`` arcs (a circle with no vertex
    would be one closed edge, which cannot happen with two or more planes).
    The faces then follow from ``V - E + F = 2``.
    """
    lines = arr.intersection_lines()
    V = 2 * len(lines)
    E = 0
    for n in arr.normals:
        on = int(np.sum(np.abs(lines @ n) < 1e-9))
        E += 2 * on if on else 1
    return EulerCount(V, E, 2 - V + E)


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_rotation(seed: int) -> np.ndarray:
    return _random_rotation(_rng(seed))


def _line_distance(a: np.ndarray, u: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Distances from lines ``a + t u`` (rows) to the line through 0 along ``direction``."""
    c = np.cross(u, direction)
    cn = np.linalg.norm(c, axis=1)
    skew = np.abs(np.einsum("ij,ij->i", a, c)) / np.where(cn > 0, cn, 1.0)
    # parallel lines: distance from ``a`` to the direction line
    par = np.linalg.norm(np.cross(a, direction), axis=1)
    return np.where(cn > 1e-12, skew, par)


def _count_lines(arr: PlaneArrangement, trials: int, seed: int, avoid: np.ndarray, name: str, predicted: int) -> BoundReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = _rng(seed)
    a = rng.standard_normal((trials, 3))
    u = rng.standard_normal((trials, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    keep = np.ones(trials, dtype=bool)
    for d in avoid:
        keep &= _line_distance(a, u, d) > 1e-7
    counts = count_hyperplane_crossings(a[keep], u[keep], arr.normals)
    valid = counts[counts >= 0]
    return BoundReport(
        name, {"planes": len(arr), "trials": trials, "seed": seed}, predicted,
        int(valid.max()) if valid.size else None,
        notes={"rejected": int(trials - keep.sum() + (counts < 0).sum())},
    )


def line_intersection_count(arr: PlaneArrangement, trials: int = 100_000, seed: int = 0) -> BoundReport:
    """Plane crossings of random lines; each plane is crossed at most once."""
    return _count_lines(arr, trials, seed, arr.intersection_lines(), "line_intersection", len(arr))


def diagonal_planes() -> PlaneArrangement:
    """x=y, y=z, x=z, which share the line through (1, 1, 1)."""
    return PlaneArrangement.from_normals([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0], [1.0, 0.0, -1.0]])


def three_planes_common_line_count(trials: int = 100_000, seed: int = 0) -> BoundReport:
    arr = diagonal_planes()
    return _count_lines(arr, trials, seed, arr.intersection_lines(), "three_planes_common_line", 3)
