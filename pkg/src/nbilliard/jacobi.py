"""Translation reduction of the planar three-body configuration space.

``C^3`` is modelled as ``R^6`` in particle-major layout ``(x1, y1, x2, y2, x3, y3)``
and the reduced space ``C^2_0`` as ``R^4`` laid out ``(v_x, v_y, w_x, w_y)``.
A complex line becomes a real 2-plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collisions import BilliardSystem, PairIndex, build_delta
from .linalg import MassVector, Metric, Subspace, orthonormalize, principal_angles
from .policy import get_policy

REDUCED_PAIRS = (PairIndex(1, 2), PairIndex(2, 3), PairIndex(1, 3))


@dataclass(frozen=True)
class JacobiMasses:
    m1: float
    m2: float
    m3: float

    def __post_init__(self):
        MassVector((self.m1, self.m2, self.m3))

    @classmethod
    def unit(cls) -> "JacobiMasses":
        return cls(1.0, 1.0, 1.0)

    @property
    def masses(self) -> MassVector:
        return MassVector((self.m1, self.m2, self.m3))

    @property
    def mu1(self) -> float:
        return 1.0 / math.sqrt(1.0 / self.m1 + 1.0 / self.m2)

    @property
    def mu2(self) -> float:
        return 1.0 / math.sqrt(1.0 / self.m3 + 1.0 / (self.m1 + self.m2))

    def matrix(self) -> np.ndarray:
        """The 2x3 map ``(q1, q2, q3) -> (v, w)`` acting on each spatial axis."""
        m1, m2 = self.m1, self.m2
        return np.array([
            [self.mu1, -self.mu1, 0.0],
            [-self.mu2 * m1 / (m1 + m2), -self.mu2 * m2 / (m1 + m2), self.mu2],
        ])

    def real_matrix(self, spatial_dim: int = 2) -> np.ndarray:
        """The projection on the flattened layout, ``(2d) x (3d)``."""
        return np.kron(self.matrix(), np.eye(spatial_dim))


@dataclass(frozen=True)
class ReducedConfig:
    v: np.ndarray
    w: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([np.atleast_1d(self.v), np.atleast_1d(self.w)])


def jacobi_project(q, jm: JacobiMasses) -> ReducedConfig:
    """``v = mu1 (q1 - q2)``, ``w = mu2 (q3 - (m1 q1 + m2 q2)/(m1 + m2))``.

    ``q`` is a ``(3,)`` array of points on a line or a ``(3, d)`` array of points.
    """
    q = np.asarray(q, dtype=float)
    if q.shape[0] != 3:
        raise ValueError(f"need three particle positions, got shape {q.shape}")
    vw = np.tensordot(jm.matrix(), q, axes=(1, 0))
    return ReducedConfig(vw[0], vw[1])


def project_flat(x, jm: JacobiMasses, spatial_dim: int = 2) -> np.ndarray:
    """:func:`jacobi_project` on flattened ``R^{3d}`` vectors (rows or a single vector)."""
    return np.asarray(x, dtype=float) @ jm.real_matrix(spatial_dim).T


def reduced_delta(pair: PairIndex, jm: JacobiMasses, spatial_dim: int = 2) -> Subspace:
    """Image of ``Δ_pair`` under the Jacobi projection (a Euclidean subspace)."""
    if pair not in REDUCED_PAIRS:
        raise ValueError(f"three-body pairs are (12), (23), (13); got {pair}")
    sys = BilliardSystem(3, spatial_dim, jm.masses)
    delta = build_delta(sys, pair)
    image = project_flat(delta.basis.T, jm, spatial_dim)
    return orthonormalize(image, Metric.euclidean())


@dataclass(frozen=True)
class ImageReport:
    pair_a: PairIndex
    pair_b: PairIndex
    upstairs: tuple[float, ...]
    downstairs: tuple[float, ...]
    image_residuals: tuple[float, ...]
    image_norm_errors: tuple[float, ...]
    zero_image_norms: tuple[float, ...]
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        return (
            max(self.image_residuals, default=0.0) < self.tolerance
            and max(self.image_norm_errors, default=0.0) < self.tolerance
            and max(self.zero_image_norms, default=0.0) < self.tolerance
        )

    def to_dict(self) -> dict:
        return {
            "pairs": [self.pair_a.label, self.pair_b.label],
            "upstairs": list(self.upstairs),
            "downstairs": list(self.downstairs),
            "image_residuals": list(self.image_residuals),
            "image_norm_errors": list(self.image_norm_errors),
            "zero_image_norms": list(self.zero_image_norms),
            "passed": self.passed,
        }


def verify_principal_vector_image(pair_a: PairIndex, pair_b: PairIndex, jm: JacobiMasses) -> ImageReport:
    """Push upstairs principal vectors through the projection and look for them downstairs.

    Each image of a nonzero-angle principal vector must be a unit vector in the
    span of the downstairs principal vectors carrying the same angle; the
    zero-angle (translation) principal vectors must map to the origin.
    """
    if pair_a == pair_b:
        raise ValueError("pairs must differ")
    sys = BilliardSystem(3, 2, jm.masses)
    up = principal_angles(build_delta(sys, pair_a), build_delta(sys, pair_b))
    down = principal_angles(reduced_delta(pair_a, jm), reduced_delta(pair_b, jm))
    zero = get_policy().zero_angle
    J = jm.real_matrix(2)
    residuals, norm_errs, zero_norms = [], [], []
    for k, theta in enumerate(up.angles):
        u, v = up.left[:, k], up.right[:, k]
        if theta < zero:
            zero_norms += [float(np.linalg.norm(J @ u)), float(np.linalg.norm(J @ v))]
            continue
        match = np.abs(down.angles - theta) < 1e-8
        for vec, side in ((J @ u, down.left), (J @ v, down.right)):
            norm_errs.append(abs(float(np.linalg.norm(vec)) - 1.0))
            if not np.any(match):
                residuals.append(math.inf)
                continue
            span = side[:, match]
            residuals.append(float(np.linalg.norm(vec - span @ (span.T @ vec))))
    return ImageReport(
        pair_a, pair_b, tuple(up.tolist()), tuple(down.tolist()),
        tuple(residuals), tuple(norm_errs), tuple(zero_norms),
    )


def vector_angle(a, b) -> float:
    """Unoriented angle ``arccos |<a, b>| / (|a||b|)`` in ``[0, pi/2]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = abs(float(a @ b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return math.acos(min(1.0, c))


def min_vector_angle(
    pair_a: PairIndex,
    pair_b: PairIndex,
    jm: JacobiMasses,
    trials: int,
    seed: int = 0,
) -> tuple[float, float]:
    """Smallest and largest unoriented angle between random vectors of two reduced walls."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if pair_a == pair_b:
        raise ValueError("pairs must differ")
    A, B = reduced_delta(pair_a, jm), reduced_delta(pair_b, jm)
    rng = np.random.Generator(np.random.Philox(seed))
    va = rng.standard_normal((trials, A.dim)) @ A.basis.T
    vb = rng.standard_normal((trials, B.dim)) @ B.basis.T
    cos = np.abs(np.einsum("ij,ij->i", va, vb))
    cos /= np.linalg.norm(va, axis=1) * np.linalg.norm(vb, axis=1)
    angles = np.arccos(np.clip(cos, 0.0, 1.0))
    return float(angles.min()), float(angles.max())


def reduced_angle(pair_a: PairIndex, pair_b: PairIndex, jm: JacobiMasses) -> np.ndarray:
    return principal_angles(reduced_delta(pair_a, jm), reduced_delta(pair_b, jm)).angles
