"""Dense linear algebra under the Euclidean or the mass metric.

A mass metric on ``R^N (x) R^m`` weights coordinate ``(k, a)`` (particle ``k``,
spatial axis ``a``, flattened as ``k*m + a``) by ``m_k``.  Every computation is
done by rescaling coordinates by ``sqrt(m_k)`` into Euclidean coordinates,
running Euclidean linear algebra there and mapping the result back, so there
is a single SVD path for both metrics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .policy import get_policy

__all__ = [
    "MassVector",
    "Metric",
    "Subspace",
    "AngleVector",
    "DualityReport",
    "metric_inner",
    "metric_norm",
    "orthonormalize",
    "principal_angles",
    "principal_angles_oracle",
    "subspace_intersection",
    "orthogonal_complement",
    "check_angle_duality",
    "subspace_with_angles",
]


@dataclass(frozen=True)
class MassVector:
    """Positive particle masses ``m_1 .. m_N``."""

    masses: tuple[float, ...]

    def __post_init__(self):
        masses = tuple(float(m) for m in self.masses)
        if len(masses) < 1:
            raise ValueError("a mass vector needs at least one entry")
        if not all(math.isfinite(m) and m > 0 for m in masses):
            raise ValueError(f"masses must be finite and strictly positive, got {masses}")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def unit(cls, n: int) -> "MassVector":
        return cls((1.0,) * n)

    def __len__(self) -> int:
        return len(self.masses)

    def __getitem__(self, i):
        return self.masses[i]

    def __iter__(self):
        return iter(self.masses)

    def as_array(self) -> np.ndarray:
        return np.array(self.masses, dtype=float)


@dataclass(frozen=True)
class Metric:
    """Either the Euclidean inner product or ``mass (x) identity`` on ``R^N (x) R^m``."""

    kind: str = "euclidean"
    masses: MassVector | None = None
    spatial_dim: int = 1

    def __post_init__(self):
        if self.kind not in ("euclidean", "mass"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "mass":
            if self.masses is None:
                raise ValueError("mass metric requires a MassVector")
            if not isinstance(self.masses, MassVector):
                object.__setattr__(self, "masses", MassVector(tuple(self.masses)))
            if self.spatial_dim < 1:
                raise ValueError("spatial dimension must be >= 1")

    @classmethod
    def euclidean(cls) -> "Metric":
        return cls("euclidean")

    @classmethod
    def mass(cls, masses, spatial_dim: int = 1) -> "Metric":
        if not isinstance(masses, MassVector):
            masses = MassVector(tuple(masses))
        return cls("mass", masses, spatial_dim)

    def weights(self, ambient_dim: int) -> np.ndarray:
        """Per-coordinate weights; raises if ``ambient_dim`` does not fit the metric."""
        if self.kind == "euclidean":
            return np.ones(ambient_dim)
        expected = len(self.masses) * self.spatial_dim
        if ambient_dim != expected:
            raise ValueError(
                f"mass metric on R^{len(self.masses)} (x) R^{self.spatial_dim} "
                f"needs ambient dimension {expected}, got {ambient_dim}"
            )
        return np.repeat(self.masses.as_array(), self.spatial_dim)


def _as_vector(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {u.shape}")
    return u


def metric_inner(u, v, metric: Metric | None = None) -> float:
    """``<u, v>`` under ``metric`` (Euclidean when omitted)."""
    u = _as_vector(u)
    v = _as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    metric = metric or Metric.euclidean()
    w = metric.weights(u.shape[0])
    return float(np.sum(w * u * v))


def metric_norm(u, metric: Metric | None = None) -> float:
    return math.sqrt(max(metric_inner(u, u, metric), 0.0))


def _mgs(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Columns whose residual norm falls below ``rank_cut * max input norm`` are
    dropped, so the output rank equals the numerical rank of the input.
    """
    n, k = columns.shape
    if k == 0:
        return np.zeros((n, 0))
    scale = float(np.max(np.linalg.norm(columns, axis=0)))
    if scale == 0.0:
        return np.zeros((n, 0))
    cut = get_policy().rank_cut * scale
    basis: list[np.ndarray] = []
    for j in range(k):
        v = columns[:, j].astype(float, copy=True)
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nv = float(np.linalg.norm(v))
        if nv > cut:
            basis.append(v / nv)
    if not basis:
        return np.zeros((n, 0))
    return np.column_stack(basis)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace given by a metric-orthonormal basis (columns of ``basis``)."""

    basis: np.ndarray
    metric: Metric = field(default_factory=Metric.euclidean)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis.reshape(-1, 1)
        if basis.ndim != 2 or basis.shape[0] < 1:
            raise ValueError(f"basis must be an (ambient_dim, dim) array, got shape {basis.shape}")
        if basis.shape[1] > basis.shape[0]:
            raise ValueError("more basis vectors than the ambient dimension")
        w = self.metric.weights(basis.shape[0])
        gram = basis.T @ (w[:, None] * basis)
        err = np.max(np.abs(gram - np.eye(basis.shape[1])), initial=0.0)
        if err > get_policy().orthonormal:
            raise ValueError(f"basis is not orthonormal under the metric (error {err:.3g})")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, metric={self.metric.kind})"

    @classmethod
    def span(cls, vectors, metric: Metric | None = None) -> "Subspace":
        return orthonormalize(vectors, metric or Metric.euclidean())

    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.metric.weights(self.ambient_dim))

    def euclidean_basis(self) -> np.ndarray:
        """The basis expressed in rescaled (Euclidean) coordinates."""
        return self.basis * self.sqrt_weights()[:, None]

    def project(self, v) -> np.ndarray:
        """Metric-orthogonal projection of ``v`` onto the subspace."""
        v = _as_vector(v)
        w = self.metric.weights(self.ambient_dim)
        return self.basis @ (self.basis.T @ (w * v))

    def distance(self, v) -> float:
        v = _as_vector(v)
        return metric_norm(v - self.project(v), self.metric)

    def contains(self, v, tol: float = 1e-8) -> bool:
        return self.distance(v) <= tol * max(1.0, metric_norm(v, self.metric))


def orthonormalize(vectors: Iterable | np.ndarray, metric: Metric | None = None) -> Subspace:
    """Metric-orthonormal basis for the span of ``vectors`` (rank revealing).

    Parameters
    ----------
    vectors : sequence of 1-d arrays
        Spanning set; every vector must have the same length.
    metric : Metric, optional
        Defaults to the Euclidean metric.
    """
    metric = metric or Metric.euclidean()
    rows = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors, dtype=float)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("need a nonempty list of equal-length vectors")
    n = rows.shape[1]
    s = np.sqrt(metric.weights(n))
    q = _mgs((rows * s).T)
    return Subspace(q / s[:, None], metric)


@dataclass(frozen=True, eq=False)
class AngleVector:
    """Principal angles in nondecreasing order with their principal vectors.

    ``left[:, k]`` lies in the first subspace, ``right[:, k]`` in the second and
    the two realize ``angles[k]``.
    """

    angles: np.ndarray
    left: np.ndarray | None = None
    right: np.ndarray | None = None

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float).reshape(-1)
        if angles.size and (np.any(np.diff(angles) < 0) or angles[0] < 0 or angles[-1] > math.pi / 2):
            raise ValueError("angles must be sorted and within [0, pi/2]")
        object.__setattr__(self, "angles", angles)

    def __len__(self) -> int:
        return self.angles.size

    def __iter__(self):
        return iter(self.angles)

    def __getitem__(self, k):
        return self.angles[k]

    @property
    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        if self.left is None:
            return []
        return [(self.left[:, k], self.right[:, k]) for k in range(len(self))]

    def tolist(self) -> list[float]:
        return [float(a) for a in self.angles]


def _check_pair(F: Subspace, G: Subspace) -> None:
    if F.ambient_dim != G.ambient_dim:
        raise ValueError(f"ambient dimensions differ: {F.ambient_dim} vs {G.ambient_dim}")
    if F.metric != G.metric:
        raise ValueError("subspaces carry different metrics")


def _empty_angles(n: int) -> AngleVector:
    return AngleVector(np.zeros(0), np.zeros((n, 0)), np.zeros((n, 0)))


def principal_angles(F: Subspace, G: Subspace) -> AngleVector:
    """Principal angles via the SVD of the cross-Gram matrix of orthonormal bases.

    Cosines come from the singular values (clamped to ``[0, 1]``).  Angles whose
    cosine exceeds ``1/sqrt(2)`` are recomputed from the chord length
    ``||u_k - v_k||`` of the principal pair, since ``arccos`` loses half the
    digits near 0 and a zero angle would otherwise come out near ``1e-8``.
    """
    _check_pair(F, G)
    n = F.ambient_dim
    if F.dim == 0 or G.dim == 0:
        return _empty_angles(n)
    s_w = F.sqrt_weights()
    qf = F.euclidean_basis()
    qg = G.euclidean_basis()
    u, s, vt = np.linalg.svd(qf.T @ qg, full_matrices=False)
    q = min(F.dim, G.dim)
    s = s[:q]
    left = qf @ u[:, :q]
    right = qg @ vt[:q].T
    s = np.clip(s, 0.0, 1.0)
    angles = np.arccos(s)
    chord = np.linalg.norm(left - right, axis=0)
    small = s > math.sqrt(0.5)
    angles[small] = 2.0 * np.arcsin(np.clip(chord[small] / 2.0, 0.0, 1.0))
    angles = np.clip(angles, 0.0, math.pi / 2)
    order = np.argsort(angles, kind="stable")
    return AngleVector(angles[order], left[:, order] / s_w[:, None], right[:, order] / s_w[:, None])


# -- brute-force oracle -------------------------------------------------------

def _sphere_points(k: int, params: np.ndarray) -> np.ndarray:
    """Unit vectors in R^k from ``k-1`` angular parameters (rows of ``params``)."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        a = params[:, 0]
        return np.column_stack([np.cos(a), np.sin(a)])
    th, ph = params[:, 0], params[:, 1]
    return np.column_stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def _grid(k: int, center: np.ndarray | None, half: float, count: int) -> np.ndarray:
    if k == 1:
        return np.zeros((2, 0))
    if center is None:
        axes = [np.linspace(0.0, 2 * math.pi, count, endpoint=False)]
        if k == 3:
            axes = [np.linspace(0.0, math.pi, count), axes[0]]
    else:
        axes = [np.linspace(c - half, c + half, count) for c in center]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _oracle_top_pair(fe: np.ndarray, ge: np.ndarray, resolution: int):
    """Maximize <F c, G d> over unit c, d by coarse-to-fine grid search.

    The objective is bilinear on a product of spheres, whose only local maximum
    is the global one, so greedy refinement around the incumbent is safe.
    """
    kf, kg = fe.shape[1], ge.shape[1]
    target = 2 * math.pi / resolution
    coarse = 24
    pf, pg = _grid(kf, None, 0, coarse), _grid(kg, None, 0, coarse)
    spacing = 2 * math.pi / coarse
    best = None
    while True:
        uf = fe @ _sphere_points(kf, pf).T
        vg = ge @ _sphere_points(kg, pg).T
        inner = uf.T @ vg
        i, j = np.unravel_index(int(np.argmax(inner)), inner.shape)
        best = (float(inner[i, j]), uf[:, i], vg[:, j])
        if spacing <= target:
            break
        ci = pf[i] if pf.shape[1] else None
        cj = pg[j] if pg.shape[1] else None
        half = 2 * spacing
        count = 9
        spacing = 2 * half / (count - 1)
        if ci is not None:
            pf = _grid(kf, ci, half, count)
        if cj is not None:
            pg = _grid(kg, cj, half, count)
        if ci is None and cj is None:
            break
    return best


def principal_angles_oracle(F: Subspace, G: Subspace, resolution: int = 10_000) -> AngleVector:
    """Principal angles by direct maximization of ``<u, v>`` over unit spheres.

    Follows the variational definition: find the most aligned unit pair, deflate
    both subspaces onto the orthogonal complements of the pair found, repeat.
    Only for subspaces of dimension <= 3.  Agrees with :func:`principal_angles`
    to within ``2*pi/resolution`` per angle.
    """
    _check_pair(F, G)
    if F.dim > 3 or G.dim > 3:
        raise ValueError("the brute-force oracle only handles subspaces of dimension <= 3")
    if resolution < 1:
        raise ValueError("resolution must be positive")
    n = F.ambient_dim
    if F.dim == 0 or G.dim == 0:
        return _empty_angles(n)
    s_w = F.sqrt_weights()
    fe, ge = F.euclidean_basis(), G.euclidean_basis()
    angles, lefts, rights = [], [], []
    for _ in range(min(F.dim, G.dim)):
        cos, u, v = _oracle_top_pair(fe, ge, resolution)
        angles.append(math.acos(min(max(cos, 0.0), 1.0)))
        lefts.append(u)
        rights.append(v)
        fe = _deflate(fe, u)
        ge = _deflate(ge, v)
    order = np.argsort(angles, kind="stable")
    left = np.column_stack(lefts)[:, order] / s_w[:, None]
    right = np.column_stack(rights)[:, order] / s_w[:, None]
    return AngleVector(np.array(angles)[order], left, right)


def _deflate(basis: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``span(basis) ∩ u^⊥`` (Euclidean coordinates)."""
    c = basis.T @ u
    k = basis.shape[1]
    q = _mgs(np.column_stack([c, np.eye(k)]))
    return basis @ q[:, 1:k]


# -- derived subspaces -------------------------------------------------------

def subspace_intersection(F: Subspace, G: Subspace) -> Subspace:
    """``F ∩ G`` as the span of the principal vectors with (numerically) zero angle."""
    pa = principal_angles(F, G)
    keep = pa.angles < get_policy().zero_angle
    if pa.left is None or not np.any(keep):
        return Subspace(np.zeros((F.ambient_dim, 0)), F.metric)
    return Subspace(pa.left[:, keep], F.metric)


def orthogonal_complement(F: Subspace) -> Subspace:
    """Metric-orthogonal complement of ``F`` in its ambient space."""
    n = F.ambient_dim
    s_w = F.sqrt_weights()
    q = _mgs(np.hstack([F.euclidean_basis(), np.eye(n)]))
    comp = q[:, F.dim:]
    return Subspace(comp / s_w[:, None], F.metric)


def subspace_with_angles(n: int, p: int, angles: Sequence[float]) -> tuple[Subspace, Subspace]:
    """Two subspaces of ``R^n`` with prescribed principal angles.

    ``L = span(e_1..e_p)`` and ``M`` is spanned by ``cos(t_k) e_k + sin(t_k) e_{p+j}``
    where ``j`` counts the nonzero angles so far.  Requires
    ``n >= p + #nonzero angles`` and ``len(angles) <= p``.
    """
    angles = list(angles)
    q = len(angles)
    nonzero = sum(1 for a in angles if a != 0.0)
    if q > p or p + nonzero > n:
        raise ValueError(f"no pair of subspaces of dims ({p}, {q}) in R^{n} has these angles")
    eye = np.eye(n)
    L = Subspace(eye[:, :p])
    cols, extra = [], p
    for k, a in enumerate(angles):
        if a == 0.0:
            cols.append(eye[:, k])
        else:
            cols.append(math.cos(a) * eye[:, k] + math.sin(a) * eye[:, extra])
            extra += 1
    return L, Subspace(np.column_stack(cols))


# -- duality lemma -----------------------------------------------------------

@dataclass(frozen=True)
class DualityReport:
    identities: tuple[tuple[str, tuple[float, ...], tuple[float, ...], float], ...]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(d < self.tolerance for *_, d in self.identities)

    @property
    def max_discrepancy(self) -> float:
        return max(d for *_, d in self.identities)

    def to_dict(self) -> dict:
        return {
            "identities": [
                {"name": name, "lhs": list(lhs), "rhs": list(rhs), "discrepancy": d}
                for name, lhs, rhs, d in self.identities
            ],
            "passed": self.passed,
        }


def _compare(lhs: np.ndarray, rhs: np.ndarray) -> float:
    if lhs.size != rhs.size:
        return math.inf
    if lhs.size == 0:
        return 0.0
    return float(np.max(np.abs(np.sort(lhs) - np.sort(rhs))))


def check_angle_duality(F: Subspace, G: Subspace, tol: float = 1e-8) -> DualityReport:
    """Evaluate both sides of the four complement identities for principal angles.

    With ``p = dim F``, ``q = dim G`` in ``R^n``:

    1. ``angles(F, G) == angles(G, F)``
    2. ``[0]*max(n-p-q, 0) + angles(F, G) == [0]*max(p+q-n, 0) + angles(F⊥, G⊥)``
    3. ``[0]*max(q-p, 0) + angles(F, G⊥) == [0]*max(p-q, 0) + angles(F⊥, G)``
    4. ``angles(F, G) + [pi/2]*max(p-q, 0) == [0]*max(p+q-n, 0) + (pi/2 - angles(F, G⊥))``
    """
    _check_pair(F, G)
    n, p, q = F.ambient_dim, F.dim, G.dim
    Fp, Gp = orthogonal_complement(F), orthogonal_complement(G)
    a_fg = principal_angles(F, G).angles
    a_gf = principal_angles(G, F).angles
    a_perp = principal_angles(Fp, Gp).angles
    a_f_gp = principal_angles(F, Gp).angles
    a_fp_g = principal_angles(Fp, G).angles

    def pad(value, count, vec, left=True):
        block = np.full(max(count, 0), value)
        return np.concatenate([block, vec] if left else [vec, block])

    rows = []
    rows.append(("symmetry", a_fg, a_gf))
    rows.append(("complements", pad(0.0, n - p - q, a_fg), pad(0.0, p + q - n, a_perp)))
    rows.append(("mixed", pad(0.0, q - p, a_f_gp), pad(0.0, p - q, a_fp_g)))
    rows.append((
        "right_angle_shift",
        pad(math.pi / 2, p - q, a_fg, left=False),
        pad(0.0, p + q - n, math.pi / 2 - a_f_gp[::-1]),
    ))
    identities = tuple(
        (name, tuple(float(x) for x in lhs), tuple(float(x) for x in rhs), _compare(lhs, rhs))
        for name, lhs, rhs in rows
    )
    return DualityReport(identities, tol)
