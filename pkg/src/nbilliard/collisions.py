"""Binary collision subspaces of ``(R^m)^N`` under the mass metric.

Configurations are flattened particle-major: coordinate ``k*m + a`` is axis
``a`` of particle ``k`` (0-based internally, 1-based in :class:`PairIndex`).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    MassVector,
    Metric,
    Subspace,
    principal_angles,
    orthogonal_complement,
    subspace_intersection,
)
from .policy import get_policy


@dataclass(frozen=True)
class BilliardSystem:
    """``N`` point masses in ``R^m``; ``m`` is also the codimension ``d`` of each wall."""

    N: int
    m: int
    masses: MassVector

    def __post_init__(self):
        if not isinstance(self.masses, MassVector):
            object.__setattr__(self, "masses", MassVector(tuple(self.masses)))
        if self.N < 2:
            raise ValueError("need at least two particles")
        if self.m < 1:
            raise ValueError("spatial dimension must be >= 1")
        if len(self.masses) != self.N:
            raise ValueError(f"expected {self.N} masses, got {len(self.masses)}")

    @classmethod
    def equal_masses(cls, N: int, m: int) -> "BilliardSystem":
        return cls(N, m, MassVector.unit(N))

    @property
    def ambient_dim(self) -> int:
        return self.N * self.m

    @property
    def metric(self) -> Metric:
        return Metric.mass(self.masses, self.m)

    def pairs(self) -> list["PairIndex"]:
        return [PairIndex(i, j) for i, j in itertools.combinations(range(1, self.N + 1), 2)]


@dataclass(frozen=True, order=True)
class PairIndex:
    """Unordered particle pair, stored 1-based with ``i < j``."""

    i: int
    j: int

    def __post_init__(self):
        i, j = int(self.i), int(self.j)
        if i == j:
            raise ValueError(f"a collision pair needs two distinct particles, got ({i}, {j})")
        if min(i, j) < 1:
            raise ValueError("particle indices are 1-based")
        object.__setattr__(self, "i", min(i, j))
        object.__setattr__(self, "j", max(i, j))

    @classmethod
    def parse(cls, text: str) -> "PairIndex":
        """``"12"`` or ``"1,2"`` or ``"1-2"`` -> ``PairIndex(1, 2)``."""
        text = text.strip()
        for sep in (",", "-", ":"):
            if sep in text:
                a, b = text.split(sep)
                return cls(int(a), int(b))
        if len(text) == 2 and text.isdigit():
            return cls(int(text[0]), int(text[1]))
        raise ValueError(f"cannot parse pair label {text!r}")

    @property
    def label(self) -> str:
        if self.i < 10 and self.j < 10:
            return f"{self.i}{self.j}"
        return f"{self.i}-{self.j}"

    def __str__(self) -> str:
        return f"({self.label})"

    def shared(self, other: "PairIndex") -> int | None:
        common = {self.i, self.j} & {other.i, other.j}
        return common.pop() if len(common) == 1 else None


def _check_pair(sys: BilliardSystem, pair: PairIndex) -> None:
    if pair.j > sys.N:
        raise ValueError(f"pair {pair} out of range for N={sys.N}")


def _tensor(sys: BilliardSystem, particle_coeffs: np.ndarray, axis: int) -> np.ndarray:
    """``c (x) e_axis`` flattened; ``particle_coeffs`` has length N."""
    out = np.zeros(sys.ambient_dim)
    out[axis::sys.m] = particle_coeffs
    return out


def build_delta(sys: BilliardSystem, pair: PairIndex) -> Subspace:
    """The collision subspace ``{q : q_i = q_j}`` with its mass-orthonormal basis.

    Basis, for every spatial axis ``e_a``: ``E_k (x) e_a`` for ``k`` not in the
    pair, and ``(eps_i + eps_j)/sqrt(m_i + m_j) (x) e_a`` at the location of the
    smaller index.
    """
    _check_pair(sys, pair)
    m = sys.masses.as_array()
    i, j = pair.i - 1, pair.j - 1
    cols = []
    for k in range(sys.N):
        if k == j:
            continue
        c = np.zeros(sys.N)
        if k == i:
            c[i] = c[j] = 1.0 / math.sqrt(m[i] + m[j])
        else:
            c[k] = 1.0 / math.sqrt(m[k])
        for a in range(sys.m):
            cols.append(_tensor(sys, c, a))
    return Subspace(np.column_stack(cols), sys.metric)


def _positive(masses) -> tuple[float, float, float]:
    mi, mj, mk = (float(x) for x in masses)
    if min(mi, mj, mk) <= 0 or not all(map(math.isfinite, (mi, mj, mk))):
        raise ValueError(f"masses must be positive, got {(mi, mj, mk)}")
    return mi, mj, mk


def closed_form_cosine(mi: float, mj: float, mk: float) -> float:
    mi, mj, mk = _positive((mi, mj, mk))
    # evaluated so that swapping mi <-> mk gives bit-identical results
    f = lambda x, y: (x + mj) + 4.0 * y  # noqa: E731
    return (2.0 * (mi + mk) - mj) / math.sqrt(f(mi, mk) * f(mk, mi))


def closed_form_angle(mi: float, mj: float, mk: float) -> float:
    """Published closed form for the nonzero angle between ``Δ_ij`` and ``Δ_jk``.

    ``arccos((2(m_i+m_k) - m_j) / sqrt((m_i+m_j+4m_k)(4m_i+m_j+m_k)))``, with
    the shared particle's mass in the ``mj`` slot.  Exact for equal masses
    (``pi/3``); for unequal masses it does not match the SVD of the actual
    subspaces, see :func:`mass_metric_angle`.
    """
    c = closed_form_cosine(mi, mj, mk)
    return math.acos(min(1.0, max(-1.0, c)))


def mass_metric_angle(mi: float, mj: float, mk: float) -> float:
    """Nonzero principal angle between ``Δ_ij`` and ``Δ_jk`` under the mass metric.

    Inside ``span(eps_i, eps_j, eps_k)`` the directions of ``Δ_ij`` and ``Δ_jk``
    orthogonal to the triple-collision line are
    ``m_k(eps_i+eps_j) - (m_i+m_j) eps_k`` and ``m_i(eps_j+eps_k) - (m_j+m_k) eps_i``,
    giving ``cos = sqrt(m_i m_k / ((m_i+m_j)(m_j+m_k)))``.
    """
    mi, mj, mk = _positive((mi, mj, mk))
    c = math.sqrt((mi * mk) / ((mi + mj) * (mj + mk)))
    return math.acos(min(1.0, c))


def _pair_geometry(sys: BilliardSystem, a: PairIndex, b: PairIndex):
    """``(case, i, j, k[, l])`` with 1-based labels; ``j`` is shared in the shared case."""
    if a == b:
        raise ValueError("the two collision pairs must differ")
    _check_pair(sys, a)
    _check_pair(sys, b)
    s = a.shared(b)
    if s is None:
        return "disjoint", (a.i, a.j, b.i, b.j)
    i = a.i if a.j == s else a.j
    k = b.i if b.j == s else b.j
    return "shared", (i, s, k)


def theorem_angles(sys: BilliardSystem, a: PairIndex, b: PairIndex, formula: str = "paper") -> np.ndarray:
    """Angle vector predicted by the angle theorems: ``d(N-2)`` zeros then ``d`` copies."""
    case, idx = _pair_geometry(sys, a, b)
    d = sys.m
    if case == "disjoint":
        theta = math.pi / 2
    else:
        m = sys.masses
        masses = (m[idx[0] - 1], m[idx[1] - 1], m[idx[2] - 1])
        if formula == "paper":
            theta = closed_form_angle(*masses)
        elif formula == "exact":
            theta = mass_metric_angle(*masses)
        else:
            raise ValueError(f"unknown formula {formula!r}")
    return np.concatenate([np.zeros(d * (sys.N - 2)), np.full(d, theta)])


@dataclass(frozen=True)
class AngleTheoremReport:
    pair_a: PairIndex
    pair_b: PairIndex
    case: str
    formula: str
    expected: tuple[float, ...]
    computed: tuple[float, ...]
    zero_count: int
    expected_zero_count: int
    max_discrepancy: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_discrepancy < self.tolerance and self.zero_count == self.expected_zero_count

    def to_dict(self) -> dict:
        return {
            "pairs": [self.pair_a.label, self.pair_b.label],
            "case": self.case,
            "formula": self.formula,
            "expected": list(self.expected),
            "computed": list(self.computed),
            "zero_count": self.zero_count,
            "expected_zero_count": self.expected_zero_count,
            "max_discrepancy": self.max_discrepancy,
            "passed": self.passed,
        }


def verify_angle_theorem(
    sys: BilliardSystem,
    pair_a: PairIndex,
    pair_b: PairIndex,
    formula: str = "paper",
    tol: float = 1e-9,
    cache: dict | None = None,
) -> AngleTheoremReport:
    """Compare SVD principal angles of two collision subspaces with the theorem.

    ``formula="paper"`` uses :func:`closed_form_angle` for the shared-index
    case, ``formula="exact"`` uses :func:`mass_metric_angle`.  ``cache`` may map
    pairs to already built subspaces.
    """
    case, _ = _pair_geometry(sys, pair_a, pair_b)
    if cache is None:
        cache = {}
    for p in (pair_a, pair_b):
        if p not in cache:
            cache[p] = build_delta(sys, p)
    computed = principal_angles(cache[pair_a], cache[pair_b]).angles
    expected = theorem_angles(sys, pair_a, pair_b, formula)
    zeros = int(np.sum(computed < get_policy().zero_angle))
    disc = float(np.max(np.abs(computed - expected)))
    return AngleTheoremReport(
        pair_a, pair_b, case, formula,
        tuple(map(float, expected)), tuple(map(float, computed)),
        zeros, sys.m * (sys.N - 2), disc, tol,
    )


# -- complement decomposition -------------------------------------------------

def _explicit_spans(sys: BilliardSystem, a: PairIndex, b: PairIndex):
    """Hand-derived spanning directions of ``X = I⊥ ∩ Δ_a`` and ``Y = I⊥ ∩ Δ_b``.

    Returns (mass-generalized, literal) coefficient vectors over particles for
    X and Y.  The literal equal-mass directions are kept for reporting; they
    lie in the complement only when the relevant masses are equal.
    """
    case, idx = _pair_geometry(sys, a, b)
    m = sys.masses.as_array()
    e = np.eye(sys.N)
    if case == "disjoint":
        i, j, k, l = (x - 1 for x in idx)
        x = m[l] * e[k] - m[k] * e[l]
        y = m[j] * e[i] - m[i] * e[j]
        return case, (x, y), (x, y)
    i, j, k = (x - 1 for x in idx)
    # a = (i j), b = (j k) after relabelling; X ⊂ Δ_ij, Y ⊂ Δ_jk
    x = m[k] * (e[i] + e[j]) - (m[i] + m[j]) * e[k]
    y = m[i] * (e[j] + e[k]) - (m[j] + m[k]) * e[i]
    x_lit = e[i] + e[j] - 2 * e[k]
    y_lit = e[j] + e[k] - 2 * e[i]
    return case, (x, y), (x_lit, y_lit)


def _span_tensor(sys: BilliardSystem, coeffs: np.ndarray) -> Subspace:
    cols = [_tensor(sys, coeffs, a) for a in range(sys.m)]
    return Subspace.span(cols, sys.metric)


@dataclass(frozen=True)
class DecompositionReport:
    pair_a: PairIndex
    pair_b: PairIndex
    case: str
    dim_intersection: int
    dim_x: int
    dim_y: int
    x_vs_explicit: tuple[float, ...]
    y_vs_explicit: tuple[float, ...]
    x_vs_literal: tuple[float, ...]
    angles_xy: tuple[float, ...]
    theorem_angle: float
    exact_angle: float
    tolerance: float = 1e-8

    @property
    def spans_match(self) -> bool:
        d = len(self.angles_xy)
        return (
            self.dim_x == self.dim_y == d
            and len(self.x_vs_explicit) == d
            and max(self.x_vs_explicit + self.y_vs_explicit, default=0.0) < self.tolerance
        )

    @property
    def angle_matches(self) -> bool:
        return max(abs(a - self.theorem_angle) for a in self.angles_xy) < self.tolerance

    @property
    def passed(self) -> bool:
        return self.spans_match and self.angle_matches

    def to_dict(self) -> dict:
        return {
            "pairs": [self.pair_a.label, self.pair_b.label],
            "case": self.case,
            "dim_intersection": self.dim_intersection,
            "dim_x": self.dim_x,
            "dim_y": self.dim_y,
            "x_vs_explicit": list(self.x_vs_explicit),
            "y_vs_explicit": list(self.y_vs_explicit),
            "x_vs_literal": list(self.x_vs_literal),
            "angles_xy": list(self.angles_xy),
            "theorem_angle": self.theorem_angle,
            "exact_angle": self.exact_angle,
            "spans_match": self.spans_match,
            "angle_matches": self.angle_matches,
        }


def appendix_decomposition(sys: BilliardSystem, pair_a: PairIndex, pair_b: PairIndex) -> DecompositionReport:
    """Compute ``X = (Δ_a ∩ Δ_b)⊥ ∩ Δ_a`` and ``Y = (Δ_a ∩ Δ_b)⊥ ∩ Δ_b`` numerically.

    Both are compared with the hand-derived spanning vectors (principal angles
    against them should all vanish) and ``angles(X, Y)`` is compared with the
    theorem's nonzero angle.
    """
    da, db = build_delta(sys, pair_a), build_delta(sys, pair_b)
    inter = subspace_intersection(da, db)
    perp = orthogonal_complement(inter)
    X = subspace_intersection(perp, da)
    Y = subspace_intersection(perp, db)
    case, (x, y), (x_lit, _) = _explicit_spans(sys, pair_a, pair_b)
    ex, ey = _span_tensor(sys, x), _span_tensor(sys, y)
    theorem = theorem_angles(sys, pair_a, pair_b, "paper")[-1]
    exact = theorem_angles(sys, pair_a, pair_b, "exact")[-1]
    return DecompositionReport(
        pair_a, pair_b, case, inter.dim, X.dim, Y.dim,
        tuple(principal_angles(X, ex).tolist()),
        tuple(principal_angles(Y, ey).tolist()),
        tuple(principal_angles(X, _span_tensor(sys, x_lit)).tolist()),
        tuple(principal_angles(X, Y).tolist()),
        float(theorem), float(exact),
    )
