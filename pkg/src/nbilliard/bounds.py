"""Collision-bound formulas and line-crossing checks against them."""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .collisions import closed_form_angle, closed_form_cosine, mass_metric_angle
from .linalg import MassVector


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict[str, Any]
    predicted: float
    empirical_max: int | None = None
    applicable: bool | None = None
    overflow: bool = False
    witness: int | None = None
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def consistent(self) -> bool:
        return self.empirical_max is None or self.empirical_max <= self.predicted

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "inputs": self.inputs,
            "predicted": None if self.overflow else self.predicted,
            "empirical_max": self.empirical_max,
            "consistent": self.consistent,
        }
        if self.applicable is not None:
            out["applicable"] = self.applicable
        if self.overflow:
            out["overflow"] = True
        if self.witness is not None:
            out["witness"] = self.witness
        out.update(self.notes)
        return out


def wedge_bound(alpha: float) -> int:
    """``ceil(pi / alpha)``: most collisions of a straight-line billiard in a wedge of angle ``alpha``."""
    if not (alpha > 0):
        raise ValueError(f"wedge angle must be positive, got {alpha}")
    if alpha > math.pi:
        raise ValueError(f"wedge angle must be at most pi, got {alpha}")
    ratio = math.pi / alpha
    nearest = round(ratio)
    if abs(ratio - nearest) < 1e-12 * max(1.0, ratio):
        return int(nearest)
    return math.ceil(ratio)


def three_mass_bound(mi: float, mj: float, mk: float) -> int:
    """Published three-body bound: ``wedge_bound(closed_form_angle(mi, mj, mk))``."""
    return wedge_bound(closed_form_angle(mi, mj, mk))


def exact_three_mass_bound(mi: float, mj: float, mk: float) -> int:
    """Wedge bound for the true mass-metric angle between ``Δ_ij`` and ``Δ_jk``."""
    return wedge_bound(mass_metric_angle(mi, mj, mk))


def _middle_orders(masses) -> list[tuple[float, float, float]]:
    m1, m2, m3 = (float(x) for x in masses)
    return [(m2, m1, m3), (m1, m2, m3), (m1, m3, m2)]


def three_body_bound(masses, formula: str = "paper") -> int:
    """Largest wedge bound over the three choices of shared (middle) particle."""
    if len(masses) != 3:
        raise ValueError("three masses required")
    f = three_mass_bound if formula == "paper" else exact_three_mass_bound
    return max(f(*o) for o in _middle_orders(masses))


# -- mass-ratio grid ---------------------------------------------------------

@dataclass(frozen=True)
class MassRatioGrid:
    alphas: np.ndarray
    betas: np.ndarray
    step: float
    cells: np.ndarray      # bound[a_index, b_index]
    flags: np.ndarray      # angle >= pi/2

    def cell(self, alpha: float, beta: float) -> int:
        i = int(np.argmin(np.abs(self.alphas - alpha)))
        j = int(np.argmin(np.abs(self.betas - beta)))
        return int(self.cells[i, j])

    def rows(self):
        """``(alpha, beta, bound, flag)`` sorted by alpha then beta."""
        for i, a in enumerate(self.alphas):
            for j, b in enumerate(self.betas):
                yield float(a), float(b), int(self.cells[i, j]), int(self.flags[i, j])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "beta", "bound", "flag"])
        for a, b, bound, flag in self.rows():
            w.writerow([f"{a:.6f}", f"{b:.6f}", bound, flag])
        return buf.getvalue()


def _axis(hi: float, step: float) -> np.ndarray:
    count = int(math.floor(hi / step + 1e-9))
    return np.array([round(k * step, 12) for k in range(1, count + 1)])


def _grid_row(alpha: float, betas: np.ndarray):
    bounds, flags = [], []
    for b in betas:
        bounds.append(three_mass_bound(alpha, 1.0, b))
        flags.append(closed_form_cosine(alpha, 1.0, b) <= 0.0)
    return bounds, flags


def mass_ratio_grid(alpha_hi: float = 10.0, beta_hi: float = 10.0, step: float = 0.05, workers: int = 1) -> MassRatioGrid:
    """Evaluate ``three_mass_bound(alpha, 1, beta)`` on ``(0, alpha_hi] x (0, beta_hi]``.

    Rows may be computed in parallel; they are assembled in alpha order so the
    result does not depend on ``workers``.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    alphas, betas = _axis(alpha_hi, step), _axis(beta_hi, step)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_grid_row, alphas, itertools.repeat(betas)))
    else:
        rows = [_grid_row(a, betas) for a in alphas]
    cells = np.array([r[0] for r in rows], dtype=int).reshape(len(alphas), len(betas))
    flags = np.array([r[1] for r in rows], dtype=bool).reshape(len(alphas), len(betas))
    return MassRatioGrid(alphas, betas, step, cells, flags)


# -- lines against coordinate subspaces --------------------------------------

def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _random_basis(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def count_hyperplane_crossings(a: np.ndarray, u: np.ndarray, normals: np.ndarray, ray: bool = False, tol: float = 1e-9) -> np.ndarray:
    """Crossings of lines ``a + t u`` with hyperplanes ``normal^⊥``, by sign changes.

    ``a``, ``u`` are ``(T, n)``; ``normals`` is ``(H, n)``.  A full line crosses a
    hyperplane iff the linear form changes sign between ``t -> -inf`` and
    ``t -> +inf``; a ray (``t >= 0``) iff the sign at ``t = 0`` differs from the
    sign at ``+inf``.  Lines through a pairwise intersection or lying in a
    hyperplane return ``-1``.
    """
    f0 = a @ normals.T
    slope = u @ normals.T
    moving = np.abs(slope) > tol
    if ray:
        crossed = moving & (np.sign(f0) != np.sign(slope)) & (np.abs(f0) > tol)
    else:
        crossed = moving
    counts = crossed.sum(axis=1)
    # crossing times must be distinct, otherwise the line meets an intersection
    with np.errstate(divide="ignore", invalid="ignore"):
        times = np.where(crossed, -f0 / np.where(moving, slope, 1.0), np.nan)
    bad = np.zeros(len(a), dtype=bool)
    H = normals.shape[0]
    for p, q in itertools.combinations(range(H), 2):
        both = crossed[:, p] & crossed[:, q]
        bad |= both & (np.abs(times[:, p] - times[:, q]) < tol)
    bad |= (~moving & (np.abs(f0) <= tol)).any(axis=1)
    return np.where(bad, -1, counts)


def hyperplane_line_bound(N: int, trials: int = 10_000, seed: int = 0) -> BoundReport:
    """``N`` mutually orthogonal hyperplanes of ``R^N`` meet a line at most ``N`` times."""
    if N < 1:
        raise ValueError("N must be >= 1")
    rng = _rng(seed)
    B = _random_basis(N, rng)
    normals = B.T
    a = rng.standard_normal((trials, N))
    u = rng.standard_normal((trials, N))
    lines = count_hyperplane_crossings(a, u, normals)
    rays = count_hyperplane_crossings(a, u, normals, ray=True)
    valid = np.concatenate([lines[lines >= 0], rays[rays >= 0]])
    # witness: positive coordinates, direction with every coefficient negative
    coords = np.arange(1, N + 1, dtype=float)
    wa = (B @ coords)[None, :]
    wu = (B @ -np.ones(N))[None, :]
    witness = int(count_hyperplane_crossings(wa, wu, normals, ray=True)[0])
    return BoundReport(
        "hyperplane_line", {"N": N, "trials": trials, "seed": seed}, N,
        int(valid.max()) if valid.size else None, witness=witness,
        notes={"rejected": int((lines < 0).sum() + (rays < 0).sum())},
    )


def count_codim_events(c0, slope, d: int, tol: float = 1e-9):
    """Events where exactly ``d`` coordinates of ``c0 + t slope`` vanish together.

    ``c0`` and ``slope`` are ``(N,)`` or ``(T, N)``.  The result is ``-1`` for
    lines that meet an intersection of the subspaces (more than ``d``
    coordinates vanish at once) or lie inside one of them.
    """
    single = np.ndim(c0) == 1
    c0 = np.atleast_2d(np.asarray(c0, dtype=float))
    slope = np.atleast_2d(np.asarray(slope, dtype=float))
    moving = np.abs(slope) > tol
    stuck = (np.abs(c0) <= tol) & ~moving
    n_stuck = stuck.sum(axis=1)
    bad = n_stuck >= d
    with np.errstate(divide="ignore", invalid="ignore"):
        times = np.where(moving, -c0 / np.where(moving, slope, 1.0), np.inf)
    times = np.sort(times, axis=1)
    T, N = times.shape
    events = np.zeros(T, dtype=int)
    run = np.zeros(T, dtype=int)
    for col in range(N):
        t = times[:, col]
        finite = np.isfinite(t)
        if col == 0:
            same = np.zeros(T, dtype=bool)
        else:
            with np.errstate(invalid="ignore"):
                same = finite & (np.abs(t - times[:, col - 1]) <= tol)
        # close the previous run where a new one starts
        closing = ~same & (run > 0)
        zeros = n_stuck + run
        bad |= closing & (zeros > d)
        events += closing & (zeros == d)
        run = np.where(same, run + 1, np.where(finite, 1, 0))
    zeros = n_stuck + run
    bad |= (run > 0) & (zeros > d)
    events += (run > 0) & (zeros == d)
    out = np.where(bad, -1, events)
    return int(out[0]) if single else out


def _codim_samples(N: int, d: int, trials: int, rng: np.random.Generator):
    z = rng.integers(0, d, size=trials)
    rank = np.argsort(rng.random((trials, N)), axis=1).argsort(axis=1)
    group = np.maximum(rank - z[:, None], 0) // (d - z)[:, None]
    structured = rng.standard_normal((trials, N))
    t0 = np.take_along_axis(structured, group, axis=1)
    pooled = rng.random(trials) >= 0.75
    pool_size = rng.integers(1, N + 1, size=trials)
    pick = (rng.random((trials, N)) * pool_size[:, None]).astype(int)
    t0 = np.where(pooled[:, None], np.take_along_axis(structured, pick, axis=1), t0)
    slope = rng.choice([-1.0, 1.0], size=(trials, N)) * rng.uniform(0.5, 2.0, size=(trials, N))
    c0 = -t0 * slope
    held = rank < z[:, None]
    c0[held] = 0.0
    slope[held] = 0.0
    return c0, slope


def codim_line_bound(N: int, d: int, trials: int = 10_000, seed: int = 0) -> BoundReport:
    """A line meets at most ``N - d + 1`` of the coordinate subspaces of codimension ``d``.

    Sampled lines are drawn to make simultaneous vanishing likely: a random
    number ``z < d`` of coordinates is held at zero and the others are split
    into groups of ``d - z`` sharing a vanishing time (or, for a quarter of the
    lines, draw their times from a small pool).  Lines are built in a random
    orthonormal frame and the coordinates are read back from it.
    """
    if not 1 <= d < N:
        raise ValueError(f"need 1 <= d < N, got N={N}, d={d}")
    rng = _rng(seed)
    B = _random_basis(N, rng)
    c0, slope = _codim_samples(N, d, trials, rng)
    x0, dx = c0 @ B.T, slope @ B.T
    counts = count_codim_events(x0 @ B, dx @ B, d)
    valid = counts[counts >= 0]
    a = np.zeros(N)
    a[d - 1:] = np.arange(1, N - d + 2, dtype=float)
    u = np.zeros(N)
    u[d - 1:] = 1.0
    # the line a - t u, built in the rotated frame
    witness = count_codim_events((B @ a) @ B, (B @ -u) @ B, d)
    return BoundReport(
        "codim_line", {"N": N, "d": d, "trials": trials, "seed": seed}, N - d + 1,
        int(valid.max()) if valid.size else None, witness=witness,
        notes={"rejected": int((counts < 0).sum())},
    )


# -- hard rods ---------------------------------------------------------------

def _interior_condition(m: np.ndarray, cond) -> bool:
    return all(cond(m[i - 1], m[i], m[i + 1]) for i in range(1, len(m) - 1))


def hard_rod_bounds(N: int, masses) -> list[BoundReport]:
    """Known collision bounds for ``N`` hard rods on a line, with applicability."""
    if N < 2:
        raise ValueError("need at least two rods")
    masses = masses if isinstance(masses, MassVector) else MassVector(tuple(masses))
    if len(masses) != N:
        raise ValueError(f"expected {N} masses")
    m = masses.as_array()
    binom = math.comb(N, 2)
    inputs = {"N": N, "masses": list(masses)}
    equal = bool(np.all(m == m[0]))
    geo = _interior_condition(m, lambda a, b, c: b >= math.sqrt(a * c))
    arith = _interior_condition(m, lambda a, b, c: b >= (a + c) / 2)
    reports = [
        BoundReport("binomial_equal_masses", inputs, binom, applicable=equal),
        BoundReport("binomial_geometric_mean", inputs, binom, applicable=geo),
        BoundReport("binomial_arithmetic_mean", inputs, binom, applicable=arith),
    ]
    ratio = float(m.max() / m.min())
    try:
        value = 2.0 * (8.0 * N * N * (N - 2) * ratio) ** (N - 2)
        overflow = not math.isfinite(value)
    except OverflowError:
        value, overflow = math.inf, True
    reports.append(BoundReport("galperin", inputs, value if not overflow else math.inf, applicable=True, overflow=overflow))
    return reports
