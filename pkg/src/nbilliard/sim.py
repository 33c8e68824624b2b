"""Straight-line motion with specular reflection off linear collision subspaces."""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .collisions import BilliardSystem, build_delta
from .jacobi import REDUCED_PAIRS, JacobiMasses, reduced_delta
from .linalg import Metric, Subspace, metric_inner, metric_norm, orthogonal_complement
from .policy import get_policy

FOCH = ("12", "23", "12", "13")


class DegenerateInputError(ValueError):
    """A velocity inside a wall, or a start point on one."""


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    pair: str
    point: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    start: np.ndarray
    velocity: np.ndarray
    events: tuple[CollisionEvent, ...]
    termination: str  # escaped | max_events | degenerate

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(e.pair for e in self.events)

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True, eq=False)
class SubspaceArrangement:
    walls: tuple[tuple[str, Subspace], ...]
    spatial_dim: int = 1

    def __post_init__(self):
        walls = tuple((str(label), s) for label, s in self.walls)
        if not walls:
            raise ValueError("an arrangement needs at least one wall")
        n, metric = walls[0][1].ambient_dim, walls[0][1].metric
        for label, s in walls:
            if s.ambient_dim != n or s.metric != metric:
                raise ValueError(f"wall {label} does not share the ambient space and metric")
        if len({label for label, _ in walls}) != len(walls):
            raise ValueError("wall labels must be distinct")
        object.__setattr__(self, "walls", walls)

    @property
    def ambient_dim(self) -> int:
        return self.walls[0][1].ambient_dim

    @property
    def metric(self) -> Metric:
        return self.walls[0][1].metric

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.walls)

    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.metric.weights(self.ambient_dim))

    def perp_bases(self) -> np.ndarray:
        """Orthonormal complements of the walls in rescaled coordinates, zero-padded to ``(W, n, c)``."""
        comps = [orthogonal_complement(s).euclidean_basis() for _, s in self.walls]
        c = max(b.shape[1] for b in comps)
        out = np.zeros((len(comps), self.ambient_dim, c))
        for w, b in enumerate(comps):
            out[w, :, : b.shape[1]] = b
        return out


def collision_arrangement(sys: BilliardSystem) -> SubspaceArrangement:
    """All binary collision subspaces of the full configuration space."""
    return SubspaceArrangement(tuple((p.label, build_delta(sys, p)) for p in sys.pairs()), sys.m)


def reduced_arrangement(jm: JacobiMasses | None = None, spatial_dim: int = 2) -> SubspaceArrangement:
    """The three translation-reduced collision subspaces of a three-body system."""
    jm = jm or JacobiMasses.unit()
    return SubspaceArrangement(tuple((p.label, reduced_delta(p, jm, spatial_dim)) for p in REDUCED_PAIRS), spatial_dim)


def wedge_arrangement(alpha: float) -> SubspaceArrangement:
    """Two lines through the origin of R^2 meeting at angle ``alpha``."""
    return SubspaceArrangement((
        ("a", Subspace(np.array([[1.0], [0.0]]))),
        ("b", Subspace(np.array([[math.cos(alpha)], [math.sin(alpha)]]))),
    ))


def _perp(v: np.ndarray, wall: Subspace) -> np.ndarray:
    return v - wall.project(v)


def reflect(v_minus, wall: Subspace) -> np.ndarray:
    """Keep the component along the wall and reverse the one orthogonal to it."""
    v = np.asarray(v_minus, dtype=float)
    inside = wall.project(v)
    if metric_norm(v - inside, wall.metric) <= get_policy().tangential * max(1.0, metric_norm(v, wall.metric)):
        raise DegenerateInputError("velocity lies in the wall; no transversal reflection exists")
    return 2.0 * inside - v


@dataclass(frozen=True)
class Hit:
    time: float
    label: str
    point: np.ndarray
    degenerate: bool = False
    on_walls: tuple[str, ...] = field(default_factory=tuple)


def next_collision(point, velocity, arr: SubspaceArrangement) -> Hit | None:
    """First wall met by the ray ``point + t velocity`` for ``t > min_advance``.

    A linear wall is met iff the wall-orthogonal parts ``a`` of the point and
    ``b`` of the velocity are antiparallel; the meeting time is then the
    least-squares solution ``-<a, b> / <b, b>``.  Distances are compared
    against ``on_wall * max(1, |x|)``.
    """
    pol = get_policy()
    x = np.asarray(point, dtype=float)
    v = np.asarray(velocity, dtype=float)
    metric = arr.metric
    scale = pol.on_wall * max(1.0, metric_norm(x, metric))
    best: tuple[float, str] | None = None
    for label, wall in arr.walls:
        a, b = _perp(x, wall), _perp(v, wall)
        bb = metric_inner(b, b, metric)
        # a wall the point already lies on was just left and cannot be met again
        if bb <= pol.tangential**2 or metric_norm(a, metric) <= scale:
            continue
        t = -metric_inner(a, b, metric) / bb
        if t <= pol.min_advance or metric_norm(a + t * b, metric) > scale:
            continue
        if best is None or t < best[0]:
            best = (t, label)
    if best is None:
        return None
    t, label = best
    y = x + t * v
    scale = pol.on_wall * max(1.0, metric_norm(y, metric))
    on = tuple(lab for lab, wall in arr.walls if wall.distance(y) <= scale)
    return Hit(t, label, y, len(on) >= 2, on)


def run_trajectory(start, velocity, arr: SubspaceArrangement, max_events: int = 10) -> Trajectory:
    pol = get_policy()
    x = np.asarray(start, dtype=float)
    v = np.asarray(velocity, dtype=float)
    for label, wall in arr.walls:
        if wall.distance(x) <= pol.on_wall:
            raise DegenerateInputError(f"start point lies on wall {label}")
    events: list[CollisionEvent] = []
    clock = 0.0
    termination = "escaped"
    walls = dict(arr.walls)
    while True:
        hit = next_collision(x, v, arr)
        if hit is None:
            break
        if len(events) >= max_events:
            termination = "max_events"
            break
        if hit.degenerate:
            termination = "degenerate"
            break
        v_plus = reflect(v, walls[hit.label])
        clock += hit.time
        if events and events[-1].pair == hit.label:
            raise AssertionError(f"wall {hit.label} hit twice in a row")
        events.append(CollisionEvent(clock, hit.label, hit.point, v, v_plus))
        x, v = hit.point, v_plus
    return Trajectory(np.asarray(start, dtype=float), np.asarray(velocity, dtype=float), tuple(events), termination)


# -- sampling ----------------------------------------------------------------

def _unit_rows(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    x = rng.standard_normal((rows, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _sample(arr: SubspaceArrangement, sampler: str, rows: int, rng: np.random.Generator):
    """Start points and velocities in rescaled coordinates, both of unit length.

    ``sphere`` draws both uniformly from the unit sphere.  ``collinear`` keeps
    every particle on one random line through the origin: ``s ⊗ e`` and
    ``u ⊗ e`` with ``e`` a unit spatial direction.
    """
    n = arr.ambient_dim
    if sampler == "sphere":
        return _unit_rows(rng, rows, n), _unit_rows(rng, rows, n)
    if sampler == "collinear":
        d = arr.spatial_dim
        e = _unit_rows(rng, rows, d)
        s = _unit_rows(rng, rows, n // d)
        u = _unit_rows(rng, rows, n // d)
        return np.einsum("ai,aj->aij", s, e).reshape(rows, n), np.einsum("ai,aj->aij", u, e).reshape(rows, n)
    raise ValueError(f"unknown sampler {sampler!r}")


def _off_wall_samples(arr, perps, sampler, rows, rng):
    tol = get_policy().on_wall
    x, v = _sample(arr, sampler, rows, rng)
    for _ in range(100):
        bad = (np.linalg.norm(np.einsum("an,wnc->awc", x, perps), axis=2) <= tol).any(axis=1)
        if not bad.any():
            return x, v
        x[bad], v[bad] = _sample(arr, sampler, int(bad.sum()), rng)
    raise RuntimeError("could not sample start points off the walls")


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


@dataclass(frozen=True)
class SearchResult:
    labels: tuple[str, ...]
    trials: int
    seed: int
    sampler: str
    max_events: int
    histogram: dict[int, int]
    max_count: int | None
    max_sequences: tuple[tuple[str, ...], ...]
    degenerate: int
    truncated: int
    foch: int

    @property
    def support(self) -> set[int]:
        return set(self.histogram)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "sampler": self.sampler,
            "max_events": self.max_events,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "max_count": self.max_count,
            "max_sequences": [list(s) for s in self.max_sequences],
            "degenerate": self.degenerate,
            "truncated": self.truncated,
            "foch_sequences": self.foch,
        }


def _contains(seq: tuple[str, ...], pattern: tuple[str, ...]) -> bool:
    k = len(pattern)
    return any(seq[i:i + k] == pattern for i in range(len(seq) - k + 1))


def _run_chunk(job):
    arr, perps, sampler, rows, seed, chunk, max_events, backend = job
    pol = get_policy()
    x, v = _off_wall_samples(arr, perps, sampler, rows, chunk_rng(seed, chunk))
    return kernels.simulate_batch(x, v, perps, max_events, pol.min_advance, pol.on_wall, pol.tangential, backend=backend)


def max_collision_search(
    arr: SubspaceArrangement,
    trials: int,
    seed: int,
    max_events: int = 10,
    sampler: str = "collinear",
    workers: int = 1,
    chunk_size: int = 10_000,
    backend: str | None = None,
) -> SearchResult:
    """Histogram of collision counts over seeded random trajectories.

    The default ``collinear`` sampler keeps all particles on a common line, the
    only setting in which a codimension-2 wall is met with positive
    probability; for one spatial dimension it is the uniform sphere sampler.
    Trials are cut into chunks, each with its own stream derived from
    ``(seed, chunk index)``, so the result does not depend on ``workers``.
    Degenerate runs are left out of the histogram and counted separately.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    perps = arr.perp_bases()
    jobs = []
    for chunk, start in enumerate(range(0, trials, chunk_size)):
        jobs.append((arr, perps, sampler, min(chunk_size, trials - start), seed, chunk, max_events, backend))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    else:
        parts = [_run_chunk(job) for job in jobs]
    counts = np.concatenate([p[0] for p in parts])
    labels = np.concatenate([p[1] for p in parts])
    status = np.concatenate([p[2] for p in parts])

    keep = status != kernels.DEGENERATE
    histogram = dict(sorted(Counter(counts[keep].tolist()).items()))
    names = arr.labels
    top = max(histogram) if histogram else None
    sequences: set[tuple[str, ...]] = set()
    foch = 0
    for row, c in zip(labels[keep], counts[keep]):
        seq = tuple(names[w] for w in row[:c])
        if c >= len(FOCH) and _contains(seq, FOCH):
            foch += 1
        if c == top:
            sequences.add(seq)
    return SearchResult(
        names, trials, seed, sampler, max_events, histogram, top,
        tuple(sorted(sequences)), int((~keep).sum()),
        int((status == kernels.MAX_EVENTS).sum()), foch,
    )


def to_scaled(arr: SubspaceArrangement, x) -> np.ndarray:
    return np.asarray(x, dtype=float) * arr.sqrt_weights()


def from_scaled(arr: SubspaceArrangement, x) -> np.ndarray:
    return np.asarray(x, dtype=float) / arr.sqrt_weights()
