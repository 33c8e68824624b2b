"""Named invariant suites, one per module, run by ``nbilliard verify-all``.

Each check returns a :class:`Check` with a pass flag and a small JSON-ready
detail record.  Checks that compare against the published closed-form angle
are kept next to the same check against the exact mass-metric angle, so a
failure of the former is visible rather than hidden.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bounds, collisions, jacobi, linalg, sim, spherical
from .collisions import BilliardSystem, PairIndex
from .policy import get_policy

# Monte-Carlo sizes used when no ``trials`` override is given
DEFAULT_TRIALS = {
    "sim_equal": 100_000,
    "sim_random": 20_000,
    "lines": 10_000,
    "sphere_lines": 100_000,
    "vector_angle": 100_000,
}


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.suite}.{self.name}"

    def to_dict(self) -> dict:
        # timings stay out so that reports are reproducible byte for byte
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


def rng_for(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))


def log_uniform(rng: np.random.Generator, size, lo: float = 1e-2, hi: float = 1e2) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def random_subspace(rng: np.random.Generator, n: int, k: int, metric: linalg.Metric | None = None) -> linalg.Subspace:
    if k == 0:
        return linalg.Subspace(np.zeros((n, 0)), metric or linalg.Metric.euclidean())
    return linalg.orthonormalize(rng.standard_normal((k, n)), metric)


class _Suite:
    def __init__(self, name: str, seed: int, trials: int | None):
        self.name, self.seed, self.trials = name, seed, trials
        self.checks: list[Check] = []

    def n(self, key: str) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[key]

    def rng(self, *key: int) -> np.random.Generator:
        return rng_for(self.seed, *key)

    def run(self, name: str, fn: Callable[[], tuple[bool, dict]]):
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        self.checks.append(Check(self.name, name, bool(ok), detail, time.perf_counter() - t0))


# -- metric-linalg -----------------------------------------------------------

def _random_pairs(rng, count, max_n=12, max_k=6):
    for _ in range(count):
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(0, min(max_k, n) + 1))
        q = int(rng.integers(0, min(max_k, n) + 1))
        yield random_subspace(rng, n, p), random_subspace(rng, n, q)


def angles_well_formed(rng, count=300):
    for F, G in _random_pairs(rng, count):
        a = linalg.principal_angles(F, G).angles
        if len(a) != min(F.dim, G.dim) or np.any(np.diff(a) < 0) or np.any(a < 0) or np.any(a > math.pi / 2):
            return False, {"dims": [F.dim, G.dim, F.ambient_dim]}
    return True, {"pairs": count}


def angles_symmetric(rng, count=300):
    worst = 0.0
    for F, G in _random_pairs(rng, count):
        a, b = linalg.principal_angles(F, G).angles, linalg.principal_angles(G, F).angles
        worst = max(worst, float(np.max(np.abs(a - b), initial=0.0)))
    return worst <= 1e-10, {"pairs": count, "max_discrepancy": worst}


def oracle_agreement(rng, count=100, resolution=10_000):
    bound = 2 * math.pi / resolution
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 7))
        p = int(rng.integers(1, min(3, n) + 1))
        q = int(rng.integers(1, min(3, n) + 1))
        F, G = random_subspace(rng, n, p), random_subspace(rng, n, q)
        svd = linalg.principal_angles(F, G).angles
        brute = linalg.principal_angles_oracle(F, G, resolution).angles
        worst = max(worst, float(np.max(np.abs(svd - brute))))
    return worst <= bound, {"pairs": count, "resolution_bound": bound, "max_discrepancy": worst}


def intersection_dimension(rng, count=200):
    zero = get_policy().zero_angle
    for _ in range(count):
        n = int(rng.integers(2, 10))
        shared = int(rng.integers(0, n // 2 + 1))
        # generic extra directions keep the intersection exactly ``shared``-dimensional
        p = shared + int(rng.integers(0, n - 2 * shared + 1))
        q = shared + int(rng.integers(0, n - p + 1))
        common = rng.standard_normal((shared, n))
        if p == 0 or q == 0:
            continue
        F = linalg.orthonormalize(np.vstack([common, rng.standard_normal((p - shared, n))]))
        G = linalg.orthonormalize(np.vstack([common, rng.standard_normal((q - shared, n))]))
        count_zero = int(np.sum(linalg.principal_angles(F, G).angles < zero))
        if linalg.subspace_intersection(F, G).dim != count_zero:
            return False, {"dims": [F.dim, G.dim, n], "zeros": count_zero}
    return True, {"pairs": count}


def complement_involution(rng, count=200):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(1, 13))
        k = int(rng.integers(1, n + 1))
        metric = linalg.Metric.mass(tuple(log_uniform(rng, n)), 1) if rng.random() < 0.5 else linalg.Metric.euclidean()
        F = random_subspace(rng, n, k, metric)
        back = linalg.orthogonal_complement(linalg.orthogonal_complement(F))
        if back.dim != F.dim:
            return False, {"dims": [F.dim, back.dim]}
        worst = max(worst, float(np.max(linalg.principal_angles(F, back).angles)))
    return worst < 1e-9, {"subspaces": count, "max_angle": worst}


def codim_one_normals(rng, count=200):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(2, 10))
        a, b = rng.standard_normal(n), rng.standard_normal(n)
        F = linalg.orthogonal_complement(linalg.Subspace.span([a]))
        G = linalg.orthogonal_complement(linalg.Subspace.span([b]))
        angles = linalg.principal_angles(F, G).angles
        expected = math.acos(min(1.0, abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))))
        worst = max(worst, abs(angles[-1] - expected), float(np.max(angles[:-1], initial=0.0)))
    return worst < 1e-9, {"pairs": count, "max_discrepancy": worst}


def duality_random(rng, count=500):
    worst, failed = 0.0, 0
    for F, G in _random_pairs(rng, count):
        rep = linalg.check_angle_duality(F, G)
        worst = max(worst, rep.max_discrepancy)
        failed += not rep.passed
    return failed == 0, {"pairs": count, "failed": failed, "max_discrepancy": worst}


def duality_examples():
    pi = math.pi
    out = {}
    worst = 0.0
    cases = [
        ((pi / 3, pi / 2), 2, [0, 0, pi / 3, pi / 2], [0, pi / 6]),
        ((0, 0, pi / 4, pi / 3), 4, [pi / 4, pi / 3], [pi / 6, pi / 4]),
    ]
    for k, (given, dim, perp_perp, mixed) in enumerate(cases):
        L, M = linalg.subspace_with_angles(6, dim, given)
        Lp, Mp = linalg.orthogonal_complement(L), linalg.orthogonal_complement(M)
        got_pp = linalg.principal_angles(Lp, Mp).angles
        got_lm = linalg.principal_angles(L, Mp).angles
        got_ml = linalg.principal_angles(Lp, M).angles
        d = max(
            float(np.max(np.abs(got_pp - perp_perp))),
            float(np.max(np.abs(got_lm - mixed))),
            float(np.max(np.abs(got_ml - mixed))),
        )
        worst = max(worst, d)
        out[f"example_{k + 1}"] = {"perp_perp": got_pp.tolist(), "mixed": got_lm.tolist()}
    out["max_discrepancy"] = worst
    return worst < 1e-10, out


def suite_linalg(s: _Suite):
    s.run("angles_sorted_in_range", lambda: angles_well_formed(s.rng(1)))
    s.run("angles_symmetric", lambda: angles_symmetric(s.rng(2)))
    s.run("oracle_agreement", lambda: oracle_agreement(s.rng(3)))
    s.run("intersection_dimension", lambda: intersection_dimension(s.rng(4)))
    s.run("complement_involution", lambda: complement_involution(s.rng(5)))
    s.run("codim_one_normal_angle", lambda: codim_one_normals(s.rng(6)))
    s.run("duality_random_pairs", lambda: duality_random(s.rng(7)))
    s.run("duality_worked_examples", duality_examples)


# -- collision subspaces -----------------------------------------------------

def angle_theorem_sweep(masses_for: Callable[[int], np.ndarray | None], vectors: int, formula: str, tol: float = 1e-9):
    """Every pair combination for N in {3,4,5}, m in {1,2,3}, over ``vectors`` mass draws."""
    failed = 0
    total = 0
    worst = 0.0
    zero_mismatch = 0
    first = None
    for v in range(vectors):
        for N in (3, 4, 5):
            masses = masses_for(N)
            for m in (1, 2, 3):
                sys = BilliardSystem(N, m, masses) if masses is not None else BilliardSystem.equal_masses(N, m)
                cache: dict = {}
                for a, b in itertools.combinations(sys.pairs(), 2):
                    rep = collisions.verify_angle_theorem(sys, a, b, formula=formula, tol=tol, cache=cache)
                    total += 1
                    worst = max(worst, rep.max_discrepancy)
                    zero_mismatch += rep.zero_count != rep.expected_zero_count
                    if not rep.passed:
                        failed += 1
                        if first is None:
                            first = {"masses": [float(x) for x in sys.masses], "m": m, **rep.to_dict()}
    detail = {"comparisons": total, "failed": failed, "zero_count_mismatches": zero_mismatch, "max_discrepancy": worst}
    if first is not None:
        detail["first_failure"] = first
    return failed == 0, detail


def delta_dimensions():
    for N in range(2, 7):
        for m in (1, 2, 3):
            sys = BilliardSystem.equal_masses(N, m)
            for p in sys.pairs():
                if collisions.build_delta(sys, p).dim != m * (N - 1):
                    return False, {"N": N, "m": m, "pair": p.label}
    return True, {"N": "2..6", "m": "1..3"}


def closed_form_properties(rng, count=1000):
    sym = scale = 0.0
    for _ in range(count):
        mi, mj, mk = log_uniform(rng, 3)
        a = collisions.closed_form_angle(mi, mj, mk)
        sym = max(sym, abs(a - collisions.closed_form_angle(mk, mj, mi)))
        lam = float(log_uniform(rng, 1, 1e-3, 1e3)[0])
        scale = max(scale, abs(a - collisions.closed_form_angle(lam * mi, lam * mj, lam * mk)))
    equal = max(abs(collisions.closed_form_angle(c, c, c) - math.pi / 3) for c in (1e-3, 0.5, 1.0, 7.0, 1e3))
    ok = sym == 0.0 and scale < 1e-12 and equal < 1e-12
    return ok, {"swap_discrepancy": sym, "scale_discrepancy": scale, "equal_mass_discrepancy": equal}


def appendix_spans(rng, vectors=10):
    failed = []
    checked = 0
    for v in range(vectors + 1):
        for N in (3, 4, 5):
            masses = np.ones(N) if v == 0 else log_uniform(rng, N)
            for m in (1, 2):
                sys = BilliardSystem(N, m, masses)
                for a, b in itertools.combinations(sys.pairs(), 2):
                    rep = collisions.appendix_decomposition(sys, a, b)
                    checked += 1
                    if not rep.spans_match:
                        failed.append(rep.to_dict())
    return not failed, {"decompositions": checked, "failed": len(failed), "first_failure": failed[0] if failed else None}


def suite_collisions(s: _Suite):
    s.run("equal_mass_angle_theorem", lambda: angle_theorem_sweep(lambda N: None, 1, "paper"))
    rng = s.rng(11)
    s.run("random_mass_angle_theorem", lambda: angle_theorem_sweep(lambda N: log_uniform(rng, N), 200, "paper"))
    rng2 = s.rng(11)
    s.run("random_mass_angle_exact", lambda: angle_theorem_sweep(lambda N: log_uniform(rng2, N), 200, "exact"))
    s.run("delta_dimension", delta_dimensions)
    s.run("closed_form_properties", lambda: closed_form_properties(s.rng(12)))
    s.run("appendix_decomposition_spans", lambda: appendix_spans(s.rng(13)))


# -- jacobi reduction --------------------------------------------------------

def jacobi_linear_isometry(rng, count=500):
    lin = iso = 0.0
    for _ in range(count):
        jm = jacobi.JacobiMasses(*log_uniform(rng, 3))
        q, r = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
        a, b = rng.standard_normal(2)
        lhs = jacobi.jacobi_project(a * q + b * r, jm).flat()
        rhs = a * jacobi.jacobi_project(q, jm).flat() + b * jacobi.jacobi_project(r, jm).flat()
        lin = max(lin, float(np.max(np.abs(lhs - rhs))))
        m = np.array([jm.m1, jm.m2, jm.m3])
        q0 = q - (m @ q) / m.sum()
        kinetic = float(np.sum(m[:, None] * q0**2))
        iso = max(iso, abs(kinetic - float(np.sum(jacobi.jacobi_project(q0, jm).flat() ** 2))) / max(1.0, kinetic))
    return lin <= 1e-12 and iso <= 1e-10, {"samples": count, "linearity": lin, "isometry": iso}


def jacobi_unit_angles():
    jm = jacobi.JacobiMasses.unit()
    worst = 0.0
    out = {}
    for a, b in itertools.combinations(jacobi.REDUCED_PAIRS, 2):
        ang = jacobi.reduced_angle(a, b, jm)
        out[f"{a.label}-{b.label}"] = ang.tolist()
        worst = max(worst, float(np.max(np.abs(ang - math.pi / 3))))
    out["max_discrepancy"] = worst
    return worst <= 1e-10, out


def jacobi_listed_images():
    jm = jacobi.JacobiMasses.unit()
    s6 = math.sqrt(6.0)
    first = jacobi.jacobi_project(np.array([-1, -1, 2]) / s6, jm)
    second = jacobi.jacobi_project(np.array([-2, 1, 1]) / s6, jm)
    d1 = float(np.max(np.abs(first.flat() - [0.0, 1.0])))
    d2 = float(np.max(np.abs(second.flat() - [-math.sqrt(3) / 2, 0.5])))
    reps = [jacobi.verify_principal_vector_image(a, b, jm) for a, b in itertools.permutations(jacobi.REDUCED_PAIRS, 2)]
    ok = d1 <= 1e-9 and d2 <= 1e-9 and all(r.passed for r in reps)
    return ok, {"first_image": first.flat().tolist(), "second_image": second.flat().tolist(),
                "image_reports_passed": sum(r.passed for r in reps), "image_reports": len(reps)}


def jacobi_random_mass_angle(rng, count, formula):
    worst = 0.0
    first = None
    f = collisions.closed_form_angle if formula == "paper" else collisions.mass_metric_angle
    for _ in range(count):
        m = log_uniform(rng, 3)
        jm = jacobi.JacobiMasses(*m)
        for (a, b), mid in (((PairIndex(1, 2), PairIndex(2, 3)), (m[0], m[1], m[2])),
                            ((PairIndex(2, 3), PairIndex(1, 3)), (m[1], m[2], m[0])),
                            ((PairIndex(1, 2), PairIndex(1, 3)), (m[1], m[0], m[2]))):
            got = jacobi.reduced_angle(a, b, jm)
            d = float(np.max(np.abs(got - f(*mid))))
            if d > worst:
                worst = d
                if d > 1e-9 and first is None:
                    first = {"masses": m.tolist(), "pairs": [a.label, b.label], "reduced": got.tolist(), "formula": f(*mid)}
    return worst <= 1e-9, {"triples": count, "formula": formula, "max_discrepancy": worst, "first_failure": first}


def jacobi_vector_angles(rng_seed, trials):
    jm = jacobi.JacobiMasses.unit()
    out = {}
    ok = True
    for k, (a, b) in enumerate(itertools.combinations(jacobi.REDUCED_PAIRS, 2)):
        lo, hi = jacobi.min_vector_angle(a, b, jm, trials, seed=rng_seed + k)
        out[f"{a.label}-{b.label}"] = [lo, hi]
        ok &= math.pi / 3 - 1e-9 <= lo <= math.pi / 3 + 0.05 and hi <= math.pi / 2 + 1e-12
    return ok, out


def suite_jacobi(s: _Suite):
    s.run("linearity_and_isometry", lambda: jacobi_linear_isometry(s.rng(21)))
    s.run("unit_mass_reduced_angles", jacobi_unit_angles)
    s.run("principal_vector_images", jacobi_listed_images)
    s.run("random_mass_reduced_angle", lambda: jacobi_random_mass_angle(s.rng(22), 200, "paper"))
    s.run("random_mass_reduced_angle_exact", lambda: jacobi_random_mass_angle(s.rng(22), 200, "exact"))
    s.run("vector_angle_range", lambda: jacobi_vector_angles(s.seed, s.n("vector_angle")))


# -- billiard simulation -----------------------------------------------------

def trajectory_invariants(rng, count=300):
    """Energy, momentum, reflection involution, straight segments, time reversal."""
    worst = {"energy": 0.0, "momentum": 0.0, "involution": 0.0, "segments": 0.0, "reversal": 0.0}
    arrs = [sim.reduced_arrangement(), sim.reduced_arrangement(jacobi.JacobiMasses(*log_uniform(rng, 3)))]
    arrs.append(sim.collision_arrangement(BilliardSystem(3, 1, log_uniform(rng, 3))))
    runs = 0
    for k in range(count):
        arr = arrs[k % len(arrs)]
        x, v = sim._sample(arr, "collinear", 1, rng)
        x, v = sim.from_scaled(arr, x[0]), sim.from_scaled(arr, v[0])
        tr = sim.run_trajectory(x, v, arr)
        if tr.termination != "escaped" or not tr.events:
            continue
        runs += 1
        walls = dict(arr.walls)
        prev, t_prev, vel = x, 0.0, v
        for e in tr.events:
            wall = walls[e.pair]
            worst["energy"] = max(worst["energy"], abs(linalg.metric_norm(e.v_plus, arr.metric) - 1.0))
            worst["momentum"] = max(worst["momentum"], float(np.max(np.abs(wall.project(e.v_plus) - wall.project(e.v_minus)))))
            worst["involution"] = max(worst["involution"], float(np.max(np.abs(sim.reflect(e.v_plus, wall) - e.v_minus))))
            worst["segments"] = max(worst["segments"], float(np.max(np.abs(prev + (e.time - t_prev) * vel - e.point))))
            prev, t_prev, vel = e.point, e.time, e.v_plus
        end = tr.events[-1].point + tr.events[-1].v_plus
        # the reversed run may continue past the original start, so compare its first events only
        back = sim.run_trajectory(end, -tr.events[-1].v_plus, arr, max_events=len(tr.events))
        if len(back.events) != len(tr.events):
            worst["reversal"] = math.inf
        else:
            for e, f in zip(tr.events, reversed(back.events)):
                worst["reversal"] = max(worst["reversal"], float(np.max(np.abs(e.point - f.point))))
    ok = (worst["energy"] <= 1e-10 and worst["momentum"] <= 1e-10 and worst["involution"] <= 1e-12
          and worst["segments"] <= 1e-9 and worst["reversal"] <= 1e-7 and runs > 0)
    return ok, {"trajectories": runs, **worst}


def equal_mass_search(seed, trials):
    res = sim.max_collision_search(sim.reduced_arrangement(), trials, seed)
    ok = res.max_count == 3 and res.histogram.get(4, 0) == 0 and res.foch == 0
    return ok, res.to_dict()


def random_mass_search(rng, seed, triples, trials, formula):
    f = bounds.three_body_bound
    violations = []
    for k in range(triples):
        m = log_uniform(rng, 3)
        res = sim.max_collision_search(sim.reduced_arrangement(jacobi.JacobiMasses(*m)), trials, seed + k)
        bound = f(m, formula)
        if res.max_count is not None and res.max_count > bound:
            violations.append({"masses": m.tolist(), "max_count": res.max_count, "bound": bound})
    return not violations, {"triples": triples, "trials": trials, "formula": formula,
                            "violations": len(violations), "examples": violations[:5]}


def wedge_search(seed, trials):
    res = sim.max_collision_search(sim.wedge_arrangement(0.54), trials, seed)
    return res.max_count <= bounds.wedge_bound(0.54), res.to_dict()


def single_wall_search(seed, trials):
    arr = sim.SubspaceArrangement((("w", linalg.Subspace.span([[1.0, 0.0, 0.0]])),))
    res = sim.max_collision_search(arr, trials, seed)
    return res.support <= {0, 1}, res.to_dict()


def suite_sim(s: _Suite):
    s.run("trajectory_invariants", lambda: trajectory_invariants(s.rng(31)))
    s.run("equal_mass_max_three", lambda: equal_mass_search(s.seed, s.n("sim_equal")))
    s.run("random_mass_within_bound", lambda: random_mass_search(s.rng(32), s.seed, 50, s.n("sim_random"), "paper"))
    s.run("random_mass_within_exact_bound", lambda: random_mass_search(s.rng(32), s.seed, 50, s.n("sim_random"), "exact"))
    s.run("wedge_at_most_six", lambda: wedge_search(s.seed, s.n("sim_random")))
    s.run("single_wall_at_most_one", lambda: single_wall_search(s.seed, s.n("lines")))


# -- bounds ------------------------------------------------------------------

def wedge_ceiling(rng, count=2000):
    for a in np.concatenate([rng.uniform(1e-3, math.pi, count), [math.pi / k for k in range(1, 13)]]):
        b = bounds.wedge_bound(float(a))
        if not (b * a >= math.pi - 1e-12 and (b - 1) * a < math.pi):
            return False, {"alpha": float(a), "bound": b}
    return True, {"angles": count + 12}


def three_mass_scaling(rng, count=500):
    for _ in range(count):
        m = log_uniform(rng, 3)
        base = bounds.three_mass_bound(*m)
        for lam in (1e-3, 1.0, 1e3):
            if bounds.three_mass_bound(*(lam * m)) != base or bounds.three_mass_bound(m[2], m[1], m[0]) != base:
                return False, {"masses": m.tolist(), "lambda": lam}
    return True, {"triples": count}


def rod_conditions(rng, count=500):
    for _ in range(count):
        N = int(rng.integers(3, 9))
        reps = {r.name: r for r in bounds.hard_rod_bounds(N, log_uniform(rng, N, 0.1, 10))}
        if reps["binomial_arithmetic_mean"].applicable and not reps["binomial_geometric_mean"].applicable:
            return False, {"N": N}
    galperin = all(
        {r.name: r for r in bounds.hard_rod_bounds(N, [1.0] * N)}["galperin"].predicted > math.comb(N, 2)
        for N in range(3, 30)
    )
    return galperin, {"mass_lists": count, "galperin_exceeds_binomial": galperin}


def grid_checks():
    g = bounds.mass_ratio_grid()
    symmetric = bool(np.array_equal(g.cells, g.cells.T))
    centre = g.cell(1.0, 1.0)
    unflagged_min = int(g.cells[~g.flags].min())
    return symmetric and centre == 3, {"cells": int(g.cells.size), "symmetric": symmetric, "cell_1_1": centre,
                                       "flagged": int(g.flags.sum()), "min_unflagged": unflagged_min}


def line_bounds(seed, trials):
    out = {}
    ok = True
    for N in range(1, 9):
        r = bounds.hyperplane_line_bound(N, trials, seed)
        ok &= r.witness == N and r.consistent
        out[f"hyperplane_N{N}"] = [r.witness, r.empirical_max]
        for d in range(1, N):
            r = bounds.codim_line_bound(N, d, trials, seed)
            ok &= r.witness == N - d + 1 and r.consistent
            out[f"codim_N{N}_d{d}"] = [r.witness, r.empirical_max]
    return ok, out


def suite_bounds(s: _Suite):
    s.run("wedge_ceiling", lambda: wedge_ceiling(s.rng(41)))
    s.run("three_mass_ratio_and_swap", lambda: three_mass_scaling(s.rng(42)))
    s.run("hard_rod_conditions", lambda: rod_conditions(s.rng(43)))
    s.run("mass_ratio_grid", grid_checks)
    s.run("line_intersection_bounds", lambda: line_bounds(s.seed, s.n("lines")))


# -- spherical ---------------------------------------------------------------

def dihedral_vs_normals(rng, count=2000):
    worst = 0.0
    for _ in range(count):
        n1, n2 = rng.standard_normal((2, 3))
        n1 /= np.linalg.norm(n1)
        n2 /= np.linalg.norm(n2)
        expected = math.acos(min(1.0, abs(float(n1 @ n2))))
        worst = max(worst, abs(spherical.dihedral_angle_via_tangents(n1, n2) - expected))
    for arr in (spherical.tiling_322(), spherical.tiling_332()):
        for p, q in itertools.combinations(range(1, len(arr) + 1), 2):
            n1, n2 = arr.normals[p - 1], arr.normals[q - 1]
            worst = max(worst, abs(arr.angle(p, q) - math.acos(min(1.0, abs(float(n1 @ n2))))))
    return worst <= 1e-10, {"pairs": count, "max_discrepancy": worst}


def tilings(seed):
    out = {}
    ok = True
    for name, arr, faces in (("322", spherical.tiling_322(), 12), ("332", spherical.tiling_332(), 24)):
        sampled = spherical.sample_face_count(arr, seed=seed)
        euler = spherical.euler_face_count(arr)
        rot = arr.rotated(spherical.random_rotation(seed))
        rot_faces = spherical.sample_face_count(rot, seed=seed + 1)
        angle_shift = max(abs(arr.angle(p, q) - rot.angle(p, q))
                          for p, q in itertools.combinations(range(1, len(arr) + 1), 2))
        ok &= sampled == faces and euler.faces == faces and euler.characteristic == 2 and rot_faces == faces
        ok &= angle_shift <= 1e-10
        out[name] = {"planes": len(arr), "sampled_faces": sampled, "euler_faces": euler.faces,
                     "V": euler.vertices, "E": euler.edges, "rotated_faces": rot_faces, "rotated_angle_shift": angle_shift}
    t1, t2 = spherical.tiling_322(), spherical.tiling_332()
    named = [t1.angle(1, 2), t1.angle(1, 3), t1.angle(2, 3), t2.angle(1, 2), t2.angle(1, 3), t2.angle(2, 3)]
    want = [math.pi / 2, math.pi / 2, math.pi / 3, math.pi / 2, math.pi / 3, math.pi / 3]
    ok &= max(abs(a - b) for a, b in zip(named, want)) <= 1e-10
    out["named_triples"] = named
    return ok, out


def sphere_lines(seed, trials):
    r4 = spherical.line_intersection_count(spherical.tiling_322(), trials, seed)
    r6 = spherical.line_intersection_count(spherical.tiling_332(), trials, seed)
    r3 = spherical.three_planes_common_line_count(trials, seed)
    ok = r4.empirical_max == 4 and r6.empirical_max == 6 and r3.empirical_max == 3
    return ok, {"tiling_322": r4.to_dict(), "tiling_332": r6.to_dict(), "diagonal_planes": r3.to_dict()}


def cones():
    pi = math.pi
    verdicts = {
        "pi/3,pi/3,pi/3": spherical.cone_feasibility([pi / 3] * 3).feasible,
        "pi/3,pi/2,pi/2": spherical.cone_feasibility([pi / 3, pi / 2, pi / 2]).feasible,
        "pi/3,pi/3,pi/2": spherical.cone_feasibility([pi / 3, pi / 3, pi / 2]).feasible,
        "pi/2,pi/2,pi/2": spherical.cone_feasibility([pi / 2] * 3).feasible,
    }
    ok = verdicts == {"pi/3,pi/3,pi/3": False, "pi/3,pi/2,pi/2": True, "pi/3,pi/3,pi/2": True, "pi/2,pi/2,pi/2": True}
    return ok, verdicts


def suite_spherical(s: _Suite):
    s.run("dihedral_matches_normals", lambda: dihedral_vs_normals(s.rng(51)))
    s.run("tilings", lambda: tilings(s.seed))
    s.run("line_crossings", lambda: sphere_lines(s.seed, s.n("sphere_lines")))
    s.run("cone_feasibility", cones)


SUITES: dict[str, Callable[[_Suite], None]] = {
    "linalg": suite_linalg,
    "collisions": suite_collisions,
    "jacobi": suite_jacobi,
    "sim": suite_sim,
    "bounds": suite_bounds,
    "spherical": suite_spherical,
}


def run_suites(only: list[str] | None = None, seed: int = 0, trials: int | None = None,
               progress: Callable[[Check], None] | None = None) -> list[Check]:
    names = list(SUITES) if not only else only
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    checks: list[Check] = []
    for name in names:
        suite = _Suite(name, seed, trials)
        SUITES[name](suite)
        for c in suite.checks:
            if progress:
                progress(c)
        checks.extend(suite.checks)
    return checks
