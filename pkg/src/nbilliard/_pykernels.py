"""Numpy batch simulator, used when the compiled kernel is unavailable.

Everything is in rescaled coordinates, where the metric is Euclidean.  A wall
is described by an orthonormal basis ``P`` of its orthogonal complement,
padded with zero columns to a common width.
"""
from __future__ import annotations

import numpy as np

ESCAPED, MAX_EVENTS, DEGENERATE = 0, 1, 2


def simulate_batch(starts, vels, perps, max_events, min_advance=1e-9, on_wall=1e-9, tangential=1e-10):
    """Run ``T`` trajectories to escape, truncation or a multi-wall hit.

    Distances to walls are compared against ``on_wall * max(1, |x|)`` so that
    rounding far from the origin is not mistaken for a hit.
    Returns ``(counts, labels, status)``: event counts, the wall index of each
    event (``-1`` past the last one) and a termination code per trajectory.
    """
    x = np.array(starts, dtype=float)
    v = np.array(vels, dtype=float)
    P = np.asarray(perps, dtype=float)
    T = x.shape[0]
    counts = np.zeros(T, dtype=np.int64)
    labels = np.full((T, max(max_events, 1)), -1, dtype=np.int32)
    status = np.zeros(T, dtype=np.int8)
    live = np.arange(T)
    tan2 = tangential * tangential
    while live.size:
        xs, vs = x[live], v[live]
        pa = np.einsum("an,wnc->awc", xs, P)
        pb = np.einsum("an,wnc->awc", vs, P)
        bb = np.einsum("awc,awc->aw", pb, pb)
        ab = np.einsum("awc,awc->aw", pa, pb)
        scale = on_wall * np.maximum(1.0, np.linalg.norm(xs, axis=1))[:, None]
        # a wall the point already lies on was just left and cannot be met again
        moving = (bb > tan2) & (np.linalg.norm(pa, axis=2) > scale)
        t = np.where(moving, -ab / np.where(moving, bb, 1.0), np.inf)
        res = np.linalg.norm(pa + np.where(np.isfinite(t), t, 0.0)[:, :, None] * pb, axis=2)
        t = np.where((t > min_advance) & (res <= scale), t, np.inf)
        w = np.argmin(t, axis=1)
        tbest = t[np.arange(live.size), w]

        escaped = ~np.isfinite(tbest)
        status[live[escaped]] = ESCAPED
        full = ~escaped & (counts[live] >= max_events)
        status[live[full]] = MAX_EVENTS
        go = ~escaped & ~full
        live, w, tbest = live[go], w[go], tbest[go]
        if not live.size:
            break

        y = x[live] + tbest[:, None] * v[live]
        dist = np.linalg.norm(np.einsum("an,wnc->awc", y, P), axis=2)
        scale = on_wall * np.maximum(1.0, np.linalg.norm(y, axis=1))[:, None]
        degen = (dist <= scale).sum(axis=1) >= 2
        status[live[degen]] = DEGENERATE
        ok = ~degen
        live, w, y = live[ok], w[ok], y[ok]

        Pw = P[w]
        vs = v[live]
        v[live] = vs - 2.0 * np.einsum("anc,ac->an", Pw, np.einsum("an,anc->ac", vs, Pw))
        x[live] = y
        labels[live, counts[live]] = w
        counts[live] += 1
    return counts, labels, status
