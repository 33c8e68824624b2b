# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch simulator; same contract as ``_pykernels.simulate_batch``."""
import numpy as np

from libc.math cimport INFINITY, sqrt

cdef enum:
    ESCAPED = 0
    MAX_EVENTS = 1
    DEGENERATE = 2


def simulate_batch(starts, vels, perps, int max_events, double min_advance=1e-9,
                   double on_wall=1e-9, double tangential=1e-10):
    cdef double[:, ::1] X0 = np.ascontiguousarray(starts, dtype=np.float64)
    cdef double[:, ::1] V0 = np.ascontiguousarray(vels, dtype=np.float64)
    cdef double[:, :, ::1] P = np.ascontiguousarray(perps, dtype=np.float64)
    cdef Py_ssize_t T = X0.shape[0], n = X0.shape[1], W = P.shape[0], C = P.shape[2]

    counts_arr = np.zeros(T, dtype=np.int64)
    labels_arr = np.full((T, max(max_events, 1)), -1, dtype=np.int32)
    status_arr = np.zeros(T, dtype=np.int8)
    cdef long long[::1] counts = counts_arr
    cdef int[:, ::1] labels = labels_arr
    cdef signed char[::1] status = status_arr

    cdef double[::1] x = np.empty(n)
    cdef double[::1] v = np.empty(n)
    cdef double[::1] pa = np.empty(C)
    cdef double[::1] pb = np.empty(C)
    cdef Py_ssize_t i, k, c, w, best_w
    cdef double t, best_t, ab, bb, aa, r, s, d, scale
    cdef double tan2 = tangential * tangential
    cdef int on

    with nogil:
        for i in range(T):
            for k in range(n):
                x[k] = X0[i, k]
                v[k] = V0[i, k]
            while True:
                best_t = INFINITY
                best_w = -1
                scale = 0.0
                for k in range(n):
                    scale += x[k] * x[k]
                scale = on_wall * (sqrt(scale) if scale > 1.0 else 1.0)
                for w in range(W):
                    aa = 0.0
                    ab = 0.0
                    bb = 0.0
                    for c in range(C):
                        pa[c] = 0.0
                        pb[c] = 0.0
                        for k in range(n):
                            pa[c] += P[w, k, c] * x[k]
                            pb[c] += P[w, k, c] * v[k]
                        aa += pa[c] * pa[c]
                        ab += pa[c] * pb[c]
                        bb += pb[c] * pb[c]
                    if bb <= tan2 or sqrt(aa) <= scale:
                        continue
                    t = -ab / bb
                    if t <= min_advance:
                        continue
                    r = 0.0
                    for c in range(C):
                        s = pa[c] + t * pb[c]
                        r += s * s
                    if sqrt(r) > scale:
                        continue
                    if t < best_t:
                        best_t = t
                        best_w = w
                if best_w < 0:
                    status[i] = ESCAPED
                    break
                if counts[i] >= max_events:
                    status[i] = MAX_EVENTS
                    break
                scale = 0.0
                for k in range(n):
                    x[k] += best_t * v[k]
                    scale += x[k] * x[k]
                scale = on_wall * (sqrt(scale) if scale > 1.0 else 1.0)
                on = 0
                for w in range(W):
                    d = 0.0
                    for c in range(C):
                        s = 0.0
                        for k in range(n):
                            s += P[w, k, c] * x[k]
                        d += s * s
                    if sqrt(d) <= scale:
                        on += 1
                if on >= 2:
                    status[i] = DEGENERATE
                    break
                for c in range(C):
                    s = 0.0
                    for k in range(n):
                        s += P[best_w, k, c] * v[k]
                    for k in range(n):
                        v[k] -= 2.0 * s * P[best_w, k, c]
                labels[i, counts[i]] = <int>best_w
                counts[i] += 1
    return counts_arr, labels_arr, status_arr
