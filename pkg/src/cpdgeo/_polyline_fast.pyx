# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled nearest-segment scan; see cpdgeo._polyline_ref for the contract."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

from libc.math cimport INFINITY, sqrt


def polyline_query(object verts_in, bint closed, object pts_in):
    """Nearest-segment data for a batch of query points.

    Same contract and tie-breaking as the NumPy reference backend.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] verts = np.ascontiguousarray(verts_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef Py_ssize_t n = verts.shape[0]
    cdef Py_ssize_t nseg = n if closed else n - 1
    cdef Py_ssize_t m = pts.shape[0]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_d = np.empty(m)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_seg = np.empty(m, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_t = np.empty(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_d2 = np.empty(m)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_seg2 = np.empty(m, dtype=np.int64)

    cdef Py_ssize_t q, k, j, k1, k2, gap
    cdef double px, py, ax, ay, bx, by, abx, aby, L2, t, dx, dy, d2
    cdef double best, bt, second

    for q in range(m):
        px = pts[q, 0]
        py = pts[q, 1]
        best = INFINITY
        bt = 0.0
        k1 = -1
        for k in range(nseg):
            ax = verts[k, 0]
            ay = verts[k, 1]
            j = k + 1 if k + 1 < n else 0
            bx = verts[j, 0]
            by = verts[j, 1]
            abx = bx - ax
            aby = by - ay
            L2 = abx * abx + aby * aby
            if L2 > 0.0:
                t = ((px - ax) * abx + (py - ay) * aby) / L2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            dx = px - (ax + t * abx)
            dy = py - (ay + t * aby)
            d2 = dx * dx + dy * dy
            if d2 < best:
                best = d2
                k1 = k
                bt = t
        out_d[q] = sqrt(best)
        out_seg[q] = k1
        out_t[q] = bt

        # second pass: best distance among segments not adjacent to k1
        second = INFINITY
        k2 = -1
        for k in range(nseg):
            gap = k1 - k if k1 >= k else k - k1
            if closed and nseg - gap < gap:
                gap = nseg - gap
            if gap <= 1:
                continue
            ax = verts[k, 0]
            ay = verts[k, 1]
            j = k + 1 if k + 1 < n else 0
            bx = verts[j, 0]
            by = verts[j, 1]
            abx = bx - ax
            aby = by - ay
            L2 = abx * abx + aby * aby
            if L2 > 0.0:
                t = ((px - ax) * abx + (py - ay) * aby) / L2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            dx = px - (ax + t * abx)
            dy = py - (ay + t * aby)
            d2 = dx * dx + dy * dy
            if d2 < second:
                second = d2
                k2 = k
        out_d2[q] = sqrt(second) if k2 >= 0 else INFINITY
        out_seg2[q] = k2

    return out_d, out_seg, out_t, out_d2, out_seg2
