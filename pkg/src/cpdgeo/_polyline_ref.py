"""Pure-NumPy nearest-segment scan.

Reference implementation of the hot kernel; mirrors the compiled version
in cpdgeo._polyline_fast bit-for-bit on the same inputs (same clamping,
same first-minimum tie-breaking).
"""

import numpy as np

_CHUNK = 256


def polyline_query(verts, closed, pts):
    """Nearest-segment data for a batch of query points.

    Returns (dist, seg, tpar, dist_nonadj, seg_nonadj): the unsigned
    distance to the polyline, the index and clamped parameter of the
    nearest segment, and the best distance/index among segments not
    adjacent to the winner (inf/-1 when there is none).
    """
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    n = verts.shape[0]
    if closed:
        a = verts
        b = np.roll(verts, -1, axis=0)
    else:
        a = verts[:-1]
        b = verts[1:]
    nseg = a.shape[0]
    ab = b - a
    L2 = np.einsum("ij,ij->i", ab, ab)
    L2safe = np.where(L2 > 0.0, L2, 1.0)

    m = pts.shape[0]
    out_d = np.empty(m)
    out_seg = np.empty(m, dtype=np.int64)
    out_t = np.empty(m)
    out_d2 = np.empty(m)
    out_seg2 = np.empty(m, dtype=np.int64)

    for lo in range(0, m, _CHUNK):
        hi = min(lo + _CHUNK, m)
        p = pts[lo:hi]
        ap = p[:, None, :] - a[None, :, :]                      # (C, S, 2)
        t = np.einsum("csj,sj->cs", ap, ab) / L2safe
        np.clip(t, 0.0, 1.0, out=t)
        diff = ap - t[:, :, None] * ab[None, :, :]
        d2 = np.einsum("csj,csj->cs", diff, diff)
        k1 = np.argmin(d2, axis=1)
        rows = np.arange(hi - lo)
        out_d[lo:hi] = np.sqrt(d2[rows, k1])
        out_seg[lo:hi] = k1
        out_t[lo:hi] = t[rows, k1]

        ks = np.arange(nseg)[None, :]
        gap = np.abs(ks - k1[:, None])
        if closed:
            gap = np.minimum(gap, nseg - gap)
        masked = np.where(gap <= 1, np.inf, d2)
        k2 = np.argmin(masked, axis=1)
        best2 = masked[rows, k2]
        has2 = np.isfinite(best2)
        out_d2[lo:hi] = np.where(has2, np.sqrt(np.where(has2, best2, 0.0)), np.inf)
        out_seg2[lo:hi] = np.where(has2, k2, -1)

    return out_d, out_seg, out_t, out_d2, out_seg2
