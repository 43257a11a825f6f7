"""Polylines in the plane: nearest point, signed distance, CSV round-trip.

The per-segment scan is the hot kernel of the distance pipeline.  A
compiled backend is used when the extension was built; otherwise a NumPy
implementation with identical semantics is selected at import time.  Set
CPDGEO_PURE_PYTHON=1 to force the fallback.
"""

import os

import numpy as np

from .config import DEFAULTS
from .errors import CutLocusError, OutsideTubeError

if os.environ.get("CPDGEO_PURE_PYTHON"):
    from . import _polyline_ref as _kernel
    BACKEND = "python"
else:
    try:
        from . import _polyline_fast as _kernel
        BACKEND = "compiled"
    except ImportError:
        from . import _polyline_ref as _kernel
        BACKEND = "python"


def available_backends():
    """Names of importable kernel backends (for tests and benchmarks)."""
    out = {"python"}
    try:
        from . import _polyline_fast  # noqa: F401
        out.add("compiled")
    except ImportError:
        pass
    return sorted(out)


class Polyline:
    """Piecewise-linear curve with an oriented normal.

    ``normal_side`` selects which side the unit normal eta points to:
    "left" of the walking direction or "right".  Signed distances are
    positive on the eta side.
    """

    def __init__(self, vertices, closed=False, normal_side="left"):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ValueError("vertices must be an (N, 2) array")
        if self.vertices.shape[0] < 2:
            raise ValueError("a polyline needs at least two vertices")
        self.closed = bool(closed)
        if normal_side not in ("left", "right"):
            raise ValueError("normal_side must be 'left' or 'right'")
        self.normal_side = normal_side

    @classmethod
    def from_csv(cls, path, closed=False, normal_side="left"):
        pts = read_polyline_csv(path)
        return cls(pts, closed=closed, normal_side=normal_side)

    def to_csv(self, path):
        write_polyline_csv(path, self.vertices)

    @property
    def n_segments(self):
        return self.vertices.shape[0] - (0 if self.closed else 1)

    def length(self):
        a, b = self._segment_ends()
        return float(np.linalg.norm(b - a, axis=1).sum())

    def _segment_ends(self):
        if self.closed:
            return self.vertices, np.roll(self.vertices, -1, axis=0)
        return self.vertices[:-1], self.vertices[1:]

    def query(self, pts):
        """Raw kernel output for a batch of query points (see backends)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return _kernel.polyline_query(self.vertices, self.closed, pts)

    def signed_distance(self, x, tube=None):
        """Signed distance and nearest point for a single query.

        Positive on the side the oriented normal points to.  When ``tube``
        is given, queries farther than the tube radius raise
        OutsideTubeError, and queries whose two smallest segment distances
        come from non-adjacent segments and differ by less than
        1e-6 * tube raise CutLocusError (nearest projection ambiguous).
        """
        d, near, _ = self.signed_distance_batch(np.asarray(x, dtype=float)[None, :], tube)
        return float(d[0]), near[0]

    def signed_distance_batch(self, pts, tube=None):
        """Vectorized signed distance; returns (d, nearest, seg_index)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        dist, seg, tpar, dist2, _ = self.query(pts)
        if tube is not None:
            if np.any(dist > tube):
                k = int(np.argmax(dist))
                raise OutsideTubeError(
                    f"query {pts[k]} at distance {dist[k]:.6g} exceeds tube radius {tube:g}")
            eps_cut = 1e-6 * tube
            clash = dist2 - dist < eps_cut
            if np.any(clash):
                k = int(np.argmax(clash))
                raise CutLocusError(
                    f"competing nearest segments at query {pts[k]} "
                    f"(distances {dist[k]:.9g} and {dist2[k]:.9g})")
        a, b = self._segment_ends()
        seg_a = a[seg]
        seg_ab = b[seg] - seg_a
        nearest = seg_a + tpar[:, None] * seg_ab
        sign = self._side_sign(pts, nearest, seg, tpar, seg_ab)
        return sign * dist, nearest, seg

    def _side_sign(self, pts, nearest, seg, tpar, seg_ab):
        diff = pts - nearest
        cross = seg_ab[:, 0] * diff[:, 1] - seg_ab[:, 1] * diff[:, 0]
        # nearest point at a shared vertex: use the angle-bisecting
        # pseudonormal of the two adjacent segments
        at_end = (tpar <= 0.0) | (tpar >= 1.0)
        if np.any(at_end):
            a, b = self._segment_ends()
            nseg = self.n_segments
            for k in np.nonzero(at_end)[0]:
                s = int(seg[k])
                other = s - 1 if tpar[k] <= 0.0 else s + 1
                if self.closed:
                    other %= nseg
                elif other < 0 or other >= nseg:
                    continue
                u1 = b[s] - a[s]
                u2 = b[other] - a[other]
                n1 = np.array([-u1[1], u1[0]]) / max(np.linalg.norm(u1), 1e-300)
                n2 = np.array([-u2[1], u2[0]]) / max(np.linalg.norm(u2), 1e-300)
                cross[k] = float(np.dot(diff[k], n1 + n2))
        sign = np.where(cross >= 0.0, 1.0, -1.0)
        if self.normal_side == "right":
            sign = -sign
        return sign

    def nearest_normal(self, x):
        """Unit gradient of the signed distance field at x (direction to x)."""
        d, nearest, _ = self.signed_distance_batch(np.asarray(x, dtype=float)[None, :])
        diff = np.asarray(x, dtype=float) - nearest[0]
        n = np.linalg.norm(diff)
        if n < 1e-300:
            raise ZeroDivisionError("query lies on the polyline")
        return np.sign(d[0]) * diff / n


def circle_polyline(radius=1.0, center=(0.0, 0.0), n=720, normal_side="right"):
    """Closed regular polygon approximating a circle (CCW).

    With normal_side="right" the oriented normal points outward, so signed
    distance is positive outside.
    """
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)], axis=1)
    return Polyline(pts, closed=True, normal_side=normal_side)


def write_polyline_csv(path, pts):
    """CSV with header ``x,y`` and one point per row, 17 significant digits."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    with open(path, "w", newline="\n") as fh:
        fh.write("x,y\n")
        for p in pts:
            fh.write(f"{p[0]:.17g},{p[1]:.17g}\n")


def read_polyline_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().lower().replace(" ", "")
        if header != "x,y":
            raise ValueError(f"{path}: expected header 'x,y', got {header!r}")
        rows = [tuple(float(tok) for tok in line.split(",")) for line in fh if line.strip()]
    return np.asarray(rows, dtype=float)
