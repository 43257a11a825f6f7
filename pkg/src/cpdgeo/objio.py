"""Deterministic Wavefront OBJ export of parametric grids.

Vertices are written row-major with 17 significant digits and LF endings,
so identical grids produce byte-identical files.  Quads are split into two
triangles; the winding is chosen by the caller (flip_faces) to match the
surface normal.
"""

import numpy as np

from .errors import MeshExportError


def export_obj(points, path, normals=None, flip_faces=False, allow_holes=False):
    """Write an (nu, nv, 3) grid of points as an OBJ mesh.

    Rows containing NaN mark holes; cells touching a hole are dropped when
    allow_holes is set and raise MeshExportError otherwise.  Returns the
    pair (n_vertices, n_faces).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 3 or points.shape[2] != 3:
        raise ValueError("points must have shape (nu, nv, 3)")
    nu, nv = points.shape[:2]
    bad = np.any(~np.isfinite(points), axis=2)
    if bad.any() and not allow_holes:
        cells = sorted(zip(*np.nonzero(bad)))
        head = ", ".join(str(c) for c in cells[:8])
        more = "" if len(cells) <= 8 else f" (+{len(cells) - 8} more)"
        raise MeshExportError(f"grid has holes at {head}{more}; pass allow_holes to skip them")

    def vid(i, j):
        return i * nv + j + 1

    lines = []
    for i in range(nu):
        for j in range(nv):
            p = points[i, j]
            if bad[i, j]:
                lines.append("v 0 0 0")
            else:
                lines.append(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
    if normals is not None:
        normals = np.asarray(normals, dtype=float)
        for i in range(nu):
            for j in range(nv):
                n = normals[i, j]
                if np.all(np.isfinite(n)):
                    lines.append(f"vn {n[0]:.17g} {n[1]:.17g} {n[2]:.17g}")
                else:
                    lines.append("vn 0 0 0")

    n_faces = 0
    for i in range(nu - 1):
        for j in range(nv - 1):
            if bad[i, j] or bad[i + 1, j] or bad[i + 1, j + 1] or bad[i, j + 1]:
                continue
            tris = [(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)),
                    (vid(i, j), vid(i + 1, j + 1), vid(i, j + 1))]
            for tri in tris:
                if flip_faces:
                    tri = (tri[0], tri[2], tri[1])
                lines.append(f"f {tri[0]} {tri[1]} {tri[2]}")
                n_faces += 1

    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return nu * nv, n_faces
