"""Level-set extraction on 2D grids by marching squares.

Crossing points live on grid edges and are keyed by edge identity, so
chaining segments into polylines is exact (no coordinate hashing).  An
optional Newton correction pushes each point onto the level set along the
gradient direction.
"""

import numpy as np

# Per marching-squares case: list of segments, each a pair of local edge ids
# (0 bottom, 1 right, 2 top, 3 left).  Corner order for the case index:
# bit0 = (i, j), bit1 = (i+1, j), bit2 = (i+1, j+1), bit3 = (i, j+1),
# set when the value is >= the level.
_CASES = {
    0: [], 15: [],
    1: [(3, 0)], 14: [(3, 0)],
    2: [(0, 1)], 13: [(0, 1)],
    3: [(3, 1)], 12: [(3, 1)],
    4: [(1, 2)], 11: [(1, 2)],
    6: [(0, 2)], 9: [(0, 2)],
    7: [(3, 2)], 8: [(3, 2)],
    # saddles resolved by the cell-center average
    5: None, 10: None,
}


def _interp(p0, p1, v0, v1, c):
    t = 0.5 if v1 == v0 else (c - v0) / (v1 - v0)
    t = min(max(t, 0.0), 1.0)
    return p0 + t * (p1 - p0)


def extract_level_polylines(xs, ys, values, c):
    """Polylines of the level set {value = c} on the tensor grid xs x ys.

    ``values`` has shape (len(xs), len(ys)) with values[i, j] at (xs[i],
    ys[j]).  Returns a list of (k, 2) arrays; closed loops repeat their
    first point at the end.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    V = np.asarray(values, dtype=float)
    nx, ny = V.shape
    above = V >= c

    # edge keys: ("h", i, j) joins (i, j)-(i+1, j); ("v", i, j) joins (i, j)-(i, j+1)
    pts = {}
    adj = {}

    def edge_point(kind, i, j):
        key = (kind, i, j)
        if key not in pts:
            if kind == "h":
                p0 = np.array([xs[i], ys[j]])
                p1 = np.array([xs[i + 1], ys[j]])
                v0, v1 = V[i, j], V[i + 1, j]
            else:
                p0 = np.array([xs[i], ys[j]])
                p1 = np.array([xs[i], ys[j + 1]])
                v0, v1 = V[i, j], V[i, j + 1]
            pts[key] = _interp(p0, p1, v0, v1, c)
        return key

    def local_edge(i, j, e):
        if e == 0:
            return edge_point("h", i, j)
        if e == 1:
            return edge_point("v", i + 1, j)
        if e == 2:
            return edge_point("h", i, j + 1)
        return edge_point("v", i, j)

    for i in range(nx - 1):
        for j in range(ny - 1):
            idx = (int(above[i, j]) | (int(above[i + 1, j]) << 1)
                   | (int(above[i + 1, j + 1]) << 2) | (int(above[i, j + 1]) << 3))
            segs = _CASES[idx]
            if segs is None:  # saddle: split by the center average
                center_above = 0.25 * (V[i, j] + V[i + 1, j] + V[i + 1, j + 1] + V[i, j + 1]) >= c
                if (idx == 5) == center_above:
                    segs = [(3, 0), (1, 2)]
                else:
                    segs = [(3, 2), (0, 1)]
            for e0, e1 in segs:
                k0 = local_edge(i, j, e0)
                k1 = local_edge(i, j, e1)
                adj.setdefault(k0, []).append(k1)
                adj.setdefault(k1, []).append(k0)

    return [np.array([pts[k] for k in chain]) for chain in _chain_edges(adj)]


def _chain_edges(adj):
    """Walk the edge-adjacency graph into open chains, then closed loops."""
    visited = set()
    chains = []

    def walk(start, first):
        chain = [start, first]
        visited.add(_pair(start, first))
        while True:
            here = chain[-1]
            nxt = None
            for cand in adj[here]:
                if _pair(here, cand) not in visited:
                    nxt = cand
                    break
            if nxt is None:
                return chain
            visited.add(_pair(here, nxt))
            chain.append(nxt)

    ends = sorted(k for k, nb in adj.items() if len(nb) == 1)
    for k in ends:
        for nb in adj[k]:
            if _pair(k, nb) not in visited:
                chains.append(walk(k, nb))
    for k in sorted(adj):
        for nb in adj[k]:
            if _pair(k, nb) not in visited:
                chains.append(walk(k, nb))
    return chains


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


def newton_correct(points, fn, grad, c, eps=1e-12):
    """One Newton step x -> x - (fn(x) - c) grad / |grad|^2 per point."""
    out = []
    for p in points:
        g = grad(p)
        g2 = float(np.dot(g, g))
        if g2 > eps:
            p = p - (fn(p) - c) * g / g2
        out.append(p)
    return np.asarray(out)
