"""Transnormal functions: |grad F| = b(F).

Pipeline: a positive profile b is integrated into a monotone map h with
h_inverse(s) = integral from s0 to s of 1/b, a signed distance field d to a
base hypersurface L is queried geometrically, and F = h(d) then satisfies
the generalized eikonal equation on the tube around L (off L itself).
"""

from dataclasses import dataclass, field

import numpy as np

from . import derivatives as der
from .config import DEFAULTS
from .construct import GraphFunction
from .curves import PlaneCurve
from .errors import DomainError, OutsideTubeError, SingularIntegrandError
from .levelset import extract_level_polylines, newton_correct
from .polyline import Polyline


# ---------------------------------------------------------------------------
# quadrature


def adaptive_simpson(f, a, b, tol=None, max_depth=50):
    """Classic adaptive Simpson quadrature."""
    tol = DEFAULTS.quad_tol if tol is None else tol
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _asimp(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _asimp(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    if depth <= 0 or abs(left + right - whole) < 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return (_asimp(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + _asimp(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1))


def composite_simpson(f, a, b, n_panels):
    """Fixed composite Simpson rule (order 4); used for order-of-accuracy tests."""
    xs = np.linspace(a, b, 2 * n_panels + 1)
    ys = np.array([f(x) for x in xs])
    h = (b - a) / (2 * n_panels)
    return h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum())


# ---------------------------------------------------------------------------
# h from b


class MonotoneMapPair:
    """Strictly monotone map h and its inverse, built from a positive profile b.

    h_inverse(s) = integral from s0 to s of 1/b(sigma); h inverts it by
    bisection on a tabulation followed by two Newton steps using
    (h_inverse)'(s) = 1/b(s).
    """

    def __init__(self, b, s0, s_range, n_nodes=129, quad_tol=None):
        self.b = b
        self.s0 = float(s0)
        self.s_range = (float(s_range[0]), float(s_range[1]))
        if not (self.s_range[0] <= self.s0 <= self.s_range[1]):
            raise ValueError(f"anchor s0={s0:g} outside range {s_range}")
        self.quad_tol = DEFAULTS.quad_tol if quad_tol is None else quad_tol

        def integrand(s):
            v = b(s)
            if v < DEFAULTS.eps_b:
                raise SingularIntegrandError(f"b({s:g}) = {v:.3e} below threshold")
            return 1.0 / v

        self._integrand = integrand
        self._s_nodes = np.linspace(self.s_range[0], self.s_range[1], n_nodes)
        u = np.empty(n_nodes)
        k0 = int(np.argmin(np.abs(self._s_nodes - self.s0)))
        u[k0] = adaptive_simpson(integrand, self.s0, self._s_nodes[k0], self.quad_tol)
        for k in range(k0 + 1, n_nodes):
            u[k] = u[k - 1] + adaptive_simpson(integrand, self._s_nodes[k - 1],
                                               self._s_nodes[k], self.quad_tol)
        for k in range(k0 - 1, -1, -1):
            u[k] = u[k + 1] - adaptive_simpson(integrand, self._s_nodes[k],
                                               self._s_nodes[k + 1], self.quad_tol)
        self._u_nodes = u
        self.u_range = (float(u[0]), float(u[-1]))

    def h_inverse(self, s):
        """Quadrature of 1/b from the anchor; continuous in s."""
        s = float(s)
        lo, hi = self.s_range
        if s < lo - 1e-12 or s > hi + 1e-12:
            raise DomainError(f"s={s:g} outside tabulated range [{lo:g}, {hi:g}]")
        k = int(np.argmin(np.abs(self._s_nodes - s)))
        return float(self._u_nodes[k]
                     + adaptive_simpson(self._integrand, self._s_nodes[k], s, self.quad_tol))

    def h(self, u):
        """Inverse of h_inverse: bisection to 1e-12 then two Newton steps."""
        u = float(u)
        lo, hi = self.u_range
        if u < lo - 1e-12 or u > hi + 1e-12:
            raise DomainError(f"u={u:g} outside inverse range [{lo:g}, {hi:g}]")
        k = int(np.searchsorted(self._u_nodes, u))
        k = min(max(k, 1), len(self._u_nodes) - 1)
        s_lo, s_hi = self._s_nodes[k - 1], self._s_nodes[k]
        u_lo = self._u_nodes[k - 1]
        # local bisection on the bracketing panel
        f_lo = u_lo - u
        for _ in range(60):
            if s_hi - s_lo < 1e-12 * max(1.0, abs(s_hi)):
                break
            mid = 0.5 * (s_lo + s_hi)
            f_mid = self.h_inverse(mid) - u
            if (f_mid > 0) == (f_lo > 0):
                s_lo, f_lo = mid, f_mid
            else:
                s_hi = mid
        s = 0.5 * (s_lo + s_hi)
        for _ in range(2):
            s = s - (self.h_inverse(s) - u) * self.b(s)
        return float(np.clip(s, self.s_range[0], self.s_range[1]))

    def h_prime(self, u):
        """h' = b o h."""
        return float(self.b(self.h(u)))

    def max_roundtrip_error(self, n=101):
        us = np.linspace(*self.u_range, n + 2)[1:-1]
        return max(abs(self.h_inverse(self.h(u)) - u) for u in us)


def h_from_b(b, s0, s_range, n_nodes=129, quad_tol=None):
    """Monotone map pair (h, h_inverse) from a positive profile b.

    Raises SingularIntegrandError when b dips below the positivity
    threshold on the requested range.
    """
    return MonotoneMapPair(b, s0, s_range, n_nodes, quad_tol)


def _expand_s_range(b, s0, u_lo, u_hi, step=1e-3):
    """Integrate ds/du = b(s) from (0, s0) out to u_lo < 0 < u_hi (RK4)."""
    def sweep(target):
        u, s = 0.0, float(s0)
        h = step if target > 0 else -step
        n = int(np.ceil(abs(target) / step))
        for _ in range(n):
            if abs(target - u) < abs(h):
                h = target - u
            k1 = b(s)
            k2 = b(s + 0.5 * h * k1)
            k3 = b(s + 0.5 * h * k2)
            k4 = b(s + h * k3)
            if min(k1, k2, k3, k4) < DEFAULTS.eps_b:
                raise SingularIntegrandError("b vanishes inside the requested tube")
            s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            u += h
        return s
    lo = sweep(u_lo) if u_lo < 0 else s0
    hi = sweep(u_hi) if u_hi > 0 else s0
    return lo, hi


# ---------------------------------------------------------------------------
# distance sources


class CircleBase:
    """Analytic circle with closed-form signed distance (positive outside)."""

    def __init__(self, radius=1.0, center=(0.0, 0.0)):
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)

    def signed_distance(self, x, tube=None):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x - self.center)
        d = r - self.radius
        if tube is not None and abs(d) > tube:
            raise OutsideTubeError(f"|d|={abs(d):.6g} exceeds tube radius {tube:g}")
        if r < 1e-300:
            raise OutsideTubeError("query at the circle center (cut locus)")
        nearest = self.center + self.radius * (x - self.center) / r
        return float(d), nearest

    def distance_gradient(self, x):
        x = np.asarray(x, dtype=float)
        v = x - self.center
        return v / np.linalg.norm(v)

    def distance_hessian(self, x):
        x = np.asarray(x, dtype=float)
        v = x - self.center
        r = np.linalg.norm(v)
        rh = v / r
        return (np.eye(2) - np.outer(rh, rh)) / r


class LineBase:
    """Analytic straight line with closed-form signed distance."""

    def __init__(self, point=(0.0, 0.0), normal=(0.0, 1.0)):
        self.point = np.asarray(point, dtype=float)
        n = np.asarray(normal, dtype=float)
        self.normal = n / np.linalg.norm(n)

    def signed_distance(self, x, tube=None):
        x = np.asarray(x, dtype=float)
        d = float(np.dot(x - self.point, self.normal))
        if tube is not None and abs(d) > tube:
            raise OutsideTubeError(f"|d|={abs(d):.6g} exceeds tube radius {tube:g}")
        return d, x - d * self.normal

    def distance_gradient(self, x):
        return self.normal.copy()

    def distance_hessian(self, x):
        return np.zeros((2, 2))


def signed_distance(L, x, tube=None):
    """Signed distance and nearest point to a base hypersurface L.

    L may be a Polyline, an analytic base (CircleBase/LineBase), or a
    unit-speed PlaneCurve (projected by dense sampling plus Newton
    polishing, signed by the curve normal).
    """
    if isinstance(L, Polyline):
        return L.signed_distance(x, tube=tube)
    if hasattr(L, "signed_distance"):
        return L.signed_distance(x, tube=tube)
    if isinstance(L, PlaneCurve):
        return _curve_signed_distance(L, x, tube=tube)
    raise TypeError(f"unsupported base type {type(L).__name__}")


def _curve_signed_distance(curve, x, tube=None, n_seed=1024):
    x = np.asarray(x, dtype=float)
    ss = curve.sample(n_seed)
    d2 = np.array([float(np.dot(curve.point(s) - x, curve.point(s) - x)) for s in ss])
    s = float(ss[int(np.argmin(d2))])
    for _ in range(4):  # Newton on <gamma(s) - x, gamma'(s)> = 0
        p = curve.point(s)
        v = curve.velocity(s)
        num = float(np.dot(p - x, v))
        den = float(np.dot(v, v) + np.dot(p - x, curve.curvature(s) * np.array([-v[1], v[0]])))
        if abs(den) < 1e-14:
            break
        s_new = s - num / den
        lo, hi = curve.usable_domain()
        s = float(np.clip(s_new, lo, hi))
    p = curve.point(s)
    d = float(np.linalg.norm(x - p))
    sign = 1.0 if float(np.dot(x - p, curve.normal(s))) >= 0.0 else -1.0
    if tube is not None and d > tube:
        raise OutsideTubeError(f"|d|={d:.6g} exceeds tube radius {tube:g}")
    return sign * d, p


# ---------------------------------------------------------------------------
# the transnormal construction


@dataclass
class TransnormalSpec:
    """Inputs of the distance-based transnormal construction.

    ``side`` restricts F = h(d) to one side of L ("positive"/"negative"),
    to both sides ("both"), or uses the unsigned distance ("unsigned").
    ``domain`` is the rectangle on which the resulting function is exposed;
    it must stay inside the tube (queries outside fail loudly).
    """

    b: callable
    s0: float
    base: object
    tube: float
    domain: list
    side: str = "positive"
    bp: callable = None
    gradient_mode: str = "fd"     # "fd" (differences of d) or "geometric"
    n_nodes: int = 129
    fd_step: float = 1e-6
    maps: MonotoneMapPair = field(default=None, repr=False)

    def __post_init__(self):
        if self.side not in ("positive", "negative", "both", "unsigned"):
            raise ValueError(f"unknown side {self.side!r}")
        if self.gradient_mode not in ("fd", "geometric"):
            raise ValueError(f"unknown gradient_mode {self.gradient_mode!r}")
        if self.maps is None:
            pad = 1.0 + 1e-6
            u_lo = -self.tube * pad if self.side in ("negative", "both") else 0.0
            u_hi = self.tube * pad if self.side in ("positive", "both", "unsigned") else 0.0
            s_lo, s_hi = _expand_s_range(self.b, self.s0, u_lo, u_hi)
            self.maps = h_from_b(self.b, self.s0, (min(s_lo, s_hi), max(s_lo, s_hi)),
                                 self.n_nodes)

    def distance(self, x):
        d, nearest = signed_distance(self.base, x, tube=self.tube)
        if self.side == "positive" and d <= 0:
            raise DomainError(f"query {x} on the wrong side of the base (d={d:.3g})")
        if self.side == "negative" and d >= 0:
            raise DomainError(f"query {x} on the wrong side of the base (d={d:.3g})")
        if self.side == "unsigned":
            d = abs(d)
        return d, nearest


def transnormal_from_distance(spec):
    """F = h o d as a GraphFunction on the spec's rectangle.

    The gradient is assembled by the chain rule: h' = b o h evaluated in
    closed form, times the gradient of the distance field (finite
    differences by default, or the exact geometric direction).  When the
    base provides closed-form distance derivatives, a Hessian callback is
    attached as well (requires bp = b').
    """
    maps = spec.maps

    def f(x):
        d, _ = spec.distance(x)
        return maps.h(d)

    def dist_value(x):
        return spec.distance(x)[0]

    def grad_d(x):
        if spec.gradient_mode == "geometric":
            d, nearest = spec.distance(x)
            diff = np.asarray(x, dtype=float) - nearest
            g = diff / np.linalg.norm(diff)
            return g if d >= 0 or spec.side != "unsigned" else -g
        return der.fd_gradient(dist_value, x, spec.fd_step)

    def grad(x):
        F = f(x)
        return spec.b(F) * grad_d(x)

    hess = None
    if spec.bp is not None and hasattr(spec.base, "distance_hessian"):
        def hess(x):
            d, _ = spec.distance(x)
            F = maps.h(d)
            bF = spec.b(F)
            gd = spec.base.distance_gradient(x)
            Hd = spec.base.distance_hessian(x)
            return spec.bp(F) * bF * np.outer(gd, gd) + bF * Hd

    return GraphFunction(f, spec.domain, grad=grad, hess=hess,
                         name=f"transnormal[{type(spec.base).__name__}]")


# ---------------------------------------------------------------------------
# residuals and level sets


@dataclass
class ResidualStats:
    """Grid statistics of a pointwise residual."""

    max: float
    mean: float
    worst_point: tuple
    n_points: int
    tol: float
    per_point: np.ndarray = field(repr=False, default=None)

    @property
    def passed(self):
        return self.max <= self.tol


def eikonal_residual(F, b, grid_axes, tol=None):
    """Statistics of | |grad F| - b(F) | over a tensor grid of base points."""
    tol = DEFAULTS.tol_eik if tol is None else tol
    xs, ys = grid_axes
    vals = []
    worst = (None, -1.0)
    for x in xs:
        for y in ys:
            p = np.array([x, y])
            r = abs(float(np.linalg.norm(F.gradient(p))) - float(b(F.value(p))))
            vals.append(r)
            if r > worst[1]:
                worst = ((float(x), float(y)), r)
    vals = np.asarray(vals)
    return ResidualStats(max=float(vals.max()), mean=float(vals.mean()),
                         worst_point=worst[0], n_points=vals.size, tol=tol,
                         per_point=vals)


def level_set_extract(F, c, grid_axes, newton=True):
    """Polylines of {F = c} on the grid, with one Newton correction.

    Uses marching squares on the sampled values; cells without a crossing
    contribute nothing, so an empty list is a valid result.
    """
    xs, ys = grid_axes
    V = np.array([[F.value(np.array([x, y])) for y in ys] for x in xs])
    polys = extract_level_polylines(xs, ys, V, c)
    if not newton:
        return polys
    return [newton_correct(p, lambda q: F.value(q), lambda q: F.gradient(q), c)
            for p in polys]
