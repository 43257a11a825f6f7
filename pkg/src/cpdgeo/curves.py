"""Plane curves with Frenet data, profile curves, and arc-length reparametrization.

Frenet convention used throughout: for a unit-speed plane curve,
T' = kappa * eta and eta' = -kappa * T, with eta the +90-degree rotation
of T.  On a counterclockwise unit circle this makes eta point inward and
kappa = +1.
"""

import numpy as np
from scipy.integrate import cumulative_simpson, quad
from scipy.interpolate import PchipInterpolator

from . import derivatives as der
from .config import DEFAULTS
from .errors import DegenerateCurveError, DomainError


def rot90(v):
    """+90-degree rotation in the plane: (x, y) -> (-y, x)."""
    return np.array([-v[1], v[0]])


class Plane:
    """Affine 2-plane in R^3 carrying an orthonormal frame (e1, e2).

    The frame normal e1 x e2 is the distinguished direction orthogonal to
    every curve drawn in the plane.
    """

    def __init__(self, origin=(0.0, 0.0, 0.0), e1=(1.0, 0.0, 0.0), e2=(0.0, 1.0, 0.0)):
        self.origin = np.asarray(origin, dtype=float)
        self.e1 = np.asarray(e1, dtype=float)
        self.e2 = np.asarray(e2, dtype=float)
        if abs(np.dot(self.e1, self.e2)) > 1e-12 or abs(np.linalg.norm(self.e1) - 1) > 1e-12 \
                or abs(np.linalg.norm(self.e2) - 1) > 1e-12:
            raise ValueError("plane frame must be orthonormal")

    @property
    def normal(self):
        return np.cross(self.e1, self.e2)

    def embed_point(self, xy):
        return self.origin + xy[0] * self.e1 + xy[1] * self.e2

    def embed_vector(self, v):
        return v[0] * self.e1 + v[1] * self.e2


class PlaneCurve:
    """Curve in the plane evaluated by arc length, with Frenet data.

    Closed-form derivative callbacks are used when supplied; otherwise
    central differences with step ``fd_step`` (scaled by the domain extent)
    are used, and evaluation is restricted to points at least two steps
    from the ends of the domain.
    """

    def __init__(self, eval2, domain, deriv=None, deriv2=None, curvature=None,
                 curvature_deriv=None, plane=None, fd_step=None, periodic=False,
                 name=""):
        self._eval = eval2
        self.domain = (float(domain[0]), float(domain[1]))
        self._deriv = deriv
        self._deriv2 = deriv2
        self._curvature = curvature
        self._curvature_deriv = curvature_deriv
        self.plane = plane
        self.periodic = periodic
        self.name = name
        extent = self.domain[1] - self.domain[0]
        self.fd_step = (fd_step if fd_step is not None else DEFAULTS.fd_step) * max(1.0, extent)

    # -- parameter bookkeeping -------------------------------------------

    @property
    def uses_fd(self):
        return self._deriv is None or (self._deriv2 is None and self._curvature is None)

    def usable_domain(self):
        a, b = self.domain
        if self.periodic or not self.uses_fd:
            return a, b
        pad = 2.0 * self.fd_step
        return a + pad, b - pad

    def _check_s(self, s):
        a, b = self.usable_domain()
        if s < a - 1e-12 or s > b + 1e-12:
            raise DomainError(f"s={s:g} outside usable domain [{a:g}, {b:g}]")

    def sample(self, n):
        a, b = self.usable_domain()
        return np.linspace(a, b, n)

    # -- geometry ---------------------------------------------------------

    def point(self, s):
        return np.asarray(self._eval(s), dtype=float)

    def velocity(self, s):
        if self._deriv is not None:
            return np.asarray(self._deriv(s), dtype=float)
        self._check_s(s)
        return der.numerical_derivative(self.point, s, 1, self.fd_step, richardson=True)

    def tangent(self, s):
        v = self.velocity(s)
        nv = np.linalg.norm(v)
        if nv < DEFAULTS.eps_regular:
            raise DegenerateCurveError(f"|gamma'({s:g})| = {nv:.3e} below regularity threshold")
        return v / nv

    def normal(self, s):
        return rot90(self.tangent(s))

    def curvature(self, s):
        """Signed curvature; equals (x'y'' - y'x'') / |v|^3 for any parametrization."""
        if self._curvature is not None:
            return float(self._curvature(s))
        v = self.velocity(s)
        if self._deriv2 is not None:
            a = np.asarray(self._deriv2(s), dtype=float)
        else:
            self._check_s(s)
            a = der.numerical_derivative(self.velocity if self._deriv else self.point,
                                         s, 1 if self._deriv else 2,
                                         self.fd_step, richardson=self._deriv is not None)
        speed = np.linalg.norm(v)
        if speed < DEFAULTS.eps_regular:
            raise DegenerateCurveError(f"|gamma'({s:g})| = {speed:.3e} below regularity threshold")
        return float((v[0] * a[1] - v[1] * a[0]) / speed**3)

    def curvature_derivative(self, s):
        if self._curvature_deriv is not None:
            return float(self._curvature_deriv(s))
        h = self.fd_step
        a, b = self.usable_domain()
        if not self.periodic:
            h = min(h, max((b - s) / 2.1, 1e-12), max((s - a) / 2.1, 1e-12))
        return der.numerical_derivative(self.curvature, s, 1, h, richardson=True)

    def frenet(self, s):
        """(T, eta, kappa) at arc length s, in plane coordinates."""
        T = self.tangent(s)
        return T, rot90(T), self.curvature(s)

    # -- embedding into an ambient plane ------------------------------------

    def point_ambient(self, s):
        p = self.point(s)
        return self.plane.embed_point(p) if self.plane is not None else p

    def tangent_ambient(self, s):
        T = self.tangent(s)
        return self.plane.embed_vector(T) if self.plane is not None else T

    def normal_ambient(self, s):
        n = self.normal(s)
        return self.plane.embed_vector(n) if self.plane is not None else n

    # -- diagnostics --------------------------------------------------------

    def max_unit_speed_violation(self, n=101):
        return max(abs(np.linalg.norm(self.velocity(s)) - 1.0) for s in self.sample(n))

    def length(self):
        return self.domain[1] - self.domain[0]


def frenet_frame(curve, s):
    """Frenet data (T, eta, kappa) of a unit-speed plane curve at s.

    Raises DomainError when s is too close to the ends for the curve's
    finite-difference stencils.
    """
    return curve.frenet(s)


def arclength_reparam(curve, n_samples=257):
    """Reparametrize a regular plane curve by arc length.

    Tabulates cumulative length with composite Simpson quadrature on a dense
    grid, inverts the table with a monotone (PCHIP) spline, and returns a
    unit-speed PlaneCurve on [0, L].  The returned curve differentiates
    through the original parametrization, so its velocity is exactly unit
    and its curvature is the invariant (x'y'' - y'x'') / |v|^3.
    """
    a, b = curve.domain
    n_dense = max(4 * n_samples + 1, 1025)
    if n_dense % 2 == 0:
        n_dense += 1
    t_tab = np.linspace(a, b, n_dense)
    speeds = np.array([np.linalg.norm(curve.velocity(t)) for t in t_tab])
    bad = np.nonzero(speeds < DEFAULTS.eps_regular)[0]
    if bad.size:
        raise DegenerateCurveError(
            f"curve is not regular: |gamma'({t_tab[bad[0]]:g})| = {speeds[bad[0]]:.3e}"
        )
    s_tab = np.concatenate([[0.0], cumulative_simpson(speeds, x=t_tab)])
    total = float(s_tab[-1])
    t_of_s = PchipInterpolator(s_tab, t_tab)

    def eval2(s):
        return curve.point(float(t_of_s(np.clip(s, 0.0, total))))

    def deriv(s):
        t = float(t_of_s(np.clip(s, 0.0, total)))
        v = curve.velocity(t)
        return v / np.linalg.norm(v)

    def curvature(s):
        return curve.curvature(float(t_of_s(np.clip(s, 0.0, total))))

    def deriv2(s):
        # unit-speed second derivative is kappa * eta by the Frenet relations
        T = deriv(s)
        return curvature(s) * rot90(T)

    return PlaneCurve(eval2, (0.0, total), deriv=deriv, deriv2=deriv2,
                      curvature=curvature, plane=curve.plane,
                      periodic=curve.periodic, name=curve.name or "reparametrized")


# ---------------------------------------------------------------------------
# stock curves


def circle_curve(radius=1.0, center=(0.0, 0.0), plane=None):
    """Unit-speed counterclockwise circle; kappa = 1/radius, eta inward."""
    r = float(radius)
    cx, cy = center

    def eval2(s):
        return np.array([cx + r * np.cos(s / r), cy + r * np.sin(s / r)])

    def deriv(s):
        return np.array([-np.sin(s / r), np.cos(s / r)])

    def deriv2(s):
        return np.array([-np.cos(s / r), -np.sin(s / r)]) / r

    return PlaneCurve(eval2, (0.0, 2.0 * np.pi * r), deriv=deriv, deriv2=deriv2,
                      curvature=lambda s: 1.0 / r, curvature_deriv=lambda s: 0.0,
                      plane=plane, periodic=True, name=f"circle(r={r:g})")


def line_curve(point=(0.0, 0.0), direction=(1.0, 0.0), length=1.0, plane=None):
    """Unit-speed straight segment; kappa = 0."""
    p0 = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return PlaneCurve(lambda s: p0 + s * d, (0.0, float(length)),
                      deriv=lambda s: d, deriv2=lambda s: np.zeros(2),
                      curvature=lambda s: 0.0, curvature_deriv=lambda s: 0.0,
                      plane=plane, name="line")


def ellipse_curve(a=2.0, b=1.0, n_samples=513, plane=None):
    """Arc-length reparametrization of the ellipse (a cos u, b sin u)."""
    aa, bb = float(a), float(b)

    def eval2(u):
        return np.array([aa * np.cos(u), bb * np.sin(u)])

    def deriv(u):
        return np.array([-aa * np.sin(u), bb * np.cos(u)])

    def deriv2(u):
        return np.array([-aa * np.cos(u), -bb * np.sin(u)])

    raw = PlaneCurve(eval2, (0.0, 2.0 * np.pi), deriv=deriv, deriv2=deriv2,
                     plane=plane, periodic=True, name=f"ellipse({aa:g},{bb:g})")
    return arclength_reparam(raw, n_samples)


def curve_length_quadrature(curve, tol=1e-12):
    """Adaptive-quadrature arc length of a parametric curve (oracle-grade)."""
    a, b = curve.domain
    val, _ = quad(lambda t: np.linalg.norm(curve.velocity(t)), a, b,
                  epsabs=tol, epsrel=tol, limit=200)
    return float(val)


class ProfileCurve:
    """Unit-speed planar profile (f(t), g(t)).

    f is the offset along the base normal eta, g the offset along the
    distinguished direction.  g' must not vanish on the declared domain.
    """

    def __init__(self, f, g, domain, df=None, dg=None, d2f=None, d2g=None,
                 fd_step=None, name=""):
        self._f, self._g = f, g
        self.domain = (float(domain[0]), float(domain[1]))
        self._df, self._dg = df, dg
        self._d2f, self._d2g = d2f, d2g
        self.name = name
        extent = self.domain[1] - self.domain[0]
        self.fd_step = (fd_step if fd_step is not None else DEFAULTS.fd_step) * max(1.0, extent)

    def f(self, t):
        return float(self._f(t))

    def g(self, t):
        return float(self._g(t))

    def fp(self, t):
        if self._df is not None:
            return float(self._df(t))
        return der.numerical_derivative(self._f, t, 1, self.fd_step, richardson=True)

    def gp(self, t):
        if self._dg is not None:
            return float(self._dg(t))
        return der.numerical_derivative(self._g, t, 1, self.fd_step, richardson=True)

    def fpp(self, t):
        if self._d2f is not None:
            return float(self._d2f(t))
        if self._df is not None:
            return der.numerical_derivative(self._df, t, 1, self.fd_step, richardson=True)
        return der.numerical_derivative(self._f, t, 2, self.fd_step, richardson=True)

    def gpp(self, t):
        if self._d2g is not None:
            return float(self._d2g(t))
        if self._dg is not None:
            return der.numerical_derivative(self._dg, t, 1, self.fd_step, richardson=True)
        return der.numerical_derivative(self._g, t, 2, self.fd_step, richardson=True)

    def beta(self, t):
        return np.array([self.f(t), self.g(t)])

    def sample(self, n):
        a, b = self.domain
        if self._df is None or self._dg is None:
            pad = 2.0 * self.fd_step
            a, b = a + pad, b - pad
        return np.linspace(a, b, n)

    def max_unit_speed_violation(self, n=101):
        return max(abs(self.fp(t) ** 2 + self.gp(t) ** 2 - 1.0) for t in self.sample(n))

    def min_abs_gp(self, n=101):
        return min(abs(self.gp(t)) for t in self.sample(n))


def vertical_profile(t0=0.0, t1=1.0, offset=0.0):
    """Profile (f, g) = (offset, t): sweeps a cylinder over the base curve."""
    return ProfileCurve(lambda t: offset, lambda t: t, (t0, t1),
                        df=lambda t: 0.0, dg=lambda t: 1.0,
                        d2f=lambda t: 0.0, d2g=lambda t: 0.0, name="vertical")


def arc_profile(radius=1.0, t0=0.0, t1=None, f_center=0.0, g_center=0.0):
    """Unit-speed circular arc profile of the given radius."""
    r = float(radius)
    if t1 is None:
        t1 = 0.5 * np.pi * r
    return ProfileCurve(
        lambda t: f_center + r * np.sin(t / r),
        lambda t: g_center + r * (1.0 - np.cos(t / r)),
        (t0, t1),
        df=lambda t: np.cos(t / r),
        dg=lambda t: np.sin(t / r),
        d2f=lambda t: -np.sin(t / r) / r,
        d2g=lambda t: np.cos(t / r) / r,
        name=f"arc(r={r:g})",
    )
