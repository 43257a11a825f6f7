"""Closed conformal vector fields and warped-product ambient spaces.

A field X is closed conformal when its ambient covariant derivative along
any Y equals phi * Y for a scalar function phi.  Three kinds are supported:
constant fields (phi = 0), radial fields (phi = 1), and the vertical field
of a warped product I x_rho R^n (phi = rho' at the height coordinate).
"""

import numpy as np

from . import derivatives as der
from .config import DEFAULTS
from .errors import ZeroFieldError
from .immersion import EUCLIDEAN, EuclideanAmbient


class WarpedProduct:
    """Ambient I x_rho R^n with metric dt^2 + rho(t)^2 * (flat base metric).

    Points are coordinate vectors (t, x_1, ..., x_n).  The base is flat, so
    its Ricci curvature vanishes identically.  Slices {t} x R^n carry
    rho(t)^2 times the flat metric.
    """

    ricci_base = 0.0

    def __init__(self, interval, base_dim, rho=None, rho_prime=None, name=""):
        self.interval = (float(interval[0]), float(interval[1]))
        self.base_dim = int(base_dim)
        self._flat = rho is None
        self._rho = rho if rho is not None else (lambda t: 1.0)
        if rho is not None and rho_prime is None:
            raise ValueError("rho_prime callback required alongside rho")
        self._rho_prime = rho_prime if rho_prime is not None else (lambda t: 0.0)
        self.name = name
        for t in np.linspace(*self.interval, 65):
            if self._rho(t) <= 0.0:
                raise ValueError(f"warping function must be positive; rho({t:g}) <= 0")

    @classmethod
    def flat(cls, base_dim, interval=(-10.0, 10.0)):
        return cls(interval, base_dim, name="flat product")

    @property
    def dim(self):
        return self.base_dim + 1

    @property
    def is_flat(self):
        return self._flat

    def rho(self, t):
        return float(self._rho(t))

    def rho_prime(self, t):
        return float(self._rho_prime(t))

    def leaf_metric_scale(self, t):
        return self.rho(t) ** 2

    # -- ambient-space protocol (shared with EuclideanAmbient) -------------

    def inner(self, p, a, b):
        r2 = self.rho(p[0]) ** 2
        return float(a[0] * b[0] + r2 * np.dot(a[1:], b[1:]))

    def christoffel(self, p, a, b):
        """Connection correction Gamma_p(a, b) in (t, x) coordinates."""
        r = self.rho(p[0])
        rp = self.rho_prime(p[0])
        out = np.empty(self.dim)
        out[0] = -r * rp * float(np.dot(a[1:], b[1:]))
        out[1:] = (rp / r) * (a[0] * np.asarray(b[1:]) + b[0] * np.asarray(a[1:]))
        return out

    def metric_inverse_apply(self, p, w):
        out = np.array(w, dtype=float)
        out[1:] /= self.rho(p[0]) ** 2
        return out

    def covariant_derivative(self, Z, p, y, h=1e-5):
        """Ambient covariant derivative of the vector field Z along y at p.

        Coordinate part by central differences, plus the closed-form
        Christoffel contraction.
        """
        p = np.asarray(p, dtype=float)
        y = np.asarray(y, dtype=float)
        coord = der.numerical_derivative(lambda s: Z(p + s * y), 0.0, 1, h, richardson=True)
        return coord + self.christoffel(p, y, Z(p))

    def field(self):
        return ConformalField.warped(self)


class ConformalField:
    """Closed conformal vector field on a Euclidean or warped ambient."""

    def __init__(self, kind, vector=None, center=None, warped=None):
        if kind not in ("constant", "radial", "warped"):
            raise ValueError(f"unknown field kind {kind!r}")
        self.kind = kind
        self.vector = None if vector is None else np.asarray(vector, dtype=float)
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.warped_product = warped

    @classmethod
    def constant(cls, vector):
        return cls("constant", vector=vector)

    @classmethod
    def radial(cls, center=(0.0, 0.0, 0.0)):
        return cls("radial", center=center)

    @classmethod
    def warped(cls, W):
        return cls("warped", warped=W)

    @property
    def ambient(self):
        return self.warped_product if self.kind == "warped" else EUCLIDEAN

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "constant":
            return self.vector.copy()
        if self.kind == "radial":
            return p - self.center
        out = np.zeros(p.size)
        out[0] = self.warped_product.rho(p[0])
        return out

    def phi(self, p):
        """Conformal factor at p."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "radial":
            return 1.0
        return self.warped_product.rho_prime(p[0])

    def norm(self, p):
        x = self(p)
        return float(np.sqrt(self.ambient.inner(np.asarray(p, dtype=float), x, x)))

    def unit(self, p):
        n = self.norm(p)
        if n < DEFAULTS.eps_regular:
            raise ZeroFieldError(f"|X| = {n:.3e} at {p}")
        return self(p) / n

    def height(self, p):
        """Coordinate along the field's local product splitting.

        Constant field: signed offset along the field direction; radial:
        distance from the center; warped: the t coordinate.  |X| and phi are
        functions of this height alone (constant on each leaf).
        """
        p = np.asarray(p, dtype=float)
        if self.kind == "constant":
            return float(np.dot(p, self.vector) / np.linalg.norm(self.vector))
        if self.kind == "radial":
            return float(np.linalg.norm(p - self.center))
        return float(p[0])

    def conformal_residual(self, p, y, h=1e-5):
        """| covariant derivative of X along y, minus phi * y | at p."""
        p = np.asarray(p, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "warped":
            cov = self.warped_product.covariant_derivative(self.__call__, p, y, h)
        else:
            cov = der.numerical_derivative(lambda s: self(p + s * y), 0.0, 1, h, richardson=True)
        diff = cov - self.phi(p) * y
        return float(np.sqrt(self.ambient.inner(p, diff, diff)))
