"""Parametric immersions, fundamental forms, and shape-operator extraction.

Conventions: the first fundamental form is G_ij = <d_i phi, d_j phi>, the
second fundamental form is B_ij = <dd_ij phi + Gamma(d_i, d_j), xi> for a
unit normal xi, the shape operator is A = G^-1 B, and the mean curvature is
the trace of A (sum of principal curvatures, not the average).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import derivatives as der
from .config import DEFAULTS
from .errors import DomainError, ImmersionDegeneracyError


class EuclideanAmbient:
    """Flat ambient space: dot-product metric, vanishing connection terms."""

    def inner(self, p, a, b):
        return float(np.dot(a, b))

    def christoffel(self, p, a, b):
        return np.zeros(np.asarray(p).size)


EUCLIDEAN = EuclideanAmbient()


def generalized_cross(rows):
    """Vector orthogonal to n given vectors in R^(n+1), by cofactor expansion.

    The sign is fixed so that stacking the result on top of the inputs gives
    a positively oriented matrix.
    """
    V = np.asarray(rows, dtype=float)
    n, m = V.shape
    if m != n + 1:
        raise ValueError(f"need {m - 1} vectors in R^{m}, got {n}")
    out = np.empty(m)
    cols = np.arange(m)
    for k in range(m):
        minor = V[:, cols != k]
        out[k] = (-1.0) ** k * np.linalg.det(minor)
    return out


class ParametricImmersion:
    """Evaluable immersion of a parameter box into an ambient space.

    Derivative strategy is per-object: closed-form jacobian/second-partial
    callbacks are used when supplied, otherwise central differences with a
    per-axis step scaled by the domain extent.  All evaluators are pure;
    instances are safe to query concurrently after construction.
    """

    def __init__(self, eval_fn, domain, jacobian=None, second=None, normal=None,
                 ambient=None, fd_step=None, name=""):
        self._eval = eval_fn
        self.domain = [(float(lo), float(hi)) for lo, hi in domain]
        self.n_params = len(self.domain)
        self._jacobian = jacobian
        self._second = second
        self._normal = normal
        self.ambient = ambient if ambient is not None else EUCLIDEAN
        self.name = name
        base = fd_step if fd_step is not None else DEFAULTS.fd_step
        self.fd_steps = np.array([base * max(1.0, hi - lo) for lo, hi in self.domain])
        self.amb_dim = np.asarray(self._eval(self._center())).size

    def _center(self):
        return np.array([(lo + hi) / 2.0 for lo, hi in self.domain])

    @property
    def uses_fd(self):
        return self._jacobian is None or self._second is None

    def usable_domain(self):
        """Domain shrunk so finite-difference stencils stay inside."""
        if not self.uses_fd:
            return list(self.domain)
        out = []
        for (lo, hi), h in zip(self.domain, self.fd_steps):
            pad = 2.5 * h
            out.append((lo + pad, hi - pad))
        return out

    def _check_u(self, u):
        for x, (lo, hi) in zip(u, self.usable_domain()):
            if x < lo - 1e-12 or x > hi + 1e-12:
                raise DomainError(
                    f"parameter {np.asarray(u)} outside usable domain of {self.name or 'immersion'}"
                )

    def point(self, u):
        return np.asarray(self._eval(np.asarray(u, dtype=float)), dtype=float)

    def partials(self, u):
        """Rows J[i] = d phi / d u_i, shape (n_params, amb_dim)."""
        u = np.asarray(u, dtype=float)
        if self._jacobian is not None:
            return np.asarray(self._jacobian(u), dtype=float)
        self._check_u(u)
        rows = []
        for i in range(self.n_params):
            e = np.zeros(self.n_params)
            e[i] = 1.0
            rows.append(der.numerical_derivative(
                lambda s: self._eval(u + s * e), 0.0, 1, self.fd_steps[i], richardson=True))
        return np.vstack(rows)

    def second_partials(self, u):
        """S[i, j] = dd phi / du_i du_j, shape (n, n, amb_dim), symmetrized."""
        u = np.asarray(u, dtype=float)
        n = self.n_params
        if self._second is not None:
            S = np.asarray(self._second(u), dtype=float)
        elif self._jacobian is not None:
            self._check_u(u)
            S = np.empty((n, n, self.amb_dim))
            for j in range(n):
                e = np.zeros(n)
                e[j] = 1.0
                dJ = der.numerical_derivative(
                    lambda s: self._jacobian(u + s * e), 0.0, 1,
                    self.fd_steps[j], richardson=True)
                S[:, j, :] = dJ
        else:
            self._check_u(u)
            S = np.empty((n, n, self.amb_dim))
            for i in range(n):
                ei = np.zeros(n)
                ei[i] = 1.0
                S[i, i] = der.numerical_derivative(
                    lambda s: self._eval(u + s * ei), 0.0, 2, self.fd_steps[i])
                for j in range(i + 1, n):
                    ej = np.zeros(n)
                    ej[j] = 1.0
                    hi, hj = self.fd_steps[i], self.fd_steps[j]
                    S[i, j] = (self.point(u + hi * ei + hj * ej)
                               - self.point(u + hi * ei - hj * ej)
                               - self.point(u - hi * ei + hj * ej)
                               + self.point(u - hi * ei - hj * ej)) / (4.0 * hi * hj)
                    S[j, i] = S[i, j]
        return 0.5 * (S + S.transpose(1, 0, 2))

    def unit_normal(self, u):
        """Unit normal (in the ambient metric); hypersurfaces only."""
        u = np.asarray(u, dtype=float)
        p = self.point(u)
        if self._normal is not None:
            nu = np.asarray(self._normal(u), dtype=float)
        else:
            if self.amb_dim != self.n_params + 1:
                raise ValueError("default normal requires codimension one")
            w = generalized_cross(self.partials(u))
            if isinstance(self.ambient, EuclideanAmbient):
                nu = w
            else:
                # w is Euclidean-orthogonal to the tangents; G^-1 w is
                # orthogonal in the ambient metric
                nu = self.ambient.metric_inverse_apply(p, w)
        norm = np.sqrt(self.ambient.inner(p, nu, nu))
        if norm < DEFAULTS.eps_regular:
            raise ImmersionDegeneracyError(f"degenerate normal at {u}")
        return nu / norm

    def metric(self, u):
        return fundamental_forms(self, u)[0]

    def grid(self, shape, margin=0.05):
        """Axis arrays of an interior grid (fraction ``margin`` trimmed per end)."""
        axes = []
        for (lo, hi), n in zip(self.usable_domain(), shape):
            pad = margin * (hi - lo)
            axes.append(np.linspace(lo + pad, hi - pad, n))
        return axes


def fundamental_forms(M, u, xi=None, tol_orth=None):
    """First and second fundamental forms of M at parameter point u.

    xi defaults to the immersion's unit normal; a supplied xi must be unit
    and orthogonal to the first partials within tol_orth.
    """
    tol_orth = DEFAULTS.tol_orth if tol_orth is None else tol_orth
    u = np.asarray(u, dtype=float)
    p = M.point(u)
    J = M.partials(u)
    n = J.shape[0]
    amb = M.ambient
    G = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = amb.inner(p, J[i], J[j])
    scale = max(1.0, float(np.abs(G).max()))
    if np.linalg.det(G) <= DEFAULTS.eps_det * scale**n:
        raise ImmersionDegeneracyError(
            f"metric determinant {np.linalg.det(G):.3e} at {u} (partials dependent)")
    if xi is None:
        xi = M.unit_normal(u)
    else:
        xi = np.asarray(xi, dtype=float)
        if abs(amb.inner(p, xi, xi) - 1.0) > 1e-8:
            raise ValueError("xi is not unit in the ambient metric")
        worst = max(abs(amb.inner(p, xi, J[i])) for i in range(n))
        if worst > tol_orth:
            raise ValueError(f"xi not orthogonal to the tangent space (residual {worst:.3e})")
    S = M.second_partials(u)
    B = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            vec = S[i, j] + amb.christoffel(p, J[i], J[j])
            B[i, j] = B[j, i] = amb.inner(p, vec, xi)
    return G, B


@dataclass
class ShapeData:
    """Shape-operator data at one parameter point.

    principal_directions holds chart coefficients column-wise, normalized to
    unit metric length; principal_curvatures are sorted ascending.  The mean
    curvature is the trace of the shape operator.
    """

    point: tuple
    metric: np.ndarray
    second_form: np.ndarray
    shape_operator: np.ndarray
    principal_curvatures: np.ndarray
    principal_directions: np.ndarray
    principal_directions_ambient: np.ndarray
    mean_curvature: float
    normal: np.ndarray
    umbilic: bool = False


def _fix_direction_signs(V):
    W = V.copy()
    for k in range(W.shape[1]):
        col = W[:, k]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            W[:, k] = -col
    return W


def shape_data(M, u, orientation=1, eps_umbilic=None):
    """Shape operator, principal curvatures and directions of M at u.

    ``orientation`` (+1/-1) fixes the co-orientation: -1 uses the flipped
    normal, which negates the second form, the operator, all curvatures and
    the mean curvature while keeping the principal directions as lines.
    Near-umbilic points (eigenvalue gap below eps_umbilic) are flagged; the
    directions are still returned, ordered lexicographically for
    determinism, but should be treated as unstable.
    """
    eps_umbilic = DEFAULTS.eps_umbilic if eps_umbilic is None else eps_umbilic
    u = np.asarray(u, dtype=float)
    G, B = fundamental_forms(M, u)
    if orientation < 0:
        B = -B
    lam, V = scipy.linalg.eigh(B, G)
    V = _fix_direction_signs(V)

    gaps = np.diff(lam)
    scale = max(1.0, float(np.abs(lam).max()))
    umbilic = bool(gaps.size and gaps.min() < eps_umbilic * scale)
    if umbilic:
        # order degenerate blocks lexicographically so ties break the same way
        order = sorted(range(lam.size),
                       key=lambda k: (round(float(lam[k]), 9), tuple(np.round(V[:, k], 9))))
        lam = lam[order]
        V = V[:, order]

    A = np.linalg.solve(G, B)
    J = M.partials(u)
    xi = M.unit_normal(u) * (1.0 if orientation >= 0 else -1.0)
    return ShapeData(
        point=tuple(float(x) for x in u),
        metric=G,
        second_form=B,
        shape_operator=A,
        principal_curvatures=lam,
        principal_directions=V,
        principal_directions_ambient=(J.T @ V).T,
        mean_curvature=float(lam.sum()),
        normal=xi,
        umbilic=umbilic,
    )
