"""Constructions of hypersurfaces with a canonical principal direction.

Three routes are provided: sweeping a unit-speed profile along a plane
curve in R^3, the n-dimensional generalization over a base hypersurface
orthogonal to a closed conformal field, and graphs of scalar functions in
warped products.  The projection frame (T, theta, xi) and the gradient
relations between a graph function and the height function live here too.
"""

from dataclasses import dataclass

import numpy as np

from . import derivatives as der
from .config import DEFAULTS
from .curves import Plane, PlaneCurve, ProfileCurve
from .errors import (DomainError, FocalSetError, InconsistentDataError,
                     TransversalityError, ZeroFieldError)
from .fields import ConformalField, WarpedProduct
from .immersion import EUCLIDEAN, ParametricImmersion


class GraphFunction:
    """Scalar function on a flat rectangular base with derivative evaluators.

    gradient/hessian use closed-form callbacks when supplied, otherwise
    central differences of the values.  laplacian is always the trace of
    the hessian.  ``expr`` may hold a symbolic expression (see cpdgeo.expr)
    enabling derivatives of any order.
    """

    def __init__(self, f, domain, grad=None, hess=None, grad_laplacian=None,
                 expr=None, variables=None, fd_step=None, name=""):
        self._f = f
        self.domain = [(float(lo), float(hi)) for lo, hi in domain]
        self.dim = len(self.domain)
        self._grad = grad
        self._hess = hess
        self._grad_laplacian = grad_laplacian
        self.expr = expr
        self.variables = variables
        self.name = name
        base = fd_step if fd_step is not None else DEFAULTS.fd_step
        extent = max(hi - lo for lo, hi in self.domain)
        self.fd_step = base * max(1.0, extent)

    @classmethod
    def from_expression(cls, text, domain, variables=("x", "y"), name=""):
        from .expr import parse_expression
        e = parse_expression(text)
        unknown = e.free_variables() - set(variables)
        if unknown:
            raise ValueError(f"expression uses unknown variables {sorted(unknown)}")
        value = e.compile(variables)
        grads = [e.diff(v) for v in variables]
        grad_fns = [g.compile(variables) for g in grads]
        hess_fns = [[grads[i].diff(variables[j]).compile(variables)
                     for j in range(len(variables))] for i in range(len(variables))]
        lap = None
        for i in range(len(variables)):
            term = grads[i].diff(variables[i])
            lap = term if lap is None else lap + term
        glap_fns = [lap.diff(v).compile(variables) for v in variables]

        def f(x):
            return value(*x)

        def grad(x):
            return np.array([g(*x) for g in grad_fns])

        def hess(x):
            return np.array([[hess_fns[i][j](*x) for j in range(len(variables))]
                             for i in range(len(variables))])

        def grad_laplacian(x):
            return np.array([g(*x) for g in glap_fns])

        return cls(f, domain, grad=grad, hess=hess, grad_laplacian=grad_laplacian,
                   expr=e, variables=tuple(variables), name=name or text)

    @property
    def uses_fd(self):
        return self._grad is None or self._hess is None

    def value(self, x):
        return float(self._f(np.asarray(x, dtype=float)))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        if self._grad is not None:
            return np.asarray(self._grad(x), dtype=float)
        return der.fd_gradient(self.value, x, self.fd_step, richardson=True)

    def hessian(self, x):
        x = np.asarray(x, dtype=float)
        if self._hess is not None:
            H = np.asarray(self._hess(x), dtype=float)
        elif self._grad is not None:
            H = der.fd_jacobian(self.gradient, x, self.fd_step, richardson=True)
        else:
            H = der.fd_hessian(self.value, x, self.fd_step)
        return 0.5 * (H + H.T)

    def laplacian(self, x):
        return float(np.trace(self.hessian(x)))

    def grad_laplacian(self, x):
        x = np.asarray(x, dtype=float)
        if self._grad_laplacian is not None:
            return np.asarray(self._grad_laplacian(x), dtype=float)
        # outer step is deliberately larger than the inner one to keep the
        # noise amplification of nested differences in check
        return der.fd_gradient(self.laplacian, x, 10.0 * self.fd_step)

    def grid(self, shape, margin=0.05):
        axes = []
        pad_fd = 2.5 * self.fd_step if self.uses_fd else 0.0
        for (lo, hi), n in zip(self.domain, shape):
            pad = margin * (hi - lo) + pad_fd
            axes.append(np.linspace(lo + pad, hi - pad, n))
        return axes


# ---------------------------------------------------------------------------
# projection frame


@dataclass
class ProjectionFrame:
    """Decomposition data of an ambient field X at a point of a hypersurface.

    X = |X| (sin(theta) T + cos(theta) xi) with T the unit tangential part
    of X and theta in (0, pi) the angle between X and the unit normal xi.
    """

    point: np.ndarray
    X: np.ndarray
    X_T: np.ndarray
    T: np.ndarray
    T_chart: np.ndarray
    theta: float
    cos_theta: float
    xi: np.ndarray
    norm_X: float
    degenerate_angle: bool

    @property
    def sin_theta(self):
        return float(np.sin(self.theta))

    def reconstruction_residual(self, ambient=EUCLIDEAN):
        rec = self.norm_X * (self.sin_theta * self.T + self.cos_theta * self.xi)
        diff = self.X - rec
        return float(np.sqrt(ambient.inner(self.point, diff, diff)))


def projection_frame(M, X, u, eps_transversal=None, eps_costheta=None):
    """Projection frame of the field X on the hypersurface M at parameter u.

    Raises ZeroFieldError when |X| vanishes and TransversalityError when X
    is numerically normal to M (|X^T| <= eps_transversal * |X|).  The
    theta = pi/2 case is tagged via ``degenerate_angle``, not an error.
    """
    eps_t = DEFAULTS.eps_transversal if eps_transversal is None else eps_transversal
    eps_c = DEFAULTS.eps_costheta if eps_costheta is None else eps_costheta
    u = np.asarray(u, dtype=float)
    p = M.point(u)
    amb = M.ambient
    Xp = X(p)
    nx = np.sqrt(amb.inner(p, Xp, Xp))
    if nx < DEFAULTS.eps_regular:
        raise ZeroFieldError(f"|X| = {nx:.3e} at {p}")
    xi = M.unit_normal(u)
    c = amb.inner(p, Xp, xi) / nx
    XT = Xp - amb.inner(p, Xp, xi) * xi
    nT = np.sqrt(max(amb.inner(p, XT, XT), 0.0))
    if nT <= eps_t * nx:
        raise TransversalityError(
            f"X^T = 0 within tolerance at u={tuple(u)} (X normal to the hypersurface)")
    T = XT / nT
    J = M.partials(u)
    G = np.array([[amb.inner(p, J[i], J[j]) for j in range(J.shape[0])]
                  for i in range(J.shape[0])])
    rhs = np.array([amb.inner(p, T, J[i]) for i in range(J.shape[0])])
    T_chart = np.linalg.solve(G, rhs)
    theta = float(np.arccos(np.clip(c, -1.0, 1.0)))
    return ProjectionFrame(point=p, X=Xp, X_T=XT, T=T, T_chart=T_chart,
                           theta=theta, cos_theta=float(c), xi=xi, norm_X=float(nx),
                           degenerate_angle=bool(abs(c) < eps_c))


# ---------------------------------------------------------------------------
# profile sweep in R^3


class ProfileSweepSurface(ParametricImmersion):
    """Surface phi(s, t) = gamma(s) + f(t) eta(s) + g(t) X0 in R^3.

    The stored unit normal is nu = g' eta - f' X0, the co-orientation in
    which the principal curvature along the profile direction equals
    f''/g' and the one along the base direction equals g' kappa/(1 - f kappa).
    Flipping the orientation in shape_data negates both.
    """

    def __init__(self, gamma, beta, plane, X0, **kw):
        self.gamma = gamma
        self.beta = beta
        self.plane = plane
        self.X0 = X0
        super().__init__(**kw)

    def closed_form_curvatures(self, s, t):
        """(lambda, mu) = (f''/g', g' kappa / (1 - f kappa))."""
        kappa = self.gamma.curvature(s)
        fp, gp = self.beta.fp(t), self.beta.gp(t)
        fpp = self.beta.fpp(t)
        w = 1.0 - self.beta.f(t) * kappa
        return fpp / gp, gp * kappa / w

    def slice_curve(self, t):
        """The s-curve at fixed t as (point, velocity, acceleration) callbacks."""
        f_t = self.beta.f(t)

        def point(s):
            return (self.gamma.point_ambient(s) + f_t * self.plane.embed_vector(self.gamma.normal(s))
                    + self.beta.g(t) * self.X0)

        def velocity(s):
            kappa = self.gamma.curvature(s)
            return (1.0 - f_t * kappa) * self.plane.embed_vector(self.gamma.tangent(s))

        def acceleration(s):
            kappa = self.gamma.curvature(s)
            kp = self.gamma.curvature_derivative(s)
            T = self.plane.embed_vector(self.gamma.tangent(s))
            eta = self.plane.embed_vector(self.gamma.normal(s))
            return -f_t * kp * T + (1.0 - f_t * kappa) * kappa * eta

        return point, velocity, acceleration


def cpd_surface_r3(gamma, beta, X0=None, focal_samples=(64, 64)):
    """Sweep the profile beta along the plane curve gamma.

    gamma must be unit-speed in a plane orthogonal to the distinguished
    constant direction X0 (default: the plane's frame normal).  Closed-form
    first and second partials and the unit normal are attached.  Raises
    FocalSetError when 1 - f(t) kappa(s) vanishes or changes sign on the
    domain, naming the offending parameter point.
    """
    plane = gamma.plane if gamma.plane is not None else Plane()
    if X0 is None:
        X0 = plane.normal
    else:
        X0 = np.asarray(X0, dtype=float)
        if np.linalg.norm(X0 - plane.normal) > 1e-10 and np.linalg.norm(X0 + plane.normal) > 1e-10:
            raise ValueError("X0 must be the (anti)normal of the curve's plane")
    if beta.min_abs_gp() < 1e-10:
        raise ValueError("profile has g' = 0 on its domain")

    s_lo, s_hi = gamma.usable_domain()
    t_lo, t_hi = beta.domain
    ss = np.linspace(s_lo, s_hi, focal_samples[0])
    ts = np.linspace(t_lo, t_hi, focal_samples[1])
    kappas = np.array([gamma.curvature(s) for s in ss])
    fs = np.array([beta.f(t) for t in ts])
    w = 1.0 - np.outer(fs, kappas)  # (t, s)
    if np.abs(w).min() < DEFAULTS.eps_focal or (w.max() > 0 and w.min() < 0):
        it, is_ = np.unravel_index(int(np.abs(w).argmin()), w.shape)
        raise FocalSetError(
            f"1 - f(t) kappa(s) vanishes near (s, t) = ({ss[is_]:.6g}, {ts[it]:.6g})")

    def eval_fn(u):
        s, t = u
        return (gamma.point_ambient(s) + beta.f(t) * plane.embed_vector(gamma.normal(s))
                + beta.g(t) * X0)

    def jacobian(u):
        s, t = u
        kappa = gamma.curvature(s)
        T = plane.embed_vector(gamma.tangent(s))
        eta = plane.embed_vector(gamma.normal(s))
        phi_s = (1.0 - beta.f(t) * kappa) * T
        phi_t = beta.fp(t) * eta + beta.gp(t) * X0
        return np.vstack([phi_s, phi_t])

    def second(u):
        s, t = u
        kappa = gamma.curvature(s)
        kp = gamma.curvature_derivative(s)
        T = plane.embed_vector(gamma.tangent(s))
        eta = plane.embed_vector(gamma.normal(s))
        f, fp, fpp = beta.f(t), beta.fp(t), beta.fpp(t)
        gpp = beta.gpp(t)
        phi_ss = -f * kp * T + (1.0 - f * kappa) * kappa * eta
        phi_st = -fp * kappa * T
        phi_tt = fpp * eta + gpp * X0
        return np.array([[phi_ss, phi_st], [phi_st, phi_tt]])

    def normal(u):
        s, t = u
        eta = plane.embed_vector(gamma.normal(s))
        return beta.gp(t) * eta - beta.fp(t) * X0

    return ProfileSweepSurface(
        gamma=gamma, beta=beta, plane=plane, X0=X0,
        eval_fn=eval_fn, domain=[gamma.domain, beta.domain],
        jacobian=jacobian, second=second, normal=normal,
        name=f"sweep[{gamma.name}/{beta.name}]")


def cpd_hypersurface(L, eta, beta, X, eta_jacobian=None, tol_orth=None, fd_step=1e-5):
    """Sweep beta along a base L orthogonal to the closed conformal field X.

    L is an immersion of an (n-1)-box into R^(n+1); eta(x) is a unit field
    normal to L inside the leaf (orthogonal to both the partials of L and
    to X).  The result Phi(x, t) = L(x) + f(t) eta(x) + g(t) X/|X| is a
    hypersurface whose tangential projection of X points along the profile
    direction.
    """
    tol_orth = DEFAULTS.tol_orth if tol_orth is None else tol_orth
    m = L.n_params

    def Xhat(x):
        p = L.point(x)
        v = X(p)
        n = np.linalg.norm(v)
        if n < DEFAULTS.eps_regular:
            raise ZeroFieldError(f"X vanishes on the base at {p}")
        return v / n

    # preconditions on a coarse sample of the base
    axes = [np.linspace(lo, hi, 9) for lo, hi in L.usable_domain()]
    for x in _mesh_points(axes):
        p = L.point(x)
        J = L.partials(x)
        e = np.asarray(eta(x), dtype=float)
        v = X(p)
        if np.linalg.norm(v) < DEFAULTS.eps_regular:
            raise ZeroFieldError(f"X vanishes on the base at {p}")
        if abs(np.linalg.norm(e) - 1.0) > 1e-8:
            raise ValueError("eta must be unit on L")
        if abs(np.dot(e, v)) / np.linalg.norm(v) > tol_orth:
            raise ValueError("eta must be orthogonal to X (tangent to the leaf)")
        for i in range(m):
            if abs(np.dot(v, J[i])) > tol_orth * max(1.0, np.linalg.norm(v) * np.linalg.norm(J[i])):
                raise ValueError("L is not orthogonal to X on its domain")
            if abs(np.dot(e, J[i])) > tol_orth * max(1.0, np.linalg.norm(J[i])):
                raise ValueError("eta is not normal to L")

    def eval_fn(u):
        x, t = u[:m], u[m]
        return L.point(x) + beta.f(t) * np.asarray(eta(x), dtype=float) + beta.g(t) * Xhat(x)

    def jacobian(u):
        x, t = u[:m], u[m]
        JL = L.partials(x)
        f, g = beta.f(t), beta.g(t)
        rows = []
        for i in range(m):
            if eta_jacobian is not None:
                d_eta = np.asarray(eta_jacobian(x), dtype=float)[i]
            else:
                d_eta = der.partial(lambda y: np.asarray(eta(y), dtype=float), x, i,
                                    fd_step, richardson=True)
            d_xhat = der.partial(Xhat, x, i, fd_step, richardson=True)
            rows.append(JL[i] + f * d_eta + g * d_xhat)
        rows.append(beta.fp(t) * np.asarray(eta(x), dtype=float) + beta.gp(t) * Xhat(x))
        return np.vstack(rows)

    def normal(u):
        x, t = u[:m], u[m]
        nu = beta.gp(t) * np.asarray(eta(x), dtype=float) - beta.fp(t) * Xhat(x)
        return nu / np.linalg.norm(nu)

    domain = list(L.domain) + [beta.domain]
    return ParametricImmersion(eval_fn, domain, jacobian=jacobian, normal=normal,
                               fd_step=fd_step, name=f"sweep[{L.name}/{beta.name}]")


def _mesh_points(axes):
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


# ---------------------------------------------------------------------------
# graphs in warped products


class GraphSurface(ParametricImmersion):
    """Graph x -> (F(x), x) inside a warped product, with its upward normal."""

    def __init__(self, graph_function, warped, **kw):
        self.graph_function = graph_function
        self.warped = warped
        super().__init__(**kw)


def graph_in_warped_product(F, W):
    """Immerse the graph of F into the warped product W.

    The frame E_i = (dF/dx_i) d_t + e_i spans the tangent space and
    xi = (rho o F)^2 d_t - grad F is normal; all inner products are taken
    in the warped metric.  The normal is normalized pointing up (positive
    d_t component), so cos(theta) > 0 against the vertical field.
    """
    if F.dim != W.base_dim:
        raise ValueError(f"graph base dimension {F.dim} != warped base dimension {W.base_dim}")
    for x in _mesh_points([np.linspace(lo, hi, 9) for lo, hi in F.domain]):
        if W.rho(F.value(x)) <= 0.0:
            raise ValueError(f"rho(F) <= 0 at {x}")

    n = F.dim

    def eval_fn(x):
        return np.concatenate([[F.value(x)], x])

    def jacobian(x):
        g = F.gradient(x)
        J = np.zeros((n, n + 1))
        J[:, 0] = g
        J[:, 1:] = np.eye(n)
        return J

    def second(x):
        H = F.hessian(x)
        S = np.zeros((n, n, n + 1))
        S[:, :, 0] = H
        return S

    def normal(x):
        p = eval_fn(x)
        r = W.rho(p[0])
        xi = np.concatenate([[r * r], -F.gradient(x)])
        return xi / np.sqrt(W.inner(p, xi, xi))

    return GraphSurface(graph_function=F, warped=W,
                        eval_fn=eval_fn, domain=F.domain, jacobian=jacobian,
                        second=second, normal=normal, ambient=W,
                        name=f"graph[{F.name or 'F'}]")


@dataclass
class GradientRelations:
    """|grad h|, |grad F| and cos(theta) at one base point of a graph.

    h is the height function of the graph (restriction of the projection
    onto the interval factor); its gradient is taken in the induced metric,
    while grad F is taken in the flat base metric.
    """

    norm_grad_h: float
    norm_grad_F: float
    cos_theta: float
    theta_degenerate: bool


def gradient_relations(F, W, x, tol=None):
    """Evaluate the height/graph gradient relations at base point x.

        |grad h|^2 = |grad F|^2 / (|grad F|^2 + (rho o F)^2)
        |grad F|^2 = (rho o F)^2 |grad h|^2 / (1 - |grad h|^2)
        cos(theta) = (rho o F) / sqrt((rho o F)^2 + |grad F|^2)

    The two relations are checked against each other; a violation (which
    requires |grad h| >= 1, impossible analytically) raises
    InconsistentDataError.  |grad F| = 0 is flagged: theta leaves (0, pi).
    """
    tol = DEFAULTS.tol_num if tol is None else tol
    x = np.asarray(x, dtype=float)
    gF = float(np.linalg.norm(F.gradient(x)))
    rho = W.rho(F.value(x))
    nh2 = gF * gF / (gF * gF + rho * rho)
    if nh2 >= 1.0:
        raise InconsistentDataError(f"|grad h| >= 1 at {x}: bad derivative data")
    cos_theta = rho / np.sqrt(rho * rho + gF * gF)
    gF2_back = rho * rho * nh2 / (1.0 - nh2)
    if abs(gF2_back - gF * gF) > tol * (1.0 + gF * gF):
        raise InconsistentDataError(
            f"gradient relations disagree at {x}: {gF2_back:.3e} vs {gF * gF:.3e}")
    return GradientRelations(norm_grad_h=float(np.sqrt(nh2)), norm_grad_F=gF,
                             cos_theta=float(cos_theta),
                             theta_degenerate=bool(gF < DEFAULTS.eps_regular))
