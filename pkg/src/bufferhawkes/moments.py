"""Closed-form and ODE moment engines.

First moments and the cascade mean/variance are evaluated analytically as
sums of exponentials; second moments integrate the linear covariance ODE
systems; the cumulant solves its nonlinear second-order ODE. Variance of the
order count is available through two independent routes (ODE vs cluster
quadrature) that are cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .params import ModelParams, derived_constants
from .special import DomainError

_ODE_RTOL = 1e-10
_ODE_ATOL = 1e-12
_QUAD_KW = dict(epsabs=1e-12, epsrel=1e-10, limit=400)


@dataclass(frozen=True)
class Asymptotes:
    """Large-time limits (variances/covariances) and linear-growth slopes."""

    ell_inf: float
    g_inf: float
    m_slope: float
    pbar_inf: float
    qbar_inf: float
    rbar_inf: float
    ubar_inf: float
    vbar_inf: float
    wbar_slope: float
    x_inf: float
    y_inf: float


@dataclass
class MomentCurves:
    grid: np.ndarray
    ell: np.ndarray
    g: np.ndarray
    m: np.ndarray
    pbar: np.ndarray
    qbar: np.ndarray
    rbar: np.ndarray
    ubar: np.ndarray
    vbar: np.ndarray
    wbar: np.ndarray
    x: np.ndarray
    y: np.ndarray
    asymptotes: Asymptotes


def _rates(params: ModelParams):
    dc = derived_constants(params)
    degenerate = dc.Q < 1e-12 * (params.b + params.c + params.d)
    return dc, degenerate


def first_moments(params: ModelParams, t):
    """Analytic means (E lambda, E gamma, E n) at time(s) t, empty-book start."""
    t = np.asarray(t, dtype=np.float64)
    dc, degenerate = _rates(params)
    lam0, ac, b, c = params.lambda0, params.a * params.c, params.b, params.c
    q1, q2 = dc.q_minus, dc.q_plus
    if degenerate:
        # double root q1 = q2 = q (only when ac = 0 and b = c+d)
        q = q1
        e = np.exp(-q * t)
        I = (1.0 - (1.0 + q * t) * e) / q**2
        J = t / q**2 - (2.0 - (2.0 + q * t) * e) / q**3
        ell = lam0 * (1.0 + ac * I)
        g = lam0 * (t * e + b * I)
        m = c * lam0 * (I + b * J)
    else:
        Q = q2 - q1
        e1, e2 = np.exp(-q1 * t), np.exp(-q2 * t)
        I = (1.0 - e1) / q1 - (1.0 - e2) / q2
        J = (t - (1.0 - e1) / q1) / q1 - (t - (1.0 - e2) / q2) / q2
        ell = lam0 * (1.0 + ac * I / Q)
        g = (lam0 / Q) * (e1 - e2 + b * I)
        m = (c * lam0 / Q) * (I + b * J)
    return ell, g, m


def cluster_mean(params: ModelParams, t):
    """x(t) = E Z_t, mean cascade size at age t."""
    t = np.asarray(t, dtype=np.float64)
    dc, degenerate = _rates(params)
    ac = params.a * params.c
    if ac == 0.0:
        return np.ones_like(t)
    q1, q2 = dc.q_minus, dc.q_plus
    if degenerate:  # requires ac = 0, handled above
        return np.ones_like(t)
    Q = q2 - q1
    I = (1.0 - np.exp(-q1 * t)) / q1 - (1.0 - np.exp(-q2 * t)) / q2
    return 1.0 + ac * I / Q


def _x_coeffs(params: ModelParams):
    """x(t) = A + B exp(-q1 t) + C exp(-q2 t)."""
    dc, _ = _rates(params)
    ac = params.a * params.c
    q1, q2 = dc.q_minus, dc.q_plus
    Q = q2 - q1
    A = 1.0 + ac / (q1 * q2)
    B = -ac / (Q * q1)
    C = ac / (Q * q2)
    return A, B, C, q1, q2


def _conv_exp(alpha, q, t):
    """integral_0^t exp(-alpha s) exp(-q (t-s)) ds, elementwise in t."""
    if abs(q - alpha) < 1e-12 * max(1.0, q):
        return t * np.exp(-q * t)
    return (np.exp(-alpha * t) - np.exp(-q * t)) / (q - alpha)


def cluster_var(params: ModelParams, t):
    """y(t) = Var Z_t, evaluated analytically from the exponential-sum form."""
    t = np.asarray(t, dtype=np.float64)
    ac = params.a * params.c
    if ac == 0.0:
        return np.zeros_like(t)
    A, B, C, q1, q2 = _x_coeffs(params)
    Q = q2 - q1
    terms = (
        (A * A, 0.0),
        (2.0 * A * B, q1),
        (2.0 * A * C, q2),
        (B * B, 2.0 * q1),
        (2.0 * B * C, q1 + q2),
        (C * C, 2.0 * q2),
    )
    y = np.zeros_like(t)
    for coef, alpha in terms:
        y = y + coef * (_conv_exp(alpha, q1, t) - _conv_exp(alpha, q2, t))
    return (ac / Q) * y


def _xsq_plus_y(params: ModelParams):
    def f(u):
        x = cluster_mean(params, u)
        return x * x + cluster_var(params, u)

    return f


def var_n_cluster(params: ModelParams, t: float) -> float:
    """Var N_t via the cluster route: quadrature over (x^2 + y) against the
    residence-time kernel. Independent of the covariance ODE system."""
    t = float(t)
    if t == 0.0:
        return 0.0
    cd = params.c + params.d
    f = _xsq_plus_y(params)

    def integrand(u):
        return f(u) * (1.0 - math.exp(-cd * (t - u)))

    val, _ = quad(integrand, 0.0, t, **_QUAD_KW)
    return (params.lambda0 * params.c / cd) * val


def _asymptotes(params: ModelParams) -> Asymptotes:
    dc, _ = _rates(params)
    b, c, d = params.b, params.c, params.d
    cd = c + d
    ac = params.a * c
    det = b * cd - ac  # q1*q2
    g_inf = dc.g_inf
    denom = 2.0 * (b + cd) * det
    pbar = c * params.a**2 * cd * g_inf / denom
    qbar = c * params.a**2 * (cd * (b + cd) - ac) * g_inf / denom
    rbar = g_inf + c * params.a**2 * g_inf / denom
    scale = ac * g_inf / det
    ubar = (cd + ac * (cd**2 + ac) / denom) * scale
    vbar = (1.0 + ac / (2.0 * det)) * scale
    return Asymptotes(
        ell_inf=dc.ell_inf,
        g_inf=g_inf,
        m_slope=c * g_inf,
        pbar_inf=pbar,
        qbar_inf=qbar,
        rbar_inf=rbar,
        ubar_inf=ubar,
        vbar_inf=vbar,
        wbar_slope=dc.sigma2,
        x_inf=dc.x_inf,
        y_inf=dc.y_inf,
    )


def second_moments(
    params: ModelParams, grid, rtol: float = _ODE_RTOL, atol: float = _ODE_ATOL
) -> MomentCurves:
    """Centered second moments on a grid by integrating the covariance ODEs.

    State = (pbar, qbar, rbar, ubar, vbar, wbar) = (Cov(L,G), Var L, Var G,
    Cov(L,N), Cov(G,N), Var N); forcing uses the analytic first moments.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be increasing and start at 0")
    b, c, d = params.b, params.c, params.d
    cd = c + d
    ac = params.a * c
    ca2 = c * params.a**2

    def rhs(t, yv):
        p, q, r, u, v, w = yv
        ell, g, _ = first_moments(params, t)
        return (
            -ac * g - (b + cd) * p + q + ac * r,
            ca2 * g + 2.0 * ac * p - 2.0 * b * q,
            cd * g + ell + 2.0 * p - 2.0 * cd * r,
            ac * g + c * p - b * u + ac * v,
            -c * g + c * r + u - cd * v,
            c * g + 2.0 * c * v,
        )

    sol = solve_ivp(
        rhs,
        (0.0, float(grid[-1])) if grid[-1] > 0 else (0.0, 1e-12),
        np.zeros(6),
        t_eval=grid,
        rtol=rtol,
        atol=atol,
        dense_output=False,
    )
    if not sol.success:
        raise RuntimeError(f"covariance ODE integration failed: {sol.message}")
    ell, g, m = first_moments(params, grid)
    return MomentCurves(
        grid=grid,
        ell=ell,
        g=g,
        m=m,
        pbar=sol.y[0],
        qbar=sol.y[1],
        rbar=sol.y[2],
        ubar=sol.y[3],
        vbar=sol.y[4],
        wbar=sol.y[5],
        x=cluster_mean(params, grid),
        y=cluster_var(params, grid),
        asymptotes=_asymptotes(params),
    )


def cumulant_v(params: ModelParams, theta: float, grid, dense: bool = False):
    """V_t(theta) = log E exp(theta Z_t) on the grid, by its second-order ODE.

    Requires theta < theta0; the solution increases to the Lambert-W limit
    and never exceeds -log(nu).
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    dc, _ = _rates(params)
    if theta >= dc.theta0:
        raise DomainError(f"theta must be < theta0 = {dc.theta0}, got {theta}")
    b, cd, ac = params.b, params.c + params.d, params.a * params.c

    def rhs(t, yv):
        v, vp = yv
        return (vp, b * cd * theta + ac * (math.exp(v) - 1.0) - (b + cd) * vp - b * cd * v)

    t_end = float(grid[-1]) if grid[-1] > 0 else 1e-12
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        (float(theta), 0.0),
        t_eval=None if dense else grid,
        rtol=_ODE_RTOL,
        atol=_ODE_ATOL,
        dense_output=dense,
    )
    if not sol.success:
        raise RuntimeError(f"cumulant ODE integration failed: {sol.message}")
    if dense:
        return sol
    return sol.y[0]


def log_mgf_n(params: ModelParams, theta: float, t: float) -> float:
    """log E exp(theta N_t): quadrature of exp(V_u(theta)) - 1 against the
    residence-time kernel."""
    t = float(t)
    if theta == 0.0 or t == 0.0:
        return 0.0
    cd = params.c + params.d
    sol = cumulant_v(params, theta, [t], dense=True)

    def integrand(u):
        v = sol.sol(u)[0]
        return (math.exp(v) - 1.0) * (1.0 - math.exp(-cd * (t - u)))

    val, _ = quad(integrand, 0.0, t, **_QUAD_KW)
    return (params.lambda0 * params.c / cd) * val


@dataclass
class StationaryStats:
    """Mean/variance/covariance of the stationary-increments order count."""

    params: ModelParams
    mean_slope: float

    def w_integral(self, t: float) -> float:
        """integral_0^infty E[(Z_{r+t} - Z_r)^2] dr; bounded uniformly in t."""
        t = float(t)
        if t == 0.0:
            return 0.0
        p = self.params
        dc, _ = _rates(p)
        nu = dc.nu
        if nu == 0.0:
            return 0.0
        _, B, C, q1, q2 = _x_coeffs(p)
        f1 = math.expm1(-q1 * t)  # exp(-q1 t) - 1
        f2 = math.expm1(-q2 * t)
        term1 = (
            B * B * f1 * f1 / (2.0 * q1)
            + 2.0 * B * C * f1 * f2 / (q1 + q2)
            + C * C * f2 * f2 / (2.0 * q2)
        ) / (1.0 - nu)
        b, cd = p.b, p.c + p.d
        f = _xsq_plus_y(p)
        if abs(cd - b) < 1e-10 * b:

            def kern(tau):
                return (1.0 + b * tau) * math.exp(-b * tau)

        else:

            def kern(tau):
                return (cd * math.exp(-b * tau) - b * math.exp(-cd * tau)) / (cd - b)

        def integrand(u):
            return kern(t - u) * f(u)

        val, _ = quad(integrand, 0.0, t, **_QUAD_KW)
        term2 = (nu / (1.0 - nu)) * val
        return term1 + term2

    def var(self, t: float) -> float:
        """Var of the stationary-increments count over a window of length t."""
        t = float(t)
        if t == 0.0:
            return 0.0
        p = self.params
        cd = p.c + p.d
        body, _ = quad(_xsq_plus_y(p), 0.0, t, **_QUAD_KW)
        return (p.lambda0 * p.c / cd) * (body + self.w_integral(t))

    def cov(self, s: float, t: float) -> float:
        """Cov(count over [0,s], count over [s,t]) for 0 <= s <= t."""
        if not 0.0 <= s <= t:
            raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")
        return 0.5 * (self.var(t) - self.var(s) - self.var(t - s))


def stationary_stats(params: ModelParams) -> StationaryStats:
    cd = params.c + params.d
    slope = params.lambda0 * params.c * params.b / (params.b * cd - params.a * params.c)
    return StationaryStats(params=params, mean_slope=slope)


def write_curves_csv(curves: MomentCurves, params: ModelParams, path) -> None:
    from . import __version__

    with open(path, "w") as f:
        f.write(
            f"# bufferhawkes v{__version__} lambda0={params.lambda0:.15g} "
            f"a={params.a:.15g} b={params.b:.15g} c={params.c:.15g} d={params.d:.15g}\n"
        )
        f.write("t,ell,g,m,pbar,qbar,rbar,ubar,vbar,wbar,x,y\n")
        for i in range(curves.grid.size):
            row = (
                curves.grid[i],
                curves.ell[i],
                curves.g[i],
                curves.m[i],
                curves.pbar[i],
                curves.qbar[i],
                curves.rbar[i],
                curves.ubar[i],
                curves.vbar[i],
                curves.wbar[i],
                curves.x[i],
                curves.y[i],
            )
            f.write(",".join(f"{v:.15g}" for v in row) + "\n")
