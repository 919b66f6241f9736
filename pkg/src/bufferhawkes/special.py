"""Special functions: Lambert W (principal branch), Borel pmf, limiting cumulant."""

from __future__ import annotations

import math


class DomainError(ValueError):
    """Argument outside the domain of the requested function."""


_INV_E = math.exp(-1.0)


def lambert_w0(x: float) -> float:
    """Principal branch W0 of the Lambert W function on [-1/e, inf).

    Returns w with w * exp(w) = x and w >= -1, residual below
    1e-14 * max(1, |x|). Halley iteration with a branch-point series
    or log-based initial guess.
    """
    x = float(x)
    if x < -_INV_E:
        # allow the branch point itself up to rounding
        if x > -_INV_E - 1e-15:
            return -1.0
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0

    if x < -0.25:
        # series around the branch point, Corless et al. eq. 4.22
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0
    elif x < math.e:
        w = x / (1.0 + x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)

    tol = 1e-14 * max(1.0, abs(x))
    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            break
        wp1 = w + 1.0
        # Halley step
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w -= f / denom
    return w


def borel_pmf(k: int, nu: float) -> float:
    """P(Z_inf = k) for the Borel law with parameter nu in [0, 1).

    pmf(k) = (k*nu)^(k-1) * exp(-nu*k) / k!, k >= 1. Underflow returns 0.
    """
    if k < 1:
        raise DomainError(f"borel_pmf requires k >= 1, got {k}")
    if nu == 0.0:
        return 1.0 if k == 1 else 0.0
    if k == 1:
        return math.exp(-nu)
    log_p = (k - 1) * math.log(k * nu) - nu * k - math.lgamma(k + 1)
    if log_p < -745.0:
        return 0.0
    return math.exp(log_p)


def v_infinity(theta: float, nu: float) -> float:
    """Limiting log-MGF of the cascade size, log E[exp(theta * Z_inf)].

    Defined for theta < theta0 = -ln(nu) + nu - 1; solves the fixed point
    V = theta + nu * (exp(V) - 1) via the principal Lambert W branch.
    """
    if nu == 0.0:
        return float(theta)
    theta0 = -math.log(nu) + nu - 1.0
    if theta >= theta0:
        raise DomainError(f"v_infinity requires theta < theta0 = {theta0}, got {theta}")
    return theta - nu - lambert_w0(-nu * math.exp(theta - nu))
