"""Model parameters, validation, and derived constants."""

from __future__ import annotations

import math
from dataclasses import dataclass


class NonPositiveParameter(ValueError):
    """A parameter violates its sign constraint; the message names the field."""


class StabilityViolation(ValueError):
    """a*c >= b*(c+d): the feedback loop is not subcritical."""


@dataclass(frozen=True)
class ModelParams:
    """The five model parameters.

    lambda0 : base arrival intensity of limit orders (events / unit time)
    a       : intensity jump triggered by each execution
    b       : decay rate of the intensity shot noise (1 / time)
    c       : execution rate per resting limit order (1 / time)
    d       : cancellation rate per resting limit order (1 / time)
    """

    lambda0: float
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise NonPositiveParameter(f"lambda0 must be > 0, got {self.lambda0}")
        if self.a < 0:
            raise NonPositiveParameter(f"a must be >= 0, got {self.a}")
        if not self.b > 0:
            raise NonPositiveParameter(f"b must be > 0, got {self.b}")
        if not self.c > 0:
            raise NonPositiveParameter(f"c must be > 0, got {self.c}")
        if self.d < 0:
            raise NonPositiveParameter(f"d must be >= 0, got {self.d}")
        lhs = self.a * self.c
        rhs = self.b * (self.c + self.d)
        if lhs >= rhs:
            raise StabilityViolation(
                f"stability requires a*c < b*(c+d): {lhs} >= {rhs}"
            )


def validate_params(lambda0, a, b, c, d) -> ModelParams:
    """Validate the raw parameter tuple and return a ModelParams.

    Raises NonPositiveParameter or StabilityViolation on bad input.
    """
    return ModelParams(float(lambda0), float(a), float(b), float(c), float(d))


@dataclass(frozen=True)
class DerivedConstants:
    """Constants derived from a validated parameter set.

    nu        : mean offspring per execution, a*c / (b*(c+d)), in [0, 1)
    Q         : sqrt((b-c-d)^2 + 4ac)
    q_minus   : (b+c+d - Q) / 2, slow relaxation rate
    q_plus    : (b+c+d + Q) / 2, fast relaxation rate
    theta0    : radius of the cumulant domain, -ln(nu) + nu - 1 (inf at nu=0)
    ell_inf   : stationary mean of the limit-order intensity
    g_inf     : stationary mean of the book depth
    x_inf     : mean total progeny of one execution cascade, 1/(1-nu)
    y_inf     : variance of total progeny, nu/(1-nu)^3
    sigma2    : diffusion variance coefficient of the scaled order count
    """

    nu: float
    Q: float
    q_minus: float
    q_plus: float
    theta0: float
    ell_inf: float
    g_inf: float
    x_inf: float
    y_inf: float
    sigma2: float

    def beta(self, alpha: float) -> float:
        """Asymptotic midprice volatility for tick size alpha."""
        return alpha * alpha * self.sigma2 / 2.0


def derived_constants(p: ModelParams) -> DerivedConstants:
    cd = p.c + p.d
    ac = p.a * p.c
    nu = ac / (p.b * cd)
    Q = math.sqrt((p.b - cd) ** 2 + 4.0 * ac)
    q_minus = (p.b + cd - Q) / 2.0
    q_plus = (p.b + cd + Q) / 2.0
    theta0 = math.inf if nu == 0.0 else -math.log(nu) + nu - 1.0
    ell_inf = p.b * cd * p.lambda0 / (p.b * cd - ac)
    g_inf = ell_inf / cd
    x_inf = 1.0 / (1.0 - nu)
    y_inf = nu / (1.0 - nu) ** 3
    sigma2 = (p.lambda0 * p.c / cd) * x_inf**3
    return DerivedConstants(
        nu=nu,
        Q=Q,
        q_minus=q_minus,
        q_plus=q_plus,
        theta0=theta0,
        ell_inf=ell_inf,
        g_inf=g_inf,
        x_inf=x_inf,
        y_inf=y_inf,
        sigma2=sigma2,
    )
