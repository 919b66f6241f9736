import math

import pytest

from bufferhawkes import (
    ModelParams,
    NonPositiveParameter,
    StabilityViolation,
    derived_constants,
    validate_params,
)


class TestValidation:
    def test_valid_roundtrip(self):
        p = validate_params(2, 1, 2, 1, 1)
        assert p == ModelParams(2.0, 1.0, 2.0, 1.0, 1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"lambda0": 0.0},
            {"lambda0": -1.0},
            {"a": -0.5},
            {"b": 0.0},
            {"c": 0.0},
            {"c": -1.0},
            {"d": -0.1},
        ],
    )
    def test_sign_constraints(self, kwargs):
        base = dict(lambda0=2.0, a=1.0, b=2.0, c=1.0, d=1.0)
        base.update(kwargs)
        with pytest.raises(NonPositiveParameter):
            ModelParams(**base)

    def test_stability_boundary_rejected(self):
        # a*c = b*(c+d) exactly: nu = 1, not subcritical
        with pytest.raises(StabilityViolation):
            ModelParams(lambda0=1.0, a=4.0, b=2.0, c=1.0, d=1.0)

    def test_supercritical_rejected(self):
        with pytest.raises(StabilityViolation):
            ModelParams(lambda0=1.0, a=10.0, b=2.0, c=1.0, d=1.0)

    def test_frozen(self, desk):
        with pytest.raises(Exception):
            desk.a = 3.0


class TestDerivedConstants:
    def test_desk_preset_values(self, desk):
        dc = derived_constants(desk)
        assert dc.nu == pytest.approx(0.25, abs=1e-15)
        assert dc.Q == pytest.approx(2.0, abs=1e-15)
        assert dc.q_minus == pytest.approx(1.0, abs=1e-14)
        assert dc.q_plus == pytest.approx(3.0, abs=1e-14)
        assert dc.sigma2 == pytest.approx(64.0 / 27.0, rel=1e-14)
        assert dc.ell_inf == pytest.approx(8.0 / 3.0, rel=1e-14)
        assert dc.g_inf == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert dc.x_inf == pytest.approx(4.0 / 3.0, rel=1e-14)
        assert dc.y_inf == pytest.approx(0.25 / 0.75**3, rel=1e-14)
        assert dc.theta0 == pytest.approx(math.log(4.0) - 0.75, rel=1e-14)

    def test_rate_identities(self, desk):
        p = desk
        dc = derived_constants(p)
        assert dc.q_minus * dc.q_plus == pytest.approx(
            p.b * (p.c + p.d) - p.a * p.c, rel=1e-14
        )
        assert dc.q_minus + dc.q_plus == pytest.approx(p.b + p.c + p.d, rel=1e-14)

    def test_no_feedback(self, no_feedback):
        dc = derived_constants(no_feedback)
        assert dc.nu == 0.0
        assert dc.theta0 == math.inf
        assert dc.x_inf == 1.0
        assert dc.y_inf == 0.0
        assert dc.sigma2 == pytest.approx(1.0, rel=1e-14)

    def test_beta(self, desk):
        dc = derived_constants(desk)
        assert dc.beta(1.0) == pytest.approx(32.0 / 27.0, rel=1e-14)
        assert dc.beta(2.0) == pytest.approx(4.0 * dc.beta(1.0), rel=1e-14)
