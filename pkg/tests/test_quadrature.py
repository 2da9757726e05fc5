import math

import numpy as np
import pytest

from cs3.errors import EvaluationError, NonConvergent
from cs3.poly import Polynomial, PolyForm, s3_left_invariant_forms, so3_left_invariant_forms
from cs3.quadrature import (
    CHARTS,
    S3_CHART,
    SO3_CHART,
    QuadratureRule,
    grid_refinement_estimate,
    integrate_threeform,
    levels_from,
)


@pytest.mark.parametrize("chart", [S3_CHART, SO3_CHART])
def test_charts_land_on_manifold(chart):
    assert chart.embedding_defect() < 1e-12


@pytest.mark.parametrize("chart", [S3_CHART, SO3_CHART])
def test_tangents_match_finite_differences(chart):
    p = chart.sample(5, seed=1)
    t = chart.tangent_basis(p)
    h = 1e-6
    for a in range(3):
        step = np.zeros(3)
        step[a] = h
        fd = (chart.embedding(p + step) - chart.embedding(p - step)) / (2 * h)
        assert np.allclose(fd, t[..., a], atol=1e-8)


def test_volume_constants():
    xi, rho, kappa = s3_left_invariant_forms()
    w1, w2, psi = so3_left_invariant_forms()
    s3 = integrate_threeform(xi ^ rho ^ kappa, S3_CHART)
    so3 = integrate_threeform(w1 ^ w2 ^ psi, SO3_CHART)
    assert abs(s3 - 2 * math.pi**2) / (2 * math.pi**2) <= 1e-8
    assert abs(so3 - 8 * math.pi**2) / (8 * math.pi**2) <= 1e-6


def test_orientation_signs_recorded():
    assert S3_CHART.orientation_sign == -1
    assert SO3_CHART.orientation_sign == -1
    assert set(CHARTS) == {"S3", "SO3"}


def test_parameter_volume_of_rule():
    rule = QuadratureRule.for_chart(S3_CHART, 8)
    assert abs(rule.volume - 2 * math.pi**3) < 1e-12
    assert rule.points.shape == (512, 3)


def test_exact_three_form_integrates_to_zero():
    xi, rho, kappa = s3_left_invariant_forms()
    x1 = Polynomial.variables(4)[0]
    exact = (PolyForm.function(x1 * x1) ^ rho ^ kappa).d()
    assert not exact.is_zero()
    assert abs(integrate_threeform(exact, S3_CHART)) < 1e-10


def test_pi_power_applied():
    xi, rho, kappa = s3_left_invariant_forms()
    f = (xi ^ rho ^ kappa) * 1
    f.pi_power = -2
    assert abs(integrate_threeform(f, S3_CHART) - 2.0) < 1e-12


def test_refinement_estimate_and_levels():
    xi, rho, kappa = s3_left_invariant_forms()
    value, err = grid_refinement_estimate(xi ^ rho ^ kappa, S3_CHART, levels_from(32, 3))
    assert levels_from(32, 3) == (8, 16, 32)
    assert err < 1e-8 and abs(value - 2 * math.pi**2) < 1e-8
    with pytest.raises(ValueError):
        grid_refinement_estimate(xi ^ rho ^ kappa, S3_CHART, (8,))


class _Bad:
    pi_power = 0

    def evaluate(self, x, t):
        return np.full(x.shape[0], np.nan)


class _Growing:
    """Integrand whose value depends on grid size so refinement diverges."""

    pi_power = 0

    def evaluate(self, x, t):
        n = round(x.shape[0] ** (1 / 3))
        return np.full(x.shape[0], float(n * n))


def test_evaluation_and_convergence_errors():
    with pytest.raises(EvaluationError):
        integrate_threeform(_Bad(), S3_CHART, nodes=4)
    with pytest.raises(NonConvergent):
        grid_refinement_estimate(_Growing(), S3_CHART, (4, 8, 16))
