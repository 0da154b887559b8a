from __future__ import annotations

import math

import numpy as np
import pytest

from qosim import IntegrationError, IntegratorConfig
from qosim.dynamics.integrator import DormandPrince, integrate_adaptive


def test_exponential_decay():
    cfg = IntegratorConfig()
    out = integrate_adaptive(lambda t, y: -y, [1.0], [0.0, 1.0], cfg)
    assert abs(out[-1][0] - math.exp(-1)) < 10 * cfg.rel_tol * math.exp(-1)


def test_rotation_stays_on_unit_circle():
    T = np.linspace(0, 100, 1001)
    # modulus drift grows linearly at roughly 1.5e-5 * rel_tol / 1e-6 over this span
    out = np.array(integrate_adaptive(lambda t, y: 1j * y, [1.0], T))[:, 0]
    assert np.max(np.abs(np.abs(out) - 1)) < 2e-5
    tight = np.array(integrate_adaptive(lambda t, y: 1j * y, [1.0], T, IntegratorConfig(1e-10, 1e-12)))[:, 0]
    assert np.max(np.abs(np.abs(tight) - 1)) < 1e-8
    np.testing.assert_allclose(tight, np.exp(1j * T), atol=1e-7)


def test_zero_rhs_exact():
    y0 = np.array([1.5 - 2j, 0.25])
    out = integrate_adaptive(lambda t, y: np.zeros_like(y), y0, np.linspace(0, 3, 7))
    for y in out:
        np.testing.assert_array_equal(y, y0)


def test_dense_output_between_steps():
    # few large steps, many samples: exercises the continuous extension
    T = np.linspace(0, 10, 2001)
    cfg = IntegratorConfig(1e-9, 1e-12)
    out = np.array(integrate_adaptive(lambda t, y: np.array([math.cos(t)]), [0.0], T, cfg))[:, 0]
    np.testing.assert_allclose(out.real, np.sin(T), atol=1e-8)


def test_stepper_respects_end_and_counts():
    s = DormandPrince(lambda t, y: -y, 0.0, [1.0], 2.0)
    while s.t < 2.0:
        t_prev = s.t
        s.step()
        assert s.t_old == t_prev
        assert s.t <= 2.0
    assert s.t == 2.0
    assert s.n_accepted > 0
    assert s.n_rhs == 2 + 6 * (s.n_accepted + s.n_rejected)
    assert s.y[0] == pytest.approx(math.exp(-2), rel=1e-5)


def test_restart_changes_trajectory():
    s = DormandPrince(lambda t, y: -y, 0.0, [1.0], 2.0)
    s.step()
    t = s.t
    s.restart(t, [2.0])
    while s.t < 2.0:
        s.step()
    assert s.y[0] == pytest.approx(2 * math.exp(-(2 - t)), rel=1e-5)


def test_step_underflow_reports_last_time():
    # y' = y^2 with y(0) = 1 blows up at t = 1
    with pytest.raises(IntegrationError) as info:
        integrate_adaptive(lambda t, y: y * y, [1.0], [0.0, 2.0])
    assert 0.9 < info.value.last_time < 1.001


def test_max_step_and_initial_step():
    s = DormandPrince(lambda t, y: -y, 0.0, [1.0], 1.0, IntegratorConfig(max_step=0.01, initial_step=0.001))
    s.step()
    assert s.t == pytest.approx(0.001)
    while s.t < 1.0:
        t0 = s.t
        s.step()
        assert s.t - t0 <= 0.01 + 1e-15


@pytest.mark.parametrize("kw", [dict(rel_tol=0), dict(abs_tol=-1), dict(max_step=0), dict(initial_step=-0.1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        IntegratorConfig(**kw)


@pytest.mark.parametrize("times", [[], [0.0, 0.0], [1.0, 0.5]])
def test_time_grid_validation(times):
    with pytest.raises(ValueError):
        integrate_adaptive(lambda t, y: y, [1.0], times)


def test_tolerance_controls_error():
    errors = []
    for tol in (1e-4, 1e-6, 1e-8):
        out = integrate_adaptive(lambda t, y: -2 * t * y, [1.0], [0.0, 3.0], IntegratorConfig(tol, tol * 1e-3))
        errors.append(abs(out[-1][0] - math.exp(-9)) / math.exp(-9))
    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-7
