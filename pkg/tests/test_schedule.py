import numpy as np
import pytest

from dynaprop import FilterSchedule, highpass_schedule, ppr_schedule


def test_ppr_schedule_weights():
    s = ppr_schedule(0.2)
    assert s.gamma0 == 0.2
    assert s.gamma == pytest.approx(0.8)
    assert s.weight_at(2) == pytest.approx(0.2 * 0.8**2)  # 0.128
    assert s.weight_at(3) == pytest.approx(0.1024)
    assert ppr_schedule(0.5).gamma == 0.5


def test_highpass_schedule_weights():
    s = highpass_schedule(0.2)
    assert s.gamma0 == 0.2
    assert s.gamma == pytest.approx(-0.8)
    assert s.weight_at(1) == pytest.approx(-0.16)
    assert s.weight_at(2) == pytest.approx(0.128)
    for alpha in (0.05, 0.3, 0.95):
        assert abs(highpass_schedule(alpha).gamma) < 1.0


def test_weight_at_k_zero_is_gamma0():
    for s in (ppr_schedule(0.3), highpass_schedule(0.3)):
        assert s.weight_at(0) == s.gamma0
    with pytest.raises(ValueError):
        ppr_schedule(0.3).weight_at(-1)


def test_alpha_validation():
    for alpha in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            ppr_schedule(alpha)
        with pytest.raises(ValueError):
            highpass_schedule(alpha)


def test_schedule_validation():
    with pytest.raises(ValueError):
        FilterSchedule(gamma0=0.0, gamma=0.5)
    with pytest.raises(ValueError):
        FilterSchedule(gamma0=0.2, gamma=1.0)
    with pytest.raises(ValueError):
        FilterSchedule(gamma0=0.2, gamma=0.0)
    with pytest.raises(ValueError):
        FilterSchedule(gamma0=0.2, gamma=0.5, beta=1.5)
    with pytest.raises(ValueError):
        FilterSchedule(gamma0=0.2, gamma=0.5, r_max=0.0)


def test_error_bound_examples():
    s = ppr_schedule(0.2, beta=0.5, r_max=1e-7)
    assert s.error_bound(4.0) == pytest.approx(2e-7)
    assert s.error_bound(0.0) == 0.0
    hp = highpass_schedule(0.2, beta=0.5, r_max=1e-7)
    # gamma0 / (1 - |gamma|) = 0.2 / 0.2 = 1 for both standard schedules
    assert hp.error_bound(1.0) == pytest.approx(hp.r_max)


def test_error_bound_vectorized():
    s = ppr_schedule(0.2, beta=0.5, r_max=1e-6)
    deg = np.array([0.0, 1.0, 4.0, 9.0])
    np.testing.assert_allclose(s.error_bound(deg), 1e-6 * np.sqrt(deg))


def test_geometric_tail_is_finite():
    for s in (ppr_schedule(0.2), highpass_schedule(0.2), FilterSchedule(0.7, -0.3)):
        total = s.total_weight()
        partial = sum(abs(s.weight_at(k)) for k in range(200))
        assert partial == pytest.approx(total, rel=1e-12)


def test_ppr_gamma0_complements_gamma():
    for alpha in (0.1, 0.2, 0.5, 0.9):
        s = ppr_schedule(alpha)
        assert s.gamma0 == pytest.approx(1.0 - s.gamma)
