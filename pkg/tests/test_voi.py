import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from uavmon.errors import ConfigError
from uavmon.voi import (
    InitialRewardParams,
    VoiParams,
    credibility,
    distance_factor,
    duration_factor,
    initial_reward,
    voi_at,
)

# 10 * exp(-0.4) and ln(5)/0.02 evaluated with mpmath at 40 digits
TEN_EXP_MINUS_0_4 = 6.703200460356393
FIVE_EXPIRY_ROUNDS = 80.47189562170502


class TestCredibility:
    def test_maximum(self):
        assert credibility(1.0, 1.0) == 1.0

    def test_zero_factor(self):
        assert credibility(0.0, 0.7) == 0.0

    def test_product(self):
        assert credibility(0.5, 0.6) == pytest.approx(0.3, rel=1e-12)

    @pytest.mark.parametrize("lam,w", [(2.0, 1.0), (-0.1, 1.0), (1.0, 1.5)])
    def test_out_of_range(self, lam, w):
        with pytest.raises(ConfigError):
            credibility(lam, w)


class TestDistanceFactor:
    def test_unit(self):
        assert distance_factor(1.0, 1.0) == 1.0

    def test_division(self):
        assert distance_factor(2.0, 4.0) == 0.5

    def test_reciprocal_law(self):
        assert distance_factor(3.0, 10.0) == pytest.approx(2 * distance_factor(3.0, 20.0))

    @pytest.mark.parametrize("a_est", [0.0, -1.0])
    def test_nonpositive_area(self, a_est):
        with pytest.raises(ConfigError):
            distance_factor(1.0, a_est)


class TestDurationFactor:
    def test_cap(self):
        assert duration_factor(60, 60) == 1.0

    def test_ratio(self):
        assert duration_factor(30, 60) == 0.5

    def test_table_default(self):
        p = InitialRewardParams()
        assert duration_factor(p.T, p.T_max) == 1.0

    def test_overshoot_clamps(self, caplog):
        assert duration_factor(90, 60) == 1.0
        assert "clamping" in caplog.text

    def test_nonpositive(self):
        with pytest.raises(ConfigError):
            duration_factor(0, 60)


class TestInitialReward:
    def test_table_defaults(self):
        assert initial_reward(InitialRewardParams()) == 10.0

    def test_zero_annihilates(self):
        assert initial_reward(InitialRewardParams(sigma=0.0)) == 0.0
        assert initial_reward(InitialRewardParams(lam=0.0)) == 0.0

    def test_product(self):
        p = InitialRewardParams(sigma=10.0, lam=0.5, W=1.0, T=30, T_max=60)
        assert initial_reward(p) == pytest.approx(2.5, rel=1e-12)

    @given(
        sigma=st.floats(0.0, 100.0),
        k=st.floats(0.0, 10.0),
    )
    def test_linear_in_sigma(self, sigma, k):
        a = initial_reward(InitialRewardParams(sigma=sigma * k, lam=0.8, W=0.9, alpha=2.0, A_est=3.0, T=5, T_max=10))
        b = initial_reward(InitialRewardParams(sigma=sigma, lam=0.8, W=0.9, alpha=2.0, A_est=3.0, T=5, T_max=10))
        assert a == pytest.approx(k * b, rel=1e-9, abs=1e-12)

    def test_params_validate(self):
        with pytest.raises(ConfigError):
            InitialRewardParams(lam=2.0)
        with pytest.raises(ConfigError):
            VoiParams(A=0.0)
        with pytest.raises(ConfigError):
            VoiParams(B=-0.1)


class TestVoiAt:
    def test_zero_delay(self):
        assert voi_at(10.0, 0.02, 0) == 10.0

    def test_twenty_rounds(self):
        assert voi_at(10.0, 0.02, 20) == pytest.approx(TEN_EXP_MINUS_0_4, rel=1e-12)

    def test_expiry_threshold(self):
        # (A=5, B=0.02) drops to the value-1 threshold at ~80.5 rounds
        assert voi_at(5.0, 0.02, FIVE_EXPIRY_ROUNDS) == pytest.approx(1.0, rel=1e-9)
        assert voi_at(5.0, 0.02, 80) > 1.0 > voi_at(5.0, 0.02, 81)

    def test_negative_delay(self):
        with pytest.raises(ValueError):
            voi_at(10.0, 0.02, -1)

    @given(
        ir=st.floats(1e-3, 1e3),
        B=st.floats(1e-4, 1.0),
        t1=st.floats(0, 500),
        t2=st.floats(0, 500),
    )
    def test_semigroup(self, ir, B, t1, t2):
        assert voi_at(ir, B, t1 + t2) == pytest.approx(voi_at(voi_at(ir, B, t1), B, t2), rel=1e-12)

    @given(ir=st.floats(1e-3, 1e3), B=st.floats(1e-3, 1.0), t=st.floats(0, 300), dt=st.floats(1e-3, 100))
    def test_monotone_and_bounded(self, ir, B, t, dt):
        a, b = voi_at(ir, B, t), voi_at(ir, B, t + dt)
        assert 0 < b < a <= ir

    def test_matches_mpmath(self):
        mpmath.mp.dps = 30
        for ir, B, t in [(10.0, 0.02, 20), (3.5, 0.1, 7.25), (0.01, 0.5, 100)]:
            ref = mpmath.mpf(ir) * mpmath.exp(-mpmath.mpf(B) * mpmath.mpf(t))
            assert voi_at(ir, B, t) == pytest.approx(float(ref), rel=1e-12)
