import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pas import infotheory
from pas.constellation import build_constellation
from pas.errors import InfeasibleTargetError, SearchFailure
from pas.modes import BUILTIN_MODES, RateCurveBuilder, builtin_mode
from pas.sim import (
    ChannelRng,
    OperatingPoint,
    StopRule,
    adapt,
    awgn,
    backoff,
    ci95,
    crossing_snr_db,
    find_operating_point,
    gap_db,
    qualifies,
    reference_input,
    run_fer,
)


@pytest.fixture(scope="module")
def toy4():
    return builtin_mode("toy4")


@pytest.fixture(scope="module")
def ref8():
    return reference_input(build_constellation(3), 11.45)


class TestChannel:
    def test_reproducible(self):
        x = np.arange(50.0)
        a = awgn(x, ChannelRng(9).frame(3))
        b = awgn(x, ChannelRng(9).frame(3))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, awgn(x, ChannelRng(10).frame(3)))

    def test_variance(self):
        z = awgn(np.zeros(1_000_000), ChannelRng(0).next())
        assert 0.995 <= z.var() <= 1.005

    def test_zero_noise(self):
        x = np.linspace(-3, 3, 11)
        assert np.array_equal(awgn(x, ChannelRng(0).next(), variance=0.0), x)

    def test_streams_advance(self):
        rng = ChannelRng(1)
        a, b = rng.next().standard_normal(4), rng.next().standard_normal(4)
        assert not np.array_equal(a, b)
        assert np.array_equal(b, ChannelRng(1).frame(1).standard_normal(4))


class TestStatistics:
    def test_ci_formula(self):
        assert ci95(0.5, 100) == pytest.approx(0.098)

    @given(st.floats(1e-3, 3.0), st.floats(-5.0, 40.0))
    def test_gap_consistency(self, rate, snr):
        g = gap_db(rate, snr)
        assert g == pytest.approx(snr - 10 * math.log10(2 ** (2 * rate) - 1), abs=1e-6)

    def test_gap_at_zero_rate(self):
        assert gap_db(0.0, 3.0) == math.inf

    def test_rule_of_three(self):
        op = OperatingPoint("x", 1.0, 10.0, 0.0, 0.0, 0.0, 200, 0, 0.1)
        assert op.fer_upper == pytest.approx(0.015)


class TestRunFer:
    def test_error_free_at_high_snr(self, toy4):
        op = run_fer(toy4, 60.0, StopRule(min_errors=1, max_frames=200), seed=1)
        assert op.fer == 0 and op.frames == 200 and op.errors == 0
        assert 0 < op.fer_upper <= 3 / 200

    def test_seeded_determinism(self, toy4):
        stop = StopRule(min_errors=5, max_frames=64)
        a = run_fer(toy4, 2.0, stop, seed=7, max_iter=20)
        b = run_fer(toy4, 2.0, stop, seed=7, max_iter=20)
        assert a == b

    def test_batching_does_not_change_result(self, toy4):
        from pas import sim

        stop = StopRule(min_errors=1000, max_frames=40)
        a = sim.run_fer(toy4, 2.0, stop, seed=3, max_iter=20, batch=7)
        b = sim.run_fer(toy4, 2.0, stop, seed=3, max_iter=20, batch=40)
        assert (a.errors, a.frames) == (b.errors, b.frames)

    def test_stops_at_min_errors(self, toy4):
        op = run_fer(toy4, -2.0, StopRule(min_errors=10, max_frames=1000), seed=0, max_iter=10)
        assert op.errors == 10
        assert op.frames < 1000
        assert 0 <= op.fer <= 1 and op.ci95 >= 0

    def test_point_fields(self, toy4):
        op = run_fer(toy4, 60.0, StopRule(1, 10))
        assert op.rate == pytest.approx(toy4.spectral_efficiency)
        assert op.gap_db == pytest.approx(gap_db(op.rate, 60.0), abs=1e-6)
        assert set(op.to_dict()) >= {"mode", "rate", "snr_db", "gap_db", "fer", "ci95", "frames", "backoff"}


class TestBackoff:
    @pytest.mark.parametrize("name", ["toy4", "toy8", "toy8-r175"])
    def test_identity(self, name):
        mode = builtin_mode(name)
        cond = infotheory.conditional_level_entropies(mode.design)
        expected = 1 - float(mode.gamma) - cond.sum()
        assert backoff(mode) == pytest.approx(expected, abs=1e-9)

    def test_zero_at_crossing(self):
        const = build_constellation(3)
        snr = crossing_snr_db(const, 0.25)
        s = reference_input(const, snr)
        assert infotheory.rbmd_value(s) - s.amplitude_entropy() - 0.25 == pytest.approx(0.0, abs=1e-4)


class TestAdapt:
    def test_identity(self, ref8):
        pt = adapt(ref8, 1.8543, 0.25, 1.8543)
        assert pt.lam == 0.0
        assert pt.delta == ref8.delta
        assert pt.snr_db == pytest.approx(11.45, abs=1e-9)

    def test_8ask_row(self, ref8):
        assert adapt(ref8, 1.8543, 0.25, 1.6990).snr_db == pytest.approx(10.4136, abs=0.05)

    def test_64ask_row(self):
        ref = reference_input(build_constellation(6), 31.8006)
        assert adapt(ref, 5.0913, 0.4, 4.0900).snr_db == pytest.approx(25.6054, abs=0.08)

    def test_infeasible(self, ref8):
        with pytest.raises(InfeasibleTargetError):
            adapt(ref8, 1.8543, 0.25, 2.5)

    def test_backoff_kept_and_monotone(self, ref8):
        rng = np.random.default_rng(0)
        target = infotheory.rbmd_value(ref8) - 1.8543
        rates = np.sort(rng.uniform(1.0, 2.2, 10))
        snrs = []
        for r in rates:
            pt = adapt(ref8, 1.8543, 0.25, r)
            assert pt.rbmd - r == pytest.approx(target, abs=1e-5)
            assert pt.amp_probs.sum() == pytest.approx(1.0)
            snrs.append(pt.snr_db)
        assert np.all(np.diff(snrs) > 0)


class TestSearch:
    def test_qualifies_requires_observability(self):
        op = OperatingPoint("x", 1.0, 1.0, 0.0, 0.0, 0.0, 100, 0, 0.0)
        assert qualifies(op, 0.05)
        assert not qualifies(op, 0.01)

    def test_bad_target(self):
        with pytest.raises(ValueError):
            find_operating_point(lambda s: None, 0.6)

    def test_coarse_target_returns_at_once(self, toy4):
        calls = []

        def factory(snr):
            calls.append(snr)
            return toy4

        op = find_operating_point(factory, 0.49, seed=0, start_db=30.0, stop=StopRule(5, 50), max_iter=20)
        assert calls == [30.0]
        assert op.fer <= 0.49

    def test_impossible_target(self, toy4):
        with pytest.raises(SearchFailure) as info:
            find_operating_point(lambda s: toy4, 1e-9, start_db=0.0, step_db=1.0, max_steps=3, stop=StopRule(5, 1000), max_iter=10)
        assert len(info.value.trace) == 3

    def test_rate_curve_search(self):
        builder = RateCurveBuilder(BUILTIN_MODES["toy8"])
        op = find_operating_point(builder, 0.1, seed=2, stop=StopRule(min_errors=10, max_frames=100), max_iter=50)
        assert op.fer <= 0.1
        assert op.backoff > 0
