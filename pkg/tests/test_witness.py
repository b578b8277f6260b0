import math

import numpy as np
import pytest

from kdvb_amalgam import (
    AmalgamParams,
    ConfigError,
    DomainError,
    a2_norm_lower,
    contributing_boxes,
    discontinuity_report,
    exponent_bounds_check,
    lower_bound_integral,
    make_phi_N,
    min_N_for,
    resonant_set,
    scaling_scan,
    second_iterate_closed_form,
)


def boxes_oracle(pieces) -> set[int]:
    """Brute-force the box set from the half-open overlap condition."""
    out = set()
    for a, b in pieces:
        for n in range(int(math.floor(a)) - 2, int(math.ceil(b)) + 3):
            lo, hi = n - 0.5, n + 0.5
            # (lo, hi] meets [a, b] iff a <= hi and b > lo
            if a <= hi and b > lo:
                out.add(n)
    return out


def kxi_oracle(xi: float, n_val: int):
    """Endpoint arithmetic for K_xi with |xi| <= 1/2."""
    lo1, hi1 = max(-n_val - 2.0, xi - n_val - 2.0), min(-float(n_val), xi - n_val)
    lo2, hi2 = max(float(n_val), xi + n_val), min(n_val + 2.0, xi + n_val + 2.0)
    return [(lo1, hi1), (lo2, hi2)]


class TestMakePhi:
    def test_pieces(self):
        phi = make_phi_N(4)
        assert phi.pieces == (((-6.0, -4.0), 4 + 0j), ((4.0, 6.0), 4 + 0j))
        assert phi.real_valued_field

    def test_evaluate_center(self):
        for n in (1, 7, 300):
            assert make_phi_N(n).evaluate(n + 1.0) == complex(n)

    def test_invalid(self):
        with pytest.raises(ValueError):
            make_phi_N(0)
        with pytest.raises(ValueError):
            make_phi_N(2.5)


class TestContributingBoxes:
    def test_phi4(self):
        assert contributing_boxes(make_phi_N(4)) == {4, 5, 6, -4, -5, -6}

    def test_against_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            edges = np.sort(rng.uniform(-20, 20, 4))
            pieces = [((edges[0], edges[1]), 1.0), ((edges[2], edges[3]), 1.0)]
            if edges[1] >= edges[2]:
                continue
            from kdvb_amalgam import PiecewiseConstSpectrum

            f = PiecewiseConstSpectrum.from_pieces(pieces)
            assert contributing_boxes(f) == boxes_oracle([iv for iv, _ in f.pieces])

    def test_count_stays_bounded(self):
        for n in (4, 16, 256, 1024):
            boxes = contributing_boxes(make_phi_N(n))
            assert len(boxes) <= 8
            assert all(n - 1 <= abs(m) <= n + 3 for m in boxes)


class TestResonantSet:
    def test_centered(self):
        for n in (1, 4, 64):
            kset = resonant_set(0.0, n)
            assert kset.intervals == ((-n - 2.0, -float(n)), (float(n), n + 2.0))
            assert kset.measure == pytest.approx(4.0, abs=1e-15)

    def test_half_shift(self):
        for n in (1, 4, 64):
            assert resonant_set(0.5, n).measure == pytest.approx(3.0, abs=1e-15)

    def test_measure_law_and_oracle(self):
        for n in (4, 16, 256):
            for xi in np.linspace(-0.5, 0.5, 66)[1:]:
                kset = resonant_set(float(xi), n)
                assert kset.measure == pytest.approx(4.0 - 2.0 * abs(xi), abs=1e-12)
                assert kset.measure >= 1.0
                oracle = kxi_oracle(float(xi), n)
                for (a, b), (oa, ob) in zip(kset.intervals, sorted(oracle)):
                    assert a == pytest.approx(oa, abs=1e-12)
                    assert b == pytest.approx(ob, abs=1e-12)


class TestExponentBounds:
    def test_cubic_vanishes_at_zero(self):
        assert exponent_bounds_check(0.0, 8).max_cubic_term == 0.0

    def test_quad_range_at_zero(self):
        for n in (4, 32):
            eb = exponent_bounds_check(0.0, n)
            assert eb.min_quad_magnitude == pytest.approx(2.0 * n**2, rel=1e-12)
            assert eb.max_quad_magnitude == pytest.approx(2.0 * (n + 2) ** 2, rel=1e-12)

    def test_quad_ratio_band(self):
        for n in (4, 16, 128):
            for xi in (-0.5, -0.25, 0.0, 0.3, 0.5):
                eb = exponent_bounds_check(xi, n)
                ratio = eb.max_quad_magnitude / n**2
                assert 2.0 - 1e-9 <= ratio <= 2.0 * (1.0 + 2.0 / n) ** 2 + 1e-9

    def test_empty_resonant_set(self):
        with pytest.raises(DomainError):
            exponent_bounds_check(20.0, 2)


class TestMinNFor:
    def test_example_large_t(self):
        # oracle: at N = 1, exp(-18 t) <= exp(-t/4)/2 already holds for t = 1
        assert math.exp(-18.0) <= 0.5 * math.exp(-0.25)
        assert min_N_for(1.0) == 1

    def test_example_small_t(self):
        assert min_N_for(0.001) == 17

    def test_minimality(self):
        rng = np.random.default_rng(404)
        for _ in range(50):
            t = float(rng.uniform(1e-4, 0.999))
            n = min_N_for(t)
            assert math.exp(-2 * (n + 2) ** 2 * t) <= 0.5 * math.exp(-t / 4.0)
            if n > 1:
                assert not (-2.0 * (n + 1) ** 2 * t <= -t / 4.0 - math.log(2.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            min_N_for(0.0)
        with pytest.raises(DomainError):
            min_N_for(-0.5)


class TestLowerBoundIntegral:
    def test_numerator_real_part_negative(self):
        # sound version of the decay bound: Re(num) <= exp(-2 N^2 t) - exp(-t/4)
        for n_val, t in ((16, 0.25), (17, 0.001), (64, 0.9)):
            bound = math.exp(-2.0 * n_val**2 * t) - math.exp(-t / 4.0)
            assert bound < 0.0
            for xi in np.linspace(-0.5, 0.5, 22)[1:]:
                kset = resonant_set(float(xi), n_val)
                for a, b in kset.intervals:
                    xi1 = np.linspace(a, b, 40)
                    decay = np.exp(-t * (xi1**2 + (xi - xi1) ** 2))
                    phase = np.cos(-3.0 * xi * xi1 * (xi - xi1) * t)
                    re_num = decay * phase - math.exp(-t * xi**2)
                    assert np.max(re_num) < 0.0
                    assert np.max(re_num) <= bound + 1e-15

    def test_conjugate_symmetry(self):
        for xi in (0.1, 0.25, 0.5):
            plus = lower_bound_integral(xi, 16, 0.5)
            minus = lower_bound_integral(-xi, 16, 0.5)
            assert abs(minus - plus.conjugate()) <= 1e-12 * abs(plus)

    def test_consistency_with_closed_form(self):
        n_val, t, xi = 8, 0.5, 0.25
        inner = lower_bound_integral(xi, n_val, t)
        predicted = 1j * xi * n_val**2 * np.exp(1j * t * xi**3) * inner
        closed = second_iterate_closed_form(make_phi_N(n_val), t, xi)
        assert abs(closed - predicted) <= 1e-12 * abs(closed)

    def test_empty_set_rejected(self):
        with pytest.raises(DomainError):
            lower_bound_integral(30.0, 2, 0.5)


class TestA2NormLower:
    def test_sup_dominates_mean(self):
        p_inf = AmalgamParams(p=math.inf, q=2.0, s=-1.5)
        p_one = AmalgamParams(p=1.0, q=2.0, s=-1.5)
        assert a2_norm_lower(16, 0.5, p_inf) >= a2_norm_lower(16, 0.5, p_one)

    def test_vanishes_as_t_to_zero(self):
        # the threshold precondition forces N^2 t to stay of order one, so the
        # t -> 0 limit at fixed N is a diagnostics-only regime
        params = AmalgamParams(p=2.0, q=2.0, s=-1.5)
        small = a2_norm_lower(32, 1e-9, params, enforce_threshold=False)
        ref = a2_norm_lower(32, 0.5, params)
        assert small < 1e-4 * ref

    def test_threshold_enforced(self):
        params = AmalgamParams(p=2.0, q=2.0, s=-1.5)
        with pytest.raises(DomainError, match="min_N_for"):
            a2_norm_lower(2, 0.001, params)

    def test_floor_positive_and_stable(self):
        params = AmalgamParams(p=2.0, q=2.0, s=-1.5)
        values = [a2_norm_lower(n, 0.5, params) for n in (16, 64, 256)]
        assert min(values) > 0.0
        assert max(values) / min(values) <= 4.0


class TestScalingScan:
    def test_slopes(self):
        ns = [2**k for k in range(4, 11)]
        flat = scaling_scan(ns, AmalgamParams(2.0, 2.0, -1.0))
        assert abs(flat.slope - 0.0) <= 0.05
        falling = scaling_scan(ns, AmalgamParams(2.0, 2.0, -2.0))
        assert abs(falling.slope - (-1.0)) <= 0.05

    def test_quad_density_invariance(self):
        ns = [16, 32, 64, 128]
        coarse = scaling_scan(ns, AmalgamParams(2.0, 2.0, -1.5, quad_density=32))
        fine = scaling_scan(ns, AmalgamParams(2.0, 2.0, -1.5, quad_density=64))
        for n in ns:
            assert abs(coarse.norms[n] - fine.norms[n]) < 1e-10

    def test_config_errors(self):
        with pytest.raises(ConfigError):
            scaling_scan([16, 16, 32, 64], AmalgamParams(2.0, 2.0, -1.5))
        with pytest.raises(ConfigError):
            scaling_scan([4, 16, 32, 64], AmalgamParams(2.0, 2.0, -1.5))


class TestDiscontinuityReport:
    def test_verdict_true(self):
        # the vanishing leg needs phi_norm to drop below a quarter of its
        # first value, i.e. an N range of at least 16x at s = -3/2
        params = AmalgamParams(p=2.0, q=2.0, s=-1.5)
        reports = discontinuity_report(0.5, [16, 64, 256, 1024], params)
        assert [r.N for r in reports] == [16, 64, 256, 1024]
        assert all(r.verdict is True for r in reports)
        assert all(r.threshold_ok for r in reports)
        assert all(r.kxi_min_measure == pytest.approx(3.0, abs=1e-12) for r in reports)
        phi_norms = [r.phi_norm for r in reports]
        assert phi_norms == sorted(phi_norms, reverse=True)
        assert all(r.normalized_integral_min > 0 for r in reports)

    def test_critical_s_inapplicable(self):
        params = AmalgamParams(p=2.0, q=2.0, s=-1.0)
        with pytest.warns(UserWarning, match="s < -1"):
            reports = discontinuity_report(0.5, [16, 64, 256, 1024], params)
        assert all(r.verdict is None for r in reports)
        # the data norm does not vanish at the critical index
        assert reports[-1].phi_norm > 0.25 * reports[0].phi_norm

    def test_empty_list(self):
        with pytest.raises(ConfigError):
            discontinuity_report(0.5, [], AmalgamParams(2.0, 2.0, -1.5))

    def test_below_threshold(self):
        with pytest.raises(DomainError, match="min_N_for"):
            discontinuity_report(0.001, [2], AmalgamParams(2.0, 2.0, -1.5))

    def test_parallel_matches_serial(self):
        params = AmalgamParams(p=1.0, q=1.0, s=-1.5)
        serial = discontinuity_report(0.5, [16, 32], params, parallel=1)
        parallel = discontinuity_report(0.5, [16, 32], params, parallel=2)
        assert serial == parallel
