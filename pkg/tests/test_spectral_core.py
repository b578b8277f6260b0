import cmath
import math

import numpy as np
import pytest

from kdvb_amalgam import (
    DomainError,
    FrequencyGrid,
    IntervalSet,
    PiecewiseConstSpectrum,
    QuadratureRule,
    SampledSpectrum,
    evaluate,
    integrate_on,
    intersect,
    sample_on_grid,
)
from kdvb_amalgam.witness import make_phi_N


def random_interval_set(rng) -> IntervalSet:
    pairs = []
    for _ in range(rng.integers(0, 5)):
        a = rng.uniform(-10, 10)
        pairs.append((a, a + rng.uniform(0, 4)))
    return IntervalSet.from_pairs(pairs)


class TestFrequencyGrid:
    def test_spacing_and_points(self):
        grid = FrequencyGrid(-2.0, 2.0, 5)
        assert grid.spacing == 1.0
        assert np.allclose(grid.points(), [-2, -1, 0, 1, 2])

    def test_invalid(self):
        with pytest.raises(ValueError):
            FrequencyGrid(1.0, 1.0, 5)
        with pytest.raises(ValueError):
            FrequencyGrid(0.0, 1.0, 1)


class TestPiecewiseConstSpectrum:
    def test_evaluate_phi4(self):
        phi = make_phi_N(4)
        assert evaluate(phi, 5.0) == 4 + 0j
        assert evaluate(phi, 0.0) == 0j
        assert evaluate(phi, -5.0) == 4 + 0j

    def test_shared_endpoint_larger_left_wins(self):
        f = PiecewiseConstSpectrum.from_pieces([((0.0, 1.0), 1.0), ((1.0, 2.0), 2.0)])
        assert f.evaluate(1.0) == 2 + 0j
        assert f.evaluate_many(np.array([1.0]))[0] == 2 + 0j

    def test_validation(self):
        with pytest.raises(ValueError):
            PiecewiseConstSpectrum.from_pieces([((1.0, 1.0), 1.0)])
        with pytest.raises(ValueError):
            PiecewiseConstSpectrum.from_pieces([((0.0, 2.0), 1.0), ((1.0, 3.0), 1.0)])
        with pytest.raises(ValueError):
            PiecewiseConstSpectrum.from_pieces([((1.0, 2.0), 1.0)], real_valued_field=True)

    def test_hermitian_flag(self):
        f = PiecewiseConstSpectrum.from_pieces(
            [((1.0, 2.0), 1 + 2j), ((-2.0, -1.0), 1 - 2j)], real_valued_field=True
        )
        rng = np.random.default_rng(0)
        for xi in rng.uniform(-3, 3, 50):
            assert f.evaluate(-xi) == f.evaluate(xi).conjugate()


class TestSampledSpectrum:
    def test_interpolation_and_domain(self):
        grid = FrequencyGrid(0.0, 1.0, 3)
        f = SampledSpectrum(grid, np.array([0.0, 1.0, 0.0], dtype=complex))
        assert f.evaluate(0.25) == pytest.approx(0.5)
        with pytest.raises(DomainError):
            f.evaluate(1.5)

    def test_rejects_nonfinite(self):
        grid = FrequencyGrid(0.0, 1.0, 2)
        with pytest.raises(ValueError):
            SampledSpectrum(grid, np.array([np.nan, 0.0]))

    def test_sample_on_grid_jump_average(self):
        f = PiecewiseConstSpectrum.from_pieces([((1.0, 2.0), 1.0)])
        grid = FrequencyGrid(0.0, 4.0, 129)
        sampled = sample_on_grid(f, grid)
        pts = grid.points()
        vals = np.asarray(sampled.values)
        assert vals[np.argmin(np.abs(pts - 1.0))] == 0.5 + 0j
        assert vals[np.argmin(np.abs(pts - 1.5))] == 1.0 + 0j
        # trapezoid of jump-averaged samples reproduces the step integral
        weights = np.ones(len(pts))
        weights[0] = weights[-1] = 0.5
        assert np.sum(weights * vals).real * grid.spacing == pytest.approx(1.0, abs=1e-14)


class TestIntervalSet:
    def test_intersect_examples(self):
        nested = IntervalSet.single(-6, -4).intersect(IntervalSet.single(-5.5, -4.5))
        assert nested.intervals == ((-5.5, -4.5),)
        assert IntervalSet.single(4, 6).intersect(IntervalSet.single(7, 8)).is_empty()
        omega = IntervalSet.from_pairs([(-6, -4), (4, 6)])
        got = omega.intersect(IntervalSet.single(-5, 5))
        assert got.intervals == ((-5.0, -4.0), (4.0, 5.0))

    def test_from_pairs_merges_and_validates(self):
        s = IntervalSet.from_pairs([(0, 1), (0.5, 2), (3, 3)])
        assert s.intervals == ((0.0, 2.0), (3.0, 3.0))
        assert s.measure == 2.0
        with pytest.raises(ValueError):
            IntervalSet.from_pairs([(2, 1)])

    def test_algebra_properties(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            a, b, c = (random_interval_set(rng) for _ in range(3))
            assert intersect(a, b).intervals == intersect(b, a).intervals
            lhs = intersect(intersect(a, b), c)
            rhs = intersect(a, intersect(b, c))
            assert lhs.intervals == rhs.intervals
            assert intersect(a, b).measure <= min(a.measure, b.measure) + 1e-12

    def test_reflect_translate(self):
        s = IntervalSet.from_pairs([(1, 2), (4, 6)])
        assert s.reflect().intervals == ((-6.0, -4.0), (-2.0, -1.0))
        assert s.translate(1.5).intervals == ((2.5, 3.5), (5.5, 7.5))


class TestIntegrateOn:
    def test_constant(self):
        val = integrate_on(lambda x: np.ones_like(x), IntervalSet.single(0, 2))
        assert val == pytest.approx(2.0, abs=1e-14)

    def test_odd(self):
        val = integrate_on(lambda x: x.astype(complex), IntervalSet.single(-1, 1))
        assert abs(val) < 1e-14

    def test_oscillatory_closed_form(self):
        # oracle: integral of e^{i xi} over [0, pi] = (e^{i pi} - 1) / i = 2i
        oracle = (cmath.exp(1j * math.pi) - 1.0) / 1j
        val = integrate_on(lambda x: np.exp(1j * x), IntervalSet.single(0, math.pi))
        assert val == pytest.approx(oracle, abs=1e-13)
        assert oracle == pytest.approx(2j, abs=1e-15)

    def test_empty_set(self):
        assert integrate_on(lambda x: np.ones_like(x), IntervalSet.empty()) == 0j

    def test_convergence_order(self):
        # analytic oscillatory integrand with closed-form oracle; error must
        # fall by at least 2^8 (with 1.5x slack) per density doubling; omega
        # is large enough that two doublings stay above the roundoff floor
        omega = 40.0
        oracle = (cmath.exp(1j * omega * 3.0) - 1.0) / (1j * omega)
        errs = []
        for density in (2, 4, 8):
            val = integrate_on(
                lambda x: np.exp(1j * omega * x),
                IntervalSet.single(0.0, 3.0),
                QuadratureRule(density),
            )
            errs.append(abs(val - oracle))
        assert errs[2] > 1e-14  # still resolvable, not a roundoff comparison
        assert errs[1] / errs[0] <= 1.5 * 2.0**-8
        assert errs[2] / errs[1] <= 1.5 * 2.0**-8

    def test_deterministic(self):
        rule = QuadratureRule(16)
        vals = {
            integrate_on(lambda x: np.exp(1j * x**2), IntervalSet.from_pairs([(0, 1), (2, 3)]), rule)
            for _ in range(5)
        }
        assert len(vals) == 1
