import math

import numpy as np
import pytest
from scipy import integrate, stats

from beamgain.beams import ArrayConfig, beam_pattern, first_beam_direction
from beamgain.dist import RicianParams, antenna_selection_dist, bound_q_dist, theta0_upper_dist
from beamgain.perf import (
    IntegrationError,
    PerfResult,
    adaptive_simpson,
    ergodic_capacity,
    ergodic_capacity_approx,
    expected_gain,
    expected_gain_approx,
    growth_diagnostics,
    mean_capacity,
    mean_gain,
    outage_capacity,
    outage_capacity_approx,
    outage_probability,
    outage_probability_approx,
)

K0, K1 = RicianParams(0.0), RicianParams(1.0)
RHO = math.sqrt(10.0)  # 5 dB


class TestAdaptiveSimpson:
    def test_polynomial_exact(self):
        assert adaptive_simpson(lambda x: x**3 - x, 0.0, 2.0) == pytest.approx(2.0, abs=1e-13)

    def test_exponential(self):
        assert adaptive_simpson(np.exp, 0.0, 1.0, tol=1e-12) == pytest.approx(math.e - 1, abs=1e-11)

    def test_empty_interval(self):
        assert adaptive_simpson(np.exp, 1.0, 1.0) == 0.0

    def test_failure_signaled(self):
        with pytest.raises(IntegrationError):
            adaptive_simpson(lambda x: np.sign(x - 0.3) * np.abs(x - 0.3) ** -0.9, 0.0, 1.0, max_depth=5)


class TestExpectedGain:
    def test_unit_exponential(self):
        assert expected_gain(0.0, ArrayConfig(1, 0.5), K0) == pytest.approx(1.0, abs=1e-9)

    def test_max_of_two_exponentials(self):
        assert expected_gain(0.0, ArrayConfig(2), K0) == pytest.approx(1.5, abs=1e-9)

    @pytest.mark.parametrize("M", [3, 8, 17])
    def test_rayleigh_harmonic(self, M):
        harmonic = math.fsum(1 / k for k in range(1, M + 1))
        assert expected_gain("nu", ArrayConfig(M), K0) == pytest.approx(harmonic, rel=1e-9)

    def test_beam_direction_closed_form_limit(self):
        exact = expected_gain("nu", ArrayConfig(16), K1)
        assert abs(exact - 8.5) / 8.5 < 0.05

    def test_approx_at_beam_direction(self):
        r = expected_gain_approx("nu", ArrayConfig(4), K1)
        assert isinstance(r, PerfResult)
        assert r.approx == 2.5 and r.brackets is None
        assert r.exact == pytest.approx(expected_gain("nu", ArrayConfig(4), K1))

    def test_approx_rayleigh(self):
        assert expected_gain_approx("nu", ArrayConfig(4), K0, exact=False).approx == 1.0

    def test_brackets_broadside(self):
        # mpmath: (K a + 1)/(K + 1) and + sqrt(2 K a + 1)/((K + 1) sqrt 3), a = 1 + 1/sqrt 2
        r = expected_gain_approx(0.0, ArrayConfig(4), K1, exact=False)
        assert r.brackets[0] == pytest.approx(1.353553390593273762, rel=1e-14)
        assert r.brackets[1] == pytest.approx(1.960060711404620540, rel=1e-14)
        assert r.approx == r.brackets[0] and r.exact is None

    def test_interior_rejected(self):
        with pytest.raises(ValueError):
            expected_gain_approx(0.1, ArrayConfig(4), K1)

    @pytest.mark.parametrize("K", [0.5, 1.0, 5.0])
    @pytest.mark.parametrize("M", [4, 8, 16, 32])
    def test_david_brackets_contain_mean(self, K, M):
        cfg, rician = ArrayConfig(M), RicianParams(K)
        lo, hi = expected_gain_approx("zero", cfg, rician, exact=False).brackets
        assert lo <= mean_gain(theta0_upper_dist(cfg, rician)) <= hi

    @pytest.mark.parametrize("K", [0.5, 1.0, 3.0])
    def test_convergence_at_beam_direction(self, K):
        rician = RicianParams(K)
        gaps = [
            abs(expected_gain("nu", ArrayConfig(M), rician) - expected_gain_approx("nu", ArrayConfig(M), rician, exact=False).approx)
            for M in (8, 16, 32, 64, 128)
        ]
        # Once the gap reaches the quadrature floor only noise is left.
        assert all(b <= a + 1e-9 for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-9

    @pytest.mark.parametrize("K", [0.5, 1.0, 3.0])
    def test_relative_convergence_at_broadside(self, K):
        rician = RicianParams(K)
        rel = []
        for M in (8, 16, 32, 64, 128):
            cfg = ArrayConfig(M)
            exact = expected_gain("zero", cfg, rician)
            rel.append(abs(exact - expected_gain_approx("zero", cfg, rician, exact=False).approx) / exact)
        assert all(b <= a for a, b in zip(rel, rel[1:]))

    @pytest.mark.parametrize("K", [0.3, 1.0, 10.0])
    def test_interior_angles_between_extremes(self, K):
        cfg, rician = ArrayConfig(8), RicianParams(K)
        lo, hi = expected_gain("zero", cfg, rician), expected_gain("nu", cfg, rician)
        for t in np.linspace(0, first_beam_direction(cfg), 7)[1:-1]:
            assert lo <= expected_gain(t, cfg, rician) <= hi


class TestErgodicCapacity:
    def test_single_antenna_rayleigh_definition(self):
        rho = 100.0
        direct, _ = integrate.quad(lambda x: math.log2(1 + rho * x) * math.exp(-x), 0, np.inf, epsabs=1e-13)
        got = ergodic_capacity(0.0, ArrayConfig(1, 0.5), K0, rho)
        assert got == pytest.approx(direct, rel=1e-8)

    def test_zero_snr(self):
        assert ergodic_capacity("nu", ArrayConfig(4), K1, 0.0) == 0.0

    def test_negative_snr(self):
        with pytest.raises(ValueError):
            mean_capacity(bound_q_dist(1.0, K1), -1.0)

    def test_approx_values(self):
        # log2(1 + rho * 2.5) and log2(1 + rho * (1 + a_4)/2), mpmath
        assert ergodic_capacity_approx("nu", ArrayConfig(4), K1, RHO) == pytest.approx(3.154728065941181802, rel=1e-14)
        assert ergodic_capacity_approx("zero", ArrayConfig(4), K1, RHO) == pytest.approx(2.400623081303482988, rel=1e-14)

    def test_approx_gap_is_log_ratio(self):
        cfg = ArrayConfig(8)
        gap = ergodic_capacity_approx("nu", cfg, K1, RHO) - ergodic_capacity_approx("zero", cfg, K1, RHO)
        a = 1 / (8 * math.sin(math.pi / 16) ** 2)
        assert gap == pytest.approx(math.log2((1 + RHO * 4.5) / (1 + RHO * (a + 1) / 2)), rel=1e-13)

    def test_approx_rejects_interior(self):
        with pytest.raises(ValueError):
            ergodic_capacity_approx(0.1, ArrayConfig(4), K1, RHO)

    def test_large_array_near_approx(self):
        exact = ergodic_capacity("nu", ArrayConfig(64), K1, RHO)
        assert abs(exact - ergodic_capacity_approx("nu", ArrayConfig(64), K1, RHO)) < 0.03

    @pytest.mark.parametrize("K", [0.0, 1.0, 10.0])
    @pytest.mark.parametrize("M", [2, 8])
    @pytest.mark.parametrize("rho", [0.1, 3.0, 100.0])
    def test_jensen(self, K, M, rho):
        cfg, rician = ArrayConfig(M), RicianParams(K)
        for theta in ("zero", "nu", 0.05):
            cap = ergodic_capacity(theta, cfg, rician, rho)
            assert cap <= math.log2(1 + rho * expected_gain(theta, cfg, rician)) + 1e-9

    def test_interior_angles_between_extremes(self):
        cfg = ArrayConfig(16)
        lo, hi = ergodic_capacity("zero", cfg, K1, RHO), ergodic_capacity("nu", cfg, K1, RHO)
        for t in np.linspace(0, first_beam_direction(cfg), 6)[1:-1]:
            assert lo <= ergodic_capacity(t, cfg, K1, RHO) <= hi

    @pytest.mark.parametrize("M", [2, 8, 64])
    @pytest.mark.parametrize("theta", ["zero", "nu"])
    def test_against_scipy_quadrature(self, M, theta):
        # Independent route: scipy's noncentral chi-square and QUADPACK on
        # the capacity integrand rho / ((1 + rho x) ln 2) * (1 - F(x)).
        cfg = ArrayConfig(M)
        th = 0.0 if theta == "zero" else first_beam_direction(cfg)
        gammas = beam_pattern(th, cfg).gammas

        def survival(x):
            return 1.0 - np.prod(stats.ncx2.cdf(4.0 * x, 2, 2.0 * gammas))

        integrand = lambda x: RHO / ((1 + RHO * x) * math.log(2)) * survival(x)
        ref, _ = integrate.quad(integrand, 0, 4 * M + 60, limit=400, epsabs=1e-12, epsrel=1e-11)
        assert ergodic_capacity(theta, cfg, K1, RHO) == pytest.approx(ref, rel=1e-8)

    @pytest.mark.parametrize("K", [1.0, 3.0])
    def test_capacity_gap_shrinks(self, K):
        rician = RicianParams(K)
        for which in ("zero", "nu"):
            gaps = [
                abs(ergodic_capacity(which, ArrayConfig(M), rician, RHO) - ergodic_capacity_approx(which, ArrayConfig(M), rician, RHO))
                for M in (8, 16, 32, 64, 128)
            ]
            assert all(b <= a for a, b in zip(gaps, gaps[1:]))

    def test_capacity_gap_weak_los_dips_at_small_array(self):
        # At K = 0.5 the positive mean excess and the Jensen deficit nearly
        # cancel at M = 8, so the gap on the beam direction first grows.
        rician = RicianParams(0.5)
        gaps = [
            abs(ergodic_capacity("nu", ArrayConfig(M), rician, RHO) - ergodic_capacity_approx("nu", ArrayConfig(M), rician, RHO))
            for M in (8, 16, 32, 64, 128)
        ]
        assert gaps[0] < gaps[1]
        assert all(b <= a for a, b in zip(gaps[1:], gaps[2:]))
        zero_gaps = [
            abs(ergodic_capacity("zero", ArrayConfig(M), rician, RHO) - ergodic_capacity_approx("zero", ArrayConfig(M), rician, RHO))
            for M in (8, 16, 32, 64, 128)
        ]
        assert all(b <= a for a, b in zip(zero_gaps, zero_gaps[1:]))


class TestOutage:
    def test_zero_rate(self):
        assert outage_probability(0.0, "nu", ArrayConfig(4), K1, RHO) == 0.0

    @pytest.mark.parametrize("M", [2, 4, 8, 16])
    def test_beam_direction_bound(self, M):
        cfg = ArrayConfig(M)
        for c0 in (0.5, 2.0, 4.0):
            assert outage_probability(c0, "nu", cfg, K1, RHO) <= outage_probability_approx(c0, "nu", cfg, K1, RHO)

    def test_gap_shrinks(self):
        gaps = []
        for M in (8, 16, 32, 64):
            cfg = ArrayConfig(M)
            c0 = math.log2(1 + RHO * 0.5 * M)  # threshold at half the mean gain
            gaps.append(abs(outage_probability(c0, "nu", cfg, K1, RHO) - outage_probability_approx(c0, "nu", cfg, K1, RHO)))
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_invalid(self):
        with pytest.raises(ValueError):
            outage_probability(-1.0, "nu", ArrayConfig(4), K1, RHO)
        with pytest.raises(ValueError):
            outage_probability(1.0, "nu", ArrayConfig(4), K1, 0.0)


class TestOutageCapacity:
    @pytest.mark.parametrize("M", [1, 2, 6])
    def test_rayleigh_closed_form(self, M):
        p0 = 0.05
        expected = math.log2(1 + RHO * -math.log1p(-p0 ** (1 / M)))
        assert outage_capacity(p0, 0.0, ArrayConfig(M, 0.5), K0, RHO) == pytest.approx(expected, rel=1e-9)

    def test_monotone_in_target(self):
        caps = [outage_capacity(p, "zero", ArrayConfig(8), K1, RHO) for p in (0.01, 0.05, 0.2, 0.5, 0.9)]
        assert all(b > a for a, b in zip(caps, caps[1:]))

    @pytest.mark.parametrize("p0", [0.0, 1.0])
    def test_target_range(self, p0):
        with pytest.raises(ValueError):
            outage_capacity(p0, "nu", ArrayConfig(4), K1, RHO)

    def test_gap_at_32_below_8(self):
        def gap(M):
            cfg = ArrayConfig(M)
            return abs(outage_capacity(0.1, "nu", cfg, K1, RHO) - outage_capacity_approx(0.1, "nu", cfg, K1, RHO))

        assert gap(32) < gap(8)

    def test_broadside_approx_uses_square_root(self):
        cfg = ArrayConfig(16)
        x = theta0_upper_dist(cfg, K1).quantile(0.2)
        assert outage_capacity_approx(0.2, "zero", cfg, K1, RHO) == pytest.approx(math.log2(1 + RHO * x), rel=1e-9)


class TestGrowth:
    def test_rows_and_columns(self):
        rows = growth_diagnostics([2, 4, 8], K1, RHO)
        assert [r["M"] for r in rows] == [2, 4, 8]
        assert {"beam_mean_over_M", "antenna_mean_over_lnM", "beam_capacity_over_log2M"} <= set(rows[0])

    def test_must_ascend(self):
        with pytest.raises(ValueError):
            growth_diagnostics([4, 2], K1, RHO)

    def test_beam_ratio_limit(self):
        rows = growth_diagnostics([32, 64, 128], K1, RHO)
        assert abs(rows[-1]["beam_mean_over_M"] - 0.5) / 0.5 < 0.05

    def test_broadside_ratio_trend(self):
        rows = growth_diagnostics([32, 64, 128], K1, RHO, theta="zero")
        target = 0.5 * 4 / math.pi**2  # 0.2026423672846755
        errs = [abs(r["beam_mean_over_M"] - target) for r in rows]
        assert errs[-1] < errs[0]

    def test_rayleigh_antenna_is_harmonic(self):
        for row in growth_diagnostics([2, 4, 8, 16], K0, RHO):
            M = row["M"]
            assert row["antenna_mean"] == pytest.approx(math.fsum(1 / k for k in range(1, M + 1)), abs=1e-9)

    def test_antenna_capacity_slower_than_beam(self):
        rows = growth_diagnostics([8, 128], K1, RHO)
        beam_growth = rows[1]["beam_capacity"] - rows[0]["beam_capacity"]
        ant_growth = rows[1]["antenna_capacity"] - rows[0]["antenna_capacity"]
        assert ant_growth < beam_growth


def test_antenna_mean_matches_deterministic_limit():
    assert mean_gain(antenna_selection_dist(ArrayConfig(4), RicianParams(math.inf))) == 1.0
