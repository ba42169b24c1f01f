"""Sawtooth expansions: remainder sum, Fourier/Vaaler approximants, G-sums."""

import math
from fractions import Fraction

import numpy as np
import pytest

from heisenweyl.kernel import IrrationalParameter, psi
from heisenweyl.psiexpr import (
    BoundaryTally,
    ExpansionReport,
    PsiExpansionParams,
    g_integral,
    g_sum,
    psi_sum_R,
    residual_profile,
    truncated_fourier_grid,
    truncated_fourier_psi,
    vaaler_coefficient_bounds,
    vaaler_grid,
    vaaler_psi,
)
from heisenweyl.spectrum import ManifoldConfig

SQRT2 = IrrationalParameter.sqrt2()
PHI = IrrationalParameter.golden()
L1 = ManifoldConfig(1, SQRT2)
L2 = ManifoldConfig(2, SQRT2)


def _psi_float(u):
    u = np.asarray(u, dtype=np.float64)
    return u - np.floor(u) - 0.5


class TestPsiSumR:
    def test_single_term_l1(self):
        # one term: -2 psi(2 - sqrt2/2 - 1/2); the 4/(2^l (l-1)!) prefactor
        # at l=1 is 2, fixed by matching the exact counting remainder
        expect = -2.0 * ((2 - math.sqrt(2) / 2 - 0.5) % 1.0 - 0.5)
        assert abs(psi_sum_R(L1, 4) - expect) < 1e-12
        assert abs(psi_sum_R(L1, 4) - (-0.5857864376269049)) < 1e-12

    def test_single_term_l2(self):
        expect = -(4 - math.sqrt(2)) * (((2 - math.sqrt(2) / 2 - 1) % 1.0) - 0.5)
        assert abs(psi_sum_R(L2, 4) - expect) < 1e-12
        assert abs(psi_sum_R(L2, 4) - 0.5355339059327376) < 1e-12

    def test_empty_sum(self):
        assert psi_sum_R(L1, 1) == 0.0
        assert psi_sum_R(L1, -3) == 0.0

    def test_argument_periodicity(self):
        # each term's sawtooth argument may be shifted by any integer
        for m, x in ((1, 4), (2, 17), (3, 31)):
            arg = SQRT2.linear(Fraction(x, 2 * m) - Fraction(1, 2), Fraction(-m, 2))
            assert psi(arg).value == pytest.approx(psi(arg + 5).value, abs=1e-13)

    def test_boundary_tally_stays_zero_for_surds(self):
        tally = BoundaryTally()
        psi_sum_R(L1, 400, tally)
        assert tally.count == 0

    def test_rational_theta_boundary_is_tallied(self):
        # theta = 1/2, x chosen so one argument x/2m - m/4 - 1/2 is an integer
        theta = IrrationalParameter(kind="literal", decimal="0.5", bits=8)
        cfg = ManifoldConfig(1, theta)
        tally = BoundaryTally()
        psi_sum_R(cfg, 3, tally)  # m=1: 3/2 - 1/4 - 1/2 = 3/4; m=2: 3/4 - 1/2 - 1/2
        psi_sum_R(cfg, 7, tally)  # m=1: 7/2 - 3/4 = 11/4; m=2: 7/4 - 1 = 3/4; ...
        assert tally.count >= 0  # structural: no crash, tally is integral
        # force an exact hit: m=1 needs x/2 - 3/4 integral, x = 7/2 works
        tally2 = BoundaryTally()
        psi_sum_R(cfg, Fraction(7, 2), tally2)
        assert tally2.count == 1


class TestResidualProfile:
    def test_l1_slope_small_window(self):
        xs = np.logspace(2, 3.5, 40).tolist()
        prof = residual_profile(L1, xs)
        assert prof.slope is not None and prof.slope < 0.65
        for x, r in prof.points:
            assert abs(r) < 2.0 * math.sqrt(x)

    def test_single_sample_no_slope(self):
        prof = residual_profile(L1, [100.0])
        assert prof.slope is None
        assert len(prof.points) == 1

    def test_empty_samples(self):
        prof = residual_profile(L1, [])
        assert prof.points == [] and prof.slope is None

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            residual_profile(L1, [10.0, -1.0])


class TestTruncatedFourier:
    def test_half_integer_vanishes(self):
        rep = truncated_fourier_psi(0.5, 10)
        assert abs(rep.value) < 1e-14

    def test_quarter_point(self):
        rep = truncated_fourier_psi(0.25, 1000)
        assert abs(rep.value - (-0.25)) <= rep.envelope
        assert rep.envelope == pytest.approx(0.004)

    def test_near_integer_envelope_clamps(self):
        rep = truncated_fourier_psi(1e-9, 1000)
        assert rep.envelope == 1.0

    def test_envelope_constant_on_grid(self):
        # |psi - value| <= c min(1, 1/(H||u||)) with a single modest c
        us = (2 * np.arange(2048) + 1) / 4096.0
        for H in (10.0, 50.0):
            values, envelopes = truncated_fourier_grid(us, H)
            ratio = np.abs(_psi_float(us) - values) / envelopes
            assert float(np.max(ratio)) <= 3.0

    def test_parseval_mean_approaches_one_twelfth(self):
        us = (np.arange(4096) + 0.5) / 4096.0
        gaps = []
        for H in (32.0, 256.0):
            values, _ = truncated_fourier_grid(us, H)
            gaps.append(abs(float(np.mean(values ** 2)) - 1.0 / 12.0))
        assert gaps[1] < gaps[0] < 6e-3
        assert gaps[1] < 3e-4

    def test_requires_H_at_least_2(self):
        with pytest.raises(ValueError):
            truncated_fourier_psi(0.3, 1.5)


class TestVaaler:
    @pytest.mark.parametrize("H", [10.0, 50.0, 250.0])
    def test_majorant_on_grid(self, H):
        us = (2 * np.arange(4096) + 1) / 8192.0 * 3.0 - 1.0  # spill outside [0,1)
        values, envelopes = vaaler_grid(us, H)
        assert np.all(envelopes >= 0.0)
        assert np.all(np.abs(_psi_float(us) - values) <= envelopes)

    def test_discontinuity_point(self):
        # u = 0: value is exactly 0, envelope is the Fejer mass 1/2 (plus guard),
        # and psi(0) = -1/2 sits exactly on the majorant
        rep = vaaler_psi(0.0, 50)
        assert rep.value == 0.0
        assert abs(-0.5 - rep.value) <= rep.envelope
        assert rep.envelope == pytest.approx(0.5, abs=1e-9)

    def test_sharper_than_plain_fourier_in_mean(self):
        us = (2 * np.arange(4096) + 1) / 8192.0
        H = 50.0
        v_plain, _ = truncated_fourier_grid(us, H)
        v_vaaler, _ = vaaler_grid(us, H)
        err_plain = np.abs(_psi_float(us) - v_plain)
        err_vaaler = np.abs(_psi_float(us) - v_vaaler)
        assert float(np.mean(err_vaaler)) < float(np.mean(err_plain))

    def test_coefficient_bounds(self):
        for H in (10.0, 50.0, 250.0, 1000.0):
            bounds = vaaler_coefficient_bounds(H)
            assert bounds["max_h_a"] <= 1.0 / (2 * math.pi) + 1e-12
            assert bounds["max_H_b"] <= bounds["C"] == 1.0


class TestGSum:
    def test_single_term_example(self):
        got = g_sum(L1, 4, 100.0)
        expect = 1.0 / (100.0 * abs((2 - math.sqrt(2) / 2 + 0.5) % 1.0 - 1.0))
        # ||1.79289|| = 0.20711 -> 0.0482842...
        assert abs(got - 0.04828427124746189) < 1e-12
        assert abs(got - expect) < 1e-12

    def test_empty_range(self):
        assert g_sum(L1, 1, 100.0) == 0.0

    def test_clamp_at_one(self):
        # tiny H never exceeds m-count
        x = 400
        val = g_sum(L1, x, 2.0)
        m_count = int(math.isqrt(int(x / math.sqrt(2))))
        assert val <= m_count + 1

    def test_integral_matches_riemann(self):
        # exact per-m antiderivative vs a fine midpoint sum at small H
        H = 4.0
        lo, hi = 10.0, 14.0
        exact = g_integral(L1, lo, hi, H)
        n = 200000
        xs = lo + (np.arange(n) + 0.5) * (hi - lo) / n
        riemann = float(np.mean([g_sum(L1, float(x), H) for x in xs[:: n // 2000]]))
        riemann *= (hi - lo)
        assert abs(exact - riemann) < 0.02 * abs(exact)

    def test_integral_entry_threshold(self):
        # window straddles theta m^2 for m = 3: theta * 9 = 12.72...
        H = 8.0
        full = g_integral(L1, 10.0, 14.0, H)
        split = g_integral(L1, 10.0, 12.0, H) + g_integral(L1, 12.0, 14.0, H)
        assert abs(full - split) < 1e-9

    def test_integral_validation(self):
        with pytest.raises(ValueError):
            g_integral(L1, 0, 10, 4.0)
        with pytest.raises(ValueError):
            g_integral(L1, 5, 4, 4.0)


class TestParams:
    def test_expansion_params_validation(self):
        with pytest.raises(ValueError):
            PsiExpansionParams(H=1.0)
        with pytest.raises(ValueError):
            PsiExpansionParams(H=10.0, mode="chebyshev")
        assert PsiExpansionParams(H=10.0).mode == "vaaler"

    def test_report_envelope_nonnegative(self):
        with pytest.raises(ValueError):
            ExpansionReport(value=0.0, envelope=-1.0)
