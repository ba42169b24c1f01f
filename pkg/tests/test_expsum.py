"""Dyadic exponential-sum blocks, the stationary-phase transform,
the oscillating remainder series, and the diagonal mass extraction."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from heisenweyl.expsum import (
    VoronoiTermSet,
    assemble_f_component,
    diagonal_constant_extract,
    direct_block_sum,
    dyadic_block,
    dyadic_cap,
    envelope_constants,
    load_registry,
    raw_envelope_components,
    stationary_identity_gap,
    transformed_block_sum,
    voronoi_coefficient,
    voronoi_series,
    voronoi_term_value,
    voronoi_terms,
)
from heisenweyl.kernel import ConfigurationError, IrrationalParameter
from heisenweyl.spectrum import ManifoldConfig, eval_theta_cached

SQRT2 = IrrationalParameter.sqrt2()
PHI = IrrationalParameter.golden()
L1 = ManifoldConfig(1, SQRT2)
L2 = ManifoldConfig(2, SQRT2)
L2G = ManifoldConfig(2, PHI)

REL_40 = 2.0 ** -40


class TestDyadicBlocks:
    def test_cap_values(self):
        # floor((L - log L)/(2 log 2)) at L = log 1e3, log 1e4
        assert dyadic_cap(1e3) == 3
        assert dyadic_cap(1e4) == 5

    def test_cap_domain(self):
        with pytest.raises(ConfigurationError):
            dyadic_cap(2.0)

    def test_block_edges_match_float_ranges(self):
        theta = float(eval_theta_cached(SQRT2, 64)[0])
        for x in (1e3, 1e4, 31007.5):
            M = math.sqrt(x / theta)
            for j in range(dyadic_cap(x) + 1):
                blk = dyadic_block(L1, x, j)
                assert blk.m_first == math.floor(M / 2 ** (j + 1)) + 1
                assert blk.m_last == math.floor(M / 2 ** j)

    def test_blocks_tile_m_range(self):
        # consecutive blocks partition (M 2^{-J-1}, M]: no gap, no overlap
        x = 1e4
        edges = [dyadic_block(L1, x, j) for j in range(dyadic_cap(x) + 1)]
        for a, b in zip(edges, edges[1:]):
            assert b.m_last + 1 == a.m_first

    def test_out_of_cap_raises(self):
        with pytest.raises(ConfigurationError):
            dyadic_block(L1, 1e3, dyadic_cap(1e3) + 1)

    def test_explicit_t_overrides_cap(self):
        blk = dyadic_block(L1, 1e3, 5, T=1e4)
        assert blk.cap == 5 and blk.j == 5


class TestDirectBlockSum:
    def test_frozen_oracle_l1(self):
        # independent re-summation at mp.dps = 60 with theta = mp.sqrt(2)
        val = direct_block_sum(L1, 1e4, 1, 0, 0)
        oracle = complex(288.4511572568062700947927, -36.50036623144858353010816)
        assert abs(val - oracle) <= REL_40 * abs(oracle)

    def test_frozen_oracle_l2_golden(self):
        val = direct_block_sum(L2G, 2000.0, 3, 1, 1)
        oracle = complex(-2477.280031327817084186168, -2130.873959214902751574807)
        assert abs(val - oracle) <= REL_40 * abs(oracle)

    def test_conjugation(self):
        for (cfg, x, h, j1, j) in ((L1, 1e3, 2, 0, 1), (L2, 5e3, 3, 1, 0)):
            plus = direct_block_sum(cfg, x, h, j1, j)
            minus = direct_block_sum(cfg, x, -h, j1, j)
            assert abs(minus - plus.conjugate()) <= REL_40 * abs(plus)

    def test_empty_block_sums_to_zero(self):
        # sqrt(x/theta) < 1 leaves no integer m in any block; needs a large
        # literal theta since surd thetas keep sqrt(x/theta) above 2^j for j <= J
        big = IrrationalParameter(kind="literal", decimal="37.5", bits=64)
        cfg = ManifoldConfig(1, big)
        blk = dyadic_block(cfg, 30.0, 0)
        assert blk.is_empty
        assert direct_block_sum(cfg, 30.0, 1, 0, 0) == 0.0

    def test_index_validation(self):
        with pytest.raises(ConfigurationError):
            direct_block_sum(L1, 1e3, 0, 0, 1)
        with pytest.raises(ConfigurationError):
            direct_block_sum(L1, 1e3, 1, 1, 1)  # j1 > l-1
        with pytest.raises(ConfigurationError):
            direct_block_sum(L2, 1e3, 1, -1, 1)


class TestTransformedBlockSum:
    def test_envelope_holds_on_grid(self):
        # the module-level 3x3 grid at l=1; the acceptance suite runs the
        # full 27-point grid for both l
        for h in (1, 2, 3):
            for j in (0, 1, 2):
                rep = transformed_block_sum(L1, 1e4, h, 0, j)
                assert abs(rep.direct - rep.transformed) <= rep.envelope

    def test_r_window_tiles_exactly(self):
        # windows (beta(h,j), beta(h,j+1)] are adjacent: integer r ranges abut
        for h in (1, 2, 5):
            reps = [transformed_block_sum(L1, 1e4, h, 0, j) for j in (0, 1, 2, 3)]
            theta_h_floor = SQRT2.linear(0, h).floor()
            assert reps[0].r_first == theta_h_floor + 1
            for a, b in zip(reps, reps[1:]):
                assert b.r_first == a.r_last + 1

    def test_surd_endpoints_never_integer(self):
        # theta h (2^{2j} + 1)/2 is irrational for surd theta, h >= 1
        for h in (1, 2, 3):
            rep = transformed_block_sum(L1, 1e4, h, 0, 1)
            assert rep.half_weight_r is None
            assert not rep.boundary_flagged

    def test_envelope_components_raw_and_positive(self):
        rep = transformed_block_sum(L2, 2e4, 2, 1, 1)
        raw = raw_envelope_components(L2, 2e4, 2, 1, 1)
        assert rep.envelope_log == raw[0]
        assert rep.envelope_length == raw[1]
        assert rep.envelope_endpoint == raw[2]
        assert all(c > 0 for c in raw)
        c1, c2, c3 = envelope_constants()
        assert rep.envelope == pytest.approx(
            c1 * raw[0] + c2 * raw[1] + c3 * raw[2], rel=1e-15)

    def test_empty_m_range_raises(self):
        with pytest.raises(ConfigurationError):
            transformed_block_sum(L1, 1e3, 1, 0, 5)

    def test_negative_h_rejected(self):
        with pytest.raises(ConfigurationError):
            transformed_block_sum(L1, 1e3, -1, 0, 1)

    def test_r_count_property(self):
        rep = transformed_block_sum(L1, 1e4, 1, 0, 2)
        assert rep.r_count == rep.r_last - rep.r_first + 1 >= 1


class TestStationaryIdentity:
    def test_thousand_random_points(self):
        # f(m_r) - r m_r = -sqrt(x h (2r - theta h)) at the stationary point
        rng = random.Random(20260814)
        theta = float(eval_theta_cached(SQRT2, 64)[0])
        worst = 0.0
        for _ in range(1000):
            h = rng.randint(1, 50)
            x = rng.uniform(100.0, 1e5)
            r_lo = int(theta * h) + 1
            r = rng.randint(r_lo, r_lo + 500)
            worst = max(worst, stationary_identity_gap(theta, x, h, r))
        assert worst < 2.0 ** -60


class TestAssembledComponent:
    def test_conjugate_pair_reality(self):
        for cfg, x, j1 in ((L1, 1e3, 0), (L2G, 500.0, 1)):
            val = assemble_f_component(cfg, x, j1, 3)
            assert abs(val.imag) <= REL_40 * max(abs(val.real), 1e-30)

    def test_h_range_validation(self):
        with pytest.raises(ConfigurationError):
            assemble_f_component(L1, 1e3, 0, 0)


class TestVoronoiCoefficient:
    def test_sign_alternates_with_lh_parity(self):
        # e(lh/2) = (-1)^{lh} exactly
        assert voronoi_coefficient(L1, 1, 2).value.real < 0
        assert voronoi_coefficient(L1, 2, 3).value.real > 0
        assert voronoi_coefficient(L2, 1, 2).value.real > 0  # lh = 2

    def test_magnitude_bound(self):
        theta = float(eval_theta_cached(SQRT2, 64)[0])
        for cfg in (L1, L2):
            for h in (1, 3, 7):
                for r in (int(theta * h) + 1, int(theta * h) + 9):
                    u = voronoi_coefficient(cfg, h, r)
                    cap = h ** -0.25 * (2 * r - theta * h) ** -1.25
                    assert abs(u.value) <= cap * (1 + 1e-12)
                    assert u.value.imag == 0.0

    def test_requires_r_above_theta_h(self):
        with pytest.raises(ConfigurationError):
            voronoi_coefficient(L1, 5, 7)  # theta*5 = 7.07 > 7
        with pytest.raises(ConfigurationError):
            voronoi_coefficient(L1, 0, 3)


class TestVoronoiSeries:
    def test_single_term_hand_formula(self):
        # l=1, h=1, r=2 (smallest integer > theta): the term equals
        # (2 x^{3/4}/pi) * (-(2r-theta)^{-5/4}) * cos(2 pi sqrt(x(2r-theta)) - pi/4)
        theta = float(eval_theta_cached(SQRT2, 64)[0])
        x = 1000.0
        hand = (2.0 * x ** 0.75 / math.pi) * (-(4 - theta) ** -1.25) * math.cos(
            2.0 * math.pi * math.sqrt(x * (4 - theta)) - 0.25 * math.pi)
        assert voronoi_term_value(L1, x, 1, 2) == pytest.approx(hand, rel=1e-10)
        assert voronoi_term_value(L1, x, 1, 2) == pytest.approx(
            5.266226639811, rel=1e-10)

    def test_term_set_deterministic(self):
        a = voronoi_terms(L1, 1e4)
        b = voronoi_terms(L1, 1e4)
        assert np.array_equal(a.coeff, b.coeff)
        assert np.array_equal(a.sqrt_radicand, b.sqrt_radicand)
        assert a.dropped_mass_bound == b.dropped_mass_bound
        assert a.kept == len(a.coeff) > 0

    def test_partition_invariant_evaluation(self):
        # splitting the (h, r) term list across workers and adding the
        # partial series agrees with the single-pass evaluation
        terms = voronoi_terms(L1, 1e4)
        x = 14137.5
        whole = terms.evaluate(x)
        parts = 0.0
        for w in range(4):
            sub = VoronoiTermSet(
                l=terms.l, prefactor=terms.prefactor,
                coeff=terms.coeff[w::4], sqrt_radicand=terms.sqrt_radicand[w::4],
                kept=len(terms.coeff[w::4]),
                dropped_mass_bound=0.0, H=terms.H, cap=terms.cap)
            parts += sub.evaluate(x)
        assert parts == pytest.approx(whole, abs=REL_40 * max(1.0, abs(whole)))

    def test_evaluate_many_matches_scalar(self):
        terms = voronoi_terms(L1, 1e4)
        xs = np.linspace(1e4, 2e4, 7)
        vec = terms.evaluate_many(xs)
        for xi, vi in zip(xs, vec):
            assert vi == pytest.approx(terms.evaluate(xi), rel=1e-12, abs=1e-12)

    def test_series_domain_validation(self):
        with pytest.raises(ConfigurationError):
            voronoi_series(L1, 999.0, 1e3)
        with pytest.raises(ConfigurationError):
            voronoi_series(L1, 2001.0, 1e3)
        with pytest.raises(ConfigurationError):
            voronoi_terms(L1, 1e3, H=1.5)

    def test_dropped_mass_small_against_diagonal(self):
        # the truncation drops a u^2 mass that is a small fraction of the
        # total diagonal mass (the series' variance scale)
        terms = voronoi_terms(L1, 1e4)
        total = diagonal_constant_extract(L1, 1000, 20)
        assert terms.dropped_mass_bound < 0.02 * total


class TestDiagonalConstant:
    def test_monotone_in_h_and_j(self):
        base = diagonal_constant_extract(L1, 500, 12)
        assert diagonal_constant_extract(L1, 1000, 12) > base
        assert diagonal_constant_extract(L1, 500, 20) > base

    def test_frozen_partial_value(self):
        # Hurwitz-zeta window evaluation, H=1e3, J=20; frozen from the
        # high-precision run of the same closed form
        val = diagonal_constant_extract(L1, 1000, 20)
        assert val == pytest.approx(0.28021103290432475, rel=1e-12)

    def test_l2_positive_and_smaller_terms(self):
        val = diagonal_constant_extract(L2G, 400, 16)
        assert val == pytest.approx(0.06339121304239832, rel=1e-12)

    def test_h_floor_validation(self):
        with pytest.raises(ConfigurationError):
            diagonal_constant_extract(L1, 1, 20)
        with pytest.raises(ConfigurationError):
            diagonal_constant_extract(L1, 100, -1)


class TestRegistry:
    def test_registry_is_frozen_and_loadable(self):
        reg = load_registry()
        assert reg["version"] == 1
        c1, c2, c3 = envelope_constants()
        assert c1 > 0 and c2 > 0 and c3 > 0
        assert reg["box_bound_c"]["c"] > 0
