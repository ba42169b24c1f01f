"""Radical-gap statistics: certified alpha, exact box counting with band
pruning, and the scaled lower-bound scans for the two collision regimes."""

import math

import pytest

from heisenweyl.gapcount import (
    BoxSpec,
    GapStatistics,
    LowerBoundReport,
    alpha,
    alpha_lower_bounds,
    bound_value,
    count_solutions,
)
from heisenweyl.kernel import (
    BudgetError,
    ConfigurationError,
    IrrationalParameter,
)
from heisenweyl.spectrum import eval_theta_cached

SQRT2 = IrrationalParameter.sqrt2()
PHI = IrrationalParameter.golden()
THETA_F = float(eval_theta_cached(SQRT2, 64)[0])


class TestAlpha:
    def test_frozen_oracle(self):
        # sqrt(4 - sqrt2) - sqrt(6 - sqrt2), high-precision reference
        assert alpha(SQRT2, 1, 1, 2, 3) == pytest.approx(
            -0.5334068705845312, abs=1e-14)
        assert alpha(SQRT2, 2, 3, 5, 4) == pytest.approx(
            0.4298430403435255, abs=1e-14)

    def test_near_collision_resolved(self):
        # radicals agree to 3 decimals; the certified path still separates them
        assert alpha(SQRT2, 1, 5, 63, 16) == pytest.approx(
            -0.0026370096008539, abs=1e-15)

    def test_exact_zero_on_diagonal(self):
        assert alpha(SQRT2, 3, 3, 7, 7) == 0.0
        assert alpha(PHI, 12, 12, 40, 40) == 0.0

    def test_domain_errors(self):
        with pytest.raises(ConfigurationError):
            alpha(SQRT2, 3, 1, 2, 3)  # 2hn - theta h^2 = 12 - 9 sqrt2 < 0
        with pytest.raises(ConfigurationError):
            alpha(SQRT2, 0, 1, 1, 2)
        with pytest.raises(ConfigurationError):
            alpha(SQRT2, 1, -2, 1, 2)

    def test_antisymmetry(self):
        a = alpha(SQRT2, 2, 3, 9, 7)
        b = alpha(SQRT2, 3, 2, 7, 9)
        assert a == pytest.approx(-b, abs=1e-15)

    def test_zero_iff_same_tuple_exhaustive(self):
        # irrational-theta diagonal criterion on h, n <= 40: the exact
        # radicand 2hn - theta h^2 determines (h, n) uniquely, so alpha = 0
        # only on identical tuples; checked on normalized exact forms
        seen = {}
        for h in range(1, 41):
            for n in range(1, 41):
                r = SQRT2.linear(2 * h * n, -h * h)
                if r.sign() <= 0:
                    continue
                key = (r.a, r.b, r.den, r.d)
                assert key not in seen, (seen.get(key), (h, n))
                seen[key] = (h, n)


class TestBoxSpec:
    def test_validation(self):
        with pytest.raises(ConfigurationError):
            BoxSpec(1, 4, 8, 8, 0.1)
        with pytest.raises(ConfigurationError):
            BoxSpec(4, 4, 8, 8, 0.0)
        with pytest.raises(ConfigurationError):
            BoxSpec(4, 4, 8, "8", 0.1)

    def test_volume(self):
        assert BoxSpec(4, 4, 8, 8, 0.1).volume == 1024

    def test_bound_value_shape(self):
        box = BoxSpec(4, 4, 8, 8, 0.05)
        V = 1024.0
        assert bound_value(box) == pytest.approx(
            0.05 * V ** 0.75 + math.sqrt(V) * math.log(V) ** 2, rel=1e-15)


class TestCountSolutions:
    def test_frozen_small_box(self):
        stats = count_solutions(SQRT2, BoxSpec(4, 4, 8, 8, 0.05))
        assert stats.count == 36
        assert stats.count <= stats.bound
        assert 0 < stats.ratio < 1
        assert stats.min_alpha_nonzero > 0
        assert stats.min_alpha_witness is not None

    def test_pruned_equals_unpruned(self):
        for box in (BoxSpec(4, 4, 8, 8, 0.05), BoxSpec(2, 4, 8, 16, 0.2),
                    BoxSpec(8, 8, 16, 16, 0.01)):
            a = count_solutions(SQRT2, box, pruned=True)
            b = count_solutions(SQRT2, box, pruned=False)
            assert a.count == b.count
            assert a.admissible == b.admissible

    def test_swap_symmetry(self):
        a = count_solutions(SQRT2, BoxSpec(2, 8, 4, 16, 0.1))
        b = count_solutions(SQRT2, BoxSpec(8, 2, 16, 4, 0.1))
        assert a.count == b.count

    def test_monotone_in_delta(self):
        counts = [count_solutions(SQRT2, BoxSpec(4, 4, 8, 8, d)).count
                  for d in (0.01, 0.05, 0.2, 0.8)]
        assert counts == sorted(counts)

    def test_huge_delta_counts_full_admissible_box(self):
        # delta >= V^{1/4} = 64^{1/4} makes the inequality trivial for every
        # admissible tuple (n > theta h trims h=3 to n >= 5, h=4 to n >= 6)
        box = BoxSpec(2, 2, 4, 4, 3.0)
        stats = count_solutions(SQRT2, box)
        assert stats.count == stats.admissible == 49

    def test_tiny_delta_counts_diagonal_only(self):
        # below min_alpha_nonzero only exact zeros remain: h1=h2, n1=n2
        # tuples admissible in the box (n > theta h trims the top of the range)
        box = BoxSpec(4, 4, 8, 8, 1e-9)
        stats = count_solutions(SQRT2, box)
        diag = sum(1 for h in range(5, 9) for n in range(9, 17)
                   if SQRT2.linear(2 * h * n, -h * h).sign() > 0 and n > THETA_F * h)
        assert stats.count == diag == 28

    def test_workers_partition_invariant(self):
        box = BoxSpec(4, 8, 8, 16, 0.12)
        one = count_solutions(SQRT2, box, workers=1)
        three = count_solutions(SQRT2, box, workers=3)
        assert one == three

    def test_budget_error_lists_completed(self):
        box = BoxSpec(4, 4, 8, 8, 0.05)
        with pytest.raises(BudgetError) as err:
            count_solutions(SQRT2, box, budget=200)
        assert len(err.value.completed) == 3  # 64 tuples per (h1, h2) sub-box

    def test_margin_validation(self):
        with pytest.raises(ConfigurationError):
            count_solutions(SQRT2, BoxSpec(4, 4, 8, 8, 0.05), margin=0.2)
        with pytest.raises(ConfigurationError):
            count_solutions(SQRT2, BoxSpec(4, 4, 8, 8, 0.05), workers=0)

    def test_golden_theta_box(self):
        stats = count_solutions(PHI, BoxSpec(4, 4, 8, 8, 0.05))
        assert stats.count <= stats.bound
        assert stats.count == count_solutions(
            PHI, BoxSpec(4, 4, 8, 8, 0.05), pruned=False).count


@pytest.fixture(scope="module")
def report() -> LowerBoundReport:
    return alpha_lower_bounds(SQRT2, 1.0, 16, 64)


class TestLowerBounds:
    def test_equal_h_minimum(self, report):
        assert report.equal_h_min == pytest.approx(0.7110715914822013, rel=1e-12)
        assert report.equal_h_witness == (1, 1, 63, 64)
        assert report.equal_h_min > 0

    def test_distinct_h_minimum(self, report):
        assert report.distinct_h_min == pytest.approx(0.0517223915146128, rel=1e-12)
        assert report.distinct_h_witness == (1, 5, 63, 16)
        assert report.distinct_h_min > 0

    def test_square_difference_scaling_is_flat(self, report):
        # rescaling by |h1^2-h2^2|^{gamma+eps} stabilizes the distinct-h
        # minima; this is the diagnostic for the stated-scaling trend failure
        assert report.distinct_sq_min == pytest.approx(0.27564982357868684, rel=1e-12)
        assert report.distinct_sq_witness == (1, 2, 64, 33)
        assert report.distinct_sq_trend is not None
        assert report.distinct_sq_trend > -0.10

    def test_rung_structure(self, report):
        assert report.rungs == ((2, 8), (4, 16), (8, 32), (16, 64))
        assert len(report.equal_h_rung_minima) == 4
        assert all(v > 0 for v in report.equal_h_rung_minima)
        assert all(v > 0 for v in report.distinct_h_rung_minima)

    def test_equal_h_trend_flat(self, report):
        assert report.equal_h_trend == pytest.approx(-0.0142, abs=0.01)

    def test_distinct_h_trend_decays(self, report):
        # the stated scaling loses ground as better square differences come
        # into range; the decay is genuine, not noise (see acceptance test)
        assert report.distinct_h_trend < -0.3

    def test_hypothesis_filter(self, report):
        # every witness satisfies 0 < |alpha| < (1/10)(r1 r2)^{1/4}
        for wit in (report.equal_h_witness, report.distinct_h_witness):
            h1, h2, n1, n2 = wit
            a = alpha(SQRT2, h1, h2, n1, n2)
            r1 = h1 * (2 * n1 - THETA_F * h1)
            r2 = h2 * (2 * n2 - THETA_F * h2)
            assert 0 < abs(a) < 0.1 * (r1 * r2) ** 0.25

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            alpha_lower_bounds(SQRT2, 1.0, 1, 64)
        with pytest.raises(ConfigurationError):
            alpha_lower_bounds(SQRT2, 1.0, 16, 2)
        with pytest.raises(ConfigurationError):
            alpha_lower_bounds(SQRT2, 0.0, 16, 64)
