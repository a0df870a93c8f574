import random

import pytest
from mpmath import mp, mpf

from asymren import (BigReal, DomainError, InsufficientDataError,
                     doubling_word, doublelog_expansion, entry_range_collapse,
                     entry_space_ratio, eval_along_word, semi_extension,
                     special_point_checks, tau_sequence)


class TestSemiExtensionRecord:
    def test_branch_word_matches_the_doubling_itinerary(self, medium_ladder):
        # at the superstable anchor the critical orbit follows the
        # canonical substitution word for every level up to the anchor
        for k in (2, 3, 5):
            rec = semi_extension(medium_ladder, k)
            assert rec.branch_word == doubling_word(k)

    def test_range_brackets_the_level(self, medium_ladder):
        for k in range(1, 10):
            rec = semi_extension(medium_ladder, k)
            lv = medium_ladder.level(k)
            assert rec.A < lv.a < 0 < lv.b <= rec.B
            assert rec.hatA.v >= rec.A.v and rec.hatB.v <= rec.B.v
            assert rec.tau.sign == 1

    def test_domain_maps_onto_the_range(self, medium_ladder):
        m = medium_ladder.map
        for k in (2, 3, 4, 5):
            rec = semi_extension(medium_ladder, k)
            lo = eval_along_word(m, rec.branch_word, rec.T_lo)
            hi = eval_along_word(m, rec.branch_word, rec.T_hi)
            ends = sorted([lo.v, hi.v])
            tol = mpf(2) ** (96 - 448)
            assert abs(ends[0] - rec.A.v) < tol
            assert abs(ends[1] - rec.B.v) < tol

    def test_left_preimage_interval(self, medium_ladder):
        m = medium_ladder.map
        for k in (2, 4):
            rec = semi_extension(medium_ladder, k)
            assert rec.a_prime < rec.e
            # f_1 carries [a_prime, e] onto T_k
            y0 = m.eval_branch(1, rec.a_prime)
            y1 = m.eval_branch(1, rec.e)
            assert abs((y0 - rec.T_lo).v) < mpf(2) ** (64 - 448)
            assert abs((y1 - rec.T_hi).v) < mpf(2) ** (64 - 448)

    def test_crossing_point_even_levels_only(self, medium_ladder):
        rec_even = semi_extension(medium_ladder, 4)
        rec_odd = semi_extension(medium_ladder, 5)
        assert rec_odd.d is None
        assert 0 < rec_even.d.v < rec_even.e.v
        # E_k(f_1(d)) really equals b_k
        m = medium_ladder.map
        img = eval_along_word(m, rec_even.branch_word,
                              m.eval_branch(1, rec_even.d))
        b = medium_ladder.level(4).b
        assert abs((img - b).v) <= rec_even.d.v * mpf(2) ** (80 - 448)

    def test_rejects_level_zero(self, medium_ladder):
        with pytest.raises(DomainError):
            semi_extension(medium_ladder, 0)


class TestTauSequence:
    def test_odd_levels_approach_the_contraction_ratio(self, medium_ladder):
        rows = {r["k"]: r for r in tau_sequence(medium_ladder, 9)}
        lam = (mp.sqrt(5) - 1) / 2
        devs = [abs(float(rows[k]["tau"].v) - float(lam)) for k in (5, 7, 9)]
        assert devs[2] < devs[1] < devs[0]
        assert devs[2] < 1e-5

    def test_even_levels_vanish_with_exponent_half(self, medium_ladder):
        rows = {r["k"]: r for r in tau_sequence(medium_ladder, 8)}
        exps = [float(rows[k]["log_exponent"].v) for k in (4, 6, 8)]
        assert all(e > 0.5 for e in exps)
        assert exps[2] < exps[1] < exps[0]
        assert exps[2] < 0.62
        for k in (1, 3, 5):
            assert rows[k]["log_exponent"] is None

    def test_depth_guard(self, medium_ladder):
        with pytest.raises(InsufficientDataError):
            tau_sequence(medium_ladder, medium_ladder.max_trusted_level + 1)


class TestEntryRangeCollapse:
    def test_left_pinch_accelerates(self, medium_ladder):
        rows = entry_range_collapse(medium_ladder, 8)
        ratios = [float(r["ratio"].v) for r in rows]
        assert ratios == sorted(ratios, reverse=True)
        assert ratios[-1] < 1e-6

    def test_exponent_heads_toward_three_halves(self, medium_ladder):
        rows = entry_range_collapse(medium_ladder, 8)
        exps = [float(r["exponent"].v) for r in rows]
        assert abs(exps[-1] - 1.5) < 0.15

    def test_right_side_keeps_space(self, medium_ladder):
        rows = entry_range_collapse(medium_ladder, 8)
        for r in rows:
            assert r["right_ratio"].v > 1


class TestSpecialPoints:
    def test_interleaving_and_bounds(self, medium_ladder):
        rows = special_point_checks(medium_ladder, 8)
        by_k = {r["k"]: r for r in rows}
        for k in (2, 4, 6):
            assert by_k[k]["e_next_below_d"]
        for r in rows:
            assert float(r["d_over_bk1_bk"].v) < 10
            assert float(r["d_over_bk_pow"].v) < 10

    def test_d_normalization_stabilizes(self, medium_ladder):
        rows = special_point_checks(medium_ladder, 8)
        vals = [float(r["d_over_bk_pow"].v) for r in rows]
        # beta = 2, equal scales: d_k / b_k^3 -> 1/2
        assert abs(vals[-1] - 0.5) < 0.05


class TestEntrySpace:
    def test_ratio_collapses_geometrically(self, medium_ladder):
        reps = [entry_space_ratio(medium_ladder, i) for i in (2, 3, 4)]
        ratios = [float(r.left_space_ratio.v) for r in reps]
        assert ratios == sorted(ratios, reverse=True)
        assert reps[-1].collapsed and ratios[-1] < 0.5

    def test_component_coefficients_are_tame(self, medium_ladder):
        rep = entry_space_ratio(medium_ladder, 4)
        assert 0.1 < float(rep.c_coef.v) < 10
        assert 0.1 < float(rep.b_coef.v) < 10

    def test_depth_guard(self, medium_ladder):
        with pytest.raises(InsufficientDataError):
            entry_space_ratio(medium_ladder, 6)


class TestDoublelogExpansion:
    def test_minimum_factor_exceeds_one(self, medium_ladder):
        for i in (3, 4):
            factor = doublelog_expansion(medium_ladder, i, eta=0.1)
            assert float(factor.v) > 1.0

    def test_grid_refinement_is_stable(self, medium_ladder):
        coarse = doublelog_expansion(medium_ladder, 3, eta=0.1, grid_size=17)
        fine = doublelog_expansion(medium_ladder, 3, eta=0.1, grid_size=65)
        assert abs(float(coarse.v) - float(fine.v)) < 0.05

    def test_parameter_validation(self, medium_ladder):
        with pytest.raises(DomainError):
            doublelog_expansion(medium_ladder, 3, eta=1.5)
        with pytest.raises(DomainError):
            doublelog_expansion(medium_ladder, 3, grid_size=3)
        with pytest.raises(InsufficientDataError):
            doublelog_expansion(medium_ladder, 6)
