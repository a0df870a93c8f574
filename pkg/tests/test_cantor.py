import pytest
from mpmath import mpf

from asymren import (AsymmetricMap, BigReal, DomainError,
                     InsufficientDataError, build_cover, build_ladder,
                     cantor_samples, hausdorff_sums)
from asymren.cantor import COVER_CAP


@pytest.fixture(scope="module")
def covers(medium_ladder):
    return [build_cover(medium_ladder, k) for k in range(0, 9, 2)]


class TestBuildCover:
    def test_full_height_level_one_closed_form(self):
        # at t = 2 the level-1 interval is [-1/4, 1/2]; its image peaks at
        # the critical value 1 and bottoms out at f(-1/4) = 1/2
        lad = build_ladder(AsymmetricMap(2, 2, precision_bits=256), 1)
        cov = build_cover(lad, 1)
        (l0, h0), (l1, h1) = cov.intervals
        assert abs((l0 - "-0.25").v) < mpf(2) ** -200
        assert abs((h0 - "0.5").v) < mpf(2) ** -200
        assert abs((l1 - "0.5").v) < mpf(2) ** -200
        assert abs((h1 - 1).v) < mpf(2) ** -200

    def test_interval_count_and_base(self, medium_ladder, covers):
        for cov in covers:
            assert len(cov.intervals) == 1 << cov.k
            lo, hi = cov.intervals[0]
            assert lo == medium_ladder.level(cov.k).a
            assert hi == medium_ladder.level(cov.k).b

    def test_total_length_shrinks(self, covers):
        lengths = [float(c.total_length.v) for c in covers]
        assert lengths == sorted(lengths, reverse=True)
        assert lengths[-1] < 0.05 * lengths[0]

    def test_deeper_cover_nests_in_coarser(self, medium_ladder):
        c4 = build_cover(medium_ladder, 4)
        c6 = build_cover(medium_ladder, 6)
        coarse = sorted((lo.v, hi.v) for lo, hi in c4.intervals)
        # comparisons on raw mpf values are exact (no rounding), and the
        # nesting holds without slack at this precision
        for lo, hi in c6.intervals:
            assert any(cl <= lo.v and hi.v <= ch for cl, ch in coarse)

    def test_rejects_bad_levels(self, medium_ladder):
        with pytest.raises(DomainError):
            build_cover(medium_ladder, -1)
        with pytest.raises(DomainError):
            build_cover(medium_ladder, COVER_CAP + 1)


class TestHausdorffSums:
    def test_gamma_one_matches_total_length(self, covers):
        out = hausdorff_sums(covers, [1])
        by_k = {k: s for k, g, s in out["rows"]}
        for cov in covers:
            assert abs((by_k[cov.k] - cov.total_length).v) < mpf(2) ** -400

    def test_two_step_decrease_thresholds(self, covers):
        out = hausdorff_sums(covers, [1, 0.5, 0.1])
        k0 = out["k0_by_gamma"]
        # the smaller the exponent, the later the decrease sets in
        assert k0[1] == 0 and k0[0.5] == 0
        assert k0[0.1] is not None and k0[0.1] >= k0[0.5]

    def test_small_gamma_decreases_from_some_level(self, covers):
        out = hausdorff_sums(covers, [0.1])
        rows = [(k, float(s.v)) for k, g, s in out["rows"]]
        k0 = out["k0_by_gamma"][0.1]
        tail = [s for k, s in rows if k >= k0]
        assert all(b < a for a, b in zip(tail, tail[1:]))

    def test_input_validation(self, covers):
        with pytest.raises(DomainError):
            hausdorff_sums(covers, [0])
        with pytest.raises(DomainError):
            hausdorff_sums([covers[0], covers[2]], [1])
        with pytest.raises(InsufficientDataError):
            hausdorff_sums([covers[0]], [1])


class TestCantorSamples:
    def test_orbit_lands_in_its_cover_interval(self, medium_ladder):
        pts = cantor_samples(medium_ladder, 4)
        assert len(pts) == 16
        vals = [p.v for p, _ in pts]
        assert vals == sorted(vals)
        assert set(idx for _, idx in pts) == set(range(16))

    def test_depth_guard(self, medium_ladder):
        with pytest.raises(InsufficientDataError):
            cantor_samples(medium_ladder, medium_ladder.max_trusted_level + 1)
