import random

import pytest
from mpmath import mp, mpf

from asymren import (AsymmetricMap, BigReal, BranchWord, DomainError,
                     NotDifferentiableError, branch_of, ulp)


@pytest.fixture
def chebyshev_like():
    # t = 2 sends the turning point to 1 and then to -1: the full-height map
    return AsymmetricMap(2, 2, precision_bits=256)


class TestConstruction:
    def test_rejects_bad_parameters(self):
        with pytest.raises(DomainError):
            AsymmetricMap(1, 1.5)
        with pytest.raises(DomainError):
            AsymmetricMap(2, 0.5)
        with pytest.raises(DomainError):
            AsymmetricMap(2, 2.5)
        with pytest.raises(DomainError):
            AsymmetricMap(2, 1.5, scale_left=0)

    def test_config_round_trip(self):
        m = AsymmetricMap("2.5", "1.75", "1", "2", precision_bits=320)
        c = m.config()
        m2 = AsymmetricMap(c["beta"], c["t"], c["scale_left"],
                           c["scale_right"], c["precision_bits"])
        assert m2.t == m.t and m2.beta == m.beta
        assert m2.config() == c

    def test_asymmetry_ratio(self):
        m = AsymmetricMap(2, 1.5, scale_left=1, scale_right=2)
        assert m.asymmetry_ratio == 2

    def test_extension_cap_identity(self):
        # the extended left branch exactly covers the interval: f_1(eps0) = 1
        m = AsymmetricMap(2, "1.6", precision_bits=256)
        y = m.eval_branch(1, m.eps0)
        assert abs((y - 1).v) <= 4 * ulp(y).v


class TestEvaluation:
    def test_branch_of(self):
        assert branch_of(BigReal(-1)) == 1
        assert branch_of(BigReal(0)) == 2
        assert branch_of(0.5) == 2

    def test_closed_forms_at_full_height(self, chebyshev_like):
        m = chebyshev_like
        assert m.eval(0) == 1            # f(0) = t - 1
        assert m.eval(1) == -1           # f(1) = t(1 - 1) - 1
        assert m.eval(-1) == -1          # fixed left endpoint
        assert m.eval("-0.5") == 0       # affine branch: 2*2*(0.5) - 1

    def test_continuity_at_turning_point(self):
        m = AsymmetricMap(2, "1.7", precision_bits=256)
        h = BigReal(mpf(2) ** -100, 256)
        gap = abs(m.eval(-h) - m.eval(h))
        assert gap.v <= mpf(2) ** -95

    def test_domain_escape(self, chebyshev_like):
        with pytest.raises(DomainError):
            chebyshev_like.eval("1.5")

    def test_eval_branch_domains(self, chebyshev_like):
        m = chebyshev_like
        with pytest.raises(DomainError):
            m.eval_branch(2, "-0.5")
        with pytest.raises(DomainError):
            m.eval_branch(1, "0.9")     # beyond eps0 = 0 at t = 2
        with pytest.raises(DomainError):
            m.eval_branch(3, 0)

    @pytest.mark.parametrize("seed", range(4))
    def test_branch_inverse_round_trip(self, seed):
        rng = random.Random(seed)
        m = AsymmetricMap(2, repr(rng.uniform(1.4, 1.9)), precision_bits=256)
        x1 = BigReal(repr(rng.uniform(-1, float(m.eps0))), 256)
        y1 = m.eval_branch(1, x1)
        assert abs((m.branch_inverse(1, y1) - x1).v) <= mpf(2) ** -248
        x2 = BigReal(repr(rng.uniform(0, 1)), 256)
        y2 = m.eval_branch(2, x2)
        assert abs((m.branch_inverse(2, y2) - x2).v) <= mpf(2) ** -245

    def test_branch_inverse_above_critical_value(self, chebyshev_like):
        with pytest.raises(DomainError):
            chebyshev_like.branch_inverse(2, "1.5")


class TestDerivatives:
    def test_left_slope_is_constant(self):
        m = AsymmetricMap(2, "1.5", scale_left="1.25", precision_bits=256)
        d = m.derivative("-0.3")
        assert d == m.t * m.scale_left

    def test_right_derivative_sign_and_value(self, chebyshev_like):
        d = chebyshev_like.derivative("0.5")
        assert d == -2            # -t * beta * x = -2*2*0.5

    def test_not_differentiable_at_zero(self, chebyshev_like):
        with pytest.raises(NotDifferentiableError):
            chebyshev_like.derivative(0)

    def test_chain_rule_matches_finite_difference(self):
        m = AsymmetricMap(2, "1.62", precision_bits=320)
        x = BigReal("0.3", 320)
        n = 4
        d = m.derivative_along_orbit(x, n)
        h = BigReal(mpf(2) ** -90, 320)

        def fn(p):
            for _ in range(n):
                p = m.eval(p)
            return p

        fd = (fn(x + h) - fn(x - h)) / (h * 2)
        assert abs((d - fd) / d).v < mpf(2) ** -80

    def test_orbit_through_zero_raises(self, chebyshev_like):
        with pytest.raises(NotDifferentiableError):
            chebyshev_like.derivative_along_orbit(BigReal(0, 256), 2)


class TestIteration:
    def test_orbit_and_word(self, chebyshev_like):
        orbit, word = chebyshev_like.iterate(0, 3)
        assert [float(p) for p in orbit] == [0.0, 1.0, -1.0, -1.0]
        assert word == (2, 2, 1)

    def test_word_letters_match_orbit_signs(self):
        m = AsymmetricMap(2, "1.64", precision_bits=256)
        orbit, word = m.iterate("0.1", 16)
        for p, letter in zip(orbit[:-1], word):
            assert letter == branch_of(p)

    def test_branch_word_equality_with_sequences(self):
        w = BranchWord((2, 1, 2))
        assert w == [2, 1, 2]
        assert w == (2, 1, 2)
        assert len(w) == 3 and w[1] == 1
        assert hash(w) == hash(BranchWord((2, 1, 2)))
