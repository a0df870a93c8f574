"""Arbitrary-precision scalar type and safeguarded root finding.

Everything downstream funnels its high-precision arithmetic through
``BigReal``: an immutable value tagged with its working precision in bits.
Binary operations run at the larger of the two operands' precisions and
round to nearest.  External serialization is always a decimal string so
that output files are backend-independent and byte-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import BracketError, DomainError, PrecisionError

DEFAULT_BITS = 256

# guard bits used inside transcendental kernels so the advertised <= 4 ulp
# rounding claim survives the final rounding step
_GUARD = 24


def _to_mpf(value, bits):
    with mp.workprec(bits):
        if isinstance(value, BigReal):
            return +value.v
        if isinstance(value, (int, str)):
            return mpf(value)
        if isinstance(value, float):
            return mpf(value)
        return +value  # assume raw mpf


class BigReal:
    """Immutable arbitrary-precision real."""

    __slots__ = ("v", "bits")

    def __init__(self, value, bits=None):
        if bits is None:
            bits = value.bits if isinstance(value, BigReal) else DEFAULT_BITS
        bits = int(bits)
        if bits < 8:
            raise PrecisionError(f"precision_bits={bits} too small")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "v", _to_mpf(value, bits))

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("BigReal is immutable")

    # -- construction / serialization ------------------------------------

    @classmethod
    def parse(cls, text, bits=DEFAULT_BITS):
        return cls(str(text), bits)

    def to_decimal(self, digits=None):
        """Decimal string; default uses enough digits to round-trip."""
        if digits is None:
            digits = int(self.bits * 0.30103) + 3
        with mp.workprec(self.bits + _GUARD):
            return mp.nstr(self.v, digits, strip_zeros=True)

    def with_bits(self, bits):
        return BigReal(self.v, bits)

    # -- arithmetic ------------------------------------------------------

    def _bin(self, other, op):
        o = other if isinstance(other, BigReal) else BigReal(other, self.bits)
        bits = max(self.bits, o.bits)
        with mp.workprec(bits):
            return BigReal(op(self.v, o.v), bits)

    def __add__(self, other):
        return self._bin(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._bin(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._bin(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._bin(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._bin(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._bin(other, lambda a, b: b / a)

    def __neg__(self):
        with mp.workprec(self.bits):
            return BigReal(-self.v, self.bits)

    def __abs__(self):
        with mp.workprec(self.bits):
            return BigReal(abs(self.v), self.bits)

    # -- comparisons (by value, precision ignored) -----------------------

    def _cmp_val(self, other):
        return other.v if isinstance(other, BigReal) else _to_mpf(other, self.bits)

    def __eq__(self, other):
        return self.v == self._cmp_val(other)

    def __ne__(self, other):
        return self.v != self._cmp_val(other)

    def __lt__(self, other):
        return self.v < self._cmp_val(other)

    def __le__(self, other):
        return self.v <= self._cmp_val(other)

    def __gt__(self, other):
        return self.v > self._cmp_val(other)

    def __ge__(self, other):
        return self.v >= self._cmp_val(other)

    def __hash__(self):
        return hash(self.v)

    def __float__(self):
        return float(self.v)

    def __repr__(self):
        with mp.workprec(self.bits):
            s = mp.nstr(self.v, 20)
        return f"BigReal({s}, bits={self.bits})"

    @property
    def sign(self):
        if self.v > 0:
            return 1
        if self.v < 0:
            return -1
        return 0


def _raw(x):
    return x.v if isinstance(x, BigReal) else x


def ulp(x: BigReal) -> BigReal:
    """Unit in the last place of x at its own precision (scale for 0 is 2^-bits)."""
    if x.v == 0:
        with mp.workprec(x.bits):
            return BigReal(mpf(2) ** (-x.bits), x.bits)
    e = mp.mag(x.v)  # exponent with 2^(e-1) <= |x| < 2^e
    with mp.workprec(x.bits):
        return BigReal(mpf(2) ** (int(e) - x.bits), x.bits)


def pow_real(x, beta, bits=None):
    """x**beta for x >= 0, beta >= 1, via exp(beta*log x); exact small-integer
    exponents take the binary-power fast path."""
    if not isinstance(x, BigReal):
        x = BigReal(x, bits or DEFAULT_BITS)
    b = beta if isinstance(beta, BigReal) else BigReal(beta, x.bits)
    bits = bits or max(x.bits, b.bits)
    if x.v < 0:
        raise DomainError("pow_real: negative base")
    if b.v < 1:
        raise DomainError("pow_real: exponent must be >= 1")
    if x.v == 0:
        return BigReal(0, bits)
    with mp.workprec(bits + _GUARD):
        bi = b.v
        if bi == int(bi) and abs(bi) < 1000:
            r = x.v ** int(bi)
        else:
            r = mp.exp(bi * mp.ln(x.v))
    return BigReal(r, bits)


def exp_real(x, bits=None):
    if not isinstance(x, BigReal):
        x = BigReal(x, bits or DEFAULT_BITS)
    bits = bits or x.bits
    with mp.workprec(bits + _GUARD):
        return BigReal(mp.exp(x.v), bits)


def ln_real(x, bits=None):
    if not isinstance(x, BigReal):
        x = BigReal(x, bits or DEFAULT_BITS)
    bits = bits or x.bits
    if x.v <= 0:
        raise DomainError("ln_real: non-positive argument")
    with mp.workprec(bits + _GUARD):
        return BigReal(mp.ln(x.v), bits)


def required_precision(K, theta_guess, beta_max=2.0):
    """Working precision (bits) sufficient to resolve a depth-K ladder.

    The deepest interval shrinks doubly exponentially, roughly like
    exp(-theta * 2^(K/2)); the returned precision leaves 256 bits of
    headroom on top of the digits eaten by that collapse.
    """
    if K < 0:
        raise DomainError("K must be >= 0")
    theta = float(theta_guess)
    if theta <= 0:
        raise DomainError("theta_guess must be > 0")
    scale = float(beta_max) * theta * (2 ** (K // 2))
    return int(math.ceil(scale / math.log(2.0))) + 256


@dataclass(frozen=True)
class RootResult:
    root: BigReal
    residual: BigReal
    iterations: int
    bracket_width: BigReal
    g_lo: BigReal = None
    g_hi: BigReal = None


def _bracket_setup(g, lo, hi, tol):
    bits = max(lo.bits, hi.bits)
    if not lo.v < hi.v:
        raise BracketError("bisect_root: lo must be < hi")
    width = hi - lo
    min_tol = ulp(hi if abs(hi.v) > abs(lo.v) else lo) * 4
    if tol.v < min_tol.v:
        raise PrecisionError(
            f"tolerance {tol.to_decimal(8)} below 4 ulp of the bracket at {bits} bits"
        )
    glo = g(lo)
    ghi = g(hi)
    return bits, width, glo, ghi


def bisect_root(g, lo, hi, tol) -> RootResult:
    """Plain bisection on a sign-changing bracket.  Deterministic; the
    returned bracket_width is <= tol."""
    bits, width, glo, ghi = _bracket_setup(g, lo, hi, tol)
    if glo.v == 0:
        return RootResult(lo, glo, 0, BigReal(0, bits), glo, ghi)
    if ghi.v == 0:
        return RootResult(hi, ghi, 0, BigReal(0, bits), glo, ghi)
    if glo.sign == ghi.sign:
        raise BracketError("bisect_root: no sign change on bracket")
    it = 0
    with mp.workprec(bits):
        a, b, fa, fb = lo.v, hi.v, glo.v, ghi.v
        while (b - a) > tol.v:
            m = (a + b) / 2
            if m <= a or m >= b:  # bracket collapsed to adjacent floats
                break
            fm = g(BigReal(m, bits)).v
            it += 1
            if fm == 0:
                a = b = m
                fa = fb = fm
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b, fb = m, fm
        root = (a + b) / 2
    rb = BigReal(root, bits)
    res = g(rb)
    return RootResult(rb, abs(res), it, BigReal(b, bits) - BigReal(a, bits),
                      BigReal(fa, bits), BigReal(fb, bits))


def refine_root_secant(g, lo, hi, tol, max_iter=20000) -> RootResult:
    """Safeguarded secant iteration: keeps a sign-changing bracket at all
    times and falls back to bisection whenever a secant step leaves the
    bracket or fails to shrink it fast enough."""
    bits, width, glo, ghi = _bracket_setup(g, lo, hi, tol)
    if glo.v == 0:
        return RootResult(lo, glo, 0, BigReal(0, bits), glo, ghi)
    if ghi.v == 0:
        return RootResult(hi, ghi, 0, BigReal(0, bits), glo, ghi)
    if glo.sign == ghi.sign:
        raise BracketError("refine_root_secant: no sign change on bracket")
    it = 0
    with mp.workprec(bits):
        a, b, fa, fb = lo.v, hi.v, glo.v, ghi.v
        x0, f0, x1, f1 = a, fa, b, fb
        while (b - a) > tol.v and it < max_iter:
            x = None
            if f1 != f0:
                cand = x1 - f1 * (x1 - x0) / (f1 - f0)
                # accept only clearly interior secant steps
                if a < cand < b:
                    x = cand
            if x is None:
                x = (a + b) / 2
            if x <= a or x >= b:
                break
            fx = g(BigReal(x, bits)).v
            it += 1
            if fx == 0:
                a = b = x
                fa = fb = fx
                break
            if (fx > 0) == (fa > 0):
                a, fa = x, fx
            else:
                b, fb = x, fx
            x0, f0 = x1, f1
            x1, f1 = x, fx
            # periodic bisection safeguard: force the bracket to halve
            if it % 3 == 0 and (b - a) > width.v * mpf(2) ** (-it // 2):
                m = (a + b) / 2
                if a < m < b:
                    fm = g(BigReal(m, bits)).v
                    it += 1
                    if fm == 0:
                        a = b = m
                        fa = fb = fm
                        break
                    if (fm > 0) == (fa > 0):
                        a, fa = m, fm
                    else:
                        b, fb = m, fm
        root = (a + b) / 2
    rb = BigReal(root, bits)
    res = g(rb)
    return RootResult(rb, abs(res), it, BigReal(b, bits) - BigReal(a, bits),
                      BigReal(fa, bits), BigReal(fb, bits))
