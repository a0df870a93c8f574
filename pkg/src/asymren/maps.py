"""Piecewise unimodal interval maps with a linear left branch and a
power-law right branch.

The family lives on [-1, 1] with its turning point at 0:

    f(x) = t * scale_left  * (1 + x) - 1          for x < 0
    f(x) = t * (1 - scale_right * x**beta) - 1    for x >= 0

The left branch is affine (order 1 at the turning point), the right
branch has order beta > 1, so the two one-sided scaling behaviours at
the turning point are genuinely different.  ``asymmetry_ratio`` is the
ratio of the right to left one-sided coefficients at 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import DomainError, NotDifferentiableError
from .numeric import BigReal, pow_real

__all__ = ["AsymmetricMap", "BranchWord", "branch_of"]


def branch_of(x) -> int:
    """Branch index used at a point: 1 for the left (affine) branch,
    2 for the right branch; the turning point itself counts as branch 2."""
    v = x.v if isinstance(x, BigReal) else x
    return 1 if v < 0 else 2


@dataclass(frozen=True)
class BranchWord:
    """Sequence of branch indices in order of application (first applied
    first).  Letter j is the branch used to map the j-th orbit point."""

    letters: tuple

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __iter__(self):
        return iter(self.letters)

    def __eq__(self, other):
        if isinstance(other, BranchWord):
            return self.letters == other.letters
        return self.letters == tuple(other)

    def __hash__(self):
        return hash(self.letters)


class AsymmetricMap:
    """One member of the two-branch family at a fixed parameter."""

    __slots__ = ("beta", "t", "scale_left", "scale_right", "precision_bits",
                 "_tl", "_tm1", "_trs", "_beta_raw", "_beta_int", "_eps0",
                 "_slack")

    def __init__(self, beta, t, scale_left=1, scale_right=1,
                 precision_bits=256):
        bits = int(precision_bits)
        beta = BigReal(beta, bits)
        t = BigReal(t, bits)
        scale_left = BigReal(scale_left, bits)
        scale_right = BigReal(scale_right, bits)
        if not beta.v > 1:
            raise DomainError("beta must be > 1")
        if not (1 <= t.v <= 2):
            raise DomainError("t must lie in [1, 2]")
        if not scale_left.v > 0 or not scale_right.v > 0:
            raise DomainError("branch scales must be positive")
        self.beta = beta
        self.t = t
        self.scale_left = scale_left
        self.scale_right = scale_right
        self.precision_bits = bits
        with mp.workprec(bits):
            self._tl = t.v * scale_left.v          # left slope
            self._tm1 = t.v - 1                    # f(0)
            self._trs = t.v * scale_right.v        # right coefficient
            b = beta.v
            self._beta_int = int(b) if b == int(b) and b < 64 else None
            self._beta_raw = b
            # monotone continuation of the left branch past 0, chosen so
            # that it covers the full interval: f1(eps0) = b_0 = 1
            self._eps0 = 2 / self._tl - 1
            self._slack = mpf(2) ** (16 - bits)

    # -- config ----------------------------------------------------------

    def config(self):
        d = int(self.precision_bits * 0.30103) + 3
        return {
            "beta": self.beta.to_decimal(d),
            "t": self.t.to_decimal(d),
            "scale_left": self.scale_left.to_decimal(d),
            "scale_right": self.scale_right.to_decimal(d),
            "precision_bits": self.precision_bits,
        }

    @property
    def asymmetry_ratio(self) -> BigReal:
        """Ratio of right to left one-sided coefficients at the turning point."""
        return self.scale_right / self.scale_left

    @property
    def eps0(self) -> BigReal:
        """Right end of the domain of the extended left branch."""
        return BigReal(self._eps0, self.precision_bits)

    @property
    def a0(self) -> BigReal:
        return BigReal(-1, self.precision_bits)

    @property
    def b0(self) -> BigReal:
        return BigReal(1, self.precision_bits)

    @property
    def critical_value(self) -> BigReal:
        return BigReal(self._tm1, self.precision_bits)

    # -- raw kernels (caller must hold mp.workprec(self.precision_bits)) --

    def _pow_raw(self, x):
        if self._beta_int is not None:
            if self._beta_int == 2:
                return x * x
            return x ** self._beta_int
        if x == 0:
            return mpf(0)
        return mp.exp(self._beta_raw * mp.ln(x))

    def _eval_raw(self, x):
        if x < 0:
            return self._tl * (1 + x) - 1
        return self._tm1 - self._trs * self._pow_raw(x)

    def _eval_branch_raw(self, branch, x):
        if branch == 1:
            return self._tl * (1 + x) - 1
        return self._tm1 - self._trs * self._pow_raw(x)

    def _check_domain_raw(self, x):
        if x < -1 - self._slack or x > 1 + self._slack:
            raise DomainError(f"point {mp.nstr(x, 12)} outside [-1, 1]")

    # -- public API ------------------------------------------------------

    def eval(self, x) -> BigReal:
        x = x if isinstance(x, BigReal) else BigReal(x, self.precision_bits)
        with mp.workprec(self.precision_bits):
            self._check_domain_raw(x.v)
            return BigReal(self._eval_raw(x.v), self.precision_bits)

    def eval_branch(self, branch, x) -> BigReal:
        """Evaluate one branch on its (extended) domain: branch 1 is the
        affine branch on [-1, eps0], branch 2 the power branch on [0, 1]."""
        if branch not in (1, 2):
            raise DomainError("branch must be 1 or 2")
        x = x if isinstance(x, BigReal) else BigReal(x, self.precision_bits)
        with mp.workprec(self.precision_bits):
            v = x.v
            if branch == 1:
                if v < -1 - self._slack or v > self._eps0 + self._slack:
                    raise DomainError("branch 1 argument outside [-1, eps0]")
            else:
                if v < -self._slack or v > 1 + self._slack:
                    raise DomainError("branch 2 argument outside [0, 1]")
                if v < 0:
                    v = mpf(0)
            return BigReal(self._eval_branch_raw(branch, v), self.precision_bits)

    def branch_inverse(self, branch, y) -> BigReal:
        """Inverse of a single branch (branch 1 increasing, branch 2
        decreasing); the result is clamped to the branch domain."""
        if branch not in (1, 2):
            raise DomainError("branch must be 1 or 2")
        y = y if isinstance(y, BigReal) else BigReal(y, self.precision_bits)
        with mp.workprec(self.precision_bits + 8):
            if branch == 1:
                x = (y.v + 1) / self._tl - 1
                lo, hi = mpf(-1), self._eps0
            else:
                u = (self._tm1 - y.v) / self._trs
                if u < 0:
                    if u < -self._slack:
                        raise DomainError("branch 2 inverse: value above critical value")
                    u = mpf(0)
                if self._beta_int == 2:
                    x = mp.sqrt(u)
                elif u == 0:
                    x = mpf(0)
                else:
                    x = mp.exp(mp.ln(u) / self._beta_raw)
                lo, hi = mpf(0), mpf(1)
            if x < lo - self._slack or x > hi + self._slack:
                raise DomainError("branch inverse left the branch domain")
            x = min(max(x, lo), hi)
        return BigReal(x, self.precision_bits)

    def derivative(self, x) -> BigReal:
        x = x if isinstance(x, BigReal) else BigReal(x, self.precision_bits)
        if x.v == 0:
            raise NotDifferentiableError("derivative at the turning point")
        with mp.workprec(self.precision_bits):
            self._check_domain_raw(x.v)
            if x.v < 0:
                return BigReal(self._tl, self.precision_bits)
            b = self._beta_raw
            if self._beta_int is not None:
                xp = x.v ** (self._beta_int - 1)
            else:
                xp = mp.exp((b - 1) * mp.ln(x.v))
            return BigReal(-self._trs * b * xp, self.precision_bits)

    def iterate(self, x, n):
        """n forward steps.  Returns (orbit, word): orbit is the list
        [x, f(x), ..., f^n(x)], word the branch applied at each step."""
        if n < 0:
            raise DomainError("n must be >= 0")
        x = x if isinstance(x, BigReal) else BigReal(x, self.precision_bits)
        bits = self.precision_bits
        orbit = [x]
        letters = []
        with mp.workprec(bits):
            v = x.v
            self._check_domain_raw(v)
            for _ in range(n):
                letters.append(1 if v < 0 else 2)
                v = self._eval_raw(v)
                self._check_domain_raw(v)
                orbit.append(BigReal(v, bits))
        return orbit, BranchWord(tuple(letters))

    def derivative_along_orbit(self, x, n) -> BigReal:
        """Chain-rule derivative of f^n at x (the orbit must avoid 0)."""
        x = x if isinstance(x, BigReal) else BigReal(x, self.precision_bits)
        bits = self.precision_bits
        with mp.workprec(bits):
            v = x.v
            acc = mpf(1)
            for _ in range(n):
                if v == 0:
                    raise NotDifferentiableError(
                        "orbit passes through the turning point")
                if v < 0:
                    acc *= self._tl
                else:
                    b = self._beta_raw
                    if self._beta_int is not None:
                        xp = v ** (self._beta_int - 1)
                    else:
                        xp = mp.exp((b - 1) * mp.ln(v))
                    acc *= -self._trs * b * xp
                v = self._eval_raw(v)
            return BigReal(acc, bits)
