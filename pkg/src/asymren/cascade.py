"""Parameter-space structure of the doubling cascade.

The family is parametrised by t in [1, 2].  Along the cascade three kinds
of distinguished parameters are located:

  * superstable: the turning point 0 is periodic with period 2^n,
  * flip: a period-2^(n-1) orbit has multiplier exactly -1 (odd n),
  * window end: the return map on the level-n interval becomes surjective.

Superstable parameters are found by an upward scan for the first sign
change of phi(n, t) = f_t^(2^n)(0).  Because consecutive superstable
gaps shrink doubly exponentially, the scan starts from a deliberately
pessimistic prediction of the next gap and grows its probe step
geometrically, never stepping further than the distance already
travelled.  Every candidate root is verified against the canonical
doubling itinerary; on mismatch the scan restarts with a finer step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .errors import (ContinuationError, DomainError, LevelNotBornError,
                     SearchExhaustedError)
from .numeric import BigReal, refine_root_secant
from .maps import AsymmetricMap, BranchWord
from .ladder import build_ladder, power_of_map

__all__ = ["Family", "CascadeRecord", "phi", "doubling_word",
           "find_superstable", "run_superstable_chain", "find_flip",
           "find_window_end", "estimate_tstar", "map_for_depth",
           "bifurcation_sweep", "sweep_at_parameters", "BifurcationSample"]


@dataclass(frozen=True)
class Family:
    """The two-branch family with everything fixed except t."""

    beta: object = 2
    scale_left: object = 1
    scale_right: object = 1
    precision_bits: int = 256

    def map_at(self, t) -> AsymmetricMap:
        return AsymmetricMap(self.beta, t, self.scale_left, self.scale_right,
                             self.precision_bits)

    def config(self):
        m = self.map_at(1)
        c = m.config()
        del c["t"]
        return c


@dataclass(frozen=True)
class CascadeRecord:
    n: int
    kind: str                  # "superstable" | "flip" | "window_end"
    t: BigReal
    residual: BigReal
    bracket_width: BigReal
    condition: str


def phi(family: Family, n: int, t) -> BigReal:
    """f_t^(2^n)(0): the 2^n-th image of the turning point."""
    m = family.map_at(t)
    return power_of_map(m, n, BigReal(0, family.precision_bits))


def doubling_word(n: int) -> BranchWord:
    """Branch itinerary of the orbit of 0 at the period-2^n superstable
    parameter (letters for the 2^n - 1 points after 0).  Built by the
    doubling substitution W_{j+1} = W_j + [side of f^(2^j)(0)] + W_j,
    where that middle point sits right of 0 after an even number of
    doublings and left after an odd number."""
    w = []
    for j in range(n):
        mid = 2 if j % 2 == 0 else 1
        w = w + [mid] + w
    return BranchWord(tuple(w))


def _orbit_word(family: Family, n: int, t: BigReal) -> BranchWord:
    # itinerary of the points after 0, i.e. branches used at f(0)..f^(2^n - 1)(0)
    m = family.map_at(t)
    _, w = m.iterate(BigReal(0, family.precision_bits), 1 << n)
    return BranchWord(w.letters[1:])


def find_superstable(family: Family, n: int, search_start, step0,
                     rel_tol=None, max_probes=20000) -> CascadeRecord:
    """Smallest parameter >= search_start where phi(n, .) changes sign,
    refined to rel_tol and verified against the doubling itinerary.

    Only n = 0 and odd n are admissible.  In this family half of the
    period doublings are border-collision-like: they happen exactly at a
    parameter where 0 is periodic, so inside the cascade the turning
    point attains exact period 2^n only for n = 0 and n odd.  For even
    n >= 2 the first sign change of phi(n, .) lies beyond the
    accumulation point and is rejected here rather than returned.
    """
    bits = family.precision_bits
    if rel_tol is None:
        rel_tol = BigReal(mpf(2) ** (128 - bits), bits)
    elif not isinstance(rel_tol, BigReal):
        rel_tol = BigReal(rel_tol, bits)
    if n == 0:
        # f_t(0) = t - 1 vanishes at the left edge of the parameter range
        one = BigReal(1, bits)
        z = BigReal(0, bits)
        return CascadeRecord(0, "superstable", one, z, z,
                             "f_t(0) = 0")
    if n % 2 == 0:
        raise DomainError(
            f"no superstable parameter of period 2^{n} exists below the "
            "accumulation point for even n >= 2; the even-index doublings "
            "are critical-periodic collisions (use n odd)")
    s = search_start if isinstance(search_start, BigReal) \
        else BigReal(search_start, bits)
    h0 = step0 if isinstance(step0, BigReal) else BigReal(step0, bits)
    with mp.workprec(bits):
        for attempt in range(6):
            x = s.v
            fx = phi(family, n, BigReal(x, bits)).v
            h = h0.v
            start = x
            probes = 0
            bracket = None
            while x < 2 and probes < max_probes:
                xn = min(x + h, mpf(2))
                fn = phi(family, n, BigReal(xn, bits)).v
                probes += 1
                if fn == 0 or (fn > 0) != (fx > 0):
                    bracket = (x, xn)
                    break
                x, fx = xn, fn
                h = min(2 * h, max(h0.v, (x - start) / 2))
            if bracket is None:
                raise SearchExhaustedError(
                    f"no sign change of phi({n}) above "
                    f"{s.to_decimal(20)} within probe budget")
            r = refine_root_secant(
                lambda tt: phi(family, n, tt),
                BigReal(bracket[0], bits), BigReal(bracket[1], bits), rel_tol)
            if _orbit_word(family, n, r.root) == doubling_word(n):
                return CascadeRecord(n, "superstable", r.root, r.residual,
                                     r.bracket_width,
                                     f"f_t^(2^{n})(0) = 0")
            # wrong itinerary: a zero beyond the accumulation point was
            # caught; rescan the same stretch with a much finer step
            h0 = BigReal(h0.v / 1024, bits)
        raise SearchExhaustedError(
            f"could not isolate the period-2^{n} superstable parameter")


def run_superstable_chain(family: Family, N: int, rel_tol=None):
    """Superstable parameters for n = 0, 1, 3, 5, ..., each found by an
    upward scan from the previous one.  Returns the list of
    CascadeRecords (the even n >= 2 have no superstable parameter in
    this family, so the chain advances in steps of two)."""
    bits = family.precision_bits
    records = [find_superstable(family, 0, 1, 1, rel_tol)]
    if N < 1:
        return records
    gaps = []
    steps = [1] + list(range(3, N + 1, 2))
    with mp.workprec(bits):
        for n in steps:
            prev = records[-1].t
            if len(gaps) >= 2 and gaps[-1] < gaps[-2]:
                # the squared-gap contraction law makes this an accurate
                # prediction of the next gap; /16 keeps it pessimistic
                guess = gaps[-1] * (gaps[-1] / gaps[-2]) ** 2
            elif gaps:
                guess = gaps[-1] ** 2
            else:
                guess = mpf(1) / 2
            step0 = BigReal(max(guess / 16, mpf(2) ** (96 - bits)), bits)
            offset = BigReal(max(guess * mpf(2) ** -24, mpf(2) ** (96 - bits)),
                             bits)
            rec = find_superstable(family, n, prev + offset, step0, rel_tol)
            if not rec.t.v > prev.v:
                raise SearchExhaustedError("superstable chain not increasing")
            gaps.append(rec.t.v - prev.v)
            records.append(rec)
    return records


def find_flip(family: Family, n: int, bracket, rel_tol=None) -> CascadeRecord:
    """Parameter where the period-2^(n-1) orbit born on the ladder has
    multiplier -1 (n odd).  The orbit is continued in t through the
    level-n fixed point of the 2^(n-1)-th return map."""
    if n % 2 == 0 or n < 1:
        raise DomainError("find_flip: n must be odd")
    bits = family.precision_bits
    if rel_tol is None:
        rel_tol = BigReal(mpf(2) ** (96 - bits), bits)
    elif not isinstance(rel_tol, BigReal):
        rel_tol = BigReal(rel_tol, bits)
    lo, hi = bracket
    lo = lo if isinstance(lo, BigReal) else BigReal(lo, bits)
    hi = hi if isinstance(hi, BigReal) else BigReal(hi, bits)

    def mult_plus_one(t: BigReal) -> BigReal:
        try:
            lad = build_ladder(family.map_at(t), n)
        except LevelNotBornError as exc:
            raise ContinuationError(
                f"orbit not born at t = {t.to_decimal(20)}") from exc
        p = lad.level(n).b
        M = lad.map.derivative_along_orbit(p, 1 << (n - 1))
        return M + 1

    r = refine_root_secant(mult_plus_one, lo, hi, rel_tol)
    return CascadeRecord(n, "flip", r.root, r.residual, r.bracket_width,
                         f"multiplier of the period-2^{n-1} orbit = -1")


def find_window_end(family: Family, n: int, bracket,
                    rel_tol=None) -> CascadeRecord:
    """Parameter where the 2^n-th return map on the level-n interval
    becomes surjective: its critical value reaches the interval boundary
    (the right endpoint after an even number of doublings, the left one
    after an odd number)."""
    if n < 0:
        raise DomainError("n must be >= 0")
    bits = family.precision_bits
    if rel_tol is None:
        rel_tol = BigReal(mpf(2) ** (96 - bits), bits)
    elif not isinstance(rel_tol, BigReal):
        rel_tol = BigReal(rel_tol, bits)
    lo, hi = bracket
    lo = lo if isinstance(lo, BigReal) else BigReal(lo, bits)
    hi = hi if isinstance(hi, BigReal) else BigReal(hi, bits)

    def overshoot(t: BigReal) -> BigReal:
        try:
            lad = build_ladder(family.map_at(t), n)
        except LevelNotBornError as exc:
            raise ContinuationError(
                f"level {n} not born at t = {t.to_decimal(20)}") from exc
        rec = lad.level(n)
        target = rec.b if n % 2 == 0 else rec.a
        return phi(family, n, t) - target

    r = refine_root_secant(overshoot, lo, hi, rel_tol)
    side = "right" if n % 2 == 0 else "left"
    return CascadeRecord(n, "window_end", r.root, r.residual, r.bracket_width,
                         f"f_t^(2^{n})(0) hits the {side} endpoint of level {n}")


def estimate_tstar(family: Family, N: int, rel_tol=None):
    """Deepest computed superstable parameter as a stand-in for the
    accumulation point.  Returns (deepest record, full chain); when N is
    even the chain runs to N + 1 (the nearest existing anchor)."""
    chain = run_superstable_chain(family, N if N % 2 else N + 1, rel_tol)
    return chain[-1], chain


def map_for_depth(family: Family, K: int, margin: int = 2, rel_tol=None):
    """Map at a superstable anchor deep enough that ladder levels up to K
    are trusted proxies for accumulation-point asymptotics.  The anchor
    is the smallest odd n >= K + margin; trusted depth is n - margin.
    Returns (map, trusted, chain)."""
    n = K + margin
    if n % 2 == 0:
        n += 1
    chain = run_superstable_chain(family, n, rel_tol)
    m = family.map_at(chain[-1].t)
    return m, n - margin, chain


# ---------------------------------------------------------------------------
# double-precision attractor sweep


@dataclass(frozen=True)
class BifurcationSample:
    t: float
    period: object             # int or None when no recurrence was found
    points: tuple              # attractor samples (one period when periodic)


def bifurcation_sweep(family: Family, t_lo: float, t_hi: float,
                      n_points: int, transient: int = 1 << 17,
                      samples: int = 256, tol: float = 1e-9):
    """Vectorised float64 sweep of the attractor over a t grid.

    The map is iterated ``transient`` times from the turning point, then
    ``samples`` further states are kept; the period is the smallest
    p <= samples/2 whose recurrence error is below ``tol`` (relative to
    the interval scale, which is 1)."""
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    if not (1 <= t_lo < t_hi <= 2):
        raise DomainError("sweep range must be inside [1, 2]")
    t = np.linspace(t_lo, t_hi, n_points)
    return sweep_at_parameters(family, t, transient, samples, tol)


def sweep_at_parameters(family: Family, t_values, transient: int = 1 << 17,
                        samples: int = 256, tol: float = 1e-9):
    """Attractor sweep over an explicit array of parameter values; the
    work for each value is independent, so callers may shard the array
    across processes and concatenate the results."""
    beta = float(BigReal(family.beta).v)
    sl = float(BigReal(family.scale_left).v)
    sr = float(BigReal(family.scale_right).v)
    t = np.asarray(t_values, dtype=float)
    if t.size < 1 or t.min() < 1 or t.max() > 2:
        raise DomainError("sweep parameters must lie in [1, 2]")
    n_points = t.size
    x = np.zeros(n_points)
    int_beta = beta == int(beta)

    def step(x):
        neg = x < 0
        xp = np.abs(x)
        right = t * (1 - sr * (xp ** int(beta) if int_beta else xp ** beta)) - 1
        left = t * sl * (1 + x) - 1
        return np.where(neg, left, right)

    for _ in range(transient):
        x = step(x)
    hist = np.empty((samples, n_points))
    for i in range(samples):
        x = step(x)
        hist[i] = x

    period = np.full(n_points, -1, dtype=int)
    for p in range(1, samples // 2 + 1):
        err = np.max(np.abs(hist[p:] - hist[:-p]), axis=0)
        hit = (err <= tol) & (period < 0)
        period[hit] = p
    out = []
    for j in range(n_points):
        p = int(period[j])
        if p > 0:
            pts = tuple(float(v) for v in hist[-p:, j])
            out.append(BifurcationSample(float(t[j]), p, pts))
        else:
            pts = tuple(float(v) for v in hist[:, j])
            out.append(BifurcationSample(float(t[j]), None, pts))
    return out
