"""Monotone semi-extensions of the first-entry maps, their Koebe space,
and the expansion of first-return maps in double-log coordinates.

The first-entry map of level k is the composition of 2^k - 1 single
branches of f along the critical orbit c_1, ..., c_{2^k-1}; it carries an
interval around c_1 = f(0) onto [a_k, b_k].  The *semi-extension* E_k
enlarges that composition by extending every occurrence of the affine
left branch f_1 up to eps0 (so that f_1(eps0) = 1), while the right
branch f_2 is never extended past the turning point.  The resulting
maximal monotone map E_k : T_k -> [A_k, B_k] has range containing
[a_k, b_k]; how much Koebe space [A_k, B_k] leaves around [a_k, b_k] is
measured by

    tau_k = min(a_k - A_k, B_k - b_k) / (b_k - a_k).

The *diffeomorphic* variant uses f_1 only on [-1, 0] and yields the
smaller range [hatA_k, hatB_k].
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import (DomainError, EscapeError, InsufficientDataError,
                     LevelNotBornError)
from .maps import AsymmetricMap, BranchWord
from .numeric import BigReal, refine_root_secant
from .ladder import RenormLadder, _pow_raw

__all__ = ["SemiExtensionRecord", "EntrySpaceReport", "semi_extension",
           "eval_along_word", "tau_sequence", "entry_range_collapse",
           "special_point_checks", "entry_space_ratio",
           "doublelog_expansion"]


@dataclass(frozen=True)
class SemiExtensionRecord:
    k: int
    branch_word: BranchWord      # length 2^k - 1, letters at c_1..c_{2^k-1}
    T_lo: BigReal                # domain interval of E_k (around f(0))
    T_hi: BigReal
    A: BigReal                   # range of E_k: A <= a_k < 0 < b_k <= B
    B: BigReal
    hatA: BigReal                # range of the diffeomorphic variant
    hatB: BigReal
    tau: BigReal
    a_prime: BigReal             # [a_prime, e] = f_1^{-1}(T_k)
    e: BigReal
    b_prime: BigReal             # right end of f_2^{-1}(T_k)
    d: BigReal                   # E_k(f_1(d)) = b_k; None for odd k
    eps0: BigReal                # the extension cap used for f_1


@dataclass(frozen=True)
class EntrySpaceReport:
    i: int
    left_space_ratio: BigReal    # |c_{2^(2i-1)} - a_{2i}| / (b_{2i} - a_{2i})
    collapsed: bool              # ratio dropped below 1
    c_coef: BigReal              # |c_{2^(2i-1)}| / b_{2i-1}^(beta+1)
    b_coef: BigReal              # b_{2i} / b_{2i-1}^2


def _word_raw(m: AsymmetricMap, k: int):
    """Branch letters at the critical-orbit points c_1, ..., c_{2^k-1}."""
    letters = []
    v = m._tm1                      # c_1 = f(0)
    for _ in range((1 << k) - 1):
        letters.append(1 if v < 0 else 2)
        v = m._eval_raw(v)
    return letters


def _inv1_raw(m, y):
    return (y + 1) / m._tl - 1


def _inv2_raw(m, y):
    u = (m._tm1 - y) / m._trs
    if u < 0:
        if u < -m._slack:
            raise DomainError("branch 2 inverse above the critical value")
        u = mpf(0)
    if m._beta_int == 2:
        return mp.sqrt(u)
    if u == 0:
        return mpf(0)
    return mp.exp(mp.ln(u) / m._beta_raw)


def _propagate_raw(m, letters, f1_hi):
    """Forward interval propagation along a branch word.

    The running interval starts as the first branch's (possibly extended)
    domain and is alternately intersected with the next branch's domain
    and mapped through that branch.  Returns the final range interval.
    ``f1_hi`` is the right end of f_1's domain (eps0 for the
    semi-extension, 0 for the diffeomorphic variant).
    """
    dom = {1: (mpf(-1), f1_hi), 2: (mpf(0), mpf(1))}
    lo, hi = dom[letters[0]]
    for j, L in enumerate(letters):
        if j > 0:
            dlo, dhi = dom[L]
            lo = max(lo, dlo)
            hi = min(hi, dhi)
            if lo > hi:
                raise DomainError(
                    f"branch word leaves an empty domain at step {j}")
        if L == 1:
            lo, hi = m._eval_branch_raw(1, lo), m._eval_branch_raw(1, hi)
        else:
            lo, hi = m._eval_branch_raw(2, hi), m._eval_branch_raw(2, lo)
    return lo, hi


def _pullback_raw(m, letters, lo, hi):
    """Pull an interval in the final coordinate back to the first one by
    composing the closed-form branch inverses in reverse order."""
    for L in reversed(letters):
        if L == 1:
            lo, hi = _inv1_raw(m, lo), _inv1_raw(m, hi)
        else:
            lo, hi = _inv2_raw(m, hi), _inv2_raw(m, lo)
    return lo, hi


def _eval_word_raw(m, letters, v):
    # orbits that ride a domain boundary (e.g. the endpoint of T_k, whose
    # orbit touches 0 exactly) accumulate roundoff across many steps, so the
    # per-step clamp is wider than the map's own one-step slack
    slack = m._slack * mpf(2) ** 64
    for L in letters:
        if L == 2 and v < 0:
            if v < -slack:
                raise DomainError("point left the right branch's domain")
            v = mpf(0)
        if L == 1 and v > m._eps0:
            if v > m._eps0 + slack:
                raise DomainError("point left the extended left branch's domain")
            v = m._eps0
        v = m._eval_branch_raw(L, v)
    return v


def eval_along_word(m: AsymmetricMap, word, x) -> BigReal:
    """Apply the branches of ``word`` in order, with f_1 on its extended
    domain [-1, eps0]; this evaluates the semi-extension at x."""
    x = x if isinstance(x, BigReal) else BigReal(x, m.precision_bits)
    letters = list(word)
    with mp.workprec(m.precision_bits):
        return BigReal(_eval_word_raw(m, letters, x.v), m.precision_bits)


def semi_extension(ladder: RenormLadder, k: int) -> SemiExtensionRecord:
    """Full geometric record of the level-k semi-extension."""
    if k < 1:
        raise DomainError("k must be >= 1")
    rec = ladder.level(k)
    m = ladder.map
    bits = m.precision_bits
    with mp.workprec(bits):
        letters = _word_raw(m, k)
        # consistency: letters must match the recomputed orbit signs
        exp_first = 1 if m._tm1 < 0 else 2
        if letters[0] != exp_first:
            raise DomainError("branch word inconsistent with the orbit")

        A, B = _propagate_raw(m, letters, m._eps0)
        hatA, hatB = _propagate_raw(m, letters, mpf(0))
        T_lo, T_hi = _pullback_raw(m, letters, A, B)
        if T_lo > T_hi:
            T_lo, T_hi = T_hi, T_lo

        a, b = rec.a.v, rec.b.v
        tau = min(a - A, B - b) / (b - a)

        a_prime = _inv1_raw(m, T_lo)
        e = _inv1_raw(m, T_hi)
        b_prime = _inv2_raw(m, T_lo)

        d = None
        if k % 2 == 0:
            # E_k o f_1 is increasing on [0, e]; it sends 0 to c_{2^k} and
            # e to B > b_k, so the equation E_k(f_1(d)) = b_k brackets.
            def g(x: BigReal) -> BigReal:
                with mp.workprec(bits):
                    v = m._eval_branch_raw(1, x.v)
                    return BigReal(_eval_word_raw(m, letters, v) - b, bits)

            # the orbit of e itself rides the domain boundary and cannot be
            # evaluated reliably; any strictly interior point above the root
            # serves as the upper bracket, and the root sits far below e
            hi_d = None
            for j in (8, 2, 1, -1, -2, -4, -8, -16, -32):
                cand = BigReal(e * (1 - mpf(2) ** (-j)) if j > 0
                               else e * mpf(2) ** j, bits)
                if not cand.v > 0:
                    continue
                try:
                    if g(cand).v > 0:
                        hi_d = cand
                        break
                except DomainError:
                    continue
            if hi_d is None:
                raise DomainError(
                    f"could not bracket the level-{k} crossing point d")
            tol = BigReal(hi_d.v * mpf(2) ** (48 - bits), bits)
            r = refine_root_secant(g, BigReal(0, bits), hi_d, tol)
            d = r.root

        return SemiExtensionRecord(
            k=k,
            branch_word=BranchWord(tuple(letters)),
            T_lo=BigReal(T_lo, bits), T_hi=BigReal(T_hi, bits),
            A=BigReal(A, bits), B=BigReal(B, bits),
            hatA=BigReal(hatA, bits), hatB=BigReal(hatB, bits),
            tau=BigReal(tau, bits),
            a_prime=BigReal(a_prime, bits), e=BigReal(e, bits),
            b_prime=BigReal(b_prime, bits),
            d=d,
            eps0=m.eps0,
        )


def tau_sequence(ladder: RenormLadder, K: int):
    """Koebe-space ratios tau_k for k = 1..K.

    Each row carries tau_k and, for even k, the exponent
    log(tau_k)/log(1/b_k) whose limit is 1/2; odd-k tau's approach the
    even-step contraction ratio directly.
    """
    if K > ladder.max_trusted_level:
        raise InsufficientDataError(
            f"K={K} exceeds the trusted depth {ladder.max_trusted_level}")
    bits = ladder.map.precision_bits
    rows = []
    with mp.workprec(bits):
        for k in range(1, K + 1):
            rec = semi_extension(ladder, k)
            exponent = None
            if k % 2 == 0:
                bk = ladder.level(k).b.v
                exponent = BigReal(mp.ln(rec.tau.v) / -mp.ln(bk), bits)
            rows.append({"k": k, "tau": rec.tau, "log_exponent": exponent})
    return rows


def entry_range_collapse(ladder: RenormLadder, K: int):
    """How fast the diffeomorphic range pinches against the level interval
    on the left: rows of |hatA_k|/b_k (tending to 0 over even k), the
    fitted exponent log|hatA_k|/log b_k (limit (beta+1)/2), and the
    right-side ratio hatB_k/b_k (stays above 1)."""
    if K > ladder.max_trusted_level:
        raise InsufficientDataError(
            f"K={K} exceeds the trusted depth {ladder.max_trusted_level}")
    bits = ladder.map.precision_bits
    rows = []
    with mp.workprec(bits):
        for k in range(2, K + 1, 2):
            rec = semi_extension(ladder, k)
            bk = ladder.level(k).b.v
            ratio = abs(rec.hatA.v) / bk
            exponent = mp.ln(abs(rec.hatA.v)) / mp.ln(bk)
            rows.append({
                "k": k,
                "ratio": BigReal(ratio, bits),
                "exponent": BigReal(exponent, bits),
                "right_ratio": BigReal(rec.hatB.v / bk, bits),
            })
    return rows


def special_point_checks(ladder: RenormLadder, K: int):
    """Ordering and size bounds for the auxiliary points of even levels:
    e_{k+2} < d_k, and the two normalizations of d_k that should stay
    bounded, d_k/(b_{k+1}^(beta-1) b_k) and d_k/b_k^(2 beta - 1)."""
    if K > ladder.max_trusted_level:
        raise InsufficientDataError(
            f"K={K} exceeds the trusted depth {ladder.max_trusted_level}")
    m = ladder.map
    bits = m.precision_bits
    recs = {k: semi_extension(ladder, k) for k in range(2, K + 1, 2)}
    rows = []
    with mp.workprec(bits):
        beta = m.beta.v
        for k in sorted(recs):
            rec = recs[k]
            bk = ladder.level(k).b.v
            bk1 = ladder.level(k + 1).b.v if k + 1 <= ladder.depth else None
            row = {"k": k, "d": rec.d, "e": rec.e}
            if bk1 is not None:
                row["d_over_bk1_bk"] = BigReal(
                    rec.d.v / (mp.exp((beta - 1) * mp.ln(bk1)) * bk), bits)
            row["d_over_bk_pow"] = BigReal(
                rec.d.v / mp.exp((2 * beta - 1) * mp.ln(bk)), bits)
            if k + 2 in recs:
                row["e_next_below_d"] = bool(recs[k + 2].e.v < rec.d.v)
            rows.append(row)
    return rows


def entry_space_ratio(ladder: RenormLadder, i: int) -> EntrySpaceReport:
    """Left-side space available to a general entry into level 2i: the
    gap between the critical value c_{2^(2i-1)} and a_{2i}, relative to
    the level size.  Its collapse below 1 (and onward to 0) is what
    prevents entry compositions from carrying definite Koebe space."""
    k_odd = 2 * i - 1
    k_even = 2 * i
    if k_even > ladder.max_trusted_level:
        raise InsufficientDataError(
            f"levels {k_odd}, {k_even} exceed the trusted depth")
    m = ladder.map
    bits = m.precision_bits
    with mp.workprec(bits):
        c = ladder.level(k_odd).c_pow.v     # negative for odd levels
        a2, b2 = ladder.level(k_even).a.v, ladder.level(k_even).b.v
        b1 = ladder.level(k_odd).b.v
        beta = m.beta.v
        ratio = abs(c - a2) / (b2 - a2)
        return EntrySpaceReport(
            i=i,
            left_space_ratio=BigReal(ratio, bits),
            collapsed=bool(ratio < 1),
            c_coef=BigReal(abs(c) / mp.exp((beta + 1) * mp.ln(b1)), bits),
            b_coef=BigReal(b2 / (b1 * b1), bits),
        )


def doublelog_expansion(ladder: RenormLadder, i: int, eta=0.1,
                        grid_size: int = 33) -> BigReal:
    """Minimum expansion factor of the first-return map of level 2i-1 on
    [b_{2i}, eta * b_{2i-1}], measured in y = log(log(1/x)) coordinates.

    The return of each grid point is found by direct iteration of f with
    a step cap of 2^(2i+2); grid points whose return lands outside (0, 1)
    cannot be transported to double-log coordinates and are skipped.
    """
    k = 2 * i - 1
    if 2 * i > ladder.max_trusted_level:
        raise InsufficientDataError(
            f"levels {k}, {k + 1} exceed the trusted depth")
    if not 0 < float(eta) < 1:
        raise DomainError("eta must lie in (0, 1)")
    if grid_size < 5:
        raise DomainError("grid_size must be >= 5")
    m = ladder.map
    bits = m.precision_bits
    cap = 1 << (2 * i + 2)
    with mp.workprec(bits):
        a, b = ladder.level(k).a.v, ladder.level(k).b.v
        x_lo = ladder.level(k + 1).b.v
        x_hi = mpf(str(eta)) * b
        if not x_lo < x_hi:
            raise DomainError("empty grid interval: eta too small")

        def first_return(x):
            v = m._eval_raw(x)
            for _ in range(cap):
                if a <= v <= b:
                    return v
                v = m._eval_raw(v)
            raise EscapeError(
                f"no return to level {k} within {cap} steps")

        def dlog(x):
            return mp.ln(-mp.ln(x))

        # geometric grid (uniform in log x) across the window
        n = grid_size
        step = mp.exp((mp.ln(x_hi) - mp.ln(x_lo)) / (n - 1))
        pts = []
        x = x_lo
        for _ in range(n):
            r = first_return(x)
            if 0 < r < 1:
                pts.append((dlog(x), dlog(r)))
            x = x * step
        if len(pts) < 2:
            raise InsufficientDataError(
                "fewer than 2 grid points admit double-log coordinates")
        best = None
        for (y0, Y0), (y1, Y1) in zip(pts, pts[1:]):
            if y1 == y0:
                continue
            factor = abs((Y1 - Y0) / (y1 - y0))
            if best is None or factor < best:
                best = factor
        if best is None:
            raise InsufficientDataError("degenerate double-log grid")
        return BigReal(best, bits)
