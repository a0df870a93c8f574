"""Interval covers of the attracting Cantor set and their Hausdorff sums.

Level k of the cover consists of the 2^k forward images
Delta_{k,i} = f^i([a_k, b_k]), i = 0..2^k-1.  Only Delta_{k,0} contains
the turning point in its interior, so only the first image needs the
interior-extremum rule; afterwards endpoint images suffice.  The
gamma-sums  sum_i |Delta_{k,i}|^gamma  decrease from level k to k+2 for
every positive gamma once k is large enough, which is the numerical
signature of Hausdorff dimension zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import CoverIntegrityError, DomainError, InsufficientDataError
from .numeric import BigReal
from .ladder import RenormLadder

__all__ = ["CoverLevel", "build_cover", "hausdorff_sums", "cantor_samples",
           "COVER_CAP"]

COVER_CAP = 10


@dataclass(frozen=True)
class CoverLevel:
    k: int
    intervals: tuple             # ((lo, hi) BigReal pairs), index i = 0..2^k-1
    total_length: BigReal


def build_cover(ladder: RenormLadder, k: int,
                cover_cap: int = COVER_CAP) -> CoverLevel:
    """The 2^k forward images of [a_k, b_k], disjointness-checked."""
    if k < 0:
        raise DomainError("k must be >= 0")
    if k > cover_cap:
        raise DomainError(f"k={k} exceeds the cover cap {cover_cap}")
    rec = ladder.level(k)
    m = ladder.map
    bits = m.precision_bits
    with mp.workprec(bits):
        lo, hi = rec.a.v, rec.b.v
        raw = [(lo, hi)]
        for i in range(1, 1 << k):
            fl, fh = m._eval_raw(lo), m._eval_raw(hi)
            if i == 1:
                # the base interval straddles the turning point: the image
                # peaks at the critical value f(0)
                lo, hi = min(fl, fh), m._tm1
            else:
                lo, hi = min(fl, fh), max(fl, fh)
            raw.append((lo, hi))

        # interiors must be pairwise disjoint; touching endpoints are part
        # of the construction, and the root residual at the base level gets
        # amplified by the derivative of f^i, so the allowance is relative
        # to the neighbouring interval widths rather than absolute
        order = sorted(range(len(raw)), key=lambda i: raw[i][0])
        for j in range(len(order) - 1):
            i0, i1 = order[j], order[j + 1]
            w = min(raw[i0][1] - raw[i0][0], raw[i1][1] - raw[i1][0])
            tol = w * mpf(2) ** -32 + rec.tol.v * 16
            if raw[i1][0] < raw[i0][1] - tol:
                raise CoverIntegrityError(
                    f"cover intervals {i0} and {i1} at level {k} overlap by "
                    f"{mp.nstr(raw[i0][1] - raw[i1][0], 6)}")

        total = mpf(0)
        for lo, hi in raw:
            total += hi - lo
        intervals = tuple((BigReal(lo, bits), BigReal(hi, bits))
                          for lo, hi in raw)
        return CoverLevel(k, intervals, BigReal(total, bits))


def hausdorff_sums(covers, gamma_list):
    """gamma-sums of the cover lengths, with the two-step decrease flag.

    ``covers`` must hold consecutive even levels.  Returns a dict with
    ``rows`` of (k, gamma, sum) and ``k0_by_gamma`` mapping each gamma to
    the smallest even level from which sum(k+2) < sum(k) holds on to the
    end of the supplied range (None if the decrease never sets in).
    """
    covers = sorted(covers, key=lambda c: c.k)
    ks = [c.k for c in covers]
    if any(k % 2 for k in ks):
        raise DomainError("hausdorff_sums expects even cover levels")
    if ks != list(range(ks[0], ks[-1] + 1, 2)):
        raise DomainError("hausdorff_sums expects consecutive even levels")
    if len(covers) < 2:
        raise InsufficientDataError("need at least two cover levels")

    bits = covers[0].total_length.bits
    rows = []
    k0_by_gamma = {}
    with mp.workprec(bits):
        for gamma in gamma_list:
            g = mpf(str(gamma))
            if not g > 0:
                raise DomainError("gamma must be > 0")
            sums = []
            for c in covers:
                s = mpf(0)
                for lo, hi in c.intervals:
                    w = hi.v - lo.v
                    if w > 0:
                        s += mp.exp(g * mp.ln(w))
                sums.append(s)
                rows.append((c.k, gamma, BigReal(s, bits)))
            k0 = None
            for j in range(len(sums) - 1):
                if all(sums[t + 1] < sums[t] for t in range(j, len(sums) - 1)):
                    k0 = ks[j]
                    break
            k0_by_gamma[gamma] = k0
    return {"rows": rows, "k0_by_gamma": k0_by_gamma}


def cantor_samples(ladder: RenormLadder, depth: int):
    """The critical-orbit points f^i(0), i = 1..2^depth, sorted, each
    tagged with the index of the cover interval Delta_{depth, i mod 2^depth}
    containing it."""
    if depth > ladder.max_trusted_level:
        raise InsufficientDataError(
            f"depth {depth} exceeds the trusted depth")
    cover = build_cover(ladder, depth)
    m = ladder.map
    bits = m.precision_bits
    n = 1 << depth
    with mp.workprec(bits):
        out = []
        v = mpf(0)
        for i in range(1, n + 1):
            v = m._eval_raw(v)
            idx = i % n
            lo, hi = cover.intervals[idx]
            tol = (hi.v - lo.v) * mpf(2) ** -32 \
                + ladder.level(depth).tol.v * 16
            if not (lo.v - tol <= v <= hi.v + tol):
                raise CoverIntegrityError(
                    f"orbit point f^{i}(0) missed its cover interval {idx}")
            out.append((BigReal(v, bits), idx))
        out.sort(key=lambda p: p[0].v)
        return out
