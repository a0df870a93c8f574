"""Nested fixed-point / preimage ladder of dyadic return maps.

Level 0 is the full interval [-1, 1].  Given level k with interval
[a_k, b_k], the return map g = f^(2^k) is monotone on each side of 0;
the next level is cut out by one fixed point of g and one preimage of
it on the other side:

  k even:  g increases on [a_k, 0], decreases on [0, b_k];
           b_{k+1} = the fixed point of g in (0, b_k),
           a_{k+1} = the g-preimage of b_{k+1} in (a_k, 0).
  k odd:   mirrored; a_{k+1} = fixed point of g in (a_k, 0),
           b_{k+1} = the g-preimage of a_{k+1} in (0, b_k).

Both endpoints of a level have the same image, so each level is a
genuine restrictive interval for the doubled return map.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from mpmath import mp, mpf

from .errors import DomainError, LevelNotBornError
from .numeric import BigReal, RootResult, refine_root_secant
from .maps import AsymmetricMap

__all__ = ["LevelRecord", "RenormLadder", "power_of_map", "build_ladder",
           "shift_levels", "fit_return_model", "rescaled_renorm",
           "renorm_limit_errors", "odd_left_limit", "limit_ratio_root"]

# root tolerances are this many bits above the floor of the working precision
_TOL_GUARD = 48


@dataclass(frozen=True)
class LevelRecord:
    k: int
    a: BigReal
    b: BigReal
    c_pow: BigReal              # f^(2^k)(0)
    fixed_residual: BigReal     # |g(fixed point) - fixed point|
    preimage_residual: BigReal  # |g(preimage) - target|
    tol: BigReal                # absolute root tolerance used at this level


@dataclass(frozen=True)
class RenormLadder:
    map: AsymmetricMap
    levels: tuple               # LevelRecord, index = k
    max_trusted_level: int
    parameter_source: str = "explicit"

    def level(self, k) -> LevelRecord:
        if k < 0 or k >= len(self.levels):
            raise LevelNotBornError(k, f"level {k} was not built")
        return self.levels[k]

    @property
    def depth(self):
        return len(self.levels) - 1


def power_of_map(m: AsymmetricMap, k: int, x) -> BigReal:
    """f^(2^k)(x) by direct iteration."""
    if k < 0:
        raise DomainError("k must be >= 0")
    x = x if isinstance(x, BigReal) else BigReal(x, m.precision_bits)
    with mp.workprec(m.precision_bits):
        v = x.v
        m._check_domain_raw(v)
        for _ in range(1 << k):
            v = m._eval_raw(v)
        return BigReal(v, m.precision_bits)


def _pow_raw(m, k, v):
    for _ in range(1 << k):
        v = m._eval_raw(v)
    return v


def build_ladder(m: AsymmetricMap, K: int, trusted=None,
                 parameter_source="explicit") -> RenormLadder:
    """Build levels 0..K.  ``trusted`` marks the deepest level whose
    asymptotics the caller considers reliable (defaults to K for an
    explicitly given parameter)."""
    if K < 0:
        raise DomainError("K must be >= 0")
    bits = m.precision_bits
    zero = BigReal(0, bits)
    lvl0 = LevelRecord(0, BigReal(-1, bits), BigReal(1, bits),
                       m.critical_value, zero, zero, zero)
    levels = [lvl0]
    with mp.workprec(bits):
        tiny = mpf(2) ** (4 - bits)
        for k in range(K):
            ak, bk = levels[k].a.v, levels[k].b.v
            c = _pow_raw(m, k, mpf(0))
            even = (k % 2 == 0)

            def g_fixed(x, _k=k):
                return BigReal(_pow_raw(m, _k, x.v) - x.v, bits)

            if even:
                # fixed point on the decreasing side (0, b_k)
                lo, hi = BigReal(bk * tiny, bits), BigReal(bk, bits)
                if not (c > 0 and _pow_raw(m, k, bk) - bk < 0):
                    raise LevelNotBornError(k + 1)
            else:
                lo, hi = BigReal(ak, bits), BigReal(ak * tiny, bits)
                if not (c < 0 and _pow_raw(m, k, ak) - ak > 0):
                    raise LevelNotBornError(k + 1)
            span = abs(hi - lo)
            tol = BigReal(span.v * mpf(2) ** (_TOL_GUARD - bits), bits)
            r_fix = refine_root_secant(g_fixed, lo, hi, tol)
            fixed = r_fix.root

            def g_pre(x, _k=k, _target=fixed.v):
                return BigReal(_pow_raw(m, _k, x.v) - _target, bits)

            if even:
                plo, phi = BigReal(ak, bits), BigReal(-bk * tiny, bits)
            else:
                plo, phi = BigReal(bk * tiny, bits), BigReal(bk, bits)
            pspan = abs(phi - plo)
            ptol = BigReal(pspan.v * mpf(2) ** (_TOL_GUARD - bits), bits)
            r_pre = refine_root_secant(g_pre, plo, phi, ptol)
            pre = r_pre.root

            a1, b1 = (pre, fixed) if even else (fixed, pre)
            c1 = BigReal(_pow_raw(m, k + 1, mpf(0)), bits)
            levels.append(LevelRecord(k + 1, a1, b1, c1,
                                      r_fix.residual, r_pre.residual,
                                      BigReal(max(tol.v, ptol.v), bits)))
    if trusted is None:
        trusted = K
    return RenormLadder(m, tuple(levels), int(trusted), parameter_source)


def shift_levels(ladder: RenormLadder, shift: int) -> RenormLadder:
    """View the ladder of the 2^shift-th return map: drop the first
    ``shift`` levels and relabel, which doubles the depth index ``shift``
    times."""
    if shift < 0 or shift > ladder.depth:
        raise DomainError("bad shift")
    lv = tuple(replace(rec, k=rec.k - shift) for rec in ladder.levels[shift:])
    return RenormLadder(ladder.map, lv, ladder.max_trusted_level - shift,
                        ladder.parameter_source + f"+shift{shift}")


# ---------------------------------------------------------------------------
# return-map shape: piecewise model c - s|x| (left) / c - r x^beta (right)


@dataclass(frozen=True)
class ReturnModelFit:
    k: int
    left_slope: BigReal      # s_k with f^(2^k)(x) ~ c - s_k |x| on [a_k, 0]
    right_coef: BigReal      # r_k with f^(2^k)(x) ~ c - r_k x^beta on [0, b_k]
    c_pow: BigReal
    left_residual: BigReal   # sup norm of the model error on a 33-point grid
    right_residual: BigReal


def fit_return_model(ladder: RenormLadder, k: int,
                     grid_size: int = 33) -> ReturnModelFit:
    """Pin the piecewise model at the level endpoints and measure how far
    the true return map strays from it in between."""
    rec = ladder.level(k)
    m = ladder.map
    bits = m.precision_bits
    with mp.workprec(bits):
        c = rec.c_pow.v
        ga = _pow_raw(m, k, rec.a.v)
        gb = _pow_raw(m, k, rec.b.v)
        s = (c - ga) / abs(rec.a.v)
        beta = m.beta.v
        if m._beta_int is not None:
            bpow = rec.b.v ** m._beta_int
        else:
            bpow = mp.exp(beta * mp.ln(rec.b.v))
        r = (c - gb) / bpow
        lres = mpf(0)
        rres = mpf(0)
        n = max(3, grid_size)
        for i in range(1, n - 1):
            xl = rec.a.v * (1 - mpf(i) / (n - 1))
            model = c - s * abs(xl)
            lres = max(lres, abs(_pow_raw(m, k, xl) - model))
            xr = rec.b.v * mpf(i) / (n - 1)
            xp = xr ** m._beta_int if m._beta_int is not None \
                else mp.exp(beta * mp.ln(xr))
            model = c - r * xp
            rres = max(rres, abs(_pow_raw(m, k, xr) - model))
        return ReturnModelFit(k, BigReal(s, bits), BigReal(r, bits),
                              rec.c_pow, BigReal(lres, bits), BigReal(rres, bits))


# ---------------------------------------------------------------------------
# rescaled return maps and their universal limits


def limit_ratio_root(beta, bits=256) -> BigReal:
    """The root lam in (0,1) of lam^beta + lam = 1 (the odd-step interval
    contraction ratio)."""
    from .scaling import lambda_root
    return lambda_root(beta, bits)


def rescaled_renorm(ladder: RenormLadder, k: int, grid_size: int = 65):
    """Affinely rescale f^(2^k) on [a_k, b_k] to [0, 1] (0 -> a_k, 1 -> b_k)
    and sample it on a uniform grid.

    Returns (samples, c_hat) where samples is a list of (x, value) pairs in
    the rescaled coordinates and c_hat = -a_k/(b_k - a_k) is the rescaled
    position of the turning point.
    """
    if grid_size < 9:
        raise DomainError("grid_size must be >= 9")
    rec = ladder.level(k)
    m = ladder.map
    bits = m.precision_bits
    with mp.workprec(bits):
        a, b = rec.a.v, rec.b.v
        width = b - a
        chat = -a / width
        out = []
        for i in range(grid_size):
            u = mpf(i) / (grid_size - 1)
            x = a + u * width
            y = (_pow_raw(m, k, x) - a) / width
            out.append((BigReal(u, bits), BigReal(y, bits)))
        return out, BigReal(chat, bits)


def odd_left_limit(x, beta, lam) -> BigReal:
    """Limit shape of the (rescaled, left-branch) return map after an odd
    number of doublings: -lam^(beta^2-1) * (x + lam^-beta)^beta + 1/lam,
    normalised so it maps -1 -> 1 and 0 -> 0."""
    x = x if isinstance(x, BigReal) else BigReal(x)
    bits = max(x.bits, lam.bits)
    with mp.workprec(bits + 16):
        b = beta.v if isinstance(beta, BigReal) else mpf(beta)
        lv = lam.v
        base = x.v + mp.exp(-b * mp.ln(lv))
        if base < 0:
            raise DomainError("odd_left_limit: argument below -lam^-beta")
        coef = mp.exp((b * b - 1) * mp.ln(lv))
        val = -coef * (mp.exp(b * mp.ln(base)) if base > 0 else mpf(0)) + 1 / lv
        return BigReal(val, bits)


def renorm_limit_errors(ladder: RenormLadder, k: int, grid_size: int = 65):
    """Sup-norm distance (on a grid) between the rescaled return map at
    level k and its parity limit.

    Right branch: compared on [c_hat, 1] with 1 - x^beta (k even) or
    x^beta (k odd), both in coordinates re-centred at the turning point.
    Left branch: the rescaled map is pulled back by the affine map
    [-1,0] -> [0, c_hat] and compared with x+1 (k even) or with
    ``odd_left_limit`` (k odd).  Derivative errors use central differences.
    """
    rec = ladder.level(k)
    m = ladder.map
    bits = m.precision_bits
    even = (k % 2 == 0)
    lam = limit_ratio_root(m.beta, bits)
    with mp.workprec(bits):
        a, b = rec.a.v, rec.b.v
        width = b - a
        chat = -a / width
        beta = m.beta.v

        def resc(x):          # rescaled return map on [0, 1]
            return (_pow_raw(m, k, a + x * width) - a) / width

        def powb(u):
            if u == 0:
                return mpf(0)
            return u ** m._beta_int if m._beta_int is not None \
                else mp.exp(beta * mp.ln(u))

        # right branch, in coordinates where the turning point is 0 and the
        # right endpoint is 1
        n = grid_size
        r_err = mpf(0)
        rd_err = mpf(0)
        h = mpf(1) / (n - 1)
        for i in range(n):
            u = i * h                      # in [0, 1], map point chat+(1-chat)u
            x = chat + (1 - chat) * u
            y = resc(x)
            if even:
                limit = chat + (1 - chat) * (1 - powb(u))
            else:
                limit = chat + (1 - chat) * powb(u)
            r_err = max(r_err, abs(y - limit))
            if 0 < i < n - 1:
                d = (resc(chat + (1 - chat) * (u + h))
                     - resc(chat + (1 - chat) * (u - h))) / (2 * h)
                dl = (1 - chat) * beta * powb(u) / u * (-1 if even else 1)
                rd_err = max(rd_err, abs(d - dl))

        # left branch, pulled back to [-1, 0]
        l_err = mpf(0)
        ld_err = mpf(0)
        for i in range(n):
            s = -1 + i * h                 # in [-1, 0]
            x = chat * (s + 1)             # in [0, chat]
            y = resc(x)
            if even:
                limit = s + 1
            else:
                limit = odd_left_limit(BigReal(s, bits), m.beta, lam).v
            l_err = max(l_err, abs(y - limit))
            if 0 < i < n - 1:
                d = (resc(chat * (s + h + 1)) - resc(chat * (s - h + 1))) \
                    / (2 * h)
                if even:
                    dl = mpf(1)
                else:
                    lv = lam.v
                    base = s + mp.exp(-beta * mp.ln(lv))
                    dl = -mp.exp((beta * beta - 1) * mp.ln(lv)) * beta \
                        * mp.exp((beta - 1) * mp.ln(base))
                ld_err = max(ld_err, abs(d - dl))

        report = {
            "k": k,
            "parity": "even" if even else "odd",
            "c_hat": BigReal(chat, bits),
            "right_err": BigReal(r_err, bits),
            "right_deriv_err": BigReal(rd_err, bits),
            "left_err_even": BigReal(l_err, bits) if even else None,
            "left_err_odd": None if even else BigReal(l_err, bits),
            "left_deriv_err": BigReal(ld_err, bits),
        }
        return report
