"""Scaling invariants of the doubling ladder.

From the nested intervals [a_k, b_k] this module estimates the three
numbers that govern the geometry deep in the cascade:

  lam    the root in (0, 1) of lam^beta + lam = 1; the contraction
         ratio b_{k+1}/b_k along even steps;
  Theta  the non-universal growth rate in log(1/b_{2k}) ~ 2^k * Theta;
  D      the constant bias log(beta^(2/(beta-1)) / K_0^(1/(beta-1)))
         in log(1/b_{2k}) ~ 2^k * Theta - D,

together with the even/odd step coefficients relating consecutive
levels, and compares the invariants of two maps (beta and Theta jointly
decide whether a conjugacy between them can be Lipschitz at 0).
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from .errors import DomainError, InsufficientDataError
from .numeric import BigReal, bisect_root, ulp
from .ladder import RenormLadder

__all__ = ["lambda_root", "ScalingReport", "InvariantComparison",
           "analyze", "check_scaling_laws", "compare_invariants"]


def lambda_root(beta, bits=256) -> BigReal:
    """The unique root in (0, 1) of lam^beta + lam = 1.

    Accepts beta >= 1 (beta = 1 gives exactly 1/2)."""
    bits = max(int(bits), 64)
    b = beta if isinstance(beta, BigReal) else BigReal(beta, bits)
    if not b.v >= 1:
        raise DomainError("beta must be >= 1")
    bits = max(bits, b.bits)

    def g(x: BigReal) -> BigReal:
        with mp.workprec(bits + 16):
            v = x.v
            if b.v == int(b.v):
                p = v ** int(b.v)
            else:
                p = mp.exp(b.v * mp.ln(v)) if v > 0 else mpf(0)
            return BigReal(p + v - 1, bits)

    lo = BigReal(mpf(2) ** (-16), bits)
    hi = BigReal(1 - mpf(2) ** (-16), bits)
    tol = ulp(hi) * 8
    r = bisect_root(g, lo, hi, tol)
    return r.root


@dataclass(frozen=True)
class ScalingReport:
    """Ratio tables extracted from one ladder.

    List entries are (k, BigReal) pairs; mu_k denotes log(1/b_{2k}).
    """

    lambda_root: BigReal
    lambda_est_by_k: tuple       # (k even, b_{k+1}/b_k)
    Theta_est_by_k: tuple        # (k, (mu_{k+1} - mu_k)/2^k)
    D_est_by_k: tuple            # (k, mu_{k+1} - 2*mu_k)
    D_pred: BigReal              # log(beta^(2/(beta-1)) * K_0^(-1/(beta-1)))
    coef51_by_k: tuple           # (k even, b_{k+2}/b_k^2)
    coef54_by_k: tuple           # (k even, c_{2^(k+1)}/b_{k+1}^(beta+1))
    c_ratio_by_k: tuple          # (k even, c_{2^k}/b_k)
    odd_step_b_by_k: tuple       # (k odd, b_{k+1}/b_k^2)
    mu_by_k: tuple               # (k, log(1/b_{2k}))
    config: dict                 # the analyzed map's resolved configuration
    trusted_depth: int

    @property
    def theta(self) -> BigReal:
        """Deepest available Theta estimate."""
        return self.Theta_est_by_k[-1][1]

    @property
    def theta_uncertainty(self) -> BigReal:
        """Spread of the last two Theta estimates (convergence proxy)."""
        if len(self.Theta_est_by_k) < 2:
            return abs(self.Theta_est_by_k[-1][1])
        return abs(self.Theta_est_by_k[-1][1] - self.Theta_est_by_k[-2][1])


def _asymmetry(config: dict) -> BigReal:
    sr = BigReal.parse(config["scale_right"])
    sl = BigReal.parse(config["scale_left"])
    return sr / sl


def analyze(ladder: RenormLadder) -> ScalingReport:
    """Extract every ratio table from the trusted part of a ladder."""
    T = ladder.max_trusted_level
    if T < 6:
        raise InsufficientDataError(
            f"need at least 6 trusted levels, have {T}")
    m = ladder.map
    bits = m.precision_bits
    lam = lambda_root(m.beta, bits)

    evens = [k for k in range(0, T) if k % 2 == 0]
    if len(evens) < 4:
        raise InsufficientDataError(
            f"need at least 4 even levels below the trusted depth, have "
            f"{len(evens)}")

    with mp.workprec(bits):
        beta = m.beta.v
        b = [ladder.level(k).b.v for k in range(T + 1)]
        c = [ladder.level(k).c_pow.v for k in range(T + 1)]

        lam_est = tuple((k, BigReal(b[k + 1] / b[k], bits)) for k in evens)
        c_ratio = tuple((k, BigReal(c[k] / b[k], bits))
                        for k in range(0, T + 1, 2))
        coef51 = tuple((k, BigReal(b[k + 2] / (b[k] * b[k]), bits))
                       for k in evens if k + 2 <= T)
        odd_step = tuple((k, BigReal(b[k + 1] / (b[k] * b[k]), bits))
                         for k in range(1, T, 2))

        def powb1(x):  # x^(beta+1) for x > 0
            return mp.exp((beta + 1) * mp.ln(x))

        coef54 = tuple((k, BigReal(c[k + 1] / powb1(b[k + 1]), bits))
                       for k in evens if k + 1 <= T)

        mu = tuple((k, BigReal(-mp.ln(b[2 * k]), bits))
                   for k in range(T // 2 + 1))
        theta = tuple((k, BigReal((mu[k + 1][1].v - mu[k][1].v) / (1 << k),
                                  bits))
                      for k in range(len(mu) - 1))
        d_est = tuple((k, BigReal(mu[k + 1][1].v - 2 * mu[k][1].v, bits))
                      for k in range(len(mu) - 1))

        K0 = _asymmetry(m.config())
        d_pred = BigReal((2 * mp.ln(beta) - mp.ln(K0.v)) / (beta - 1), bits)

    return ScalingReport(
        lambda_root=lam,
        lambda_est_by_k=lam_est,
        Theta_est_by_k=theta,
        D_est_by_k=d_est,
        D_pred=d_pred,
        coef51_by_k=coef51,
        coef54_by_k=coef54,
        c_ratio_by_k=c_ratio,
        odd_step_b_by_k=odd_step,
        mu_by_k=mu,
        config=m.config(),
        trusted_depth=T,
    )


# default gate tolerances (relative deviation at the deepest checkpoint)
DEFAULT_TOLERANCES = {
    "b_ratio_even": 0.05,
    "c_over_b_even": 0.05,
    "two_step_coef": 0.15,
    "odd_step_b_coef": 0.25,
    "odd_step_c_coef": 0.25,
    "Theta_stability": 0.05,
    "D_bias": 0.10,
}


def _rel_dev(value, predicted):
    with mp.workprec(max(value.bits, predicted.bits)):
        if predicted.v == 0:
            return abs(value)
        return BigReal(abs(value.v - predicted.v) / abs(predicted.v),
                       value.bits)


def _trend_row(quantity, series, predicted, tol):
    """One check row: the last entry's relative deviation from its
    predicted limit, plus whether the deviation shrank over the last
    three checkpoints."""
    devs = [(k, _rel_dev(v, predicted)) for k, v in series]
    last_k, last_dev = devs[-1]
    tail = [d.v for _, d in devs[-3:]]
    nonincreasing = all(tail[i + 1] <= tail[i] for i in range(len(tail) - 1))
    row = {
        "quantity": quantity,
        "k": last_k,
        "value": series[-1][1],
        "predicted": predicted,
        "rel_dev": last_dev,
        "trend_nonincreasing": nonincreasing,
    }
    if tol is not None:
        row["passed"] = bool(last_dev.v <= tol) and nonincreasing
    return row


def check_scaling_laws(report: ScalingReport, tolerances=None):
    """Pass/fail table for every asymptotic scaling law in the report.

    Rows cover: the even-step contraction ratio and critical-value ratio,
    the even two-step quadratic coefficient, the odd-step interval and
    critical-value coefficients, Theta stabilization, and the bias
    constant D.  Each row carries the deepest checkpoint's relative
    deviation and a flag for whether the deviations were non-increasing
    over the last three checkpoints.  With ``tolerances`` (a dict, or
    True for the defaults) each row also gains a ``passed`` flag.
    """
    if tolerances is True:
        tolerances = DEFAULT_TOLERANCES
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    gated = tolerances is not None

    bits = report.lambda_root.bits
    beta = BigReal.parse(report.config["beta"], bits)
    K0 = _asymmetry(report.config).with_bits(bits)
    lam = report.lambda_root
    with mp.workprec(bits):
        bm1 = beta.v - 1
        # two-step coefficient beta^(-2/(beta-1)) * K_0^(1/(beta-1))
        two_step = BigReal(mp.exp((-2 * mp.ln(beta.v) + mp.ln(K0.v)) / bm1),
                           bits)
        # odd-step interval coefficient: two_step / lam^2
        odd_b = BigReal(two_step.v / (lam.v * lam.v), bits)
        # odd-step critical-value coefficient:
        # -beta^(-(beta+1)/(beta-1)) * K_0^(beta/(beta-1)) * lam^(-(beta+1))
        odd_c = BigReal(
            -mp.exp((-(beta.v + 1) * mp.ln(beta.v)
                     + beta.v * mp.ln(K0.v)) / bm1
                    - (beta.v + 1) * mp.ln(lam.v)),
            bits)
    one = BigReal(1, bits)

    rows = [
        _trend_row("b_ratio_even", report.lambda_est_by_k, lam,
                   tol["b_ratio_even"] if gated else None),
        _trend_row("c_over_b_even", report.c_ratio_by_k, one,
                   tol["c_over_b_even"] if gated else None),
        _trend_row("two_step_coef", report.coef51_by_k, two_step,
                   tol["two_step_coef"] if gated else None),
        _trend_row("odd_step_b_coef", report.odd_step_b_by_k, odd_b,
                   tol["odd_step_b_coef"] if gated else None),
        _trend_row("odd_step_c_coef", report.coef54_by_k, odd_c,
                   tol["odd_step_c_coef"] if gated else None),
    ]

    # Theta stabilization: successive relative changes of the estimates
    theta = report.Theta_est_by_k
    changes = [(theta[i + 1][0],
                _rel_dev(theta[i + 1][1], theta[i][1]))
               for i in range(len(theta) - 1)]
    last_k, last_change = changes[-1]
    tail = [d.v for _, d in changes[-3:]]
    row = {
        "quantity": "Theta_stability",
        "k": last_k,
        "value": theta[-1][1],
        "predicted": theta[-2][1],
        "rel_dev": last_change,
        "trend_nonincreasing": all(tail[i + 1] <= tail[i]
                                   for i in range(len(tail) - 1)),
    }
    if gated:
        row["passed"] = bool(last_change.v <= tol["Theta_stability"])
    rows.append(row)

    # bias constant (loose: the o(1) term at finite depth is unquantified)
    rows.append(_trend_row("D_bias", report.D_est_by_k, report.D_pred,
                           tol["D_bias"] if gated else None))
    return rows


@dataclass(frozen=True)
class InvariantComparison:
    beta_match: bool
    Theta_a: BigReal
    Theta_b: BigReal
    rho: BigReal                 # (K_0 / K~_0)^(1/(beta-1))
    lipschitz_verdict: str       # "compatible" | "incompatible"


def compare_invariants(report_a: ScalingReport,
                       report_b: ScalingReport) -> InvariantComparison:
    """Joint invariant test for two maps: a conjugacy between them can be
    Lipschitz at the turning point only if their beta's agree exactly and
    their Theta's agree within the estimates' uncertainty.  rho is the
    derivative-rescaling factor implied by the two asymmetry ratios."""
    beta_match = report_a.config["beta"] == report_b.config["beta"]

    depth = min(len(report_a.Theta_est_by_k), len(report_b.Theta_est_by_k))
    ta = report_a.Theta_est_by_k[depth - 1][1]
    tb = report_b.Theta_est_by_k[depth - 1][1]

    def unc(rep):
        th = rep.Theta_est_by_k
        if depth < 2:
            return abs(th[depth - 1][1])
        return abs(th[depth - 1][1] - th[depth - 2][1])

    bits = max(ta.bits, tb.bits)
    K0a = _asymmetry(report_a.config).with_bits(bits)
    K0b = _asymmetry(report_b.config).with_bits(bits)
    if report_a.config["scale_left"] == report_b.config["scale_left"] and \
            report_a.config["scale_right"] == report_b.config["scale_right"]:
        rho = BigReal(1, bits)
    else:
        beta = BigReal.parse(report_a.config["beta"], bits)
        with mp.workprec(bits):
            rho = BigReal(mp.exp(mp.ln(K0a.v / K0b.v) / (beta.v - 1)), bits)

    combined = unc(report_a) + unc(report_b)
    compatible = beta_match and abs(ta - tb).v <= combined.v
    return InvariantComparison(
        beta_match=beta_match,
        Theta_a=ta,
        Theta_b=tb,
        rho=rho,
        lipschitz_verdict="compatible" if compatible else "incompatible",
    )
