"""Render figures from asymren output files.

Each figure kind consumes one documented CSV schema:

  bifurcation   columns t, point            (attractor sweep)
  scaling       columns k, quantity, value, predicted, rel_dev
  tau           columns k, A_k, B_k, hatA_k, hatB_k, tau_k, d_k, e_k,
                a_prime, b_prime
  renorm-overlay columns k, x, value, limit

Values are decimal strings; they are converted to floats only at render
time, and the scaling figure works entirely from the mu rows (the
pre-computed logs), because the underlying interval sizes underflow
double precision at depth.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("bifurcation", "scaling", "tau", "renorm-overlay")

_SCHEMAS = {
    "bifurcation": ["t", "point"],
    "scaling": ["k", "quantity", "value", "predicted", "rel_dev"],
    "tau": ["k", "A_k", "B_k", "hatA_k", "hatB_k", "tau_k", "d_k", "e_k",
            "a_prime", "b_prime"],
    "renorm-overlay": ["k", "x", "value", "limit"],
}


class InputError(Exception):
    """The input file does not match the expected schema."""


@dataclass(frozen=True)
class FigureSpec:
    input: str
    kind: str
    out: str
    # optional axis ranges, (lo, hi) or None for automatic
    x_range: tuple = None
    y_range: tuple = None
    # bifurcation only: list of (t_lo, t_hi) inset windows
    zoom: tuple = field(default=())
    dpi: int = 150


def _read_rows(path, kind):
    expected = _SCHEMAS[kind]
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file, expected columns "
                             f"{expected}")
        if header != expected:
            bad = next((c for c in header if c not in expected),
                       None) or next((c for c in expected if c not in header))
            raise InputError(f"{path}: unexpected column {bad!r}; expected "
                             f"columns {expected}")
        rows = [dict(zip(header, row)) for row in reader]
    if not rows:
        raise InputError(f"{path}: no data rows")
    return rows


def _apply_ranges(ax, spec):
    if spec.x_range is not None:
        ax.set_xlim(*spec.x_range)
    if spec.y_range is not None:
        ax.set_ylim(*spec.y_range)


def _render_bifurcation(spec, rows):
    t = np.array([float(r["t"]) for r in rows])
    x = np.array([float(r["point"]) for r in rows])
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(t, x, ",", color="black", markersize=0.5, rasterized=True)
    ax.set_xlabel("t")
    ax.set_ylabel("attractor")
    _apply_ranges(ax, spec)
    for j, (lo, hi) in enumerate(spec.zoom):
        lo, hi = float(lo), float(hi)
        sel = (t >= lo) & (t <= hi)
        if not sel.any():
            raise InputError(f"zoom window [{lo}, {hi}] contains no samples")
        inset = ax.inset_axes([0.06 + 0.48 * j, 0.06, 0.4, 0.35])
        inset.plot(t[sel], x[sel], ",", color="black", rasterized=True)
        inset.set_xlim(lo, hi)
        ax.indicate_inset_zoom(inset, edgecolor="tab:red")
    return fig, {"points": int(t.size), "zooms": len(spec.zoom)}


def _render_scaling(spec, rows):
    mu = sorted((int(r["k"]), float(r["value"]))
                for r in rows if r["quantity"] == "mu")
    if len(mu) < 3:
        raise InputError("scaling input has fewer than 3 mu rows")
    ks = np.array([k for k, _ in mu], dtype=float)
    mus = np.array([v for _, v in mu])
    xs = 2.0 ** ks
    # mu_k ~ Theta * 2^k - D; plain least squares is dominated by the
    # deepest (largest 2^k) points, which is where the law is exact
    slope, intercept = np.polyfit(xs, mus, 1)
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(xs, mus, "o", label=r"$\log(1/b_{2k})$")
    grid = np.linspace(xs.min(), xs.max(), 200)
    ax.plot(grid, slope * grid + intercept, "-",
            label=f"fit: {slope:.6f}" r"$\cdot 2^k$" f" {intercept:+.4f}")
    ax.set_xlabel(r"$2^k$")
    ax.set_ylabel(r"$\log(1/b_{2k})$")
    ax.legend()
    _apply_ranges(ax, spec)
    return fig, {"slope": float(slope), "intercept": float(intercept),
                 "levels": len(mu)}


def _render_tau(spec, rows):
    ks = [int(r["k"]) for r in rows]
    taus = [float(r["tau_k"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 5))
    odd = [(k, v) for k, v in zip(ks, taus) if k % 2]
    even = [(k, v) for k, v in zip(ks, taus) if k % 2 == 0]
    if odd:
        ax.plot(*zip(*odd), "o-", label=r"$\tau_k$, odd $k$")
    if even:
        ax.semilogy(*zip(*even), "s--", label=r"$\tau_k$, even $k$")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\tau_k$")
    ax.legend()
    _apply_ranges(ax, spec)
    return fig, {"levels": len(ks)}


def _render_renorm_overlay(spec, rows):
    by_k = {}
    for r in rows:
        by_k.setdefault(int(r["k"]), []).append(
            (float(r["x"]), float(r["value"]), float(r["limit"])))
    fig, axes = plt.subplots(1, len(by_k), figsize=(4 * len(by_k), 4),
                             squeeze=False)
    for ax, k in zip(axes[0], sorted(by_k)):
        pts = sorted(by_k[k])
        x = [p[0] for p in pts]
        ax.plot(x, [p[1] for p in pts], "o", markersize=3,
                label=f"level {k}")
        ax.plot(x, [p[2] for p in pts], "-", label="limit")
        ax.set_xlabel("x")
        ax.legend()
        _apply_ranges(ax, spec)
    return fig, {"levels": sorted(by_k)}


_RENDERERS = {
    "bifurcation": _render_bifurcation,
    "scaling": _render_scaling,
    "tau": _render_tau,
    "renorm-overlay": _render_renorm_overlay,
}


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns a summary dict (fit coefficients, row
    counts).  No file is written when the input fails validation."""
    if spec.kind not in KINDS:
        raise InputError(f"unknown figure kind {spec.kind!r}; expected one "
                         f"of {KINDS}")
    rows = _read_rows(spec.input, spec.kind)
    fig, summary = _RENDERERS[spec.kind](spec, rows)
    try:
        fig.savefig(spec.out, dpi=spec.dpi)
    finally:
        plt.close(fig)
    summary["out"] = spec.out
    return summary
