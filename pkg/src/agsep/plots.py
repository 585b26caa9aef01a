"""Figures for the ``repro`` report. Everything renders off-screen to files."""

from __future__ import annotations

import functools
import math
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .concat import RateReport, new_bound, probabilistic_bound, tvz_bound, xing_bound  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
    "svg.hashsalt": "agsep",
}


def _styled(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        with plt.rc_context(STYLE):
            return fn(*args, **kwargs)
    return wrapper


def _figure(width: float = 5.0, ratio: float = (math.sqrt(5) - 1) / 2):
    return plt.subplots(figsize=(width, width * ratio))


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else {"Date": None})
    plt.close(fig)
    return path


def square_prime_powers(lo: int = 25, hi: int = 1024) -> list[int]:
    out = []
    for r in range(2, math.isqrt(hi) + 1):
        q = r * r
        if q < lo:
            continue
        p = next(d for d in range(2, r + 1) if r % d == 0)
        m = r
        while m % p == 0:
            m //= p
        if m == 1:
            out.append(q)
    return out


@_styled
def plot_rate_bounds(path: Path, qs: Sequence[int] | None = None) -> Path:
    """Lower bounds on the intersecting-code rate R_q against square q."""
    qs = list(qs or square_prime_powers())
    fig, ax = _figure()
    ax.plot(qs, [tvz_bound(q) for q in qs], "o-", ms=3, label="min. distance > n/2 (TVZ)")
    ax.plot(qs, [xing_bound(q) for q in qs], "s-", ms=3, label="Xing, counting argument")
    ax.plot(qs, [new_bound(q) for q in qs], "^-", ms=3, label="1/2 - 1/(2A(q)), constructive")
    ax.axhline(0.5, color="0.5", lw=0.8, ls="--")
    ax.axvline(121, color="0.7", lw=0.8, ls=":")
    ax.set_xscale("log")
    ax.set_xlabel("q (square)")
    ax.set_ylabel("lower bound on R_q")
    ax.legend(frameon=False, loc="lower right")
    return _save(fig, path)


@_styled
def plot_exponent_ledger(report: RateReport, path: Path) -> Path:
    names = [("rho_tvz", "TVZ"), ("rho_xing", "Xing"), ("rho_probabilistic", "random"), ("rho_new", "new")]
    vals = [report[n].value for n, _ in names]
    fig, ax = _figure()
    bars = ax.bar([lbl for _, lbl in names], vals, color=["0.75", "0.6", "0.45", "C0"])
    for b, v in zip(bars, vals):
        ax.text(b.get_x() + b.get_width() / 2, v + 0.0004, f"{v:.6f}", ha="center", va="bottom", fontsize=7)
    ax.axhline(probabilistic_bound(), color="C3", lw=0.8, ls="--")
    lo = min(vals) - 0.004
    ax.set_ylim(lo, max(vals) + 0.004)
    ax.set_ylabel("exponent of (2,1)-separating codes")
    return _save(fig, path)


@_styled
def plot_distance_spectra(spectra: Mapping[str, Mapping[int, int]], path: Path) -> Path:
    """Grouped bars of pairwise-distance counts, one group per code."""
    fig, ax = _figure(width=5.5)
    labels = list(spectra)
    dists = sorted({d for s in spectra.values() for d in s})
    width = 0.8 / max(len(labels), 1)
    x = np.arange(len(dists))
    for i, lbl in enumerate(labels):
        counts = [spectra[lbl].get(d, 0) for d in dists]
        ax.bar(x + i * width, counts, width, label=lbl)
    ax.set_xticks(x + width * (len(labels) - 1) / 2, [str(d) for d in dists])
    ax.set_yscale("log")
    ax.set_xlabel("Hamming distance")
    ax.set_ylabel("unordered pairs")
    ax.legend(frameon=False)
    return _save(fig, path)


@_styled
def plot_bad_points(single: Sequence[int], double: Sequence[int], genus: int, path: Path) -> Path:
    fig, ax = _figure()
    top = max([4 * genus, *single, *double]) + 1
    bins = np.arange(-0.5, top + 1.5)
    ax.hist([list(single), list(double)], bins=bins, label=["l(A+P) > 0", "l(A+2P) > 0"])
    ax.axvline(genus, color="C0", ls="--", lw=0.8, label=f"bound g = {genus}")
    ax.axvline(4 * genus, color="C1", ls="--", lw=0.8, label=f"bound 4g = {4 * genus}")
    ax.set_xlabel("bad points per divisor A")
    ax.set_ylabel("divisors")
    ax.legend(frameon=False, loc="upper right")
    return _save(fig, path)
