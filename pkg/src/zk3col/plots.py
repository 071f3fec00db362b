"""Figures written by the CLI report paths.  Agg backend only; every function saves to a file."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .timing import TimingRow  # noqa: E402
from .zk import Pattern  # noqa: E402

FIGSIZE = (6.0, 4.0)


def _finish(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_separation(rows: Sequence[TimingRow], path: str, envelope_m: Optional[float] = None) -> str:
    """Minimum verifier separation versus n, log-log, one line per protocol and rate."""
    ns = [r.n for r in rows]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    rates = list(rows[0].ours_m) if rows else []
    for rate in rates:
        ax.plot(ns, [float(r.ours_m[rate]) for r in rows], marker="o", label=f"committed, {rate}")
        ax.plot(ns, [float(r.cl17_m[rate]) for r in rows], marker="s", ls="--", label=f"200 n^2 bits, {rate}")
    if envelope_m is not None:
        ax.axhline(envelope_m, color="grey", lw=0.8, ls=":", label=f"{envelope_m / 1000:g} km")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("vertices n")
    ax.set_ylabel("minimum separation (m)")
    ax.legend(fontsize=7)
    return _finish(fig, path)


def plot_leakage(census: Counter, path: str) -> str:
    labels = [p.value for p in Pattern]
    counts = [census.get(p, 0) for p in Pattern]
    fig, ax = plt.subplots(figsize=FIGSIZE)
    bars = ax.bar(labels, counts, color=["C0"] * 4 + ["C3"])
    for b, c in zip(bars, counts):
        ax.annotate(str(c), (b.get_x() + b.get_width() / 2, b.get_height()), ha="center", va="bottom", fontsize=8)
    ax.set_ylabel("question triples")
    ax.set_title("unveiled vertex patterns")
    return _finish(fig, path)


def plot_search_trace(traces: Sequence[Sequence[Fraction]], path: str, bound: Optional[Fraction] = None) -> str:
    """Acceptance after each best-response step, one faint line per restart."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for tr in traces:
        ax.plot(range(len(tr)), [float(v) for v in tr], color="C0", alpha=0.15, lw=0.8)
    if bound is not None:
        ax.axhline(float(bound), color="C3", ls="--", lw=1, label=f"bound {bound}")
        ax.legend(fontsize=8)
    ax.set_xlabel("best-response step")
    ax.set_ylabel("acceptance probability")
    return _finish(fig, path)
