"""Matplotlib report figures (PNG) written next to the CSV/JSON output.

Uses the object-oriented Figure API with the Agg canvas so no global pyplot
state is touched.
"""

from __future__ import annotations

import math

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

_METADATA = {"Software": None}


def _save(fig, filename):
    FigureCanvasAgg(fig)
    fig.savefig(filename, dpi=120, metadata=_METADATA)


def plot_paths(paths, filename, title=None):
    """Two panels: extraction rate and share of stock extracted."""
    fig = Figure(figsize=(9, 4.2), layout="constrained")
    ax_q, ax_c = fig.subplots(1, 2)
    for p in paths:
        label = p.scenario.describe()
        ax_q.plot(p.times, p.rates, lw=1.5, label=label)
        if p.scenario.stock > 0:
            ax_c.plot(p.times, np.asarray(p.cumulative) / p.scenario.stock, lw=1.5, label=label)
        if math.isfinite(p.exhaustion) and p.exhaustion > 0:
            ax_q.axvline(p.exhaustion, color="0.7", lw=0.8, ls=":")
    ax_q.set_xlabel("time t")
    ax_q.set_ylabel("extraction rate Q(t)")
    ax_c.set_xlabel("time t")
    ax_c.set_ylabel("cumulative / stock")
    ax_c.axhline(0.5, color="0.7", lw=0.8, ls="--")
    ax_c.set_ylim(0, 1.05)
    ax_q.legend(fontsize=7, frameon=False)
    if title:
        fig.suptitle(title)
    _save(fig, filename)


def plot_sweep(result, filename):
    """Front-load time t50 against the swept parameter, plus the paths."""
    ok = [r for r in result.rows if r.ok]
    fig = Figure(figsize=(9, 4.2), layout="constrained")
    ax_t, ax_q = fig.subplots(1, 2)
    ax_t.plot([r.value for r in ok], [r.t50 for r in ok], "o-", color="C0")
    ax_t.set_xlabel(result.parameter)
    ax_t.set_ylabel("t50 (half of stock extracted)")
    for v in result.verdicts:
        ax_t.set_title(f"{v.status}: t50 {v.expected} in {v.parameter}", fontsize=10)
    for r in ok:
        ax_q.plot(r.path.times, r.path.rates, lw=1.2, label=f"{result.parameter}={r.value:g}")
    ax_q.set_xlabel("time t")
    ax_q.set_ylabel("extraction rate Q(t)")
    ax_q.legend(fontsize=7, frameon=False)
    _save(fig, filename)
