"""CSV, JSON and SVG serialization of solved paths and sweeps."""

from __future__ import annotations

import io
import json
import math
from xml.sax.saxutils import escape

import numpy as np
from matplotlib.colors import TABLEAU_COLORS
from matplotlib.ticker import MaxNLocator

from . import econ
from .config import scenario_to_dict
from .errors import DomainError, HotellingError
from .lab import SweepResult, front_load_time

CSV_HEADER = "t,q,cumulative,marginal_profit,shadow_value"
SWEEP_CSV_HEADER = "param_value,lambda,exhaustion_time,t50,value,error"

WIDTH, HEIGHT = 800, 500
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 30, 60


def fmt(x):
    """12 significant digits, no negative zero, ``inf`` spelled out."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x + 0.0, ".12g")


def _marginal_profit(s, q, t):
    try:
        return float(econ.net_marginal_profit(s, q, t))
    except HotellingError:
        return math.inf


def emit_csv(path):
    s, lam = path.scenario, path.shadow_price
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for t, q, c in zip(path.times, path.rates, path.cumulative):
        row = (t, q, c, _marginal_profit(s, q, t), lam * math.exp(s.rho * t))
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def emit_sweep_csv(result):
    lines = [SWEEP_CSV_HEADER]
    for r in result.rows:
        nums = [fmt(v) for v in (r.value, r.shadow_price, r.exhaustion, r.t50, r.present_value)]
        err = (r.error or "").replace('"', "'")
        lines.append(",".join(nums + [f'"{err}"' if err else ""]))
    return "\n".join(lines) + "\n"


def _num(x):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return "infinite" if math.isinf(x) else float(x)


def _path_summary(path):
    try:
        t50 = front_load_time(path, 0.5)
    except HotellingError:
        t50 = None
    return {
        "lambda": _num(path.shadow_price),
        "exhaustion_time": _num(path.exhaustion),
        "t50": _num(t50),
        "value": _num(path.value),
        "stock": path.scenario.stock,
        "scenario": scenario_to_dict(path.scenario),
    }


def _sweep_summary(result):
    rows = [
        {
            "param_value": r.value,
            "lambda": _num(r.shadow_price),
            "exhaustion_time": _num(r.exhaustion),
            "t50": _num(r.t50),
            "value": _num(r.present_value),
            "error": r.error,
        }
        for r in result.rows
    ]
    verdicts = [
        {
            "parameter": v.parameter,
            "expected": v.expected,
            "status": v.status,
            "claim": v.claim,
            "violation": [list(p) for p in v.violation] if v.violation else None,
        }
        for v in result.verdicts
    ]
    return {"parameter": result.parameter, "rows": rows, "verdicts": verdicts}


def summary_dict(obj):
    return _sweep_summary(obj) if isinstance(obj, SweepResult) else _path_summary(obj)


def emit_summary_json(obj):
    """Summary of a path or a sweep, keys in a fixed order."""
    return json.dumps(summary_dict(obj), indent=2) + "\n"


def _ticks(hi):
    ticks = MaxNLocator(nbins=6, steps=[1, 2, 2.5, 5, 10]).tick_values(0.0, hi)
    return [t for t in ticks if -1e-12 * hi <= t <= hi * (1 + 1e-12)]


def render_svg(paths, title="Extraction rate Q(t)"):
    """Line chart of Q(t), one polyline per path, 800x500 viewport.

    Output depends only on the inputs (fixed number formatting, no ids or
    timestamps), so identical calls give byte-identical documents.
    """
    paths = list(paths)
    if not paths:
        raise DomainError("render_svg needs at least one path")
    for p in paths:
        if len(p.times) < 2:
            raise DomainError("every path needs at least 2 grid points")
    x_hi = max(float(p.times[-1]) for p in paths) or 1.0
    y_hi = max(float(np.max(p.rates)) for p in paths) * 1.05 or 1.0
    pw, ph = WIDTH - _LEFT - _RIGHT, HEIGHT - _TOP - _BOTTOM

    def sx(x):
        return _LEFT + pw * x / x_hi

    def sy(y):
        return _TOP + ph * (1.0 - y / y_hi)

    colors = list(TABLEAU_COLORS.values())
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        '<g stroke="black" stroke-width="1">',
        f'<line x1="{_LEFT}" y1="{_TOP + ph}" x2="{_LEFT + pw}" y2="{_TOP + ph}"/>',
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_TOP + ph}"/>',
        "</g>",
        '<g font-family="sans-serif" font-size="11">',
    ]
    for t in _ticks(x_hi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{_TOP + ph}" x2="{x:.2f}" y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{_TOP + ph + 18}" text-anchor="middle">{t:g}</text>')
    for q in _ticks(y_hi):
        y = sy(q)
        out.append(f'<line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{q:g}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">time t</text>')
    out.append(
        f'<text x="18" y="{_TOP + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_TOP + ph / 2:.0f})">extraction rate Q</text>'
    )
    out.append("</g>")

    for i, p in enumerate(paths):
        pts = " ".join(f"{sx(t):.2f},{sy(q):.2f}" for t, q in zip(p.times, p.rates))
        out.append(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1.5" points="{pts}"/>')

    out.append('<g class="legend" font-family="sans-serif" font-size="11">')
    for i, p in enumerate(paths):
        y = _TOP + 12 + 16 * i
        x = _LEFT + pw - 250
        color = colors[i % len(colors)]
        out.append(f'<line x1="{x}" y1="{y - 4}" x2="{x + 20}" y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend-entry" x="{x + 26}" y="{y}">{escape(p.scenario.describe())}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
