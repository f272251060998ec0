"""Static SVG figures written as plain text (no plotting backend needed).

Output depends only on the inputs: no timestamps, fixed number formatting.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np
from scipy.stats import gaussian_kde

from .effects import STRICT_NEG, EffectSummary, EffectThresholds

GREY = "#9a9a9a"
BLACK = "#000000"


def _f(x: float) -> str:
    return f"{x:.2f}"


def nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 10))
        v += step
    return ticks


class Panel:
    """One set of axes placed at ``(x0, y0)`` with size ``w`` x ``h`` pixels."""

    def __init__(self, x0, y0, w, h, xlim, ylim, title="", xlabel="", ylabel=""):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xlim, self.ylim = xlim, ylim
        self.parts: list[str] = []
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel

    def px(self, x):
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo) * self.w

    def py(self, y):
        lo, hi = self.ylim
        return self.y0 + self.h - (y - lo) / (hi - lo) * self.h

    def polygon(self, xs, ys, fill, stroke="none"):
        pts = " ".join(f"{_f(self.px(a))},{_f(self.py(b))}" for a, b in zip(xs, ys))
        self.parts.append(f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" stroke-width="1"/>')

    def polyline(self, xs, ys, stroke=BLACK, width=1.5, dash=None):
        pts = " ".join(f"{_f(self.px(a))},{_f(self.py(b))}" for a, b in zip(xs, ys))
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"{d}/>')

    def vline(self, x, stroke=BLACK, dash=None, width=1.5):
        self.polyline([x, x], list(self.ylim), stroke=stroke, dash=dash, width=width)

    def points(self, xs, ys, fill, r=2.2):
        for a, b in zip(xs, ys):
            self.parts.append(f'<circle cx="{_f(self.px(a))}" cy="{_f(self.py(b))}" r="{r}" fill="{fill}"/>')

    def text(self, x, y, s, anchor="middle", size=11, rotate=None):
        rot = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.parts.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}"'
            f' font-family="sans-serif"{rot}>{escape(s)}</text>')

    def render(self, xfmt="{:g}", yfmt="{:g}") -> str:
        out = [f'<rect x="{_f(self.x0)}" y="{_f(self.y0)}" width="{_f(self.w)}" height="{_f(self.h)}"'
               ' fill="none" stroke="#333" stroke-width="1"/>']
        for t in nice_ticks(*self.xlim):
            x = self.px(t)
            out.append(f'<line x1="{_f(x)}" y1="{_f(self.y0 + self.h)}" x2="{_f(x)}" '
                       f'y2="{_f(self.y0 + self.h + 4)}" stroke="#333"/>')
        saved, self.parts = self.parts, []
        for t in nice_ticks(*self.xlim):
            self.text(self.px(t), self.y0 + self.h + 16, xfmt.format(t), size=10)
        for t in nice_ticks(*self.ylim):
            y = self.py(t)
            out.append(f'<line x1="{_f(self.x0 - 4)}" y1="{_f(y)}" x2="{_f(self.x0)}" '
                       f'y2="{_f(y)}" stroke="#333"/>')
            self.text(self.x0 - 7, y + 3.5, yfmt.format(t), anchor="end", size=10)
        if self.title:
            self.text(self.x0 + self.w / 2, self.y0 - 8, self.title, size=12)
        if self.xlabel:
            self.text(self.x0 + self.w / 2, self.y0 + self.h + 34, self.xlabel)
        if self.ylabel:
            self.text(self.x0 - 42, self.y0 + self.h / 2, self.ylabel, rotate=-90)
        labels, self.parts = self.parts, saved
        clip = (f'<clipPath id="c{int(self.x0)}_{int(self.y0)}"><rect x="{_f(self.x0)}" y="{_f(self.y0)}"'
                f' width="{_f(self.w)}" height="{_f(self.h)}"/></clipPath>')
        body = f'<g clip-path="url(#c{int(self.x0)}_{int(self.y0)})">' + "\n".join(self.parts) + "</g>"
        return "\n".join([clip, body, *out, *labels])


def effect_density_svg(x, panels: list[tuple[EffectThresholds, EffectSummary]]) -> str:
    """Posterior density with the intended, null and unintended ranges shaded.

    Grey: intended range. Black: practically null values (only drawn when the
    thresholds leave a gap). White: unintended range. Solid and dashed
    vertical lines mark the two conditional means.
    """
    x = np.asarray(x, dtype=float)
    spread = x.std() if x.std() > 0 else 1.0
    lo, hi = x.min() - spread, x.max() + spread
    grid = np.linspace(lo, hi, 400)
    if x.std() > 0:
        dens = gaussian_kde(x, bw_method="silverman")(grid)
    else:
        dens = np.where(np.abs(grid - x[0]) == np.abs(grid - x[0]).min(), 1.0, 0.0)
    ymax = float(dens.max()) * 1.08
    pw, ph = 360, 240
    out = []
    for k, (thr, s) in enumerate(panels):
        md = 0.0 if thr.theta_md is STRICT_NEG else thr.theta_md
        title = ("theta_md = -eps" if thr.theta_md is STRICT_NEG else f"theta_md = {md:g}") + \
            f", theta_mu = {thr.theta_mu:g}"
        p = Panel(70 + k * (pw + 80), 40, pw, ph, (lo, hi), (0.0, ymax), title=title,
                  xlabel="effect (log odds)", ylabel="density")

        def band(a, b, fill):
            m = (grid >= a) & (grid <= b)
            if m.sum() < 2:
                return
            xs = grid[m]
            p.polygon([xs[0], *xs, xs[-1]], [0.0, *dens[m], 0.0], fill=fill, stroke=BLACK)

        band(lo, md, GREY)
        if md < thr.theta_mu:
            band(md, thr.theta_mu, BLACK)
        band(thr.theta_mu, hi, "white")
        p.polyline(grid, dens, width=1.5)
        if s.theta_int is not None:
            p.vline(s.theta_int)
        if s.theta_unint is not None:
            p.vline(s.theta_unint, dash="6,4")
        p.text(p.x0 + 8, p.y0 + 16, f"p*theta_int = {s.p_theta_int:.3f}", anchor="start", size=10)
        p.text(p.x0 + 8, p.y0 + 30, f"q*theta_unint = {s.q_theta_unint:.3f}", anchor="start", size=10)
        out.append(p)
    width = 70 + len(panels) * (pw + 80)
    return _doc(width, ph + 100, out)


def _doc(width, height, panels, fmts=None) -> str:
    fmts = fmts or [("{:g}", "{:g}")] * len(panels)
    body = "\n".join(p.render(*f) for p, f in zip(panels, fmts))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n<rect width="100%" height="100%" fill="white"/>\n'
            f"{body}\n</svg>\n")


def prob_curve_svg(curve, baseline: float) -> str:
    """Probability of the effect against the revised likelihood it implies."""
    pts = [(r, p) for r, p in curve if not math.isnan(r)]
    xs = [100 * r for r, _ in pts]
    ys = [100 * p for _, p in pts]
    xmax = max([100 * baseline, *xs]) * 1.05 if xs else 100 * baseline * 1.05
    p = Panel(80, 40, 440, 300, (0.0, max(xmax, 1e-6)), (0.0, 100.0),
              title=f"Baseline likelihood: {100 * baseline:.0f}%",
              xlabel="revised likelihood of the event (%)", ylabel="probability (%)")
    if xs:
        p.polyline(xs, ys, width=1.2)
        p.points(xs, ys, BLACK)
    p.vline(100 * baseline, stroke=GREY, dash="4,3", width=1)
    return _doc(560, 400, [p])


def sweep_svg(curves: list[tuple[str, object]]) -> str:
    """One panel per threshold: black = implement, gray = not implement."""
    pw, ph = 300, 220
    ncol = 2 if len(curves) > 1 else 1
    panels = []
    for k, (label, c) in enumerate(curves):
        row, col = divmod(k, ncol)
        ys = np.concatenate([c.loss_implement, c.loss_not])
        ymax = float(ys.max()) * 1.05
        p = Panel(80 + col * (pw + 90), 40 + row * (ph + 80), pw, ph, (0.0, float(c.ratio.max())),
                  (0.0, ymax), title=label, xlabel="ratio C_p / C_e", ylabel="expected loss")
        p.points(c.ratio, c.loss_not, GREY, r=1.8)
        p.points(c.ratio, c.loss_implement, BLACK, r=1.8)
        if c.crossover_ratio is not None:
            p.vline(c.crossover_ratio, stroke=BLACK, dash="2,3", width=1)
            p.text(p.px(c.crossover_ratio) + 4, p.y0 + 14, f"{c.crossover_ratio:.2f}",
                   anchor="start", size=10)
        panels.append(p)
    nrow = math.ceil(len(curves) / ncol)
    return _doc(80 + ncol * (pw + 90), 40 + nrow * (ph + 80) + 20, panels)
