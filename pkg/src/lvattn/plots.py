"""Minimal deterministic SVG line/scatter plots."""
from __future__ import annotations

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np


def _f(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = np.ceil(lo / step) * step
    return [float(np.round(t / step) * step) + 0.0 for t in np.arange(first, hi + step * 1e-9, step)]


@dataclass
class Panel:
    """One set of axes; data coordinates are mapped into the panel's pixel box."""

    left: float
    top: float
    width: float
    height: float
    xlim: tuple[float, float]
    ylim: tuple[float, float]
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    items: list[str] = field(default_factory=list)
    legend: list[tuple[str, str, str]] = field(default_factory=list)
    clip_id: str = "clip0"

    def px(self, x):
        x0, x1 = self.xlim
        return self.left + (np.asarray(x, dtype=float) - x0) / (x1 - x0 or 1.0) * self.width

    def py(self, y):
        y0, y1 = self.ylim
        return self.top + self.height - (np.asarray(y, dtype=float) - y0) / (y1 - y0 or 1.0) * self.height

    def line(self, x, y, color: str, width: float = 1.2, dash: str | None = None, label: str | None = None):
        pts = " ".join(f"{_f(a)},{_f(b)}" for a, b in zip(self.px(x), self.py(y)))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"{extra}/>'
        )
        if label:
            self.legend.append((label, color, "line"))

    def markers(self, x, y, color: str, shape: str = "circle", size: float = 4.0, label: str | None = None):
        for a, b in zip(self.px(x), self.py(y)):
            if shape == "circle":
                self.items.append(f'<circle cx="{_f(a)}" cy="{_f(b)}" r="{_f(size)}" fill="{color}"/>')
            elif shape == "triangle":
                pts = f"{_f(a)},{_f(b - size)} {_f(a - size)},{_f(b + size)} {_f(a + size)},{_f(b + size)}"
                self.items.append(f'<polygon points="{pts}" fill="{color}"/>')
            elif shape == "cross":
                self.items.append(
                    f'<path d="M{_f(a - size)},{_f(b - size)}L{_f(a + size)},{_f(b + size)}'
                    f'M{_f(a - size)},{_f(b + size)}L{_f(a + size)},{_f(b - size)}" '
                    f'stroke="{color}" stroke-width="2.5"/>'
                )
            else:
                raise ValueError(f"unknown marker shape {shape!r}")
        if label:
            self.legend.append((label, color, shape))

    def render(self) -> str:
        out = [f'<rect x="{_f(self.left)}" y="{_f(self.top)}" width="{_f(self.width)}" '
               f'height="{_f(self.height)}" fill="none" stroke="#333"/>']
        for t in _nice_ticks(*self.xlim):
            x = self.px(t)
            out.append(f'<line x1="{_f(x)}" y1="{_f(self.top + self.height)}" x2="{_f(x)}" '
                       f'y2="{_f(self.top + self.height + 4)}" stroke="#333"/>')
            out.append(f'<text x="{_f(x)}" y="{_f(self.top + self.height + 16)}" '
                       f'text-anchor="middle" font-size="10">{t:g}</text>')
        for t in _nice_ticks(*self.ylim):
            y = self.py(t)
            out.append(f'<line x1="{_f(self.left - 4)}" y1="{_f(y)}" x2="{_f(self.left)}" '
                       f'y2="{_f(y)}" stroke="#333"/>')
            out.append(f'<text x="{_f(self.left - 6)}" y="{_f(y + 3)}" text-anchor="end" '
                       f'font-size="10">{t:.4g}</text>')
        out.append(f'<g clip-path="url(#{self.clip_id})">')
        out.extend(self.items)
        out.append("</g>")
        if self.title:
            out.append(f'<text x="{_f(self.left + self.width / 2)}" y="{_f(self.top - 8)}" '
                       f'text-anchor="middle" font-size="13">{escape(self.title)}</text>')
        if self.xlabel:
            out.append(f'<text x="{_f(self.left + self.width / 2)}" y="{_f(self.top + self.height + 32)}" '
                       f'text-anchor="middle" font-size="11">{escape(self.xlabel)}</text>')
        if self.ylabel:
            cx, cy = self.left - 42, self.top + self.height / 2
            out.append(f'<text x="{_f(cx)}" y="{_f(cy)}" text-anchor="middle" font-size="11" '
                       f'transform="rotate(-90 {_f(cx)} {_f(cy)})">{escape(self.ylabel)}</text>')
        for i, (label, color, kind) in enumerate(self.legend):
            lx, ly = self.left + self.width - 150, self.top + 14 + 14 * i
            if kind == "line":
                out.append(f'<line x1="{_f(lx)}" y1="{_f(ly - 3)}" x2="{_f(lx + 16)}" y2="{_f(ly - 3)}" '
                           f'stroke="{color}" stroke-width="2"/>')
            else:
                out.append(f'<circle cx="{_f(lx + 8)}" cy="{_f(ly - 3)}" r="3.5" fill="{color}"/>')
            out.append(f'<text x="{_f(lx + 22)}" y="{_f(ly)}" font-size="10">{escape(label)}</text>')
        return "\n".join(out)


class Figure:
    def __init__(self, width: int = 800, height: int = 500):
        self.width = width
        self.height = height
        self.panels: list[Panel] = []

    def panel(self, xlim, ylim, box=None, **kw) -> Panel:
        left, top, w, h = box or (70, 40, self.width - 100, self.height - 90)
        p = Panel(left, top, w, h, tuple(map(float, xlim)), tuple(map(float, ylim)),
                  clip_id=f"clip{len(self.panels)}", **kw)
        self.panels.append(p)
        return p

    def to_svg(self) -> str:
        clips = "".join(
            f'<clipPath id="{p.clip_id}"><rect x="{_f(p.left)}" y="{_f(p.top)}" '
            f'width="{_f(p.width)}" height="{_f(p.height)}"/></clipPath>'
            for p in self.panels
        )
        body = "\n".join(p.render() for p in self.panels)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" font-family="sans-serif">\n'
            f'<defs>{clips}</defs>\n<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'
        )


def padded(values, frac: float = 0.05) -> tuple[float, float]:
    lo = float(np.min(values))
    hi = float(np.max(values))
    pad = (hi - lo) * frac or 1.0
    return lo - pad, hi + pad
