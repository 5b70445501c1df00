"""Deterministic SVG 1.1 rendering of plot specs.

Same spec in, byte-identical document out: fixed ids, fixed float
formatting, no timestamps.
"""

from __future__ import annotations

import math

from .plotspecs import PlotSpec, Series

MARGIN_LEFT = 64.0
MARGIN_RIGHT = 16.0
MARGIN_TOP = 36.0
MARGIN_BOTTOM = 46.0

FONT = "font-family=\"Helvetica, Arial, sans-serif\""


def _esc(text: str) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _px(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0 or not math.isfinite(span):
        return [lo]
    raw = span / max(1, target - 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = 10.0 * mag
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


class _Panel:
    """Coordinate mapping and primitive emission for one plot panel."""

    def __init__(self, spec: PlotSpec, x: float, y: float, w: float, h: float):
        self.spec = spec
        self.ox = x + MARGIN_LEFT
        self.oy = y + MARGIN_TOP
        self.pw = w - MARGIN_LEFT - MARGIN_RIGHT
        self.ph = h - MARGIN_TOP - MARGIN_BOTTOM
        self.x0, self.x1 = spec.axes.x_range
        self.y0, self.y1 = spec.axes.y_range
        self.px_title_y = y + 18.0
        self.frame = (x, y, w, h)

    def sx(self, v: float) -> float:
        return self.ox + (v - self.x0) / (self.x1 - self.x0) * self.pw

    def sy(self, v: float) -> float:
        return self.oy + self.ph - (v - self.y0) / (self.y1 - self.y0) * self.ph

    def clamp_point(self, vx: float, vy: float) -> tuple[float, float]:
        return (min(max(vx, self.x0), self.x1), min(max(vy, self.y0), self.y1))

    def emit(self) -> list[str]:
        spec = self.spec
        out = []
        fx, fy, fw, fh = self.frame
        out.append(
            f'<rect x="{_px(fx)}" y="{_px(fy)}" width="{_px(fw)}" height="{_px(fh)}" '
            'fill="#ffffff"/>'
        )
        out.append(
            f'<text x="{_px(fx + fw / 2)}" y="{_px(self.px_title_y)}" {FONT} '
            'font-size="13" text-anchor="middle" font-weight="bold">'
            f"{_esc(spec.title)}</text>"
        )
        out.extend(self._axes())
        # polygons first so data stays visible
        for ann in spec.annotations:
            if ann.get("kind") == "polygon":
                out.append(self._polygon(ann))
        for idx, s in enumerate(spec.series):
            out.extend(self._series(s, idx))
        for ann in spec.annotations:
            kind = ann.get("kind")
            if kind == "vline":
                out.extend(self._vline(ann))
            elif kind == "hline":
                out.extend(self._hline(ann))
            elif kind == "line":
                out.extend(self._line(ann))
            elif kind == "marker":
                out.extend(self._marker(ann))
            elif kind == "text":
                out.append(self._text(ann))
        if spec.legend != "none" and any(s.label for s in spec.series):
            out.extend(self._legend())
        return out

    def _axes(self) -> list[str]:
        out = []
        bx0, by0 = self.ox, self.oy
        bx1, by1 = self.ox + self.pw, self.oy + self.ph
        for t in _nice_ticks(self.x0, self.x1):
            px = self.sx(t)
            out.append(f'<line x1="{_px(px)}" y1="{_px(by0)}" x2="{_px(px)}" '
                       f'y2="{_px(by1)}" stroke="#e4e4e4" stroke-width="1"/>')
            out.append(f'<text x="{_px(px)}" y="{_px(by1 + 16)}" {FONT} '
                       f'font-size="10" text-anchor="middle">{_esc(f"{t:.6g}")}</text>')
        if self.spec.kind == "info-rank":
            for i, name in enumerate(self.spec.categories):
                py = self.sy(float(i))
                out.append(f'<text x="{_px(bx0 - 6)}" y="{_px(py + 3)}" {FONT} '
                           f'font-size="10" text-anchor="end">{_esc(name)}</text>')
        else:
            for t in _nice_ticks(self.y0, self.y1):
                py = self.sy(t)
                out.append(f'<line x1="{_px(bx0)}" y1="{_px(py)}" x2="{_px(bx1)}" '
                           f'y2="{_px(py)}" stroke="#e4e4e4" stroke-width="1"/>')
                out.append(f'<text x="{_px(bx0 - 6)}" y="{_px(py + 3)}" {FONT} '
                           f'font-size="10" text-anchor="end">{_esc(f"{t:.6g}")}</text>')
        out.append(f'<rect x="{_px(bx0)}" y="{_px(by0)}" width="{_px(self.pw)}" '
                   f'height="{_px(self.ph)}" fill="none" stroke="#333333" '
                   'stroke-width="1"/>')
        out.append(f'<text x="{_px(bx0 + self.pw / 2)}" y="{_px(by1 + 34)}" {FONT} '
                   f'font-size="11" text-anchor="middle">'
                   f"{_esc(self.spec.axes.x_title)}</text>")
        if self.spec.axes.y_title:
            cx = self.frame[0] + 14
            cy = by0 + self.ph / 2
            out.append(f'<text x="{_px(cx)}" y="{_px(cy)}" {FONT} font-size="11" '
                       f'text-anchor="middle" transform="rotate(-90 {_px(cx)} '
                       f'{_px(cy)})">{_esc(self.spec.axes.y_title)}</text>')
        return out

    def _series(self, s: Series, idx: int) -> list[str]:
        out = []
        if s.kind == "points":
            for vx, vy in zip(s.x, s.y):
                out.append(f'<circle cx="{_px(self.sx(vx))}" cy="{_px(self.sy(vy))}" '
                           f'r="2.2" fill="{s.color}" fill-opacity="0.55"/>')
        elif s.kind in ("line", "step"):
            pts = []
            prev = None
            for vx, vy in zip(s.x, s.y):
                if s.kind == "step" and prev is not None:
                    pts.append(f"{_px(self.sx(vx))},{_px(self.sy(prev))}")
                pts.append(f"{_px(self.sx(vx))},{_px(self.sy(vy))}")
                prev = vy
            out.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                       f'stroke="{s.color}" stroke-width="1.6"/>')
        elif s.kind == "area":
            pts = [f"{_px(self.sx(vx))},{_px(self.sy(vy))}"
                   for vx, vy in zip(s.x, s.y)]
            base_y = min(max(0.0, self.y0), self.y1)
            pts.append(f"{_px(self.sx(s.x[-1]))},{_px(self.sy(base_y))}")
            pts.append(f"{_px(self.sx(s.x[0]))},{_px(self.sy(base_y))}")
            out.append(f'<polygon points="{" ".join(pts)}" fill="{s.color}" '
                       'fill-opacity="0.25" stroke="none"/>')
        elif s.kind == "segments":
            for i in range(0, len(s.x) - 1, 2):
                out.append(f'<line x1="{_px(self.sx(s.x[i]))}" '
                           f'y1="{_px(self.sy(s.y[i]))}" '
                           f'x2="{_px(self.sx(s.x[i + 1]))}" '
                           f'y2="{_px(self.sy(s.y[i + 1]))}" '
                           f'stroke="{s.color}" stroke-width="1.2"/>')
        elif s.kind == "bars":
            zero = self.sx(max(0.0, self.x0))
            for vx, vy in zip(s.x, s.y):
                py = self.sy(vy)
                out.append(f'<rect x="{_px(zero)}" y="{_px(py - 7)}" '
                           f'width="{_px(max(0.0, self.sx(vx) - zero))}" '
                           f'height="14.00" fill="{s.color}" fill-opacity="0.8"/>')
        return out

    def _polygon(self, ann: dict) -> str:
        pts = " ".join(
            f"{_px(self.sx(px))},{_px(self.sy(py))}" for px, py in ann["xy"]
        )
        return (f'<polygon points="{pts}" fill="#bdbdbd" fill-opacity="0.3" '
                'stroke="none"/>')

    def _vline(self, ann: dict) -> list[str]:
        px = self.sx(float(ann["x"]))
        out = [f'<line x1="{_px(px)}" y1="{_px(self.oy)}" x2="{_px(px)}" '
               f'y2="{_px(self.oy + self.ph)}" stroke="#555555" '
               'stroke-width="1" stroke-dasharray="4,3"/>']
        if ann.get("label"):
            out.append(f'<text x="{_px(px + 3)}" y="{_px(self.oy + 12)}" {FONT} '
                       f'font-size="10">{_esc(ann["label"])}</text>')
        return out

    def _hline(self, ann: dict) -> list[str]:
        py = self.sy(float(ann["y"]))
        return [f'<line x1="{_px(self.ox)}" y1="{_px(py)}" '
                f'x2="{_px(self.ox + self.pw)}" y2="{_px(py)}" '
                'stroke="#555555" stroke-width="1" stroke-dasharray="4,3"/>']

    def _line(self, ann: dict) -> list[str]:
        (ax, ay) = self.clamp_point(float(ann["x1"]), float(ann["y1"]))
        (bx, by) = self.clamp_point(float(ann["x2"]), float(ann["y2"]))
        out = [f'<line x1="{_px(self.sx(ax))}" y1="{_px(self.sy(ay))}" '
               f'x2="{_px(self.sx(bx))}" y2="{_px(self.sy(by))}" '
               'stroke="#777777" stroke-width="1.2"/>']
        if ann.get("label"):
            out.append(f'<text x="{_px(self.ox + 4)}" '
                       f'y="{_px(self.oy + self.ph - 6)}" {FONT} font-size="10">'
                       f'{_esc(ann["label"])}</text>')
        return out

    def _marker(self, ann: dict) -> list[str]:
        px, py = self.sx(float(ann["x"])), self.sy(float(ann["y"]))
        out = [f'<circle cx="{_px(px)}" cy="{_px(py)}" r="4.0" fill="#d62d20" '
               'stroke="#7a1410" stroke-width="1"/>']
        if ann.get("label"):
            out.append(f'<text x="{_px(self.ox + self.pw - 4)}" '
                       f'y="{_px(self.oy + 14)}" {FONT} font-size="11" '
                       f'text-anchor="end">{_esc(ann["label"])}</text>')
        return out

    def _text(self, ann: dict) -> str:
        return (f'<text x="{_px(self.sx(float(ann["x"])))}" '
                f'y="{_px(self.sy(float(ann["y"])))}" {FONT} font-size="10">'
                f'{_esc(ann["text"])}</text>')

    def _legend(self) -> list[str]:
        rows = [s for s in self.spec.series if s.label]
        width = max(len(s.label) for s in rows) * 6.2 + 30
        height = 16.0 * len(rows) + 8
        pos = self.spec.legend
        lx = self.ox + 8 if "left" in pos else self.ox + self.pw - width - 8
        ly = self.oy + 8 if "top" in pos else self.oy + self.ph - height - 8
        out = [f'<rect x="{_px(lx)}" y="{_px(ly)}" width="{_px(width)}" '
               f'height="{_px(height)}" fill="#ffffff" fill-opacity="0.85" '
               'stroke="#999999" stroke-width="0.8"/>']
        for i, s in enumerate(rows):
            ry = ly + 14 + 16.0 * i
            out.append(f'<line x1="{_px(lx + 6)}" y1="{_px(ry - 4)}" '
                       f'x2="{_px(lx + 22)}" y2="{_px(ry - 4)}" '
                       f'stroke="{s.color}" stroke-width="2"/>')
            out.append(f'<text x="{_px(lx + 26)}" y="{_px(ry)}" {FONT} '
                       f'font-size="10">{_esc(s.label)}</text>')
        return out


def render_svg(spec: PlotSpec, width: int = 640, height: int = 480) -> str:
    """Render a spec (or a grid of specs) to a standalone SVG document."""
    body: list[str] = []
    if spec.kind == "grid":
        n = len(spec.children)
        cols = 2 if n > 1 else 1
        rows = (n + cols - 1) // cols
        width, height = 640 * cols, 480 * rows
        for i, child in enumerate(spec.children):
            cx = (i % cols) * 640.0
            cy = (i // cols) * 480.0
            body.extend(_Panel(child, cx, cy, 640.0, 480.0).emit())
    else:
        body.extend(_Panel(spec, 0.0, 0.0, float(width), float(height)).emit())
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"
