// Pure mapping from PlotSpec JSON to SVG markup. Only linear coordinate
// transforms happen here; every plotted number comes from the spec. The
// geometry (margins, tick placement, series shapes) mirrors the server-side
// renderer so the two draw the same picture.

import type { PlotSeries, PlotSpec } from "./types.js";

const MARGIN_LEFT = 64;
const MARGIN_RIGHT = 16;
const MARGIN_TOP = 36;
const MARGIN_BOTTOM = 46;
const FONT = 'font-family="Helvetica, Arial, sans-serif"';

function esc(text: unknown): string {
  return String(text)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

function fmt(v: number): string {
  return String(Number(v.toPrecision(6)));
}

function niceTicks(lo: number, hi: number, target = 5): number[] {
  const span = hi - lo;
  if (span <= 0 || !Number.isFinite(span)) return [lo];
  const raw = span / Math.max(1, target - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = 10 * mag;
  for (const mult of [1, 2, 2.5, 5, 10]) {
    if (raw <= mult * mag) {
      step = mult * mag;
      break;
    }
  }
  const ticks: number[] = [];
  let t = Math.ceil(lo / step) * step;
  while (t <= hi + 1e-9 * span) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
    t += step;
  }
  return ticks;
}

class Panel {
  private ox: number;
  private oy: number;
  private pw: number;
  private ph: number;
  private x0: number;
  private x1: number;
  private y0: number;
  private y1: number;

  constructor(
    private spec: PlotSpec,
    private fx: number,
    private fy: number,
    private fw: number,
    private fh: number,
  ) {
    this.ox = fx + MARGIN_LEFT;
    this.oy = fy + MARGIN_TOP;
    this.pw = fw - MARGIN_LEFT - MARGIN_RIGHT;
    this.ph = fh - MARGIN_TOP - MARGIN_BOTTOM;
    [this.x0, this.x1] = spec.axes.x_range;
    [this.y0, this.y1] = spec.axes.y_range;
  }

  private sx(v: number): number {
    return this.ox + ((v - this.x0) / (this.x1 - this.x0)) * this.pw;
  }

  private sy(v: number): number {
    return this.oy + this.ph - ((v - this.y0) / (this.y1 - this.y0)) * this.ph;
  }

  private clampX(v: number): number {
    return Math.min(Math.max(v, this.x0), this.x1);
  }

  private clampY(v: number): number {
    return Math.min(Math.max(v, this.y0), this.y1);
  }

  emit(): string[] {
    const out: string[] = [];
    out.push(
      `<rect x="${px(this.fx)}" y="${px(this.fy)}" width="${px(this.fw)}" ` +
        `height="${px(this.fh)}" fill="#ffffff"/>`,
    );
    out.push(
      `<text x="${px(this.fx + this.fw / 2)}" y="${px(this.fy + 18)}" ${FONT} ` +
        `font-size="13" text-anchor="middle" font-weight="bold">` +
        `${esc(this.spec.title)}</text>`,
    );
    out.push(...this.axes());
    for (const ann of this.spec.annotations) {
      if (ann.kind === "polygon") out.push(this.polygon(ann));
    }
    for (const series of this.spec.series) {
      out.push(...this.series(series));
    }
    for (const ann of this.spec.annotations) {
      switch (ann.kind) {
        case "vline":
          out.push(...this.vline(ann));
          break;
        case "hline":
          out.push(...this.hline(ann));
          break;
        case "line":
          out.push(...this.line(ann));
          break;
        case "marker":
          out.push(...this.marker(ann));
          break;
        case "text":
          out.push(this.text(ann));
          break;
      }
    }
    if (this.spec.legend !== "none" && this.spec.series.some((s) => s.label)) {
      out.push(...this.legend());
    }
    return out;
  }

  private axes(): string[] {
    const out: string[] = [];
    const bx0 = this.ox;
    const by0 = this.oy;
    const bx1 = this.ox + this.pw;
    const by1 = this.oy + this.ph;
    for (const t of niceTicks(this.x0, this.x1)) {
      const x = this.sx(t);
      out.push(
        `<line x1="${px(x)}" y1="${px(by0)}" x2="${px(x)}" y2="${px(by1)}" ` +
          `stroke="#e4e4e4" stroke-width="1"/>`,
      );
      out.push(
        `<text x="${px(x)}" y="${px(by1 + 16)}" ${FONT} font-size="10" ` +
          `text-anchor="middle">${esc(fmt(t))}</text>`,
      );
    }
    if (this.spec.kind === "info-rank") {
      this.spec.categories.forEach((name, i) => {
        const y = this.sy(i);
        out.push(
          `<text x="${px(bx0 - 6)}" y="${px(y + 3)}" ${FONT} font-size="10" ` +
            `text-anchor="end">${esc(name)}</text>`,
        );
      });
    } else {
      for (const t of niceTicks(this.y0, this.y1)) {
        const y = this.sy(t);
        out.push(
          `<line x1="${px(bx0)}" y1="${px(y)}" x2="${px(bx1)}" y2="${px(y)}" ` +
            `stroke="#e4e4e4" stroke-width="1"/>`,
        );
        out.push(
          `<text x="${px(bx0 - 6)}" y="${px(y + 3)}" ${FONT} font-size="10" ` +
            `text-anchor="end">${esc(fmt(t))}</text>`,
        );
      }
    }
    out.push(
      `<rect x="${px(bx0)}" y="${px(by0)}" width="${px(this.pw)}" ` +
        `height="${px(this.ph)}" fill="none" stroke="#333333" stroke-width="1"/>`,
    );
    out.push(
      `<text x="${px(bx0 + this.pw / 2)}" y="${px(by1 + 34)}" ${FONT} ` +
        `font-size="11" text-anchor="middle">${esc(this.spec.axes.x_title)}</text>`,
    );
    if (this.spec.axes.y_title) {
      const cx = this.fx + 14;
      const cy = by0 + this.ph / 2;
      out.push(
        `<text x="${px(cx)}" y="${px(cy)}" ${FONT} font-size="11" ` +
          `text-anchor="middle" transform="rotate(-90 ${px(cx)} ${px(cy)})">` +
          `${esc(this.spec.axes.y_title)}</text>`,
      );
    }
    return out;
  }

  private series(s: PlotSeries, _idx?: number): string[] {
    const out: string[] = [];
    if (s.kind === "points") {
      for (let i = 0; i < s.x.length; i++) {
        out.push(
          `<circle cx="${px(this.sx(s.x[i]))}" cy="${px(this.sy(s.y[i]))}" ` +
            `r="2.2" fill="${s.color}" fill-opacity="0.55"/>`,
        );
      }
    } else if (s.kind === "line" || s.kind === "step") {
      const pts: string[] = [];
      let prev: number | null = null;
      for (let i = 0; i < s.x.length; i++) {
        if (s.kind === "step" && prev !== null) {
          pts.push(`${px(this.sx(s.x[i]))},${px(this.sy(prev))}`);
        }
        pts.push(`${px(this.sx(s.x[i]))},${px(this.sy(s.y[i]))}`);
        prev = s.y[i];
      }
      out.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${s.color}" ` +
          `stroke-width="1.6"/>`,
      );
    } else if (s.kind === "area") {
      const pts = s.x.map((vx, i) => `${px(this.sx(vx))},${px(this.sy(s.y[i]))}`);
      const baseY = Math.min(Math.max(0, this.y0), this.y1);
      pts.push(`${px(this.sx(s.x[s.x.length - 1]))},${px(this.sy(baseY))}`);
      pts.push(`${px(this.sx(s.x[0]))},${px(this.sy(baseY))}`);
      out.push(
        `<polygon points="${pts.join(" ")}" fill="${s.color}" ` +
          `fill-opacity="0.25" stroke="none"/>`,
      );
    } else if (s.kind === "segments") {
      for (let i = 0; i + 1 < s.x.length; i += 2) {
        out.push(
          `<line x1="${px(this.sx(s.x[i]))}" y1="${px(this.sy(s.y[i]))}" ` +
            `x2="${px(this.sx(s.x[i + 1]))}" y2="${px(this.sy(s.y[i + 1]))}" ` +
            `stroke="${s.color}" stroke-width="1.2"/>`,
        );
      }
    } else if (s.kind === "bars") {
      const zero = this.sx(Math.max(0, this.x0));
      for (let i = 0; i < s.x.length; i++) {
        const y = this.sy(s.y[i]);
        out.push(
          `<rect x="${px(zero)}" y="${px(y - 7)}" ` +
            `width="${px(Math.max(0, this.sx(s.x[i]) - zero))}" height="14.00" ` +
            `fill="${s.color}" fill-opacity="0.8"/>`,
        );
      }
    }
    return out;
  }

  private polygon(ann: Record<string, unknown>): string {
    const xy = ann.xy as [number, number][];
    const pts = xy
      .map(([vx, vy]) => `${px(this.sx(vx))},${px(this.sy(vy))}`)
      .join(" ");
    return `<polygon points="${pts}" fill="#bdbdbd" fill-opacity="0.3" stroke="none"/>`;
  }

  private vline(ann: Record<string, unknown>): string[] {
    const x = this.sx(Number(ann.x));
    const out = [
      `<line x1="${px(x)}" y1="${px(this.oy)}" x2="${px(x)}" ` +
        `y2="${px(this.oy + this.ph)}" stroke="#555555" stroke-width="1" ` +
        `stroke-dasharray="4,3"/>`,
    ];
    if (ann.label) {
      out.push(
        `<text x="${px(x + 3)}" y="${px(this.oy + 12)}" ${FONT} ` +
          `font-size="10">${esc(ann.label)}</text>`,
      );
    }
    return out;
  }

  private hline(ann: Record<string, unknown>): string[] {
    const y = this.sy(Number(ann.y));
    return [
      `<line x1="${px(this.ox)}" y1="${px(y)}" x2="${px(this.ox + this.pw)}" ` +
        `y2="${px(y)}" stroke="#555555" stroke-width="1" stroke-dasharray="4,3"/>`,
    ];
  }

  private line(ann: Record<string, unknown>): string[] {
    const ax = this.clampX(Number(ann.x1));
    const ay = this.clampY(Number(ann.y1));
    const bx = this.clampX(Number(ann.x2));
    const by = this.clampY(Number(ann.y2));
    const out = [
      `<line x1="${px(this.sx(ax))}" y1="${px(this.sy(ay))}" ` +
        `x2="${px(this.sx(bx))}" y2="${px(this.sy(by))}" stroke="#777777" ` +
        `stroke-width="1.2"/>`,
    ];
    if (ann.label) {
      out.push(
        `<text x="${px(this.ox + 4)}" y="${px(this.oy + this.ph - 6)}" ${FONT} ` +
          `font-size="10">${esc(ann.label)}</text>`,
      );
    }
    return out;
  }

  private marker(ann: Record<string, unknown>): string[] {
    const x = this.sx(Number(ann.x));
    const y = this.sy(Number(ann.y));
    const out = [
      `<circle cx="${px(x)}" cy="${px(y)}" r="4.0" fill="#d62d20" ` +
        `stroke="#7a1410" stroke-width="1"/>`,
    ];
    if (ann.label) {
      out.push(
        `<text x="${px(this.ox + this.pw - 4)}" y="${px(this.oy + 14)}" ${FONT} ` +
          `font-size="11" text-anchor="end">${esc(ann.label)}</text>`,
      );
    }
    return out;
  }

  private text(ann: Record<string, unknown>): string {
    return (
      `<text x="${px(this.sx(Number(ann.x)))}" y="${px(this.sy(Number(ann.y)))}" ` +
      `${FONT} font-size="10">${esc(ann.text)}</text>`
    );
  }

  private legend(): string[] {
    const rows = this.spec.series.filter((s) => s.label);
    const width = Math.max(...rows.map((s) => s.label.length)) * 6.2 + 30;
    const height = 16 * rows.length + 8;
    const pos = this.spec.legend;
    const lx = pos.includes("left") ? this.ox + 8 : this.ox + this.pw - width - 8;
    const ly = pos.includes("top") ? this.oy + 8 : this.oy + this.ph - height - 8;
    const out = [
      `<rect x="${px(lx)}" y="${px(ly)}" width="${px(width)}" ` +
        `height="${px(height)}" fill="#ffffff" fill-opacity="0.85" ` +
        `stroke="#999999" stroke-width="0.8"/>`,
    ];
    rows.forEach((s, i) => {
      const ry = ly + 14 + 16 * i;
      out.push(
        `<line x1="${px(lx + 6)}" y1="${px(ry - 4)}" x2="${px(lx + 22)}" ` +
          `y2="${px(ry - 4)}" stroke="${s.color}" stroke-width="2"/>`,
      );
      out.push(
        `<text x="${px(lx + 26)}" y="${px(ry)}" ${FONT} font-size="10">` +
          `${esc(s.label)}</text>`,
      );
    });
    return out;
  }
}

export function renderPlotSpec(spec: PlotSpec, width = 640, height = 480): string {
  const body: string[] = [];
  let w = width;
  let h = height;
  if (spec.kind === "grid") {
    const n = spec.children.length;
    const cols = n > 1 ? 2 : 1;
    const rows = Math.ceil(n / cols);
    w = 640 * cols;
    h = 480 * rows;
    spec.children.forEach((child, i) => {
      body.push(...new Panel(child, (i % cols) * 640, Math.floor(i / cols) * 480, 640, 480).emit());
    });
  } else {
    body.push(...new Panel(spec, 0, 0, w, h).emit());
  }
  return (
    `<?xml version="1.0" encoding="UTF-8"?>\n` +
    `<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="${w}" ` +
    `height="${h}" viewBox="0 0 ${w} ${h}">\n` +
    body.join("\n") +
    "\n</svg>\n"
  );
}
