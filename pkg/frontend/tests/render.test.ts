// The renderer is a pure spec-to-SVG mapping: golden snapshots pin the
// geometry, and identical input must give identical output.

import { describe, expect, it } from "vitest";

import { renderPlotSpec } from "../src/render.js";
import type { PlotSpec } from "../src/types.js";

const ceplaneFixture: PlotSpec = {
  kind: "ceplane",
  title: "Cost-effectiveness plane",
  series: [
    {
      kind: "points",
      label: "New vs Status quo",
      x: [1, 2, 0],
      y: [15, 25, 5],
      color: "#d62d20",
    },
  ],
  axes: {
    x_title: "Effectiveness differential",
    y_title: "Cost differential",
    x_range: [-0.1, 2.1],
    y_range: [-1.25, 26.25],
  },
  annotations: [
    {
      kind: "polygon",
      xy: [
        [-0.1, -1.25],
        [2.1, -1.25],
        [2.1, 26.25],
        [1.75, 26.25],
        [-0.0833, -1.25],
      ],
      label: "sustainability area",
    },
    { kind: "line", x1: -0.1, y1: -1.5, x2: 2.1, y2: 31.5, label: "k = 15" },
    { kind: "marker", x: 1, y: 15, label: "ICER 15" },
  ],
  legend: "top-left",
  categories: [],
  children: [],
};

const curveFixture: PlotSpec = {
  kind: "eib",
  title: "Expected incremental benefit",
  series: [
    {
      kind: "line",
      label: "New vs Status quo",
      x: [0, 5, 10, 15, 20, 25, 30],
      y: [-15, -10, -5, 0, 5, 10, 15],
      color: "#1b6ca8",
    },
  ],
  axes: {
    x_title: "Willingness to pay",
    y_title: "Expected incremental benefit",
    x_range: [0, 30],
    y_range: [-16.5, 16.5],
  },
  annotations: [
    { kind: "hline", y: 0 },
    { kind: "vline", x: 15, label: "k* = 15" },
  ],
  legend: "bottom-right",
  categories: [],
  children: [],
};

describe("renderPlotSpec", () => {
  it("matches the ceplane golden snapshot", () => {
    expect(renderPlotSpec(ceplaneFixture)).toMatchSnapshot();
  });

  it("matches the eib golden snapshot", () => {
    expect(renderPlotSpec(curveFixture)).toMatchSnapshot();
  });

  it("is deterministic", () => {
    expect(renderPlotSpec(ceplaneFixture)).toBe(renderPlotSpec(ceplaneFixture));
  });

  it("renders grids of children side by side", () => {
    const grid: PlotSpec = {
      ...curveFixture,
      kind: "grid",
      series: [],
      annotations: [],
      children: [curveFixture, ceplaneFixture, curveFixture, ceplaneFixture],
    };
    const svg = renderPlotSpec(grid);
    expect(svg).toContain('width="1280"');
    expect(svg).toContain('height="960"');
  });

  it("escapes text content", () => {
    const spec = { ...curveFixture, title: 'a<b & "c"' };
    expect(renderPlotSpec(spec)).toContain("a&lt;b &amp; &quot;c&quot;");
  });

  it("draws every series datum it is given and nothing else", () => {
    const svg = renderPlotSpec(ceplaneFixture);
    const circles = svg.match(/<circle/g) ?? [];
    // 3 data points + 1 ICER marker
    expect(circles.length).toBe(4);
  });
});
