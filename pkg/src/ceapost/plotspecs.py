"""Declarative, renderer-independent figure descriptions.

Each builder is a pure function from computed statistics to a PlotSpec: a
JSON-serialisable bundle of data series, axis ranges and annotations. The
SVG renderer (and the browser explorer) map specs to graphics primitives
without recomputing any statistic.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import Analysis, fmt_value
from .errors import ValidationError
from .extensions import MixedStrategy, MultiCeResult, RiskAversionSet
from .frontier import efficiency_frontier
from .kde import hdr_thresholds, kde_1d, kde_2d, marching_squares

PALETTE = (
    "#1b6ca8", "#d62d20", "#0a7f46", "#8437ba",
    "#e07b00", "#00726d", "#aa3355", "#5c5c5c",
)

DEFAULT_CONTOUR_LEVELS = (0.5, 0.75, 0.95)


def color_for(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


@dataclass(frozen=True)
class Series:
    kind: str            # points | line | step | area | segments | bars
    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    color: str


@dataclass(frozen=True)
class Axes:
    x_title: str
    y_title: str
    x_range: tuple[float, float]
    y_range: tuple[float, float]


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    title: str
    series: tuple[Series, ...]
    axes: Axes
    annotations: tuple[dict, ...] = ()
    legend: str = "top-right"    # top-left | top-right | bottom-left | bottom-right | none
    categories: tuple[str, ...] = ()
    children: tuple["PlotSpec", ...] = ()

    def to_dict(self) -> dict:
        return asdict(self)


def validate_spec(spec: PlotSpec) -> None:
    """Check the declarative invariants of a built spec."""
    if spec.kind == "grid":
        for child in spec.children:
            validate_spec(child)
        return
    labels = [s.label for s in spec.series if s.label]
    if len(labels) != len(set(labels)):
        raise ValidationError(f"{spec.kind}: series labels are not unique")
    (x0, x1), (y0, y1) = spec.axes.x_range, spec.axes.y_range
    if not (x0 < x1 and y0 < y1):
        raise ValidationError(f"{spec.kind}: empty axis range")
    for s in spec.series:
        xs = np.asarray(s.x)
        ys = np.asarray(s.y)
        if xs.size and not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise ValidationError(f"{spec.kind}: non-finite datum in series {s.label!r}")
        eps_x = 1e-9 * max(1.0, abs(x0), abs(x1))
        eps_y = 1e-9 * max(1.0, abs(y0), abs(y1))
        if xs.size and (xs.min() < x0 - eps_x or xs.max() > x1 + eps_x):
            raise ValidationError(f"{spec.kind}: series {s.label!r} outside x range")
        if ys.size and (ys.min() < y0 - eps_y or ys.max() > y1 + eps_y):
            raise ValidationError(f"{spec.kind}: series {s.label!r} outside y range")


def _padded(lo: float, hi: float, frac: float = 0.05) -> tuple[float, float]:
    if hi <= lo:
        span = max(abs(lo), 1.0)
        return lo - 0.05 * span, lo + 0.05 * span
    pad = frac * (hi - lo)
    return float(lo - pad), float(hi + pad)


def _range_of(*arrays, include=()) -> tuple[float, float]:
    values = [np.asarray(a, dtype=float).ravel() for a in arrays if np.size(a)]
    lo = min((float(v.min()) for v in values), default=0.0)
    hi = max((float(v.max()) for v in values), default=1.0)
    for v in include:
        lo = min(lo, float(v))
        hi = max(hi, float(v))
    return _padded(lo, hi)


def _clip_below_line(x_range, y_range, slope: float) -> list[list[float]]:
    """Bounding-box polygon clipped to the half-plane y <= slope * x."""
    (x0, x1), (y0, y1) = x_range, y_range
    box = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    out: list[tuple[float, float]] = []
    for (ax, ay), (bx, by) in zip(box, box[1:] + box[:1]):
        a_in = ay - slope * ax <= 0
        b_in = by - slope * bx <= 0
        if a_in:
            out.append((ax, ay))
        if a_in != b_in:
            # intersection with y = slope * x
            denom = (by - ay) - slope * (bx - ax)
            t = (slope * ax - ay) / denom if denom else 0.0
            out.append((ax + t * (bx - ax), ay + t * (by - ay)))
    return [[float(px), float(py)] for px, py in out]


def _comparison_slots(analysis: Analysis, comparison: Optional[int]) -> list[int]:
    if comparison is None:
        return list(range(len(analysis.comparisons)))
    if comparison not in analysis.comparisons:
        raise ValidationError(
            f"arm {comparison} is not a configured comparison {analysis.comparisons}"
        )
    return [analysis.comparisons.index(comparison)]


# ---------------------------------------------------------------------------
# Cost-effectiveness plane and relatives
# ---------------------------------------------------------------------------

def ceplane_spec(
    analysis: Analysis,
    comparison: Optional[int] = None,
    k: float = 0.0,
    legend: str = "top-left",
) -> PlotSpec:
    """Scatter of per-simulation effect/cost increments per comparison.

    With a single comparison the mean point is marked and labelled with the
    ICER; the shaded polygon is the sustainability area below the line
    delta_c = k * delta_e for the chosen willingness to pay.
    """
    slots = _comparison_slots(analysis, comparison)
    de = analysis.delta_e[:, slots]
    dc = analysis.delta_c[:, slots]
    x_range = _range_of(de, include=(0.0,))
    y_range = _range_of(dc, include=(0.0,))
    series = tuple(
        Series(
            kind="points",
            label=analysis.comparison_label(j),
            x=tuple(analysis.delta_e[:, j].tolist()),
            y=tuple(analysis.delta_c[:, j].tolist()),
            color=color_for(analysis.comparisons[j]),
        )
        for j in slots
    )
    annotations: list[dict] = [
        {"kind": "polygon", "xy": _clip_below_line(x_range, y_range, float(k)),
         "label": "sustainability area"},
        {"kind": "line", "x1": x_range[0], "y1": float(k) * x_range[0],
         "x2": x_range[1], "y2": float(k) * x_range[1],
         "label": f"k = {fmt_value(k)}"},
    ]
    if len(slots) == 1:
        j = slots[0]
        icer_label = (
            f"ICER {fmt_value(float(analysis.icer[j]))}"
            if analysis.icer_defined[j] else "ICER undefined"
        )
        annotations.append({
            "kind": "marker",
            "x": float(analysis.delta_e[:, j].mean()),
            "y": float(analysis.delta_c[:, j].mean()),
            "label": icer_label,
        })
    return _built(PlotSpec(
        kind="ceplane",
        title="Cost-effectiveness plane",
        series=series,
        axes=Axes("Effectiveness differential", "Cost differential",
                  x_range, y_range),
        annotations=tuple(annotations),
        legend=legend,
    ))


def contour_spec(
    analysis: Analysis,
    comparison: Optional[int] = None,
    levels: Sequence[float] = DEFAULT_CONTOUR_LEVELS,
    legend: str = "top-left",
) -> PlotSpec:
    """Density contours over the cost-effectiveness plane scatter.

    Contour lines trace highest-density regions of a 2-D kernel estimate.
    A degenerate (zero-variance) cloud falls back to the plain scatter.
    """
    slots = _comparison_slots(analysis, comparison if comparison is not None
                              else analysis.comparisons[0])
    j = slots[0]
    de = analysis.delta_e[:, j]
    dc = analysis.delta_c[:, j]
    series = [Series(
        kind="points",
        label=analysis.comparison_label(j),
        x=tuple(de.tolist()),
        y=tuple(dc.tolist()),
        color=color_for(analysis.comparisons[j]),
    )]
    annotations: list[dict] = []
    degenerate = float(de.std(ddof=1)) <= 0 or float(dc.std(ddof=1)) <= 0
    if degenerate:
        annotations.append({"kind": "note",
                            "text": "density unavailable (degenerate scatter)"})
        x_range = _range_of(de, include=(0.0,))
        y_range = _range_of(dc, include=(0.0,))
    else:
        gx, gy, Z = kde_2d(de, dc)
        cell = (gx[1] - gx[0]) * (gy[1] - gy[0])
        thresholds = hdr_thresholds(Z, cell, levels)
        for li, (p, thr) in enumerate(zip(levels, thresholds)):
            segs = marching_squares(gx, gy, Z, thr)
            xs: list[float] = []
            ys: list[float] = []
            for sx1, sy1, sx2, sy2 in segs:
                xs.extend((sx1, sx2))
                ys.extend((sy1, sy2))
            series.append(Series(
                kind="segments",
                label=f"{p:.0%} region",
                x=tuple(xs),
                y=tuple(ys),
                color=color_for(li + 1),
            ))
        x_range = _range_of(de, *[s.x for s in series[1:]], include=(0.0,))
        y_range = _range_of(dc, *[s.y for s in series[1:]], include=(0.0,))
    return _built(PlotSpec(
        kind="contour",
        title="Cost-effectiveness plane density",
        series=tuple(series),
        axes=Axes("Effectiveness differential", "Cost differential",
                  x_range, y_range),
        annotations=tuple(annotations),
        legend=legend,
    ))


def contour2_spec(
    analysis: Analysis,
    comparison: Optional[int] = None,
    k: float = 0.0,
    levels: Sequence[float] = DEFAULT_CONTOUR_LEVELS,
    legend: str = "top-left",
) -> PlotSpec:
    """Contour plot plus quadrant probabilities and the willingness-to-pay line."""
    base = contour_spec(analysis, comparison, levels, legend)
    slots = _comparison_slots(analysis, comparison if comparison is not None
                              else analysis.comparisons[0])
    j = slots[0]
    de = analysis.delta_e[:, j]
    dc = analysis.delta_c[:, j]
    n = de.size
    quadrants = {
        "NE": float(((de > 0) & (dc > 0)).sum() / n),
        "NW": float(((de <= 0) & (dc > 0)).sum() / n),
        "SW": float(((de <= 0) & (dc <= 0)).sum() / n),
        "SE": float(((de > 0) & (dc <= 0)).sum() / n),
    }
    (x0, x1), (y0, y1) = base.axes.x_range, base.axes.y_range
    positions = {
        "NE": (x0 + 0.88 * (x1 - x0), y0 + 0.94 * (y1 - y0)),
        "NW": (x0 + 0.06 * (x1 - x0), y0 + 0.94 * (y1 - y0)),
        "SW": (x0 + 0.06 * (x1 - x0), y0 + 0.04 * (y1 - y0)),
        "SE": (x0 + 0.88 * (x1 - x0), y0 + 0.04 * (y1 - y0)),
    }
    annotations = list(base.annotations)
    annotations.append({"kind": "quadrants", "proportions": quadrants})
    for name, p in quadrants.items():
        px, py = positions[name]
        annotations.append({"kind": "text", "x": px, "y": py,
                            "text": f"{name} {p:.3f}"})
    annotations.append({
        "kind": "line", "x1": x0, "y1": float(k) * x0,
        "x2": x1, "y2": float(k) * x1, "label": f"k = {fmt_value(k)}",
    })
    return _built(PlotSpec(
        kind="contour2",
        title=base.title,
        series=base.series,
        axes=base.axes,
        annotations=tuple(annotations),
        legend=legend,
    ))


def ceef_spec(analysis: Analysis, legend: str = "top-left") -> PlotSpec:
    """Efficiency frontier over per-arm mean effectiveness and mean cost."""
    mean_e = analysis.dataset.effects.mean(axis=0)
    mean_c = analysis.dataset.costs.mean(axis=0)
    result = efficiency_frontier(mean_e, mean_c)
    labels = analysis.dataset.labels
    series = [Series(
        kind="line",
        label="frontier",
        x=tuple(float(mean_e[i]) for i in result.frontier),
        y=tuple(float(mean_c[i]) for i in result.frontier),
        color=PALETTE[0],
    )]
    for t in range(analysis.n_int):
        series.append(Series(
            kind="points", label=labels[t],
            x=(float(mean_e[t]),), y=(float(mean_c[t]),),
            color=color_for(t),
        ))
    annotations: list[dict] = [{
        "kind": "frontier",
        "arms": [t + 1 for t in result.frontier],
        "icers": list(result.icers),
    }]
    for t in result.dominated:
        annotations.append({"kind": "text", "x": float(mean_e[t]),
                            "y": float(mean_c[t]), "text": "dominated"})
    for t in result.extended_dominated:
        annotations.append({"kind": "text", "x": float(mean_e[t]),
                            "y": float(mean_c[t]), "text": "ext. dominated"})
    return _built(PlotSpec(
        kind="ceef",
        title="Cost-effectiveness efficiency frontier",
        series=tuple(series),
        axes=Axes("Mean effectiveness", "Mean cost",
                  _range_of(mean_e), _range_of(mean_c)),
        annotations=tuple(annotations),
        legend=legend,
    ))


# ---------------------------------------------------------------------------
# Curves over the willingness-to-pay grid
# ---------------------------------------------------------------------------

def ceac_spec(
    source: Union[Analysis, MultiCeResult], legend: str = "bottom-right"
) -> PlotSpec:
    """Acceptability curves: pairwise per comparison, or simultaneous.

    For a MultiCeResult the curves are the probabilities of each included
    arm being optimal; they sum to one at every grid point.
    """
    if isinstance(source, MultiCeResult):
        analysis = source.analysis
        series = tuple(
            Series(
                kind="line", label=source.labels[pos],
                x=tuple(analysis.grid.values.tolist()),
                y=tuple(source.p_best[:, pos].tolist()),
                color=color_for(source.included[pos]),
            )
            for pos in range(len(source.included))
        )
        title = "Probability each intervention is optimal"
    else:
        analysis = source
        series = tuple(
            Series(
                kind="line", label=analysis.comparison_label(j),
                x=tuple(analysis.grid.values.tolist()),
                y=tuple(analysis.ceac[:, j].tolist()),
                color=color_for(analysis.comparisons[j]),
            )
            for j in range(len(analysis.comparisons))
        )
        title = "Cost-effectiveness acceptability curve"
    return _built(PlotSpec(
        kind="ceac",
        title=title,
        series=series,
        axes=Axes("Willingness to pay", "Probability cost-effective",
                  (0.0, analysis.kmax), (0.0, 1.0)),
        legend=legend,
    ))


def ceaf_spec(result: MultiCeResult, legend: str = "bottom-right") -> PlotSpec:
    """Acceptability frontier: probability curve of the optimal arm."""
    analysis = result.analysis
    series = (Series(
        kind="step", label="frontier",
        x=tuple(analysis.grid.values.tolist()),
        y=tuple(result.ceaf.tolist()),
        color=PALETTE[0],
    ),)
    return _built(PlotSpec(
        kind="ceaf",
        title="Cost-effectiveness acceptability frontier",
        series=series,
        axes=Axes("Willingness to pay", "Probability cost-effective",
                  (0.0, analysis.kmax), (0.0, 1.0)),
        legend=legend,
    ))


def eib_spec(
    source: Union[Analysis, RiskAversionSet], legend: str = "bottom-right"
) -> PlotSpec:
    """Expected incremental benefit lines with break-even markers.

    A RiskAversionSet draws one line per aversion coefficient instead
    (first comparison), showing the departure from linearity.
    """
    if isinstance(source, RiskAversionSet):
        analysis = source.analysis
        series = tuple(
            Series(
                kind="line", label=f"r = {fmt_value(o.r)}",
                x=tuple(analysis.grid.values.tolist()),
                y=tuple(o.eib[:, 0].tolist()),
                color=color_for(i),
            )
            for i, o in enumerate(source.overlays)
        )
        title = "Expected incremental benefit under risk aversion"
        ys = [o.eib[:, 0] for o in source.overlays]
    else:
        analysis = source
        series = tuple(
            Series(
                kind="line", label=analysis.comparison_label(j),
                x=tuple(analysis.grid.values.tolist()),
                y=tuple(analysis.eib[:, j].tolist()),
                color=color_for(analysis.comparisons[j]),
            )
            for j in range(len(analysis.comparisons))
        )
        title = "Expected incremental benefit"
        ys = [analysis.eib[:, j] for j in range(len(analysis.comparisons))]
    annotations: list[dict] = [{"kind": "hline", "y": 0.0}]
    if not isinstance(source, RiskAversionSet):
        # break-even markers describe the risk-neutral decision only
        for v in analysis.kstar:
            annotations.append({"kind": "vline", "x": float(v),
                                "label": f"k* = {fmt_value(v)}"})
    return _built(PlotSpec(
        kind="eib",
        title=title,
        series=series,
        axes=Axes("Willingness to pay", "Expected incremental benefit",
                  (0.0, analysis.kmax), _range_of(*ys, include=(0.0,))),
        annotations=tuple(annotations),
        legend=legend,
    ))


def evi_spec(
    source: Union[Analysis, MixedStrategy, RiskAversionSet],
    legend: str = "top-left",
) -> PlotSpec:
    """Expected value of information curve, with optional overlays.

    A MixedStrategy adds the market-share mixture curve (never below the
    optimal-strategy curve); a RiskAversionSet draws one curve per r.
    """
    if isinstance(source, MixedStrategy):
        analysis = source.analysis
        series = (
            Series(kind="line", label="optimal strategy",
                   x=tuple(analysis.grid.values.tolist()),
                   y=tuple(analysis.evi.tolist()), color=PALETTE[0]),
            Series(kind="line",
                   label="mixed strategy "
                         f"({', '.join(fmt_value(q, 3) for q in source.shares)})",
                   x=tuple(analysis.grid.values.tolist()),
                   y=tuple(source.evi.tolist()), color=PALETTE[1]),
        )
        ys = [analysis.evi, source.evi]
        title = "Expected value of perfect information: mixed strategy"
    elif isinstance(source, RiskAversionSet):
        analysis = source.analysis
        series = tuple(
            Series(kind="line", label=f"r = {fmt_value(o.r)}",
                   x=tuple(analysis.grid.values.tolist()),
                   y=tuple(o.evi.tolist()), color=color_for(i))
            for i, o in enumerate(source.overlays)
        )
        ys = [o.evi for o in source.overlays]
        title = "Expected value of perfect information under risk aversion"
    else:
        analysis = source
        series = (Series(
            kind="line", label="EVPI",
            x=tuple(analysis.grid.values.tolist()),
            y=tuple(analysis.evi.tolist()), color=PALETTE[0]),
        )
        ys = [analysis.evi]
        title = "Expected value of perfect information"
    return _built(PlotSpec(
        kind="evi",
        title=title,
        series=series,
        axes=Axes("Willingness to pay", "Expected value of information",
                  (0.0, analysis.kmax), _range_of(*ys, include=(0.0,))),
        legend=legend,
    ))


def riskav_plots(source: RiskAversionSet) -> tuple[PlotSpec, PlotSpec]:
    """The standard pair of risk-aversion figures: EIB and EVPI per r."""
    return eib_spec(source), evi_spec(source)


def ib_density_spec(
    analysis: Analysis,
    comparison: Optional[int] = None,
    k: float = 0.0,
    legend: str = "top-left",
) -> PlotSpec:
    """Kernel density of the incremental benefit distribution at one k.

    The positive region (reference cost-effective) is shaded and the zero
    line marked.
    """
    slots = _comparison_slots(analysis, comparison if comparison is not None
                              else analysis.comparisons[0])
    j = slots[0]
    ki = analysis.grid.nearest_index(k)
    sample = analysis.ib[:, ki, j]
    if float(sample.std(ddof=1)) <= 0:
        # degenerate distribution: a single spike
        v = float(sample[0])
        x_range = _padded(min(v, 0.0) - 1.0, max(v, 0.0) + 1.0)
        series = (Series(kind="segments", label="IB density",
                         x=(v, v), y=(0.0, 1.0), color=PALETTE[0]),)
        annotations = [{"kind": "vline", "x": 0.0},
                       {"kind": "note", "text": "degenerate distribution"}]
        y_range = (0.0, 1.05)
    else:
        grid, density = kde_1d(sample)
        pos = grid >= 0
        series = [Series(
            kind="line", label="IB density",
            x=tuple(grid.tolist()), y=tuple(density.tolist()),
            color=PALETTE[0],
        )]
        if pos.any():
            series.append(Series(
                kind="area", label="IB > 0",
                x=tuple(grid[pos].tolist()), y=tuple(density[pos].tolist()),
                color=PALETTE[2],
            ))
        series = tuple(series)
        annotations = [{"kind": "vline", "x": 0.0}]
        x_range = _range_of(grid, include=(0.0,))
        y_range = (0.0, float(_padded(0.0, float(density.max()))[1]))
    return _built(PlotSpec(
        kind="ib-density",
        title=f"Incremental benefit distribution, {analysis.comparison_label(j)} "
              f"at k = {fmt_value(float(analysis.grid.values[ki]))}",
        series=series,
        axes=Axes("Incremental benefit", "Density", x_range, y_range),
        annotations=tuple(annotations),
        legend=legend,
    ))


def info_rank_spec(
    ranked: Sequence[tuple[str, float]], k: float, legend: str = "none"
) -> PlotSpec:
    """Horizontal bars of single-parameter EVPPI shares of the EVPI at k."""
    if not ranked:
        raise ValidationError("nothing to rank")
    names = tuple(name for name, _ in ranked)
    props = tuple(float(p) for _, p in ranked)
    return _built(PlotSpec(
        kind="info-rank",
        title=f"Information value per parameter at k = {fmt_value(k)}",
        series=(Series(
            kind="bars", label="share of EVPI",
            x=props, y=tuple(float(i) for i in range(len(props))),
            color=PALETTE[0],
        ),),
        axes=Axes("Proportion of total EVPI", "",
                  (0.0, max(1.0, max(props) * 1.05)),
                  (-0.5, len(props) - 0.5)),
        legend=legend,
        categories=names,
    ))


def grid_spec(analysis: Analysis, k: Optional[float] = None) -> PlotSpec:
    """Two-by-two panel: plane, EIB, CEAC and EVPI, sharing one analysis."""
    if k is None:
        k = float(analysis.grid.values[analysis.n_k // 2])
    return PlotSpec(
        kind="grid",
        title="Cost-effectiveness analysis",
        series=(),
        axes=Axes("", "", (0.0, 1.0), (0.0, 1.0)),
        children=(
            ceplane_spec(analysis, k=k),
            eib_spec(analysis),
            ceac_spec(analysis),
            evi_spec(analysis),
        ),
    )


def _built(spec: PlotSpec) -> PlotSpec:
    validate_spec(spec)
    return spec
