"""Automated markdown report with embedded SVG figures."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .core import Analysis, fmt_value, sim_table, summarize
from .errors import ValidationError
from .plotspecs import (
    PlotSpec,
    ceac_spec,
    ceef_spec,
    ceplane_spec,
    contour_spec,
    contour2_spec,
    eib_spec,
    evi_spec,
    grid_spec,
    ib_density_spec,
)
from .svgrender import render_svg
from .voi import EvppiResult

DEFAULT_PLOTS = ("ceplane", "eib", "ceac", "evi")
SIM_TABLE_ROWS = 6


@dataclass(frozen=True)
class ReportDoc:
    markdown: str
    assets: tuple[str, ...]
    path: Optional[Path] = None


def _build_plot(name: str, analysis: Analysis, k: float, extensions: dict) -> PlotSpec:
    if name == "ceplane":
        return ceplane_spec(analysis, k=k)
    if name == "ceac":
        source = extensions.get("multice", analysis)
        return ceac_spec(source)
    if name == "ceaf":
        if "multice" not in extensions:
            raise ValidationError("ceaf plot needs a multi-comparison result")
        from .plotspecs import ceaf_spec
        return ceaf_spec(extensions["multice"])
    if name == "eib":
        return eib_spec(extensions.get("riskav", analysis))
    if name == "evi":
        source = extensions.get("mixed") or extensions.get("riskav") or analysis
        return evi_spec(source)
    if name == "ib-density":
        return ib_density_spec(analysis, k=k)
    if name == "contour":
        return contour_spec(analysis)
    if name == "contour2":
        return contour2_spec(analysis, k=k)
    if name == "ceef":
        return ceef_spec(analysis)
    if name == "grid":
        return grid_spec(analysis, k=k)
    raise ValidationError(f"unknown plot kind {name!r}")


def make_report(
    analysis: Analysis,
    out_dir,
    k: Optional[float] = None,
    plots: Sequence[str] = DEFAULT_PLOTS,
    extensions: Optional[dict] = None,
    evppi_result: Optional[EvppiResult] = None,
    title: str = "Cost-effectiveness analysis report",
) -> ReportDoc:
    """Assemble the report markdown and its SVG assets under out_dir.

    Section order is fixed: title, dataset description, summary block,
    figures, simulation-table excerpt, optional value-of-information
    section, configuration appendix.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    extensions = dict(extensions or {})
    if k is None:
        k = float(analysis.grid.values[analysis.n_k // 2])
    block = summarize(analysis, k)
    table = sim_table(analysis, k)

    assets: list[str] = []
    lines: list[str] = [f"# {title}", ""]

    ds = analysis.dataset
    lines += [
        "## Dataset",
        "",
        f"- simulations: {ds.n_sim}",
        f"- interventions: {ds.n_int} ({', '.join(ds.labels)})",
        f"- reference: {ds.labels[analysis.ref]}",
        f"- comparators: {', '.join(ds.labels[c] for c in analysis.comparisons)}",
        f"- willingness-to-pay grid: {analysis.grid_points} points on "
        f"[0, {fmt_value(analysis.kmax)}]",
        "",
    ]

    lines += ["## Summary", "", "```", block.render().rstrip("\n"), "```", ""]

    lines += ["## Figures", ""]
    for name in plots:
        spec = _build_plot(name, analysis, k, extensions)
        fname = f"fig_{name}.svg"
        (out / fname).write_text(render_svg(spec), encoding="utf-8")
        assets.append(fname)
        lines += [f"### {spec.title}", "", f"![{name}]({fname})", ""]

    lines += [
        f"## Simulation table (first {min(SIM_TABLE_ROWS, ds.n_sim)} of "
        f"{ds.n_sim} rows, k = {fmt_value(table.k)})",
        "",
        "```",
        table.render(head=SIM_TABLE_ROWS).rstrip("\n"),
        "```",
        "",
    ]

    if evppi_result is not None:
        lines += [
            "## Value of partial information",
            "",
            f"Parameters: {', '.join(evppi_result.params)} "
            f"(method: {evppi_result.method})",
            "",
            "| k | EVPPI | EVPI |",
            "| ---: | ---: | ---: |",
        ]
        for d in evppi_result.diagnostics:
            lines.append(
                f"| {fmt_value(d['k'])} | {fmt_value(d['clamped'])} "
                f"| {fmt_value(d['evpi'])} |"
            )
        lines.append("")

    config = {
        "ref": analysis.ref + 1,
        "comparisons": [c + 1 for c in analysis.comparisons],
        "kmax": analysis.kmax,
        "grid_points": analysis.grid_points,
        "k": float(table.k),
        "plots": list(plots),
        "extensions": sorted(extensions),
    }
    lines += [
        "## Configuration",
        "",
        "```json",
        json.dumps(config, indent=2, sort_keys=True),
        "```",
        "",
    ]

    markdown = "\n".join(lines)
    report_path = out / "report.md"
    report_path.write_text(markdown, encoding="utf-8")
    return ReportDoc(markdown=markdown, assets=tuple(assets), path=report_path)
