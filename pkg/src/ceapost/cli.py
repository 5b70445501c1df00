"""Command-line interface.

Exit codes: 0 on success, 2 on validation errors, 3 on I/O errors.
Indices given on the command line are 1-based, matching the file formats.
"""

from __future__ import annotations

import sys

import click

from .core import new_analysis, summarize
from .errors import ValidationError
from .ingest import analysis_from_manifest, load_psa, save_archive
from .report import DEFAULT_PLOTS, make_report


def _run(fn):
    try:
        fn()
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(3)


def _build_analysis(manifest, effects, costs, labels, ref, comparisons,
                    kmax, grid_points):
    if manifest:
        analysis, _ = analysis_from_manifest(manifest)
        return analysis
    if not effects or not costs:
        raise ValidationError("provide --manifest or both --effects and --costs")
    label_list = [s.strip() for s in labels.split(",")] if labels else None
    dataset = load_psa(effects, costs, labels=label_list)
    if not 1 <= ref <= dataset.n_int:
        raise ValidationError(f"--ref {ref} out of range 1..{dataset.n_int}")
    comps = None
    if comparisons:
        comps = [int(c) - 1 for c in comparisons.split(",")]
    return new_analysis(dataset, ref=ref - 1, comparisons=comps,
                        kmax=kmax, grid_points=grid_points)


@click.group()
def main():
    """Post-process PSA samples into decision statistics, plots and reports."""


shared_options = [
    click.option("--manifest", type=click.Path(), default=None,
                 help="JSON manifest naming the inputs (overrides the options below)."),
    click.option("--effects", type=click.Path(), default=None,
                 help="CSV of effectiveness samples, one column per arm."),
    click.option("--costs", type=click.Path(), default=None,
                 help="CSV of cost samples, same shape as effects."),
    click.option("--labels", default=None,
                 help="Comma-separated intervention names (default: CSV header)."),
    click.option("--ref", type=int, default=1, show_default=True,
                 help="Reference intervention (1-based)."),
    click.option("--comparisons", default=None,
                 help="Comma-separated comparator indices (1-based)."),
    click.option("--kmax", type=float, default=50_000.0, show_default=True,
                 help="Upper willingness-to-pay bound."),
    click.option("--grid-points", type=int, default=501, show_default=True),
]


def with_shared_options(fn):
    for opt in reversed(shared_options):
        fn = opt(fn)
    return fn


@main.command()
@with_shared_options
@click.option("--wtp", type=float, default=None,
              help="Willingness to pay for the summary (default: grid midpoint).")
def summary(manifest, effects, costs, labels, ref, comparisons, kmax,
            grid_points, wtp):
    """Print the cost-effectiveness summary block."""

    def go():
        analysis = _build_analysis(manifest, effects, costs, labels, ref,
                                   comparisons, kmax, grid_points)
        k = wtp if wtp is not None else float(
            analysis.grid.values[analysis.n_k // 2]
        )
        click.echo(summarize(analysis, k).render(), nl=False)

    _run(go)


@main.command()
@with_shared_options
@click.option("--wtp", type=float, default=None,
              help="Willingness to pay used in the summary and figures.")
@click.option("--plots", default=",".join(DEFAULT_PLOTS), show_default=True,
              help="Comma-separated figure kinds (ceplane,ceac,eib,evi,...).")
@click.option("--out", type=click.Path(), required=True,
              help="Output directory for report.md and the SVG figures.")
@click.option("--archive", type=click.Path(), default=None,
              help="Also write a reloadable archive of the analysis.")
def report(manifest, effects, costs, labels, ref, comparisons, kmax,
           grid_points, wtp, plots, out, archive):
    """Build the markdown report with figures."""

    def go():
        analysis = _build_analysis(manifest, effects, costs, labels, ref,
                                   comparisons, kmax, grid_points)
        plot_list = [p.strip() for p in plots.split(",") if p.strip()]
        doc = make_report(analysis, out, k=wtp, plots=plot_list)
        if archive:
            digest = save_archive(analysis, archive)
            click.echo(f"archive {archive} ({digest[:12]})")
        click.echo(f"report written to {doc.path}")

    _run(go)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8350, show_default=True)
def serve(host, port):
    """Serve the what-if HTTP API for the browser explorer."""
    from .server import serve as run_server

    run_server(host=host, port=port)


if __name__ == "__main__":
    main()
