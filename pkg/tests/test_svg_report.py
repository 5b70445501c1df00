"""SVG rendering determinism and report assembly."""

import numpy as np
import pytest

from ceapost.core import new_analysis
from ceapost.errors import ValidationError
from ceapost.extensions import apply_mixed_strategy, multi_ce
from ceapost.plotspecs import (
    ceac_spec,
    ceplane_spec,
    eib_spec,
    evi_spec,
    grid_spec,
    info_rank_spec,
)
from ceapost.report import make_report
from ceapost.svgrender import render_svg

from conftest import random_dataset


class TestRenderSvg:
    def test_byte_identical_for_same_spec(self, tiny_analysis):
        for spec in (
            ceplane_spec(tiny_analysis, k=15.0),
            ceac_spec(tiny_analysis),
            eib_spec(tiny_analysis),
            evi_spec(tiny_analysis),
            grid_spec(tiny_analysis),
        ):
            assert render_svg(spec) == render_svg(spec)

    def test_well_formed_xml(self, tiny_analysis):
        import xml.etree.ElementTree as ET

        for spec in (
            ceplane_spec(tiny_analysis, k=15.0),
            eib_spec(tiny_analysis),
            grid_spec(tiny_analysis),
            info_rank_spec([("beta.1.", 0.6), ("beta.2.", 0.2)], k=20.0),
        ):
            ET.fromstring(render_svg(spec))

    def test_no_timestamps_or_random_ids(self, tiny_analysis):
        doc = render_svg(eib_spec(tiny_analysis))
        assert "date" not in doc.lower()
        assert "uuid" not in doc.lower()

    def test_grid_is_two_by_two(self, tiny_analysis):
        doc = render_svg(grid_spec(tiny_analysis))
        assert 'width="1280" height="960"' in doc

    def test_text_escaped(self, tiny_analysis):
        spec = ceplane_spec(tiny_analysis, k=15.0)
        object.__setattr__(spec, "title", 'a<b & "c"')
        doc = render_svg(spec)
        assert "a&lt;b &amp; &quot;c&quot;" in doc


class TestReport:
    def test_report_sections_and_assets(self, tiny_analysis, tmp_path):
        doc = make_report(tiny_analysis, tmp_path, k=20.0)
        md = doc.markdown
        sections = [
            "# Cost-effectiveness analysis report",
            "## Dataset",
            "## Summary",
            "## Figures",
            "## Simulation table",
            "## Configuration",
        ]
        positions = [md.index(s) for s in sections]
        assert positions == sorted(positions)
        for asset in doc.assets:
            assert (tmp_path / asset).exists()
            assert f"({asset})" in md
        assert (tmp_path / "report.md").exists()

    def test_report_contains_tiny_summary_values(self, tiny_analysis, tmp_path):
        doc = make_report(tiny_analysis, tmp_path, k=20.0)
        row = next(
            line for line in doc.markdown.splitlines()
            if line.startswith("New vs Status quo")
        )
        # EIB 5 / CEAC 0.667 / ICER 15
        assert row.split() == ["New", "vs", "Status", "quo", "5", "0.667", "15"]
        assert "EVPI 1.6667" in doc.markdown

    def test_sim_table_excerpt_six_rows(self, tmp_path):
        rng = np.random.default_rng(0)
        ds = random_dataset(rng, n_sim=40, n_int=2)
        a = new_analysis(ds, ref=1, kmax=20.0, grid_points=11)
        doc = make_report(a, tmp_path, k=10.0)
        start = doc.markdown.index("## Simulation table")
        block = doc.markdown[start:].split("```")[1]
        rows = [ln for ln in block.strip().splitlines()[1:] if ln.strip()]
        assert len(rows) == 6

    def test_extension_figures(self, tiny_analysis, tmp_path):
        ext = {
            "multice": multi_ce(tiny_analysis),
            "mixed": apply_mixed_strategy(tiny_analysis, [0.5, 0.5]),
        }
        doc = make_report(
            tiny_analysis, tmp_path, k=20.0,
            plots=("ceplane", "ceac", "ceaf", "evi"),
            extensions=ext,
        )
        assert "fig_ceaf.svg" in doc.assets
        assert "mixed strategy" in doc.markdown or "Mixed" in doc.markdown

    def test_voi_section(self, tmp_path):
        rng = np.random.default_rng(2)
        n = 400
        phi = rng.uniform(-1, 1, n)
        from ceapost.core import PsaDataset
        from ceapost.voi import create_inputs, evppi

        ds = PsaDataset(
            np.column_stack([np.zeros(n), phi]),
            np.column_stack([np.zeros(n), 2 * phi]),
        )
        a = new_analysis(ds, ref=1, kmax=4.0, grid_points=21)
        inputs = create_inputs(phi[:, None], ["phi"])
        result = evppi(a, ["phi"], inputs)
        doc = make_report(a, tmp_path, k=3.0, plots=("evi",),
                          evppi_result=result)
        assert "## Value of partial information" in doc.markdown
        assert "phi" in doc.markdown
        assert "| k | EVPPI | EVPI |" in doc.markdown
        # VoI sits between the simulation table and the configuration
        md = doc.markdown
        assert (md.index("## Simulation table")
                < md.index("## Value of partial information")
                < md.index("## Configuration"))

    def test_unknown_plot_kind(self, tiny_analysis, tmp_path):
        with pytest.raises(ValidationError, match="unknown plot kind"):
            make_report(tiny_analysis, tmp_path, k=20.0, plots=("nope",))

    def test_contour_plot_renderable(self, tmp_path):
        rng = np.random.default_rng(1)
        ds = random_dataset(rng, n_sim=200, n_int=2)
        a = new_analysis(ds, ref=1, kmax=20.0, grid_points=11)
        doc = make_report(a, tmp_path, k=10.0, plots=("contour",))
        assert "fig_contour.svg" in doc.assets
