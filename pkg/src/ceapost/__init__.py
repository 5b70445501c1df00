"""Post-processing of probabilistic sensitivity analysis samples.

Build every standard cost-effectiveness decision statistic and
value-of-information measure from paired cost/effect simulation matrices,
then slice them into summaries, tables, plot specifications, SVG figures,
reports and an interactive what-if HTTP API.
"""

from .core import (
    Analysis,
    PsaDataset,
    SimTable,
    SummaryBlock,
    WtpGrid,
    new_analysis,
    sim_table,
    summarize,
)
from .errors import (
    ArchiveIntegrityWarning,
    SampleSizeAdvisory,
    ValidationError,
)
from .extensions import (
    MixedStrategy,
    MultiCeResult,
    RiskAversionSet,
    apply_mixed_strategy,
    apply_risk_aversion,
    multi_ce,
    risk_averse_utility,
    set_comparisons,
    set_kmax,
    set_reference,
)
from .frontier import FrontierResult, efficiency_frontier
from .ingest import (
    DatasetManifest,
    analysis_from_manifest,
    archive_hash,
    load_archive,
    load_manifest,
    load_params,
    load_psa,
    save_archive,
    save_psa,
)
from .plotspecs import (
    PlotSpec,
    ceac_spec,
    ceaf_spec,
    ceef_spec,
    ceplane_spec,
    contour2_spec,
    contour_spec,
    eib_spec,
    evi_spec,
    grid_spec,
    ib_density_spec,
    info_rank_spec,
    riskav_plots,
    validate_spec,
)
from .report import ReportDoc, make_report
from .svgrender import render_svg
from .voi import (
    EvppiResult,
    ParameterInputs,
    create_inputs,
    evppi,
    info_rank,
)

__version__ = "0.1.0"

__all__ = [
    "Analysis",
    "ArchiveIntegrityWarning",
    "DatasetManifest",
    "EvppiResult",
    "FrontierResult",
    "MixedStrategy",
    "MultiCeResult",
    "ParameterInputs",
    "PlotSpec",
    "PsaDataset",
    "ReportDoc",
    "RiskAversionSet",
    "SampleSizeAdvisory",
    "SimTable",
    "SummaryBlock",
    "ValidationError",
    "WtpGrid",
    "analysis_from_manifest",
    "apply_mixed_strategy",
    "apply_risk_aversion",
    "archive_hash",
    "ceac_spec",
    "ceaf_spec",
    "ceef_spec",
    "ceplane_spec",
    "contour2_spec",
    "contour_spec",
    "create_inputs",
    "efficiency_frontier",
    "eib_spec",
    "evi_spec",
    "evppi",
    "grid_spec",
    "ib_density_spec",
    "info_rank",
    "info_rank_spec",
    "load_archive",
    "load_manifest",
    "load_params",
    "load_psa",
    "make_report",
    "multi_ce",
    "new_analysis",
    "render_svg",
    "riskav_plots",
    "risk_averse_utility",
    "save_archive",
    "save_psa",
    "set_comparisons",
    "set_kmax",
    "set_reference",
    "sim_table",
    "summarize",
    "validate_spec",
]
