"""Load, validate and persist PSA datasets, parameter matrices and results.

File contracts:
  - sample matrices: RFC-4180-subset CSV, UTF-8, one column per intervention,
    one row per simulation, optional header row (headers become labels); or
    a single JSON document with "effects" and "costs" arrays;
  - manifest: JSON object ("version": 1) naming the input files plus the
    analysis configuration; indices in files are 1-based;
  - archive: JSON object ("version": 1) embedding the dataset, the
    configuration, every aggregate statistic and any attached extension
    results, plus a SHA-256 content hash for tamper detection.

Error messages carry 1-based row/column coordinates. Numbers are parsed as
64-bit floats with a dot decimal separator regardless of locale; missing
values are rejected.
"""

from __future__ import annotations

import csv
import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .core import Analysis, PsaDataset, new_analysis
from .errors import ArchiveIntegrityWarning, SampleSizeAdvisory, ValidationError
from .extensions import (
    MixedStrategy,
    MultiCeResult,
    RiskAversionSet,
    apply_mixed_strategy,
    apply_risk_aversion,
    multi_ce,
)

FORMAT_VERSION = 1
RECOMMENDED_SIMS = 1000

PathLike = Union[str, Path]


# ---------------------------------------------------------------------------
# CSV / JSON matrices
# ---------------------------------------------------------------------------

def _parse_float(cell: str, row: int, col: int, path: PathLike) -> float:
    text = cell.strip()
    if not text:
        raise ValidationError(
            f"{path}: missing value at data row {row}, column {col}"
        )
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(
            f"{path}: non-numeric value {cell!r} at data row {row}, column {col}"
        ) from None
    if not np.isfinite(value):
        raise ValidationError(
            f"{path}: non-finite value {cell!r} at data row {row}, column {col}"
        )
    return value


def _looks_numeric(cell: str) -> bool:
    try:
        float(cell.strip())
        return True
    except ValueError:
        return False


def read_matrix_csv(path: PathLike) -> tuple[np.ndarray, Optional[list[str]]]:
    """Numeric matrix plus the optional header row of a CSV file.

    The first row counts as a header when any of its cells fails to parse
    as a number, so all-numeric labels cannot be round-tripped through CSV.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValidationError(f"{path}: file is empty")
    header: Optional[list[str]] = None
    if not all(_looks_numeric(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    width = len(header) if header is not None else (len(rows[0]) if rows else 0)
    data = []
    for r, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValidationError(
                f"{path}: ragged row {r}: expected {width} columns, got {len(row)}"
            )
        data.append([_parse_float(c, r, j + 1, path) for j, c in enumerate(row)])
    if len(data) < 2:
        raise ValidationError(f"{path}: fewer than 2 simulations (got {len(data)})")
    return np.asarray(data, dtype=float), header


def _matrix_from_obj(obj, key: str, source: PathLike) -> np.ndarray:
    if key not in obj:
        raise ValidationError(f"{source}: missing {key!r} array")
    try:
        mat = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{source}: {key!r} is not a numeric matrix") from None
    if mat.ndim != 2:
        raise ValidationError(f"{source}: {key!r} must be a matrix of rows")
    return mat


def _advise_sample_size(n_sim: int) -> None:
    if n_sim < RECOMMENDED_SIMS:
        warnings.warn(
            f"PSA has {n_sim} simulations; at least 2 are required but "
            f">{RECOMMENDED_SIMS} are recommended for stable estimates",
            SampleSizeAdvisory,
            stacklevel=3,
        )


def load_psa(
    effects_path: PathLike,
    costs_path: Optional[PathLike] = None,
    labels: Optional[Sequence[str]] = None,
) -> PsaDataset:
    """Load a PSA dataset from two CSV matrices or one JSON document.

    With a single argument the file must be a JSON object carrying
    "effects" and "costs" (and optionally "labels"). CSV headers become
    labels unless labels are passed explicitly.
    """
    if costs_path is None:
        with open(effects_path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{effects_path}: invalid JSON: {exc}") from None
        effects = _matrix_from_obj(obj, "effects", effects_path)
        costs = _matrix_from_obj(obj, "costs", effects_path)
        if labels is None:
            labels = obj.get("labels")
        dataset = PsaDataset(effects, costs, labels)
    else:
        effects, e_header = read_matrix_csv(effects_path)
        costs, c_header = read_matrix_csv(costs_path)
        if effects.shape != costs.shape:
            raise ValidationError(
                f"effects {effects.shape} and costs {costs.shape} differ "
                f"({effects_path} vs {costs_path})"
            )
        if labels is None:
            labels = e_header if e_header is not None else c_header
        dataset = PsaDataset(effects, costs, labels)
    _advise_sample_size(dataset.n_sim)
    return dataset


def save_psa(
    dataset: PsaDataset,
    effects_path: PathLike,
    costs_path: Optional[PathLike] = None,
) -> None:
    """Write a dataset back out, bit-for-bit reloadable.

    Two-path form writes headered CSVs (floats via repr, so parsing returns
    the identical doubles); single-path form writes the JSON document.
    Labels that all look numeric cannot survive a CSV header, so that case
    is rejected (use the JSON form).
    """
    if costs_path is None:
        payload = {
            "effects": dataset.effects.tolist(),
            "costs": dataset.costs.tolist(),
            "labels": list(dataset.labels),
        }
        with open(effects_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, allow_nan=False)
            fh.write("\n")
        return
    if all(_looks_numeric(lab) for lab in dataset.labels):
        raise ValidationError(
            "all labels look numeric and would be read back as data; "
            "write JSON instead"
        )
    for path, matrix in ((effects_path, dataset.effects),
                         (costs_path, dataset.costs)):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(dataset.labels)
            for row in matrix:
                writer.writerow([repr(float(v)) for v in row])


def load_params(path: PathLike) -> tuple[np.ndarray, list[str]]:
    """Raw parameter matrix and column names from CSV or JSON.

    Headerless CSV columns are named "param 1..n".
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: invalid JSON: {exc}") from None
        mat = _matrix_from_obj(obj, "mat", path)
        names = [str(n) for n in obj.get("names", [])]
        if not names:
            names = [f"param {j + 1}" for j in range(mat.shape[1])]
    else:
        mat, header = read_matrix_csv(path)
        names = header if header is not None else [
            f"param {j + 1}" for j in range(mat.shape[1])
        ]
    if len(names) != mat.shape[1]:
        raise ValidationError(
            f"{path}: {len(names)} names for {mat.shape[1]} columns"
        )
    return mat, names


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetManifest:
    """Configuration file naming the inputs of one analysis (1-based indices)."""

    effects_path: str
    costs_path: str
    ref: int
    params_path: Optional[str] = None
    labels: Optional[tuple[str, ...]] = None
    comparisons: Optional[tuple[int, ...]] = None
    kmax: float = 50_000.0
    grid_points: int = 501
    version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        out = {
            "version": self.version,
            "effects": self.effects_path,
            "costs": self.costs_path,
            "ref": self.ref,
            "kmax": self.kmax,
            "grid_points": self.grid_points,
        }
        if self.params_path is not None:
            out["params"] = self.params_path
        if self.labels is not None:
            out["labels"] = list(self.labels)
        if self.comparisons is not None:
            out["comparisons"] = list(self.comparisons)
        return out


def load_manifest(path: PathLike) -> DatasetManifest:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    version = obj.get("version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            f"{path}: unsupported manifest version {version!r} "
            f"(expected {FORMAT_VERSION})"
        )
    for key in ("effects", "costs", "ref"):
        if key not in obj:
            raise ValidationError(f"{path}: manifest is missing {key!r}")
    comparisons = obj.get("comparisons")
    return DatasetManifest(
        effects_path=str(obj["effects"]),
        costs_path=str(obj["costs"]),
        ref=int(obj["ref"]),
        params_path=str(obj["params"]) if "params" in obj else None,
        labels=tuple(obj["labels"]) if "labels" in obj else None,
        comparisons=tuple(int(c) for c in comparisons) if comparisons else None,
        kmax=float(obj.get("kmax", 50_000.0)),
        grid_points=int(obj.get("grid_points", 501)),
    )


def analysis_from_manifest(
    manifest: Union[DatasetManifest, PathLike],
    base_dir: Optional[PathLike] = None,
):
    """Build the Analysis (and parameter matrix, if any) a manifest describes.

    Relative file paths resolve against the manifest's directory. Returns
    (analysis, params) where params is (matrix, names) or None. Manifest
    indices are 1-based and converted here.
    """
    if not isinstance(manifest, DatasetManifest):
        path = Path(manifest)
        base_dir = path.parent if base_dir is None else base_dir
        manifest = load_manifest(path)
    base = Path(base_dir) if base_dir is not None else Path(".")

    def _resolve(p: str) -> Path:
        q = Path(p)
        return q if q.is_absolute() else base / q

    dataset = load_psa(
        _resolve(manifest.effects_path),
        _resolve(manifest.costs_path),
        labels=manifest.labels,
    )
    if not 1 <= manifest.ref <= dataset.n_int:
        raise ValidationError(
            f"manifest ref {manifest.ref} out of range 1..{dataset.n_int}"
        )
    comparisons = None
    if manifest.comparisons is not None:
        comparisons = [c - 1 for c in manifest.comparisons]
    analysis = new_analysis(
        dataset,
        ref=manifest.ref - 1,
        comparisons=comparisons,
        kmax=manifest.kmax,
        grid_points=manifest.grid_points,
    )
    params = None
    if manifest.params_path is not None:
        params = load_params(_resolve(manifest.params_path))
    return analysis, params


# ---------------------------------------------------------------------------
# Archive
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoadedArchive:
    analysis: Analysis
    extensions: dict
    content_hash: str
    intact: bool


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _extension_payload(analysis: Analysis, extensions: Optional[dict]) -> dict:
    out = {}
    if not extensions:
        return out
    for key, value in extensions.items():
        if key == "riskav":
            if not isinstance(value, RiskAversionSet):
                raise ValidationError("extensions['riskav'] must be a RiskAversionSet")
            out["riskav"] = {
                "r_values": list(value.r_values),
                "eib": [o.eib.tolist() for o in value.overlays],
                "evi": [o.evi.tolist() for o in value.overlays],
                "clamped": list(value.clamped),
            }
        elif key == "mixed":
            if not isinstance(value, MixedStrategy):
                raise ValidationError("extensions['mixed'] must be a MixedStrategy")
            out["mixed"] = {
                "shares": list(value.shares),
                "ubar": value.Ubar.tolist(),
                "evi": value.evi.tolist(),
            }
        elif key == "multice":
            if not isinstance(value, MultiCeResult):
                raise ValidationError("extensions['multice'] must be a MultiCeResult")
            out["multice"] = {
                "included": [t + 1 for t in value.included],
                "p_best": value.p_best.tolist(),
                "ceaf": value.ceaf.tolist(),
            }
        else:
            raise ValidationError(f"unknown extension key {key!r}")
    return out


def archive_payload(analysis: Analysis, extensions: Optional[dict] = None) -> dict:
    """JSON-ready archive content (without the content hash).

    Floats serialise through repr and therefore round-trip bit for bit.
    Per-simulation tensors are not stored: they are a deterministic
    function of the embedded dataset and configuration, recomputed on load
    and cross-checked against the stored aggregates.
    """
    ds = analysis.dataset
    icer = [
        float(x) if d else None
        for x, d in zip(analysis.icer, analysis.icer_defined)
    ]
    return {
        "version": FORMAT_VERSION,
        "dataset": {
            "effects": ds.effects.tolist(),
            "costs": ds.costs.tolist(),
            "labels": list(ds.labels),
        },
        "config": {
            "ref": analysis.ref + 1,
            "comparisons": [c + 1 for c in analysis.comparisons],
            "kmax": analysis.kmax,
            "grid_points": analysis.grid_points,
        },
        "statistics": {
            "eib": analysis.eib.tolist(),
            "ceac": analysis.ceac.tolist(),
            "icer": icer,
            "eu": analysis.eu.tolist(),
            "evi": analysis.evi.tolist(),
            "best": [int(b) + 1 for b in analysis.best],
            "kstar": list(analysis.kstar),
        },
        "extensions": _extension_payload(analysis, extensions),
    }


def archive_hash(analysis: Analysis, extensions: Optional[dict] = None) -> str:
    """SHA-256 over the canonical archive payload."""
    payload = archive_payload(analysis, extensions)
    return hashlib.sha256(_canonical_json(payload).encode("utf-8")).hexdigest()


def save_archive(
    analysis: Analysis, path: PathLike, extensions: Optional[dict] = None
) -> str:
    """Write the archive JSON; returns its content hash."""
    payload = archive_payload(analysis, extensions)
    digest = hashlib.sha256(_canonical_json(payload).encode("utf-8")).hexdigest()
    payload["content_hash"] = digest
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1, allow_nan=False)
        fh.write("\n")
    return digest


def load_archive(path: PathLike) -> LoadedArchive:
    """Rebuild an Analysis (and attached extensions) from an archive file.

    Statistics are recomputed from the embedded dataset and configuration;
    a content-hash or statistics mismatch raises an ArchiveIntegrityWarning
    but still returns the recomputed (trustworthy) analysis.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            stored = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    version = stored.get("version")
    if version != FORMAT_VERSION:
        raise ValidationError(
            f"{path}: unsupported archive version {version!r} (expected {FORMAT_VERSION})"
        )
    stored_hash = stored.pop("content_hash", None)

    ds_obj = stored.get("dataset", {})
    config = stored.get("config", {})
    dataset = PsaDataset(
        _matrix_from_obj(ds_obj, "effects", path),
        _matrix_from_obj(ds_obj, "costs", path),
        ds_obj.get("labels"),
    )
    analysis = new_analysis(
        dataset,
        ref=int(config["ref"]) - 1,
        comparisons=[int(c) - 1 for c in config.get("comparisons", [])] or None,
        kmax=float(config["kmax"]),
        grid_points=int(config["grid_points"]),
    )

    extensions: dict = {}
    ext_obj = stored.get("extensions", {})
    if "riskav" in ext_obj:
        extensions["riskav"] = apply_risk_aversion(
            analysis, ext_obj["riskav"]["r_values"]
        )
    if "mixed" in ext_obj:
        extensions["mixed"] = apply_mixed_strategy(
            analysis, ext_obj["mixed"]["shares"]
        )
    if "multice" in ext_obj:
        extensions["multice"] = multi_ce(analysis)

    recomputed = archive_payload(analysis, extensions)
    recomputed_hash = hashlib.sha256(
        _canonical_json(recomputed).encode("utf-8")
    ).hexdigest()
    payload_hash = hashlib.sha256(_canonical_json(stored).encode("utf-8")).hexdigest()
    intact = True
    if stored_hash != payload_hash:
        intact = False
        warnings.warn(
            f"{path}: content hash mismatch (stored {str(stored_hash)[:12]}..., "
            f"actual {payload_hash[:12]}...); archive may have been edited",
            ArchiveIntegrityWarning,
            stacklevel=2,
        )
    elif stored != recomputed:
        intact = False
        warnings.warn(
            f"{path}: stored statistics differ from recomputation",
            ArchiveIntegrityWarning,
            stacklevel=2,
        )
    return LoadedArchive(
        analysis=analysis,
        extensions=extensions,
        content_hash=recomputed_hash,
        intact=intact,
    )
