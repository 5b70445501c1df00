"""Core cost-effectiveness decision statistics over PSA samples.

Everything here post-processes a fixed matrix of simulated costs and
effects: build the net-benefit utilities over a willingness-to-pay grid,
derive incremental benefit, acceptability curves, ICERs, break-even
thresholds and the per-simulation value-of-information quantities, and
format the standard summary / per-simulation tables.

Conventions:
  - arrays indexed [sim][k][intervention] (utilities) or [sim][k][comparison];
  - intervention indices are 0-based everywhere in this module (file formats,
    CLI and HTTP layers convert from 1-based at their boundaries);
  - an Analysis is immutable: arrays are marked read-only and mutators in
    :mod:`ceapost.extensions` return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_KMAX = 50_000.0
DEFAULT_GRID_POINTS = 501


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _float_matrix(values, name: str) -> np.ndarray:
    try:
        a = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not a numeric matrix: {exc}") from None
    if a.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    return a


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PsaDataset:
    """Paired simulation samples of effects and costs for competing arms.

    effects, costs: n_sim x n_int matrices (same shape); labels: one unique,
    non-empty name per intervention. Pass labels=None to auto-name arms
    "Intervention 1..n".
    """

    effects: np.ndarray
    costs: np.ndarray
    labels: tuple[str, ...]

    def __init__(self, effects, costs, labels: Optional[Sequence[str]] = None):
        e = _float_matrix(effects, "effects")
        c = _float_matrix(costs, "costs")
        if e.shape != c.shape:
            raise ValidationError(
                f"effects and costs shapes differ: {e.shape} vs {c.shape}"
            )
        n_sim, n_int = e.shape
        if n_sim < 2:
            raise ValidationError(f"fewer than 2 simulations (got {n_sim})")
        if n_int < 2:
            raise ValidationError(f"fewer than 2 interventions (got {n_int})")
        if not np.isfinite(e).all():
            raise ValidationError("effects contain non-finite values")
        if not np.isfinite(c).all():
            raise ValidationError("costs contain non-finite values")
        if labels is None:
            labels = tuple(f"Intervention {t + 1}" for t in range(n_int))
        else:
            labels = tuple(str(x) for x in labels)
        if len(labels) != n_int:
            raise ValidationError(
                f"{len(labels)} labels for {n_int} interventions"
            )
        if any(not lab for lab in labels):
            raise ValidationError("labels must be non-empty")
        if len(set(labels)) != n_int:
            raise ValidationError("labels must be unique")
        object.__setattr__(self, "effects", _readonly(e))
        object.__setattr__(self, "costs", _readonly(c))
        object.__setattr__(self, "labels", labels)

    @property
    def n_sim(self) -> int:
        return self.effects.shape[0]

    @property
    def n_int(self) -> int:
        return self.effects.shape[1]


@dataclass(frozen=True, eq=False)
class WtpGrid:
    """Strictly increasing willingness-to-pay values from 0 to kmax inclusive."""

    values: np.ndarray

    def __init__(self, values):
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValidationError("grid needs at least 2 willingness-to-pay values")
        if v[0] != 0.0:
            raise ValidationError("grid must start at 0")
        if not np.all(np.diff(v) > 0):
            raise ValidationError("grid values must be strictly increasing")
        if not np.isfinite(v).all():
            raise ValidationError("grid values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @classmethod
    def regular(cls, kmax: float, points: int = DEFAULT_GRID_POINTS) -> "WtpGrid":
        """Equally spaced grid on [0, kmax] with the given number of points."""
        if not np.isfinite(kmax) or kmax <= 0:
            raise ValidationError(f"kmax must be positive, got {kmax}")
        if points < 2:
            raise ValidationError(f"grid needs at least 2 points, got {points}")
        return cls(np.linspace(0.0, float(kmax), int(points)))

    @property
    def kmax(self) -> float:
        return float(self.values[-1])

    def __len__(self) -> int:
        return int(self.values.size)

    def nearest_index(self, k: float) -> int:
        """Index of the grid point closest to k (ties resolve downward)."""
        return int(np.argmin(np.abs(self.values - float(k))))


@dataclass(frozen=True, eq=False)
class Analysis:
    """All decision statistics for one dataset / reference / grid choice.

    Array shapes: U (n_sim, n_k, n_int); Ustar, ol, vi (n_sim, n_k);
    ib (n_sim, n_k, n_comp); eib, ceac (n_k, n_comp); eu (n_k, n_int);
    delta_e, delta_c (n_sim, n_comp); icer (n_comp) with NaN where
    undefined (flagged in icer_defined); best (n_k) intervention indices;
    kstar: grid values where the optimal arm changes.
    """

    dataset: PsaDataset
    ref: int
    comparisons: tuple[int, ...]
    grid: WtpGrid
    U: np.ndarray
    Ustar: np.ndarray
    ib: np.ndarray
    eib: np.ndarray
    ceac: np.ndarray
    icer: np.ndarray
    icer_defined: np.ndarray
    delta_e: np.ndarray
    delta_c: np.ndarray
    eu: np.ndarray
    best: np.ndarray
    ol: np.ndarray
    vi: np.ndarray
    evi: np.ndarray
    kstar: tuple[float, ...]

    @property
    def n_sim(self) -> int:
        return self.dataset.n_sim

    @property
    def n_int(self) -> int:
        return self.dataset.n_int

    @property
    def n_k(self) -> int:
        return len(self.grid)

    @property
    def kmax(self) -> float:
        return self.grid.kmax

    @property
    def grid_points(self) -> int:
        return len(self.grid)

    def comparison_label(self, j: int) -> str:
        """Label "Ref vs Comparator" for comparison slot j."""
        labels = self.dataset.labels
        return f"{labels[self.ref]} vs {labels[self.comparisons[j]]}"


# ---------------------------------------------------------------------------
# Component statistics
# ---------------------------------------------------------------------------

def compute_U(dataset: PsaDataset, grid: WtpGrid) -> np.ndarray:
    """Net monetary benefit k*e - c per simulation, grid point and arm."""
    k = grid.values[None, :, None]
    return k * dataset.effects[:, None, :] - dataset.costs[:, None, :]


def compute_IB(U: np.ndarray, ref: int, comparisons: Sequence[int]) -> np.ndarray:
    """Incremental benefit of the reference over each comparator."""
    return U[:, :, [ref]] - U[:, :, list(comparisons)]


def compute_EIB(ib: np.ndarray) -> np.ndarray:
    """Expected incremental benefit: mean over simulations."""
    return ib.mean(axis=0)


def compute_CEAC(ib: np.ndarray) -> np.ndarray:
    """Acceptability curve: fraction of simulations with strictly positive IB.

    Exact zeros count as not cost-effective.
    """
    n_sim = ib.shape[0]
    return (ib > 0).sum(axis=0) / n_sim


def compute_ICER(delta_e: np.ndarray, delta_c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean incremental cost over mean incremental effect per comparison.

    Returns (icer, defined): where the mean effect increment is exactly 0
    the ratio is undefined and reported as NaN with defined=False, never as
    an infinity.
    """
    mean_de = delta_e.mean(axis=0)
    mean_dc = delta_c.mean(axis=0)
    defined = mean_de != 0.0
    icer = np.full(mean_de.shape, np.nan)
    np.divide(mean_dc, mean_de, out=icer, where=defined)
    return icer, defined


def compute_Ustar(U: np.ndarray) -> np.ndarray:
    """Per-simulation maximum utility across every intervention."""
    return U.max(axis=2)


def compute_best(eu: np.ndarray, ref: int) -> np.ndarray:
    """Index of the arm with maximum expected utility at each grid point.

    Ties go to the reference arm when it attains the maximum, otherwise to
    the lowest index. Favouring the reference at exact ties makes the
    decision change fall on the break-even grid point itself (the smallest
    grid value at or above the ICER in the two-arm case).
    """
    raw = eu.argmax(axis=1)
    eumax = eu.max(axis=1)
    return np.where(eu[:, ref] == eumax, ref, raw)


def compute_kstar(grid: WtpGrid, best: np.ndarray) -> tuple[float, ...]:
    """Grid values where the expected-utility-optimal arm changes."""
    change = np.flatnonzero(best[1:] != best[:-1]) + 1
    return tuple(float(grid.values[i]) for i in change)


def compute_ol(U: np.ndarray, Ustar: np.ndarray, best: np.ndarray) -> np.ndarray:
    """Opportunity loss: per-simulation shortfall of the on-average-best arm."""
    n_sim, n_k, _ = U.shape
    idx = np.broadcast_to(best[None, :, None], (n_sim, n_k, 1))
    u_best = np.take_along_axis(U, idx, axis=2)[:, :, 0]
    return Ustar - u_best


def compute_vi(Ustar: np.ndarray, eu: np.ndarray) -> np.ndarray:
    """Value of information: per-simulation best minus the best expected utility."""
    return Ustar - eu.max(axis=1)[None, :]


def compute_EVI(ol: np.ndarray) -> np.ndarray:
    """Expected value of (perfect) information curve: mean opportunity loss."""
    return ol.mean(axis=0)


def new_analysis(
    dataset: PsaDataset,
    ref: int,
    comparisons: Optional[Sequence[int]] = None,
    kmax: float = DEFAULT_KMAX,
    grid_points: Optional[int] = None,
    grid: Optional[WtpGrid] = None,
) -> Analysis:
    """Compute every decision statistic for a dataset over a k grid.

    ref and comparisons are 0-based intervention indices; comparisons
    defaults to every non-reference arm in index order. The grid defaults
    to 501 equally spaced points on [0, kmax]; pass an explicit WtpGrid to
    override entirely.
    """
    n_int = dataset.n_int
    if not 0 <= ref < n_int:
        raise ValidationError(f"reference index {ref} out of range 0..{n_int - 1}")
    if comparisons is None:
        comps = tuple(t for t in range(n_int) if t != ref)
    else:
        comps = tuple(int(t) for t in comparisons)
        if not comps:
            raise ValidationError("comparisons must not be empty")
        if ref in comps:
            raise ValidationError(f"comparisons contain the reference arm {ref}")
        if len(set(comps)) != len(comps):
            raise ValidationError("comparisons contain duplicates")
        for t in comps:
            if not 0 <= t < n_int:
                raise ValidationError(f"comparison index {t} out of range 0..{n_int - 1}")
    if grid is None:
        grid = WtpGrid.regular(kmax, DEFAULT_GRID_POINTS if grid_points is None else grid_points)

    with np.errstate(over="ignore"):
        U = compute_U(dataset, grid)
    if not np.isfinite(U).all():
        raise ValidationError(
            "net benefit overflows double precision; effects, costs or kmax "
            "magnitudes are too large"
        )
    eu = U.mean(axis=0)
    Ustar = compute_Ustar(U)
    best = compute_best(eu, ref)
    ib = compute_IB(U, ref, comps)
    eib = compute_EIB(ib)
    ceac = compute_CEAC(ib)
    delta_e = dataset.effects[:, [ref]] - dataset.effects[:, list(comps)]
    delta_c = dataset.costs[:, [ref]] - dataset.costs[:, list(comps)]
    icer, icer_defined = compute_ICER(delta_e, delta_c)
    ol = compute_ol(U, Ustar, best)
    vi = compute_vi(Ustar, eu)
    evi = compute_EVI(ol)
    kstar = compute_kstar(grid, best)

    return Analysis(
        dataset=dataset,
        ref=int(ref),
        comparisons=comps,
        grid=grid,
        U=_readonly(U),
        Ustar=_readonly(Ustar),
        ib=_readonly(ib),
        eib=_readonly(eib),
        ceac=_readonly(ceac),
        icer=_readonly(icer),
        icer_defined=_readonly(icer_defined),
        delta_e=_readonly(delta_e),
        delta_c=_readonly(delta_c),
        eu=_readonly(eu),
        best=_readonly(best.astype(np.intp)),
        ol=_readonly(ol),
        vi=_readonly(vi),
        evi=_readonly(evi),
        kstar=kstar,
    )


# ---------------------------------------------------------------------------
# Summary and per-simulation tables
# ---------------------------------------------------------------------------

def fmt_value(x: float, digits: int = 5) -> str:
    """Compact significant-digit formatting used in printed tables."""
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return "undefined"
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    s = f"{x:.{digits}g}"
    return "0" if s == "-0" else s


def decision_sentence(analysis: Analysis) -> str:
    """Readable statement of the optimal arm over the whole grid."""
    labels = analysis.dataset.labels
    grid = analysis.grid.values
    best = analysis.best
    kstar = analysis.kstar
    if not kstar:
        return (
            f"choose {labels[int(best[0])]} for all k in "
            f"[0, {fmt_value(analysis.kmax)}]"
        )
    # arm in charge on each segment [prev, next)
    cuts = [float(grid[0])] + [float(v) for v in kstar]
    seg_labels = []
    for lo in cuts:
        idx = int(np.searchsorted(grid, lo))
        seg_labels.append(labels[int(best[idx])])
    parts = []
    for i, lab in enumerate(seg_labels):
        if i == 0:
            parts.append(f"choose {lab} for k < {fmt_value(cuts[1])}")
        elif i == len(seg_labels) - 1:
            parts.append(f"{lab} for k >= {fmt_value(cuts[i])}")
        else:
            parts.append(
                f"{lab} for {fmt_value(cuts[i])} <= k < {fmt_value(cuts[i + 1])}"
            )
    if len(parts) == 2:
        return " and ".join(parts)
    return ", ".join(parts[:-1]) + " and " + parts[-1]


@dataclass(frozen=True)
class SummaryBlock:
    """Structured content of the printed cost-effectiveness summary."""

    reference_label: str
    comparator_labels: tuple[str, ...]
    decision: str
    k: float
    k_requested: float
    kmax: float
    expected_utility: tuple[tuple[str, float], ...]
    comparison_rows: tuple[tuple[str, float, float, Optional[float]], ...]
    optimal_label: str
    evpi: float
    kstar: tuple[float, ...]

    def render(self) -> str:
        """Plain-text block in the standard layout."""
        lines = ["Cost-effectiveness analysis summary", ""]
        lines.append(f"Reference intervention:  {self.reference_label}")
        comp_word = (
            "Comparator intervention:"
            if len(self.comparator_labels) == 1
            else "Comparator interventions:"
        )
        lines.append(f"{comp_word} {', '.join(self.comparator_labels)}")
        lines.append("")
        lines.append(f"Optimal decision: {self.decision}")
        lines.append("")
        k_txt = fmt_value(self.k)
        note = "" if self.k == self.k_requested else (
            f" (requested {fmt_value(self.k_requested)}, snapped to grid)"
        )
        lines.append(f"Analysis for willingness to pay parameter k = {k_txt}{note}")
        lines.append("")
        # expected utility table
        lab_w = max(len(lab) for lab, _ in self.expected_utility)
        vals = [fmt_value(v) for _, v in self.expected_utility]
        val_w = max(len("Expected utility"), max(len(v) for v in vals))
        lines.append(" " * (lab_w + 1) + "Expected utility".rjust(val_w))
        for (lab, _), v in zip(self.expected_utility, vals):
            lines.append(lab.ljust(lab_w) + " " + v.rjust(val_w))
        lines.append("")
        # EIB / CEAC / ICER table
        rows = []
        for name, eib, ceac, icer in self.comparison_rows:
            rows.append((name, fmt_value(eib), f"{ceac:.3f}",
                         "undefined" if icer is None else fmt_value(icer)))
        name_w = max(len(r[0]) for r in rows)
        col_ws = [max(len(h), max(len(r[i + 1]) for r in rows))
                  for i, h in enumerate(("EIB", "CEAC", "ICER"))]
        header = " " * name_w
        for h, w in zip(("EIB", "CEAC", "ICER"), col_ws):
            header += " " + h.rjust(w)
        lines.append(header)
        for r in rows:
            line = r[0].ljust(name_w)
            for v, w in zip(r[1:], col_ws):
                line += " " + v.rjust(w)
            lines.append(line)
        lines.append("")
        lines.append(
            f"Optimal intervention (max expected utility) for k = {k_txt}: "
            f"{self.optimal_label}"
        )
        lines.append("")
        lines.append(f"EVPI {fmt_value(self.evpi)}")
        return "\n".join(lines) + "\n"


def summarize(analysis: Analysis, k: float) -> SummaryBlock:
    """Summary of the analysis at willingness-to-pay k (snapped to the grid)."""
    if not np.isfinite(k) or k < 0 or k > analysis.kmax:
        raise ValidationError(
            f"k = {k} outside the grid range [0, {analysis.kmax}]"
        )
    ki = analysis.grid.nearest_index(k)
    k_snap = float(analysis.grid.values[ki])
    labels = analysis.dataset.labels
    eu_rows = tuple((labels[t], float(analysis.eu[ki, t]))
                    for t in range(analysis.n_int))
    comp_rows = []
    for j in range(len(analysis.comparisons)):
        icer = float(analysis.icer[j]) if analysis.icer_defined[j] else None
        comp_rows.append((
            analysis.comparison_label(j),
            float(analysis.eib[ki, j]),
            float(analysis.ceac[ki, j]),
            icer,
        ))
    return SummaryBlock(
        reference_label=labels[analysis.ref],
        comparator_labels=tuple(labels[c] for c in analysis.comparisons),
        decision=decision_sentence(analysis),
        k=k_snap,
        k_requested=float(k),
        kmax=analysis.kmax,
        expected_utility=eu_rows,
        comparison_rows=tuple(comp_rows),
        optimal_label=labels[int(analysis.best[ki])],
        evpi=float(analysis.evi[ki]),
        kstar=analysis.kstar,
    )


@dataclass(frozen=True, eq=False)
class SimTable:
    """Per-simulation utilities, incremental benefit, OL and VI at one k."""

    k: float
    columns: tuple[str, ...]
    values: np.ndarray

    def render(self, head: Optional[int] = None) -> str:
        """Fixed-width text table; head limits the number of rows shown."""
        n = self.values.shape[0] if head is None else min(head, self.values.shape[0])
        cells = [[f"{v:.7g}" for v in row] for row in self.values[:n]]
        idx_w = len(str(n))
        widths = [max(len(name), max(len(r[i]) for r in cells))
                  for i, name in enumerate(self.columns)]
        lines = [" " * idx_w + "".join(" " + name.rjust(w)
                                       for name, w in zip(self.columns, widths))]
        for i, row in enumerate(cells, start=1):
            lines.append(str(i).rjust(idx_w)
                         + "".join(" " + v.rjust(w) for v, w in zip(row, widths)))
        return "\n".join(lines) + "\n"


def sim_table(analysis: Analysis, k: float) -> SimTable:
    """Simulation-level table at k: U per arm, U*, IB per comparison, OL, VI."""
    if not np.isfinite(k) or k < 0 or k > analysis.kmax:
        raise ValidationError(
            f"k = {k} outside the grid range [0, {analysis.kmax}]"
        )
    ki = analysis.grid.nearest_index(k)
    cols = [f"U{t + 1}" for t in range(analysis.n_int)]
    cols.append("U*")
    for c in analysis.comparisons:
        cols.append(f"IB{analysis.ref + 1}_{c + 1}")
    cols.extend(["OL", "VI"])
    parts = [
        analysis.U[:, ki, :],
        analysis.Ustar[:, ki][:, None],
        analysis.ib[:, ki, :],
        analysis.ol[:, ki][:, None],
        analysis.vi[:, ki][:, None],
    ]
    return SimTable(
        k=float(analysis.grid.values[ki]),
        columns=tuple(cols),
        values=_readonly(np.hstack(parts)),
    )
