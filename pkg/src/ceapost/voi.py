"""Expected value of partial perfect information.

Parameter-input cleaning (constant and linearly dependent columns are
removed so conditioning is well posed), per-k EVPPI estimation by
regression on the selected parameters, and info-rank scoring of single
parameters as a share of total EVPI.

Estimators. Both fit the conditional mean of the per-simulation utility of
each arm given the selected parameters, take the per-simulation maximum of
the fitted values, average, and subtract the maximum of the plain means:

  - "binned" (single parameter): equal-count bins over the sorted parameter
    (bin count floor(sqrt(n_sim)), capped at 100, boundaries snapped so tied
    values never split), conditional mean per bin;
  - "nearest-neighbour" (parameter subsets): local mean over the
    round(sqrt(n_sim)) nearest simulations in standardised parameter space.

Raw conditional means of a pure-noise parameter inherit a positive bias of
order sqrt(bins/n), so fitted deviations from the grand mean are scaled by
an empirical-Bayes factor lambda = max(0, 1 - noise_var/signal_var) before
the maximisation; uninformative parameters then score near zero instead of
near sqrt(bins/n) of the EVPI. Estimates are clamped to [0, EVPI] with the
pre-clamp value kept in the diagnostics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import Analysis, _readonly
from .errors import ValidationError

LINEAR_COMBINATION_TOL = 1e-10
MAX_BINS = 100
THIN_STRIDE = 10
MIN_RELIABLE_SIMS = 100


# ---------------------------------------------------------------------------
# Parameter inputs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DroppedColumn:
    name: str
    reason: str  # "constant" | "linear-combination"
    combination: Optional[tuple[tuple[str, float], ...]] = None


@dataclass(frozen=True, eq=False)
class ParameterInputs:
    """Cleaned n_sim x n_param matrix of model-parameter draws."""

    mat: np.ndarray
    names: tuple[str, ...]
    dropped: tuple[DroppedColumn, ...]

    @property
    def n_sim(self) -> int:
        return self.mat.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.mat[:, self.names.index(name)]


def create_inputs(
    mat, names: Sequence[str], report_linear_combinations: bool = False
) -> ParameterInputs:
    """Drop constant and linearly dependent parameter columns.

    Columns are scanned left to right and a column is dropped when it lies
    in the span of the columns already kept (so later columns are dropped
    first; the earliest spanning set survives). Dependence uses a relative
    singular-value threshold of 1e-10. With report_linear_combinations the
    discovered relations are printed.
    """
    a = np.asarray(mat, dtype=float)
    if a.ndim != 2:
        raise ValidationError(f"parameter matrix must be 2-D, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ValidationError("parameter matrix needs at least 2 rows")
    if not np.isfinite(a).all():
        raise ValidationError("parameter matrix contains non-finite values")
    names = tuple(str(n) for n in names)
    if len(names) != a.shape[1]:
        raise ValidationError(
            f"{len(names)} names for {a.shape[1]} parameter columns"
        )
    if len(set(names)) != len(names):
        raise ValidationError("parameter names must be unique")
    if any(not n for n in names):
        raise ValidationError("parameter names must be non-empty")

    dropped: list[DroppedColumn] = []
    survivors: list[int] = []
    for j in range(a.shape[1]):
        if np.ptp(a[:, j]) == 0.0:
            dropped.append(DroppedColumn(name=names[j], reason="constant"))
        else:
            survivors.append(j)

    kept: list[int] = []
    for j in survivors:
        if kept:
            m = a[:, kept + [j]]
            s = np.linalg.svd(m, compute_uv=False)
            if s[-1] <= LINEAR_COMBINATION_TOL * s[0]:
                coef, *_ = np.linalg.lstsq(a[:, kept], a[:, j], rcond=None)
                combo = tuple(
                    (names[kept[i]], float(c))
                    for i, c in enumerate(coef)
                    if abs(c) > LINEAR_COMBINATION_TOL
                )
                dropped.append(DroppedColumn(
                    name=names[j], reason="linear-combination", combination=combo,
                ))
                if report_linear_combinations:
                    terms = " + ".join(f"{c:g}*{n}" for n, c in combo)
                    print(f"{names[j]} = {terms}")
                continue
        kept.append(j)

    if not kept:
        raise ValidationError("no informative parameters")
    return ParameterInputs(
        mat=_readonly(a[:, kept]),
        names=tuple(names[j] for j in kept),
        dropped=tuple(dropped),
    )


# ---------------------------------------------------------------------------
# EVPPI estimation
# ---------------------------------------------------------------------------

def _shrink_factor(noise_var: float, signal_var: float) -> float:
    if signal_var <= 0.0:
        return 0.0
    return max(0.0, 1.0 - noise_var / signal_var)


def _tied_bin_starts(sorted_phi: np.ndarray, n_bins: int) -> np.ndarray:
    """Start indices of equal-count bins, snapped so ties share a bin."""
    n = sorted_phi.size
    targets = [round(b * n / n_bins) for b in range(1, n_bins)]
    starts = [0]
    for t in targets:
        if 0 < t < n:
            # move the boundary past any run of tied values
            t = int(np.searchsorted(sorted_phi, sorted_phi[t - 1], side="right"))
        if 0 < t < n and t > starts[-1]:
            starts.append(t)
    return np.asarray(starts, dtype=np.intp)


def _binned_fit(phi: np.ndarray, u_k: np.ndarray) -> tuple[float, float]:
    """One-parameter binned estimate at one grid point.

    Returns (estimate, mean shrink factor over arms). u_k is (n_sim, n_int).
    """
    n = phi.size
    order = np.argsort(phi, kind="stable")
    n_bins = min(MAX_BINS, int(math.isqrt(n)))
    starts = _tied_bin_starts(phi[order], max(1, n_bins))
    u_sorted = u_k[order]
    counts = np.diff(np.append(starts, n)).astype(float)
    sums = np.add.reduceat(u_sorted, starts, axis=0)
    sums_sq = np.add.reduceat(u_sorted ** 2, starts, axis=0)
    means = sums / counts[:, None]
    grand = u_k.mean(axis=0)
    weights = counts / n

    b_eff = starts.size
    fitted = np.empty_like(means)
    lambdas = []
    for t in range(u_k.shape[1]):
        within = max(0.0, float((sums_sq[:, t] - counts * means[:, t] ** 2).sum()))
        within_var = within / max(1, n - b_eff)
        noise_var = within_var * b_eff / n  # variance of a bin mean
        signal_var = float((weights * (means[:, t] - grand[t]) ** 2).sum())
        lam = _shrink_factor(noise_var, signal_var)
        lambdas.append(lam)
        fitted[:, t] = grand[t] + lam * (means[:, t] - grand[t])
    estimate = float((weights * fitted.max(axis=1)).sum() - grand.max())
    return estimate, float(np.mean(lambdas))


def _neighbour_table(phi: np.ndarray) -> np.ndarray:
    """Indices of the round(sqrt(n)) nearest rows per row (self included).

    Ties in distance resolve by row index, so the table is deterministic.
    """
    n = phi.shape[0]
    z = (phi - phi.mean(axis=0)) / phi.std(axis=0)
    m = min(n, max(2, round(math.sqrt(n))))
    table = np.empty((n, m), dtype=np.intp)
    sq = (z ** 2).sum(axis=1)
    chunk = max(1, int(1e7 // max(1, n)))  # bound the distance block at ~80 MB
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        d = sq[lo:hi, None] + sq[None, :] - 2.0 * (z[lo:hi] @ z.T)
        part = np.argpartition(d, m - 1, axis=1)[:, :m]
        dist = np.take_along_axis(d, part, axis=1)
        order = np.lexsort((part, dist), axis=1)
        table[lo:hi] = np.take_along_axis(part, order, axis=1)
    return table


def _neighbour_fit(neighbours: np.ndarray, u_k: np.ndarray) -> tuple[float, float]:
    """Nearest-neighbour local-mean estimate at one grid point."""
    m = neighbours.shape[1]
    fitted = u_k[neighbours].mean(axis=1)  # (n_sim, n_int)
    grand = u_k.mean(axis=0)
    lambdas = []
    shrunk = np.empty_like(fitted)
    for t in range(u_k.shape[1]):
        resid_var = float(((u_k[:, t] - fitted[:, t]) ** 2).mean())
        signal_var = float(((fitted[:, t] - grand[t]) ** 2).mean())
        lam = _shrink_factor(resid_var / m, signal_var)
        lambdas.append(lam)
        shrunk[:, t] = grand[t] + lam * (fitted[:, t] - grand[t])
    estimate = float(shrunk.max(axis=1).mean() - grand.max())
    return estimate, float(np.mean(lambdas))


@dataclass(frozen=True, eq=False)
class EvppiResult:
    """Per-k EVPPI for a parameter subset, alongside the EVPI for scale."""

    params: tuple[str, ...]
    evppi: np.ndarray
    evpi: np.ndarray
    method: str
    evaluated_k: tuple[float, ...]
    diagnostics: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "params": list(self.params),
            "evppi": self.evppi.tolist(),
            "evpi": self.evpi.tolist(),
            "method": self.method,
            "evaluated_k": list(self.evaluated_k),
            "diagnostics": [dict(d) for d in self.diagnostics],
        }


def _eval_indices(analysis: Analysis, k_subset) -> np.ndarray:
    n_k = analysis.n_k
    if k_subset is None:
        idx = list(range(0, n_k, THIN_STRIDE))
        if idx[-1] != n_k - 1:
            idx.append(n_k - 1)
        return np.asarray(idx, dtype=np.intp)
    if isinstance(k_subset, str):
        if k_subset == "full":
            return np.arange(n_k, dtype=np.intp)
        raise ValidationError(f"unknown k_subset {k_subset!r} (use 'full' or k values)")
    idx = sorted({analysis.grid.nearest_index(float(k)) for k in k_subset})
    if not idx:
        raise ValidationError("k_subset must not be empty")
    return np.asarray(idx, dtype=np.intp)


def evppi(
    analysis: Analysis,
    params: Union[str, Sequence[str]],
    inputs: ParameterInputs,
    method: Optional[str] = None,
    k_subset=None,
) -> EvppiResult:
    """Expected value of learning the exact value of a parameter subset.

    By default the estimate runs on a thinned grid (every 10th point plus
    the endpoint) and is linearly interpolated in between; pass
    k_subset="full" for every grid point or an iterable of k values (each
    snapped to the grid). method defaults to "binned" for one parameter and
    "nearest-neighbour" for subsets.
    """
    if isinstance(params, str):
        params = [params]
    params = tuple(params)
    if not params:
        raise ValidationError("at least one parameter name required")
    unknown = [p for p in params if p not in inputs.names]
    if unknown:
        raise ValidationError(f"unknown parameter names: {', '.join(unknown)}")
    if len(set(params)) != len(params):
        raise ValidationError("duplicate parameter names")
    if inputs.n_sim != analysis.n_sim:
        raise ValidationError(
            f"parameter rows ({inputs.n_sim}) != analysis simulations ({analysis.n_sim})"
        )
    if analysis.n_sim < MIN_RELIABLE_SIMS:
        warnings.warn(
            f"EVPPI from only {analysis.n_sim} simulations is unreliable "
            f"(fewer than {MIN_RELIABLE_SIMS})",
            UserWarning,
            stacklevel=2,
        )
    if method is None:
        method = "binned" if len(params) == 1 else "nearest-neighbour"
    if method not in ("binned", "nearest-neighbour"):
        raise ValidationError(f"unknown method {method!r}")
    if method == "binned" and len(params) != 1:
        raise ValidationError("the binned method handles exactly one parameter")

    phi = inputs.mat[:, [inputs.names.index(p) for p in params]]
    eval_idx = _eval_indices(analysis, k_subset)
    kvals = analysis.grid.values

    if method == "nearest-neighbour":
        neighbours = _neighbour_table(phi)
    else:
        phi1 = phi[:, 0]

    raw = np.empty(eval_idx.size)
    diagnostics = []
    for i, ki in enumerate(eval_idx):
        u_k = analysis.U[:, ki, :]
        if method == "binned":
            est, lam = _binned_fit(phi1, u_k)
        else:
            est, lam = _neighbour_fit(neighbours, u_k)
        raw[i] = est
        cap = float(analysis.evi[ki])
        diagnostics.append({
            "k": float(kvals[ki]),
            "raw": est,
            "clamped": float(min(max(est, 0.0), cap)),
            "evpi": cap,
            "shrinkage": lam,
        })

    clamped = np.clip(raw, 0.0, analysis.evi[eval_idx])
    curve = np.interp(kvals, kvals[eval_idx], clamped)
    curve = np.clip(curve, 0.0, analysis.evi)
    return EvppiResult(
        params=params,
        evppi=_readonly(curve),
        evpi=analysis.evi,
        method=method,
        evaluated_k=tuple(float(kvals[i]) for i in eval_idx),
        diagnostics=tuple(diagnostics),
    )


def info_rank(
    analysis: Analysis, inputs: ParameterInputs, k: float
) -> list[tuple[str, float]]:
    """Parameters ranked by their singleton EVPPI as a share of EVPI at k.

    Ties sort by name. Raises when the EVPI at k is zero (nothing to rank).
    """
    if not np.isfinite(k) or k < 0 or k > analysis.kmax:
        raise ValidationError(f"k = {k} outside the grid range [0, {analysis.kmax}]")
    ki = analysis.grid.nearest_index(k)
    evpi_k = float(analysis.evi[ki])
    if evpi_k <= 0.0:
        raise ValidationError("no decision uncertainty to rank")
    k_snap = float(analysis.grid.values[ki])
    rows = []
    for name in inputs.names:
        res = evppi(analysis, [name], inputs, k_subset=[k_snap])
        rows.append((name, float(res.evppi[ki]) / evpi_k))
    rows.sort(key=lambda item: (-item[1], item[0]))
    return rows
