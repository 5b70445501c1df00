"""What-if mutators and decorators over a computed Analysis.

All operations are pure: they leave the input Analysis untouched and return
either a new Analysis (the set_* replacements) or an overlay result object
(multi-way comparison, risk aversion, mixed strategy).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    Analysis,
    WtpGrid,
    compute_best,
    compute_CEAC,
    compute_EIB,
    compute_IB,
    compute_ICER,
    compute_ol,
    compute_Ustar,
    compute_vi,
    new_analysis,
    _readonly,
)
from .errors import ValidationError

# exp() overflows past this exponent; risk-averse utilities saturate there
# and the result is flagged in RiskAversionSet.clamped.
_EXP_CLAMP = 700.0


# ---------------------------------------------------------------------------
# Replacement operations
# ---------------------------------------------------------------------------

def set_comparisons(analysis: Analysis, comparisons: Sequence[int]) -> Analysis:
    """New Analysis with a different comparator set.

    Only comparison-indexed statistics are recomputed; arm-level quantities
    (U, Ustar, ol, vi, evi, best, kstar) are shared with the input, since
    the decision set always spans every arm.
    """
    comps = tuple(int(t) for t in comparisons)
    if not comps:
        raise ValidationError("comparisons must not be empty")
    if analysis.ref in comps:
        raise ValidationError(f"comparisons contain the reference arm {analysis.ref}")
    if len(set(comps)) != len(comps):
        raise ValidationError("comparisons contain duplicates")
    for t in comps:
        if not 0 <= t < analysis.n_int:
            raise ValidationError(
                f"comparison index {t} out of range 0..{analysis.n_int - 1}"
            )
    ds = analysis.dataset
    ib = compute_IB(analysis.U, analysis.ref, comps)
    delta_e = ds.effects[:, [analysis.ref]] - ds.effects[:, list(comps)]
    delta_c = ds.costs[:, [analysis.ref]] - ds.costs[:, list(comps)]
    icer, icer_defined = compute_ICER(delta_e, delta_c)
    return Analysis(
        dataset=ds,
        ref=analysis.ref,
        comparisons=comps,
        grid=analysis.grid,
        U=analysis.U,
        Ustar=analysis.Ustar,
        ib=_readonly(ib),
        eib=_readonly(compute_EIB(ib)),
        ceac=_readonly(compute_CEAC(ib)),
        icer=_readonly(icer),
        icer_defined=_readonly(icer_defined),
        delta_e=_readonly(delta_e),
        delta_c=_readonly(delta_c),
        eu=analysis.eu,
        best=analysis.best,
        ol=analysis.ol,
        vi=analysis.vi,
        evi=analysis.evi,
        kstar=analysis.kstar,
    )


def set_reference(analysis: Analysis, ref: int) -> Analysis:
    """Full recompute with a new reference arm.

    If the new reference was a comparator, the old reference takes its place
    in the comparator set; otherwise the comparator set is kept unchanged.
    Either way, applying set_reference twice with swapped arguments restores
    the original Analysis bit for bit.
    """
    ref = int(ref)
    if not 0 <= ref < analysis.n_int:
        raise ValidationError(f"reference index {ref} out of range 0..{analysis.n_int - 1}")
    comps = list(analysis.comparisons)
    if ref in comps:
        comps[comps.index(ref)] = analysis.ref  # swap in place, keep order
    return new_analysis(
        analysis.dataset,
        ref=ref,
        comparisons=comps,
        grid=analysis.grid,
    )


def set_kmax(analysis: Analysis, kmax: float, grid_points: Optional[int] = None) -> Analysis:
    """Full recompute over a rebuilt grid with the same point count."""
    points = analysis.grid_points if grid_points is None else grid_points
    return new_analysis(
        analysis.dataset,
        ref=analysis.ref,
        comparisons=analysis.comparisons,
        grid=WtpGrid.regular(kmax, points),
    )


# ---------------------------------------------------------------------------
# Simultaneous multi-way comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultiCeResult:
    """Probability each arm is optimal, and the acceptability frontier.

    Only the reference and configured comparators take part; arms left out
    of the comparison set are omitted (they still took part in the base
    Analysis's value-of-information quantities).
    """

    analysis: Analysis
    included: tuple[int, ...]
    labels: tuple[str, ...]
    p_best: np.ndarray  # (n_k, n_included)
    ceaf: np.ndarray    # (n_k,)


def multi_ce(analysis: Analysis) -> MultiCeResult:
    """Probability of each included arm being optimal, per grid point.

    Per-simulation argmax with ties to the lowest intervention index, so the
    probabilities always sum to one. The frontier tracks the arm with
    maximum expected utility, which is not necessarily the arm with the
    highest probability.
    """
    included = tuple(sorted({analysis.ref} | set(analysis.comparisons)))
    U_inc = analysis.U[:, :, list(included)]
    winners = U_inc.argmax(axis=2)  # ties -> first (lowest included index)
    n_sim = analysis.n_sim
    n_inc = len(included)
    p_best = np.empty((analysis.n_k, n_inc))
    for j in range(n_inc):
        p_best[:, j] = (winners == j).sum(axis=0) / n_sim
    # frontier follows the expected-utility argmax over the included arms
    eu_inc = analysis.eu[:, list(included)]
    ref_pos = included.index(analysis.ref)
    best_pos = compute_best(eu_inc, ref_pos)
    ceaf = np.take_along_axis(p_best, best_pos[:, None], axis=1)[:, 0]
    return MultiCeResult(
        analysis=analysis,
        included=included,
        labels=tuple(analysis.dataset.labels[t] for t in included),
        p_best=_readonly(p_best),
        ceaf=_readonly(ceaf),
    )


# ---------------------------------------------------------------------------
# Risk aversion
# ---------------------------------------------------------------------------

def risk_averse_utility(b, r: float):
    """Exponential utility of net benefit b at risk-aversion coefficient r.

    u = (1 - exp(-r*b)) / r for r > 0; the r = 0 limit is u = b (evaluated
    analytically, not by division). Exponents beyond the overflow threshold
    are clamped so the value saturates instead of overflowing.
    """
    b = np.asarray(b, dtype=float)
    if r < 0 or not np.isfinite(r):
        raise ValidationError(f"risk-aversion coefficient must be >= 0, got {r}")
    if r == 0.0:
        return b.copy()
    x = np.minimum(-r * b, _EXP_CLAMP)
    return -np.expm1(x) / r


@dataclass(frozen=True, eq=False)
class RiskAversionOverlay:
    """Statistics recomputed under one risk-aversion coefficient."""

    r: float
    U: np.ndarray
    Ustar: np.ndarray
    ib: np.ndarray
    eib: np.ndarray
    vi: np.ndarray
    evi: np.ndarray
    clamped: bool


@dataclass(frozen=True, eq=False)
class RiskAversionSet:
    """Per-r recomputed utilities and downstream statistics."""

    analysis: Analysis
    r_values: tuple[float, ...]
    overlays: tuple[RiskAversionOverlay, ...]

    @property
    def clamped(self) -> tuple[bool, ...]:
        return tuple(o.clamped for o in self.overlays)


def apply_risk_aversion(analysis: Analysis, r_values: Sequence[float]) -> RiskAversionSet:
    """Recompute U, Ustar, ib, eib, vi and evi under each coefficient r.

    r = 0 is the linear (risk-neutral) limit and reproduces the baseline
    statistics exactly.
    """
    rs = tuple(float(r) for r in r_values)
    if not rs:
        raise ValidationError("at least one risk-aversion coefficient required")
    for r in rs:
        if not np.isfinite(r) or r < 0:
            raise ValidationError(f"risk-aversion coefficient must be >= 0, got {r}")
    overlays = []
    for r in rs:
        clamped = bool(r > 0 and np.any(-r * analysis.U > _EXP_CLAMP))
        U_r = risk_averse_utility(analysis.U, r)
        eu_r = U_r.mean(axis=0)
        Ustar_r = compute_Ustar(U_r)
        best_r = compute_best(eu_r, analysis.ref)
        ib_r = compute_IB(U_r, analysis.ref, analysis.comparisons)
        ol_r = compute_ol(U_r, Ustar_r, best_r)
        overlays.append(RiskAversionOverlay(
            r=r,
            U=_readonly(U_r),
            Ustar=_readonly(Ustar_r),
            ib=_readonly(ib_r),
            eib=_readonly(compute_EIB(ib_r)),
            vi=_readonly(compute_vi(Ustar_r, eu_r)),
            evi=_readonly(ol_r.mean(axis=0)),
            clamped=clamped,
        ))
    return RiskAversionSet(analysis=analysis, r_values=rs, overlays=tuple(overlays))


# ---------------------------------------------------------------------------
# Mixed strategy
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MixedStrategy:
    """Market-share mixture of all arms versus the optimal strategy."""

    analysis: Analysis
    shares: tuple[float, ...]
    Ubar: np.ndarray      # (n_k,)
    ol: np.ndarray        # (n_sim, n_k)
    evi: np.ndarray       # (n_k,)


def apply_mixed_strategy(
    analysis: Analysis, shares: Optional[Sequence[float]] = None
) -> MixedStrategy:
    """Expected utility and opportunity loss of a market-share mixture.

    shares is one nonnegative weight per intervention (all arms, not only
    comparators), summing to 1 within 1e-9; it is renormalised exactly.
    Default: uniform shares.
    """
    n_int = analysis.n_int
    if shares is None:
        q = np.full(n_int, 1.0 / n_int)
    else:
        q = np.asarray([float(s) for s in shares], dtype=float)
        if q.shape != (n_int,):
            raise ValidationError(f"expected {n_int} shares, got {q.size}")
        if not np.isfinite(q).all():
            raise ValidationError("shares must be finite")
        if (q < 0).any():
            raise ValidationError("shares must be nonnegative")
        total = q.sum()
        if total == 0:
            raise ValidationError("shares sum to zero")
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"shares must sum to 1 within 1e-9, got {total}")
        q = q / total
    mix = analysis.U @ q                 # (n_sim, n_k)
    ol_mixed = analysis.Ustar - mix
    return MixedStrategy(
        analysis=analysis,
        shares=tuple(q.tolist()),
        Ubar=_readonly(analysis.eu @ q),
        ol=_readonly(ol_mixed),
        evi=_readonly(ol_mixed.mean(axis=0)),
    )
