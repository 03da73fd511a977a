"""Step-up and step-down rejection procedures, compliance checking, the Simes
combination p-value, and the per-study ceiling on the false discovery
proportion.

Numerical conventions
---------------------
* Procedure thresholds compare p-values against ``alpha * j / n`` with plain
  binary floating-point comparison; no epsilon is added.
* Quantities of the form ``ceil(n * p / alpha)`` go through :func:`snap_ceil`,
  a ceiling that snaps values within one ulp of an integer before rounding
  up; this keeps rejection counts consistent with the float threshold
  comparisons and avoids ``ceil(2.0000000000000004) == 3`` artifacts.
  Ratios of these integer counts are then exact rationals.
* Ties among equal p-values are broken by original index (stable sort), so
  rejection sets are deterministic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .study import PValueStudy, RejectionOutcome

__all__ = [
    "bh_step_up",
    "bh_step_down",
    "is_compliant",
    "simes_pvalue",
    "simes_rejects",
    "fdp_upper_bound",
    "min_rejections_for",
    "snap_ceil",
    "snap_ceil_array",
]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    return alpha


def _check_nulls(null_pvalues) -> np.ndarray:
    arr = np.asarray(null_pvalues, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty vector of null p-values")
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(~np.isfinite(arr)):
        raise ValueError("null p-values must lie in [0, 1]")
    return arr


def snap_ceil(x: float) -> int:
    """Ceiling with a guard that snaps values within one ulp of an integer.

    Prevents ``ceil(2.0000000000000004) == 3`` artifacts when the argument
    was produced by a float multiply/divide chain.
    """
    nearest = round(x)
    if abs(x - nearest) <= math.ulp(x):
        return int(nearest)
    return int(math.ceil(x))


def snap_ceil_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`snap_ceil`; returns integer-valued floats."""
    nearest = np.rint(x)
    return np.where(np.abs(x - nearest) <= np.spacing(x), nearest, np.ceil(x))


def min_rejections_for(pvalue: float, n: int, alpha: float) -> int:
    """Smallest rejection count R for which ``pvalue <= alpha * R / n``.

    Computed as ``ceil(n * pvalue / alpha)`` with the same guarded ceiling as
    the Monte Carlo paths, which keeps it consistent with the float threshold
    comparisons the procedures use (e.g. a p-value of 0.5 at ``alpha * 5 / 6``
    when ``0.6 * 5`` rounds to exactly 3.0).
    """
    if pvalue <= 0.0:
        raise ValueError("min_rejections_for requires a positive p-value")
    return max(snap_ceil(int(n) * pvalue / alpha), 1)


def bh_step_up(study: PValueStudy, alpha: float) -> RejectionOutcome:
    """Step-up procedure: reject the R smallest p-values, where R is the last
    sorted position j with ``p_(j) <= alpha * j / n``."""
    alpha = _check_alpha(alpha)
    n = study.n
    p = study.pvalues
    sorted_p = np.sort(p)
    thresholds = alpha * np.arange(1, n + 1) / n
    passing = np.nonzero(sorted_p <= thresholds)[0]
    if passing.size == 0:
        return RejectionOutcome.empty()
    r = int(passing[-1]) + 1
    cutoff = alpha * r / n
    rejected = np.nonzero(p <= cutoff)[0]
    return RejectionOutcome.from_indices(study, rejected)


def bh_step_down(study: PValueStudy, alpha: float) -> RejectionOutcome:
    """Step-down variant: reject the largest prefix of sorted p-values whose
    every member passes its own threshold ``alpha * j / n``."""
    alpha = _check_alpha(alpha)
    n = study.n
    order = np.argsort(study.pvalues, kind="stable")
    sorted_p = study.pvalues[order]
    thresholds = alpha * np.arange(1, n + 1) / n
    ok = sorted_p <= thresholds
    if not ok[0]:
        return RejectionOutcome.empty()
    r = n if ok.all() else int(np.argmin(ok))
    return RejectionOutcome.from_indices(study, order[:r])


def is_compliant(study: PValueStudy, outcome: RejectionOutcome, alpha: float) -> bool:
    """True iff every rejected p-value satisfies ``p <= alpha * R / n`` for
    the outcome's own rejection count R. Vacuously true for empty outcomes."""
    alpha = _check_alpha(alpha)
    idx = sorted(outcome.rejected)
    if idx and (idx[0] < 0 or idx[-1] >= study.n):
        raise ValueError("outcome indices out of range for the study")
    if not idx:
        return True
    cutoff = alpha * outcome.n_rejected / study.n
    return bool(np.all(study.pvalues[idx] <= cutoff))


def simes_pvalue(null_pvalues: Sequence[float]) -> float:
    """Simes combination of the null p-values: ``min_j n0 * p_(j) / j``.

    Never exceeds 1 for inputs in [0, 1] because the last term is ``p_(n0)``;
    the value is clamped anyway to guard against rounding.
    """
    arr = _check_nulls(null_pvalues)
    n0 = arr.size
    sorted_p = np.sort(arr)
    ranks = np.arange(1, n0 + 1)
    return float(min(np.min(n0 * sorted_p / ranks), 1.0))


def simes_rejects(null_pvalues: Sequence[float], x: float) -> bool:
    """Whether the Simes combination falls at or below level `x`."""
    x = float(x)
    if not 0.0 < x < 1.0:
        raise ValueError(f"level x must lie strictly inside (0, 1), got {x}")
    return simes_pvalue(null_pvalues) <= x


def fdp_upper_bound(null_pvalues: Sequence[float], n: int, alpha: float) -> Fraction:
    """Ceiling on the false discovery proportion of any compliant outcome.

    Returns ``min(max_j j / ceil(n * p_(j) / alpha), 1)`` over the sorted null
    p-values, as an exact rational. A zero null p-value makes the bound 1:
    rejecting it alone already realizes FDP = 1, matching the limit p -> 0+.
    """
    alpha = _check_alpha(alpha)
    arr = _check_nulls(null_pvalues)
    n = int(n)
    if n < arr.size:
        raise ValueError("n must be at least the number of null p-values")
    if np.any(arr == 0.0):
        return Fraction(1)
    best = Fraction(0)
    for j, p in enumerate(np.sort(arr), start=1):
        best = max(best, Fraction(j, min_rejections_for(float(p), n, alpha)))
    return min(best, Fraction(1))
