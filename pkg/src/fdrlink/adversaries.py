"""Constructions of non-null p-values that stress or maximize the false
discovery proportion.

All constructions here plant some number of zero-valued non-null p-values and
set the remaining non-nulls to one. They differ only in how the zero count is
chosen:

* the informed construction sees every null p-value and plants exactly enough
  zeros to drive a compliant procedure to the per-study FDP ceiling;
* the most-anti-conservative construction additionally respects the budget of
  available non-null slots, yielding the largest FDP any compliant outcome
  can realize;
* the Bonferroni-masked construction sees every sorted null p-value except
  the smallest, which caps how much damage it can do.

Completed studies use a canonical layout: nulls first (input order), then the
planted zeros, then the ones. Every statistic of interest is invariant to
permuting hypotheses, so the layout is a convention only.

Rank selection is performed in exact rational arithmetic (see
``procedures.min_rejections_for``), with ties resolved toward the largest
rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .procedures import min_rejections_for
from .study import PValueStudy, RejectionOutcome

__all__ = [
    "InformedAdversary",
    "MostAntiConservativeAdversary",
    "BonferroniMaskedAdversary",
    "FixedZerosAdversary",
    "AdversarySpec",
    "CompletedStudy",
    "max_fdp_rank",
    "feasible_max_fdp_rank",
    "informed_adversary",
    "most_anti_conservative",
    "masked_zero_count",
    "complete_study",
    "MASKED_STRATEGIES",
]

MASKED_STRATEGIES = ("plug_in_second", "shifted_argmax")


@dataclass(frozen=True)
class InformedAdversary:
    """Sees all null p-values; plants zeros to reach the FDP ceiling."""


@dataclass(frozen=True)
class MostAntiConservativeAdversary:
    """Plants exactly the zeros the most anti-conservative outcome rejects."""


@dataclass(frozen=True)
class BonferroniMaskedAdversary:
    """Sees all sorted null p-values except the smallest."""

    strategy: str = "shifted_argmax"

    def __post_init__(self) -> None:
        if self.strategy not in MASKED_STRATEGIES:
            raise ValueError(
                f"unknown masked strategy {self.strategy!r}; "
                f"choose from {MASKED_STRATEGIES}"
            )


@dataclass(frozen=True)
class FixedZerosAdversary:
    """Plants a fixed number of zeros regardless of the nulls."""

    zeros: int = 0

    def __post_init__(self) -> None:
        if int(self.zeros) < 0:
            raise ValueError("zero count must be nonnegative")


AdversarySpec = Union[
    InformedAdversary,
    MostAntiConservativeAdversary,
    BonferroniMaskedAdversary,
    FixedZerosAdversary,
]


@dataclass(frozen=True)
class CompletedStudy:
    """A study assembled from given nulls plus constructed non-nulls.

    ``anchor_rank`` is the sorted-null rank the construction aims at (when it
    has one), ``masked_zero_count`` the zero count chosen by a masked
    construction, and ``planted_zeros`` the number of zero-valued non-nulls
    actually placed.
    """

    study: PValueStudy
    planted_zeros: int
    anchor_rank: Optional[int] = None
    masked_zero_count: Optional[int] = None


def _checked_nulls(null_pvalues) -> np.ndarray:
    arr = np.asarray(null_pvalues, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("expected a non-empty vector of null p-values")
    if np.any((arr <= 0.0) | (arr > 1.0)):
        raise ValueError("adversary constructions require null p-values in (0, 1]")
    return arr


def _ratio_argmax(ranks: Sequence[int], ceilings: Sequence[int]) -> int:
    """Position of the largest ``rank / ceiling`` ratio; ties -> largest rank."""
    best_pos = 0
    best = Fraction(ranks[0], ceilings[0])
    for pos in range(1, len(ranks)):
        ratio = Fraction(ranks[pos], ceilings[pos])
        if ratio >= best:
            best = ratio
            best_pos = pos
    return best_pos


def max_fdp_rank(null_pvalues, n: int, alpha: float) -> int:
    """Sorted-null rank maximizing ``j / ceil(n * p_(j) / alpha)``.

    Returns a 1-based rank; ties resolve to the largest rank.
    """
    arr = _checked_nulls(null_pvalues)
    sorted_p = np.sort(arr)
    ceilings = [min_rejections_for(float(p), n, alpha) for p in sorted_p]
    ranks = list(range(1, arr.size + 1))
    return ranks[_ratio_argmax(ranks, ceilings)]


def feasible_max_fdp_rank(null_pvalues, n1: int, n: int, alpha: float) -> int:
    """Like :func:`max_fdp_rank`, restricted to ranks whose required zero
    count ``ceil(n * p_(j) / alpha) - j`` fits in the `n1` non-null slots.

    Returns 0 when no rank is feasible.
    """
    arr = _checked_nulls(null_pvalues)
    n1 = int(n1)
    sorted_p = np.sort(arr)
    ranks, ceilings = [], []
    for j, p in enumerate(sorted_p, start=1):
        c = min_rejections_for(float(p), n, alpha)
        if c - j <= n1:
            ranks.append(j)
            ceilings.append(c)
    if not ranks:
        return 0
    return ranks[_ratio_argmax(ranks, ceilings)]


def _assemble(null_pvalues: np.ndarray, zeros: int, ones: int) -> PValueStudy:
    n0 = null_pvalues.size
    pvalues = np.concatenate([null_pvalues, np.zeros(zeros), np.ones(ones)])
    mask = np.zeros(n0 + zeros + ones, dtype=bool)
    mask[:n0] = True
    return PValueStudy(pvalues, mask)


def informed_adversary(null_pvalues, n1: int, n: int, alpha: float) -> CompletedStudy:
    """Complete a study by planting ``min((ceil(n p_(j*)/alpha) - j*)_+, n1)``
    zeros at the anchor rank ``j*`` from :func:`max_fdp_rank`, with remaining
    non-nulls set to one."""
    arr = _checked_nulls(null_pvalues)
    n0, n1 = arr.size, int(n1)
    if n0 + n1 != int(n):
        raise ValueError(f"n0 + n1 must equal n, got {n0} + {n1} != {n}")
    rank = max_fdp_rank(arr, n, alpha)
    sorted_p = np.sort(arr)
    needed = min_rejections_for(float(sorted_p[rank - 1]), n, alpha) - rank
    zeros = min(max(needed, 0), n1)
    return CompletedStudy(
        study=_assemble(arr, zeros, n1 - zeros),
        planted_zeros=zeros,
        anchor_rank=rank,
    )


def most_anti_conservative(null_pvalues, n1: int, n: int, alpha: float) -> RejectionOutcome:
    """Rejection outcome of the most anti-conservative compliant procedure.

    Rejects the ``j`` smallest nulls plus the ``(ceil(n p_(j)/alpha) - j)_+``
    zero-valued non-nulls for the feasible anchor rank ``j``; rejects nothing
    when no rank is feasible. Indices refer to the canonical completed-study
    layout (both :func:`informed_adversary` and the most-anti-conservative
    completion place at least the required zeros right after the nulls).
    """
    arr = _checked_nulls(null_pvalues)
    n0, n1 = arr.size, int(n1)
    if n0 + n1 != int(n):
        raise ValueError(f"n0 + n1 must equal n, got {n0} + {n1} != {n}")
    rank = feasible_max_fdp_rank(arr, n1, n, alpha)
    if rank == 0:
        return RejectionOutcome.empty()
    sorted_p = np.sort(arr)
    needed = max(min_rejections_for(float(sorted_p[rank - 1]), n, alpha) - rank, 0)
    null_order = np.argsort(arr, kind="stable")
    rejected = list(null_order[:rank]) + list(range(n0, n0 + needed))
    return RejectionOutcome(rejected, n_false=rank)


def masked_zero_count(upper_sorted_nulls, n: int, n1: int, alpha: float,
                      strategy: str = "shifted_argmax") -> int:
    """Zero count chosen by a construction that never sees the smallest null.

    The input is the sorted null p-values with the smallest withheld, i.e.
    ranks 2..n0. Strategies:

    * ``plug_in_second``: duplicate the second-smallest null as a stand-in
      for the withheld one and run the informed rank selection on the result;
    * ``shifted_argmax``: maximize ``j / ceil(n * p_(j) / alpha)`` over ranks
      j >= 2 only and plant the zeros that rank calls for.

    The result is clamped to [0, n1].
    """
    if strategy not in MASKED_STRATEGIES:
        raise ValueError(f"unknown masked strategy {strategy!r}")
    arr = _checked_nulls(upper_sorted_nulls)
    if np.any(np.diff(arr) < 0.0):
        raise ValueError("upper null p-values must be sorted ascending")
    n, n1 = int(n), int(n1)

    if strategy == "plug_in_second":
        pseudo = np.concatenate([arr[:1], arr])
        rank = max_fdp_rank(pseudo, n, alpha)
        needed = min_rejections_for(float(np.sort(pseudo)[rank - 1]), n, alpha) - rank
        return min(max(needed, 0), n1)

    ranks = list(range(2, arr.size + 2))
    ceilings = [min_rejections_for(float(p), n, alpha) for p in arr]
    pos = _ratio_argmax(ranks, ceilings)
    needed = ceilings[pos] - ranks[pos]
    return min(max(needed, 0), n1)


def complete_study(null_pvalues, n1: int, n: int, alpha: float,
                   adversary: AdversarySpec) -> CompletedStudy:
    """Apply an adversary description to the given nulls."""
    arr = _checked_nulls(null_pvalues)
    n0, n1 = arr.size, int(n1)
    if n0 + n1 != int(n):
        raise ValueError(f"n0 + n1 must equal n, got {n0} + {n1} != {n}")

    if isinstance(adversary, InformedAdversary):
        return informed_adversary(arr, n1, n, alpha)

    if isinstance(adversary, MostAntiConservativeAdversary):
        rank = feasible_max_fdp_rank(arr, n1, n, alpha)
        if rank == 0:
            zeros = 0
        else:
            sorted_p = np.sort(arr)
            zeros = max(min_rejections_for(float(sorted_p[rank - 1]), n, alpha) - rank, 0)
        return CompletedStudy(
            study=_assemble(arr, zeros, n1 - zeros),
            planted_zeros=zeros,
            anchor_rank=rank,
        )

    if isinstance(adversary, BonferroniMaskedAdversary):
        if n0 < 2:
            raise ValueError("masked construction needs at least two nulls")
        sorted_p = np.sort(arr)
        t = masked_zero_count(sorted_p[1:], n, n1, alpha, adversary.strategy)
        return CompletedStudy(
            study=_assemble(arr, t, n1 - t),
            planted_zeros=t,
            masked_zero_count=t,
        )

    if isinstance(adversary, FixedZerosAdversary):
        zeros = int(adversary.zeros)
        if zeros > n1:
            raise ValueError(f"cannot plant {zeros} zeros in {n1} non-null slots")
        return CompletedStudy(
            study=_assemble(arr, zeros, n1 - zeros),
            planted_zeros=zeros,
        )

    raise TypeError(f"unknown adversary spec: {adversary!r}")
