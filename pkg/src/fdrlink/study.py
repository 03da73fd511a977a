"""Core value types: a p-value study and the outcome of a rejection procedure.

Both types are immutable after construction (frozen dataclasses over
read-only numpy arrays) and therefore safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

__all__ = ["PValueStudy", "RejectionOutcome"]


def _readonly_float_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    arr.setflags(write=False)
    return arr


def _readonly_bool_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=bool, copy=True)
    if arr.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PValueStudy:
    """A vector of p-values together with a mask marking the true nulls."""

    pvalues: np.ndarray
    null_mask: np.ndarray

    def __init__(self, pvalues, null_mask) -> None:
        object.__setattr__(self, "pvalues", _readonly_float_vector(pvalues))
        object.__setattr__(self, "null_mask", _readonly_bool_vector(null_mask))
        if self.pvalues.size < 1:
            raise ValueError("a study needs at least one p-value")
        if self.null_mask.size != self.pvalues.size:
            raise ValueError(
                f"null mask length {self.null_mask.size} does not match "
                f"{self.pvalues.size} p-values"
            )
        if np.any(~np.isfinite(self.pvalues)):
            raise ValueError("p-values must be finite")
        if np.any((self.pvalues < 0.0) | (self.pvalues > 1.0)):
            raise ValueError("p-values must lie in [0, 1]")

    @classmethod
    def global_null(cls, pvalues) -> "PValueStudy":
        """Study in which every hypothesis is a true null."""
        arr = np.asarray(pvalues, dtype=float)
        return cls(arr, np.ones(arr.size, dtype=bool))

    @property
    def n(self) -> int:
        return int(self.pvalues.size)

    @property
    def n0(self) -> int:
        return int(np.count_nonzero(self.null_mask))

    @property
    def n1(self) -> int:
        return self.n - self.n0

    @property
    def pi0(self) -> float:
        return self.n0 / self.n

    @property
    def null_pvalues(self) -> np.ndarray:
        return self.pvalues[self.null_mask]

    @property
    def nonnull_pvalues(self) -> np.ndarray:
        return self.pvalues[~self.null_mask]

    def permuted(self, order) -> "PValueStudy":
        """The same study with hypotheses re-indexed by `order`."""
        idx = np.asarray(order, dtype=int)
        if sorted(idx.tolist()) != list(range(self.n)):
            raise ValueError("order must be a permutation of the study indices")
        return PValueStudy(self.pvalues[idx], self.null_mask[idx])


@dataclass(frozen=True)
class RejectionOutcome:
    """A rejection set with its counts and realized false discovery proportion.

    ``fdp`` is kept as an exact ratio of integers so that invariant tests can
    compare outcomes without any floating-point rounding; convert with
    ``float(outcome.fdp)`` for aggregation.
    """

    rejected: frozenset[int]
    n_rejected: int
    n_false: int
    fdp: Fraction

    def __init__(self, rejected: Iterable[int], n_false: int) -> None:
        rejected_set = frozenset(int(i) for i in rejected)
        n_rejected = len(rejected_set)
        n_false = int(n_false)
        if n_false < 0 or n_false > n_rejected:
            raise ValueError("false rejection count must lie in [0, |rejected|]")
        object.__setattr__(self, "rejected", rejected_set)
        object.__setattr__(self, "n_rejected", n_rejected)
        object.__setattr__(self, "n_false", n_false)
        object.__setattr__(self, "fdp", Fraction(n_false, max(n_rejected, 1)))

    @classmethod
    def from_indices(cls, study: PValueStudy, indices: Iterable[int]) -> "RejectionOutcome":
        """Build an outcome for `study`, counting false rejections from its null mask."""
        idx = sorted(int(i) for i in set(int(i) for i in indices))
        if idx and (idx[0] < 0 or idx[-1] >= study.n):
            raise ValueError("rejected indices out of range for the study")
        n_false = int(np.count_nonzero(study.null_mask[idx])) if idx else 0
        return cls(idx, n_false)

    @classmethod
    def empty(cls) -> "RejectionOutcome":
        return cls((), 0)
