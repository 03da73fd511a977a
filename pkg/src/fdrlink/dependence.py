"""Samplers for the supported p-value dependence structures and structural
checks for positive-dependence conditions on Gaussian covariances.

Generator specs are declarative, immutable descriptions; sampling is a pure
function of ``(spec, seed)``. Null p-values are marginally Uniform(0, 1)
under every Gaussian variant. Equicorrelated draws use the closed-form
square root of the equicorrelation matrix (eigenvalues ``1 - rho`` and
``1 + (n-1) * rho``), applied in O(n) per draw; a generic factorization is
used only for arbitrary covariance matrices.

The normal CDF and quantile wrappers carry a contract of max absolute error
at most 1e-12; they delegate to scipy's ``ndtr``/``ndtri``, which are
accurate to machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import ndtr, ndtri

from .study import PValueStudy

__all__ = [
    "IidUniform",
    "EquicorrelatedNormal",
    "PrdnGaussian",
    "BlockDependent",
    "TwoSidedWrap",
    "GeneratorSpec",
    "sample",
    "sample_arrays",
    "sample_null_pvalues",
    "restrict_to_nulls",
    "equicorrelated_sqrt",
    "two_sided_from_one_sided",
    "block_adjusted_pvalues",
    "prdn_check_gaussian",
    "prds_check_gaussian",
    "mtp2_sign_check",
    "conditional_slope",
    "vanishing_null_family",
    "normal_cdf",
    "normal_quantile",
]

_SEED_MASK = (1 << 64) - 1


def normal_cdf(x):
    """Standard normal CDF (max absolute error <= 1e-12)."""
    return ndtr(x)


def normal_quantile(p):
    """Standard normal quantile (max absolute error <= 1e-12)."""
    return ndtri(p)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def _check_sided(sided: str) -> None:
    if sided not in ("one", "two"):
        raise ValueError(f"sided must be 'one' or 'two', got {sided!r}")


def _pvalues_from_z(z: np.ndarray, sided: str) -> np.ndarray:
    if sided == "one":
        return ndtr(-z)
    return 2.0 * ndtr(-np.abs(z))


@dataclass(frozen=True)
class IidUniform:
    """All p-values iid Uniform(0, 1); the first `n0` are the nulls."""

    n0: int
    n1: int = 0

    def __post_init__(self) -> None:
        if int(self.n0) < 1 or int(self.n1) < 0:
            raise ValueError("need n0 >= 1 and n1 >= 0")

    @property
    def n(self) -> int:
        return self.n0 + self.n1


@dataclass(frozen=True)
class EquicorrelatedNormal:
    """Nulls from an equicorrelated Gaussian; non-nulls independent shifts.

    The null z-scores are `rho`-equicorrelated standard normals, admissible
    for ``-1/(n0-1) <= rho < 1``. Non-null z-scores are independent
    N(mu_alt, 1) draws. P-values are one- or two-sided.
    """

    n0: int
    n1: int = 0
    rho: float = 0.0
    sided: str = "one"
    mu_alt: float = 2.0

    def __post_init__(self) -> None:
        if int(self.n0) < 1 or int(self.n1) < 0:
            raise ValueError("need n0 >= 1 and n1 >= 0")
        _check_sided(self.sided)
        if not self.rho < 1.0:
            raise ValueError(f"rho must be < 1, got {self.rho}")
        if self.n0 >= 2 and self.rho < -1.0 / (self.n0 - 1) - 1e-15:
            raise ValueError(
                f"rho={self.rho} below the admissible floor -1/(n0-1) = "
                f"{-1.0 / (self.n0 - 1)}"
            )

    @property
    def n(self) -> int:
        return self.n0 + self.n1


@dataclass(frozen=True, eq=False)
class PrdnGaussian:
    """Gaussian p-values with an explicit covariance and null index set.

    `sigma` must be symmetric positive semidefinite with unit diagonal; the
    mean must vanish on the nulls.
    """

    sigma: np.ndarray
    null_idx: tuple[int, ...]
    mu: Optional[np.ndarray] = None
    sided: str = "one"
    _sqrt: np.ndarray = field(init=False, repr=False)
    _null_sqrt: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        _check_sided(self.sided)
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError("sigma must be a square matrix")
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise ValueError("sigma must be symmetric")
        if not np.allclose(np.diag(sigma), 1.0, atol=1e-10):
            raise ValueError("sigma must have unit diagonal")
        dim = sigma.shape[0]
        idx = tuple(sorted(int(i) for i in self.null_idx))
        if len(set(idx)) != len(idx) or not idx:
            raise ValueError("null_idx must be a non-empty set of distinct indices")
        if idx[0] < 0 or idx[-1] >= dim:
            raise ValueError("null_idx out of range")
        mu = np.zeros(dim) if self.mu is None else np.asarray(self.mu, dtype=float)
        if mu.shape != (dim,):
            raise ValueError("mu must match sigma's dimension")
        if np.any(mu[list(idx)] != 0.0):
            raise ValueError("mean must be zero on the nulls")
        object.__setattr__(self, "sigma", _readonly(sigma))
        object.__setattr__(self, "null_idx", idx)
        object.__setattr__(self, "mu", _readonly(mu))
        object.__setattr__(self, "_sqrt", _readonly(_psd_sqrt(sigma)))
        null_block = sigma[np.ix_(idx, idx)]
        object.__setattr__(self, "_null_sqrt", _readonly(_psd_sqrt(null_block)))

    @property
    def n(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def n0(self) -> int:
        return len(self.null_idx)

    @property
    def n1(self) -> int:
        return self.n - self.n0


@dataclass(frozen=True, eq=False)
class BlockDependent:
    """Independent blocks with an exchangeable law inside each block.

    ``within='identical'`` gives every member of a block the same uniform
    draw (the most adversarial exchangeable choice); ``'equicorrelated'``
    uses a `rho_w`-equicorrelated Gaussian inside each block, with non-null
    members shifted by `mu_alt` before the one- or two-sided transform
    (identical blocks carry no shift).
    """

    block_sizes: tuple[int, ...]
    within: str = "identical"
    rho_w: Optional[float] = None
    null_mask: Optional[np.ndarray] = None
    mu_alt: float = 2.0
    sided: str = "one"

    def __post_init__(self) -> None:
        sizes = tuple(int(b) for b in self.block_sizes)
        if not sizes or any(b < 1 for b in sizes):
            raise ValueError("block sizes must be positive")
        object.__setattr__(self, "block_sizes", sizes)
        _check_sided(self.sided)
        if self.within not in ("identical", "equicorrelated"):
            raise ValueError("within must be 'identical' or 'equicorrelated'")
        if self.within == "equicorrelated":
            if self.rho_w is None:
                raise ValueError("equicorrelated blocks need rho_w")
            bmax = max(sizes)
            if not self.rho_w < 1.0 or (bmax >= 2 and self.rho_w < -1.0 / (bmax - 1) - 1e-15):
                raise ValueError(f"rho_w={self.rho_w} inadmissible for block size {bmax}")
        n = sum(sizes)
        mask = np.ones(n, dtype=bool) if self.null_mask is None else \
            np.asarray(self.null_mask, dtype=bool)
        if mask.shape != (n,):
            raise ValueError("null mask must match the total block length")
        object.__setattr__(self, "null_mask", _readonly(mask))

    @property
    def n(self) -> int:
        return sum(self.block_sizes)

    @property
    def n0(self) -> int:
        return int(np.count_nonzero(self.null_mask))

    @property
    def n1(self) -> int:
        return self.n - self.n0

    @property
    def max_block(self) -> int:
        return max(self.block_sizes)


@dataclass(frozen=True)
class TwoSidedWrap:
    """Fold an inner one-sided generator through the two-sided transform."""

    inner: "GeneratorSpec"

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def n0(self) -> int:
        return self.inner.n0

    @property
    def n1(self) -> int:
        return self.inner.n1


GeneratorSpec = Union[IidUniform, EquicorrelatedNormal, PrdnGaussian,
                      BlockDependent, TwoSidedWrap]


def _psd_sqrt(sigma: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition."""
    vals, vecs = np.linalg.eigh(sigma)
    if vals.min() < -1e-8 * max(vals.max(), 1.0):
        raise ValueError(f"covariance is not positive semidefinite (min eig {vals.min():.3e})")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def equicorrelated_sqrt(n: int, rho: float) -> np.ndarray:
    """Closed-form symmetric square root of the n x n equicorrelation matrix.

    Built from the spectral decomposition: eigenvalue ``1 + (n-1)*rho`` on the
    all-ones direction and ``1 - rho`` on its complement.
    """
    n = int(n)
    if n < 1:
        raise ValueError("need n >= 1")
    lead = 1.0 + (n - 1) * rho
    if lead < -1e-12 or rho >= 1.0:
        raise ValueError(f"rho={rho} inadmissible for n={n}")
    a = math.sqrt(max(1.0 - rho, 0.0))
    b = math.sqrt(max(lead, 0.0))
    mat = np.full((n, n), (b - a) / n)
    mat[np.diag_indices(n)] += a
    return mat


def _equicorrelated_draw(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    """O(n) draw from N(0, equicorrelation(rho)) using the closed-form root."""
    z = rng.standard_normal(n)
    if rho == 0.0 or n == 1:
        return z
    a = math.sqrt(max(1.0 - rho, 0.0))
    b = math.sqrt(max(1.0 + (n - 1) * rho, 0.0))
    return a * z + (b - a) * z.mean()


def sample_arrays(spec: GeneratorSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw one study as raw arrays ``(pvalues, null_mask)``."""
    if isinstance(spec, IidUniform):
        p = rng.random(spec.n)
        mask = np.zeros(spec.n, dtype=bool)
        mask[: spec.n0] = True
        return p, mask

    if isinstance(spec, EquicorrelatedNormal):
        z_null = _equicorrelated_draw(rng, spec.n0, spec.rho)
        z_alt = spec.mu_alt + rng.standard_normal(spec.n1) if spec.n1 else np.empty(0)
        p = np.concatenate([_pvalues_from_z(z_null, spec.sided),
                            _pvalues_from_z(z_alt, spec.sided)])
        mask = np.zeros(spec.n, dtype=bool)
        mask[: spec.n0] = True
        return p, mask

    if isinstance(spec, PrdnGaussian):
        z = spec.mu + spec._sqrt @ rng.standard_normal(spec.n)
        mask = np.zeros(spec.n, dtype=bool)
        mask[list(spec.null_idx)] = True
        return _pvalues_from_z(z, spec.sided), mask

    if isinstance(spec, BlockDependent):
        p = np.empty(spec.n)
        start = 0
        for size in spec.block_sizes:
            stop = start + size
            if spec.within == "identical":
                p[start:stop] = rng.random()
            else:
                z = _equicorrelated_draw(rng, size, spec.rho_w)
                shift = np.where(spec.null_mask[start:stop], 0.0, spec.mu_alt)
                p[start:stop] = _pvalues_from_z(z + shift, spec.sided)
            start = stop
        return p, spec.null_mask.copy()

    if isinstance(spec, TwoSidedWrap):
        p, mask = sample_arrays(spec.inner, rng)
        return two_sided_from_one_sided(p), mask

    raise TypeError(f"unknown generator spec: {spec!r}")


def sample_null_pvalues(spec: GeneratorSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw only the null p-values of `spec` (their marginal joint law)."""
    if isinstance(spec, IidUniform):
        return rng.random(spec.n0)

    if isinstance(spec, EquicorrelatedNormal):
        return _pvalues_from_z(_equicorrelated_draw(rng, spec.n0, spec.rho), spec.sided)

    if isinstance(spec, PrdnGaussian):
        z = spec._null_sqrt @ rng.standard_normal(spec.n0)
        return _pvalues_from_z(z, spec.sided)

    if isinstance(spec, BlockDependent):
        out = []
        start = 0
        for size in spec.block_sizes:
            stop = start + size
            inside = spec.null_mask[start:stop]
            k = int(np.count_nonzero(inside))
            if k:
                if spec.within == "identical":
                    out.append(np.full(k, rng.random()))
                else:
                    z = _equicorrelated_draw(rng, size, spec.rho_w)
                    out.append(_pvalues_from_z(z[inside], spec.sided))
            start = stop
        if not out:
            raise ValueError("generator has no null components")
        return np.concatenate(out)

    if isinstance(spec, TwoSidedWrap):
        return two_sided_from_one_sided(sample_null_pvalues(spec.inner, rng))

    raise TypeError(f"unknown generator spec: {spec!r}")


def sample(spec: GeneratorSpec, seed: int) -> PValueStudy:
    """Draw one study; deterministic given ``(spec, seed)``."""
    rng = np.random.default_rng(int(seed) & _SEED_MASK)
    p, mask = sample_arrays(spec, rng)
    return PValueStudy(p, mask)


def restrict_to_nulls(spec: GeneratorSpec) -> GeneratorSpec:
    """The generator of the null components alone (a global-null spec)."""
    if isinstance(spec, IidUniform):
        return IidUniform(spec.n0, 0)
    if isinstance(spec, EquicorrelatedNormal):
        return EquicorrelatedNormal(spec.n0, 0, spec.rho, spec.sided, spec.mu_alt)
    if isinstance(spec, PrdnGaussian):
        idx = list(spec.null_idx)
        return PrdnGaussian(spec.sigma[np.ix_(idx, idx)],
                            tuple(range(len(idx))), None, spec.sided)
    if isinstance(spec, BlockDependent):
        sizes, keep = [], np.zeros(spec.n, dtype=bool)
        start = 0
        for size in spec.block_sizes:
            stop = start + size
            k = int(np.count_nonzero(spec.null_mask[start:stop]))
            if k:
                sizes.append(k)
                keep[start:stop] = spec.null_mask[start:stop]
            start = stop
        if not sizes:
            raise ValueError("generator has no null components")
        return BlockDependent(tuple(sizes), spec.within, spec.rho_w,
                              None, spec.mu_alt, spec.sided)
    if isinstance(spec, TwoSidedWrap):
        return TwoSidedWrap(restrict_to_nulls(spec.inner))
    raise TypeError(f"unknown generator spec: {spec!r}")


def two_sided_from_one_sided(p):
    """Fold a one-sided p-value: ``2p`` below 1/2, ``2(1-p)`` above.

    Maps Uniform(0, 1) to Uniform(0, 1); accepts scalars or arrays.
    """
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("p-values must lie in [0, 1]")
    folded = np.where(arr <= 0.5, 2.0 * arr, 2.0 * (1.0 - arr))
    return float(folded) if np.isscalar(p) or arr.ndim == 0 else folded


def block_adjusted_pvalues(study: PValueStudy, blocks: Sequence[Sequence[int]]) -> np.ndarray:
    """One adjusted p-value per block: ``min(b_l * min_i p_i, 1)``."""
    seen = sorted(int(i) for block in blocks for i in block)
    if seen != list(range(study.n)):
        raise ValueError("blocks must partition the study indices")
    out = np.empty(len(blocks))
    for pos, block in enumerate(blocks):
        idx = [int(i) for i in block]
        out[pos] = min(len(idx) * study.pvalues[idx].min(), 1.0)
    return out


def _as_index_set(null_idx, dim: int) -> np.ndarray:
    idx = np.asarray(sorted(set(int(i) for i in null_idx)), dtype=int)
    if idx.size == 0:
        raise ValueError("null index set must be non-empty")
    if idx[0] < 0 or idx[-1] >= dim:
        raise ValueError("null indices out of range")
    return idx


def prdn_check_gaussian(sigma: np.ndarray, null_idx) -> bool:
    """Sufficient condition for positive regression dependence within the
    nulls of one-sided Gaussian p-values: nonnegative covariance between
    every pair of null coordinates."""
    sigma = np.asarray(sigma, dtype=float)
    idx = _as_index_set(null_idx, sigma.shape[0])
    return bool(np.all(sigma[np.ix_(idx, idx)] >= 0.0))


def prds_check_gaussian(sigma: np.ndarray, null_idx) -> bool:
    """The stronger condition: nonnegativity within the nulls plus
    nonnegativity between every null and every non-null coordinate."""
    sigma = np.asarray(sigma, dtype=float)
    idx = _as_index_set(null_idx, sigma.shape[0])
    if not prdn_check_gaussian(sigma, idx):
        return False
    other = np.setdiff1d(np.arange(sigma.shape[0]), idx)
    if other.size == 0:
        return True
    return bool(np.all(sigma[np.ix_(idx, other)] >= 0.0))


def mtp2_sign_check(sigma0: np.ndarray, rel_tol: float = 1e-10) -> Optional[np.ndarray]:
    """Search for a diagonal +/-1 matrix B making ``-B @ inv(sigma0) @ B``
    nonnegative off the diagonal; None when no such B exists.

    With ``K = -inv(sigma0)``, every off-diagonal entry with ``|K_ij|`` above
    ``rel_tol * max|K|`` constrains ``b_i * b_j`` to ``sign(K_ij)``; smaller
    entries are treated as unconstrained (inverse-computation noise must not
    create spurious constraints). The constraints are solved by breadth-first
    sign propagation over the nonzero pattern, then verified.
    """
    sigma0 = np.asarray(sigma0, dtype=float)
    if sigma0.ndim != 2 or sigma0.shape[0] != sigma0.shape[1]:
        raise ValueError("sigma0 must be square")
    try:
        k_mat = -np.linalg.inv(sigma0)
    except np.linalg.LinAlgError as exc:
        raise ValueError("sigma0 is singular") from exc
    dim = k_mat.shape[0]
    tol = rel_tol * np.abs(k_mat).max()
    signs = np.zeros(dim, dtype=int)
    for root in range(dim):
        if signs[root]:
            continue
        signs[root] = 1
        queue = [root]
        while queue:
            i = queue.pop()
            for j in range(dim):
                if j == i or abs(k_mat[i, j]) <= tol:
                    continue
                required = signs[i] * (1 if k_mat[i, j] > 0 else -1)
                if signs[j] == 0:
                    signs[j] = required
                    queue.append(j)
                elif signs[j] != required:
                    return None
    b = np.where(signs == 0, 1, signs)
    check = (b[:, None] * k_mat * b[None, :]).copy()
    np.fill_diagonal(check, 0.0)
    if check.min() < -tol:
        return None
    return b


def conditional_slope(sigma0: np.ndarray, i: int) -> np.ndarray:
    """Slope of the conditional mean of the remaining null z-scores given
    coordinate `i`: ``sigma0[i, -i] / sigma0[i, i]``."""
    sigma0 = np.asarray(sigma0, dtype=float)
    dim = sigma0.shape[0]
    i = int(i)
    if not 0 <= i < dim:
        raise ValueError("index out of range")
    if sigma0[i, i] == 0.0:
        raise ValueError("conditioning coordinate has zero variance")
    row = np.delete(sigma0[i], i)
    return row / sigma0[i, i]


def vanishing_null_family(l: int, schedule: Optional[Callable[[int], tuple[int, int]]] = None
                          ) -> tuple[int, int]:
    """Integer pair ``(n, n0)`` with ``n0 * log(n0) / n`` bounded across `l`.

    The default schedule is ``n0 = l``, ``n = ceil(l * log(max(l, 2)))``,
    floored at ``n0``; pass `schedule` to override.
    """
    l = int(l)
    if l < 1:
        raise ValueError("family index must be >= 1")
    if schedule is not None:
        n, n0 = schedule(l)
        n, n0 = int(n), int(n0)
    else:
        n0 = l
        n = max(math.ceil(l * math.log(max(l, 2))), n0)
    if not 1 <= n0 <= n:
        raise ValueError(f"schedule produced invalid pair (n={n}, n0={n0})")
    return n, n0
