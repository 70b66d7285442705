"""Equidistant-cell histograms and Shannon/Renyi/Tsallis entropy estimators.

All entropies are computed over the discrete cell-probability vector and
reported in nats.  No differential-entropy correction (adding the log of the
cell width) is applied, so the values are nonnegative and bounded by ``ln m``
for ``m`` cells.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateSupportError, DomainError

__all__ = [
    "DEFAULT_ORDER_GRID",
    "EntropyReport",
    "FiniteVarianceWarning",
    "Histogram",
    "build_histogram",
    "entropy_report",
    "renyi",
    "shannon",
    "tsallis",
]

DEFAULT_ORDER_GRID = (1.4, 1.45, 1.5)

# Tsallis indices for finite-variance data belong to [1, 5/3); outside that
# window the estimator is still defined, so we warn rather than refuse.
_Q_LOW, _Q_HIGH = 1.0, 5.0 / 3.0

# orders/indices within this distance of 1 are routed through the Shannon
# branch (the analytic limit of both families)
_ONE_TOL = 1e-8

_EQUIDISTANT_RTOL = 1e-12


class FiniteVarianceWarning(UserWarning):
    """A Tsallis index lies outside [1, 5/3), the finite-variance window."""


@dataclass(frozen=True)
class Histogram:
    """Counts and probabilities over equidistant cells.

    ``edges`` has length ``m + 1`` and strictly increasing, equally spaced
    entries; ``counts`` and ``probs`` have length ``m``.  Instances are
    immutable and safe to share across concurrent entropy evaluations.
    """

    edges: np.ndarray
    counts: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts)
        probs = np.asarray(self.probs, dtype=float)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "probs", probs)

        if edges.ndim != 1 or edges.size < 2:
            raise DomainError("edges must be a 1-D vector of at least two boundaries")
        m = edges.size - 1
        if counts.shape != (m,) or probs.shape != (m,):
            raise DomainError(
                f"counts and probs must have length {m} to match {m + 1} edges"
            )
        widths = np.diff(edges)
        mean_width = float(widths.mean())
        if mean_width <= 0 or np.any(widths <= 0):
            raise DomainError("edges must be strictly increasing")
        if float(np.abs(widths - mean_width).max()) > _EQUIDISTANT_RTOL * mean_width:
            raise DomainError("cells must be equidistant")
        if np.any(probs < 0):
            raise DomainError("cell probabilities must be nonnegative")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise DomainError(f"cell probabilities must sum to 1, got {probs.sum()!r}")

    @property
    def m(self) -> int:
        """Number of cells."""
        return self.counts.size

    @property
    def n(self) -> int:
        """Number of binned observations."""
        return int(self.counts.sum())

    @classmethod
    def from_counts(cls, counts, lo: float = 0.0, hi: float = 1.0) -> "Histogram":
        """Build a histogram from raw cell counts over [lo, hi]."""
        c = np.asarray(counts)
        total = int(c.sum())
        if total <= 0:
            raise DomainError("counts must sum to a positive total")
        edges = np.linspace(lo, hi, c.size + 1)
        return cls(edges=edges, counts=c, probs=c / total)


@dataclass(frozen=True)
class EntropyReport:
    """Entropy values for one series: Shannon plus Renyi/Tsallis grids.

    ``renyi`` and ``tsallis`` are (order, value) pairs in grid order; values
    are in nats.
    """

    shannon: float
    renyi: tuple[tuple[float, float], ...]
    tsallis: tuple[tuple[float, float], ...]
    bins: int
    n_obs: int


def build_histogram(returns, m: int) -> Histogram:
    """Bin a sample into ``m`` equidistant cells spanning [min, max].

    All cells are closed on the left and open on the right except the last,
    which also includes the maximum, so every observation lands in exactly
    one cell.  A sample with zero range cannot be binned and raises
    :class:`DegenerateSupportError`.
    """
    x = np.asarray(getattr(returns, "returns", returns), dtype=float)
    if x.ndim != 1:
        raise DomainError(f"expected a 1-D sample, got shape {x.shape}")
    if x.size == 0:
        raise DomainError("cannot bin an empty sample")
    if not np.all(np.isfinite(x)):
        raise DomainError("sample contains non-finite values")
    if m < 1:
        raise DomainError(f"bin count must be >= 1, got {m}")

    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        raise DegenerateSupportError(
            f"all {x.size} observations equal {lo!r}; histogram support has zero width"
        )
    counts, edges = np.histogram(x, bins=m, range=(lo, hi))
    return Histogram(edges=edges, counts=counts, probs=counts / x.size)


def _positive_probs(h: Histogram) -> np.ndarray:
    # empty cells contribute 0 to every entropy sum
    p = h.probs
    return p[p > 0.0]


def shannon(h: Histogram) -> float:
    """-sum p_i ln p_i over the occupied cells, in nats."""
    p = _positive_probs(h)
    return float(-(p * np.log(p)).sum())


def renyi(h: Histogram, alpha: float) -> float:
    """ln(sum p_i**alpha) / (1 - alpha) for alpha > 0, in nats.

    Orders within 1e-8 of 1 are evaluated as Shannon entropy, the analytic
    limit at alpha = 1.
    """
    if not math.isfinite(alpha) or alpha <= 0:
        raise DomainError(f"Renyi order must be positive, got {alpha}")
    if abs(alpha - 1.0) <= _ONE_TOL:
        return shannon(h)
    p = _positive_probs(h)
    return float(logsumexp(alpha * np.log(p)) / (1.0 - alpha))


def tsallis(h: Histogram, q: float) -> float:
    """(1 - sum p_i**q) / (q - 1) for q >= 0.

    Indices within 1e-8 of 1 are evaluated as Shannon entropy, the analytic
    limit at q = 1.
    """
    if not math.isfinite(q) or q < 0:
        raise DomainError(f"Tsallis index must be nonnegative, got {q}")
    if abs(q - 1.0) <= _ONE_TOL:
        return shannon(h)
    p = _positive_probs(h)
    return float((1.0 - (p ** q).sum()) / (q - 1.0))


def entropy_report(returns, m: int | None = None,
                   alpha_grid: tuple[float, ...] = DEFAULT_ORDER_GRID,
                   q_grid: tuple[float, ...] = DEFAULT_ORDER_GRID) -> EntropyReport:
    """Build one histogram and evaluate all three entropy families on it.

    ``m`` defaults to ceil(sqrt(n)).  Tsallis indices outside [1, 5/3) emit
    :class:`FiniteVarianceWarning` but are still evaluated.
    """
    x = np.asarray(getattr(returns, "returns", returns), dtype=float)
    if len(alpha_grid) == 0 or len(q_grid) == 0:
        raise DomainError("order grids must be nonempty")
    if m is None:
        m = math.ceil(math.sqrt(x.size)) if x.size else 1
    for q in q_grid:
        if not (_Q_LOW <= q < _Q_HIGH):
            warnings.warn(
                f"Tsallis index q={q:g} lies outside [1, 5/3), the index window "
                f"for finite-variance data",
                FiniteVarianceWarning,
                stacklevel=2,
            )

    h = build_histogram(x, m)
    return EntropyReport(
        shannon=shannon(h),
        renyi=tuple((float(a), renyi(h, a)) for a in alpha_grid),
        tsallis=tuple((float(q), tsallis(h, q)) for q in q_grid),
        bins=h.m,
        n_obs=h.n,
    )
