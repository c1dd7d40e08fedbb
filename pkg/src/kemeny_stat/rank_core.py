"""Kemeny-metric scoring and the rank correlation estimators built on it.

Everything in this module reduces to one primitive: score every unordered pair
(k, l) of observations with

    kappa_kl(x) = +sqrt(1/2) if x_k > x_l,  -sqrt(1/2) if x_k < x_l,  0 if tied.

The sqrt(1/2) scale is carried analytically, never stored: pair codes live in
{-1, 0, +1} and the scale reappears only where a formula needs it.  From the
joint classification of pairs (concordant / discordant / tied in x only / tied
in y only / tied in both) follow

* the affine pair distance  d(x, y) = m + (D - C)  with m = n(n-1)/2,
* the exact metric variant  d*(x, y) = 2 D + T_x + T_y   (0/1/2 per pair),
* the correlation           tau_kappa = (C - D) / m,
* the tie-aware Kendall     tau_b = (C - D) / sqrt((m - tx)(m - ty)),
* the rank image            x_vec[l] = sqrt(1/2) (#{x_k > x_l} - #{x_k < x_l}),
* and the Spearman form     rho_s = <x_vec, y_vec> / (|x_vec| |y_vec|),

which on midranks coincides with the classical average-rank Spearman
coefficient.  The affine distance is affine rather than metric: two identical
all-tied vectors sit at distance m, not 0.  The exact variant d* repairs that
(it is a true metric) and the two are linked by d = d* + T_xy.

Inputs may contain +inf/-inf (they order and tie like any other value); NaN is
rejected at construction.  Pair classification has an O(n^2) sign-matrix
reference implementation and an O(n log n) lexsort + merge-count path; the two
must agree exactly and are differentially tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import DataError, DegenerateError, DomainError

__all__ = [
    "SCALE",
    "ScoreVector",
    "PairSigns",
    "ConcordanceCounts",
    "RankVector",
    "as_score_vector",
    "pair_signs",
    "pair_stats",
    "kemeny_distance_affine",
    "kemeny_distance_exact",
    "kemeny_tau",
    "kemeny_variance",
    "rank_vector",
    "spearman_rho",
    "spearman_distance",
    "arcsine_r",
    "kendall_tau_b",
    "greiner_sin",
    "tie_block_sizes",
]

#: The analytic scale sqrt(1/2) of a single pair score.
SCALE: float = math.sqrt(0.5)


@dataclass(frozen=True)
class ScoreVector:
    """A vector of n >= 2 observations on the extended real line.

    Ties are meaningful, +-inf are legal values, NaN is refused because it
    breaks the trichotomy every pair score relies on.
    """

    values: np.ndarray

    def __init__(self, values: Iterable[float] | np.ndarray) -> None:
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            raise DataError(f"score vector must be 1-d, got shape {arr.shape}")
        if arr.size < 2:
            raise DataError(
                f"need at least 2 observations for pair structure, got {arr.size}"
            )
        if np.isnan(arr).any():
            bad = int(np.flatnonzero(np.isnan(arr))[0])
            raise DataError(f"NaN at position {bad}; NaN values are rejected")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def pair_count(self) -> int:
        """m = n(n-1)/2, the number of unordered pairs."""
        return self.n * (self.n - 1) // 2


def as_score_vector(x: ScoreVector | Iterable[float] | np.ndarray) -> ScoreVector:
    """Coerce an array-like to a validated :class:`ScoreVector`."""
    return x if isinstance(x, ScoreVector) else ScoreVector(x)


@dataclass(frozen=True)
class PairSigns:
    """Signs of all unordered pairs of one vector, in (k, l), k < l lex order.

    ``codes[p] = sign(x_k - x_l)`` as an int8 in {-1, 0, +1}; the sqrt(1/2)
    magnitude of the underlying score is applied analytically where needed.
    """

    n: int
    codes: np.ndarray

    def __post_init__(self) -> None:
        m = self.n * (self.n - 1) // 2
        if self.codes.size != m:
            raise DataError(
                f"expected {m} pair codes for n={self.n}, got {self.codes.size}"
            )


@dataclass(frozen=True)
class ConcordanceCounts:
    """Joint pair classification of two equal-length vectors.

    The five counts partition the m = n(n-1)/2 unordered pairs:
    ``concordant + discordant + tied_x + tied_y + tied_both == m``.
    ``tied_x`` counts pairs tied in x only, ``tied_both`` pairs tied in both.
    """

    n: int
    concordant: int
    discordant: int
    tied_x: int
    tied_y: int
    tied_both: int

    def __post_init__(self) -> None:
        total = (
            self.concordant
            + self.discordant
            + self.tied_x
            + self.tied_y
            + self.tied_both
        )
        if total != self.pair_count:
            raise DataError(
                f"pair classes sum to {total}, expected m={self.pair_count}"
            )

    @property
    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def net_concordance(self) -> int:
        """C - D, the integer sufficient statistic for every estimator here."""
        return self.concordant - self.discordant


@dataclass(frozen=True)
class RankVector:
    """The Kemeny rank image of a vector.

    ``counts[l] = #{x_k > x_l} - #{x_k < x_l}`` are integers summing to
    exactly 0 (skew symmetry of the pair scores); ``entries`` are the
    sqrt(1/2)-scaled values used by the Spearman-form estimator.
    """

    counts: np.ndarray

    def __post_init__(self) -> None:
        if int(self.counts.sum()) != 0:
            raise DataError("rank vector counts must sum to 0")

    @property
    def entries(self) -> np.ndarray:
        return SCALE * self.counts.astype(float)


# ----------------------------------------------------------------------------
# pair classification
# ----------------------------------------------------------------------------


def pair_signs(x: ScoreVector | Iterable[float]) -> PairSigns:
    """Score all unordered pairs of ``x``; codes in {-1, 0, +1}, lex order."""
    v = as_score_vector(x).values
    n = v.size
    iu, ju = np.triu_indices(n, k=1)
    # sign of a difference involving equal infinities would be NaN via
    # subtraction, so compare rather than subtract
    codes = (v[iu] > v[ju]).astype(np.int8) - (v[iu] < v[ju]).astype(np.int8)
    return PairSigns(n=int(n), codes=codes)


def _pair_stats_quadratic(xv: np.ndarray, yv: np.ndarray) -> ConcordanceCounts:
    """O(n^2) reference: classify every pair from full sign matrices."""
    n = xv.size
    sx = (xv[:, None] > xv[None, :]).astype(np.int8) - (
        xv[:, None] < xv[None, :]
    ).astype(np.int8)
    sy = (yv[:, None] > yv[None, :]).astype(np.int8) - (
        yv[:, None] < yv[None, :]
    ).astype(np.int8)
    iu = np.triu_indices(n, k=1)
    px, py = sx[iu].astype(np.int64), sy[iu].astype(np.int64)
    conc = int(np.count_nonzero(px * py == 1))
    disc = int(np.count_nonzero(px * py == -1))
    tied_x = int(np.count_nonzero((px == 0) & (py != 0)))
    tied_y = int(np.count_nonzero((px != 0) & (py == 0)))
    tied_both = int(np.count_nonzero((px == 0) & (py == 0)))
    return ConcordanceCounts(int(n), conc, disc, tied_x, tied_y, tied_both)


def _tied_pair_sum(sorted_vals: np.ndarray) -> int:
    """Sum of t(t-1)/2 over the tie blocks of an already sorted array."""
    boundaries = np.flatnonzero(sorted_vals[1:] != sorted_vals[:-1])
    sizes = np.diff(np.concatenate(([0], boundaries + 1, [sorted_vals.size])))
    return int((sizes * (sizes - 1) // 2).sum())


def _count_strict_inversions(a: np.ndarray) -> int:
    """Pairs (i < j) with a[i] > a[j], by bottom-up merge passes.

    Each pass merges adjacent sorted runs; for every right-run element the
    number of strictly greater left-run elements falls out of a searchsorted.
    Equal values are never counted, which is exactly the tie handling the
    discordance count needs.
    """
    a = np.asarray(a, dtype=float).copy()
    n = a.size
    inversions = 0
    width = 1
    while width < n:
        for start in range(0, n, 2 * width):
            mid = start + width
            end = min(start + 2 * width, n)
            if mid >= end:
                continue
            left = a[start:mid]
            right = a[mid:end]
            inversions += int(
                (left.size - np.searchsorted(left, right, side="right")).sum()
            )
            a[start:end] = np.sort(a[start:end], kind="stable")
        width *= 2
    return inversions


def _pair_stats_merge(xv: np.ndarray, yv: np.ndarray) -> ConcordanceCounts:
    """O(n log n) path: lexsort by (x, y), then merge-count discordances.

    After sorting by x with y as tiebreaker, a discordant pair is precisely a
    strict inversion in the y sequence (within an x tie block y is ascending,
    so such pairs can never be counted).  Tie-pair totals come from run
    lengths; concordant pairs are whatever remains of m.
    """
    n = xv.size
    m = n * (n - 1) // 2
    order = np.lexsort((yv, xv))
    xs, ys = xv[order], yv[order]

    tied_pairs_x = _tied_pair_sum(xs)
    joint_change = (xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1])
    boundaries = np.flatnonzero(joint_change)
    sizes = np.diff(np.concatenate(([0], boundaries + 1, [n])))
    tied_pairs_both = int((sizes * (sizes - 1) // 2).sum())
    tied_pairs_y = _tied_pair_sum(np.sort(yv, kind="stable"))

    discordant = _count_strict_inversions(ys)
    tied_x = tied_pairs_x - tied_pairs_both
    tied_y = tied_pairs_y - tied_pairs_both
    concordant = m - discordant - tied_x - tied_y - tied_pairs_both
    return ConcordanceCounts(
        int(n), concordant, discordant, tied_x, tied_y, tied_pairs_both
    )


def pair_stats(
    x: ScoreVector | Iterable[float],
    y: ScoreVector | Iterable[float],
    *,
    method: Literal["merge", "quadratic"] = "merge",
) -> ConcordanceCounts:
    """Classify all unordered pairs of (x, y) jointly.

    ``method="merge"`` is the O(n log n) default; ``"quadratic"`` is the
    O(n^2) reference kept for differential testing.  Both are exact.
    """
    vx = as_score_vector(x)
    vy = as_score_vector(y)
    if vx.n != vy.n:
        raise DataError(f"length mismatch: x has {vx.n} observations, y has {vy.n}")
    if method == "quadratic":
        return _pair_stats_quadratic(vx.values, vy.values)
    if method == "merge":
        return _pair_stats_merge(vx.values, vy.values)
    raise DomainError(f"unknown pair_stats method {method!r}")


# ----------------------------------------------------------------------------
# distances and correlations
# ----------------------------------------------------------------------------


def kemeny_distance_affine(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> int:
    """Affine pair distance d(x, y) = m + (D - C), an integer in [0, n^2 - n].

    0 iff the vectors induce identical strict orders; maximal iff exact
    reversals.  Affine, not metric: d(x, x) = m - (# untied pairs), so two
    identical all-tied vectors sit at distance m.  See
    :func:`kemeny_distance_exact` for the metric variant.
    """
    c = pair_stats(x, y)
    return c.pair_count + c.discordant - c.concordant


def kemeny_distance_exact(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> int:
    """Exact-metric pair distance: per pair 0 (same relation), 1 (decided vs
    tied), or 2 (opposite decisions); summed.

    Equals ``kemeny_distance_affine(x, y) - tied_both`` and satisfies the
    metric axioms, including d*(x, x) = 0 for tied inputs.
    """
    c = pair_stats(x, y)
    return 2 * c.discordant + c.tied_x + c.tied_y


def kemeny_tau(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> float:
    """tau_kappa = (C - D) / m, in [-1, 1].

    The m denominator is tie-free, so any tie shrinks |tau_kappa|; against a
    constant vector the estimator is 0, not undefined.
    """
    c = pair_stats(x, y)
    return c.net_concordance / c.pair_count


def kemeny_variance(x: ScoreVector | Iterable[float]) -> int:
    """Sum of squared pair scores: the number of untied unordered pairs.

    Each untied pair contributes 2 * (1/2) across its two ordered slots.
    Equals m iff x is tie-free and 0 iff x is constant.
    """
    v = as_score_vector(x)
    xs = np.sort(v.values, kind="stable")
    return v.pair_count - _tied_pair_sum(xs)


def tie_block_sizes(x: ScoreVector | Iterable[float]) -> np.ndarray:
    """Sizes of the tie blocks of x (sorted order), as an int64 array."""
    v = as_score_vector(x)
    xs = np.sort(v.values, kind="stable")
    boundaries = np.flatnonzero(xs[1:] != xs[:-1])
    return np.diff(np.concatenate(([0], boundaries + 1, [v.n]))).astype(np.int64)


def rank_vector(x: ScoreVector | Iterable[float]) -> RankVector:
    """Column sums of the pair-score matrix: the Kemeny rank image of x.

    ``counts[l] = #{x_k > x_l} - #{x_k < x_l}``; for a strict vector the
    sorted counts are n+1-2r for ranks r = 1..n.  Computed by sorting, not by
    the O(n^2) score matrix.
    """
    v = as_score_vector(x)
    n = v.n
    _, inverse, counts = np.unique(v.values, return_inverse=True, return_counts=True)
    less = np.concatenate(([0], np.cumsum(counts)[:-1]))
    net = (n - counts - less) - less  # (#greater) - (#less) per unique value
    return RankVector(counts=net.astype(np.int64)[inverse])


def _rank_dots(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> tuple[int, int, int]:
    kx = rank_vector(x).counts
    ky = rank_vector(y).counts
    if kx.size != ky.size:
        raise DataError(
            f"length mismatch: x has {kx.size} observations, y has {ky.size}"
        )
    # integer sufficient statistics; Python ints avoid int64 overflow at n ~ 5e3
    sxy = int(np.dot(kx, ky))
    sxx = int(np.dot(kx, kx))
    syy = int(np.dot(ky, ky))
    return sxy, sxx, syy


def spearman_rho(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> float:
    """Spearman correlation via rank images: <x_vec, y_vec>/(|x_vec| |y_vec|).

    Because the rank image is an affine map of midranks, this equals the
    classical average-rank Spearman coefficient, ties included.  Constant
    inputs have no direction and raise.
    """
    sxy, sxx, syy = _rank_dots(x, y)
    if sxx == 0 or syy == 0:
        which = "x" if sxx == 0 else "y"
        raise DegenerateError(
            f"spearman_rho undefined: {which} is constant (zero rank variance)"
        )
    return sxy / math.sqrt(sxx * syy)


def spearman_distance(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> float:
    """Euclidean distance on normalized rank images: sqrt(2) sqrt(1 - rho_s).

    0 at rho_s = 1, 2 at rho_s = -1.
    """
    rho = spearman_rho(x, y)
    return math.sqrt(2.0) * math.sqrt(max(0.0, 1.0 - rho))


def arcsine_r(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> float:
    """(2/pi) arcsin(rho_s): the sine-law companion scale of the Spearman form.

    Under independence its spread shrinks by a factor ~ 2/pi relative to rho_s.
    """
    rho = min(1.0, max(-1.0, spearman_rho(x, y)))
    return 2.0 / math.pi * math.asin(rho)


def kendall_tau_b(
    x: ScoreVector | Iterable[float], y: ScoreVector | Iterable[float]
) -> float:
    """Tie-adjusted Kendall correlation (C - D)/sqrt((m - tx)(m - ty)).

    The per-margin denominators are exactly the untied pair counts of x and y,
    so on tie-free data tau_b == tau_kappa.  Constant inputs raise.
    """
    c = pair_stats(x, y)
    m = c.pair_count
    untied_x = m - c.tied_x - c.tied_both
    untied_y = m - c.tied_y - c.tied_both
    if untied_x == 0 or untied_y == 0:
        which = "x" if untied_x == 0 else "y"
        raise DegenerateError(
            f"kendall_tau_b undefined: {which} is constant (all pairs tied)"
        )
    return c.net_concordance / math.sqrt(untied_x * untied_y)


def greiner_sin(t: float) -> float:
    """The sine map sin(pi t / 2) linking tau-scale to r-scale estimates.

    Domain [-1, 1]; fixed points -1, 0, +1.
    """
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"greiner_sin domain is [-1, 1], got {t}")
    return math.sin(math.pi * t / 2.0)
