"""Product statistical fingerprints, competitor ranking, 2-D projection,
and promotion-impact metrics.

The six-number fingerprint per product (median, std, IQR of daily sales,
plus sales correlations with price, promotion strength, and season) feeds
both the overview projection and competitor selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Mapping, Sequence

import numpy as np

from .domain import Product, SalesSeries
from .promos import DEFAULT_CONVERSION, RewardConversion, promotion_strength

__all__ = [
    "ProductStats",
    "SeriesTooShort",
    "UndefinedGrowth",
    "product_stats",
    "robust_normalize",
    "normalized_stat_vectors",
    "CompetitorList",
    "top_competitors",
    "Projection2D",
    "project_products",
    "growth_rate",
    "word_cloud_weights",
]

MIN_STATS_DAYS = 8

STAT_DIMS = ("median", "std", "iqr", "corr_price", "corr_promo", "corr_season")
# The first three are nonnegative magnitudes that need robust rescaling
# before products are comparable; the correlations already live in [-1, 1].
MAGNITUDE_DIMS = ("median", "std", "iqr")


class SeriesTooShort(ValueError):
    """Raised when a sales series is too short for stable statistics."""


class UndefinedGrowth(ValueError):
    """Raised when a growth rate would divide by zero sales."""


@dataclass(frozen=True)
class ProductStats:
    median: float
    std: float
    iqr: float
    corr_price: float
    corr_promo: float
    corr_season: float

    def vector(self) -> np.ndarray:
        return np.array(
            [self.median, self.std, self.iqr, self.corr_price, self.corr_promo, self.corr_season]
        )

    def as_dict(self) -> dict:
        return {dim: getattr(self, dim) for dim in STAT_DIMS}


def _pearson(xs: np.ndarray, ys: np.ndarray) -> float:
    """Pearson correlation with the zero-variance convention: a constant
    side has no direction, so the correlation is reported as 0."""
    xd = xs - xs.mean()
    yd = ys - ys.mean()
    sxx = float(xd @ xd)
    syy = float(yd @ yd)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    return float(xd @ yd) / math.sqrt(sxx * syy)


def _season_carrier(days: Sequence[date]) -> np.ndarray:
    doy = np.array([d.timetuple().tm_yday for d in days], dtype=np.float64)
    return np.cos(2 * np.pi * (doy - 182.0) / 365.25)


def product_stats(
    series: SalesSeries,
    promotions: Sequence,
    base_price: float,
    conversion: RewardConversion = DEFAULT_CONVERSION,
) -> ProductStats:
    """Six-number fingerprint of one product's sales behaviour."""
    if len(series.days) < MIN_STATS_DAYS:
        raise SeriesTooShort(
            f"need at least {MIN_STATS_DAYS} days, got {len(series.days)}"
        )
    units = np.asarray(series.units(), dtype=np.float64)
    prices = np.asarray(series.prices(), dtype=np.float64)
    days = series.dates()
    strengths = np.array(
        [promotion_strength(promotions, d, base_price, conversion) for d in days]
    )
    q1, q3 = np.quantile(units, [0.25, 0.75])
    return ProductStats(
        median=float(np.median(units)),
        std=float(units.std()),
        iqr=float(q3 - q1),
        corr_price=_pearson(units, prices),
        corr_promo=_pearson(units, strengths),
        corr_season=_pearson(units, _season_carrier(days)),
    )


def robust_normalize(values: Sequence[float]) -> np.ndarray:
    """Maps one statistic's values across products into [0, 1].

    Values are centered on the cross-product median, scaled by the IQR
    (or 1 when the IQR is zero), clamped to [-2, 2], and rescaled; outliers
    therefore saturate instead of stretching the scale.
    """
    values = np.asarray(values, dtype=np.float64)
    center = np.median(values)
    q1, q3 = np.quantile(values, [0.25, 0.75])
    iqr = q3 - q1
    scaled = (values - center) / (iqr if iqr > 0 else 1.0)
    return (np.clip(scaled, -2.0, 2.0) + 2.0) / 4.0


def normalized_stat_vectors(stats: Sequence[ProductStats]) -> np.ndarray:
    """Comparable 6-D vectors: magnitudes robust-normalized across the
    catalog, correlations passed through unchanged."""
    if len(stats) < 2:
        raise ValueError("normalization needs at least two products")
    columns = []
    for dim in STAT_DIMS:
        raw = [getattr(s, dim) for s in stats]
        if dim in MAGNITUDE_DIMS:
            columns.append(robust_normalize(raw))
        else:
            columns.append(np.asarray(raw, dtype=np.float64))
    return np.column_stack(columns)


@dataclass(frozen=True)
class CompetitorList:
    ids: tuple[str, ...]
    # True when fewer same-category products existed than were asked for.
    short_list: bool


def top_competitors(
    target_id: str,
    products: Sequence[Product],
    stats_by_id: Mapping[str, ProductStats],
    k: int = 5,
) -> CompetitorList:
    """The k same-category products nearest the target in the normalized
    fingerprint space, ascending by Euclidean distance, ties by id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    by_id = {p.id: p for p in products}
    if target_id not in by_id:
        raise KeyError(f"unknown product {target_id!r}")
    if target_id not in stats_by_id:
        raise KeyError(f"no stats for product {target_id!r}")
    category = by_id[target_id].category

    ids = [pid for pid in by_id if pid in stats_by_id]
    vectors = normalized_stat_vectors([stats_by_id[pid] for pid in ids])
    position = {pid: vectors[i] for i, pid in enumerate(ids)}

    target_vec = position[target_id]
    ranked = sorted(
        (
            (float(np.linalg.norm(position[pid] - target_vec)), pid)
            for pid in ids
            if pid != target_id and by_id[pid].category == category
        ),
    )
    chosen = tuple(pid for _, pid in ranked[:k])
    return CompetitorList(ids=chosen, short_list=len(ranked) < k)


@dataclass(frozen=True)
class Projection2D:
    coords: np.ndarray  # (n, 2)
    seed: int
    perplexity: float
    method: str  # "tsne" or "pca"
    kl_initial: float  # NaN for the PCA fallback
    kl_final: float


def _pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(D, 0.0)
    return np.maximum(D, 0.0)


def _conditional_probs(D: np.ndarray, perplexity: float, tol: float = 1e-5) -> np.ndarray:
    """Per-point Gaussian affinities with the bandwidth binary-searched so
    each row's entropy matches log(perplexity)."""
    n = D.shape[0]
    target = math.log(perplexity)
    P = np.zeros((n, n))
    for i in range(n):
        beta_lo, beta_hi = 0.0, math.inf
        beta = 1.0
        d_i = np.delete(D[i], i)
        for _ in range(64):
            affin = np.exp(-d_i * beta)
            total = affin.sum()
            if total <= 0:
                entropy = 0.0
                probs = np.zeros_like(affin)
            else:
                probs = affin / total
                # H = log(total) + beta * <d> under the unnormalized weights
                entropy = math.log(total) + beta * float((d_i * affin).sum()) / total
            diff = entropy - target
            if abs(diff) < tol:
                break
            if diff > 0:  # entropy too high -> sharpen
                beta_lo = beta
                beta = beta * 2.0 if beta_hi is math.inf else (beta + beta_hi) / 2.0
            else:
                beta_hi = beta
                beta = beta / 2.0 if beta_lo == 0.0 else (beta + beta_lo) / 2.0
        row = np.insert(probs, i, 0.0)
        P[i] = row
    return P


def _kl_divergence(P: np.ndarray, Y: np.ndarray) -> float:
    num = 1.0 / (1.0 + _pairwise_sq_dists(Y))
    np.fill_diagonal(num, 0.0)
    Q = np.maximum(num / num.sum(), 1e-12)
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))


def _pca_2d(X: np.ndarray) -> np.ndarray:
    centered = X - X.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[: min(2, vt.shape[0])]
    coords = centered @ comps.T
    if coords.shape[1] < 2:
        coords = np.column_stack([coords, np.zeros(len(coords))])
    return coords


def project_products(
    vectors: np.ndarray,
    seed: int = 0,
    perplexity: float = 30.0,
    n_iter: int = 1000,
    learning_rate: float = 200.0,
    early_exaggeration: float = 12.0,
    exaggeration_iters: int = 250,
) -> Projection2D:
    """Exact t-SNE of the product fingerprints into 2-D.

    Pairwise affinities use a per-point bandwidth binary-searched to the
    requested perplexity; the embedding is optimized by momentum gradient
    descent with early exaggeration, all O(n^2) and deterministic per seed.
    Catalogs smaller than 3x the perplexity fall back to PCA, flagged in
    the result.
    """
    X = np.asarray(vectors, dtype=np.float64)
    if X.ndim != 2 or len(X) < 2:
        raise ValueError("projection needs at least two product vectors")
    n = len(X)

    if n < 3 * perplexity:
        coords = _pca_2d(X)
        return Projection2D(
            coords=coords, seed=seed, perplexity=perplexity, method="pca",
            kl_initial=float("nan"), kl_final=float("nan"),
        )

    D = _pairwise_sq_dists(X)
    cond = _conditional_probs(D, perplexity)
    P = (cond + cond.T) / (2.0 * n)
    P = np.maximum(P, 1e-12)

    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((n, 2)) * 1e-4
    kl_initial = _kl_divergence(P, Y)

    increment = np.zeros_like(Y)
    gains = np.ones_like(Y)
    for it in range(n_iter):
        p_eff = P * early_exaggeration if it < exaggeration_iters else P
        num = 1.0 / (1.0 + _pairwise_sq_dists(Y))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), 1e-12)
        PQ = (p_eff - Q) * num
        grad = 4.0 * ((np.diag(PQ.sum(axis=1)) - PQ) @ Y)

        momentum = 0.5 if it < exaggeration_iters else 0.8
        gains = np.where(np.sign(grad) != np.sign(increment), gains + 0.2, gains * 0.8)
        gains = np.maximum(gains, 0.01)
        increment = momentum * increment - learning_rate * gains * grad
        Y = Y + increment
        Y = Y - Y.mean(axis=0)

    return Projection2D(
        coords=Y, seed=seed, perplexity=perplexity, method="tsne",
        kl_initial=kl_initial, kl_final=_kl_divergence(P, Y),
    )


def growth_rate(
    series: SalesSeries | Mapping[date, float], promo_start_day: date
) -> float:
    """First-day sales growth of a campaign: (V_t - V_{t-1}) / V_{t-1}.

    Accepts either an observed sales series or a plain date-to-value
    mapping, so predicted timelines can be measured the same way.
    """
    if isinstance(series, SalesSeries):
        units_by_day: Mapping[date, float] = {d.date: d.units_sold for d in series.days}
    else:
        units_by_day = series
    previous_day = promo_start_day - timedelta(days=1)
    if promo_start_day not in units_by_day or previous_day not in units_by_day:
        raise ValueError(
            f"series must contain {promo_start_day} and the day before it"
        )
    v_prev = units_by_day[previous_day]
    if v_prev == 0:
        raise UndefinedGrowth(f"no sales on {previous_day}; growth undefined")
    return (units_by_day[promo_start_day] - v_prev) / v_prev


def word_cloud_weights(
    products: Sequence[Product],
    series_by_id: Mapping[str, SalesSeries],
) -> list[tuple[str, float]]:
    """(word, weight) pairs where a word's weight is the mean daily sales
    averaged over the products whose title contains it. Products without a
    sales series are skipped. Sorted heaviest first, ties alphabetical."""
    from .features import tokenize

    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for product in products:
        series = series_by_id.get(product.id)
        if series is None or not series.days:
            continue
        mean_sales = float(np.mean(series.units()))
        for word in set(tokenize(product.title)):
            sums[word] = sums.get(word, 0.0) + mean_sales
            counts[word] = counts.get(word, 0) + 1
    weights = [(word, sums[word] / counts[word]) for word in sums]
    weights.sort(key=lambda pair: (-pair[1], pair[0]))
    return weights
