"""Comparison procedures based on per-itemset Binomial tests.

Both procedures test ``H0: t(A) < theta`` at the boundary ``theta``. The
Bonferroni variant corrects for every non-empty itemset over the universe,
the holdout variant only for the candidates mined on an exploratory part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .dataset import TransactionDataset
from .errors import EmptyDatasetError, ParameterError
from .fim import ItemsetCollection, mine_frequent

# terms this far (in log units) below the leading one cannot change the sum
_NEGLIGIBLE = 60.0
_CHUNK = 4096


@dataclass(frozen=True)
class BinomialTestResult:
    log_p_value: float
    k: int
    n: int
    theta0: float

    @property
    def p_value(self) -> float:
        return math.exp(self.log_p_value)


def _log_pmf(ks: np.ndarray, n: int, lp: float, lq: float) -> np.ndarray:
    return gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1) + ks * lp + (n - ks) * lq


def _log_run(start: int, stop: int, step: int, n: int, lp: float, lq: float) -> float:
    """log of the sum of pmf terms from ``start`` towards ``stop`` (exclusive),
    where terms decrease in the walking direction."""
    parts = []
    head = None
    pos = start
    while pos != stop:
        end = pos + step * _CHUNK
        end = min(end, stop) if step > 0 else max(end, stop)
        terms = _log_pmf(np.arange(pos, end, step, dtype=float), n, lp, lq)
        if head is None:
            head = terms[0]
        parts.append(logsumexp(terms))
        if terms[-1] < head - _NEGLIGIBLE:
            break
        pos = end
    return float(logsumexp(parts))


def binomial_tail_log(k: int, n: int, theta0: float) -> BinomialTestResult:
    """``P[Bin(n, theta0) >= k]`` on the natural-log scale."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0 <= k <= n:
        raise ParameterError(f"k must be in [0, n], got k={k}, n={n}")
    if not 0.0 < theta0 < 1.0:
        raise ParameterError(f"theta0 must be in (0, 1), got {theta0}")
    lp, lq = math.log(theta0), math.log1p(-theta0)
    if k == 0:
        log_p = 0.0
    elif k == n:
        log_p = n * lp
    elif k > n * theta0:
        # at or past the mode: terms shrink as i grows
        log_p = _log_run(k, n + 1, 1, n, lp, lq)
    else:
        # below the mode: take the complement of the lower tail
        lower = _log_run(k - 1, -1, -1, n, lp, lq)
        log_p = math.log(-math.expm1(lower)) if lower < 0 else -math.inf
    return BinomialTestResult(min(log_p, 0.0), k, n, theta0)


def log_num_itemsets(num_items: int) -> float:
    """``ln(2**num_items - 1)`` without forming the integer."""
    if num_items < 1:
        raise ParameterError("need at least one item")
    return num_items * math.log(2.0) + math.log1p(-(2.0 ** -num_items))


def bonferroni_method(ds: TransactionDataset, theta: float, delta: float,
                      num_items: int | None = None, max_itemsets=None) -> ItemsetCollection:
    """Frequent itemsets of ``ds`` whose Binomial test survives a Bonferroni
    correction over all ``2**|I| - 1`` itemsets. Counts refer to ``ds``."""
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if ds.n == 0:
        raise EmptyDatasetError("cannot test on an empty dataset")
    if num_items is None:
        num_items = len(ds.item_universe)
    fi = mine_frequent(ds, theta, max_itemsets)
    if not len(fi):
        return fi
    cutoff = math.log(delta) - log_num_itemsets(num_items)
    if theta >= 1.0:
        # the null t(A) < 1 is never rejected with certainty; p = 1 for k < n
        return ItemsetCollection({}, ds.n)
    keep = {a: c for a, c in fi.counts.items()
            if binomial_tail_log(c, ds.n, theta).log_p_value <= cutoff}
    return ItemsetCollection(keep, ds.n)


def holdout_method(ds_e: TransactionDataset, ds_v: TransactionDataset, theta: float,
                   delta: float, max_itemsets=None) -> ItemsetCollection:
    """Mine candidates on ``ds_e`` and test each on ``ds_v`` at level delta / k.
    Counts of the result refer to ``ds_v``."""
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if ds_e.n == 0 or ds_v.n == 0:
        raise EmptyDatasetError("both parts of the split must be non-empty")
    fi = mine_frequent(ds_e, theta, max_itemsets)
    if not len(fi) or theta >= 1.0:
        return ItemsetCollection({}, ds_v.n)
    cutoff = math.log(delta) - math.log(len(fi))
    keep = {}
    for a in fi.counts:
        c = ds_v.support_count(a)
        if binomial_tail_log(c, ds_v.n, theta).log_p_value <= cutoff:
            keep[a] = c
    return ItemsetCollection(keep, ds_v.n)
