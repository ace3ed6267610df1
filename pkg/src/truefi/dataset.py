"""Transactional datasets: the data model, FIMI I/O, resampling and
structural statistics (d-index, transaction-length profile)."""

from __future__ import annotations

import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .errors import EmptyDatasetError, FimiParseError, ModelError, ParameterError

Transaction = frozenset  # frozenset[int]


def count_threshold(theta, n: int) -> int:
    """Smallest integer count ``c`` with ``c / n >= theta``.

    A float ``theta`` is read as the decimal it prints as, so ``0.1`` means
    one tenth and ``3 / 30`` meets it.
    """
    if isinstance(theta, float):
        theta = Fraction(repr(theta))
    return math.ceil(Fraction(theta) * n)


@dataclass(frozen=True)
class TransactionDataset:
    """An ordered bag of transactions over non-negative integer items.

    Duplicate and empty transactions are kept; both count towards ``n``.
    """

    transactions: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "transactions", tuple(frozenset(t) for t in self.transactions)
        )

    @property
    def n(self) -> int:
        return len(self.transactions)

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self) -> Iterator[frozenset]:
        return iter(self.transactions)

    @cached_property
    def item_universe(self) -> frozenset:
        return frozenset().union(*self.transactions)

    @cached_property
    def distinct(self) -> tuple:
        """Distinct transactions with multiplicities, in canonical order."""
        counts = Counter(self.transactions)
        return tuple(sorted(counts.items(), key=lambda tc: (len(tc[0]), sorted(tc[0]))))

    @cached_property
    def _columns(self):
        weights = np.array([c for _, c in self.distinct], dtype=np.int64)
        cols = {}
        for row, (t, _) in enumerate(self.distinct):
            for item in t:
                col = cols.get(item)
                if col is None:
                    col = cols[item] = np.zeros(len(self.distinct), dtype=bool)
                col[row] = True
        return weights, cols

    def support_count(self, itemset) -> int:
        """Number of transactions containing ``itemset``."""
        if not itemset:
            return self.n
        weights, cols = self._columns
        try:
            mask = np.logical_and.reduce([cols[i] for i in itemset])
        except KeyError:
            return 0
        return int(weights[mask].sum())


def frequency(ds: TransactionDataset, itemset) -> float:
    """Fraction of transactions of ``ds`` that contain ``itemset``."""
    if ds.n == 0:
        raise EmptyDatasetError("frequency is undefined on an empty dataset")
    return ds.support_count(itemset) / ds.n


# --------------------------------------------------------------------------
# FIMI format


def _lines(stream) -> Iterable[str]:
    if isinstance(stream, (bytes, bytearray)):
        stream = stream.decode("ascii")
    if isinstance(stream, str):
        return stream.splitlines()
    return (ln.decode("ascii") if isinstance(ln, bytes) else ln for ln in stream)


def parse_fimi(stream) -> TransactionDataset:
    """Parse FIMI text: one transaction per line, whitespace separated ids.

    ``stream`` may be ``str``, ``bytes`` or a (text or binary) file object.
    Blank lines are skipped and repeated ids within a line collapse.
    """
    transactions = []
    for line_no, line in enumerate(_lines(stream), start=1):
        tokens = line.split()
        if not tokens:
            continue
        items = set()
        for tok in tokens:
            if not tok.isdigit():
                raise FimiParseError(line_no, tok)
            items.add(int(tok))
        transactions.append(frozenset(items))
    return TransactionDataset(transactions)


def read_fimi(path: str | os.PathLike) -> TransactionDataset:
    with open(path, "rb") as fh:
        return parse_fimi(fh)


def serialize_fimi(ds: TransactionDataset) -> str:
    # Empty transactions have no FIMI representation (blank lines are skipped).
    buf = io.StringIO()
    for t in ds:
        buf.write(" ".join(map(str, sorted(t))))
        buf.write("\n")
    return buf.getvalue()


def write_fimi(ds: TransactionDataset, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize_fimi(ds))


# --------------------------------------------------------------------------
# Resampling


def random_split(ds: TransactionDataset, fraction_e: float, seed) -> tuple:
    """Shuffle with a seeded RNG and cut at ``ceil(fraction_e * n)``.

    Returns ``(exploratory, evaluation)``. The cut is clamped to
    ``[1, n - 1]`` so neither part is empty.
    """
    if ds.n < 2:
        raise EmptyDatasetError("random_split needs at least two transactions")
    if not 0.0 < fraction_e < 1.0:
        raise ParameterError(f"fraction_e must be in (0, 1), got {fraction_e}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(ds.n)
    # the epsilon keeps e.g. 0.1 * 30 from ceiling to 4
    cut = min(max(math.ceil(fraction_e * ds.n - 1e-9), 1), ds.n - 1)
    tr = ds.transactions
    return (
        TransactionDataset([tr[i] for i in order[:cut]]),
        TransactionDataset([tr[i] for i in order[cut:]]),
    )


def enlarge(ds: TransactionDataset, target_n: int, seed) -> TransactionDataset:
    """Draw ``target_n`` transactions uniformly with replacement from ``ds``."""
    if ds.n == 0:
        raise EmptyDatasetError("cannot enlarge an empty dataset")
    if target_n < 1:
        raise ParameterError(f"target_n must be positive, got {target_n}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, ds.n, size=target_n)
    tr = ds.transactions
    return TransactionDataset([tr[i] for i in idx])


@dataclass(frozen=True)
class GroundTruthModel:
    """An explicit distribution over transactions.

    Probabilities are held exactly as ``weights[i] / total`` so that true
    frequencies can be compared against thresholds without rounding.
    """

    transactions: tuple
    weights: tuple
    total: int = field(default=0)

    def __post_init__(self):
        trs = tuple(frozenset(t) for t in self.transactions)
        ws = tuple(int(w) for w in self.weights)
        if len(trs) != len(ws):
            raise ModelError("transactions and weights differ in length")
        if len(set(trs)) != len(trs):
            raise ModelError("support transactions must be distinct")
        if any(w < 0 for w in ws):
            raise ModelError("negative probability")
        total = self.total or sum(ws)
        if total <= 0:
            raise ModelError("model has no probability mass")
        if abs(Fraction(sum(ws), total) - 1) > Fraction(1, 10**9):
            raise ModelError(f"probabilities sum to {sum(ws) / total}, not 1")
        object.__setattr__(self, "transactions", trs)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "total", total)

    @classmethod
    def from_probabilities(cls, support) -> GroundTruthModel:
        """Build from ``(transaction, probability)`` pairs; merges repeats.

        Float probabilities are read as the decimals they print as.
        """
        merged: dict = {}
        for t, p in support:
            p = Fraction(repr(p)) if isinstance(p, float) else Fraction(p)
            if p < 0 or p > 1:
                raise ModelError(f"probability {float(p)} outside [0, 1]")
            t = frozenset(t)
            merged[t] = merged.get(t, 0) + p
        if not merged:
            raise ModelError("empty support")
        denom = math.lcm(*(p.denominator for p in merged.values()))
        weights = [int(p * denom) for p in merged.values()]
        return cls(tuple(merged), tuple(weights), denom)

    @property
    def support(self) -> list:
        return [(t, w / self.total) for t, w in zip(self.transactions, self.weights)]

    @cached_property
    def probabilities(self) -> np.ndarray:
        p = np.array(self.weights, dtype=float)
        return p / p.sum()

    def true_weight(self, itemset) -> int:
        itemset = frozenset(itemset)
        return sum(w for t, w in zip(self.transactions, self.weights) if itemset <= t)

    def true_frequency(self, itemset) -> float:
        return self.true_weight(itemset) / self.total


def sample_from_model(gt: GroundTruthModel, n: int, seed) -> TransactionDataset:
    """``n`` i.i.d. draws from ``gt``."""
    if n < 0:
        raise ParameterError(f"n must be non-negative, got {n}")
    if n == 0:
        return TransactionDataset(())
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(gt.transactions), size=n, p=gt.probabilities)
    tr = gt.transactions
    return TransactionDataset([tr[i] for i in idx])


# --------------------------------------------------------------------------
# Structural statistics


@dataclass(frozen=True)
class LengthProfile:
    """``entries`` are ``(length, bound)`` pairs with strictly decreasing
    lengths; ``bound`` counts the distinct transactions at least that long,
    an upper bound on the largest antichain among them."""

    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def lengths(self) -> list:
        return [ell for ell, _ in self.entries]

    @property
    def bounds(self) -> list:
        return [b for _, b in self.entries]

    def d_index(self) -> int:
        """Max ``d`` with at least ``d`` distinct transactions of length >= ``d``."""
        best = 0
        for ell, bound in self.entries:
            best = max(best, min(ell, bound))
        return best


def length_profile(ds: TransactionDataset) -> LengthProfile:
    if ds.n == 0:
        raise EmptyDatasetError("length profile of an empty dataset")
    per_length = Counter(len(t) for t, _ in ds.distinct if t)
    entries = []
    running = 0
    for ell in sorted(per_length, reverse=True):
        running += per_length[ell]
        entries.append((ell, running))
    return LengthProfile(tuple(entries))


def d_index(ds: TransactionDataset) -> int:
    """Upper bound on the empirical VC-dimension of all itemsets on ``ds``.

    Distinct transactions stand in for antichains, which can only loosen
    the bound.
    """
    if ds.n == 0:
        return 0
    return length_profile(ds).d_index()
