"""Frequent itemset mining over the itemset lattice.

The miner is an FP-growth variant that works on weighted transactions, so
a dataset with many repeated transactions (or a ground-truth model with
integer weights) is mined after collapsing duplicates.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .dataset import TransactionDataset, count_threshold
from .errors import EmptyDatasetError, ParameterError, ResourceLimitError, StructuralError

Itemset = frozenset  # frozenset[int]


def itemset_key(itemset) -> tuple:
    """Canonical sort key: by size, then by sorted item ids."""
    return (len(itemset), sorted(itemset))


def format_itemset(itemset) -> str:
    return " ".join(map(str, sorted(itemset)))


@dataclass(frozen=True)
class ItemsetCollection:
    """Itemsets with their support counts in a dataset of ``source_n``
    transactions. Frequencies are ``count / source_n``."""

    counts: dict
    source_n: int

    def __len__(self):
        return len(self.counts)

    def __contains__(self, itemset):
        return frozenset(itemset) in self.counts

    def __iter__(self):
        return iter(sorted(self.counts, key=itemset_key))

    def itemsets(self) -> set:
        return set(self.counts)

    def count(self, itemset) -> int:
        return self.counts[frozenset(itemset)]

    def frequency(self, itemset) -> float:
        return self.counts[frozenset(itemset)] / self.source_n

    @property
    def entries(self) -> dict:
        return {a: c / self.source_n for a, c in self.counts.items()}

    def at_least(self, theta) -> ItemsetCollection:
        """Members with frequency >= ``theta``."""
        if theta > 1:
            return ItemsetCollection({}, self.source_n)
        k = count_threshold(theta, self.source_n)
        return ItemsetCollection(
            {a: c for a, c in self.counts.items() if c >= k}, self.source_n
        )

    def below(self, hi) -> ItemsetCollection:
        """Members with frequency < ``hi`` (``hi > 1`` keeps everything)."""
        if hi > 1:
            return self
        k = count_threshold(hi, self.source_n)
        return ItemsetCollection(
            {a: c for a, c in self.counts.items() if c < k}, self.source_n
        )

    def to_text(self) -> str:
        return "".join(
            f"{format_itemset(a)}\t{self.counts[a] / self.source_n:.6f}\n" for a in self
        )

    def to_records(self) -> list:
        return [
            {"itemset": sorted(a), "frequency": self.counts[a] / self.source_n}
            for a in self
        ]


class _Node:
    __slots__ = ("item", "count", "parent", "children")

    def __init__(self, item, parent):
        self.item = item
        self.count = 0
        self.parent = parent
        self.children = {}


def _grow(db, min_count, suffix, out, limit):
    support = Counter()
    for items, c in db:
        for i in items:
            support[i] += c
    frequent = {i: s for i, s in support.items() if s >= min_count}
    if not frequent:
        return
    order = sorted(frequent, key=lambda i: (-frequent[i], i))
    rank = {i: r for r, i in enumerate(order)}

    root = _Node(None, None)
    header = defaultdict(list)
    for items, c in db:
        node = root
        for i in sorted((i for i in items if i in rank), key=rank.__getitem__):
            child = node.children.get(i)
            if child is None:
                child = node.children[i] = _Node(i, node)
                header[i].append(child)
            child.count += c
            node = child

    for item in reversed(order):
        found = suffix | {item}
        out[found] = frequent[item]
        if limit is not None and len(out) > limit:
            raise ResourceLimitError(f"more than {limit} frequent itemsets")
        base = []
        for node in header[item]:
            path = []
            p = node.parent
            while p.item is not None:
                path.append(p.item)
                p = p.parent
            if path:
                base.append((path, node.count))
        if base:
            _grow(base, min_count, found, out, limit)


def mine_weighted(weighted: Iterable, min_count, max_itemsets=None) -> dict:
    """All non-empty itemsets whose total weight is >= ``min_count``.

    ``weighted`` yields ``(transaction, weight)`` pairs.
    """
    if min_count <= 0:
        raise ParameterError("min_count must be positive")
    out: dict = {}
    _grow(list(weighted), min_count, frozenset(), out, max_itemsets)
    return out


def _check_theta(theta):
    if not 0.0 < theta <= 1.0:
        raise ParameterError(f"theta must be in (0, 1], got {theta}")


def mine_frequent(ds: TransactionDataset, theta: float, max_itemsets=None) -> ItemsetCollection:
    """``{A != {} : f_D(A) >= theta}`` with support counts."""
    _check_theta(theta)
    if ds.n == 0:
        raise EmptyDatasetError("cannot mine an empty dataset")
    k = count_threshold(theta, ds.n)
    return ItemsetCollection(mine_weighted(ds.distinct, k, max_itemsets), ds.n)


def frequency_band(ds: TransactionDataset, lo: float, hi: float, max_itemsets=None) -> ItemsetCollection:
    """``{A != {} : lo <= f_D(A) < hi}``; ``hi > 1`` means no upper cut."""
    if lo <= 0:
        raise ParameterError(f"band lower end must be positive, got {lo}")
    if hi < lo:
        raise ParameterError(f"empty band: hi={hi} < lo={lo}")
    if lo > 1 or lo == hi:
        return ItemsetCollection({}, ds.n)
    return mine_frequent(ds, lo, max_itemsets).below(hi)


# --------------------------------------------------------------------------
# Lattice structure


def negative_border(freq_sets: Iterable, universe: Iterable) -> set:
    """Minimal itemsets over ``universe`` that are not in ``freq_sets``.

    ``freq_sets`` must be downward closed; the empty set is implicitly a
    member whether or not it is listed.
    """
    family = {frozenset(a) for a in freq_sets}
    family.discard(frozenset())
    universe = frozenset(universe)
    for a in family:
        if not a <= universe:
            raise StructuralError(f"itemset {sorted(a)} is not over the universe")
        if len(a) > 1 and any(a - {i} not in family for i in a):
            raise StructuralError(f"family is not downward closed at {sorted(a)}")

    frequent_items = sorted(i for i in universe if frozenset((i,)) in family)
    border = {frozenset((i,)) for i in universe if frozenset((i,)) not in family}
    for a in family:
        for i in frequent_items:
            if i in a:
                continue
            cand = a | {i}
            if cand in family or cand in border:
                continue
            if all(cand - {j} in family for j in cand):
                border.add(cand)
    return border


def is_antichain(sets: Iterable) -> bool:
    """True iff no member is contained in another (repeats count as comparable)."""
    members = [frozenset(s) for s in sets]
    members.sort(key=len)
    for x, y in combinations(members, 2):
        if x <= y:
            return False
    return True
