"""Set-Union Knapsack with unit profits and weights, and the dimension
bounds derived from its optimum.

With unit values the profit of a selection depends only on the union of the
selected subsets: the best selection under capacity ``k`` is "every subset
contained in some set ``X`` of at most ``k`` elements". The exact solver is
therefore a depth-first branch-and-bound over elements (include / exclude),
bounded by a fractional-degree relaxation. The antichain variant scores a
union ``X`` by the width of the subsets it contains (Dilworth / Konig via
bipartite matching).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from fractions import Fraction
from math import comb

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .dataset import LengthProfile
from .errors import ParameterError
from .fim import itemset_key


@dataclass(frozen=True)
class SukpInstance:
    elements: frozenset
    subsets: tuple
    profits: tuple
    weights: dict
    capacity: float

    def __post_init__(self):
        if self.capacity < 0:
            raise ParameterError("capacity must be non-negative")
        if len(self.profits) != len(self.subsets):
            raise ParameterError("one profit per subset is required")
        for s in self.subsets:
            if not s <= self.elements:
                raise ParameterError(f"subset {sorted(s)} is not within the elements")
        if any(p <= 0 for p in self.profits) or any(w <= 0 for w in self.weights.values()):
            raise ParameterError("profits and weights must be positive")

    @property
    def is_unit(self) -> bool:
        return all(p == 1 for p in self.profits) and all(
            self.weights.get(e, 1) == 1 for e in self.elements
        )


@dataclass(frozen=True)
class SukpSolution:
    selected: frozenset
    profit: float
    union_weight: float
    exact: bool = True


def build_instance(coll, capacity) -> SukpInstance:
    """The unit-valued instance whose subsets are the itemsets of ``coll``."""
    subsets = tuple(sorted({frozenset(a) for a in coll}, key=itemset_key))
    if not subsets:
        raise ParameterError("cannot build an instance from an empty collection")
    elements = frozenset().union(*subsets)
    return SukpInstance(
        elements=elements,
        subsets=subsets,
        profits=(1,) * len(subsets),
        weights={e: 1 for e in elements},
        capacity=capacity,
    )


# --------------------------------------------------------------------------
# Comparability and width


def _containment_pairs(sets):
    """Pairs ``(i, j)`` with ``sets[i]`` a proper subset of ``sets[j]``;
    equal sets are linked once, lower index first."""
    index: dict = {}
    for i, s in enumerate(sets):
        index.setdefault(s, []).append(i)
    rows, cols = [], []
    for ids in index.values():
        for a, b in combinations(ids, 2):
            rows.append(a)
            cols.append(b)
    if max((len(s) for s in sets), default=0) <= 10:
        for j, s in enumerate(sets):
            items = sorted(s)
            for r in range(len(items)):
                for sub in combinations(items, r):
                    for i in index.get(frozenset(sub), ()):
                        rows.append(i)
                        cols.append(j)
    else:
        universe = sorted(frozenset().union(*sets))
        pos = {e: k for k, e in enumerate(universe)}
        m = np.zeros((len(sets), len(universe)), dtype=np.int32)
        for i, s in enumerate(sets):
            m[i, [pos[e] for e in s]] = 1
        sizes = m.sum(axis=1)
        inter = m @ m.T
        sub = (inter == sizes[:, None]) & (sizes[:, None] < sizes[None, :])
        r, c = np.nonzero(sub)
        rows.extend(r.tolist())
        cols.extend(c.tolist())
    return rows, cols


def _matching(n, rows, cols):
    graph = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    return maximum_bipartite_matching(graph, perm_type="column"), graph


def antichain_width(sets) -> int:
    """Size of the largest antichain among ``sets`` (Dilworth)."""
    sets = [frozenset(s) for s in sets]
    if not sets:
        return 0
    rows, cols = _containment_pairs(sets)
    if not rows:
        return len(sets)
    match, _ = _matching(len(sets), rows, cols)
    return len(sets) - int((match >= 0).sum())


def max_antichain(sets) -> list:
    """Indices of a largest antichain among ``sets`` (Konig's construction)."""
    sets = [frozenset(s) for s in sets]
    n = len(sets)
    if n == 0:
        return []
    rows, cols = _containment_pairs(sets)
    if not rows:
        return list(range(n))
    match, graph = _matching(n, rows, cols)
    right_to_left = np.full(n, -1)
    for left, right in enumerate(match):
        if right >= 0:
            right_to_left[right] = left
    # alternating BFS from unmatched left vertices
    seen_left = np.zeros(n, dtype=bool)
    seen_right = np.zeros(n, dtype=bool)
    queue = deque(i for i in range(n) if match[i] < 0)
    seen_left[list(queue)] = True
    while queue:
        u = queue.popleft()
        for v in graph.indices[graph.indptr[u]:graph.indptr[u + 1]]:
            if seen_right[v] or match[u] == v:
                continue
            seen_right[v] = True
            w = right_to_left[v]
            if w >= 0 and not seen_left[w]:
                seen_left[w] = True
                queue.append(w)
    return [i for i in range(n) if seen_left[i] and not seen_right[i]]


# --------------------------------------------------------------------------
# Branch and bound over union elements


def _next_power(x: int) -> int:
    return 1 << x.bit_length()


def _lym_bound(size_counts, capacity: int) -> int:
    """Largest antichain that members of the given sizes could form inside a
    union of at most ``capacity`` elements.

    By the LYM inequality such an antichain has sum(1 / C(capacity, |A|)) <= 1,
    so taking sizes in order of cheapest weight is optimal.
    """
    budget = Fraction(1)
    total = 0
    for size in sorted(size_counts, key=lambda a: -comb(capacity, a)):
        weight = Fraction(1, comb(capacity, size))
        take = min(size_counts[size], int(budget / weight))
        total += take
        budget -= take * weight
        if take < size_counts[size]:
            break
    return total


class _UnionSearch:
    """Finds a set of at most ``capacity`` elements maximising the (count or
    antichain width of) subsets it contains."""

    def __init__(self, subsets, capacity, antichain, bits_only, stop_at):
        self.subsets = subsets
        self.antichain = antichain
        self.bits_only = bits_only
        self.stop_at = stop_at
        self.capacity = capacity
        self.best = 0
        self.best_union = frozenset()
        self.exhausted = True
        self.nodes = 0

        degree: dict = {}
        for s in subsets:
            for e in s:
                degree[e] = degree.get(e, 0) + 1
        self.columns = sorted(degree, key=lambda e: (-degree[e], e))
        col = {e: k for k, e in enumerate(self.columns)}
        self.matrix = np.zeros((len(subsets), len(self.columns)), dtype=bool)
        for i, s in enumerate(subsets):
            self.matrix[i, [col[e] for e in s]] = True
        self.sizes = self.matrix.sum(axis=1).astype(np.int64)

    def _score(self, contained_idx):
        if not self.antichain:
            return len(contained_idx)
        return antichain_width([self.subsets[i] for i in contained_idx])

    def _threshold(self):
        return _next_power(self.best) if self.bits_only else self.best + 1

    def _offer(self, missing, chosen):
        contained = np.flatnonzero(missing == 0)
        if len(contained) < self._threshold():
            return
        score = self._score(contained)
        if score > self.best:
            self.best = score
            self.best_union = frozenset(self.columns[c] for c in chosen)

    def _greedy(self):
        """Seed the incumbent: add members smallest first while they fit
        (and, for antichains, stay incomparable to those already taken)."""
        union: set = set()
        taken = []
        for i in np.argsort(self.sizes, kind="stable"):
            s = self.subsets[i]
            if len(union | s) > self.capacity:
                continue
            if self.antichain and any(s <= t or t <= s for t in taken):
                continue
            taken.append(s)
            union |= s
        col = {e: k for k, e in enumerate(self.columns)}
        chosen = [col[e] for e in union]
        missing = self.sizes - self.matrix[:, chosen].sum(axis=1)
        self._offer(missing, chosen)

    def run(self):
        self._greedy()
        missing = self.sizes.copy()
        dead = np.zeros(len(self.subsets), dtype=bool)
        stack = [(0, (), missing, dead)]
        mat = self.matrix
        while stack:
            if self.stop_at is not None and self.best >= self.stop_at:
                self.exhausted = False
                return
            pos, chosen, missing, dead = stack.pop()
            self.nodes += 1
            self._offer(missing, chosen)
            room = self.capacity - len(chosen)
            if room <= 0:
                continue
            alive = ~dead & (missing > 0) & (missing <= room)
            if not alive.any():
                continue
            sub = mat[alive]
            needed = sub[:, pos:].any(axis=0)
            if not needed.any():
                continue
            pos += int(np.argmax(needed))
            frac = (sub[:, pos:] / missing[alive][:, None]).sum(axis=0)
            top = np.sort(frac)[-room:].sum() if frac.size > room else frac.sum()
            bound = int((missing == 0).sum()) + min(int(alive.sum()), int(top + 1e-9))
            if self.antichain and bound >= self._threshold():
                pool = self.sizes[(missing == 0) | alive]
                sizes, counts = np.unique(pool, return_counts=True)
                bound = min(bound, _lym_bound(dict(zip(sizes.tolist(), counts.tolist())), self.capacity))
            if bound < self._threshold():
                continue
            col = mat[:, pos]
            excl = dead | col
            stack.append((pos + 1, chosen, missing, excl))
            inc = missing - col
            stack.append((pos + 1, chosen + (pos,), inc, dead))


def _solve(inst: SukpInstance, antichain: bool, bits_only=False, stop_at=None) -> SukpSolution:
    if not inst.is_unit:
        raise ParameterError("only unit profits and weights are supported")
    cap = int(inst.capacity)
    subsets = list(inst.subsets)
    empty = [i for i, s in enumerate(subsets) if not s]
    feasible = [i for i, s in enumerate(subsets) if s and len(s) <= cap]
    fsets = [subsets[i] for i in feasible]
    union = frozenset().union(*fsets) if fsets else frozenset()
    exact = True

    if not fsets:
        best_union = frozenset()
    elif len(union) <= cap:
        best_union = union
    else:
        search = _UnionSearch(fsets, cap, antichain, bits_only, stop_at)
        search.run()
        best_union = search.best_union
        exact = search.exhausted and not bits_only

    inside = [i for i, s in zip(feasible, fsets) if s <= best_union]
    if antichain:
        if inside:
            picked = max_antichain([subsets[i] for i in inside])
            selected = [inside[k] for k in picked]
        else:
            selected = empty[:1]
    else:
        selected = inside + empty
    sel_union = frozenset().union(*(subsets[i] for i in selected)) if selected else frozenset()
    return SukpSolution(frozenset(selected), len(selected), len(sel_union), exact)


def solve_exact(inst: SukpInstance, *, bits_only=False, stop_at=None) -> SukpSolution:
    """Maximum number of subsets whose union fits the capacity.

    ``bits_only`` only guarantees the optimum's bit length (the search skips
    any branch that cannot reach the next power of two); ``stop_at`` ends the
    search once a solution of that profit is found. Either makes
    ``solution.exact`` false.
    """
    return _solve(inst, False, bits_only, stop_at)


def solve_exact_antichain(inst: SukpInstance, coll=None, *, bits_only=False,
                          stop_at=None) -> SukpSolution:
    """As :func:`solve_exact`, but the selected subsets must be pairwise
    incomparable under inclusion.

    ``coll`` is optional; when given it must hold exactly the instance's
    subsets and is only checked for that.
    """
    if coll is not None and {frozenset(a) for a in coll} != set(inst.subsets):
        raise ParameterError("coll is not aligned with the instance subsets")
    return _solve(inst, True, bits_only, stop_at)


# --------------------------------------------------------------------------
# Dimension bounds


def bits(q: int) -> int:
    """floor(log2 q) + 1 for q >= 1, and 0 for q = 0."""
    return int(q).bit_length()


def vc_bound_from_sukp(coll, antichain: bool = False) -> int:
    """VC-dimension bound from the instance with capacity = all items of ``coll``."""
    inst = build_instance(coll, 0)
    inst = SukpInstance(inst.elements, inst.subsets, inst.profits, inst.weights, len(inst.elements))
    sol = solve_exact_antichain(inst) if antichain else solve_exact(inst)
    return bits(sol.profit)


@dataclass(frozen=True)
class EvcRow:
    length: int
    antichain_bound: int
    q: int
    b: int
    exact: bool  # False when q is only a lower bound (search stopped early)

    def to_dict(self):
        return {
            "length": self.length,
            "L": self.antichain_bound,
            "q": self.q,
            "b": self.b,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class EvcBoundTrace:
    rows: tuple
    chosen_j: int | None  # 1-based; None when b_i > L_i for every row
    b_j: int | None
    bound: int
    fallback: bool = False
    raised: bool = False  # bound exceeds b_j because an earlier row's L does
    antichain: bool = False

    def to_dict(self):
        return {
            "rows": [r.to_dict() for r in self.rows],
            "chosen_j": self.chosen_j,
            "b_j": self.b_j,
            "bound": self.bound,
            "fallback": self.fallback,
            "raised": self.raised,
            "antichain": self.antichain,
        }


def evc_bound_from_sukp(coll, profile: LengthProfile, antichain: bool = False, early_exit: bool = False):
    """Empirical VC-dimension bound of the ranges of ``coll`` on the dataset
    summarised by ``profile``.

    Row ``i`` pairs the ``i``-th longest transaction length ``l_i`` with
    ``L_i`` (distinct transactions at least that long) and
    ``b_i = bits(q_i)``, where ``q_i`` is the optimum with capacity ``l_i``.
    A shattered set whose shortest transaction has length ``l_i`` has at
    most ``min(b_i, L_i)`` members, so the bound is the maximum of that
    quantity over rows. Scanning from the longest length, the first row with
    ``b_j <= L_j`` and its predecessor attain that maximum.

    With ``early_exit`` rows before ``j`` stop as soon as ``b_i > L_i`` is
    certain and rows after ``j`` are not solved; the bound is unchanged.
    """
    base = build_instance(coll, 0)
    solver = solve_exact_antichain if antichain else solve_exact
    n_elements = len(base.elements)

    rows = []
    memo: dict = {}
    chosen = None
    for i, (ell, big_l) in enumerate(profile.entries, start=1):
        cap = min(ell, n_elements)
        inst = SukpInstance(base.elements, base.subsets, base.profits, base.weights, cap)
        if early_exit:
            sol = solver(inst, bits_only=True, stop_at=1 << big_l)
            b = bits(sol.profit)
            rows.append(EvcRow(ell, big_l, int(sol.profit), b, sol.exact))
        else:
            if cap not in memo:
                memo[cap] = solver(inst)
            sol = memo[cap]
            b = bits(sol.profit)
            rows.append(EvcRow(ell, big_l, int(sol.profit), b, True))
        if chosen is None and b <= big_l:
            chosen = i
            if early_exit:
                break

    if not rows:
        return 0, EvcBoundTrace((), None, None, 0, antichain=antichain)

    best = max(min(r.b, r.antichain_bound) for r in rows)
    if chosen is None:
        bound = min(rows[-1].b, profile.d_index())
        trace = EvcBoundTrace(tuple(rows), None, None, bound, fallback=True, antichain=antichain)
        return bound, trace
    b_j = rows[chosen - 1].b
    bound = min(best, profile.d_index()) if best > b_j else b_j
    trace = EvcBoundTrace(
        tuple(rows), chosen, b_j, bound, raised=bound > b_j, antichain=antichain
    )
    return bound, trace
