"""Extraction of true frequent itemsets with family-wise error rate <= delta.

``method1`` splits the data: candidates are found on an exploratory part and
re-tested on an evaluation part. ``method2`` uses the whole dataset and
bounds the dimension of the (unknown) negative border of the true frequent
itemsets through a superset of it built from the data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .dataset import TransactionDataset, count_threshold, d_index, length_profile
from .errors import EmptyDatasetError, InfeasibleThresholdError, ParameterError, ResourceLimitError
from .fim import ItemsetCollection, mine_frequent, negative_border
from .sukp import evc_bound_from_sukp, vc_bound_from_sukp
from .vcbounds import DEFAULT_C, EpsilonResult, epsilon_from_bounds, vc_bound_powerset


@dataclass(frozen=True)
class DeltaSplit:
    delta: float
    delta_1: float
    delta_2: float

    def to_dict(self):
        return {"delta": self.delta, "delta_1": self.delta_1, "delta_2": self.delta_2}


def split_delta(delta: float, delta_1: float | None = None) -> DeltaSplit:
    """Split the confidence budget so that (1 - delta_1)(1 - delta_2) = 1 - delta.

    By default both halves are ``1 - sqrt(1 - delta)``.
    """
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if delta_1 is None:
        d = 1.0 - math.sqrt(1.0 - delta)
        return DeltaSplit(delta, d, d)
    if not 0.0 < delta_1 < delta:
        raise ParameterError(f"delta_1 must be in (0, delta), got {delta_1}")
    return DeltaSplit(delta, delta_1, 1.0 - (1.0 - delta) / (1.0 - delta_1))


@dataclass(frozen=True)
class TfiConfig:
    c: float = DEFAULT_C
    delta_1: float | None = None
    # size of the item ground set; defaults to the items observed in the data
    num_items: int | None = None
    sukp_early_exit: bool = True
    max_candidates: int | None = 200_000
    max_itemsets: int | None = 5_000_000


@dataclass
class TfiReport:
    method: str
    theta: float
    delta: float
    delta_split: DeltaSplit
    epsilons: dict
    bounds: dict
    sizes: dict
    output: ItemsetCollection
    phases: dict = field(default_factory=dict)  # itemset -> "exploratory" | "evaluation"
    notes: list = field(default_factory=list)

    def itemsets(self) -> set:
        return self.output.itemsets()

    def to_dict(self) -> dict:
        eps = {k: (v.to_dict() if isinstance(v, EpsilonResult) else v) for k, v in self.epsilons.items()}
        out = []
        for a in self.output:
            rec = {"itemset": sorted(a), "frequency": self.output.frequency(a)}
            if a in self.phases:
                rec["phase"] = self.phases[a]
            out.append(rec)
        return {
            "method": self.method,
            "theta": self.theta,
            "delta": self.delta,
            "delta_split": self.delta_split.to_dict(),
            "epsilons": eps,
            "bounds": self.bounds,
            "sizes": self.sizes,
            "notes": list(self.notes),
            "output": out,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _check_params(theta, delta):
    if not 0.0 < theta <= 1.0:
        raise ParameterError(f"theta must be in (0, 1], got {theta}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")


def _num_items(config: TfiConfig, *datasets) -> int:
    if config.num_items is not None:
        return config.num_items
    return max(1, len(frozenset().union(*(ds.item_universe for ds in datasets))))


def _check_cap(config: TfiConfig, size: int, what: str):
    if config.max_candidates is not None and size > config.max_candidates:
        raise ResourceLimitError(
            f"{what} has {size} itemsets, above the cap of {config.max_candidates}"
        )


def _collection_bounds(coll, ds: TransactionDataset, antichain: bool, config: TfiConfig):
    d_vc = vc_bound_from_sukp(coll, antichain=antichain)
    d_evc, trace = evc_bound_from_sukp(
        coll, length_profile(ds), antichain=antichain, early_exit=config.sukp_early_exit
    )
    return d_vc, d_evc, trace


def method1(ds_e: TransactionDataset, ds_v: TransactionDataset, theta: float, delta: float,
            config: TfiConfig | None = None) -> TfiReport:
    """Split-dataset extraction (exploratory part ``ds_e``, evaluation part ``ds_v``)."""
    config = config or TfiConfig()
    _check_params(theta, delta)
    if ds_e.n == 0 or ds_v.n == 0:
        raise EmptyDatasetError("both parts of the split must be non-empty")
    split = split_delta(delta, config.delta_1)
    num_items = _num_items(config, ds_e, ds_v)
    d_pow = vc_bound_powerset(num_items)
    d_idx = d_index(ds_e)
    eps_e = epsilon_from_bounds(d_pow, d_idx, ds_e.n, split.delta_1, config.c)

    fi_e = mine_frequent(ds_e, theta, config.max_itemsets)
    c_e = fi_e.at_least(theta + eps_e.eps)
    g = fi_e.below(theta + eps_e.eps)
    _check_cap(config, len(g), "candidate set G")

    epsilons = {"exploratory": eps_e}
    bounds = {"exploratory": {"vc": d_pow, "evc": d_idx, "vc_source": "powerset", "evc_source": "d-index"}}
    notes = []
    if theta + eps_e.eps > 1:
        notes.append("exploratory acceptance region is vacuous: theta + eps_e > 1")
    phases = {a: "exploratory" for a in c_e.counts}
    c_v_counts = {}
    if len(g):
        d_vc, d_evc, trace = _collection_bounds(g.itemsets(), ds_v, False, config)
        eps_v = epsilon_from_bounds(d_vc, d_evc, ds_v.n, split.delta_2, config.c)
        epsilons["evaluation"] = eps_v
        bounds["evaluation"] = {
            "vc": d_vc, "evc": d_evc, "vc_source": "sukp", "evc_source": "sukp",
            "sukp_trace": trace.to_dict(),
        }
        if theta + eps_v.eps <= 1:
            k = count_threshold(theta + eps_v.eps, ds_v.n)
            for a in g.counts:
                cnt = ds_v.support_count(a)
                if cnt >= k:
                    c_v_counts[a] = cnt
                    phases[a] = "evaluation"
        else:
            notes.append("evaluation acceptance region is vacuous: theta + eps_v > 1")
    else:
        notes.append("G is empty; evaluation phase skipped")

    out_counts = dict(c_e.counts)
    out_counts.update({a: fi_e.counts[a] for a in c_v_counts})
    report = TfiReport(
        method="method1",
        theta=theta,
        delta=delta,
        delta_split=split,
        epsilons=epsilons,
        bounds=bounds,
        sizes={"FI_e": len(fi_e), "C_e": len(c_e), "G": len(g), "C_v": len(c_v_counts),
               "n_e": ds_e.n, "n_v": ds_v.n, "num_items": num_items},
        output=ItemsetCollection(out_counts, ds_e.n),
        phases=phases,
        notes=notes,
    )
    report.c_v = ItemsetCollection(c_v_counts, ds_v.n)
    return report


def method2(ds: TransactionDataset, theta: float, delta: float,
            config: TfiConfig | None = None) -> TfiReport:
    """Full-dataset extraction: returns ``FI(ds, theta + eps_2)``."""
    config = config or TfiConfig()
    _check_params(theta, delta)
    if ds.n == 0:
        raise EmptyDatasetError("cannot run on an empty dataset")
    split = split_delta(delta, config.delta_1)
    num_items = _num_items(config, ds)
    d_pow = vc_bound_powerset(num_items)
    d_idx = d_index(ds)
    eps_1 = epsilon_from_bounds(d_pow, d_idx, ds.n, split.delta_1, config.c)
    low = theta - eps_1.eps
    if low <= 0:
        raise InfeasibleThresholdError(
            f"theta - eps_1 = {low:.6g} <= 0 (eps_1 = {eps_1.eps:.6g}); need more data or a larger theta"
        )

    fi_low = mine_frequent(ds, low, config.max_itemsets)
    border = negative_border(fi_low.itemsets(), ds.item_universe)
    g = fi_low.below(theta + eps_1.eps)
    f = g.itemsets() | border
    _check_cap(config, len(f), "candidate superset F")

    notes = []
    if f:
        d_vc, d_evc, trace = _collection_bounds(f, ds, True, config)
        trace_dict = trace.to_dict()
    else:
        d_vc, d_evc, trace_dict = 0, 0, None
        notes.append("F is empty; every itemset over the universe is frequent")
    eps_2 = epsilon_from_bounds(d_vc, d_evc, ds.n, split.delta_2, config.c)
    if theta + eps_2.eps > 1:
        output = ItemsetCollection({}, ds.n)
        notes.append("acceptance region is vacuous: theta + eps_2 > 1")
    else:
        output = fi_low.at_least(theta + eps_2.eps)

    return TfiReport(
        method="method2",
        theta=theta,
        delta=delta,
        delta_split=split,
        epsilons={"first": eps_1, "second": eps_2},
        bounds={
            "first": {"vc": d_pow, "evc": d_idx, "vc_source": "powerset", "evc_source": "d-index"},
            "second": {"vc": d_vc, "evc": d_evc, "vc_source": "sukp-antichain",
                       "evc_source": "sukp-antichain", "sukp_trace": trace_dict},
        },
        sizes={"FI_low": len(fi_low), "G": len(g), "W": len(border), "F": len(f),
               "n": ds.n, "num_items": num_items},
        output=output,
        notes=notes,
    )
