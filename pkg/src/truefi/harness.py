"""Repeated-trial evaluation of the extraction procedures against a known
ground truth.

Each trial draws a dataset from the ground-truth model, runs every
configured method at every threshold on that same dataset, and scores the
output against the exact set of true frequent itemsets.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction

import numpy as np

from .baselines import bonferroni_method, holdout_method
from .dataset import (
    GroundTruthModel,
    TransactionDataset,
    count_threshold,
    random_split,
    read_fimi,
    sample_from_model,
)
from .errors import (
    EmptyDatasetError,
    InfeasibleThresholdError,
    ModelError,
    ParameterError,
    ResourceLimitError,
)
from .fim import mine_weighted
from .tfi import TfiConfig, method1, method2

METHODS = ("method1", "method2", "bonferroni", "holdout")
METHOD_ALIASES = {"1": "method1", "2": "method2", "m1": "method1", "m2": "method2"}


# --------------------------------------------------------------------------
# Ground truth


def ground_truth_from_dataset(ds: TransactionDataset) -> GroundTruthModel:
    """The empirical distribution of ``ds``."""
    if ds.n == 0:
        raise EmptyDatasetError("ground truth of an empty dataset")
    trs, counts = zip(*ds.distinct)
    return GroundTruthModel(trs, counts, ds.n)


def true_frequent_itemsets(gt: GroundTruthModel, theta: float) -> set:
    """``{A != {} : t(A) >= theta}``, computed exactly on the model's weights."""
    if not 0.0 < theta <= 1.0:
        raise ParameterError(f"theta must be in (0, 1], got {theta}")
    k = count_threshold(theta, gt.total)
    weighted = [(t, w) for t, w in zip(gt.transactions, gt.weights) if w > 0]
    return set(mine_weighted(weighted, k))


def planted_model(num_items: int = 50, num_planted: int = 20, min_len: int = 3,
                  max_len: int = 8, zipf_s: float = 1.0, resolution: int = 10**6,
                  seed=0) -> GroundTruthModel:
    """A mixture of ``num_planted`` distinct transactions.

    Items are drawn with Zipf-like popularity ``1 / rank**zipf_s``, lengths
    uniformly in ``[min_len, max_len]`` and mixture weights from a flat
    Dirichlet, rounded to multiples of ``1 / resolution``.
    """
    if not 1 <= min_len <= max_len <= num_items:
        raise ModelError("need 1 <= min_len <= max_len <= num_items")
    if num_planted < 1 or resolution < num_planted:
        raise ModelError("need 1 <= num_planted <= resolution")
    rng = np.random.default_rng(seed)
    pop = 1.0 / np.arange(1, num_items + 1) ** zipf_s
    pop /= pop.sum()
    planted: list = []
    seen = set()
    attempts = 0
    while len(planted) < num_planted:
        attempts += 1
        if attempts > 1000 * num_planted:
            raise ModelError("could not draw enough distinct transactions")
        size = int(rng.integers(min_len, max_len + 1))
        t = frozenset(int(i) for i in rng.choice(num_items, size=size, replace=False, p=pop))
        if t not in seen:
            seen.add(t)
            planted.append(t)
    raw = rng.dirichlet(np.ones(num_planted))
    # every transaction keeps at least one unit; the remainder goes to the largest
    weights = np.maximum(np.floor(raw * resolution).astype(np.int64), 1)
    weights[int(np.argmax(weights))] += resolution - int(weights.sum())
    return GroundTruthModel(tuple(planted), tuple(int(w) for w in weights), resolution)


def load_model(path) -> GroundTruthModel:
    """Read a JSON model file::

        {"support": [{"transaction": [1, 2], "probability": 0.6}, ...]}

    Probabilities are parsed as exact decimals.
    """
    with open(path) as fh:
        doc = json.load(fh, parse_float=Fraction)
    try:
        support = [(e["transaction"], Fraction(e["probability"])) for e in doc["support"]]
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model file {path}: {exc}") from None
    return GroundTruthModel.from_probabilities(support)


def model_to_json(gt: GroundTruthModel) -> str:
    doc = {"support": [
        {"transaction": sorted(t), "probability": w / gt.total}
        for t, w in zip(gt.transactions, gt.weights)
    ]}
    return json.dumps(doc, indent=1)


# --------------------------------------------------------------------------
# Configuration and rows


@dataclass(frozen=True)
class ExperimentConfig:
    thetas: tuple
    target_n: int
    dataset: str | None = None
    model: str | None = None
    planted: dict | None = None
    delta: float = 0.1
    trials: int = 20
    seed: int = 0
    methods: tuple = ("method1", "method2", "bonferroni", "holdout")
    split_fraction: float = 0.5
    c: float = 0.5
    sukp_early_exit: bool = True
    max_candidates: int | None = 200_000
    max_itemsets: int | None = 5_000_000
    workers: int = 1
    output_csv: str | None = None
    timings_csv: str | None = None
    reports_json: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        methods = tuple(METHOD_ALIASES.get(str(m), str(m)) for m in self.methods)
        object.__setattr__(self, "methods", methods)
        if sum(x is not None for x in (self.dataset, self.model, self.planted)) != 1:
            raise ParameterError("exactly one of dataset, model, planted must be given")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.target_n < 2:
            raise ParameterError("target_n must be >= 2")
        if not self.thetas or any(not 0.0 < t <= 1.0 for t in self.thetas):
            raise ParameterError("theta values must lie in (0, 1]")
        if not 0.0 < self.delta < 1.0:
            raise ParameterError("delta must be in (0, 1)")
        if not 0.0 < self.split_fraction < 1.0:
            raise ParameterError("split_fraction must be in (0, 1)")
        unknown = set(methods) - set(METHODS)
        if unknown or not methods:
            raise ParameterError(f"unknown methods: {sorted(unknown)}")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict, base_dir: str | None = None) -> ExperimentConfig:
        names = {f.name for f in fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        if "theta" in doc:
            raise ParameterError("use 'thetas' (a list)")
        if base_dir is not None:
            for key in ("dataset", "model"):
                if doc.get(key) and not os.path.isabs(doc[key]):
                    doc[key] = os.path.join(base_dir, doc[key])
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ParameterError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> ExperimentConfig:
        with open(path) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"config {path} is not valid JSON: {exc}") from None
        return cls.from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))

    def tfi_config(self) -> TfiConfig:
        return TfiConfig(c=self.c, sukp_early_exit=self.sukp_early_exit,
                         max_candidates=self.max_candidates, max_itemsets=self.max_itemsets)

    def ground_truth(self) -> GroundTruthModel:
        if self.dataset is not None:
            return ground_truth_from_dataset(read_fimi(self.dataset))
        if self.model is not None:
            return load_model(self.model)
        return planted_model(**self.planted)


@dataclass
class EvaluationRow:
    method: str
    theta: float
    trial: int
    seed: int
    status: str
    num_tfis: int
    num_reported: int | None = None
    true_positives: int | None = None
    false_positives: int | None = None
    power: float | None = None
    runtime: float = 0.0
    detail: str = ""
    report: dict | None = field(default=None, repr=False)

    def sort_key(self):
        return (self.method, self.theta, self.trial)


CSV_COLUMNS = ("method", "theta", "trial", "seed", "status", "num_tfis", "num_reported",
               "true_positives", "false_positives", "power", "detail")


def score(reported, tfis) -> tuple:
    """``(true_positives, false_positives, power)``; power is NaN without TFIs."""
    reported = set(reported)
    tp = len(reported & tfis)
    fp = len(reported - tfis)
    power = tp / len(tfis) if tfis else math.nan
    return tp, fp, power


# --------------------------------------------------------------------------
# Running


def _trial_seeds(seed: int, trials: int) -> list:
    return np.random.SeedSequence(seed).spawn(trials)


def _run_method(name, ds, parts, theta, cfg: ExperimentConfig):
    tcfg = cfg.tfi_config()
    if name == "method1":
        rep = method1(parts[0], parts[1], theta, cfg.delta, tcfg)
        return rep.itemsets(), rep.to_dict()
    if name == "method2":
        rep = method2(ds, theta, cfg.delta, tcfg)
        return rep.itemsets(), rep.to_dict()
    if name == "bonferroni":
        return bonferroni_method(ds, theta, cfg.delta, max_itemsets=cfg.max_itemsets).itemsets(), None
    return holdout_method(parts[0], parts[1], theta, cfg.delta, cfg.max_itemsets).itemsets(), None


def run_trial(cfg: ExperimentConfig, gt: GroundTruthModel, tfis: dict, trial: int,
              seq: np.random.SeedSequence) -> list:
    """Rows for one trial: every (method, theta) pair on one sampled dataset."""
    seed_id = int(seq.generate_state(1, dtype=np.uint32)[0])
    sample_seq, split_seq = seq.spawn(2)
    ds = sample_from_model(gt, cfg.target_n, sample_seq)
    parts = random_split(ds, cfg.split_fraction, split_seq)
    rows = []
    for name in cfg.methods:
        for theta in cfg.thetas:
            truth = tfis[theta]
            row = EvaluationRow(name, theta, trial, seed_id, "ok", len(truth))
            start = time.perf_counter()
            try:
                reported, report = _run_method(name, ds, parts, theta, cfg)
            except InfeasibleThresholdError as exc:
                row.status, row.detail = "infeasible", str(exc)
            except ResourceLimitError as exc:
                row.status, row.detail = "resource_limit", str(exc)
            else:
                row.num_reported = len(reported)
                row.true_positives, row.false_positives, row.power = score(reported, truth)
                row.report = report
            row.runtime = time.perf_counter() - start
            rows.append(row)
    return rows


def run_experiment(cfg: ExperimentConfig, gt: GroundTruthModel | None = None) -> list:
    """All rows, sorted by (method, theta, trial). Deterministic given ``cfg``."""
    gt = gt if gt is not None else cfg.ground_truth()
    tfis = {theta: true_frequent_itemsets(gt, theta) for theta in cfg.thetas}
    seqs = _trial_seeds(cfg.seed, cfg.trials)
    rows = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(run_trial, cfg, gt, tfis, t, s) for t, s in enumerate(seqs)]
            for fut in futures:
                rows.extend(fut.result())
    else:
        for t, s in enumerate(seqs):
            rows.extend(run_trial(cfg, gt, tfis, t, s))
    rows.sort(key=EvaluationRow.sort_key)
    return rows


# --------------------------------------------------------------------------
# Output


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)


def rows_to_csv(rows) -> str:
    """Fixed columns; runtimes are left out so the text is reproducible."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(getattr(row, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def timings_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("method", "theta", "trial", "runtime_seconds"))
    for row in rows:
        writer.writerow((row.method, repr(row.theta), row.trial, f"{row.runtime:.6f}"))
    return buf.getvalue()


def summarize(rows) -> list:
    """Per (method, theta): mean and standard deviation over successful trials."""
    groups: dict = {}
    for row in rows:
        groups.setdefault((row.method, row.theta), []).append(row)
    out = []
    for (method, theta), grp in sorted(groups.items()):
        ok = [r for r in grp if r.status == "ok"]
        powers = np.array([r.power for r in ok if r.power is not None and not math.isnan(r.power)])
        reported = np.array([r.num_reported for r in ok], dtype=float)
        runtimes = np.array([r.runtime for r in grp])
        out.append({
            "method": method,
            "theta": theta,
            "trials": len(grp),
            "failed": len(grp) - len(ok),
            "trials_with_false_positive": sum(1 for r in ok if r.false_positives),
            "power_mean": float(powers.mean()) if powers.size else math.nan,
            "power_std": float(powers.std()) if powers.size else math.nan,
            "reported_mean": float(reported.mean()) if reported.size else math.nan,
            "reported_std": float(reported.std()) if reported.size else math.nan,
            "runtime_mean": float(runtimes.mean()),
            "runtime_std": float(runtimes.std()),
        })
    return out


def format_summary(summary) -> str:
    head = f"{'method':<11}{'theta':>7}{'trials':>7}{'failed':>7}{'FWER':>7}{'power':>9}{'(std)':>8}{'|out|':>9}"
    lines = [head]
    for s in summary:
        lines.append(
            f"{s['method']:<11}{s['theta']:>7.3f}{s['trials']:>7}{s['failed']:>7}"
            f"{s['trials_with_false_positive']:>7}{s['power_mean'] * 100:>8.2f}%"
            f"{s['power_std'] * 100:>8.2f}{s['reported_mean']:>9.1f}"
        )
    return "\n".join(lines)


def write_outputs(cfg: ExperimentConfig, rows) -> None:
    if cfg.output_csv:
        with open(cfg.output_csv, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    if cfg.timings_csv:
        with open(cfg.timings_csv, "w", newline="") as fh:
            fh.write(timings_to_csv(rows))
    if cfg.reports_json:
        docs = [
            {"method": r.method, "theta": r.theta, "trial": r.trial, "report": r.report}
            for r in rows if r.report is not None
        ]
        with open(cfg.reports_json, "w") as fh:
            json.dump(docs, fh)
