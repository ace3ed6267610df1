import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from truefi.dataset import GroundTruthModel, TransactionDataset, random_split, sample_from_model
from truefi.errors import EmptyDatasetError, InfeasibleThresholdError, ParameterError, ResourceLimitError
from truefi.fim import mine_frequent
from truefi.tfi import TfiConfig, method1, method2, split_delta

F = frozenset


def repeated(t, n):
    return TransactionDataset([F(t)] * n)


# -- confidence split ------------------------------------------------------------


def test_split_delta_default():
    s = split_delta(0.1)
    assert s.delta_1 == s.delta_2 == pytest.approx(0.05131670194948620040, rel=1e-14)
    assert (1 - s.delta_1) * (1 - s.delta_2) == pytest.approx(0.9, rel=1e-14)


def test_split_delta_quarter():
    s = split_delta(0.75)
    assert s.delta_1 == pytest.approx(0.5) and s.delta_2 == pytest.approx(0.5)


def test_split_delta_small():
    s = split_delta(1e-12)
    assert 0 < s.delta_1 < 1e-12


@given(st.floats(1e-6, 0.99), st.floats(0.01, 0.99))
def test_split_delta_custom(delta, frac):
    s = split_delta(delta, delta * frac)
    assert 0 < s.delta_2 < 1
    assert (1 - s.delta_1) * (1 - s.delta_2) == pytest.approx(1 - delta, rel=1e-12)


@pytest.mark.parametrize("args", [(0.0,), (1.0,), (0.1, 0.2), (0.1, 0.0)])
def test_split_delta_domain(args):
    with pytest.raises(ParameterError):
        split_delta(*args)


# -- method 1 ----------------------------------------------------------------------


def test_method1_without_band_skips_evaluation():
    ds_e = repeated({1}, 100_000)
    ds_v = repeated({1}, 100_000)
    rep = method1(ds_e, ds_v, 0.5, 0.1)
    assert rep.sizes["G"] == 0
    assert "evaluation" not in rep.epsilons
    assert rep.itemsets() == {F({1})}
    assert rep.phases == {F({1}): "exploratory"}


def test_method1_vacuous_exploratory_region():
    rows = [F(range(5 * i + 2, 5 * i + 7)) for i in range(40)] + [F({0, 1})] * 60
    ds = TransactionDataset(rows)
    rep = method1(ds, ds, 0.3, 0.1)
    assert 0.3 + rep.epsilons["exploratory"].eps > 1
    assert rep.sizes["C_e"] == 0
    assert rep.sizes["G"] == len(mine_frequent(ds, 0.3))
    assert rep.itemsets() <= mine_frequent(ds, 0.3).itemsets()
    assert any("vacuous" in note for note in rep.notes)


def test_method1_finds_dominant_item():
    gt = GroundTruthModel.from_probabilities([({1}, 0.9), ({2}, 0.1)])
    ds = sample_from_model(gt, 200_000, seed=1)
    ds_e, ds_v = random_split(ds, 0.5, seed=2)
    rep = method1(ds_e, ds_v, 0.5, 0.1)
    assert F({1}) in rep.itemsets()
    assert F({2}) not in rep.itemsets()


def test_method1_rejects_empty_part():
    with pytest.raises(EmptyDatasetError):
        method1(TransactionDataset([]), repeated({1}, 3), 0.5, 0.1)


planted = st.lists(
    st.tuples(st.frozensets(st.integers(0, 5), min_size=1, max_size=4), st.integers(1, 20)),
    min_size=1, max_size=6, unique_by=lambda x: x[0],
)


def _model(pairs):
    trs, ws = zip(*pairs)
    return GroundTruthModel(trs, ws, sum(ws))


@settings(max_examples=25, deadline=None)
@given(planted, st.sampled_from([0.1, 0.3, 0.6]), st.integers(0, 2**32 - 1))
def test_method1_invariants(pairs, theta, seed):
    ds = sample_from_model(_model(pairs), 4000, seed)
    ds_e, ds_v = random_split(ds, 0.5, seed)
    rep = method1(ds_e, ds_v, theta, 0.1)
    assert rep.itemsets() <= mine_frequent(ds_e, theta).itemsets()
    if "evaluation" in rep.epsilons:
        eps_v = rep.epsilons["evaluation"].eps
        for a in rep.c_v:
            assert ds_v.support_count(a) / ds_v.n >= theta + eps_v - 1e-12
            assert ds_e.support_count(a) / ds_e.n >= theta
    assert rep.sizes["C_e"] + rep.sizes["C_v"] == len(rep.output)


# -- method 2 --------------------------------------------------------------------------


def test_method2_single_item():
    rep = method2(repeated({1}, 100_000), 0.5, 0.1)
    assert rep.itemsets() == {F({1})}
    assert rep.epsilons["first"].eps < 0.5 and rep.epsilons["second"].eps < 0.5


def test_method2_empty_frequent_family():
    rows = [F({i}) for i in range(20)] * 5000
    ds = TransactionDataset(rows)
    rep = method2(ds, 0.5, 0.1)
    assert rep.sizes["FI_low"] == 0
    assert rep.sizes["W"] == 20 and rep.sizes["F"] == 20
    assert len(rep.output) == 0


def test_method2_vacuous_region():
    rep = method2(repeated({1}, 100_000), 1.0, 0.1)
    assert len(rep.output) == 0
    assert any("vacuous" in note for note in rep.notes)


def test_method2_infeasible_threshold():
    with pytest.raises(InfeasibleThresholdError):
        method2(TransactionDataset([F({i, i + 1}) for i in range(30)]), 0.05, 0.1)


def test_method2_candidate_cap():
    rows = [F({i, i + 1}) for i in range(10)] * 10_000
    with pytest.raises(ResourceLimitError):
        method2(TransactionDataset(rows), 0.05, 0.1, TfiConfig(max_candidates=3))


def test_method2_is_threshold_cut():
    gt = GroundTruthModel.from_probabilities(
        [({1, 2, 3}, 0.3), ({1, 2}, 0.25), ({2, 4}, 0.2), ({5}, 0.15), ({1, 5}, 0.1)]
    )
    ds = sample_from_model(gt, 50_000, seed=3)
    rep = method2(ds, 0.2, 0.1)
    cut = rep.theta + rep.epsilons["second"].eps
    assert rep.output.counts == mine_frequent(ds, cut).counts
    assert rep.itemsets() <= mine_frequent(ds, 0.2).itemsets()


def test_method2_exact_and_early_sukp_agree():
    gt = GroundTruthModel.from_probabilities(
        [({1, 2, 3}, 0.3), ({1, 2}, 0.25), ({2, 4}, 0.2), ({5}, 0.15), ({1, 5}, 0.1)]
    )
    ds = sample_from_model(gt, 20_000, seed=4)
    a = method2(ds, 0.15, 0.1, TfiConfig(sukp_early_exit=True))
    b = method2(ds, 0.15, 0.1, TfiConfig(sukp_early_exit=False))
    assert a.bounds["second"]["evc"] == b.bounds["second"]["evc"]
    assert a.itemsets() == b.itemsets()


@settings(max_examples=150, deadline=None)
@given(planted, st.sampled_from([0.2, 0.4, 0.6]), st.floats(0.01, 0.5), st.floats(0.01, 0.5),
       st.integers(0, 2**32 - 1))
def test_method2_monotone_in_delta(pairs, theta, d1, d2, seed):
    ds = sample_from_model(_model(pairs), 20_000, seed)
    lo, hi = sorted((d1, d2))
    try:
        strict = method2(ds, theta, lo)
    except InfeasibleThresholdError:
        return
    loose = method2(ds, theta, hi)
    assert loose.epsilons["first"].eps <= strict.epsilons["first"].eps
    assert loose.epsilons["second"].eps <= strict.epsilons["second"].eps
    assert strict.itemsets() <= loose.itemsets()


def test_report_json_schema():
    rep = method2(repeated({1, 2}, 50_000), 0.5, 0.1)
    doc = json.loads(rep.to_json())
    assert set(doc) >= {"method", "theta", "delta", "delta_split", "epsilons", "bounds",
                        "sizes", "output"}
    assert doc["epsilons"]["second"]["provenance"] in ("vc", "evc", "both")
    assert "sukp_trace" in doc["bounds"]["second"]
    assert doc["output"][0] == {"itemset": [1], "frequency": 1.0}
    assert math.isclose(doc["delta_split"]["delta_1"], split_delta(0.1).delta_1)
