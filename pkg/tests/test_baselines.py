import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import exact_binomial_tail
from truefi.baselines import (
    binomial_tail_log,
    bonferroni_method,
    holdout_method,
    log_num_itemsets,
)
from truefi.dataset import TransactionDataset
from truefi.errors import ParameterError
from truefi.fim import mine_frequent

F = frozenset
THETAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def test_all_successes():
    r = binomial_tail_log(10, 10, 0.5)
    assert r.p_value == pytest.approx(2.0**-10, rel=1e-15)
    assert r.log_p_value == 10 * math.log(0.5)


def test_zero_successes():
    assert binomial_tail_log(0, 7, 0.3).p_value == 1.0


def test_reference_value():
    # six terms of the Bin(10, 0.3) pmf summed with rationals
    exact = exact_binomial_tail(5, 10, 0.3)
    assert binomial_tail_log(5, 10, 0.3).p_value == pytest.approx(float(exact), rel=1e-12)
    assert float(exact) == pytest.approx(0.1502683326, abs=1e-10)


@pytest.mark.parametrize("theta0", THETAS)
def test_agrees_with_rational_sum(theta0):
    for n in range(1, 31):
        for k in range(n + 1):
            exact = float(exact_binomial_tail(k, n, theta0))
            got = binomial_tail_log(k, n, theta0).p_value
            assert got == pytest.approx(exact, rel=1e-10)


def test_deep_tail_stays_finite():
    r = binomial_tail_log(60_000, 100_000, 0.5)
    assert -2100 < r.log_p_value < -1900
    assert r.p_value == 0.0


def test_large_n_near_mean():
    r = binomial_tail_log(49_000, 100_000, 0.5)
    assert r.p_value == pytest.approx(1.0, abs=1e-9)
    assert r.log_p_value <= 0


@pytest.mark.parametrize("k, n, theta0", [(-1, 5, 0.5), (6, 5, 0.5), (1, 0, 0.5), (1, 5, 0.0),
                                          (1, 5, 1.0)])
def test_domain(k, n, theta0):
    with pytest.raises(ParameterError):
        binomial_tail_log(k, n, theta0)


@given(st.integers(1, 400), st.data())
def test_monotone_in_k(n, data):
    theta0 = data.draw(st.sampled_from(THETAS))
    logs = [binomial_tail_log(k, n, theta0).log_p_value for k in range(n + 1)]
    assert all(a >= b - 1e-12 for a, b in zip(logs, logs[1:]))


@given(st.integers(1, 400), st.data())
def test_monotone_in_theta(n, data):
    k = data.draw(st.integers(0, n))
    logs = [binomial_tail_log(k, n, t).log_p_value for t in THETAS]
    assert all(a <= b + 1e-12 for a, b in zip(logs, logs[1:]))


@pytest.mark.parametrize("m", [1, 2, 10, 60, 5000])
def test_log_num_itemsets(m):
    if m <= 60:
        assert log_num_itemsets(m) == pytest.approx(math.log(2**m - 1), rel=1e-14)
    else:
        assert log_num_itemsets(m) == pytest.approx(m * math.log(2))


# -- Bonferroni ---------------------------------------------------------------------


def test_bonferroni_reports_certain_item():
    ds = TransactionDataset([F({1})] * 10_000)
    out = bonferroni_method(ds, 0.5, 0.1, num_items=2)
    assert out.itemsets() == {F({1})}


def test_bonferroni_rejects_boundary_frequency():
    ds = TransactionDataset([F({1})] * 10 + [F({2})] * 10)
    assert len(mine_frequent(ds, 0.5)) == 2
    assert len(bonferroni_method(ds, 0.5, 0.1)) == 0


def test_bonferroni_empty_candidates():
    ds = TransactionDataset([F({1}), F({2})])
    assert len(bonferroni_method(ds, 0.9, 0.1)) == 0


def test_bonferroni_many_items():
    # 2**3001 - 1 hypotheses: only the log of the count is ever formed
    rows = [F({0, i % 3000 + 1}) for i in range(4000)]
    ds = TransactionDataset(rows)
    out = bonferroni_method(ds, 0.5, 0.1)
    assert out.itemsets() == {F({0})}
    short = TransactionDataset(rows[:2000])
    assert len(bonferroni_method(short, 0.5, 0.1)) == 0


# -- holdout ------------------------------------------------------------------------------


def test_holdout_no_candidates():
    ds_e = TransactionDataset([F({1}), F({2})])
    assert len(holdout_method(ds_e, ds_e, 0.9, 0.1)) == 0


def test_holdout_certain_candidate():
    ds_e = TransactionDataset([F({1})] * 10)
    ds_v = TransactionDataset([F({1})] * 1000)
    out = holdout_method(ds_e, ds_v, 0.5, 0.1)
    assert out.itemsets() == {F({1})}
    assert out.frequency({1}) == 1.0


def test_holdout_never_reports_below_theta():
    ds_e = TransactionDataset([F({1})] * 10)
    for k in range(0, 50):
        ds_v = TransactionDataset([F({1})] * k + [F({2})] * (100 - k))
        assert len(holdout_method(ds_e, ds_v, 0.5, 0.1)) == 0


rows_st = st.lists(st.frozensets(st.integers(0, 5), max_size=4), min_size=2, max_size=40)


@given(rows_st, rows_st, st.sampled_from([0.05, 0.2, 0.5]))
def test_outputs_within_mined_candidates(rows_e, rows_v, theta):
    ds_e, ds_v = TransactionDataset(rows_e), TransactionDataset(rows_v)
    assert holdout_method(ds_e, ds_v, theta, 0.1).itemsets() <= mine_frequent(ds_e, theta).itemsets()
    assert bonferroni_method(ds_e, theta, 0.1).itemsets() <= mine_frequent(ds_e, theta).itemsets()
