import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latacc.errors import SummaryError
from latacc.posterior import (ChainSet, accuracy, confusion_matrix, derived_chains, f1_score, ppv,
                              summarize, summarize_values)

interior = st.floats(min_value=1e-4, max_value=1 - 1e-4)


def chainset(**cols):
    n = len(next(iter(cols.values())))
    return ChainSet({k: np.asarray(v, dtype=float) for k, v in cols.items()},
                    np.zeros(n, dtype=int), np.arange(1, n + 1))


def test_constant_chain_summary():
    s = summarize_values(np.full(100, 0.5))
    assert s.count == 100
    assert (s.mean, s.std, s.min, s.q25, s.median, s.q75, s.max) == (0.5, 0.0, 0.5, 0.5, 0.5, 0.5, 0.5)


def test_two_point_summary_uses_sample_std():
    s = summarize_values([0.0, 1.0])
    assert s.mean == 0.5
    assert s.std == pytest.approx(np.sqrt(0.5), abs=1e-15)
    assert (s.q25, s.median, s.q75) == (0.25, 0.5, 0.75)


def test_quantiles_interpolate_linearly():
    s = summarize_values([1.0, 2.0, 3.0, 4.0, 10.0])
    assert (s.q25, s.median, s.q75) == (2.0, 3.0, 4.0)
    s = summarize_values([4.0, 1.0, 3.0, 2.0])
    assert (s.q25, s.median, s.q75) == (1.75, 2.5, 3.25)


def test_empty_chain_rejected():
    with pytest.raises(SummaryError):
        summarize_values([])
    with pytest.raises(SummaryError):
        summarize(chainset(x=[]))


@settings(max_examples=1000, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60))
def test_summary_ordering(values):
    s = summarize_values(values)
    assert s.min <= s.q25 <= s.median <= s.q75 <= s.max
    assert s.std >= 0


def test_summary_serialization_column_order():
    summ = summarize(chainset(Se_A=[0.8, 0.9, 0.85], pi=[0.2, 0.3, 0.25]))
    header = summ.to_csv().splitlines()[0]
    assert header == "quantity,count,mean,std,min,25%,50%,75%,max"
    data = json.loads(summ.to_json())
    assert list(data) == ["Se_A", "pi"]
    assert list(data["Se_A"]) == ["count", "mean", "std", "min", "25%", "50%", "75%", "max"]
    assert "Se_A" in summ.table()


def test_confusion_matrix_worked_example():
    cm = confusion_matrix(0.898, 0.956)
    assert cm.proportions[0] == pytest.approx((0.898, 0.102), abs=1e-12)
    assert cm.proportions[1] == pytest.approx((0.044, 0.956), abs=1e-12)
    assert cm.counts is None


def test_confusion_matrix_trivial_cases():
    assert confusion_matrix(1, 1).proportions == ((1.0, 0.0), (0.0, 1.0))
    assert confusion_matrix(0.5, 0.5).proportions == ((0.5, 0.5), (0.5, 0.5))
    with pytest.raises(ValueError):
        confusion_matrix(1.1, 0.5)


def test_confusion_matrix_counts_round_half_away():
    cm = confusion_matrix(0.25, 0.75, n=10)
    # 2.5 -> 3 and 7.5 -> 8: halves round away from zero.
    assert cm.counts == ((3, 8), (3, 8))
    cm = confusion_matrix(0.898, 0.956, n=150)
    assert cm.counts == ((135, 15), (7, 143))


@settings(max_examples=500, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_confusion_rows_sum_to_one(se, sp):
    cm = confusion_matrix(se, sp)
    assert sum(cm.proportions[0]) == 1.0
    assert sum(cm.proportions[1]) == 1.0


def test_metric_spot_check_alternate_ppv():
    se, sp, pi = 0.898, 0.956, 0.296
    assert accuracy(se, sp, pi) == pytest.approx(0.938832, abs=1e-12)
    p = ppv(se, sp, pi, "paper")
    assert p == pytest.approx(0.7873086583574238, abs=1e-12)
    assert f1_score(se, p) == pytest.approx(0.8390192166864473, abs=1e-12)


def test_metric_spot_check_standard_convention():
    assert ppv(0.898, 0.956, 0.296, "standard") == pytest.approx(0.8956277966467195, abs=1e-12)
    with pytest.raises(ValueError):
        ppv(0.9, 0.9, 0.3, "other")


@pytest.mark.parametrize("conv", ["paper", "standard"])
def test_perfect_classifier_metrics(conv):
    d = derived_chains(chainset(Se_A=[1.0], Sp_A=[1.0], pi=[0.3]), ppv_convention=conv)
    for name in ("accuracy", "ppv", "f1", "recall"):
        assert d[name][0] == 1.0


@settings(max_examples=500, deadline=None)
@given(interior)
def test_alternate_ppv_at_even_prevalence_equals_sensitivity(se):
    assert ppv(se, 0.3, 0.5, "paper") == se


@settings(max_examples=1000, deadline=None)
@given(interior, interior, interior, st.sampled_from(["paper", "standard"]))
def test_metrics_bounded_and_f1_between(se, sp, pi, conv):
    p = ppv(se, sp, pi, conv)
    acc = accuracy(se, sp, pi)
    f1 = f1_score(se, p)
    assert 0 < acc < 1 and 0 < p <= 1 and 0 < f1 <= 1
    assert min(se, p) - 1e-12 <= f1 <= max(se, p) + 1e-12


def test_derived_chains_are_elementwise():
    rng = np.random.default_rng(0)
    n = 50
    cs = chainset(Se_A=rng.uniform(0.6, 0.99, n), Sp_A=rng.uniform(0.6, 0.99, n),
                  Se_B=rng.uniform(0.6, 0.99, n), Sp_B=rng.uniform(0.6, 0.99, n), pi=rng.uniform(0.1, 0.9, n))
    perm = rng.permutation(n)
    shuffled = chainset(**{k: cs[k][perm] for k in cs.names})
    d, ds = derived_chains(cs), derived_chains(shuffled)
    for name in ("accuracy", "recall", "ppv", "f1"):
        assert np.array_equal(d[name][perm], ds[name])
    b = derived_chains(cs, "B")
    assert np.array_equal(b["recall"], cs["Se_B"])


def test_derived_chains_prevalence_choice():
    cs = chainset(Se_A=[0.9], Sp_A=[0.9], pi=[0.2], pi_beta=[0.6])
    assert derived_chains(cs, prevalence="pi_beta")["accuracy"][0] == pytest.approx(0.9)
    assert derived_chains(cs, prevalence="pi_beta")["ppv"][0] == pytest.approx(0.54 / 0.58)


def test_zero_denominator_raises():
    with pytest.raises(ZeroDivisionError):
        derived_chains(chainset(Se_A=[0.0], Sp_A=[1.0], pi=[0.3]))
