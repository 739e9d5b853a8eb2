import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import multinomial

from latacc.model import (CellProbs, CrossTab, ParamState, cell_probs, joint_log_posterior,
                          log_likelihood)
from latacc.priors import BetaParams, PriorSet

interior = st.floats(min_value=1e-6, max_value=1 - 1e-6)


def state(se_a, sp_a, se_b, sp_b, *pis):
    return ParamState(se_a, sp_a, se_b, sp_b, tuple(pis))


def test_crosstab_total_and_validation():
    tab = CrossTab(40, 3, 7, 100)
    assert tab.n == 150
    assert tab.transposed().counts() == (40, 7, 3, 100)
    with pytest.raises(ValueError):
        CrossTab(-1, 0, 0, 0)
    with pytest.raises(ValueError):
        CrossTab(1.5, 0, 0, 0)


def test_rates_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        state(1.2, 0.5, 0.5, 0.5, 0.3)
    with pytest.raises(ValueError):
        state(0.5, 0.5, 0.5, 0.5, -0.1)
    with pytest.raises(ValueError):
        ParamState(0.5, 0.5, 0.5, 0.5, ())


def test_perfect_classifiers_collapse_to_prevalence():
    p = cell_probs(state(1, 1, 1, 1, 0.3)).as_tuple()
    assert p == pytest.approx((0.3, 0, 0, 0.7), abs=1e-15)


@pytest.mark.parametrize("pi", [0.0, 0.1, 0.5, 0.93, 1.0])
def test_coin_flip_classifiers_are_uniform(pi):
    assert cell_probs(state(0.5, 0.5, 0.5, 0.5, pi)).as_tuple() == pytest.approx((0.25,) * 4, abs=1e-15)


def test_cell_probs_at_worked_example_means():
    # Exact rational evaluation of the four cell formulas.
    p = cell_probs(state(0.898, 0.956, 0.920, 0.936, 0.296)).as_tuple()
    assert p == pytest.approx((0.246525824, 0.050258176, 0.070850176, 0.632365824), abs=1e-12)


def test_prevalence_index_selects_dataset():
    s = state(0.9, 0.8, 0.7, 0.6, 0.2, 0.7)
    assert cell_probs(s, 1) == cell_probs(state(0.9, 0.8, 0.7, 0.6, 0.7))
    with pytest.raises(IndexError):
        cell_probs(s, 2)
    with pytest.raises(IndexError):
        cell_probs(state(0.9, 0.8, 0.7, 0.6, 0.2), 1)


@settings(max_examples=1000, deadline=None)
@given(interior, interior, interior, interior, interior)
def test_cell_probs_on_simplex(a, b, c, d, pi):
    p = cell_probs(state(a, b, c, d, pi)).as_tuple()
    assert all(v >= 0 for v in p)
    assert abs(math.fsum(p) - 1) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(interior, interior, interior, interior, interior)
def test_swapping_classifiers_transposes_cells(a, b, c, d, pi):
    s = state(a, b, c, d, pi)
    p = cell_probs(s).as_tuple()
    q = cell_probs(s.swapped()).as_tuple()
    assert q == pytest.approx((p[0], p[2], p[1], p[3]), abs=1e-15)


@settings(max_examples=1000, deadline=None)
@given(interior, interior, interior, interior, interior)
def test_mirror_state_has_identical_cells(a, b, c, d, pi):
    s = state(a, b, c, d, pi)
    assert cell_probs(s.mirrored()).as_tuple() == pytest.approx(cell_probs(s).as_tuple(), abs=1e-15)


def test_log_likelihood_examples():
    assert log_likelihood(CrossTab(1, 1, 1, 1), CellProbs(0.25, 0.25, 0.25, 0.25)) == pytest.approx(-2.3671236141316165, abs=1e-12)
    assert log_likelihood(CrossTab(5, 0, 0, 0), CellProbs(1, 0, 0, 0)) == 0.0
    assert log_likelihood(CrossTab(0, 0, 0, 0), CellProbs(0.1, 0.2, 0.3, 0.4)) == 0.0
    assert log_likelihood(CrossTab(0, 1, 0, 0), CellProbs(1, 0, 0, 0)) == -math.inf


def test_log_likelihood_matches_scipy_pmf():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = rng.dirichlet(np.ones(4))
        y = rng.multinomial(rng.integers(0, 300), p)
        expected = multinomial(y.sum(), p).logpmf(y)
        got = log_likelihood(CrossTab(*y), CellProbs(*(float(v) for v in p / p.sum())))
        assert got == pytest.approx(expected, rel=1e-10, abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 60), min_size=4, max_size=4).filter(lambda y: sum(y) > 0),
       st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
def test_empirical_proportions_maximize_likelihood(y, w):
    tab = CrossTab(*y)
    total = sum(w)
    other = CellProbs(*(v / total for v in w[:3]), 1 - sum(v / total for v in w[:3]))
    n = tab.n
    mle = CellProbs(*(v / n for v in y[:3]), 1 - sum(v / n for v in y[:3]))
    assert log_likelihood(tab, mle) >= log_likelihood(tab, other) - 1e-9


def test_joint_log_posterior_flat_priors_equals_likelihood():
    s = state(0.5, 0.5, 0.5, 0.5, 0.3)
    tab = CrossTab(1, 1, 1, 1)
    assert joint_log_posterior(s, [tab], PriorSet.uniform(1)) == pytest.approx(-2.3671236141316165, abs=1e-12)
    s2 = state(0.8, 0.7, 0.9, 0.6, 0.4)
    tab2 = CrossTab(12, 3, 5, 30)
    assert joint_log_posterior(s2, [tab2], PriorSet.uniform(1)) == pytest.approx(log_likelihood(tab2, cell_probs(s2)), abs=1e-12)


def test_joint_log_posterior_adds_beta_log_densities():
    from scipy.stats import beta

    priors = PriorSet(BetaParams(20, 4), BetaParams(3, 2), BetaParams(2, 5), BetaParams(1.5, 1.5), (BetaParams(2, 8),))
    s = state(0.8, 0.7, 0.3, 0.6, 0.25)
    tab = CrossTab(10, 4, 6, 20)
    expected = (log_likelihood(tab, cell_probs(s)) + beta(20, 4).logpdf(0.8) + beta(3, 2).logpdf(0.7)
                + beta(2, 5).logpdf(0.3) + beta(1.5, 1.5).logpdf(0.6) + beta(2, 8).logpdf(0.25))
    assert joint_log_posterior(s, [tab], priors) == pytest.approx(expected, abs=1e-10)


def test_two_identical_datasets_double_the_likelihood():
    tab = CrossTab(40, 3, 7, 100)
    b = BetaParams(20, 4)
    one = PriorSet(b, b, b, b, (BetaParams(2, 3),))
    two = PriorSet(b, b, b, b, (BetaParams(2, 3), BetaParams(1, 1)))
    s1 = state(0.9, 0.95, 0.92, 0.93, 0.3)
    s2 = state(0.9, 0.95, 0.92, 0.93, 0.3, 0.3)
    lik = log_likelihood(tab, cell_probs(s1))
    prior_only = joint_log_posterior(s1, [tab], one) - lik
    assert joint_log_posterior(s2, [tab, tab], two) == pytest.approx(2 * lik + prior_only, abs=1e-10)


def test_boundary_parameter_gives_minus_infinity_not_error():
    s = state(1.0, 0.9, 0.9, 0.9, 0.3)
    b = BetaParams(20, 4)
    assert joint_log_posterior(s, [CrossTab(1, 1, 1, 1)], PriorSet(b, b, b, b)) == -math.inf
