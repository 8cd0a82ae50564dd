import math

import numpy as np
import pytest

from conftest import zero_function
from onlinecover import WeightedCoverage, brute_opt, competitive_report, marginal_bounds, wolsey_greedy
from onlinecover.baselines import summarize_reports


def test_greedy_prefers_dense_element():
    f = WeightedCoverage([[0], [0, 1]], [1, 1])
    res = wolsey_greedy(f, [1, 1])
    assert res.cover == frozenset({1}) and res.cost == 1
    assert brute_opt(f, [1, 1]).cost == 1


def test_greedy_on_zero_function():
    res = wolsey_greedy(zero_function(3), [1, 1, 1])
    assert res.cover == frozenset() and res.cost == 0


def test_appendix_b_optimum(appendix_b):
    assert wolsey_greedy(appendix_b, [1, 1, 1]).cover == frozenset({0, 1})
    res = brute_opt(appendix_b, [1, 1, 1])
    assert res.cover == frozenset({0, 1}) and res.cost == 2


def test_brute_opt_forced_cover():
    f = WeightedCoverage([[0, 1]], [1, 1])
    assert brute_opt(f, [5]).cost == 5
    assert brute_opt(zero_function(2), [1, 1]).cost == 0


def test_brute_opt_size_limit():
    f = WeightedCoverage(np.ones((21, 1), dtype=bool), [1])
    with pytest.raises(ValueError):
        brute_opt(f, np.ones(21))


def test_greedy_free_elements_first():
    f = WeightedCoverage([[0], [0, 1], [1]], [1, 1])
    assert wolsey_greedy(f, [0, 3, 0]).cover == frozenset({0, 2})


def test_marginal_bounds(appendix_b):
    assert marginal_bounds([appendix_b]) == (1.0, 9.0)
    assert marginal_bounds([zero_function(2)]) == (0.0, 0.0)


def test_competitive_report_identity():
    rep = competitive_report([1, 2, 3], [1, 2, 3])
    assert rep.ratios == [1, 1, 1] and rep.max == 1 and rep.median == 1


def test_competitive_report_zero_opt():
    rep = competitive_report([0, 1], [0, 0])
    assert rep.ratios[0] == 1 and math.isinf(rep.ratios[1]) and rep.flagged == [2]


def test_competitive_report_empty():
    rep = competitive_report([], [])
    assert rep.ratios == [] and math.isnan(rep.max)


def test_competitive_report_length_mismatch():
    with pytest.raises(ValueError):
        competitive_report([1], [])


def test_summarize_reports():
    s = summarize_reports([competitive_report([2, 4], [1, 2]), competitive_report([1], [1])])
    assert s["runs"] == 2 and s["max_ratio"] == 2 and s["mean_max_ratio"] == 1.5
