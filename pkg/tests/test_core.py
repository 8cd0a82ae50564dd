from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_corpus, zero_function
from onlinecover import (
    CostVector,
    ExplicitTable,
    GroundSet,
    ModularFunction,
    PartitionMatroidRank,
    PrefixSum,
    WeightedCoverage,
    anchored_function,
    check_structure,
    covering_extension_exact,
    derivative,
    linearization,
    marginal,
    multilinear_estimate,
    multilinear_exact,
    mutual_coverage,
)
from onlinecover._validation import to_mask
from onlinecover.instances import random_oracle

A, B, Y = 0, 1, 2


def test_appendix_b_marginal(appendix_b):
    assert marginal(appendix_b, A, {Y}) == 9


def test_appendix_b_third_derivative(appendix_b):
    assert derivative(appendix_b, {A, B, Y}, set()) == -1


def test_modular_derivative_vanishes():
    f = ModularFunction([1, 2, 3])
    assert derivative(f, {0, 1}) == 0
    assert derivative(f, {0, 1, 2}) == 0


def test_anchored_values(appendix_b):
    g = anchored_function(appendix_b, Y)
    assert g.value({A}) == 0
    assert g.value({A, B}) == 1
    assert g.value(set()) == 0


def test_anchored_function_not_submodular(appendix_b):
    assert not check_structure(anchored_function(appendix_b, Y), "submodular")


def test_anchored_expectation_exact(appendix_b):
    g = anchored_function(appendix_b, Y)
    assert multilinear_exact(g, [Fraction(3, 4), Fraction(1, 2), Fraction(0)]) == Fraction(3, 8)


def test_multilinear_float_and_fraction_agree(appendix_b):
    x = [0.25, 0.5, 0.75]
    exact = multilinear_exact(appendix_b, [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    assert multilinear_exact(appendix_b, x) == pytest.approx(float(exact), abs=1e-12)


def test_multilinear_estimate_within_stderr(appendix_b):
    x = [0.3, 0.6, 0.2]
    mean, se = multilinear_estimate(appendix_b, x, samples=50_000, seed=0)
    assert abs(mean - multilinear_exact(appendix_b, x)) < 4 * se


def test_multilinear_estimate_deterministic(appendix_b):
    assert multilinear_estimate(appendix_b, [0.5] * 3, 1000, seed=3) == multilinear_estimate(
        appendix_b, [0.5] * 3, 1000, seed=3
    )


def test_explicit_table_requires_zero_at_empty():
    with pytest.raises(ValueError):
        ExplicitTable([1, 2, 2, 3], 2)


def test_explicit_table_size_cap():
    with pytest.raises(ValueError):
        ExplicitTable(np.zeros(1 << 21), 21)


def test_weighted_coverage_values(two_sets):
    assert two_sets.value(set()) == 0
    assert two_sets.value({0}) == 1
    assert two_sets.value({1}) == 2
    assert two_sets.value({0, 1}) == 2


def test_contraction_values(two_sets):
    g = two_sets.contract({0})
    assert g.value({1}) == 1
    assert g.value({0}) == 0
    assert g.null_mask() & 1


def test_partition_matroid_rank():
    f = PartitionMatroidRank(4, [[0, 1], [2, 3]], [1, 2])
    assert f.value({0, 1}) == 1
    assert f.value({0, 2, 3}) == 3
    assert f.value(range(4)) == 3


def test_prefix_sum_adds_values(two_sets):
    f = PrefixSum([two_sets, ModularFunction([1, 0])])
    assert f.value({0}) == 2
    assert f.value({0, 1}) == 3


def test_oracle_calls_counted(two_sets):
    before = two_sets.oracle_calls
    two_sets.values_of([0, 1, 2, 3])
    assert two_sets.oracle_calls == before + 4


def test_ground_set_labels():
    g = GroundSet(3, ("a", "b", "y"))
    assert g.format(0b101) == "{a,y}"
    with pytest.raises(ValueError):
        GroundSet(2, ("a",))


def test_cost_vector():
    c = CostVector(np.array([0.0, 2.0, 3.0]))
    assert c.cmin == 2.0 and c.cmax == 3.0
    assert c.total(0b110) == 5.0


def test_subset_validation():
    with pytest.raises(IndexError):
        to_mask({5}, 3)


def test_linearization_at_integer_point(appendix_b):
    # f^{#S}(chi_T) >= f(S + T) >= f(T); equal to f(T) at S = T
    x = np.array([1.0, 0.0, 1.0])
    assert linearization(appendix_b, {A, Y}, x) == appendix_b.value({A, Y})


@pytest.mark.parametrize("f", oracle_corpus(25, seed=11, n_max=6))
def test_covering_extension_at_indicators(f):
    for mask in range(1 << f.n):
        x = np.array([mask >> j & 1 for j in range(f.n)], dtype=float)
        value, _ = covering_extension_exact(f, x)
        assert value == pytest.approx(f.value(mask), abs=1e-9)


@pytest.mark.parametrize("f", oracle_corpus(25, seed=12, n_max=7))
def test_multilinear_sandwich(f):
    rng = np.random.default_rng(f.n)
    x = rng.random(f.n)
    F = multilinear_exact(f, x)
    fstar, _ = covering_extension_exact(f, x)
    scale = max(1.0, abs(fstar))
    assert F >= (1 - np.exp(-1)) * fstar - 1e-12 * scale
    assert F <= fstar + 1e-12 * scale


@pytest.mark.parametrize("f", oracle_corpus(20, seed=13, n_max=6))
def test_contraction_stays_submodular(f):
    for mask in (0, 1, (1 << f.n) - 2):
        assert check_structure(f.contract(mask), "submodular")
        assert check_structure(f.contract(mask), "monotone")


@pytest.mark.parametrize("f", oracle_corpus(30, seed=14, n_max=6))
def test_anchored_submodular_iff_three_increasing(f):
    three = bool(check_structure(f, "3-increasing"))
    anchored = all(check_structure(anchored_function(f, v), "submodular") for v in range(f.n))
    assert three == anchored


def test_anchored_iff_on_appendix_b(appendix_b):
    assert not check_structure(appendix_b, "3-increasing")
    assert not all(check_structure(anchored_function(appendix_b, v), "submodular") for v in range(3))


@st.composite
def chain_tuples(draw):
    n = draw(st.integers(2, 6))
    family = draw(st.sampled_from(["coverage", "matroid", "facility", "budget"]))
    seed = draw(st.integers(0, 2**32 - 1))
    f = random_oracle(np.random.default_rng(seed), n, family)
    sets = st.integers(0, (1 << n) - 1)
    return f, draw(sets), draw(sets), draw(sets), draw(sets)


@settings(max_examples=150, deadline=None)
@given(chain_tuples())
def test_chain_rule(t):
    f, a, b1, b2, c = t
    assert mutual_coverage(f, a, b1 | b2, c) == mutual_coverage(f, a, b1, c) + mutual_coverage(f, a, b2, c | b1)


@settings(max_examples=100, deadline=None)
@given(chain_tuples())
def test_mutual_coverage_symmetric_nonnegative(t):
    f, a, b, _, c = t
    assert mutual_coverage(f, a, b, c) == mutual_coverage(f, b, a, c)
    assert mutual_coverage(f, a, b, c) >= 0


def test_zero_function_everywhere_zero():
    f = zero_function(3)
    assert not f.table().any()
    assert check_structure(f, "3-increasing")


def test_structure_witnesses():
    # f(S) = |S|^2 is supermodular
    f = ExplicitTable([bin(m).count("1") ** 2 for m in range(8)], 3)
    res = check_structure(f, "submodular")
    assert not res and res.witness == (frozenset(), 0, 1)
    g = ExplicitTable([0, 2, 1, 1, 1, 1, 1, 1], 3)
    res = check_structure(g, "monotone")
    assert not res and res.witness == (frozenset({0}), 1)


def test_structure_check_size_cap():
    with pytest.raises(ValueError):
        check_structure(ModularFunction(np.ones(15)), "submodular")


def test_derivative_matches_definition(appendix_b):
    # second derivative equals minus the mutual coverage
    for i, j in combinations(range(3), 2):
        for s in range(8):
            if s >> i & 1 or s >> j & 1:
                continue
            assert derivative(appendix_b, {i, j}, s) == -mutual_coverage(appendix_b, {i}, {j}, s)
