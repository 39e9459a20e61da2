"""Degree-weight families, increasing tree containers, growth processes and
enumeration, with dual-route totals against direct enumeration sums."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from stirlperm import perms, trees
from stirlperm.harness import chi_square_gof


# ---------------------------------------------------------------------------
# families and weights
# ---------------------------------------------------------------------------


def test_family_constructors():
    fam = trees.k_plane_family(2)
    assert (fam.phi0, fam.c1, fam.c2) == (1, 2, -1)
    assert fam.alpha == 1
    fam = trees.ary_family(3)
    assert (fam.phi0, fam.c1, fam.c2) == (1, 2, 1)
    assert fam.arity == 3
    fam = trees.bundled_family(2)
    assert (fam.phi0, fam.c1, fam.c2) == (1, 3, -1)
    assert trees.plane_recursive_family() == trees.bundled_family(1)
    assert trees.recursive_family().kind == trees.RECURSIVE


def test_family_validation():
    with pytest.raises(ValueError):
        trees.ary_family(1)
    with pytest.raises(ValueError):
        trees.k_plane_family(1)
    with pytest.raises(ValueError):
        trees.DegreeWeightFamily(trees.GENERALIZED_PLANE, 1, 1, 1)


def test_degree_weights_known_families():
    # 3-ary: binomial weights; plane k=2: all ones; plane recursive: w_d = 1
    ary = trees.ary_family(3)
    assert [ary.degree_weight(d) for d in range(4)] == [1, 3, 3, 1]
    plane2 = trees.k_plane_family(2)
    assert [plane2.degree_weight(d) for d in range(5)] == [1] * 5
    rec = trees.recursive_family()
    assert rec.degree_weight(3) == Fraction(1, 6)
    plane3 = trees.k_plane_family(3)
    assert [plane3.degree_weight(d) for d in range(4)] == [
        Fraction(1),
        Fraction(1),
        Fraction(3, 2),
        Fraction(5, 2),
    ]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_total_weight_closed_form_matches_enumeration_sum(n):
    """The closed-form total must equal the plane-tree enumeration sum for
    every family shape (the exponential one collapses label orderings)."""
    families = [
        trees.ary_family(2),
        trees.ary_family(3),
        trees.k_plane_family(2),
        trees.k_plane_family(3),
        trees.bundled_family(1),
        trees.bundled_family(2),
        trees.recursive_family(),
    ]
    plane_trees = list(trees.enumerate_plane_trees(n))
    for fam in families:
        total = sum(trees.tree_weight(t, fam) for t in plane_trees)
        assert total == fam.total_weight(n), fam


@pytest.mark.parametrize("n,k", [(1, 2), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3)])
def test_plane_family_total_counts_k_stirling(n, k):
    fam = trees.k_plane_family(k)
    assert fam.total_weight(n + 1) == perms.count_k_stirling(n, k)


def test_plane_recursive_total_weight_order_four():
    # weight-one plane trees: totals 1, 1, 3, 15 match the double factorials
    fam = trees.k_plane_family(2)
    assert [fam.total_weight(n) for n in range(1, 5)] == [1, 1, 3, 15]


@pytest.mark.parametrize("d,n", [(2, 4), (3, 4), (4, 3)])
def test_ary_family_total_counts_trees(d, n):
    fam = trees.ary_family(d)
    assert fam.total_weight(n) == len(list(trees.enumerate_ary_trees(n, d)))
    assert fam.total_weight(n) == perms.count_k_stirling(n, d - 1)


@pytest.mark.parametrize("m,n", [(1, 4), (2, 4), (3, 3)])
def test_bundled_family_total_counts_trees(m, n):
    fam = trees.bundled_family(m)
    assert fam.total_weight(n) == len(list(trees.enumerate_bundled_trees(n, m)))


def test_recursive_family_total_is_factorial():
    fam = trees.recursive_family()
    assert [fam.total_weight(n) for n in range(1, 6)] == [1, 1, 2, 6, 24]


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_attach_probabilities_sum_to_one(seed):
    fam = trees.k_plane_family(3)
    tree = trees.grow_plane_tree(fam, 9, seed)
    probs = [fam.attach_probability(d, tree.order) for d in tree.degrees()]
    assert sum(probs) == 1

    ary = trees.ary_family(3)
    atree = trees.grow_ary_tree(3, 9, seed)
    probs = [ary.attach_probability(d, atree.order) for d in atree.degrees()]
    assert sum(probs) == 1

    rec = trees.recursive_family()
    assert sum(rec.attach_probability(0, 9) for _ in range(9)) == 1


def test_tree_weight_zero_outside_support():
    fam = trees.ary_family(2)
    overfull = trees.AryIncreasingTree(3, (0, 1, 1, 1), (0, 1, 2, 3))
    assert trees.tree_weight(overfull, fam) == 0


# ---------------------------------------------------------------------------
# ary trees
# ---------------------------------------------------------------------------


def test_ary_tree_validation():
    with pytest.raises(trees.InvalidTreeError):
        trees.AryIncreasingTree(3, (0, 3), (0, 1))  # parent above child
    with pytest.raises(trees.InvalidTreeError):
        trees.AryIncreasingTree(3, (0, 1, 1), (0, 1, 1))  # duplicate slot
    with pytest.raises(trees.InvalidTreeError):
        trees.AryIncreasingTree(3, (0, 1), (0, 4))  # slot out of range
    with pytest.raises(trees.InvalidTreeError):
        trees.AryIncreasingTree(1, (0,), (0,))  # arity too small


def test_ary_tree_json_roundtrip():
    t = trees.AryIncreasingTree(3, (0, 1, 2), (0, 2, 3))
    assert trees.AryIncreasingTree.from_json_dict(t.to_json_dict()) == t


def test_ary_stats_small_example():
    t = trees.AryIncreasingTree(3, (0, 1), (0, 1))
    st_ = trees.ary_stats(t)
    assert st_.interior_by_slot == (1, 0, 0)
    assert st_.exterior_by_slot == (1, 2, 2)
    assert st_.left_right == 2
    assert st_.leaves == 1


@pytest.mark.parametrize("n,arity", [(1, 3), (2, 3), (3, 3), (4, 3), (3, 4)])
def test_ary_stats_against_oracle(n, arity):
    for t in trees.enumerate_ary_trees(n, arity):
        st_ = trees.ary_stats(t)
        assert st_.left_right == oracles.left_right_count(t)
        assert sum(st_.interior_by_slot) == n - 1
        assert all(
            e == n - i for e, i in zip(st_.exterior_by_slot, st_.interior_by_slot)
        )
        assert st_.leaves == sum(1 for d in t.degrees() if d == 0)


def test_enumerate_ary_counts():
    # 1, 3, 15, 105 for ternary; 1, 2, 6, 24... no: (d-1)i+1 products
    assert [len(list(trees.enumerate_ary_trees(n, 3))) for n in range(1, 5)] == [
        1,
        3,
        15,
        105,
    ]
    assert [len(list(trees.enumerate_ary_trees(n, 2))) for n in range(1, 5)] == [
        1,
        2,
        6,
        24,
    ]


def test_grow_ary_tree_uniform_chi_square():
    support = {t: 0 for t in trees.enumerate_ary_trees(3, 3)}
    for seed in range(6000):
        support[trees.grow_ary_tree(3, 3, seed)] += 1
    _, pvalue = chi_square_gof(list(support.values()), [1 / 15] * 15)
    assert pvalue > 1e-3


# ---------------------------------------------------------------------------
# bundled trees
# ---------------------------------------------------------------------------


def test_bundled_tree_validation():
    with pytest.raises(trees.InvalidTreeError):
        trees.BundledIncreasingTree(2, (0, 2), (0, 1), (0, 1))
    with pytest.raises(trees.InvalidTreeError):
        trees.BundledIncreasingTree(2, (0, 1), (0, 3), (0, 1))  # bundle index
    with pytest.raises(trees.InvalidTreeError):
        trees.BundledIncreasingTree(2, (0, 1), (0, 1), (0, 2))  # position gap


def test_bundled_tree_json_roundtrip():
    t = trees.BundledIncreasingTree(2, (0, 1, 1), (0, 2, 2), (0, 1, 2))
    assert trees.BundledIncreasingTree.from_json_dict(t.to_json_dict()) == t
    assert t.bundles_of(1) == ((), (2, 3))


def test_bundled_stats_single_node():
    # matches the word "1": one ascent, one descent, no plateau
    t = trees.BundledIncreasingTree(2, (0,), (0,), (0,))
    prof = trees.bundled_stats(t)
    assert (prof.bundle_ascents, prof.bundle_descents, prof.empty_bundles) == (1, 1, 0)


def test_bundled_stats_doctest_tree():
    t = trees.BundledIncreasingTree(2, (0, 1), (0, 1), (0, 1))
    prof = trees.bundled_stats(t)
    assert (prof.bundle_ascents, prof.bundle_descents, prof.empty_bundles) == (1, 2, 2)


@pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (3, 1), (4, 1), (3, 2), (4, 2)])
def test_enumerate_bundled_trees_counts(n, m):
    expected = 1
    for level in range(1, n):
        expected *= level * (m + 1) - 1
    assert len(set(trees.enumerate_bundled_trees(n, m))) == expected


def test_grow_bundled_tree_uniform_chi_square():
    support = {t: 0 for t in trees.enumerate_bundled_trees(3, 2)}
    assert len(support) == 10
    for seed in range(5000):
        support[trees.grow_bundled_tree(2, 3, seed)] += 1
    _, pvalue = chi_square_gof(list(support.values()), [1 / 10] * 10)
    assert pvalue > 1e-3


def test_grow_plane_tree_weight_proportional_chi_square():
    """Order-3 sanity: the weighted growth hits each plane tree with
    probability weight/total."""
    fam = trees.k_plane_family(3)
    support = list(trees.enumerate_plane_trees(3))
    weights = [trees.tree_weight(t, fam) for t in support]
    total = sum(weights)
    counts = Counter(trees.grow_plane_tree(fam, 3, seed) for seed in range(6000))
    observed = [counts.get(t, 0) for t in support]
    _, pvalue = chi_square_gof(observed, [w / total for w in weights])
    assert pvalue > 1e-3
    assert sum(observed) == 6000


def test_grow_random_dispatch():
    assert isinstance(
        trees.grow_random(trees.ary_family(3), 5, 1), trees.AryIncreasingTree
    )
    assert isinstance(
        trees.grow_random(trees.k_plane_family(2), 5, 1), trees.BundledIncreasingTree
    )
    with pytest.raises(ValueError):
        trees.grow_plane_tree(trees.ary_family(3), 5, 1)


@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(2, 12))
@settings(max_examples=40, deadline=None)
def test_grown_trees_are_well_formed(seed, n):
    t = trees.grow_ary_tree(3, n, seed)
    assert t.order == n
    b = trees.grow_bundled_tree(2, n, seed)
    assert b.order == n
    assert sum(len(bun) for bun in b.bundles_of(1)) >= 1 or n == 1
