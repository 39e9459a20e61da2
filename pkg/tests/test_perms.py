"""Permutation families: validation, counting, enumeration, growth, and the
word statistics, all cross-checked against the definition-level oracles."""

from __future__ import annotations

import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from stirlperm import perms
from stirlperm.harness import chi_square_gof

SMALL_MULTISETS = [
    (1,),
    (3,),
    (1, 1),
    (2, 2),
    (1, 3),
    (2, 1, 2),
    (1, 2, 3),
    (3, 3, 1),
    (2, 2, 2),
    (1, 1, 1, 1),
    (2, 2, 2, 2),
]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("mult", SMALL_MULTISETS)
def test_validate_word_matches_definition(mult):
    for word in oracles.multiset_words(mult):
        assert perms.validate_word(word, mult) == oracles.is_stirling(word)


def test_validate_word_rejects_wrong_multiset():
    assert not perms.validate_word((1, 1, 2), (2, 2))
    assert not perms.validate_word((1, 1), (2, 2))
    assert not perms.validate_word((0, 0), (2,))


def test_constructor_rejects_invalid_words():
    with pytest.raises(perms.InvalidPermutationError):
        perms.GenStirlingPerm((2, 1, 2), (1, 2))
    with pytest.raises(perms.InvalidPermutationError):
        perms.GenStirlingPerm.parse("212")
    with pytest.raises(perms.InvalidPermutationError):
        perms.GenStirlingPerm.parse("1,3,3,1")  # label 2 missing


def test_parse_and_compact():
    p = perms.GenStirlingPerm.parse("1,2,2,1")
    assert p.word == (1, 2, 2, 1)
    assert p.compact() == "1221"
    assert perms.GenStirlingPerm.parse("1221") == p
    assert p.uniform_k == 2
    q = perms.GenStirlingPerm.parse("1,2,2,2,1,1")
    assert q.multiplicities == (3, 3)


# ---------------------------------------------------------------------------
# counting and enumeration
# ---------------------------------------------------------------------------


def test_count_k_stirling_frozen_values():
    assert [perms.count_k_stirling(n, 2) for n in range(1, 6)] == [1, 3, 15, 105, 945]
    assert [perms.count_k_stirling(n, 3) for n in range(1, 5)] == [1, 4, 28, 280]
    assert [perms.count_k_stirling(n, 1) for n in range(1, 6)] == [
        math.factorial(n) for n in range(1, 6)
    ]


def test_count_bundled_frozen_values():
    assert [perms.count_bundled(n, 1) for n in range(1, 6)] == [1, 2, 10, 80, 880]
    assert [perms.count_bundled(n, 2) for n in range(1, 6)] == [1, 3, 21, 231, 3465]


@pytest.mark.parametrize("mult", SMALL_MULTISETS)
def test_count_and_enumeration_match_brute_force(mult):
    words = list(oracles.stirling_words(mult))
    assert perms.count_generalized(mult) == len(words)
    enumerated = [p.word for p in perms.enumerate_generalized(mult)]
    assert enumerated == sorted(words)
    assert len(set(enumerated)) == len(enumerated)


def test_bundled_enumeration_is_generalized_with_bundled_multiset():
    got = [p.word for p in perms.enumerate_bundled(3, 1)]
    ref = [p.word for p in perms.enumerate_generalized((1, 3, 3))]
    assert got == ref


def test_enumeration_cap():
    with pytest.raises(perms.EnumerationCapError):
        list(perms.enumerate_k_stirling(9, 3, cap=1000))


@given(
    st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4)
)
@settings(max_examples=60, deadline=None)
def test_count_formula_matches_enumeration(mult):
    mult = tuple(mult)
    assert perms.count_generalized(mult) == len(list(perms.enumerate_generalized(mult)))


# ---------------------------------------------------------------------------
# random growth
# ---------------------------------------------------------------------------


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_grown_permutations_are_valid(seed):
    grower = perms.k_stirling_grower(3, seed)
    grower.grow_to(12)
    p = grower.permutation()
    assert p.multiplicities == perms.uniform_multiplicities(12, 3)

    grower = perms.bundled_grower(2, seed)
    grower.grow_to(8)
    q = grower.permutation()
    assert q.multiplicities == perms.bundled_multiplicities(8, 2)


def test_sampler_is_uniform_chi_square():
    """10000 draws over the 15 permutations of order 3; the chi-square test
    at the 0.1 percent level is stable under the fixed seed."""
    support = [p.word for p in perms.enumerate_k_stirling(3, 2)]
    counts = Counter(perms.sample_k_stirling(3, 2, seed).word for seed in range(10000))
    observed = [counts.get(w, 0) for w in support]
    _, pvalue = chi_square_gof(observed, [1 / 15] * 15)
    assert pvalue > 1e-3


def test_sample_respects_seed():
    a = perms.sample_k_stirling(20, 2, 123)
    b = perms.sample_k_stirling(20, 2, 123)
    c = perms.sample_k_stirling(20, 2, 124)
    assert a == b
    assert a != c  # 945... choices at order 20, a collision would be a bug


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def test_stat_profile_worked_example():
    p = perms.GenStirlingPerm.parse("112233321")
    prof = perms.stat_profile(p)
    assert (prof.ascents, prof.descents, prof.plateaux) == (3, 3, 4)
    assert prof.j_ascents == (0, 2, 0)
    assert prof.j_descents == (0, 0, 2)
    assert prof.j_plateaux == (3, 1)


def test_stat_profile_singletons():
    prof = perms.stat_profile(perms.GenStirlingPerm.parse("1"))
    assert (prof.ascents, prof.descents, prof.plateaux) == (1, 1, 0)


@pytest.mark.parametrize("mult", SMALL_MULTISETS)
def test_stat_profile_matches_direct_definition(mult):
    kmax = max(mult)
    for p in perms.enumerate_generalized(mult):
        ref = oracles.direct_stats(p.word, kmax)
        prof = perms.stat_profile(p)
        assert prof.ascents == ref["ascents"]
        assert prof.descents == ref["descents"]
        assert prof.plateaux == ref["plateaux"]
        assert prof.j_ascents == ref["j_ascents"]
        assert prof.j_descents == ref["j_descents"]
        assert prof.j_plateaux == ref["j_plateaux"]


@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(2, 4))
@settings(max_examples=60, deadline=None)
def test_stat_identities_on_random_permutations(seed, k):
    n = 15
    p = perms.sample_k_stirling(n, k, seed)
    prof = perms.stat_profile(p)
    ell = n * k
    assert prof.ascents + prof.descents + prof.plateaux == ell + 1
    assert prof.ascents == sum(prof.j_ascents) + 1
    assert prof.descents == sum(prof.j_descents) + 1
    assert prof.plateaux == sum(prof.j_plateaux)
    # ordinal shift between ascents and descents
    for j in range(1, k):
        assert prof.j_ascent(j) == prof.j_descent(j + 1)
        assert prof.j_ascent(j) + prof.j_plateau(j) == n
    for j in range(2, k + 1):
        assert prof.j_descent(j) + prof.j_plateau(j - 1) == n


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_reflection_swaps_ascents_and_descents(seed):
    p = perms.sample_k_stirling(10, 3, seed)
    r = perms.reflect(p)
    assert r.word == p.word[::-1]
    assert perms.reflect(r) == p
    a, b = perms.stat_profile(p), perms.stat_profile(r)
    assert (a.ascents, a.descents) == (b.descents, b.ascents)
    assert a.plateaux == b.plateaux


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------


def test_block_decomposition_worked_example():
    p = perms.GenStirlingPerm.parse("112233321445554666")
    d = perms.block_decomposition(p)
    assert d.sizes_by_label == (9, 6, 3)
    assert d.sizes_descending == (9, 6, 3)
    assert d.count == 3
    assert [b.label for b in d.blocks_by_label] == [1, 4, 6]


@pytest.mark.parametrize("mult", SMALL_MULTISETS)
def test_blocks_match_cut_point_oracle(mult):
    for p in perms.enumerate_generalized(mult):
        spans = perms.block_spans(p.word)
        assert [(b.start, b.stop) for b in spans] == oracles.block_intervals(p.word)
        # spans tile the word and each starts at its label's first occurrence
        pos = 0
        for b in spans:
            assert b.start == pos
            assert p.word[b.start] == b.label == min(p.word[b.start : b.stop])
            pos = b.stop
        assert pos == len(p.word)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_block_decomposition_invariants(seed):
    p = perms.sample_k_stirling(12, 2, seed)
    d = perms.block_decomposition(p)
    assert sum(d.sizes_by_label) == p.length
    assert sorted(d.sizes_by_label, reverse=True) == list(d.sizes_descending)
    assert d.count == len(d.blocks_by_label)
    # the first block always carries label 1
    assert d.blocks_by_label[0].label == 1
