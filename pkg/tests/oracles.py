"""Independent reference routes used only by the tests.

Everything here recomputes a quantity straight from its definition, with no
reuse of the package's algorithms, so a disagreement points at a real defect
rather than a shared bug.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def multiset_words(multiplicities):
    """All distinct words over the multiset {1^m1, ..., n^mn}, by backtracking."""
    n = len(multiplicities)
    counts = list(multiplicities)
    total = sum(counts)
    word: list[int] = []
    out: list[tuple[int, ...]] = []

    def rec() -> None:
        if len(word) == total:
            out.append(tuple(word))
            return
        for i in range(n):
            if counts[i]:
                counts[i] -= 1
                word.append(i + 1)
                rec()
                word.pop()
                counts[i] += 1

    rec()
    return out


def is_stirling(word) -> bool:
    """Definition check: everything between two copies of i is >= i."""
    for i in set(word):
        positions = [p for p, x in enumerate(word) if x == i]
        for a, b in zip(positions, positions[1:]):
            if any(word[t] < i for t in range(a + 1, b)):
                return False
    return True


def stirling_words(multiplicities):
    return [w for w in multiset_words(multiplicities) if is_stirling(w)]


def direct_stats(word, kmax: int) -> dict:
    """Statistics recomputed from the bordered word 0 w 0.

    Totals count border positions; the per-ordinal counts do not.  The
    ordinal of a position is how many copies of its symbol appear up to and
    including it.
    """
    ell = len(word)
    a = (0,) + tuple(word) + (0,)
    ascents = sum(1 for i in range(ell + 1) if a[i] < a[i + 1])
    descents = sum(1 for i in range(ell + 1) if a[i] > a[i + 1])
    plateaux = sum(1 for i in range(ell + 1) if a[i] == a[i + 1])

    def ordinal(pos: int) -> int:
        return sum(1 for t in range(1, pos + 1) if a[t] == a[pos])

    j_asc = [0] * kmax
    j_desc = [0] * kmax
    j_plat = [0] * max(kmax - 1, 0)
    for i in range(1, ell + 1):
        if a[i] < a[i + 1]:
            j_asc[ordinal(i) - 1] += 1
        if i < ell and a[i] > a[i + 1]:
            j_desc[ordinal(i + 1) - 1] += 1
        if i < ell and a[i] == a[i + 1]:
            j_plat[ordinal(i) - 1] += 1
    return {
        "ascents": ascents,
        "descents": descents,
        "plateaux": plateaux,
        "j_ascents": tuple(j_asc),
        "j_descents": tuple(j_desc),
        "j_plateaux": tuple(j_plat),
    }


def block_intervals(word):
    """Blocks via top-level cut points: a gap is a cut iff no symbol's span
    of occurrences crosses it."""
    ell = len(word)
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    for p, x in enumerate(word):
        first.setdefault(x, p)
        last[x] = p
    cuts = [0]
    for t in range(1, ell):
        if all(not (first[x] < t <= last[x]) for x in first):
            cuts.append(t)
    cuts.append(ell)
    return [(cuts[i], cuts[i + 1]) for i in range(len(cuts) - 1)]


def ary_code(tree, v: int = 1):
    """Recursive form of the depth-first code: the node's label is emitted
    between consecutive subtree codes."""
    parts: list[int] = []
    for s in range(1, tree.arity + 1):
        if s > 1:
            parts.append(v)
        c = tree.child(v, s)
        if c:  # 0 marks a free slot
            parts.extend(ary_code(tree, c))
    return parts


def bundled_code(tree, v: int = 1):
    """Recursive form of the bundled code: bundles separated by the node's
    label, each child wrapped in its own label pair."""
    parts: list[int] = []
    for idx, bundle in enumerate(tree.bundles_of(v)):
        if idx:
            parts.append(v)
        for u in bundle:
            parts.append(u)
            parts.extend(bundled_code(tree, u))
            parts.append(u)
    return parts


def left_right_count(tree) -> int:
    """Nodes whose full root path uses only the two extreme slots, each
    checked by explicitly walking up to the root."""
    extreme = {1, tree.arity}
    count = 0
    for v in range(1, tree.order + 1):
        node = v
        ok = True
        while node != 1:
            if tree.slot[node - 1] not in extreme:
                ok = False
                break
            node = tree.parent[node - 1]
        count += ok
    return count


def urn_exact_distribution(spec, steps: int) -> dict[tuple[int, ...], Fraction]:
    """Exact state distribution after ``steps`` draws, by expanding every
    trajectory with rational weights."""
    dist = {tuple(spec.initial): Fraction(1)}
    for _ in range(steps):
        nxt: dict[tuple[int, ...], Fraction] = {}
        for counts, p in dist.items():
            total = sum(counts)
            for i, c in enumerate(counts):
                if c == 0:
                    continue
                after = tuple(a + d for a, d in zip(counts, spec.deltas[i]))
                nxt[after] = nxt.get(after, Fraction(0)) + p * Fraction(c, total)
        dist = nxt
    return dist


def jackknife_covariance_slow(matrix):
    """Delete-one jackknife of the sample covariance by literally refitting
    with each row removed."""
    x = np.asarray(matrix, dtype=np.float64)
    rows = x.shape[0]
    thetas = np.array(
        [
            np.cov(np.delete(x, r, axis=0), rowvar=False, ddof=1)
            for r in range(rows)
        ]
    )
    centered = thetas - thetas.mean(axis=0)
    return np.sqrt((rows - 1) / rows * (centered**2).sum(axis=0))
