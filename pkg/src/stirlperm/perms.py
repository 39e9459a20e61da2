"""Generalized Stirling permutations.

A generalized Stirling permutation of the multiset ``{1^{k_1}, ..., n^{k_n}}``
is a word that contains the label ``i`` exactly ``k_i`` times and in which
every symbol lying between two occurrences of ``i`` is >= ``i``.  Two families
get dedicated helpers:

* k-Stirling permutations: all multiplicities equal to ``k``;
* k-bundled Stirling permutations: multiset ``{1^k, 2^{k+2}, ..., n^{k+2}}``.

The module provides validation, exact counting, lexicographic enumeration,
uniform sampling (via the gap-insertion growth process), the ascent /
descent / plateau statistics with their occurrence-index refinements, the
block decomposition, and the reflection involution.

Conventions for statistics: a word ``a_1 ... a_l`` is padded with ``a_0 =
a_{l+1} = 0``.  Index ``i`` (``0 <= i <= l``) is an ascent if ``a_i <
a_{i+1}``, a descent if ``a_i > a_{i+1}``, a plateau if ``a_i = a_{i+1}``,
so the three totals always sum to ``l + 1``.  The refined statistics ignore
the border indices: a j-ascent (j-plateau) is an ascent (plateau) at ``1 <=
i <= l`` whose left symbol ``a_i`` is the j-th occurrence of its label; a
j-descent is a descent at ``1 <= i < l`` whose right symbol ``a_{i+1}`` is
the j-th occurrence of its label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

from ._rng import as_generator

Multiplicities = tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 10_000_000


class InvalidPermutationError(ValueError):
    """Word is not a generalized Stirling permutation of the stated multiset."""


class EnumerationCapError(RuntimeError):
    """Requested enumeration would exceed the configured output cap."""


# ---------------------------------------------------------------------------
# multisets
# ---------------------------------------------------------------------------


def check_multiplicities(mult: Sequence[int]) -> Multiplicities:
    """Validate a multiplicity vector (all entries positive) and return it as a tuple."""
    out = tuple(int(m) for m in mult)
    if any(m < 1 for m in out):
        raise ValueError(f"multiplicities must be positive, got {out}")
    return out


def uniform_multiplicities(n: int, k: int) -> Multiplicities:
    """Multiset of a k-Stirling permutation of order n: (k, k, ..., k)."""
    if n < 0 or (n > 0 and k < 1):
        raise ValueError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    return (k,) * n


def bundled_multiplicities(n: int, k: int) -> Multiplicities:
    """Multiset of a k-bundled Stirling permutation: (k, k+2, ..., k+2)."""
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    return (k,) + (k + 2,) * (n - 1)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate_word(word: Sequence[int], mult: Sequence[int]) -> bool:
    """True iff ``word`` is a generalized Stirling permutation of ``{i^{mult[i-1]}}``.

    >>> validate_word((1, 2, 2, 2, 1, 1), (3, 3))
    True
    >>> validate_word((2, 1, 2), (1, 2))
    False
    """
    mult = tuple(mult)
    if any(m < 1 for m in mult):
        return False
    n = len(mult)
    if len(word) != sum(mult):
        return False
    counts = [0] * (n + 1)
    for x in word:
        if not 1 <= x <= n:
            return False
        counts[x] += 1
    if counts[1:] != list(mult):
        return False

    first = [-1] * (n + 1)
    last = [-1] * (n + 1)
    for pos, x in enumerate(word):
        if first[x] < 0:
            first[x] = pos
        last[x] = pos

    # Stack of labels whose first occurrence has been seen but whose last is
    # still ahead.  The nesting property holds iff every opening label exceeds
    # the innermost open one and every non-opening symbol matches the top.
    stack: list[int] = []
    for pos, x in enumerate(word):
        if first[x] == pos:
            if stack and x < stack[-1]:
                return False
            if last[x] > pos:
                stack.append(x)
        elif last[x] == pos:
            if not stack or stack[-1] != x:
                return False
            stack.pop()
        else:
            if not stack or stack[-1] != x:
                return False
    return not stack


# ---------------------------------------------------------------------------
# the permutation object
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenStirlingPerm:
    """A validated generalized Stirling permutation.

    ``word`` holds the symbols left to right, ``multiplicities[i-1]`` the
    number of occurrences of label ``i``.  Construction validates both the
    multiset and the nesting property and raises
    :class:`InvalidPermutationError` otherwise.
    """

    word: tuple[int, ...]
    multiplicities: Multiplicities

    def __post_init__(self) -> None:
        word = tuple(self.word)
        mult = tuple(self.multiplicities)
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "multiplicities", mult)
        if not validate_word(word, mult):
            raise InvalidPermutationError(
                f"{word!r} is not a Stirling permutation of multiset {mult!r}"
            )

    @classmethod
    def from_word(cls, word: Iterable[int]) -> "GenStirlingPerm":
        """Build from a bare word; the multiset is inferred from symbol counts."""
        w = tuple(int(x) for x in word)
        n = max(w, default=0)
        counts = [0] * n
        for x in w:
            if not 1 <= x <= n:
                raise InvalidPermutationError(f"labels must be 1..n, got {x}")
            counts[x - 1] += 1
        return cls(w, tuple(counts))

    @classmethod
    def parse(cls, text: str) -> "GenStirlingPerm":
        """Parse ``"1221"`` (single-digit labels) or ``"1,2,2,1"``."""
        text = text.strip()
        if not text:
            return cls((), ())
        if "," in text or " " in text:
            parts = text.replace(",", " ").split()
            return cls.from_word(int(p) for p in parts)
        if not text.isdigit():
            raise InvalidPermutationError(f"cannot parse permutation {text!r}")
        return cls.from_word(int(c) for c in text)

    @property
    def order(self) -> int:
        """Number of distinct labels n."""
        return len(self.multiplicities)

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def max_multiplicity(self) -> int:
        return max(self.multiplicities, default=0)

    @property
    def uniform_k(self) -> int | None:
        """The common multiplicity k if the multiset is {1^k,...,n^k}, else None."""
        if not self.multiplicities:
            return None
        k = self.multiplicities[0]
        return k if all(m == k for m in self.multiplicities) else None

    def compact(self) -> str | None:
        """Space-free string form, available when all labels are single digits."""
        if self.order > 9:
            return None
        return "".join(str(x) for x in self.word)

    def to_json_dict(self) -> dict:
        out: dict = {"word": list(self.word), "multiplicities": list(self.multiplicities)}
        c = self.compact()
        if c is not None:
            out["compact"] = c
        return out


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


def count_generalized(mult: Sequence[int]) -> int:
    """Number of generalized Stirling permutations of ``{1^{k_1},...,n^{k_n}}``.

    Insertion of the runs ``i^{k_i}`` in increasing label order gives the
    product of gap counts ``prod_{i=1}^{n-1} (k_1 + ... + k_i + 1)``.

    >>> count_generalized((3, 3))
    4
    """
    mult = check_multiplicities(mult)
    total = 1
    acc = 0
    for m in mult[:-1]:
        acc += m
        total *= acc + 1
    return total


def count_k_stirling(n: int, k: int) -> int:
    """Number of k-Stirling permutations of order n: ``prod_{i=1}^{n-1}(k*i+1)``.

    >>> [count_k_stirling(n, 2) for n in range(1, 6)]
    [1, 3, 15, 105, 945]
    """
    if n < 0 or k < 1:
        raise ValueError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    total = 1
    for i in range(1, n):
        total *= k * i + 1
    return total


def count_bundled(n: int, k: int) -> int:
    """Number of k-bundled Stirling permutations: ``prod_{i=1}^{n-1}(i*(k+2)-1)``.

    Defined for ``k >= 0`` (for ``k = 0`` the label 1 disappears from the
    multiset and the count falls back to a pure product formula).

    >>> [count_bundled(n, 1) for n in range(1, 6)]
    [1, 2, 10, 80, 880]
    """
    if n < 1 or k < 0:
        raise ValueError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    total = 1
    for i in range(1, n):
        total *= i * (k + 2) - 1
    return total


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def enumerate_generalized(
    mult: Sequence[int], cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[GenStirlingPerm]:
    """Yield every generalized Stirling permutation of the multiset, in
    lexicographic word order.

    Enumeration inserts the runs ``i^{k_i}`` into every gap, label by label,
    which generates each permutation exactly once.  Raises
    :class:`EnumerationCapError` up front when the exact count exceeds ``cap``.
    """
    mult = check_multiplicities(mult)
    total = count_generalized(mult)
    if total > cap:
        raise EnumerationCapError(f"{total} permutations exceed cap {cap}")
    words: list[tuple[int, ...]] = [()]
    for label, m in enumerate(mult, start=1):
        run = (label,) * m
        words = [w[:g] + run + w[g:] for w in words for g in range(len(w) + 1)]
    words.sort()
    for w in words:
        yield GenStirlingPerm(w, mult)


def enumerate_k_stirling(
    n: int, k: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[GenStirlingPerm]:
    return enumerate_generalized(uniform_multiplicities(n, k), cap)


def enumerate_bundled(
    n: int, k: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[GenStirlingPerm]:
    return enumerate_generalized(bundled_multiplicities(n, k), cap)


# ---------------------------------------------------------------------------
# uniform sampling / growth
# ---------------------------------------------------------------------------


class PermutationGrower:
    """Incremental uniform sampler.

    Each :meth:`grow_step` inserts the next label's run into a uniformly
    random gap of the current word.  Since every permutation of the enlarged
    multiset arises from exactly one (word, gap) pair, the snapshot after any
    number of steps is uniform, and successive snapshots realize the natural
    growth coupling of the whole family.
    """

    def __init__(self, multiplicity_of, seed=None) -> None:
        """``multiplicity_of(i)`` gives the multiplicity of label ``i >= 1``."""
        self._mult_of = multiplicity_of
        self._rng = as_generator(seed)
        self._word: list[int] = []
        self._mult: list[int] = []

    @property
    def order(self) -> int:
        return len(self._mult)

    def grow_step(self) -> None:
        label = self.order + 1
        m = int(self._mult_of(label))
        if m < 1:
            raise ValueError(f"multiplicity of label {label} must be positive")
        gap = int(self._rng.integers(0, len(self._word) + 1))
        self._word[gap:gap] = [label] * m
        self._mult.append(m)

    def grow_to(self, n: int) -> None:
        while self.order < n:
            self.grow_step()

    def permutation(self) -> GenStirlingPerm:
        return GenStirlingPerm(tuple(self._word), tuple(self._mult))


def k_stirling_grower(k: int, seed=None) -> PermutationGrower:
    if k < 1:
        raise ValueError("k must be >= 1")
    return PermutationGrower(lambda i: k, seed)


def bundled_grower(k: int, seed=None) -> PermutationGrower:
    if k < 1:
        raise ValueError("k must be >= 1")
    return PermutationGrower(lambda i: k if i == 1 else k + 2, seed)


def sample_generalized(mult: Sequence[int], seed=None) -> GenStirlingPerm:
    """Draw a uniformly random generalized Stirling permutation of the multiset."""
    mult = check_multiplicities(mult)
    grower = PermutationGrower(lambda i: mult[i - 1], seed)
    grower.grow_to(len(mult))
    return grower.permutation()


def sample_k_stirling(n: int, k: int, seed=None) -> GenStirlingPerm:
    grower = k_stirling_grower(k, seed)
    grower.grow_to(n)
    return grower.permutation()


def sample_bundled(n: int, k: int, seed=None) -> GenStirlingPerm:
    if n < 1:
        raise ValueError("n must be >= 1")
    grower = bundled_grower(k, seed)
    grower.grow_to(n)
    return grower.permutation()


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StatProfile:
    """Ascent/descent/plateau counts of a permutation with their refinements.

    ``j_ascents[j-1]`` counts j-ascents for ``1 <= j <= kmax`` (``kmax`` =
    largest multiplicity); ``j_descents`` likewise; ``j_plateaux[j-1]``
    covers ``1 <= j <= kmax - 1``.  ``ascents``/``descents``/``plateaux``
    are the border-padded totals.
    """

    ascents: int
    descents: int
    plateaux: int
    j_ascents: tuple[int, ...]
    j_descents: tuple[int, ...]
    j_plateaux: tuple[int, ...]

    def j_ascent(self, j: int) -> int:
        return self.j_ascents[j - 1]

    def j_descent(self, j: int) -> int:
        return self.j_descents[j - 1]

    def j_plateau(self, j: int) -> int:
        return self.j_plateaux[j - 1]

    def to_json_dict(self) -> dict:
        return {
            "ascents": self.ascents,
            "descents": self.descents,
            "plateaux": self.plateaux,
            "jAscents": list(self.j_ascents),
            "jDescents": list(self.j_descents),
            "jPlateaux": list(self.j_plateaux),
        }


def stat_profile(perm: GenStirlingPerm) -> StatProfile:
    """Compute the :class:`StatProfile` of a permutation.

    >>> p = GenStirlingPerm.parse("112233321")
    >>> prof = stat_profile(p)
    >>> (prof.ascents, prof.descents, prof.plateaux)
    (3, 3, 4)
    >>> prof.j_plateaux
    (3, 1)
    """
    w = perm.word
    length = len(w)
    kmax = perm.max_multiplicity
    if length == 0:
        # a_0 = a_1 = 0: single plateau at the border
        return StatProfile(0, 0, 1, (), (), ())

    seen = [0] * (perm.order + 1)
    ordinal = []
    for x in w:
        seen[x] += 1
        ordinal.append(seen[x])

    ja = [0] * (kmax + 1)
    jd = [0] * (kmax + 1)
    jp = [0] * (kmax + 1)
    ascents, descents, plateaux = 1, 1, 0  # borders: ascent at i=0, descent at i=l
    for i in range(length - 1):
        a, b = w[i], w[i + 1]
        if a < b:
            ascents += 1
            ja[ordinal[i]] += 1
        elif a > b:
            descents += 1
            jd[ordinal[i + 1]] += 1
        else:
            plateaux += 1
            jp[ordinal[i]] += 1
    return StatProfile(
        ascents,
        descents,
        plateaux,
        tuple(ja[1 : kmax + 1]),
        tuple(jd[1 : kmax + 1]),
        tuple(jp[1:kmax]),
    )


# ---------------------------------------------------------------------------
# blocks
# ---------------------------------------------------------------------------


class BlockSpan(NamedTuple):
    """One block: the half-open slice ``word[start:stop]``, which begins and
    ends with ``label`` (= the smallest symbol inside)."""

    label: int
    start: int
    stop: int
    size: int


def block_spans(word: Sequence[int]) -> list[BlockSpan]:
    """Blocks of a valid word in left-to-right position order.

    A block is a maximal substring that begins and ends with the same symbol.
    For a generalized Stirling permutation the blocks tile the word: each is
    the full span of its smallest symbol.
    """
    last: dict[int, int] = {}
    for pos, x in enumerate(word):
        last[x] = pos
    spans = []
    i = 0
    while i < len(word):
        j = last[word[i]]
        spans.append(BlockSpan(word[i], i, j + 1, j + 1 - i))
        i = j + 1
    return spans


@dataclass(frozen=True)
class BlockDecomposition:
    """Block decomposition of a permutation.

    ``blocks_by_label`` is ordered by block label (ascending), which is the
    order in which the blocks were created by the growth process, not their
    position in the word.  ``sizes_by_label`` are the corresponding sizes and
    ``sizes_descending`` their decreasing rearrangement.
    """

    blocks_by_label: tuple[BlockSpan, ...]
    sizes_by_label: tuple[int, ...]
    sizes_descending: tuple[int, ...]
    count: int

    @property
    def blocks_by_position(self) -> tuple[BlockSpan, ...]:
        return tuple(sorted(self.blocks_by_label, key=lambda b: b.start))

    def to_json_dict(self) -> dict:
        return {
            "count": self.count,
            "blocksByLabel": [
                {"label": b.label, "start": b.start, "stop": b.stop, "size": b.size}
                for b in self.blocks_by_label
            ],
            "sizesByLabel": list(self.sizes_by_label),
            "sizesDescending": list(self.sizes_descending),
        }


def block_decomposition(perm: GenStirlingPerm) -> BlockDecomposition:
    """Decompose a permutation into its blocks.

    >>> d = block_decomposition(GenStirlingPerm.parse("112233321445554666"))
    >>> d.count
    3
    >>> d.sizes_by_label
    (9, 6, 3)
    """
    spans = sorted(block_spans(perm.word), key=lambda b: b.label)
    sizes = tuple(b.size for b in spans)
    return BlockDecomposition(
        blocks_by_label=tuple(spans),
        sizes_by_label=sizes,
        sizes_descending=tuple(sorted(sizes, reverse=True)),
        count=len(spans),
    )


def reflect(perm: GenStirlingPerm) -> GenStirlingPerm:
    """Reverse the word.  An involution that swaps j-ascents with j-descents
    in the appropriate occurrence indices and preserves the multiset."""
    return GenStirlingPerm(perm.word[::-1], perm.multiplicities)
