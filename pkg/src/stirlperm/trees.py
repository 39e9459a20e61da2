"""Increasing trees: degree-weighted families, growth, enumeration, statistics.

Three concrete shapes appear throughout:

* ``AryIncreasingTree``: every node has ``arity`` ordered slots, at most one
  child per slot; labels increase away from the root.  With ``arity = k+1``
  these are in bijection with k-Stirling permutations.
* ``BundledIncreasingTree``: every node carries ``bundle_count`` ordered
  bundles, each an ordered sequence of children.  ``bundle_count = 1`` gives
  plane recursive trees; ``bundle_count = k+1`` trees encode k-bundled
  Stirling permutations.
* Degree-weight families ``(phi_0, c_1, c_2)`` with weight generating
  function ``phi(t) = phi_0 (1 + c_2 t / phi_0)^{c_1/c_2 + 1}`` (or the
  ``c_2 = 0`` exponential limit).  The total weight of order-n trees is
  ``phi_0 c_1^{n-1} (n-1)! binom(n-1+c_2/c_1, n-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

from ._rng import as_generator

GENERALIZED_PLANE = "generalizedPlane"
D_ARY = "dAry"
RECURSIVE = "recursive"


class InvalidTreeError(ValueError):
    """Array data does not describe an increasing tree of the stated shape."""


# ---------------------------------------------------------------------------
# degree-weight families
# ---------------------------------------------------------------------------


def _rational_binomial(a: Fraction, n: int) -> Fraction:
    prod = Fraction(1)
    for i in range(n):
        prod *= a - i
    return prod / math.factorial(n)


@dataclass(frozen=True)
class DegreeWeightFamily:
    """A family of increasing trees weighted by out-degrees.

    ``kind`` is one of ``generalizedPlane`` (requires ``0 < -c2 < c1``),
    ``dAry`` (``c2 > 0`` and ``c1/c2 + 1`` an integer >= 2) or ``recursive``
    (``c2 = 0``).  ``phi0`` must be positive.
    """

    kind: str
    phi0: Fraction
    c1: Fraction
    c2: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi0", Fraction(self.phi0))
        object.__setattr__(self, "c1", Fraction(self.c1))
        object.__setattr__(self, "c2", Fraction(self.c2))
        if self.phi0 <= 0 or self.c1 <= 0:
            raise ValueError("phi0 and c1 must be positive")
        if self.kind == GENERALIZED_PLANE:
            if not 0 < -self.c2 < self.c1:
                raise ValueError("generalizedPlane needs 0 < -c2 < c1")
        elif self.kind == D_ARY:
            if self.c2 <= 0:
                raise ValueError("dAry needs c2 > 0")
            d = self.c1 / self.c2 + 1
            if d.denominator != 1 or d < 2:
                raise ValueError("dAry needs c1/c2 + 1 to be an integer >= 2")
        elif self.kind == RECURSIVE:
            if self.c2 != 0:
                raise ValueError("recursive needs c2 = 0")
        else:
            raise ValueError(f"unknown family kind {self.kind!r}")

    @property
    def arity(self) -> int:
        if self.kind != D_ARY:
            raise ValueError("arity is defined for dAry families only")
        return int(self.c1 / self.c2 + 1)

    @property
    def alpha(self) -> Fraction:
        """Repulsion parameter ``-1 - c1/c2`` of a generalizedPlane family."""
        if self.kind != GENERALIZED_PLANE:
            raise ValueError("alpha is defined for generalizedPlane families only")
        return -1 - self.c1 / self.c2

    def degree_weight(self, d: int) -> Fraction:
        """Weight ``phi_d`` attached to out-degree ``d``."""
        if d < 0:
            raise ValueError("degree must be >= 0")
        if self.kind == RECURSIVE:
            return self.phi0 * (self.c1 / self.phi0) ** d / math.factorial(d)
        exponent = self.c1 / self.c2 + 1
        return self.phi0 * _rational_binomial(exponent, d) * (self.c2 / self.phi0) ** d

    def total_weight(self, n: int) -> Fraction:
        """Total weight of order-n trees of the family.

        >>> k_plane_family(2).total_weight(4)
        Fraction(15, 1)
        """
        if n < 1:
            raise ValueError("order must be >= 1")
        return (
            self.phi0
            * self.c1 ** (n - 1)
            * math.factorial(n - 1)
            * _rational_binomial(n - 1 + self.c2 / self.c1, n - 1)
        )

    def attach_probability(self, degree: int, order: int) -> Fraction:
        """Probability that the next node attaches to a fixed node of the given
        out-degree in a weighted random tree of the given order."""
        if order < 1:
            raise ValueError("order must be >= 1")
        if self.kind == D_ARY:
            d = self.arity
            return Fraction(d - degree, (d - 1) * order + 1)
        if self.kind == RECURSIVE:
            return Fraction(1, order)
        a = self.alpha
        return (degree + a) / ((a + 1) * order - 1)


def ary_family(arity: int) -> DegreeWeightFamily:
    """d-ary trees: ``phi(t) = (1 + t)^d``; with ``arity = k+1`` the total
    weight of order-n trees equals the k-Stirling count."""
    if arity < 2:
        raise ValueError("arity must be >= 2")
    return DegreeWeightFamily(D_ARY, Fraction(1), Fraction(arity - 1), Fraction(1))


def k_plane_family(k: int) -> DegreeWeightFamily:
    """k-plane recursive trees: ``phi(t) = (1 - (k-1)t)^{-1/(k-1)}``, k >= 2.

    The total weight of order n+1 equals the k-Stirling count of order n.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    return DegreeWeightFamily(GENERALIZED_PLANE, Fraction(1), Fraction(k), Fraction(-(k - 1)))


def bundled_family(bundle_count: int) -> DegreeWeightFamily:
    """m-bundled trees: ``phi(t) = (1 - t)^{-m}``; total weight of order n is
    ``prod_{l=1}^{n-1} (l(m+1) - 1)``."""
    if bundle_count < 1:
        raise ValueError("bundle_count must be >= 1")
    return DegreeWeightFamily(
        GENERALIZED_PLANE, Fraction(1), Fraction(bundle_count + 1), Fraction(-1)
    )


def plane_recursive_family() -> DegreeWeightFamily:
    """Plane recursive trees, the ``bundle_count = 1`` / ``k = 2`` case."""
    return bundled_family(1)


def recursive_family() -> DegreeWeightFamily:
    """Unordered recursive trees (exponential weight).  Growth only."""
    return DegreeWeightFamily(RECURSIVE, Fraction(1), Fraction(1), Fraction(0))


def tree_weight(tree, family: DegreeWeightFamily) -> Fraction:
    """Product of ``phi_{deg(v)}`` over all nodes of ``tree``.

    Meaningful on plane shapes (``BundledIncreasingTree`` with one bundle)
    for weighted families; zero when some degree is outside the family's
    support, so sums over a larger shape class stay correct.
    """
    w = Fraction(1)
    for d in tree.degrees():
        w *= family.degree_weight(d)
        if w == 0:
            return Fraction(0)
    return w


# ---------------------------------------------------------------------------
# ary increasing trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AryIncreasingTree:
    """Increasing tree on labels ``1..n`` whose nodes expose ``arity`` slots.

    ``parent[v-1]`` and ``slot[v-1]`` give the attachment of node ``v``
    (zeros for the root).
    """

    arity: int
    parent: tuple[int, ...]
    slot: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent", tuple(int(x) for x in self.parent))
        object.__setattr__(self, "slot", tuple(int(x) for x in self.slot))
        n = len(self.parent)
        if self.arity < 2:
            raise InvalidTreeError("arity must be >= 2")
        if n < 1 or len(self.slot) != n:
            raise InvalidTreeError("parent and slot arrays must be non-empty and aligned")
        if self.parent[0] != 0 or self.slot[0] != 0:
            raise InvalidTreeError("node 1 must be the root")
        used = set()
        for v in range(2, n + 1):
            p, s = self.parent[v - 1], self.slot[v - 1]
            if not 1 <= p < v:
                raise InvalidTreeError(f"node {v} needs a smaller parent, got {p}")
            if not 1 <= s <= self.arity:
                raise InvalidTreeError(f"slot of node {v} out of range: {s}")
            if (p, s) in used:
                raise InvalidTreeError(f"slot {s} of node {p} used twice")
            used.add((p, s))

    @property
    def order(self) -> int:
        return len(self.parent)

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        """``_children[v][s]`` = child of v in slot s, or 0 (index 0 unused)."""
        table = [[0] * (self.arity + 1) for _ in range(self.order + 1)]
        for v in range(2, self.order + 1):
            table[self.parent[v - 1]][self.slot[v - 1]] = v
        return tuple(tuple(row) for row in table)

    def child(self, v: int, s: int) -> int:
        """Child of node v in slot s (0 if the slot is free)."""
        return self._children[v][s]

    def degrees(self) -> list[int]:
        deg = [0] * self.order
        for v in range(2, self.order + 1):
            deg[self.parent[v - 1] - 1] += 1
        return deg

    def free_slots(self) -> list[tuple[int, int]]:
        return [
            (v, s)
            for v in range(1, self.order + 1)
            for s in range(1, self.arity + 1)
            if self._children[v][s] == 0
        ]

    def to_json_dict(self) -> dict:
        return {"arity": self.arity, "parent": list(self.parent), "slot": list(self.slot)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "AryIncreasingTree":
        return cls(int(data["arity"]), tuple(data["parent"]), tuple(data["slot"]))


@dataclass(frozen=True)
class TreeStatProfile:
    """Slot statistics of an ary increasing tree of order n.

    ``interior_by_slot[j-1]`` counts non-root nodes sitting in slot ``j`` of
    their parent; ``exterior_by_slot[j-1] = n - interior_by_slot[j-1]``
    counts free ``j``-slots.  ``left_right`` counts nodes whose path from the
    root uses only the extreme slots (the root included); ``leaves`` counts
    childless nodes.
    """

    interior_by_slot: tuple[int, ...]
    exterior_by_slot: tuple[int, ...]
    left_right: int
    leaves: int

    def to_json_dict(self) -> dict:
        return {
            "interiorBySlot": list(self.interior_by_slot),
            "exteriorBySlot": list(self.exterior_by_slot),
            "leftRight": self.left_right,
            "leaves": self.leaves,
        }


def ary_stats(tree: AryIncreasingTree) -> TreeStatProfile:
    """Slot occupancy statistics of an ary increasing tree.

    >>> t = AryIncreasingTree(3, (0, 1), (0, 1))
    >>> ary_stats(t).exterior_by_slot
    (1, 2, 2)
    """
    n = tree.order
    interior = [0] * tree.arity
    extreme = {1, tree.arity}
    lr = [False] * (n + 1)
    lr[1] = True
    leaves = [True] * (n + 1)
    for v in range(2, n + 1):
        p, s = tree.parent[v - 1], tree.slot[v - 1]
        interior[s - 1] += 1
        lr[v] = lr[p] and s in extreme
        leaves[p] = False
    return TreeStatProfile(
        interior_by_slot=tuple(interior),
        exterior_by_slot=tuple(n - d for d in interior),
        left_right=sum(lr[1:]),
        leaves=sum(leaves[1 : n + 1]),
    )


# ---------------------------------------------------------------------------
# bundled increasing trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BundledIncreasingTree:
    """Increasing tree whose nodes carry ``bundle_count`` ordered bundles.

    Node ``v >= 2`` sits at position ``pos_in_bundle[v-1]`` (1-based) of
    bundle ``bundle[v-1]`` of node ``parent[v-1]``; the root has zeros.
    Positions inside each bundle must form a contiguous range ``1..len``.
    """

    bundle_count: int
    parent: tuple[int, ...]
    bundle: tuple[int, ...]
    pos_in_bundle: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent", tuple(int(x) for x in self.parent))
        object.__setattr__(self, "bundle", tuple(int(x) for x in self.bundle))
        object.__setattr__(self, "pos_in_bundle", tuple(int(x) for x in self.pos_in_bundle))
        n = len(self.parent)
        if self.bundle_count < 1:
            raise InvalidTreeError("bundle_count must be >= 1")
        if n < 1 or len(self.bundle) != n or len(self.pos_in_bundle) != n:
            raise InvalidTreeError("array fields must be non-empty and aligned")
        if (self.parent[0], self.bundle[0], self.pos_in_bundle[0]) != (0, 0, 0):
            raise InvalidTreeError("node 1 must be the root")
        groups: dict[tuple[int, int], list[int]] = {}
        for v in range(2, n + 1):
            p, b, q = self.parent[v - 1], self.bundle[v - 1], self.pos_in_bundle[v - 1]
            if not 1 <= p < v:
                raise InvalidTreeError(f"node {v} needs a smaller parent, got {p}")
            if not 1 <= b <= self.bundle_count:
                raise InvalidTreeError(f"bundle of node {v} out of range: {b}")
            groups.setdefault((p, b), []).append(q)
        for (p, b), positions in groups.items():
            if sorted(positions) != list(range(1, len(positions) + 1)):
                raise InvalidTreeError(
                    f"positions in bundle {b} of node {p} are not contiguous: {positions}"
                )

    @property
    def order(self) -> int:
        return len(self.parent)

    @cached_property
    def _bundles(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``_bundles[v][b-1]`` = children of v in bundle b, in order (index 0 unused)."""
        table: list[list[list[int]]] = [
            [[] for _ in range(self.bundle_count)] for _ in range(self.order + 1)
        ]
        order_keys = sorted(
            range(2, self.order + 1),
            key=lambda v: (self.parent[v - 1], self.bundle[v - 1], self.pos_in_bundle[v - 1]),
        )
        for v in order_keys:
            table[self.parent[v - 1]][self.bundle[v - 1] - 1].append(v)
        return tuple(tuple(tuple(b) for b in row) for row in table)

    def bundles_of(self, v: int) -> tuple[tuple[int, ...], ...]:
        return self._bundles[v]

    def degrees(self) -> list[int]:
        deg = [0] * self.order
        for v in range(2, self.order + 1):
            deg[self.parent[v - 1] - 1] += 1
        return deg

    def leaves(self) -> int:
        return sum(1 for d in self.degrees() if d == 0)

    def to_json_dict(self) -> dict:
        return {
            "bundleCount": self.bundle_count,
            "parent": list(self.parent),
            "bundle": list(self.bundle),
            "posInBundle": list(self.pos_in_bundle),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BundledIncreasingTree":
        return cls(
            int(data["bundleCount"]),
            tuple(data["parent"]),
            tuple(data["bundle"]),
            tuple(data["posInBundle"]),
        )


@dataclass(frozen=True)
class BundledStatProfile:
    """Bundle statistics of a bundled increasing tree.

    ``bundle_ascents`` = ascending adjacent label pairs inside bundles, plus
    the number of non-empty bundles, plus one if the first root bundle is
    empty.  ``bundle_descents`` is the mirror image (descending pairs, plus
    non-empty bundles, plus one if the last root bundle is empty).
    ``empty_bundles`` counts empty bundles of non-root nodes plus empty
    inner bundles of the root.
    """

    bundle_ascents: int
    bundle_descents: int
    empty_bundles: int

    def to_json_dict(self) -> dict:
        return {
            "bundleAscents": self.bundle_ascents,
            "bundleDescents": self.bundle_descents,
            "emptyBundles": self.empty_bundles,
        }


def bundled_stats(tree: BundledIncreasingTree) -> BundledStatProfile:
    asc = desc = nonempty = 0
    empty = 0
    m = tree.bundle_count
    for v in range(1, tree.order + 1):
        bundles = tree.bundles_of(v)
        for idx, b in enumerate(bundles):
            if b:
                nonempty += 1
                asc += sum(1 for i in range(len(b) - 1) if b[i] < b[i + 1])
                desc += sum(1 for i in range(len(b) - 1) if b[i] > b[i + 1])
            else:
                if v > 1 or 0 < idx < m - 1:
                    empty += 1
    root = tree.bundles_of(1)
    return BundledStatProfile(
        bundle_ascents=asc + nonempty + (1 if not root[0] else 0),
        bundle_descents=desc + nonempty + (1 if not root[-1] else 0),
        empty_bundles=empty,
    )


# ---------------------------------------------------------------------------
# random growth
# ---------------------------------------------------------------------------


def grow_ary_tree(arity: int, n: int, seed=None) -> AryIncreasingTree:
    """Grow an ary increasing tree by attaching each new node to a uniformly
    random free slot.  The result is uniform over all such trees of order n."""
    if arity < 2 or n < 1:
        raise ValueError("need arity >= 2 and n >= 1")
    rng = as_generator(seed)
    parent = [0]
    slot = [0]
    free = [(1, s) for s in range(1, arity + 1)]
    for v in range(2, n + 1):
        i = int(rng.integers(0, len(free)))
        p, s = free[i]
        free[i] = free[-1]
        free.pop()
        parent.append(p)
        slot.append(s)
        free.extend((v, t) for t in range(1, arity + 1))
    return AryIncreasingTree(arity, tuple(parent), tuple(slot))


def _grow_sequential(node_weight_a: int, node_weight_b: int, n: int, rng) -> list[list[int]]:
    """Shared growth core: node v is chosen with weight ``a + b*deg(v)``, then
    a uniform child gap of v.  Returns ordered children lists per node."""
    children: list[list[int]] = [[] for _ in range(n + 1)]
    deg = [0] * (n + 1)
    for v in range(2, n + 1):
        order = v - 1
        total = node_weight_a * order + node_weight_b * (order - 1)
        u = int(rng.integers(0, total))
        node = 1
        acc = node_weight_a + node_weight_b * deg[1]
        while u >= acc:
            node += 1
            acc += node_weight_a + node_weight_b * deg[node]
        gap = int(rng.integers(0, deg[node] + 1))
        children[node].insert(gap, v)
        deg[node] += 1
    return children


def grow_plane_tree(family: DegreeWeightFamily, n: int, seed=None) -> BundledIncreasingTree:
    """Grow a weighted random plane tree of the family (one bundle per node).

    The attachment node is drawn with probability proportional to
    ``phi_{d+1}/phi_d``, realized through integer weights ``a + b*deg`` with
    ``alpha = a/b``; the child gap is uniform.  For ``recursive`` families
    the node is uniform.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_generator(seed)
    if family.kind == D_ARY:
        raise ValueError("use grow_ary_tree for dAry families")
    if family.kind == RECURSIVE:
        a, b = 1, 0
    else:
        alpha = family.alpha
        a, b = alpha.numerator, alpha.denominator
    children = _grow_sequential(a, b, n, rng)
    parent = [0] * n
    bundle = [0] * n
    pos = [0] * n
    for p in range(1, n + 1):
        for j, c in enumerate(children[p]):
            parent[c - 1] = p
            bundle[c - 1] = 1
            pos[c - 1] = j + 1
    return BundledIncreasingTree(1, tuple(parent), tuple(bundle), tuple(pos))


def grow_bundled_tree(bundle_count: int, n: int, seed=None) -> BundledIncreasingTree:
    """Grow a uniformly random bundled increasing tree: each step picks one of
    the ``(m+1)*order - 1`` insertion positions uniformly (bundle gaps)."""
    if bundle_count < 1 or n < 1:
        raise ValueError("need bundle_count >= 1 and n >= 1")
    m = bundle_count
    rng = as_generator(seed)
    bundles: list[list[list[int]]] = [[[] for _ in range(m)] for _ in range(n + 1)]
    deg = [0] * (n + 1)
    for v in range(2, n + 1):
        order = v - 1
        total = (m + 1) * order - 1  # sum over nodes of (m + deg)
        u = int(rng.integers(0, total))
        node = 1
        acc = m + deg[1]
        while u >= acc:
            node += 1
            acc += m + deg[node]
        offset = u - (acc - (m + deg[node]))
        for b in range(m):
            gaps = len(bundles[node][b]) + 1
            if offset < gaps:
                bundles[node][b].insert(offset, v)
                break
            offset -= gaps
        deg[node] += 1
    parent = [0] * n
    bundle = [0] * n
    pos = [0] * n
    for p in range(1, n + 1):
        for b in range(m):
            for j, c in enumerate(bundles[p][b]):
                parent[c - 1] = p
                bundle[c - 1] = b + 1
                pos[c - 1] = j + 1
    return BundledIncreasingTree(m, tuple(parent), tuple(bundle), tuple(pos))


def grow_random(family: DegreeWeightFamily, n: int, seed=None):
    """Grow a random order-n tree of the family (ary trees for ``dAry``,
    plane shapes otherwise)."""
    if family.kind == D_ARY:
        return grow_ary_tree(family.arity, n, seed)
    return grow_plane_tree(family, n, seed)


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def enumerate_ary_trees(n: int, arity: int) -> Iterator[AryIncreasingTree]:
    """Yield every ary increasing tree of order n exactly once, ordered by
    their (parent, slot) arrays."""
    if arity < 2 or n < 1:
        raise ValueError("need arity >= 2 and n >= 1")
    items: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((0,), (0,))]
    for v in range(2, n + 1):
        nxt = []
        for parent, slot in items:
            used = set(zip(parent[1:], slot[1:]))
            for p in range(1, v):
                for s in range(1, arity + 1):
                    if (p, s) not in used:
                        nxt.append((parent + (p,), slot + (s,)))
        items = nxt
    items.sort()
    for parent, slot in items:
        yield AryIncreasingTree(arity, parent, slot)


def enumerate_bundled_trees(n: int, bundle_count: int) -> Iterator[BundledIncreasingTree]:
    """Yield every bundled increasing tree of order n exactly once.

    Direct recursive enumeration over insertion positions; tests cross-check
    it against decoding the enumerated bundled Stirling permutations.
    """
    if bundle_count < 1 or n < 1:
        raise ValueError("need bundle_count >= 1 and n >= 1")
    m = bundle_count
    # state: tuple over nodes of tuple over bundles of child tuples
    start = ((tuple(() for _ in range(m)),), )
    states: list[tuple] = [start[0]]
    for v in range(2, n + 1):
        nxt = []
        for state in states:
            for node in range(1, v):
                row = state[node - 1]
                for b in range(m):
                    seq = row[b]
                    for gap in range(len(seq) + 1):
                        new_seq = seq[:gap] + (v,) + seq[gap:]
                        new_row = row[:b] + (new_seq,) + row[b + 1 :]
                        nxt.append(state[: node - 1] + (new_row,) + state[node:]
                                   + (tuple(() for _ in range(m)),))
        states = nxt
    results = []
    for state in states:
        parent = [0] * n
        bundle = [0] * n
        pos = [0] * n
        for p in range(1, n + 1):
            for b in range(m):
                for j, c in enumerate(state[p - 1][b]):
                    parent[c - 1] = p
                    bundle[c - 1] = b + 1
                    pos[c - 1] = j + 1
        results.append((tuple(parent), tuple(bundle), tuple(pos)))
    results.sort()
    for parent, bundle, pos in results:
        yield BundledIncreasingTree(m, parent, bundle, pos)


def enumerate_plane_trees(n: int) -> Iterator[BundledIncreasingTree]:
    """Plane recursive trees of order n (single-bundle shapes)."""
    return enumerate_bundled_trees(n, 1)
