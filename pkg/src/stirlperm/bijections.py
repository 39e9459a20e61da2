"""Bijections between generalized Stirling permutations and increasing trees.

Four codecs, all exact inverses of each other on their domains:

* ``encode_ary_tree`` / ``decode_ary_tree``: (k+1)-ary increasing trees of
  order n <-> k-Stirling permutations of order n.  The code is the
  depth-first contour: a node's label is written after each of its first k
  slots has been visited.
* ``encode_bundled_tree`` / ``decode_bundled_tree``: (k+1)-bundled
  increasing trees <-> k-bundled Stirling permutations.  A node's code is
  the concatenation of its bundle codes separated by copies of the node's
  label, where a bundle's code wraps each child's code in a pair of the
  child's labels.
* ``seq_to_ary_tree`` / ``ary_tree_to_seq``: sequences of k-bundled
  increasing trees with labels partitioning 1..n <-> (k+2)-ary increasing
  trees.  The tree containing the smallest label becomes the root; the part
  of the sequence to its left goes to the first slot, its bundles to the
  middle slots, the rest of the sequence to the last slot.
* ``f_tree_from_bundled`` / ``bundled_from_f_tree``: k-bundled increasing
  trees <-> modified (k+2)-ary trees whose root has only k slots, by
  applying the sequence bijection to each root bundle.

``verify_stat_transfer`` exhaustively checks the statistic correspondences
(slot occupancies vs refined ascent/descent/plateau counts, block count vs
left-right nodes, bundle statistics vs totals).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .perms import (
    GenStirlingPerm,
    InvalidPermutationError,
    block_spans,
    bundled_multiplicities,
    stat_profile,
    uniform_multiplicities,
)
from .trees import (
    AryIncreasingTree,
    BundledIncreasingTree,
    InvalidTreeError,
    ary_stats,
    bundled_stats,
    enumerate_ary_trees,
    enumerate_bundled_trees,
)

# ---------------------------------------------------------------------------
# ary codec
# ---------------------------------------------------------------------------


def encode_ary_tree(tree: AryIncreasingTree) -> GenStirlingPerm:
    """Depth-first contour code of a (k+1)-ary increasing tree.

    >>> encode_ary_tree(AryIncreasingTree(3, (0, 1), (0, 1))).compact()
    '2211'
    """
    arity = tree.arity
    k = arity - 1
    out: list[int] = []
    stack: list[tuple[int, int]] = [(1, 1)]
    while stack:
        v, s = stack.pop()
        if 2 <= s <= arity:
            out.append(v)
        if s > arity:
            continue
        stack.append((v, s + 1))
        c = tree.child(v, s)
        if c:
            stack.append((c, 1))
    return GenStirlingPerm(tuple(out), uniform_multiplicities(tree.order, k))


def _min_tables(values: np.ndarray) -> list[np.ndarray]:
    """Sparse table of windowed minima for O(1) range-min queries."""
    tables = [values]
    half = 1
    while 2 * half <= len(values):
        prev = tables[-1]
        tables.append(np.minimum(prev[: len(prev) - half], prev[half:]))
        half *= 2
    return tables


def _range_min(tables: list[np.ndarray], lo: int, hi: int) -> int:
    j = (hi - lo).bit_length() - 1
    t = tables[j]
    return int(min(t[lo], t[hi - (1 << j)]))


def decode_ary_tree(perm: GenStirlingPerm) -> AryIncreasingTree:
    """Inverse of :func:`encode_ary_tree`.

    The smallest label of each segment is attached to the current slot and
    its k occurrences split the segment into k+1 child segments.  Iterative,
    with an O(1) range-minimum structure, so deep trees decode fine.
    """
    k = perm.uniform_k
    if k is None or perm.order == 0:
        raise InvalidPermutationError("ary decoding needs a non-empty k-Stirling permutation")
    n = perm.order
    word = perm.word
    occ: list[list[int]] = [[] for _ in range(n + 1)]
    for pos, x in enumerate(word):
        occ[x].append(pos)
    tables = _min_tables(np.asarray(word, dtype=np.int64))
    parent = [0] * (n + 1)
    slot = [0] * (n + 1)
    stack: list[tuple[int, int, int, int]] = [(0, len(word), 0, 0)]
    while stack:
        lo, hi, par, s = stack.pop()
        if lo >= hi:
            continue
        v = _range_min(tables, lo, hi)
        parent[v], slot[v] = par, s
        prev = lo
        for j, cut in enumerate(occ[v], start=1):
            stack.append((prev, cut, v, j))
            prev = cut + 1
        stack.append((prev, hi, v, k + 1))
    return AryIncreasingTree(k + 1, tuple(parent[1:]), tuple(slot[1:]))


# ---------------------------------------------------------------------------
# bundled codec
# ---------------------------------------------------------------------------


def encode_bundled_tree(tree: BundledIncreasingTree) -> GenStirlingPerm:
    """Code of a (k+1)-bundled increasing tree as a k-bundled Stirling
    permutation: bundles are separated by the node's label, and each child's
    code is wrapped in a pair of the child's labels.

    >>> t = BundledIncreasingTree(2, (0, 1), (0, 1), (0, 1))
    >>> encode_bundled_tree(t).compact()
    '2221'
    """
    if tree.bundle_count < 2:
        raise InvalidTreeError(
            "bundled encoding needs at least two bundles (the root label must appear)"
        )
    k = tree.bundle_count - 1
    out: list[int] = []
    stack: list[tuple[str, int]] = [("enter", 1)]
    while stack:
        op, v = stack.pop()
        if op == "emit":
            out.append(v)
            continue
        items: list[tuple[str, int]] = []
        for idx, b in enumerate(tree.bundles_of(v)):
            if idx:
                items.append(("emit", v))
            for u in b:
                items.append(("emit", u))
                items.append(("enter", u))
                items.append(("emit", u))
        stack.extend(reversed(items))
    return GenStirlingPerm(tuple(out), bundled_multiplicities(tree.order, k))


def decode_bundled_tree(perm: GenStirlingPerm) -> BundledIncreasingTree:
    """Inverse of :func:`encode_bundled_tree`.

    Each segment is cut into blocks (full spans of their smallest label);
    a block's label becomes the next child of the current bundle and the
    label's inner occurrences split the block into its own bundles.
    """
    mult = perm.multiplicities
    if not mult or mult[0] < 1:
        raise InvalidPermutationError("bundled decoding needs label 1 present")
    k = mult[0]
    if any(m != k + 2 for m in mult[1:]):
        raise InvalidPermutationError(
            f"not a {k}-bundled multiset: expected (k, k+2, ..., k+2), got {mult}"
        )
    n = perm.order
    m = k + 1
    word = perm.word
    occ: list[list[int]] = [[] for _ in range(n + 1)]
    for pos, x in enumerate(word):
        occ[x].append(pos)
    parent = [0] * (n + 1)
    bundle = [0] * (n + 1)
    pos_in = [0] * (n + 1)
    fill: dict[tuple[int, int], int] = {}
    stack: list[tuple[int, int, int, int]] = []

    def push_segments(node: int, inner_lo: int, inner_hi: int, walls: list[int]) -> None:
        prev = inner_lo
        for b, cut in enumerate(walls, start=1):
            stack.append((prev, cut, node, b))
            prev = cut + 1
        stack.append((prev, inner_hi, node, m))

    push_segments(1, 0, len(word), occ[1])
    while stack:
        lo, hi, node, b = stack.pop()
        p = lo
        while p < hi:
            u = word[p]
            last = occ[u][-1]
            if occ[u][0] != p or last >= hi:
                raise InvalidPermutationError("word is not a valid bundled code")
            parent[u] = node
            bundle[u] = b
            fill[(node, b)] = fill.get((node, b), 0) + 1
            pos_in[u] = fill[(node, b)]
            push_segments(u, p + 1, last, occ[u][1:-1])
            p = last + 1
    return BundledIncreasingTree(m, tuple(parent[1:]), tuple(bundle[1:]), tuple(pos_in[1:]))


# ---------------------------------------------------------------------------
# label-carrying node forms (for the sequence and F-tree bijections)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BundledNode:
    """A bundled increasing tree over an arbitrary label set: ``bundles`` is a
    tuple of ``bundle_count`` ordered tuples of subtrees."""

    label: int
    bundles: tuple[tuple["BundledNode", ...], ...]

    @property
    def bundle_count(self) -> int:
        return len(self.bundles)

    def labels(self) -> set[int]:
        out = {self.label}
        for b in self.bundles:
            for child in b:
                out |= child.labels()
        return out

    def min_label(self) -> int:
        # increasing trees: the root carries the smallest label of the subtree
        return self.label

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "bundles": [[c.to_json_dict() for c in b] for b in self.bundles],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "BundledNode":
        return cls(
            int(data["label"]),
            tuple(tuple(cls.from_json_dict(c) for c in b) for b in data["bundles"]),
        )


@dataclass(frozen=True)
class AryNode:
    """An ary increasing tree over an arbitrary label set; ``slots[i]`` is the
    subtree in slot i+1 or ``None``."""

    label: int
    slots: tuple["AryNode | None", ...]


def bundled_subtree_node(tree: BundledIncreasingTree, root: int = 1) -> BundledNode:
    """View the subtree of ``tree`` rooted at ``root`` as a :class:`BundledNode`."""

    def build(v: int) -> BundledNode:
        return BundledNode(v, tuple(tuple(build(u) for u in b) for b in tree.bundles_of(v)))

    return build(root)


def bundled_node_to_tree(node: BundledNode) -> BundledIncreasingTree:
    """Convert a node form whose labels are exactly 1..n back to array form."""
    labels = sorted(node.labels())
    n = len(labels)
    if labels != list(range(1, n + 1)) or node.label != 1:
        raise InvalidTreeError("node labels must be exactly 1..n with root 1")
    m = node.bundle_count
    parent = [0] * n
    bundle = [0] * n
    pos = [0] * n
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.bundle_count != m:
            raise InvalidTreeError("inconsistent bundle counts")
        for b_idx, b in enumerate(cur.bundles, start=1):
            for p_idx, child in enumerate(b, start=1):
                if child.label <= cur.label:
                    raise InvalidTreeError("labels must increase away from the root")
                parent[child.label - 1] = cur.label
                bundle[child.label - 1] = b_idx
                pos[child.label - 1] = p_idx
                stack.append(child)
    return BundledIncreasingTree(m, tuple(parent), tuple(bundle), tuple(pos))


def _seq_to_node(seq: tuple[BundledNode, ...]) -> AryNode | None:
    if not seq:
        return None
    idx = min(range(len(seq)), key=lambda i: seq[i].min_label())
    t = seq[idx]
    slots = (
        _seq_to_node(seq[:idx]),
        *(_seq_to_node(b) for b in t.bundles),
        _seq_to_node(seq[idx + 1 :]),
    )
    return AryNode(t.label, slots)


def _node_to_seq(node: AryNode | None) -> tuple[BundledNode, ...]:
    if node is None:
        return ()
    left = _node_to_seq(node.slots[0])
    right = _node_to_seq(node.slots[-1])
    bundles = tuple(_node_to_seq(s) for s in node.slots[1:-1])
    return left + (BundledNode(node.label, bundles),) + right


def _check_sequence(seq: Sequence[BundledNode]) -> tuple[tuple[BundledNode, ...], int, int]:
    seq = tuple(seq)
    if not seq:
        raise InvalidTreeError("sequence must be non-empty")
    counts = {t.bundle_count for t in seq}
    if len(counts) != 1:
        raise InvalidTreeError(f"mixed bundle counts in sequence: {sorted(counts)}")
    m = counts.pop()
    seen: set[int] = set()
    for t in seq:
        labels = t.labels()
        if seen & labels:
            raise InvalidTreeError("label sets of the sequence must be disjoint")
        seen |= labels
    n = len(seen)
    if seen != set(range(1, n + 1)):
        raise InvalidTreeError("labels must partition 1..n")
    return seq, m, n


def seq_to_ary_tree(seq: Sequence[BundledNode]) -> AryIncreasingTree:
    """Map a sequence of k-bundled increasing trees (labels partitioning 1..n)
    to a (k+2)-ary increasing tree of order n."""
    seq, m, n = _check_sequence(seq)
    node = _seq_to_node(seq)
    arity = m + 2
    parent = [0] * n
    slot = [0] * n
    stack: list[tuple[AryNode, int, int]] = [(node, 0, 0)]
    while stack:
        cur, par, s = stack.pop()
        parent[cur.label - 1] = par
        slot[cur.label - 1] = s
        if len(cur.slots) != arity:
            raise InvalidTreeError("inconsistent bundle counts inside the sequence")
        for i, child in enumerate(cur.slots, start=1):
            if child is not None:
                stack.append((child, cur.label, i))
    return AryIncreasingTree(arity, tuple(parent), tuple(slot))


def ary_tree_to_seq(tree: AryIncreasingTree) -> tuple[BundledNode, ...]:
    """Inverse of :func:`seq_to_ary_tree`; needs ``arity >= 3``."""
    if tree.arity < 3:
        raise InvalidTreeError("sequence decoding needs arity >= 3")

    def build(v: int) -> AryNode:
        return AryNode(
            v,
            tuple(
                build(c) if (c := tree.child(v, s)) else None
                for s in range(1, tree.arity + 1)
            ),
        )

    return _node_to_seq(build(1))


# ---------------------------------------------------------------------------
# F-trees (modified ary trees: the root has k slots, other nodes k+2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FIncreasingTree:
    """Increasing tree on 1..n where the root exposes ``root_slot_count``
    slots and every other node ``root_slot_count + 2``."""

    root_slot_count: int
    parent: tuple[int, ...]
    slot: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent", tuple(int(x) for x in self.parent))
        object.__setattr__(self, "slot", tuple(int(x) for x in self.slot))
        k = self.root_slot_count
        n = len(self.parent)
        if k < 1:
            raise InvalidTreeError("root_slot_count must be >= 1")
        if n < 1 or len(self.slot) != n:
            raise InvalidTreeError("parent and slot arrays must be non-empty and aligned")
        if self.parent[0] != 0 or self.slot[0] != 0:
            raise InvalidTreeError("node 1 must be the root")
        used = set()
        for v in range(2, n + 1):
            p, s = self.parent[v - 1], self.slot[v - 1]
            cap = k if p == 1 else k + 2
            if not 1 <= p < v:
                raise InvalidTreeError(f"node {v} needs a smaller parent, got {p}")
            if not 1 <= s <= cap:
                raise InvalidTreeError(f"slot of node {v} out of range: {s}")
            if (p, s) in used:
                raise InvalidTreeError(f"slot {s} of node {p} used twice")
            used.add((p, s))

    @property
    def order(self) -> int:
        return len(self.parent)

    def child(self, v: int, s: int) -> int:
        for u in range(2, self.order + 1):
            if self.parent[u - 1] == v and self.slot[u - 1] == s:
                return u
        return 0

    def to_json_dict(self) -> dict:
        return {
            "rootSlotCount": self.root_slot_count,
            "parent": list(self.parent),
            "slot": list(self.slot),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FIncreasingTree":
        return cls(int(data["rootSlotCount"]), tuple(data["parent"]), tuple(data["slot"]))


def f_tree_from_bundled(tree: BundledIncreasingTree) -> FIncreasingTree:
    """Apply the sequence bijection to each root bundle of a k-bundled tree,
    producing the modified (k+2)-ary tree whose root has k slots."""
    k = tree.bundle_count
    n = tree.order
    parent = [0] * n
    slot = [0] * n
    for b_idx, b in enumerate(tree.bundles_of(1), start=1):
        seq = tuple(bundled_subtree_node(tree, u) for u in b)
        node = _seq_to_node(seq)
        if node is None:
            continue
        stack: list[tuple[AryNode, int, int]] = [(node, 1, b_idx)]
        while stack:
            cur, par, s = stack.pop()
            parent[cur.label - 1] = par
            slot[cur.label - 1] = s
            for i, child in enumerate(cur.slots, start=1):
                if child is not None:
                    stack.append((child, cur.label, i))
    return FIncreasingTree(k, tuple(parent), tuple(slot))


def bundled_from_f_tree(ftree: FIncreasingTree) -> BundledIncreasingTree:
    """Inverse of :func:`f_tree_from_bundled`."""
    k = ftree.root_slot_count
    n = ftree.order
    children: dict[tuple[int, int], int] = {}
    for v in range(2, n + 1):
        children[(ftree.parent[v - 1], ftree.slot[v - 1])] = v

    def build(v: int) -> AryNode:
        return AryNode(
            v, tuple(  # non-root nodes expose k+2 slots
                build(c) if (c := children.get((v, s), 0)) else None
                for s in range(1, k + 3)
            )
        )

    parent = [0] * n
    bundle = [0] * n
    pos = [0] * n
    for b_idx in range(1, k + 1):
        c = children.get((1, b_idx), 0)
        seq = _node_to_seq(build(c)) if c else ()
        for p_idx, sub in enumerate(seq, start=1):
            stack: list[tuple[BundledNode, int, int, int]] = [(sub, 1, b_idx, p_idx)]
            while stack:
                cur, par, b, p = stack.pop()
                parent[cur.label - 1] = par
                bundle[cur.label - 1] = b
                pos[cur.label - 1] = p
                for bb, bseq in enumerate(cur.bundles, start=1):
                    for pp, child in enumerate(bseq, start=1):
                        stack.append((child, cur.label, bb, pp))
    return BundledIncreasingTree(k, tuple(parent), tuple(bundle), tuple(pos))


# ---------------------------------------------------------------------------
# exhaustive enumeration of the remaining domains
# ---------------------------------------------------------------------------


def enumerate_bundled_sequences(n: int, bundle_count: int) -> Iterator[tuple[BundledNode, ...]]:
    """All sequences of ``bundle_count``-bundled increasing trees whose label
    sets partition 1..n.  Exponential; intended for small n."""
    if n < 1 or bundle_count < 1:
        raise ValueError("need n >= 1 and bundle_count >= 1")
    m = bundle_count

    def subsets(items: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        for mask in range(1 << len(items)):
            yield tuple(x for i, x in enumerate(items) if mask >> i & 1)

    def sequences(labels: tuple[int, ...]) -> Iterator[tuple[BundledNode, ...]]:
        if not labels:
            yield ()
            return
        for first_set in subsets(labels):
            if not first_set:
                continue
            rest = tuple(x for x in labels if x not in first_set)
            for tree in trees_on(first_set):
                for tail in sequences(rest):
                    yield (tree,) + tail

    def bundle_tuples(labels: tuple[int, ...], slots: int) -> Iterator[tuple]:
        if slots == 1:
            for seq in sequences(labels):
                yield (seq,)
            return
        for first_set in subsets(labels):
            rest = tuple(x for x in labels if x not in first_set)
            for seq in sequences(first_set):
                for tail in bundle_tuples(rest, slots - 1):
                    yield (seq,) + tail

    def trees_on(labels: tuple[int, ...]) -> Iterator[BundledNode]:
        root, rest = labels[0], labels[1:]  # labels sorted ascending: root = min
        for bundles in bundle_tuples(rest, m):
            yield BundledNode(root, bundles)

    yield from sequences(tuple(range(1, n + 1)))


def enumerate_f_trees(n: int, root_slot_count: int) -> Iterator[FIncreasingTree]:
    """All F-trees of order n: root with ``root_slot_count`` slots, other
    nodes with ``root_slot_count + 2``."""
    if n < 1 or root_slot_count < 1:
        raise ValueError("need n >= 1 and root_slot_count >= 1")
    k = root_slot_count
    items: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((0,), (0,))]
    for v in range(2, n + 1):
        nxt = []
        for parent, slot in items:
            used = set(zip(parent[1:], slot[1:]))
            for p in range(1, v):
                cap = k if p == 1 else k + 2
                for s in range(1, cap + 1):
                    if (p, s) not in used:
                        nxt.append((parent + (p,), slot + (s,)))
        items = nxt
    items.sort()
    for parent, slot in items:
        yield FIncreasingTree(k, parent, slot)


# ---------------------------------------------------------------------------
# statistic transfer verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StatTransferReport:
    """Outcome of the exhaustive statistic-transfer check for one (n, k)."""

    n: int
    k: int
    ary_examined: int
    bundled_examined: int
    counterexamples: tuple[dict, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "aryExamined": self.ary_examined,
            "bundledExamined": self.bundled_examined,
            "counterexamples": list(self.counterexamples),
            "ok": self.ok,
        }


def verify_stat_transfer(n: int, k: int, include_bundled: bool = True) -> StatTransferReport:
    """Exhaustively confirm that the codecs transfer statistics.

    For every (k+1)-ary tree of order n with code statistics (j-ascents etc.)
    and slot statistics D/L: j-ascents = interior slot j+1 counts, j-descents
    = interior slot j counts, j-plateaux = exterior slot j+1 counts, ascents
    = exterior slot 1, descents = exterior slot k+1, plateaux = middle
    exterior slots, block count = left-right nodes.  For every (k+1)-bundled
    tree: the bundle statistics equal (ascents, descents, plateaux).
    """
    bad: list[dict] = []
    ary_count = 0

    def record(kind: str, tree_json: dict, word, field: str, expected: int, got: int) -> None:
        bad.append(
            {
                "kind": kind,
                "tree": tree_json,
                "word": list(word),
                "field": field,
                "expected": expected,
                "got": got,
            }
        )

    for tree in enumerate_ary_trees(n, k + 1):
        ary_count += 1
        code = encode_ary_tree(tree)
        prof = stat_profile(code)
        ts = ary_stats(tree)
        d = ts.interior_by_slot
        ell = ts.exterior_by_slot
        checks: list[tuple[str, int, int]] = []
        for j in range(1, k + 1):
            checks.append((f"jAscents[{j}]", d[j], prof.j_ascent(j)))
            checks.append((f"jDescents[{j}]", d[j - 1], prof.j_descent(j)))
        for j in range(1, k):
            checks.append((f"jPlateaux[{j}]", ell[j], prof.j_plateau(j)))
        checks.append(("ascents", ell[0], prof.ascents))
        checks.append(("descents", ell[k], prof.descents))
        checks.append(("plateaux", sum(ell[1:k]), prof.plateaux))
        blocks = len(block_spans(code.word))
        checks.append(("blocks=leftRight", ts.left_right, blocks))
        for field, expected, got in checks:
            if expected != got:
                record("ary", tree.to_json_dict(), code.word, field, expected, got)

    bundled_count = 0
    if include_bundled:
        for btree in enumerate_bundled_trees(n, k + 1):
            bundled_count += 1
            code = encode_bundled_tree(btree)
            prof = stat_profile(code)
            bs = bundled_stats(btree)
            for field, expected, got in (
                ("bundleAscents=ascents", bs.bundle_ascents, prof.ascents),
                ("bundleDescents=descents", bs.bundle_descents, prof.descents),
                ("emptyBundles=plateaux", bs.empty_bundles, prof.plateaux),
            ):
                if expected != got:
                    record("bundled", btree.to_json_dict(), code.word, field, expected, got)

    return StatTransferReport(n, k, ary_count, bundled_count, tuple(bad))
