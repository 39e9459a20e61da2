"""Polya urn models tied to Stirling permutation statistics.

Four replacement schemes, all driven by a single simulator:

* ``symmetric_urn(q)``: draw a ball, discard it, add one ball of every
  colour.  With ``q = k+1`` colours and an all-ones start, the colour counts
  after n-1 draws have exactly the joint law of the exterior slot counts of
  a random (k+1)-ary increasing tree of order n (and hence of the total
  ascent/descent/plateau statistics of a random k-Stirling permutation).
* ``fixed_addition_urn(s)``: draw, discard, add the fixed vector ``s``.
* ``triangular_block_urn(k)``: colours (black, white); a black draw adds k
  black, a white draw adds k-1 black and 1 white.  Starting from (k-1, 2)
  the white count minus one is distributed like the number of blocks of a
  random k-Stirling permutation.
* ``polya_urn(k, w, b)``: classical two-colour urn, k extra balls of the
  drawn colour.  Nested copies of it drive the label-ordered block sizes.

``urn_a_covariance`` / ``fixed_addition_covariance`` return the exact
covariance matrices of the Gaussian limits together with the per-step
centering rates, as rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._rng import as_generator

KIND_SYMMETRIC = "symmetricA"
KIND_FIXED = "fixedAddition"
KIND_TRIANGULAR = "triangularB"
KIND_POLYA = "polyaC"


@dataclass(frozen=True)
class UrnSpec:
    """An urn model: colour names, initial counts and the replacement rule.

    ``deltas[c]`` is the net change applied to the counts when colour ``c``
    is drawn (any discard of the drawn ball is already folded in).
    """

    kind: str
    colors: tuple[str, ...]
    initial: tuple[int, ...]
    deltas: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        q = len(self.colors)
        if q < 2:
            raise ValueError("an urn needs at least two colours")
        if len(self.initial) != q or len(self.deltas) != q:
            raise ValueError("initial counts and replacement rows must match colours")
        if any(c < 0 for c in self.initial) or sum(self.initial) < 1:
            raise ValueError("initial counts must be non-negative and not all zero")

    @property
    def color_count(self) -> int:
        return len(self.colors)


def symmetric_urn(q: int, initial: Sequence[int] | None = None) -> UrnSpec:
    """Draw-and-discard urn that adds one ball of each of ``q`` colours."""
    if q < 2:
        raise ValueError("q must be >= 2")
    init = tuple(initial) if initial is not None else (1,) * q
    deltas = tuple(
        tuple(1 - (1 if j == c else 0) for j in range(q)) for c in range(q)
    )
    return UrnSpec(KIND_SYMMETRIC, tuple(f"color{j+1}" for j in range(q)), init, deltas)


def fixed_addition_urn(s: Sequence[int], initial: Sequence[int]) -> UrnSpec:
    """Draw-and-discard urn that adds the fixed vector ``s`` each step."""
    s = tuple(int(x) for x in s)
    if any(x < 0 for x in s) or sum(s) < 2:
        raise ValueError("need s_i >= 0 and sum(s) >= 2")
    q = len(s)
    deltas = tuple(
        tuple(s[j] - (1 if j == c else 0) for j in range(q)) for c in range(q)
    )
    return UrnSpec(KIND_FIXED, tuple(f"color{j+1}" for j in range(q)), tuple(initial), deltas)


def triangular_block_urn(k: int) -> UrnSpec:
    """Two-colour triangular urn for the block count, colours (black, white).

    Starts at time 1 with k-1 black and 2 white balls (total k+1); after
    ``n-1`` draws the total is kn+1 and ``white - 1`` has the law of the
    number of blocks of a random k-Stirling permutation of order n.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return UrnSpec(
        KIND_TRIANGULAR,
        ("black", "white"),
        (k - 1, 2),
        ((k, 0), (k - 1, 1)),
    )


def polya_urn(k: int, init_white: int, init_black: int) -> UrnSpec:
    """Classical two-colour Polya urn adding ``k`` balls of the drawn colour."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return UrnSpec(KIND_POLYA, ("white", "black"), (init_white, init_black), ((k, 0), (0, k)))


@dataclass(frozen=True)
class UrnTrajectory:
    spec: UrnSpec
    steps: int
    counts: tuple[int, ...]
    seed: int | None
    path: tuple[tuple[int, ...], ...] | None = None

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.spec.kind,
            "colors": list(self.spec.colors),
            "steps": self.steps,
            "counts": list(self.counts),
            "seed": self.seed,
        }
        if self.path is not None:
            out["path"] = [list(row) for row in self.path]
        return out


def simulate(spec: UrnSpec, steps: int, seed=None, record_path: bool = False) -> UrnTrajectory:
    """Run the urn ``steps`` draws from its initial state.

    Each draw picks a ball uniformly (one integer uniform on the current
    total) and applies the replacement row of its colour.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rng = as_generator(seed)
    counts = list(spec.initial)
    path = [tuple(counts)] if record_path else None
    for _ in range(steps):
        total = sum(counts)
        if total <= 0:
            raise RuntimeError("urn ran out of balls")
        u = int(rng.integers(0, total))
        color = 0
        acc = counts[0]
        while u >= acc:
            color += 1
            acc += counts[color]
        delta = spec.deltas[color]
        for j in range(spec.color_count):
            counts[j] += delta[j]
        if counts[color] < 0:
            raise RuntimeError("replacement produced a negative count")
        if path is not None:
            path.append(tuple(counts))
    return UrnTrajectory(
        spec,
        steps,
        tuple(counts),
        seed if isinstance(seed, int) else None,
        tuple(path) if path is not None else None,
    )


def transition_distribution(
    spec: UrnSpec, counts: Sequence[int]
) -> tuple[tuple[tuple[int, ...], Fraction], ...]:
    """Exact one-step transition law of the simulator from the given counts."""
    counts = tuple(counts)
    total = sum(counts)
    if total <= 0:
        raise ValueError("counts must contain at least one ball")
    out = []
    for c in range(spec.color_count):
        if counts[c] == 0:
            continue
        nxt = tuple(counts[j] + spec.deltas[c][j] for j in range(spec.color_count))
        out.append((nxt, Fraction(counts[c], total)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Gaussian limits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UrnGaussianLimit:
    """Covariance matrix of ``(N_n - centering*n)/sqrt(n)`` in the limit,
    with the per-step centering rates, all exact."""

    covariance: tuple[tuple[Fraction, ...], ...]
    centering: tuple[Fraction, ...]

    def to_json_dict(self) -> dict:
        return {
            "covariance": [[str(x) for x in row] for row in self.covariance],
            "covarianceFloat": [[float(x) for x in row] for row in self.covariance],
            "centering": [str(x) for x in self.centering],
            "centeringFloat": [float(x) for x in self.centering],
        }


def urn_a_covariance(q: int) -> UrnGaussianLimit:
    """Limit of the symmetric draw-and-discard urn with ``q >= 2`` colours:
    covariance ``(q-1)(q*delta_ij - 1) / (q^2 (q+1))``, centering ``(q-1)/q``.

    >>> urn_a_covariance(3).covariance[0][:2]
    (Fraction(1, 9), Fraction(-1, 18))
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    cov = tuple(
        tuple(
            Fraction((q - 1) * ((q if i == j else 0) - 1), q * q * (q + 1))
            for j in range(q)
        )
        for i in range(q)
    )
    return UrnGaussianLimit(cov, (Fraction(q - 1, q),) * q)


def fixed_addition_covariance(s: Sequence[int]) -> UrnGaussianLimit:
    """Limit of the fixed-addition urn: with ``S = sum(s)``, covariance
    ``((S-1)/(S+1)) * (s_i delta_ij / S - s_i s_j / S^2)`` and centering
    ``s_i (S-1)/S``."""
    s = tuple(int(x) for x in s)
    total = sum(s)
    if any(x < 0 for x in s) or total < 2:
        raise ValueError("need s_i >= 0 and sum(s) >= 2")
    q = len(s)
    factor = Fraction(total - 1, total + 1)
    cov = tuple(
        tuple(
            factor * (Fraction(s[i], total) * (1 if i == j else 0) - Fraction(s[i] * s[j], total * total))
            for j in range(q)
        )
        for i in range(q)
    )
    centering = tuple(Fraction(x * (total - 1), total) for x in s)
    return UrnGaussianLimit(cov, centering)


# ---------------------------------------------------------------------------
# nested block urns
# ---------------------------------------------------------------------------


def nested_block_urns(k: int, n: int, seed=None) -> tuple[int, ...]:
    """Label-ordered block sizes of a random k-Stirling permutation of order
    n, grown through the nested Polya urn dynamics.

    Step ``i -> i+1`` picks one of the ``k*i + 1`` gaps uniformly: a gap
    strictly inside block ``m`` grows that block by k, any of the ``s+1``
    outside gaps starts a new block of size k.
    """
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    rng = as_generator(seed)
    sizes = [k]
    for order in range(1, n):
        u = int(rng.integers(0, k * order + 1))
        acc = 0
        grown = False
        for i, size in enumerate(sizes):
            acc += size - 1  # interior gaps of block i
            if u < acc:
                sizes[i] += k
                grown = True
                break
        if not grown:
            sizes.append(k)
    return tuple(sizes)


def sample_block_size_stats(k: int, n: int, replicates: int, rng=None) -> np.ndarray:
    """Vectorised sampler of (first block size, largest block size, block
    count) over many replicates, exact in law.

    Uses the beta-binomial marginal of each nested Polya urn: with ``N_1 =
    n`` and level ``m`` holding ``N_m`` labels, draw ``p_m ~ Beta((k-1)/k,
    (m+1)/k)`` and ``J_m ~ Binomial(N_m - 1, p_m)``; then block ``m`` has
    size ``k (J_m + 1)`` and ``N_{m+1} = N_m - 1 - J_m``.
    """
    if k < 2:
        raise ValueError("the beta-binomial chain needs k >= 2")
    if n < 1 or replicates < 1:
        raise ValueError("need n >= 1 and replicates >= 1")
    rng = as_generator(rng)
    res = np.zeros((replicates, 3), dtype=np.float64)
    remaining = np.full(replicates, n, dtype=np.int64)
    first = np.zeros(replicates, dtype=np.int64)
    largest = np.zeros(replicates, dtype=np.int64)
    count = np.zeros(replicates, dtype=np.int64)
    level = 1
    while True:
        active = remaining >= 1
        if not active.any():
            break
        p = rng.beta((k - 1) / k, (level + 1) / k, size=replicates)
        trials = np.maximum(remaining - 1, 0)
        j = rng.binomial(trials, p)
        size = np.where(active, k * (j + 1), 0)
        if level == 1:
            first = size.copy()
        largest = np.maximum(largest, size)
        count += active
        remaining = np.where(active, remaining - 1 - j, 0)
        level += 1
    res[:, 0] = first
    res[:, 1] = largest
    res[:, 2] = count
    return res
