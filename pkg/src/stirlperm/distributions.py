"""Exact and asymptotic distributions for block counts and block sizes.

``S_n`` denotes the number of blocks of a uniformly random k-Stirling
permutation of order n.  All finite-n quantities are exact rationals built
from generalized binomial coefficients; the limit quantities (moments and
density of the scaled block count, stick-breaking law of the scaled block
sizes) are floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._rng import as_generator

ExactRational = Fraction


class ConvergenceError(ArithmeticError):
    """Series failed to reach the stopping tolerance within the term cap."""


def rational_binomial(a, n: int) -> Fraction:
    """Generalized binomial coefficient ``binom(a, n)`` for rational ``a``.

    >>> rational_binomial(Fraction(5, 2), 2)
    Fraction(15, 8)
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    a = Fraction(a)
    prod = Fraction(1)
    for i in range(n):
        prod *= a - i
    return prod / math.factorial(n)


# ---------------------------------------------------------------------------
# block-count distribution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PmfTable:
    """Exact distribution of the block count ``S_n``: ``prob(m)`` for m=1..n."""

    n: int
    k: int
    probabilities: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if sum(self.probabilities, Fraction(0)) != 1:
            raise ValueError("probabilities must sum to one")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("probabilities must be non-negative")

    def prob(self, m: int) -> Fraction:
        if not 1 <= m <= self.n:
            return Fraction(0)
        return self.probabilities[m - 1]

    def support(self) -> range:
        return range(1, self.n + 1)

    def to_rows(self) -> list[tuple[int, int, int, float]]:
        return [
            (m, p.numerator, p.denominator, float(p))
            for m, p in zip(self.support(), self.probabilities)
        ]


def block_count_pmf(n: int, k: int) -> PmfTable:
    """Exact PMF of the number of blocks of a random k-Stirling permutation:

    ``P{S_n = m} = sum_{l=0}^{m} binom(m, l) (-1)^l binom(n - l/k - 1, n)
    / binom(n + 1/k - 1, n)``.

    >>> block_count_pmf(2, 2).prob(1)
    Fraction(1, 3)
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    denom = rational_binomial(n + Fraction(1, k) - 1, n)
    probs = []
    for m in range(1, n + 1):
        p = Fraction(0)
        for l in range(m + 1):
            p += (
                math.comb(m, l)
                * (-1) ** l
                * rational_binomial(n - Fraction(l, k) - 1, n)
            )
        probs.append(p / denom)
    return PmfTable(n, k, tuple(probs))


def block_binomial_moment(n: int, k: int, r: int) -> Fraction:
    """Exact binomial moment ``E binom(S_n + r, r)``.

    Two equivalent closed forms are evaluated and must agree:
    ``binom(n-1+(r+1)/k, n) / binom(n-1+1/k, n)`` and
    ``(r+1) binom(n-1+(r+1)/k, n-1) / binom(n-1+1/k, n-1)``.

    >>> block_binomial_moment(2, 2, 1)
    Fraction(8, 3)
    """
    if n < 1 or k < 1 or r < 0:
        raise ValueError("need n >= 1, k >= 1, r >= 0")
    top = n - 1 + Fraction(r + 1, k)
    bottom = n - 1 + Fraction(1, k)
    first = rational_binomial(top, n) / rational_binomial(bottom, n)
    second = (r + 1) * rational_binomial(top, n - 1) / rational_binomial(bottom, n - 1)
    if first != second:
        raise AssertionError("the two closed forms for the binomial moment disagree")
    return first


def block_binomial_moment_float(n: int, k: int, r: int) -> float:
    """Floating-point ``E binom(S_n + r, r)`` via log-gamma, for n far beyond
    the range where exact rational products are practical."""
    if n < 1 or k < 1 or r < 0:
        raise ValueError("need n >= 1, k >= 1, r >= 0")
    return math.exp(
        math.lgamma(n + (r + 1) / k)
        + math.lgamma(1 / k)
        - math.lgamma(n + 1 / k)
        - math.lgamma((r + 1) / k)
    )


def block_count_mean(n: int, k: int) -> Fraction:
    """Exact ``E S_n`` (first binomial moment minus one)."""
    return block_binomial_moment(n, k, 1) - 1


def martingale_scaling(n: int, k: int) -> Fraction:
    """Prefactor ``binom(n-1+1/k, n-1) / binom(n-1+2/k, n-1)`` that turns
    ``S_n + 1`` into a martingale."""
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    return rational_binomial(n - 1 + Fraction(1, k), n - 1) / rational_binomial(
        n - 1 + Fraction(2, k), n - 1
    )


# ---------------------------------------------------------------------------
# mean statistic profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeanProfile:
    """Exact means of the statistics of a random k-Stirling permutation of
    order n, together with the matching tree-side slot means.

    ``j_ascent_mean`` applies to every j-ascent count with 1 <= j <= k and
    equals the j-descent means; ``j_plateau_mean`` applies for 1 <= j < k.
    ``interior_mean``/``exterior_mean`` are the per-slot means of a random
    (k+1)-ary increasing tree of order n.
    """

    n: int
    k: int
    ascents_mean: Fraction
    descents_mean: Fraction
    plateaux_mean: Fraction
    j_ascent_mean: Fraction
    j_plateau_mean: Fraction
    interior_mean: Fraction
    exterior_mean: Fraction

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "ascents": str(self.ascents_mean),
            "descents": str(self.descents_mean),
            "plateaux": str(self.plateaux_mean),
            "jAscent": str(self.j_ascent_mean),
            "jPlateau": str(self.j_plateau_mean),
            "interiorBySlot": str(self.interior_mean),
            "exteriorBySlot": str(self.exterior_mean),
            "floats": {
                "ascents": float(self.ascents_mean),
                "descents": float(self.descents_mean),
                "plateaux": float(self.plateaux_mean),
                "jAscent": float(self.j_ascent_mean),
                "jPlateau": float(self.j_plateau_mean),
            },
        }


def mean_profile(n: int, k: int) -> MeanProfile:
    """Exact means: ``E X_n = E Y_n = (kn+1)/(k+1)``, ``E Z_n =
    (k-1)(kn+1)/(k+1)``, refined means ``(n-1)/(k+1)`` per interior slot and
    ``(kn+1)/(k+1)`` per exterior slot.

    >>> mean_profile(2, 2).ascents_mean
    Fraction(5, 3)
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    exterior = Fraction(k * n + 1, k + 1)
    interior = Fraction(n - 1, k + 1)
    return MeanProfile(
        n=n,
        k=k,
        ascents_mean=exterior,
        descents_mean=exterior,
        plateaux_mean=(k - 1) * exterior,
        j_ascent_mean=interior,
        j_plateau_mean=exterior,
        interior_mean=interior,
        exterior_mean=exterior,
    )


# ---------------------------------------------------------------------------
# limit law of the scaled block count
# ---------------------------------------------------------------------------


def zeta_moment(k: int, r: float) -> float:
    """Moments of the limit ``zeta`` of ``n^{-1/k} S_n``:
    ``E zeta^r = Gamma(r+2) Gamma(1 + 1/k) / Gamma(1 + (r+1)/k)``.

    >>> round(zeta_moment(2, 2), 12)
    4.0
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if r < 0:
        raise ValueError("r must be >= 0")
    return math.exp(
        math.lgamma(r + 2) + math.lgamma(1 + 1 / k) - math.lgamma(1 + (r + 1) / k)
    )


class DensityValue(NamedTuple):
    value: float
    error_estimate: float


def zeta_density(k: int, x: float, term_cap: int = 500) -> DensityValue:
    """Density of the block-count limit at ``x > 0`` for ``k >= 2``:

    ``f(x) = (Gamma(1/k)/pi) sum_{j>=1} (-1)^{j-1} Gamma(j/k + 1)
    sin(pi j / k) x^j / j!``.

    Terms with ``k | j`` vanish exactly.  Summation stops once a term drops
    below ``1e-15`` of the partial sum in absolute value.  The error
    estimate combines the first omitted term with a cancellation bound of
    ``1e-14`` times the sum of absolute term values; for large ``x`` the
    alternating terms grow huge before decaying and the cancellation bound
    can dwarf the returned value, so callers should trust the result only
    when ``error_estimate`` is small relative to it.  Raises
    :class:`ConvergenceError` if the term cap is hit first.
    """
    if k < 2:
        raise ValueError("the series form of the density needs k >= 2")
    if x < 0:
        raise ValueError("x must be non-negative")
    if term_cap < 1:
        raise ValueError("term_cap must be >= 1")
    if x == 0:
        return DensityValue(0.0, 0.0)
    prefactor = math.exp(math.lgamma(1 / k)) / math.pi
    log_x = math.log(x)

    def magnitude(j: int) -> float:
        return math.exp(math.lgamma(j / k + 1) - math.lgamma(j + 1) + j * log_x)

    total = 0.0
    absolute = 0.0
    for j in range(1, term_cap + 1):
        if j % k == 0:
            continue
        mag = magnitude(j)
        sine = math.sin(math.pi * (j % (2 * k)) / k)
        total += (-1) ** (j - 1) * sine * mag
        absolute += mag
        if j > 1 and mag <= 1e-15 * abs(total):
            error = magnitude(j + 1) + 1e-14 * absolute
            return DensityValue(prefactor * total, prefactor * error)
    raise ConvergenceError(
        f"density series did not reach tolerance within {term_cap} terms at x={x}"
    )


# ---------------------------------------------------------------------------
# stick breaking / block-size limits
# ---------------------------------------------------------------------------


class StickBreakingSample(NamedTuple):
    """One draw of the stick-breaking limit of the label-ordered scaled block
    sizes: ``components[m-1] = beta_m * prod_{i<m} (1 - beta_i)`` with
    independent ``beta_m ~ Beta((k-1)/k, (m+1)/k)``; ``remainder`` is the
    unallocated mass after ``depth`` levels."""

    components: tuple[float, ...]
    remainder: float


def stick_breaking_sample(k: int, depth: int, seed=None) -> StickBreakingSample:
    """Sample the first ``depth`` stick-breaking components for parameter k.

    The decreasing rearrangement of the full sequence follows the
    Poisson--Dirichlet law PD(1/k, 1/k).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = as_generator(seed)
    levels = np.arange(1, depth + 1)
    betas = rng.beta((k - 1) / k, (levels + 1) / k)
    stick = np.cumprod(1.0 - betas)
    components = betas * np.concatenate(([1.0], stick[:-1]))
    return StickBreakingSample(tuple(float(c) for c in components), float(stick[-1]))


def tnormal_covariance(k: int) -> tuple[tuple[Fraction, ...], ...]:
    """Exact covariance matrix of the Gaussian limit of the centered and
    scaled (ascents, descents, plateaux) vector of a random k-Stirling
    permutation, in that row order.

    >>> tnormal_covariance(2)[0]
    (Fraction(1, 9), Fraction(-1, 18), Fraction(-1, 18))
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    den = (k + 1) ** 2 * (k + 2)
    var_xy = Fraction(k * k, den)
    cov_xy = Fraction(-k, den)
    cov_xz = Fraction(-k * (k - 1), den)
    var_z = Fraction(2 * k * (k - 1), den)
    return (
        (var_xy, cov_xy, cov_xz),
        (cov_xy, var_xy, cov_xz),
        (cov_xz, cov_xz, var_z),
    )
