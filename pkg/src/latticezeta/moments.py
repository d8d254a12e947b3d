"""Closed-form moment formulas for truncated inverse-power sums.

Two parallel evaluation routes exist for every moment order:

* a partition sum over set partitions of {1..k} (the point-process side), and
* a composition/matrix sum (the lattice-limit side).

The two routes are equal as functions of the truncation level ``delta``; the
test suite asserts that equality exactly in rational arithmetic.  Exact mode
represents a value as a finite sum  sum_e  A_e * delta**e  with rational
coefficients A_e and rational exponents e (see :class:`PowerSum`); since
distinct real powers of delta are linearly independent, equality of two such
sums as functions of delta > 0 is equality of their coefficient maps.

Float mode computes powers in log space once exponents get large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .combinatorics import (
    MAX_PARTITION_K,
    Composition,
    enumerate_compositions,
    enumerate_set_partitions,
    enumerate_signed_matrices,
)

# Exponent magnitude beyond which float powers switch to exp/log evaluation.
_LOG_SPACE_EXPONENT = 64.0

# Moment orders above this enumerate too many partitions to be useful.
MAX_MOMENT_ORDER = MAX_PARTITION_K


@dataclass(frozen=True)
class MomentParams:
    """Validated parameter bundle for moment evaluations."""

    c: float
    delta: float
    k: int = 1

    def __post_init__(self):
        _check_domain(self.c, self.delta)
        if not 1 <= self.k <= MAX_MOMENT_ORDER:
            raise ValueError(f"moment order must be in [1, {MAX_MOMENT_ORDER}]")


@dataclass(frozen=True)
class FiniteNParams:
    """Parameters for the exact finite-dimension variance series."""

    n: int
    c: float
    delta: float
    series_cut: int | None = None  # None: derived from tol via the tail bound
    tol: float = 1e-9

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("variance series converges only for n >= 3")
        _check_domain(self.c, self.delta)
        if self.tol <= 0:
            raise ValueError("tol must be positive")


def _check_domain(c, delta) -> None:
    if not c > Fraction(1, 2):
        raise ValueError("c must exceed 1/2")
    if not delta > 0:
        raise ValueError("delta must be positive")


def _pow(base: float, exponent: float) -> float:
    """base**exponent for base > 0, via exp/log for large exponents."""
    if base <= 0:
        raise ValueError("base must be positive")
    if abs(exponent) > _LOG_SPACE_EXPONENT:
        return math.exp(exponent * math.log(base))
    return base**exponent


class PowerSum:
    """Finite sum of rational multiples of rational powers of delta."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Fraction, Fraction] | None = None):
        self.terms: dict[Fraction, Fraction] = {}
        for e, a in (terms or {}).items():
            if a != 0:
                self.terms[Fraction(e)] = (
                    self.terms.get(Fraction(e), Fraction(0)) + Fraction(a)
                )
        self.terms = {e: a for e, a in self.terms.items() if a != 0}

    @classmethod
    def single(cls, coefficient, exponent) -> "PowerSum":
        return cls({Fraction(exponent): Fraction(coefficient)})

    def __add__(self, other: "PowerSum") -> "PowerSum":
        merged = dict(self.terms)
        for e, a in other.terms.items():
            merged[e] = merged.get(e, Fraction(0)) + a
        return PowerSum(merged)

    def __sub__(self, other: "PowerSum") -> "PowerSum":
        return self + other.scale(-1)

    def __mul__(self, other: "PowerSum") -> "PowerSum":
        out: dict[Fraction, Fraction] = {}
        for e1, a1 in self.terms.items():
            for e2, a2 in other.terms.items():
                e = e1 + e2
                out[e] = out.get(e, Fraction(0)) + a1 * a2
        return PowerSum(out)

    def scale(self, factor) -> "PowerSum":
        return PowerSum({e: a * Fraction(factor) for e, a in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, PowerSum) and self.terms == other.terms

    def __repr__(self) -> str:
        parts = [
            f"{a}*d^({e})" for e, a in sorted(self.terms.items(), reverse=True)
        ]
        return "PowerSum(" + " + ".join(parts or ["0"]) + ")"

    def evaluate(self, delta: float) -> float:
        return math.fsum(
            float(a) * _pow(delta, float(e)) for e, a in self.terms.items()
        )


def _as_fraction(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"exact mode needs rational parameters, got {x!r}")


# ---------------------------------------------------------------------------
# Mean, variance, tail.
# ---------------------------------------------------------------------------


def mean_truncated(c: float, delta: float, upper: float | None = None) -> float:
    """Expected value of the delta-truncated functional: delta^(1-2c)/(2c-1).

    With ``upper`` set, returns the windowed expectation over (delta, upper],
    i.e. (delta^(1-2c) - upper^(1-2c)) / (2c-1).  Exact in the dimension: this
    identity holds at every n, not only in the limit.
    """
    _check_domain(c, delta)
    value = _pow(delta, 1 - 2 * c) / (2 * c - 1)
    if upper is not None:
        if upper <= delta:
            raise ValueError("upper window must exceed delta")
        value -= _pow(upper, 1 - 2 * c) / (2 * c - 1)
    return value


def mean_truncated_exact(c) -> PowerSum:
    c = _as_fraction(c)
    _check_domain(c, Fraction(1))
    return PowerSum.single(Fraction(1, 1) / (2 * c - 1), 1 - 2 * c)


def variance_limit(c: float, delta: float) -> float:
    """Limiting variance 2*delta^(1-4c)/(4c-1)."""
    _check_domain(c, delta)
    return 2 * _pow(delta, 1 - 4 * c) / (4 * c - 1)


def variance_limit_exact(c) -> PowerSum:
    c = _as_fraction(c)
    _check_domain(c, Fraction(1))
    return PowerSum.single(Fraction(2) / (4 * c - 1), 1 - 4 * c)


def tail_mean(c: float, cutoff: float) -> float:
    """Expected mass beyond the cutoff: cutoff^(1-2c)/(2c-1).

    Same integral as the truncated mean with the cutoff as lower limit; used
    everywhere a finite horizon or enumeration cutoff discards points.
    """
    return mean_truncated(c, cutoff)


def zeta_direct(n: int, tol: float = 1e-12) -> float:
    """zeta(n) by direct summation, remainder bounded by int_M^inf x^-n dx."""
    if n < 2:
        raise ValueError("needs n >= 2")
    total = 0.0
    m = 1
    while True:
        total += float(m) ** (-n)
        # Remaining tail is below M^(1-n)/(n-1).
        if m ** (1 - n) / (n - 1) < tol:
            return total
        m += 1


def variance_exact(p: FiniteNParams) -> float:
    """Variance of the truncated normalized zeta value at finite dimension n.

    Evaluates  (2 delta^(1-4c) / (zeta(n) (4c-1))) * S  where

        S = sum_{d1,d2 >= 1} min(d1,d2)^(n(2c-1)) * max(d1,d2)^(-2cn).

    Truncation: group terms by M = max(d1, d2).  The diagonal term is M^-n and
    the off-diagonal ones total 2 sum_{d<M} d^(n(2c-1)) M^(-2cn)
    <= 2 M * M^(n(2c-1)) M^(-2cn) = 2 M^(1-n), so the contribution of level M
    is at most 3 M^(1-n) and the tail beyond M = D is at most
    3 D^(2-n) / (n-2) for n >= 3.  ``series_cut`` is the smallest D making
    that bound (times the positive prefactor) smaller than ``tol``.
    """
    n, c, delta = p.n, p.c, p.delta
    prefactor = 2 * _pow(delta, 1 - 4 * c) / (4 * c - 1)  # zeta(n) >= 1 omitted
    cut = p.series_cut
    if cut is None:
        cut = 2
        while prefactor * 3 * cut ** (2 - n) / (n - 2) >= p.tol:
            cut += 1
            if cut > 10**6:
                raise ValueError("tolerance unreachable for these parameters")
    a = n * (2 * c - 1)
    total = 0.0
    for d1 in range(1, cut + 1):
        for d2 in range(1, cut + 1):
            lo, hi = min(d1, d2), max(d1, d2)
            total += _pow(float(lo), a) * _pow(float(hi), -2 * c * n)
    return prefactor * total / zeta_direct(n, tol=min(p.tol, 1e-12))


# ---------------------------------------------------------------------------
# Partition-sum moments (point-process side).
# ---------------------------------------------------------------------------


def _block_integral(weight: float, delta: float, upper: float | None) -> float:
    """int_delta^upper x^(-2w) dx for a block weight w > 1/2 (w is c * block
    size for equal exponents, or the block's summed gamma for mixed ones)."""
    expo = 1 - 2 * weight
    value = _pow(delta, expo) / (-expo)
    if upper is not None:
        value -= _pow(upper, expo) / (-expo)
    return value


def poisson_moment(
    k: int, c: float, delta: float, upper: float | None = None
) -> float:
    """k-th moment of the truncated functional, as a sum over set partitions:

        2^k * sum_P 2^(-#P) * prod_{B in P} int_delta^inf x^(-2c#B) dx.

    ``upper`` windows every block integral at a finite horizon, giving the
    exact moment of the horizon-limited functional.
    """
    _check_domain(c, delta)
    if not 1 <= k <= MAX_MOMENT_ORDER:
        raise ValueError(f"k must be in [1, {MAX_MOMENT_ORDER}]")
    if upper is not None and upper <= delta:
        raise ValueError("upper window must exceed delta")
    total = 0.0
    for partition in enumerate_set_partitions(k):
        prod = 2.0 ** (k - partition.num_blocks)
        for size in partition.block_sizes():
            prod *= _block_integral(c * size, delta, upper)
        total += prod
    return total


def poisson_moment_exact(k: int, c) -> PowerSum:
    c = _as_fraction(c)
    _check_domain(c, Fraction(1))
    total = PowerSum()
    for partition in enumerate_set_partitions(k):
        term = PowerSum.single(Fraction(2) ** (k - partition.num_blocks), 0)
        for size in partition.block_sizes():
            term = term * PowerSum.single(
                Fraction(1) / (2 * c * size - 1), 1 - 2 * c * size
            )
        total = total + term
    return total


def _check_gammas(gammas) -> tuple:
    gammas = tuple(gammas)
    if not gammas:
        raise ValueError("gammas must be nonempty")
    if len(gammas) > MAX_MOMENT_ORDER:
        raise ValueError(f"at most {MAX_MOMENT_ORDER} exponents supported")
    if any(not g > Fraction(1, 2) for g in gammas):
        raise ValueError("every exponent must exceed 1/2")
    if any(a > b for a, b in zip(gammas, gammas[1:])):
        raise ValueError("exponents must be nondecreasing")
    return gammas


def poisson_mixed_moment(
    gammas, delta: float, upper: float | None = None
) -> float:
    """Joint moment E[prod_j X(gamma_j)], partition sum with block weights
    B_gamma = sum_{j in B} gamma_j."""
    gammas = _check_gammas(gammas)
    if delta <= 0:
        raise ValueError("delta must be positive")
    kappa = len(gammas)
    total = 0.0
    for partition in enumerate_set_partitions(kappa):
        prod = 2.0 ** (kappa - partition.num_blocks)
        for block in partition.blocks:
            weight = sum(float(gammas[j - 1]) for j in block)
            prod *= _block_integral(weight, delta, upper)
        total += prod
    return total


def poisson_mixed_moment_exact(gammas) -> PowerSum:
    gammas = tuple(_as_fraction(g) for g in gammas)
    _check_gammas(gammas)
    kappa = len(gammas)
    total = PowerSum()
    for partition in enumerate_set_partitions(kappa):
        term = PowerSum.single(Fraction(2) ** (kappa - partition.num_blocks), 0)
        for block in partition.blocks:
            weight = sum(gammas[j - 1] for j in block)
            term = term * PowerSum.single(
                Fraction(1) / (2 * weight - 1), 1 - 2 * weight
            )
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Composition/matrix-sum moments (lattice-limit side).
# ---------------------------------------------------------------------------


def _composition_coefficient(parts: Composition) -> int:
    """Number of support patterns: prod_{i<m} C(k - k_1 - .. - k_{i-1} - 1, k_i - 1)."""
    coeff = 1
    used = 0
    for i in range(parts.m - 1):
        coeff *= math.comb(parts.k - used - 1, parts.parts[i] - 1)
        used += parts.parts[i]
    return coeff


def limit_moment(k: int, c: float, delta: float) -> float:
    """Limit of the k-th lattice-side moment, as a composition sum:

        sum_{m=1}^{k} sum_{(k_1..k_m) |= k} 2^(k-m)
            * prod_{i<m} C(k - k_1 - ... - k_{i-1} - 1, k_i - 1)
            * delta^(m - 2kc) * prod_i 1/(2 k_i c - 1).

    Valid for k = 1 as well, where it reduces to the truncated mean.
    """
    _check_domain(c, delta)
    if not 1 <= k <= MAX_MOMENT_ORDER:
        raise ValueError(f"k must be in [1, {MAX_MOMENT_ORDER}]")
    total = 0.0
    for parts in enumerate_compositions(k):
        m = parts.m
        term = 2.0 ** (k - m) * _composition_coefficient(parts)
        term *= _pow(delta, m - 2 * k * c)
        for ki in parts.parts:
            term /= 2 * ki * c - 1
        total += term
    return total


def limit_moment_exact(k: int, c) -> PowerSum:
    c = _as_fraction(c)
    _check_domain(c, Fraction(1))
    total = PowerSum()
    for parts in enumerate_compositions(k):
        m = parts.m
        coeff = Fraction(2) ** (k - m) * _composition_coefficient(parts)
        for ki in parts.parts:
            coeff /= 2 * ki * c - 1
        total = total + PowerSum.single(coeff, m - 2 * k * c)
    return total


def _signed_matrix_terms(kappa: int):
    """All admissible signed matrices for every composition of kappa with
    m <= kappa - 1 parts, yielding (m, row support index lists)."""
    for parts in enumerate_compositions(kappa):
        if parts.m == kappa:
            continue
        for matrix in enumerate_signed_matrices(parts):
            supports = [
                [j for j, e in enumerate(row) if e != 0] for row in matrix.entries
            ]
            yield parts.m, supports


def limit_mixed_moment(gammas, delta: float) -> float:
    """Limit of the joint lattice-side moment:

        prod_j delta^(1-2 gamma_j)/(2 gamma_j - 1)
        + sum_{signed matrices D} delta^(m - 2 sum gamma)
            * prod_i 1/(2 Gamma_i(D) - 1),

    where Gamma_i(D) sums the gamma_j over columns with nonzero entry in
    row i.
    """
    gammas = _check_gammas(gammas)
    if delta <= 0:
        raise ValueError("delta must be positive")
    kappa = len(gammas)
    if kappa == 1:
        return mean_truncated(float(gammas[0]), delta)
    gsum = sum(float(g) for g in gammas)
    total = 1.0
    for g in gammas:
        total *= mean_truncated(float(g), delta)
    for m, supports in _signed_matrix_terms(kappa):
        term = _pow(delta, m - 2 * gsum)
        for support in supports:
            row_weight = sum(float(gammas[j]) for j in support)
            term /= 2 * row_weight - 1
        total += term
    return total


def limit_mixed_moment_exact(gammas) -> PowerSum:
    gammas = tuple(_as_fraction(g) for g in gammas)
    _check_gammas(gammas)
    kappa = len(gammas)
    if kappa == 1:
        return mean_truncated_exact(gammas[0])
    gsum = sum(gammas)
    total = PowerSum.single(Fraction(1), 0)
    for g in gammas:
        total = total * mean_truncated_exact(g)
    for m, supports in _signed_matrix_terms(kappa):
        coeff = Fraction(1)
        for support in supports:
            row_weight = sum(gammas[j] for j in support)
            coeff /= 2 * row_weight - 1
        total = total + PowerSum.single(coeff, m - 2 * gsum)
    return total


# ---------------------------------------------------------------------------
# Moment-generating-function ratio bound.
# ---------------------------------------------------------------------------


def moment_ratio_bound(k: int, c: float, delta: float) -> tuple[float, float]:
    """Ratio of consecutive scaled moments and its closed-form majorant.

    Returns (ratio, bound) with

        ratio = M_{k+1} / ((k+1) M_k)
        bound = (2/(k+1)) * (delta^(1-2c) / (2(2c-1)) + k * delta^(-2c)).

    The bound dominating the ratio for every k is what makes the moment
    sequence determine the distribution (positive radius of convergence of the
    moment generating function).
    """
    _check_domain(c, delta)
    if not 1 <= k + 1 <= MAX_MOMENT_ORDER:
        raise ValueError(f"k must be in [1, {MAX_MOMENT_ORDER - 1}]")
    ratio = poisson_moment(k + 1, c, delta) / ((k + 1) * poisson_moment(k, c, delta))
    bound = (2.0 / (k + 1)) * (
        _pow(delta, 1 - 2 * c) / (2 * (2 * c - 1)) + k * _pow(delta, -2 * c)
    )
    return ratio, bound
