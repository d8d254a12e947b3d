"""Pure-Python lattice kernels: basis reduction and short-vector enumeration.

This is the fallback twin of the compiled extension ``_speedups``.  Basis rows
are Python integers (arbitrary precision, no overflow); the Gram-Schmidt data
driving both algorithms is floating point, with every accept decision redeemed
by an exact integer norm computation, so the returned squared norms are exact
regardless of float round-off.  Pruning bounds are inflated so no vector below
the requested radius can be lost to rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import NodeBudgetExceeded, PrecisionError

BACKEND_NAME = "pure"

# Relative inflation applied to all float pruning bounds; orders of magnitude
# above accumulated round-off at the supported sizes, orders below 1 so no
# spurious exact-norm candidates survive.
_BOUND_SLACK = 1e-9

_MAX_LLL_LOOPS = 1_000_000


def _gram(rows: list[list[int]]) -> list[list[int]]:
    n = len(rows)
    return [
        [sum(x * y for x, y in zip(rows[i], rows[j])) for j in range(n)]
        for i in range(n)
    ]


def _gso(rows: list[list[int]]) -> tuple[list[list[float]], list[float]]:
    """Float Gram-Schmidt coefficients mu and squared norms B of the rows.

    Modified Gram-Schmidt in extended precision: cancellation happens on
    vector components before any squaring, which keeps the tiny orthogonal
    norms of near-triangular bases with one huge row accurate (a Gram/LDL
    route loses them entirely).  np.longdouble converts int64-scale entries
    exactly on x86.
    """
    n = len(rows)
    fr = np.array(rows, dtype=np.longdouble)
    star = np.zeros_like(fr)
    mu = np.zeros((n, n), dtype=np.longdouble)
    b = np.zeros(n, dtype=np.longdouble)
    for i in range(n):
        v = fr[i].copy()
        for j in range(i):
            mu[i, j] = (v @ star[j]) / b[j]
            v -= mu[i, j] * star[j]
        star[i] = v
        b[i] = v @ v
        if not b[i] > 0.0:
            raise PrecisionError("degenerate Gram-Schmidt norm")
    return mu.astype(float).tolist(), b.astype(float).tolist()


def _is_reduced(rows: list[list[int]], delta: float, slack: float = 1e-6) -> bool:
    mu, b = _gso(rows)
    n = len(rows)
    for i in range(n):
        for j in range(i):
            if abs(mu[i][j]) > 0.5 + slack:
                return False
    for k in range(1, n):
        if b[k] < (delta - mu[k][k - 1] ** 2 - slack) * b[k - 1]:
            return False
    return True


def lll_reduce_rows(rows: list[list[int]], delta: float = 0.99) -> list[list[int]]:
    """LLL-reduce integer basis rows in place (returns the same list).

    Row operations are exact integer arithmetic; the Lovasz condition and
    size reduction use float Gram-Schmidt data recomputed from the rows after
    every swap (incremental float updates amplify round-off through large
    reduction coefficients, which the entry sizes here make routine).  A
    final verification pass recomputes the data from scratch; failure raises
    PrecisionError so the caller can retry with exact arithmetic.
    """
    if not 0.25 < delta < 1.0:
        raise ValueError("delta must lie in (1/4, 1)")
    n = len(rows)
    if n == 1:
        return rows

    for _attempt in range(3):
        mu, b = _gso(rows)
        k = 1
        loops = 0
        while k < n:
            loops += 1
            if loops > _MAX_LLL_LOOPS:
                raise PrecisionError("reduction failed to terminate")
            for j in range(k - 1, -1, -1):
                if abs(mu[k][j]) > 0.5:
                    r = round(mu[k][j])
                    if abs(r) > 2**52:
                        raise PrecisionError("size-reduction coefficient overflow")
                    rows[k] = [x - r * y for x, y in zip(rows[k], rows[j])]
                    for i in range(j):
                        mu[k][i] -= r * mu[j][i]
                    mu[k][j] -= r
            if b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1]:
                k += 1
                continue
            rows[k - 1], rows[k] = rows[k], rows[k - 1]
            mu, b = _gso(rows)
            k = max(k - 1, 1)
        if _is_reduced(rows, delta):
            return rows
    raise PrecisionError("verification failed after repeated passes")


def lll_reduce_rows_exact(rows: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Textbook LLL with exact rational Gram-Schmidt data.

    Slow; used as the last-resort retry when the float path reports a
    precision failure.
    """
    n = len(rows)

    def exact_gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        star = [[Fraction(x) for x in row] for row in rows]
        b = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = sum(
                    Fraction(x) * y for x, y in zip(rows[i], star[j])
                ) / b[j]
                star[i] = [x - mu[i][j] * y for x, y in zip(star[i], star[j])]
            b[i] = sum(x * x for x in star[i])
            if b[i] == 0:
                raise ValueError("rows are linearly dependent")
        return mu, b

    mu, b = exact_gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            if abs(mu[k][j]) > Fraction(1, 2):
                r = round(mu[k][j])
                rows[k] = [x - r * y for x, y in zip(rows[k], rows[j])]
                mu, b = exact_gso()
        if b[k] >= (delta - mu[k][k - 1] ** 2) * b[k - 1]:
            k += 1
        else:
            rows[k - 1], rows[k] = rows[k], rows[k - 1]
            mu, b = exact_gso()
            k = max(k - 1, 1)
    return rows


def enumerate_sqnorms(
    rows: list[list[int]], radius_sq: int, max_nodes: int = 10_000_000
) -> list[int]:
    """Exact squared norms of all nonzero lattice vectors with norm^2 <=
    radius_sq, one representative per antipodal pair, sorted ascending.

    Depth-first search over coefficient vectors guided by float Gram-Schmidt
    data of the (preferably reduced) basis; each candidate leaf is re-checked
    with an exact integer quadratic form, and the float pruning bound is
    inflated so the enumeration provably misses nothing below the radius.
    Antipodal deduplication keeps the representative whose highest-index
    nonzero coefficient is positive.
    """
    if radius_sq < 0:
        raise ValueError("radius_sq must be nonnegative")
    n = len(rows)
    gram = _gram(rows)
    mu, b = _gso(rows)
    bound = radius_sq * (1.0 + _BOUND_SLACK) + _BOUND_SLACK

    results: list[int] = []
    u = [0] * n
    nodes = 0

    def exact_norm() -> int:
        total = 0
        for i in range(n):
            ui = u[i]
            if ui:
                gi = gram[i]
                total += ui * ui * gi[i]
                for j in range(i):
                    if u[j]:
                        total += 2 * ui * u[j] * gi[j]
        return total

    def descend(level: int, rho: float, zero_above: bool) -> None:
        nonlocal nodes
        center = 0.0
        for i in range(level + 1, n):
            if u[i]:
                center += u[i] * mu[i][level]
        slack = bound - rho
        if slack < 0.0:
            return
        width = math.sqrt(slack / b[level]) if b[level] > 0 else 0.0
        lo = math.ceil(-center - width)
        hi = math.floor(-center + width)
        if zero_above and lo < 0:
            lo = 0
        for uj in range(lo, hi + 1):
            nodes += 1
            if nodes > max_nodes:
                raise NodeBudgetExceeded(sorted(results), max_nodes)
            d = uj + center
            rho_here = rho + d * d * b[level]
            if rho_here > bound:
                continue
            u[level] = uj
            if level == 0:
                if not (zero_above and uj == 0):
                    q = exact_norm()
                    if 0 < q <= radius_sq:
                        results.append(q)
            else:
                descend(level - 1, rho_here, zero_above and uj == 0)
        u[level] = 0

    descend(n - 1, 0.0, True)
    results.sort()
    return results
