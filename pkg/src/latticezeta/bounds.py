"""Symmetrized-kernel integrals, their exponential decay in the dimension,
the minor-determinant bound for admissible-matrix integrals, and Monte Carlo
spot checks of the symmetrization inequality.

The radially nonincreasing rearrangement of the truncated power kernel
|x|^(-2cn) 1(|x| > R_n(delta)) is  (|x|^n + R_n(delta)^n)^(-2c); products of
such factors over two vectors reduce, in spherical coordinates, to a
three-dimensional integral whose value decays exponentially with n.  All
integrands are evaluated in log space: for large n the mass concentrates
sharply and the values fall below double-precision range mid-computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .combinatorics import AdmissibleMatrix
from .seeding import trial_rng
from .zeta import truncation_radius, unit_ball_volume_log


@dataclass(frozen=True)
class KernelIntegralSpec:
    """Dimension, exponent parameter, truncation level, and factor exponents."""

    n: int
    c: float
    delta: float
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be at least 2")
        if not self.c > 0.5:
            raise ValueError("c must exceed 1/2")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if len(self.exponents) not in (3, 4) or any(e < 1 for e in self.exponents):
            raise ValueError("need 3 or 4 positive integer exponents")

    @property
    def total(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True)
class QuadConfig:
    start_nodes: int = 32
    max_nodes: int = 512
    rtol: float = 1e-6


class QuadratureError(RuntimeError):
    """Refinement hit the node cap; carries the last achieved tolerance."""

    def __init__(self, achieved: float, requested: float):
        super().__init__(
            f"quadrature reached {achieved:.2e} relative change, "
            f"requested {requested:.2e}"
        )
        self.achieved = achieved
        self.requested = requested


def symmetrized_kernel(norm_x: float, n: int, c: float, delta: float) -> float:
    """(|x|^n + R_n(delta)^n)^(-2c), evaluated in log space.

    Equals the kernel's supremum (R_n(delta)^(-2cn)) at the origin and decays
    like |x|^(-2cn); nonincreasing in |x|.
    """
    if norm_x < 0:
        raise ValueError("norm must be nonnegative")
    log_rn = math.log(delta) - unit_ball_volume_log(n)  # log R^n
    if norm_x == 0:
        return math.exp(-2.0 * c * log_rn)
    return math.exp(-2.0 * c * np.logaddexp(n * math.log(norm_x), log_rn))


def _log_prefactor(n: int, c: float, delta: float, total: int) -> float:
    # omega_n omega_{n-1} n^-2 V_n^-2 delta^(2 - 2*l*c)
    #   = ((n-1)/n) (V_{n-1}/V_n) delta^(2 - 2*l*c)
    return (
        math.log(n - 1)
        - math.log(n)
        + unit_ball_volume_log(n - 1)
        - unit_ball_volume_log(n)
        + (2.0 - 2.0 * total * c) * math.log(delta)
    )


def _log_integrand(spec: KernelIntegralSpec, t1, t2, w):
    """Log integrand on the unit cube after r/R = s = t/(1-t), phi = pi*w.

    In the rescaled radius variables v_i = (r_i / R)^n = s_i^n the factors are
    (v_i + 1)^(-2 l_i c) and the cross factors (g^(n/2) + 1)^(-2 l c) with
    g = s_1^2 + s_2^2 +- 2 s_1 s_2 cos(phi).  Substituting s (not v) keeps the
    integrand free of fractional powers, so Gauss-Legendre refinement
    converges exponentially; the stable forms (s1-s2)^2 + 4 s1 s2 cos^2(phi/2)
    and (s1-s2)^2 + 4 s1 s2 sin^2(phi/2) avoid cancellation near coincident
    radii.
    """
    n, c = spec.n, spec.c
    exps = spec.exponents
    s1 = t1 / (1.0 - t1)
    s2 = t2 / (1.0 - t2)
    phi = math.pi * w
    log_s1 = np.log(s1)
    log_s2 = np.log(s2)
    half = 0.5 * phi
    base = (s1 - s2) ** 2
    g_plus = base + 4.0 * s1 * s2 * np.cos(half) ** 2
    g_minus = base + 4.0 * s1 * s2 * np.sin(half) ** 2
    with np.errstate(divide="ignore"):
        log_gp = np.log(g_plus)
        log_gm = np.log(g_minus)
    out = (
        -2.0 * exps[0] * c * np.logaddexp(n * log_s1, 0.0)
        - 2.0 * exps[1] * c * np.logaddexp(n * log_s2, 0.0)
        - 2.0 * exps[2] * c * np.logaddexp(0.5 * n * log_gp, 0.0)
        + (n - 2) * np.log(np.sin(phi))
        # Jacobians: dv = n s^(n-1) dt/(1-t)^2 twice; dphi = pi dw is folded
        # in by the caller.
        + 2.0 * math.log(n)
        + (n - 1) * (log_s1 + log_s2)
        - 2.0 * np.log1p(-t1)
        - 2.0 * np.log1p(-t2)
    )
    if len(exps) == 4:
        out = out - 2.0 * exps[3] * c * np.logaddexp(0.5 * n * log_gm, 0.0)
    return out


def _tensor_log_sum(spec: KernelIntegralSpec, nodes: int) -> float:
    """log of the Gauss-Legendre tensor approximation of the cube integral.

    Evaluated in slabs along the first axis to bound peak memory at large
    node counts; slab results combine by log-sum-exp.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    lw = np.log(0.5 * w)
    slab = max(1, 2_000_000 // (nodes * nodes))
    peaks, sums = [], []
    for start in range(0, nodes, slab):
        stop = min(start + slab, nodes)
        t1 = t[start:stop][:, None, None]
        t2 = t[None, :, None]
        t3 = t[None, None, :]
        logf = _log_integrand(spec, t1, t2, t3)
        logf = logf + lw[start:stop, None, None] + lw[None, :, None] + lw[None, None, :]
        peak = float(np.max(logf))
        if math.isfinite(peak):
            peaks.append(peak)
            sums.append(float(np.sum(np.exp(logf - peak))))
    if not peaks:
        return -math.inf
    top = max(peaks)
    total = sum(s * math.exp(p - top) for p, s in zip(peaks, sums))
    return top + math.log(total) + math.log(math.pi)


def _sym_integral(spec: KernelIntegralSpec, quad: QuadConfig) -> float:
    log_pref = _log_prefactor(spec.n, spec.c, spec.delta, spec.total)
    nodes = quad.start_nodes
    prev = _tensor_log_sum(spec, nodes)
    achieved = math.inf
    while nodes * 2 <= quad.max_nodes:
        nodes *= 2
        cur = _tensor_log_sum(spec, nodes)
        achieved = abs(math.exp(prev - cur) - 1.0) if math.isfinite(cur) else math.inf
        if achieved <= quad.rtol:
            return math.exp(log_pref + cur)
        prev = cur
    raise QuadratureError(achieved, quad.rtol)


def sym_integral_four(spec: KernelIntegralSpec, quad: QuadConfig = QuadConfig()) -> float:
    """Integral over (x1, x2) of the four symmetrized factors at x1, x2,
    x1+x2, x1-x2 (with the V_n^(-2lc) normalization), by refinement-adaptive
    tensor quadrature of the spherical-coordinates form."""
    if len(spec.exponents) != 4:
        raise ValueError("four exponents required")
    return _sym_integral(spec, quad)


def sym_integral_three(spec: KernelIntegralSpec, quad: QuadConfig = QuadConfig()) -> float:
    """Same with three factors, at x1, x2, x1+x2."""
    if len(spec.exponents) != 3:
        raise ValueError("three exponents required")
    return _sym_integral(spec, quad)


def decay_envelope(n: int) -> float:
    """Reference decay shape sqrt(n) * (4/5)^(n/2) for the tested grid."""
    return math.sqrt(n) * (0.8) ** (0.5 * n)


# ---------------------------------------------------------------------------
# Monte Carlo oracles on the original (pre-spherical-coordinates) integrals.
# ---------------------------------------------------------------------------


def _sample_radii(rng, count: int, weight: float, n: int, delta: float) -> np.ndarray:
    """Radii with (v+1)^(-2*weight) density for v = (r/R)^n (inverse CDF)."""
    u = rng.random(count)
    v = (1.0 - u) ** (-1.0 / (2.0 * weight - 1.0)) - 1.0
    return truncation_radius(n, delta) * v ** (1.0 / n)


def _unit_vectors(rng, count: int, n: int) -> np.ndarray:
    g = rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _log_kernel_star(norms: np.ndarray, n: int, c: float, delta: float) -> np.ndarray:
    log_rn = math.log(delta) - unit_ball_volume_log(n)
    with np.errstate(divide="ignore"):
        return -2.0 * c * np.logaddexp(n * np.log(norms), log_rn)


def mc_sym_integral(
    spec: KernelIntegralSpec, trials: int = 200_000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo estimate (value, stderr) of the symmetrized integral,
    importance-sampling x1 and x2 from the first two factors.

    Independent of the quadrature path; intended as its oracle at small n.
    """
    n, c, delta = spec.n, spec.c, spec.delta
    exps = spec.exponents
    rng = trial_rng(seed)
    r1 = _sample_radii(rng, trials, exps[0] * c, n, delta)
    r2 = _sample_radii(rng, trials, exps[1] * c, n, delta)
    x1 = _unit_vectors(rng, trials, n) * r1[:, None]
    x2 = _unit_vectors(rng, trials, n) * r2[:, None]
    # Kernel powers fold into the weight parameter: f*^l at c equals f* at lc.
    log_w = _log_kernel_star(np.linalg.norm(x1 + x2, axis=1), n, exps[2] * c, delta)
    if len(exps) == 4:
        log_w = log_w + _log_kernel_star(
            np.linalg.norm(x1 - x2, axis=1), n, exps[3] * c, delta
        )
    # log of V_n^(-2lc) (V_n R^n)^2 R^(-2cn(l1+l2)) / ((2 l1 c - 1)(2 l2 c - 1))
    log_rn = math.log(delta) - unit_ball_volume_log(n)
    log_pref = (
        -2.0 * spec.total * c * unit_ball_volume_log(n)
        + 2.0 * (unit_ball_volume_log(n) + log_rn)
        - 2.0 * c * (exps[0] + exps[1]) * log_rn
        - math.log(2.0 * exps[0] * c - 1.0)
        - math.log(2.0 * exps[1] * c - 1.0)
    )
    weights = np.exp(log_w + log_pref)
    return float(weights.mean()), float(weights.std(ddof=1) / math.sqrt(trials))


# ---------------------------------------------------------------------------
# Minor-determinant bound for admissible-matrix integrals.
# ---------------------------------------------------------------------------


def max_minor_ratio(matrix: AdmissibleMatrix) -> Fraction:
    """M(D): q^(-m) times the largest |det| over m x m minors, exactly."""
    m, k = matrix.m, matrix.k
    best = 0
    for cols in combinations(range(k), m):
        sub = [[row[j] for j in cols] for row in matrix.entries]
        best = max(best, abs(_int_det(sub)))
    if best == 0:
        raise ValueError("all maximal minors vanish; matrix is not admissible")
    return Fraction(best, matrix.q**m)


def _int_det(a: list[list[int]]) -> int:
    a = [row[:] for row in a]
    n = len(a)
    sign = 1
    prev = 1
    for col in range(n - 1):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        for r in range(col + 1, n):
            for cc in range(col + 1, n):
                a[r][cc] = (a[r][cc] * a[col][col] - a[r][col] * a[col][cc]) // prev
            a[r][col] = 0
        prev = a[col][col]
    return sign * a[n - 1][n - 1]


def admissible_integral_bound(
    matrix: AdmissibleMatrix, n: int, c: float, delta: float
) -> float:
    """Upper bound M(D)^(-n) * delta^(m - 2kc) / (2c - 1)^m on the admissible
    matrix integral, in log space."""
    if not c > 0.5:
        raise ValueError("c must exceed 1/2")
    if delta <= 0:
        raise ValueError("delta must be positive")
    ratio = max_minor_ratio(matrix)
    log_bound = (
        -n * math.log(float(ratio))
        + (matrix.m - 2 * matrix.k * c) * math.log(delta)
        - matrix.m * math.log(2 * c - 1)
    )
    return math.exp(log_bound)


# ---------------------------------------------------------------------------
# Shifted-integral spot checks of the symmetrization inequality.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymCheckResult:
    lhs_estimate: float
    lhs_stderr: float
    rhs_value: float
    passed: bool


def shifted_integral_check(
    spec: KernelIntegralSpec,
    shifts: Sequence[Sequence[float]],
    signs: Sequence[int],
    trials: int = 200_000,
    seed: int = 0,
    quad: QuadConfig = QuadConfig(),
) -> SymCheckResult:
    """Monte Carlo check that the shifted truncated-kernel integral is at most
    its symmetrized bound.

    The left side places ell - 2 shifted copies of the hard-truncated kernel
    f(x) = |x|^(-2cn) 1(|x| > R) at sign*x1 + y, sign*x2 + y, sign*(x1+x2) + y
    and (four-factor case) sign*(x1-x2) + y; the right side is the
    corresponding symmetrized integral from quadrature.  Passes when
    lhs <= rhs + 3 * stderr(lhs).
    """
    n, c, delta = spec.n, spec.c, spec.delta
    exps = spec.exponents
    ell = spec.total
    shifts = [np.asarray(y, dtype=float) for y in shifts]
    signs = [int(s) for s in signs]
    if len(shifts) != ell - 2 or len(signs) != ell - 2:
        raise ValueError("need exactly total-2 shifts and signs")
    if any(s not in (1, -1) for s in signs):
        raise ValueError("signs must be +-1")
    if any(y.shape != (n,) for y in shifts):
        raise ValueError("shift vectors must have dimension n")

    rng = trial_rng(seed)
    radius = truncation_radius(n, delta)
    # Base factors f(x1), f(x2) are the sampling densities (u = (r/R)^n has
    # density (2c-1) u^(-2c) on (1, inf)).
    u1 = (1.0 - rng.random(trials)) ** (-1.0 / (2.0 * c - 1.0))
    u2 = (1.0 - rng.random(trials)) ** (-1.0 / (2.0 * c - 1.0))
    x1 = _unit_vectors(rng, trials, n) * (radius * u1 ** (1.0 / n))[:, None]
    x2 = _unit_vectors(rng, trials, n) * (radius * u2 ** (1.0 / n))[:, None]

    arguments = []
    arguments += [x1] * (exps[0] - 1)
    arguments += [x2] * (exps[1] - 1)
    arguments += [x1 + x2] * exps[2]
    if len(exps) == 4:
        arguments += [x1 - x2] * exps[3]

    log_w = np.zeros(trials)
    alive = np.ones(trials, dtype=bool)
    for y, sign, base in zip(shifts, signs, arguments):
        norms = np.linalg.norm(sign * base + y[None, :], axis=1)
        alive &= norms > radius
        with np.errstate(divide="ignore"):
            log_w = log_w + np.where(alive, -2.0 * c * n * np.log(norms), 0.0)
    # log of V_n^(-2lc) Z^2 with Z = V_n R^(n(1-2c)) / (2c-1)
    log_rn = math.log(delta) - unit_ball_volume_log(n)
    log_pref = (
        -2.0 * ell * c * unit_ball_volume_log(n)
        + 2.0 * (unit_ball_volume_log(n) + (1.0 - 2.0 * c) * log_rn)
        - 2.0 * math.log(2.0 * c - 1.0)
    )
    weights = np.where(alive, np.exp(log_w + log_pref), 0.0)
    lhs = float(weights.mean())
    stderr = float(weights.std(ddof=1) / math.sqrt(trials))
    rhs = sym_integral_four(spec, quad) if len(exps) == 4 else sym_integral_three(spec, quad)
    return SymCheckResult(lhs, stderr, rhs, lhs <= rhs + 3.0 * stderr)
