"""Statistical machinery for comparing sampled ensembles with analytic
predictions: streaming moments, Kolmogorov-Smirnov distances, bootstrap
standard errors, moment panels, and convexity audits of sampled curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .moments import poisson_mixed_moment
from .seeding import trial_rng

DEFAULT_Z = 4.0  # tolerance in standard errors; balances ~30 tests per suite
DEFAULT_BOOTSTRAP = 200


@dataclass
class StreamingStats:
    """Mergeable running central moments up to order four.

    ``merge`` implements the pairwise update formulas, so combining per-worker
    accumulators equals (up to float round-off) accumulating the concatenated
    sample.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    minimum: float = math.inf
    maximum: float = -math.inf

    def push(self, x: float) -> None:
        self.merge(StreamingStats(1, float(x), 0.0, 0.0, 0.0, float(x), float(x)))

    def update(self, values) -> None:
        for x in values:
            self.push(x)

    def merge(self, other: "StreamingStats") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.__dict__.update(other.__dict__)
            return
        na, nb = self.count, other.count
        n = na + nb
        d = other.mean - self.mean
        d2 = d * d
        self.m4 = (
            self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / n**3
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / n**2
            + 4.0 * d * (na * other.m3 - nb * self.m3) / n
        )
        self.m3 = (
            self.m3
            + other.m3
            + d * d2 * na * nb * (na - nb) / n**2
            + 3.0 * d * (na * other.m2 - nb * self.m2) / n
        )
        self.m2 = self.m2 + other.m2 + d2 * na * nb / n
        self.mean += d * nb / n
        self.count = n
        self.minimum = min(self.minimum, other.minimum)
        self.maximum = max(self.maximum, other.maximum)

    @classmethod
    def from_values(cls, values) -> "StreamingStats":
        s = cls()
        s.update(values)
        return s

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return math.nan
        return self.m2 / (self.count - 1)

    def central_moment(self, order: int) -> float:
        if order not in (2, 3, 4):
            raise ValueError("orders 2..4 supported")
        if self.count == 0:
            return math.nan
        return (self.m2, self.m3, self.m4)[order - 2] / self.count

    @property
    def stderr_mean(self) -> float:
        return math.sqrt(self.variance / self.count)


@dataclass(frozen=True)
class TestReport:
    """One statistic compared against its reference value."""

    __test__ = False  # not a pytest collection target despite the name

    name: str
    observed: float
    reference: float
    tolerance: float
    stderr: float | None = None
    sample_size: int | None = None
    seeds: tuple | None = None
    note: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "passed", abs(self.observed - self.reference) <= self.tolerance
        )

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.name}: observed {self.observed:.6g}, "
            f"reference {self.reference:.6g}, tolerance {self.tolerance:.3g}"
        )


def ks_distance(sample, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sup distance between the empirical CDF of the sample and a reference
    CDF (callable, vectorized)."""
    xs = np.sort(np.asarray(sample, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    ref = np.asarray(cdf(xs), dtype=float)
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(hi - ref), np.max(ref - lo)))


def ks_two_sample(a, b) -> float:
    """Sup distance between two empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def bootstrap_stderr(
    values: np.ndarray,
    n_boot: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    statistic: Callable[[np.ndarray], float] | None = None,
) -> float:
    """Bootstrap standard error of a statistic (default: the sample mean),
    from seeded resamples with replacement."""
    values = np.asarray(values, dtype=float)
    rng = trial_rng(seed)
    n = len(values)
    stats_ = np.empty(n_boot)
    for i in range(n_boot):
        resample = values[rng.integers(0, n, size=n)]
        stats_[i] = resample.mean() if statistic is None else statistic(resample)
    return float(stats_.std(ddof=1))


def moment_test(
    samples,
    k: int,
    reference: float,
    name: str = "moment",
    z: float = DEFAULT_Z,
    n_boot: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    extra_tolerance: float = 0.0,
) -> TestReport:
    """Empirical k-th raw moment against a reference, tolerance z * stderr.

    ``extra_tolerance`` widens the band by a known systematic budget (e.g. an
    analytic truncation gap), reported in the note.
    """
    if k > 4:
        raise ValueError("empirical moments above order 4 are too noisy here")
    samples = np.asarray(samples, dtype=float)
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    powered = samples if k == 1 else samples**k
    observed = float(powered.mean())
    stderr = bootstrap_stderr(powered, n_boot=n_boot, seed=seed)
    note = f"extra_tolerance={extra_tolerance:.3g}" if extra_tolerance else ""
    return TestReport(
        name=name,
        observed=observed,
        reference=float(reference),
        tolerance=z * stderr + extra_tolerance,
        stderr=stderr,
        sample_size=len(samples),
        seeds=(seed,),
        note=note,
    )


def convexity_audit(
    grid: Sequence[float], values: Sequence[float], rel_tol: float = 1e-9
) -> tuple[bool, float]:
    """Check that consecutive slopes are nondecreasing, up to float noise.

    Returns (passed, max_violation); the tolerance scales with the value
    magnitudes and the grid spacing so exactly convex data passes under any
    benign rounding.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(grid) < 3:
        raise ValueError("need at least three grid points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    slopes = np.diff(values) / np.diff(grid)
    violations = slopes[:-1] - slopes[1:]
    max_violation = float(max(0.0, np.max(violations)))
    scale = max(1.0, float(np.max(np.abs(values)))) / float(np.min(np.diff(grid)))
    return max_violation <= rel_tol * scale, max_violation


def finite_dim_compare(
    lattice_samples: np.ndarray,
    poisson_samples: np.ndarray,
    c_grid: Sequence[float],
    delta: float,
    upper: float,
    ks_budget: float = 0.05,
    z: float = DEFAULT_Z,
    seed: int = 0,
) -> list[TestReport]:
    """Panels comparing two ensembles of truncated values on a common c grid.

    Both ensembles must be windowed to the same (delta, upper] band.  Emits a
    two-sample KS report per coordinate plus moment panels (each coordinate's
    mean and every pairwise product) of both ensembles against the analytic
    windowed references.
    """
    lattice_samples = np.atleast_2d(np.asarray(lattice_samples, dtype=float))
    poisson_samples = np.atleast_2d(np.asarray(poisson_samples, dtype=float))
    m = len(c_grid)
    if lattice_samples.shape[1] != m or poisson_samples.shape[1] != m:
        raise ValueError("sample columns must match the c grid")

    reports = []
    for i, c in enumerate(c_grid):
        reports.append(
            TestReport(
                name=f"ks[c={c}]",
                observed=ks_two_sample(lattice_samples[:, i], poisson_samples[:, i]),
                reference=0.0,
                tolerance=ks_budget,
                sample_size=lattice_samples.shape[0],
                seeds=(seed,),
                note="two-sample, empirical budget",
            )
        )

    panels: list[tuple[str, tuple[int, ...]]] = []
    panels.extend((f"E[X{i + 1}]", (i,)) for i in range(m))
    panels.extend(
        (f"E[X{i + 1}*X{j + 1}]", (i, j)) for i in range(m) for j in range(i + 1, m)
    )
    for label, idx in panels:
        gammas = sorted(c_grid[i] for i in idx)
        reference = poisson_mixed_moment(gammas, delta, upper=upper)
        for ens_name, ens in (("lattice", lattice_samples), ("poisson", poisson_samples)):
            prod = np.prod(ens[:, list(idx)], axis=1)
            stderr = bootstrap_stderr(prod, seed=seed)
            reports.append(
                TestReport(
                    name=f"{label} {ens_name}",
                    observed=float(prod.mean()),
                    reference=reference,
                    tolerance=z * stderr,
                    stderr=stderr,
                    sample_size=len(prod),
                    seeds=(seed,),
                )
            )
    return reports
