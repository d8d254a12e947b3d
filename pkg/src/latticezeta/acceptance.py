"""The acceptance suite: every exit criterion of the project, runnable as a
library call (``run_acceptance``), from the CLI (``verify`` subcommand), or
through pytest.

Criteria 1-6, 10 and 11 compare against exact or analytically referenced
values; criteria 7-9 are property-based with explicitly labeled empirical
budgets (the underlying statements are asymptotic in the dimension and carry
no rate, so any finite-dimension tolerance is a budget, not a derived
number).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from . import bounds, moments, poisson, stats
from .combinatorics import (
    bell_number,
    enumerate_compositions,
    enumerate_partition_matrices,
    enumerate_signed_matrices,
    count_signed_matrices,
)
from .lattice import counting_function
from .runner import spectra_ensemble, truncated_value_matrix
from .stats import TestReport, bootstrap_stderr, convexity_audit, moment_test


@dataclass(frozen=True)
class Profile:
    """Desk-scale run sizes; the quick profile shrinks ensembles for smoke
    runs and does not satisfy the acceptance contract."""

    name: str = "desk"
    seed: int = 20260808
    workers: int = 1
    prime_bits: int = 40
    # mean/variance/event-rate ensemble
    mean_n: int = 12
    mean_trials: int = 5000
    mean_cutoff: float = 400.0
    # poisson moment convergence
    poisson_trials: int = 1_000_000
    poisson_horizon: float = 6000.0
    # short-vector law
    law_n: int = 14
    law_trials: int = 10_000
    law_cutoff: float = 20.0
    # joint distribution and curves
    joint_n: int = 14
    joint_trials: int = 5000
    joint_cutoff: float = 200.0
    joint_poisson_trials: int = 100_000
    curve_poisson_trials: int = 20_000
    curve_grid: tuple = (
        0.6, 0.7, 0.75, 0.8, 0.9, 1.0, 1.1, 1.25, 1.4, 1.55, 1.7, 1.8, 1.9, 1.95, 2.0,
    )
    # integral decay
    decay_ns: tuple = (6, 10, 14, 18, 22, 26, 30, 34, 38)
    mc_trials: int = 400_000


QUICK = Profile(
    name="quick",
    mean_trials=400,
    poisson_trials=50_000,
    poisson_horizon=600.0,
    law_trials=800,
    joint_trials=400,
    joint_poisson_trials=20_000,
    curve_poisson_trials=4_000,
    decay_ns=(6, 10, 14),
    mc_trials=50_000,
)


@dataclass
class CriterionResult:
    cid: str
    title: str
    reports: list[TestReport]
    seconds: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def lines(self) -> list[str]:
        head = "PASS" if self.passed else "FAIL"
        out = [f"[{head}] criterion {self.cid}: {self.title} ({self.seconds:.1f}s)"]
        out.extend("    " + r.summary() for r in self.reports)
        if self.notes:
            out.append(f"    note: {self.notes}")
        return out


def _mean_ensemble(profile: Profile, cache: dict):
    if "mean_spectra" not in cache:
        cache["mean_spectra"] = spectra_ensemble(
            profile.mean_n,
            profile.mean_trials,
            profile.mean_cutoff,
            profile.prime_bits,
            profile.seed,
            workers=profile.workers,
        )
    return cache["mean_spectra"]


def _joint_ensemble(profile: Profile, cache: dict):
    if "joint_spectra" not in cache:
        cache["joint_spectra"] = spectra_ensemble(
            profile.joint_n,
            profile.joint_trials,
            profile.joint_cutoff,
            profile.prime_bits,
            profile.seed + 1,
            workers=profile.workers,
        )
    return cache["joint_spectra"]


def criterion_1(profile: Profile, cache: dict) -> CriterionResult:
    """Mean of the truncated normalized zeta value over random lattices."""
    t0 = time.time()
    spectra = _mean_ensemble(profile, cache)
    values = truncated_value_matrix(spectra, [1.0], 1.0)[:, 0]
    cache["mean_values"] = values
    report = moment_test(
        values,
        k=1,
        reference=moments.mean_truncated(1.0, 1.0),
        name=f"mean at n={profile.mean_n}, c=1, delta=1",
        seed=profile.seed,
    )
    notes = (
        "identity exact at every n; enumeration window adds analytic bias "
        f"{moments.tail_mean(1.0, profile.mean_cutoff):.1e} "
        "(well under one stderr)"
    )
    return CriterionResult("1", "exact mean reproduction", [report], time.time() - t0, notes)


def criterion_2(profile: Profile, cache: dict) -> CriterionResult:
    """Variance: series value at n=50 and empirical variance at desk n."""
    t0 = time.time()
    series50 = moments.variance_exact(moments.FiniteNParams(50, 1.0, 1.0, tol=1e-8))
    r_series = TestReport(
        name="variance series n=50 vs limit 2/3",
        observed=series50,
        reference=2.0 / 3.0,
        tolerance=1e-6,
    )
    spectra = _mean_ensemble(profile, cache)
    values = cache.get("mean_values")
    if values is None:
        values = truncated_value_matrix(spectra, [1.0], 1.0)[:, 0]
    ref = moments.variance_exact(
        moments.FiniteNParams(profile.mean_n, 1.0, 1.0, tol=1e-10)
    )
    stderr = bootstrap_stderr(
        values, seed=profile.seed + 7, statistic=lambda v: v.var(ddof=1)
    )
    r_emp = TestReport(
        name=f"empirical variance at n={profile.mean_n}",
        observed=float(np.var(values, ddof=1)),
        reference=ref,
        tolerance=stats.DEFAULT_Z * stderr,
        stderr=stderr,
        sample_size=len(values),
    )
    return CriterionResult(
        "2", "variance: exact series and empirical agreement",
        [r_series, r_emp], time.time() - t0,
    )


def criterion_3(profile: Profile, cache: dict) -> CriterionResult:
    """Moment-formula identity, exactly in rational arithmetic."""
    t0 = time.time()
    cs = (Fraction(3, 5), Fraction(3, 4), Fraction(1), Fraction(2))
    deltas = (0.5, 1.0, 2.0)
    reports = []
    for k in range(1, 7):
        mismatches = 0
        max_float_diff = 0.0
        for c in cs:
            lhs = moments.poisson_moment_exact(k, c)
            rhs = moments.limit_moment_exact(k, c)
            if lhs != rhs:
                mismatches += 1
            for d in deltas:
                a, b = lhs.evaluate(d), rhs.evaluate(d)
                max_float_diff = max(max_float_diff, abs(a - b) / abs(b))
        reports.append(
            TestReport(
                name=f"k={k}: exact identity over {len(cs)} c-values",
                observed=float(mismatches),
                reference=0.0,
                tolerance=0.0,
                note=f"float eval rel diff {max_float_diff:.1e} at 3 deltas",
            )
        )
    return CriterionResult(
        "3", "partition-sum vs composition-sum moment identity (exact)",
        reports, time.time() - t0,
    )


def criterion_4(profile: Profile, cache: dict) -> CriterionResult:
    """Joint-moment identity for nondecreasing exponent tuples, exactly."""
    t0 = time.time()
    pool = (Fraction(3, 5), Fraction(3, 4), Fraction(1), Fraction(3, 2))
    reports = []
    for length in range(1, 6):
        mismatches = 0
        count = 0
        for gammas in combinations_with_replacement(pool, length):
            count += 1
            if moments.poisson_mixed_moment_exact(gammas) != (
                moments.limit_mixed_moment_exact(gammas)
            ):
                mismatches += 1
        reports.append(
            TestReport(
                name=f"length {length}: {count} tuples",
                observed=float(mismatches),
                reference=0.0,
                tolerance=0.0,
            )
        )
    return CriterionResult(
        "4", "mixed-moment identity (exact, delta-independent)",
        reports, time.time() - t0,
    )


def criterion_5(profile: Profile, cache: dict) -> CriterionResult:
    """Combinatorial counts: Bell numbers and the signed-matrix class sizes."""
    t0 = time.time()
    reports = []
    bad_bell = [
        k for k in range(1, 9)
        if len(enumerate_partition_matrices(k)) != bell_number(k)
    ]
    reports.append(
        TestReport(
            name="|D(k)| = Bell(k) for k <= 8",
            observed=float(len(bad_bell)),
            reference=0.0,
            tolerance=0.0,
            note=f"failures at k={bad_bell}" if bad_bell else "",
        )
    )
    bad_counts = []
    for k in range(2, 7):
        for comp in enumerate_compositions(k):
            if comp.m == k:
                continue
            if count_signed_matrices(comp) != len(enumerate_signed_matrices(comp)):
                bad_counts.append(comp.parts)
    reports.append(
        TestReport(
            name="count formula = enumeration for all compositions, k <= 6",
            observed=float(len(bad_counts)),
            reference=0.0,
            tolerance=0.0,
            note=f"failures at {bad_counts}" if bad_counts else "",
        )
    )
    return CriterionResult("5", "combinatorial counts", reports, time.time() - t0)


def criterion_6(profile: Profile, cache: dict) -> CriterionResult:
    """Empirical point-process moments against the partition formula."""
    t0 = time.time()
    values = poisson.sample_power_sums(
        profile.poisson_trials, 1.0, 1.0, profile.poisson_horizon, profile.seed + 2
    )
    reports = []
    for k in (1, 2, 3):
        reports.append(
            moment_test(
                values,
                k=k,
                reference=moments.poisson_moment(k, 1.0, 1.0),
                name=f"moment k={k} over {profile.poisson_trials} trials",
                seed=profile.seed + 10 + k,
            )
        )
    gap = abs(
        moments.poisson_moment(3, 1.0, 1.0)
        - moments.poisson_moment(3, 1.0, 1.0, upper=profile.poisson_horizon)
    )
    notes = f"horizon {profile.poisson_horizon}: analytic k=3 horizon gap {gap:.2e}"
    return CriterionResult(
        "6", "point-process moment convergence", reports, time.time() - t0, notes
    )


def criterion_7(profile: Profile, cache: dict) -> CriterionResult:
    """Law of the smallest volume and the exact mean of the counting function."""
    t0 = time.time()
    spectra = spectra_ensemble(
        profile.law_n,
        profile.law_trials,
        profile.law_cutoff,
        profile.prime_bits,
        profile.seed + 3,
        workers=profile.workers,
    )
    censor = profile.law_cutoff * 1.05
    v1 = np.array(
        [spec.volumes[0] if spec.volumes else censor for _, _, spec in spectra]
    )
    ks = stats.ks_distance(v1, lambda t: 1.0 - np.exp(-0.5 * np.minimum(t, profile.law_cutoff)))
    reports = [
        TestReport(
            name=f"KS(V_1, 1 - exp(-t/2)) at n={profile.law_n}",
            observed=ks,
            reference=0.0,
            tolerance=0.03,
            sample_size=len(v1),
            note="empirical budget (no convergence rate available)",
        )
    ]
    for t in (1.0, 5.0, 10.0):
        counts = np.array(
            [counting_function(spec, t) for _, _, spec in spectra], dtype=float
        )
        reports.append(
            moment_test(
                counts,
                k=1,
                reference=0.5 * t,
                name=f"mean count below t={t:g} (exact reference t/2)",
                seed=profile.seed + 20 + int(t),
            )
        )
    return CriterionResult(
        "7", "short-vector law and counting means", reports, time.time() - t0
    )


def criterion_8(profile: Profile, cache: dict) -> CriterionResult:
    """Finite-dimensional distributions against the point-process ensemble."""
    t0 = time.time()
    grid = (0.75, 1.0)
    spectra = _joint_ensemble(profile, cache)
    lattice_vals = truncated_value_matrix(spectra, grid, 1.0)
    poisson_vals = poisson.sample_power_sum_curves(
        profile.joint_poisson_trials, grid, 1.0, profile.joint_cutoff,
        profile.seed + 4,
    )
    cache["joint_lattice_vals"] = lattice_vals
    reports = stats.finite_dim_compare(
        lattice_vals, poisson_vals, grid, 1.0,
        upper=profile.joint_cutoff, seed=profile.seed + 5,
    )
    notes = (
        f"both ensembles windowed to (1, {profile.joint_cutoff:g}]; "
        "references are the windowed analytic joint moments"
    )
    return CriterionResult(
        "8", "distributional convergence panels", reports, time.time() - t0, notes
    )


def criterion_9(profile: Profile, cache: dict) -> CriterionResult:
    """Curve experiment: convexity of every sampled curve plus marginals."""
    t0 = time.time()
    grid = profile.curve_grid
    spectra = _joint_ensemble(profile, cache)
    lattice_curves = truncated_value_matrix(spectra, grid, 1.0)
    poisson_curves = poisson.sample_power_sum_curves(
        profile.curve_poisson_trials, grid, 1.0, profile.joint_cutoff,
        profile.seed + 6,
    )
    reports = []
    for name, curves in (("lattice", lattice_curves), ("poisson", poisson_curves)):
        violations = 0
        worst = 0.0
        for row in curves:
            ok, v = convexity_audit(grid, row)
            if not ok:
                violations += 1
            worst = max(worst, v)
        reports.append(
            TestReport(
                name=f"convexity of every {name} curve ({len(curves)} curves)",
                observed=float(violations),
                reference=0.0,
                tolerance=0.0,
                note=f"max violation {worst:.2e}",
            )
        )
    sub = [grid.index(0.75), grid.index(1.0)]
    reports.extend(
        stats.finite_dim_compare(
            lattice_curves[:, sub], poisson_curves[:, sub], (0.75, 1.0), 1.0,
            upper=profile.joint_cutoff, seed=profile.seed + 8,
        )
    )
    return CriterionResult(
        "9", "curve convexity and curve marginals", reports, time.time() - t0
    )


def criterion_10(profile: Profile, cache: dict) -> CriterionResult:
    """Exponential decay of the symmetrized integrals, with MC cross-check."""
    t0 = time.time()
    quad = bounds.QuadConfig(rtol=1e-5)
    reports = []
    for label, exponents, integral in (
        ("four-factor", (1, 1, 1, 1), bounds.sym_integral_four),
        ("three-factor", (1, 1, 1), bounds.sym_integral_three),
    ):
        values = [
            integral(bounds.KernelIntegralSpec(n, 1.0, 1.0, exponents), quad)
            for n in profile.decay_ns
        ]
        decreasing = all(a > b for a, b in zip(values, values[1:]))
        reports.append(
            TestReport(
                name=f"{label}: strictly decreasing on n grid",
                observed=1.0 if decreasing else 0.0,
                reference=1.0,
                tolerance=0.0,
            )
        )
        ratios = [v / bounds.decay_envelope(n) for n, v in zip(profile.decay_ns, values)]
        reports.append(
            TestReport(
                name=f"{label}: fits under sqrt(n)(4/5)^(n/2) envelope",
                observed=max(ratios),
                reference=ratios[0],
                tolerance=0.05 * ratios[0],
                note="largest envelope ratio must stay at the smallest n",
            )
        )
        spec3 = bounds.KernelIntegralSpec(3, 1.0, 1.0, exponents)
        q = integral(spec3, quad)
        mc, se = bounds.mc_sym_integral(spec3, trials=profile.mc_trials, seed=profile.seed + 9)
        reports.append(
            TestReport(
                name=f"{label}: n=3 quadrature vs Monte Carlo oracle",
                observed=q,
                reference=mc,
                tolerance=3.0 * se,
                stderr=se,
                sample_size=profile.mc_trials,
            )
        )
    return CriterionResult(
        "10", "symmetrized-integral decay", reports, time.time() - t0
    )


def criterion_11(profile: Profile, cache: dict) -> CriterionResult:
    """Rate of lattices whose truncation at delta = 1/2 removes anything."""
    t0 = time.time()
    spectra = _mean_ensemble(profile, cache)
    delta = 0.5
    hits = np.array(
        [1.0 if (spec.volumes and spec.volumes[0] <= delta) else 0.0
         for _, _, spec in spectra]
    )
    frac = float(hits.mean())
    stderr = bootstrap_stderr(hits, seed=profile.seed + 11)
    report = TestReport(
        name=f"P(V_1 <= {delta}) at n={profile.mean_n}, one-sided vs delta/2",
        observed=max(0.0, frac - delta / 2),
        reference=0.0,
        tolerance=stats.DEFAULT_Z * stderr,
        stderr=stderr,
        sample_size=len(hits),
        note=f"observed fraction {frac:.4f}; bound delta/2 = {delta / 2}",
    )
    return CriterionResult(
        "11", "truncation-event rate", [report], time.time() - t0
    )


def criterion_12(results: list[CriterionResult]) -> CriterionResult:
    """Desk-scale honesty: budget-based criteria must be labeled as such."""
    budget_ids = {"7", "8", "9"}
    labeled = True
    for res in results:
        if res.cid in budget_ids:
            has_label = any(
                "budget" in (r.note or "") for r in res.reports
            ) or "budget" in res.notes or "windowed" in res.notes
            labeled = labeled and has_label
    report = TestReport(
        name="asymptotic criteria labeled as empirical budgets",
        observed=1.0 if labeled else 0.0,
        reference=1.0,
        tolerance=0.0,
        note="criteria 1-6, 10, 11 carry exact or analytic references",
    )
    return CriterionResult("12", "desk-scale honesty", [report])


_CRITERIA = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
    criterion_11,
]


def run_acceptance(
    profile: Profile = Profile(), echo=print, only: set[str] | None = None
) -> list[CriterionResult]:
    """Run the full suite (or a subset of criterion ids), echoing one
    pass/fail line per criterion."""
    cache: dict = {}
    results: list[CriterionResult] = []
    for fn in _CRITERIA:
        cid = fn.__name__.split("_")[1]
        if only and cid not in only:
            continue
        result = fn(profile, cache)
        results.append(result)
        for line in result.lines():
            echo(line)
    if not only or "12" in only:
        result = criterion_12(results)
        results.append(result)
        for line in result.lines():
            echo(line)
    return results
