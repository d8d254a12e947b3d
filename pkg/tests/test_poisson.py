import math

import numpy as np
import pytest

from latticezeta import moments as mo
from latticezeta import poisson as po
from latticezeta.stats import StreamingStats, ks_distance, ks_two_sample


def test_sample_process_determinism():
    a = po.sample_process(50.0, seed=1)
    b = po.sample_process(50.0, seed=1)
    assert a == b
    assert po.sample_process(50.0, seed=2) != a


def test_sample_process_points_in_range():
    cfg = po.sample_process(25.0, seed=3)
    assert all(0 < t <= 25.0 for t in cfg.points)
    assert list(cfg.points) == sorted(cfg.points)


def test_point_count_mean():
    counts = [len(po.sample_process(10.0, 42, i).points) for i in range(20_000)]
    stats = StreamingStats.from_values(counts)
    # N(10) is Poisson with mean 5
    assert abs(stats.mean - 5.0) <= 4.0 * stats.stderr_mean


def test_first_point_survival():
    hits = [
        1.0 if (cfg.points and cfg.points[0] > 1.0) else 0.0
        for cfg in (po.sample_process(10.0, 11, i) for i in range(20_000))
    ]
    stats = StreamingStats.from_values(hits)
    assert abs(stats.mean - math.exp(-0.5)) <= 4.0 * stats.stderr_mean


def test_gap_distribution_ks():
    cfg = po.sample_process(200_000.0, seed=3)
    gaps = np.diff(np.concatenate(([0.0], np.asarray(cfg.points))))
    d = ks_distance(gaps, lambda t: 1.0 - np.exp(-0.5 * t))
    assert len(gaps) > 90_000
    assert d < 0.01


def test_power_sum_single_point():
    cfg = po.PointConfiguration((1.0,), 5.0, (0, 0))
    assert po.power_sum(cfg, 1.0).value == pytest.approx(2.0)


def test_power_sum_requires_convergent_exponent():
    cfg = po.sample_process(10.0, seed=1)
    with pytest.raises(ValueError):
        po.power_sum(cfg, 0.5)


def test_power_sum_tail_estimate():
    cfg = po.sample_process(100.0, seed=5)
    value = po.power_sum(cfg, 1.0)
    assert value.tail_estimate == pytest.approx(mo.tail_mean(1.0, 100.0))


def test_monotone_coupling():
    cfg = po.sample_process(20.0, seed=9)
    bigger = cfg.with_point(4.5)
    assert po.power_sum(bigger, 0.8).value > po.power_sum(cfg, 0.8).value


def test_doubling_c_decreases_value_when_points_exceed_one():
    cfg = po.PointConfiguration((1.5, 2.5, 9.0), 10.0, (0, 0))
    assert po.power_sum(cfg, 2.0).value < po.power_sum(cfg, 1.0).value


def test_truncated_power_sum():
    cfg = po.PointConfiguration((0.5, 2.0, 4.0), 10.0, (0, 0))
    got = po.power_sum_truncated(cfg, 1.0, 1.0)
    assert got.value == pytest.approx(2.0 * (2.0**-2 + 4.0**-2))
    with pytest.raises(ValueError):
        po.power_sum_truncated(cfg, 1.0, 11.0)


def test_curve_is_convex_and_matches_pointwise():
    from latticezeta.stats import convexity_audit

    cfg = po.sample_process(100.0, seed=13)
    grid = [0.7, 0.9, 1.2, 1.6, 2.0]
    curve = po.power_sum_curve(cfg, grid)
    ok, violation = convexity_audit(grid, [v.value for v in curve])
    assert ok, violation
    assert curve[2].value == po.power_sum(cfg, 1.2).value


def test_curve_one_point_at_e():
    cfg = po.PointConfiguration((math.e,), 10.0, (0, 0))
    curve = po.power_sum_curve(cfg, [1.0, 2.0])
    assert curve[0].value == pytest.approx(2.0 * math.exp(-2.0))
    assert curve[1].value == pytest.approx(2.0 * math.exp(-4.0))


def test_horizon_policy():
    assert po.horizon_for_tail(1.0, eta=1e-4) == pytest.approx(1e4)
    assert po.horizon_for_tail(1.0, eta=1e-4, delta=2e4) == 2e4
    with pytest.raises(ValueError):
        po.horizon_for_tail(0.5)


def test_batch_prefix_stability():
    a = po.sample_power_sums(1000, 1.0, 1.0, 300.0, seed=9)
    b = po.sample_power_sums(500, 1.0, 1.0, 300.0, seed=9)
    assert np.array_equal(a[:500], b)


def test_batch_matches_gap_sampler_in_distribution():
    # same law, different constructions: two-sample KS at desk scale
    batch = po.sample_power_sums(4000, 1.0, 1.0, 60.0, seed=21)
    gapped = np.array(
        [
            po.power_sum_truncated(po.sample_process(60.0, 22, i), 1.0, 1.0).value
            for i in range(4000)
        ]
    )
    assert ks_two_sample(batch, gapped) < 0.04


@pytest.mark.parametrize("c", [0.75, 1.0])
def test_batch_moments_match_windowed_formulas(c):
    values = po.sample_power_sums(150_000, c, 1.0, 300.0, seed=7)
    for k in (1, 2, 3):
        powered = values**k
        ref = mo.poisson_moment(k, c, 1.0, upper=300.0)
        stderr = powered.std(ddof=1) / math.sqrt(len(values))
        assert abs(powered.mean() - ref) <= 4.0 * stderr


def test_batch_mixed_moment_matches_formula():
    curves = po.sample_power_sum_curves(150_000, [0.75, 1.0], 1.0, 300.0, seed=8)
    prod = curves[:, 0] * curves[:, 1]
    ref = mo.poisson_mixed_moment([0.75, 1.0], 1.0, upper=300.0)
    stderr = prod.std(ddof=1) / math.sqrt(len(prod))
    assert abs(prod.mean() - ref) <= 4.0 * stderr


def test_batch_domain_checks():
    with pytest.raises(ValueError):
        po.sample_power_sums(10, 0.5, 1.0, 100.0, seed=0)
    with pytest.raises(ValueError):
        po.sample_power_sums(10, 1.0, 5.0, 5.0, seed=0)
