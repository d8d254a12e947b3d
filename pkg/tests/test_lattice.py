import math

import numpy as np
import pytest

from latticezeta import lattice as lat
from latticezeta.stats import StreamingStats

Z2 = lat.LatticeBasis(((1, 0), (0, 1)))


def test_sampled_basis_structure():
    basis = lat.sample_lattice(6, 30, seed=42)
    p = basis.rows[0][0]
    assert lat.is_probable_prime(p)
    assert 2**29 <= p < 2**30
    assert basis.rows[0][1:] == (0,) * 5
    for i, row in enumerate(basis.rows[1:], start=1):
        assert 0 <= row[0] < p
        assert row[i] == 1
        assert all(row[j] == 0 for j in range(1, 6) if j != i)
    # triangular, so the determinant is exactly p
    assert basis.det_abs == p
    assert basis.covolume_normalizer == pytest.approx(p ** (-1 / 6))


def test_sampling_is_reproducible():
    a = lat.sample_lattice(8, 34, seed=7, index=3)
    b = lat.sample_lattice(8, 34, seed=7, index=3)
    c = lat.sample_lattice(8, 34, seed=7, index=4)
    assert a == b
    assert a != c


def test_sample_domain_errors():
    with pytest.raises(ValueError):
        lat.sample_lattice(1, 30, seed=0)
    with pytest.raises(ValueError):
        lat.sample_lattice(4, 10, seed=0)
    with pytest.raises(ValueError):
        lat.sample_lattice(4, 63, seed=0)


def test_miller_rabin_against_trial_division():
    def slow_prime(m):
        if m < 2:
            return False
        return all(m % d for d in range(2, int(m**0.5) + 1))

    for m in range(2, 2000):
        assert lat.is_probable_prime(m) == slow_prime(m)
    # strong pseudoprime trap for weak witness sets
    assert not lat.is_probable_prime(3215031751)


def test_determinant_exact_bareiss():
    assert lat.determinant_exact(((2, 0), (0, 3))) == 6
    assert lat.determinant_exact(((0, 1), (1, 0))) == -1
    assert lat.determinant_exact(((1, 2), (2, 4))) == 0
    big = ((10**12, 1, 0), (3, 10**12, 1), (0, 5, 10**12))
    # cofactor expansion: 1e12*(1e24 - 5) - 1*(3e12 - 0); exact integers
    assert lat.determinant_exact(big) == 10**36 - 8 * 10**12


def test_volume_spectrum_z2_golden():
    spec = lat.volume_spectrum(Z2, 10.0)
    assert spec.n == 2
    assert spec.cutoff_volume == 10.0
    assert np.allclose(spec.volumes, [math.pi, math.pi, 2 * math.pi, 2 * math.pi])


def test_enumerate_short_z2():
    reduced = lat.lll_reduce(Z2)
    assert lat.enumerate_short(reduced, 4) == [1, 1, 2, 2, 4, 4]


def test_counting_function():
    spec = lat.volume_spectrum(Z2, 10.0)
    assert lat.counting_function(spec, 0.0) == 0
    assert lat.counting_function(spec, math.pi) == 2
    assert lat.counting_function(spec, 9.9) == 4
    values = [lat.counting_function(spec, t) for t in (0.5, 3.2, 6.3, 9.0)]
    assert values == sorted(values)
    with pytest.raises(ValueError):
        lat.counting_function(spec, 11.0)


def test_spectrum_volumes_certified_below_cutoff():
    basis = lat.sample_lattice(10, 32, seed=5)
    spec = lat.volume_spectrum(basis, 30.0)
    assert all(0 < v <= 30.0 for v in spec.volumes)
    assert list(spec.volumes) == sorted(spec.volumes)


def test_spectrum_extends_consistently():
    # enlarging the cutoff only appends volumes
    basis = lat.sample_lattice(9, 35, seed=21)
    small = lat.volume_spectrum(basis, 15.0)
    large = lat.volume_spectrum(basis, 45.0)
    m = len(small.volumes)
    assert np.allclose(large.volumes[:m], small.volumes)
    assert all(v > 15.0 for v in large.volumes[m:])


def test_lll_reduce_same_lattice():
    basis = lat.sample_lattice(8, 36, seed=9)
    reduced = lat.lll_reduce(basis)
    assert reduced.det_abs == basis.det_abs
    assert max(abs(x) for row in reduced.rows for x in row) < basis.rows[0][0]


def test_counting_mean_matches_ball_volume():
    # Sampled mean of the counting function at finite n equals t/2 exactly in
    # expectation; 400 lattices at 4 sigma.
    t = 5.0
    counts = []
    for _i, _p, spec in lat.sample_spectra(8, 400, 6.0, 32, seed=77):
        counts.append(lat.counting_function(spec, t))
    stats = StreamingStats.from_values(counts)
    assert abs(stats.mean - t / 2) <= 4.0 * stats.stderr_mean


def test_spectra_stream_reproducible():
    a = [vols for _, _, vols in lat.sample_spectra(6, 5, 10.0, 30, seed=3)]
    b = [vols for _, _, vols in lat.sample_spectra(6, 5, 10.0, 30, seed=3)]
    assert a == b
