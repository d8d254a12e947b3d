"""Random unit-covolume lattices and their normalized volume spectra.

A lattice is sampled as a random prime-index sublattice of Z^n rescaled to
covolume one: pick a random prime p of the requested size and uniform residues
a_1..a_{n-1} mod p; the integer rows (p, 0, ..), (a_i, e_{i+1}) span an
index-p sublattice, and the rescaling factor p^(-1/n) normalizes the
covolume.  Equidistribution of these index-p points in the space of lattices
as p grows makes ``prime_bits`` the fidelity knob of the sampler.

All vector norms are exact integers of the unnormalized lattice; the
normalization to volumes V_j = V_n * |x|^n * p^(-1) happens once, in log
space, when the spectrum is assembled.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import kernels
from .seeding import trial_rng
from .zeta import unit_ball_volume_log

PRIME_BITS_MIN = 20
PRIME_BITS_MAX = 62

# Deterministic Miller-Rabin witness set, valid for all m < 3.3e24 (> 2^81).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class LatticeBasis:
    """Integer basis rows plus the scalar normalizer to covolume one."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def det_abs(self) -> int:
        return abs(determinant_exact(self.rows))

    @property
    def covolume_normalizer(self) -> float:
        """s with s^n * |det| = 1; the real lattice is (rows) * s."""
        return math.exp(-math.log(self.det_abs) / self.n)


@dataclass(frozen=True)
class VolumeSpectrum:
    """Sorted normalized volumes V_1 <= V_2 <= ..., complete below the cutoff."""

    volumes: tuple[float, ...]
    cutoff_volume: float
    n: int

    def __post_init__(self):
        if any(a > b for a, b in zip(self.volumes, self.volumes[1:])):
            raise ValueError("volumes must be nondecreasing")
        if any(v > self.cutoff_volume for v in self.volumes):
            raise ValueError("volumes beyond the certified cutoff")


def is_probable_prime(m: int) -> bool:
    """Deterministic Miller-Rabin for m < 3.3e24."""
    if m < 2:
        return False
    for w in _MR_WITNESSES:
        if m % w == 0:
            return m == w
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng, max_tries: int = 100_000) -> int:
    """Uniform random prime with the given bit length."""
    lo, hi = 1 << (bits - 1), 1 << bits
    for _ in range(max_tries):
        candidate = int(rng.integers(lo, hi, dtype=np.uint64)) | 1
        if is_probable_prime(candidate):
            return candidate
    raise RuntimeError(f"no {bits}-bit prime found in {max_tries} tries")


def sample_lattice(n: int, prime_bits: int, seed, index: int = 0) -> LatticeBasis:
    """Random prime-index sublattice of Z^n (unit covolume after rescaling).

    rows: (p, 0, ..., 0) and a_i * e_1 + e_{i+1} for i = 1..n-1, with p a
    uniform random prime of ``prime_bits`` bits and a_i uniform mod p.  The
    integer determinant is exactly p.
    """
    if n < 2:
        raise ValueError("dimension must be at least 2")
    if not PRIME_BITS_MIN <= prime_bits <= PRIME_BITS_MAX:
        raise ValueError(f"prime_bits must be in [{PRIME_BITS_MIN}, {PRIME_BITS_MAX}]")
    rng = trial_rng(seed, index)
    p = random_prime(prime_bits, rng)
    residues = [int(x) for x in rng.integers(0, p, size=n - 1)]
    rows = [(p,) + (0,) * (n - 1)]
    for i, a in enumerate(residues):
        row = [0] * n
        row[0] = a
        row[i + 1] = 1
        rows.append(tuple(row))
    return LatticeBasis(tuple(rows))


def determinant_exact(rows) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    a = [[int(x) for x in row] for row in rows]
    n = len(a)
    sign = 1
    prev = 1
    for c in range(n - 1):
        pivot = next((r for r in range(c, n) if a[r][c] != 0), None)
        if pivot is None:
            return 0
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            sign = -sign
        for r in range(c + 1, n):
            for cc in range(c + 1, n):
                a[r][cc] = (a[r][cc] * a[c][c] - a[r][c] * a[c][cc]) // prev
            a[r][c] = 0
        prev = a[c][c]
    return sign * a[n - 1][n - 1]


def lll_reduce(basis: LatticeBasis, delta_lll: float = 0.99) -> LatticeBasis:
    """LLL-reduced basis of the same lattice; determinant checked exactly."""
    reduced = kernels.lll_reduce_rows([list(row) for row in basis.rows], delta_lll)
    out = LatticeBasis(tuple(tuple(row) for row in reduced))
    if out.det_abs != basis.det_abs:
        raise RuntimeError("reduction changed the determinant")  # pragma: no cover
    return out


def enumerate_short(
    basis: LatticeBasis, radius_sq: int, max_nodes: int = 10_000_000
) -> list[int]:
    """Exact squared norms (unnormalized integer units) of all nonzero
    vectors with |x|^2 <= radius_sq, one per antipodal pair, sorted.

    The basis should be LLL-reduced; correctness does not depend on it but
    the search tree does.
    """
    return kernels.enumerate_sqnorms(
        [list(row) for row in basis.rows], radius_sq, max_nodes
    )


def _log_volume(n: int, sqnorm: int, log_det: float) -> float:
    return unit_ball_volume_log(n) + 0.5 * n * math.log(sqnorm) - log_det


def volume_spectrum(
    basis: LatticeBasis,
    target_cutoff: float,
    max_nodes: int = 10_000_000,
    reduce_first: bool = True,
) -> VolumeSpectrum:
    """All normalized volumes V_j <= target_cutoff of the rescaled lattice.

    V_j <= Y is equivalent to the integer squared norm being at most
    (Y * det / V_n)^(2/n); the enumeration radius inflates that threshold so
    float round-off cannot drop a boundary vector, and membership of each
    found vector is then decided by the same log-space formula that defines
    the reported volumes.
    """
    if target_cutoff <= 0:
        raise ValueError("cutoff must be positive")
    n = basis.n
    if reduce_first:
        basis = lll_reduce(basis)
    log_det = math.log(basis.det_abs)
    log_thresh = (2.0 / n) * (
        math.log(target_cutoff) + log_det - unit_ball_volume_log(n)
    )
    radius_sq = int(math.floor(math.exp(log_thresh) * (1.0 + 1e-9))) + 1
    sqnorms = enumerate_short(basis, radius_sq, max_nodes)
    log_cut = math.log(target_cutoff)
    volumes = [
        math.exp(lv)
        for q in sqnorms
        if (lv := _log_volume(n, q, log_det)) <= log_cut
    ]
    volumes.sort()
    return VolumeSpectrum(tuple(volumes), target_cutoff, n)


def counting_function(spectrum: VolumeSpectrum, t: float) -> int:
    """Number of spectrum entries with V_j <= t (t within the certified range)."""
    if t < 0:
        return 0
    if t > spectrum.cutoff_volume:
        raise ValueError("t beyond the certified cutoff")
    return bisect.bisect_right(spectrum.volumes, t)


def sample_spectra(
    n: int,
    trials: int,
    cutoff: float,
    prime_bits: int,
    seed: int,
    start_index: int = 0,
) -> Iterator[tuple[int, int, VolumeSpectrum]]:
    """Stream (trial_index, prime, spectrum) for an ensemble of lattices."""
    for i in range(start_index, start_index + trials):
        basis = sample_lattice(n, prime_bits, seed, i)
        yield i, basis.det_abs, volume_spectrum(basis, cutoff)
