"""Experiment orchestration: validated configs, reproducibility manifests,
and ensemble drivers shared by the CLI and the acceptance suite.

Every run records a manifest: the exact config, the package version, the root
seed and per-trial seed policy, and SHA-256 digests of the output files.
Worker pools partition trials by index, and per-trial seeds depend only on
(root seed, trial index), so the worker count never changes results.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .lattice import LatticeBasis, VolumeSpectrum, sample_lattice, volume_spectrum

SEED_POLICY = "SeedSequence(root, spawn_key=(trial_index,)); batch chunks likewise"


def read_config_file(path: str | Path) -> dict[str, str]:
    """Plain-text key = value lines; '#' starts a comment, blanks ignored."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def write_config_file(config: dict, path: str | Path) -> None:
    """Inverse of read_config_file (parse -> serialize -> parse round-trips)."""
    lines = [f"{key} = {value}" for key, value in config.items()]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    root_seed: int
    version: str = __version__
    seed_policy: str = SEED_POLICY
    timestamp: str = field(
        default_factory=lambda: time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    )
    outputs: dict[str, str] = field(default_factory=dict)

    def record_output(self, path: str | Path) -> None:
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        self.outputs[str(path)] = digest

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(dataclasses.asdict(self), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Lattice ensembles (parallel over trials).
# ---------------------------------------------------------------------------

_WORKER_CHUNK = 64


def _spectra_chunk(args) -> list[tuple[int, int, tuple[float, ...]]]:
    n, cutoff, prime_bits, seed, start, stop = args
    out = []
    for i in range(start, stop):
        basis = sample_lattice(n, prime_bits, seed, i)
        spec = volume_spectrum(basis, cutoff)
        out.append((i, basis.det_abs, spec.volumes))
    return out


def spectra_ensemble(
    n: int,
    trials: int,
    cutoff: float,
    prime_bits: int,
    seed: int,
    workers: int = 1,
) -> list[tuple[int, int, VolumeSpectrum]]:
    """(trial index, prime, spectrum) for an ensemble, in trial order."""
    ranges = [
        (n, cutoff, prime_bits, seed, a, min(a + _WORKER_CHUNK, trials))
        for a in range(0, trials, _WORKER_CHUNK)
    ]
    if workers > 1:
        with multiprocessing.Pool(workers) as pool:
            chunks = pool.map(_spectra_chunk, ranges)
    else:
        chunks = [_spectra_chunk(r) for r in ranges]
    out = []
    for chunk in chunks:
        for i, p, vols in chunk:
            out.append((i, p, VolumeSpectrum(vols, cutoff, n)))
    return out


def truncated_value_matrix(
    spectra: list[tuple[int, int, VolumeSpectrum]],
    c_grid,
    delta: float,
) -> np.ndarray:
    """(trials, len(c_grid)) matrix of 2 * sum over delta < V <= cutoff of
    V^(-2c), one row per lattice."""
    rows = np.zeros((len(spectra), len(c_grid)))
    c_arr = np.asarray(c_grid, dtype=float)
    for r, (_i, _p, spec) in enumerate(spectra):
        vols = np.array([v for v in spec.volumes if v > delta])
        if len(vols):
            rows[r] = 2.0 * np.sum(vols[None, :] ** (-2.0 * c_arr[:, None]), axis=1)
    return rows


def reduced_basis_rows(basis: LatticeBasis) -> list[list[int]]:
    """Hook for benchmarks: expose the raw integer rows."""
    return [list(r) for r in basis.rows]
