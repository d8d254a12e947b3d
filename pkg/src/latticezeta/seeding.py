"""Seed derivation shared by all samplers.

Per-trial generators are derived as SeedSequence(root, spawn_key=(index,)), so
any partition of trial indices across workers reproduces the same stream per
trial.  A seed record is the pair (root, index).
"""

from __future__ import annotations

import numpy as np


def trial_seed(root: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(root, spawn_key=(index,))


def trial_rng(root: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed(root, index)))
