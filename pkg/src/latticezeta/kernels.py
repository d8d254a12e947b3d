"""Backend dispatch for the lattice kernels.

The compiled extension is used when it imported successfully and the inputs
fit comfortably inside int64 guard rails; anything else routes to the pure
Python twin, whose integer arithmetic is arbitrary precision.  Both backends
return exact integer squared norms, so results are backend-independent.

Set ``LATTICEZETA_BACKEND=pure`` (or ``compiled``) to force a backend.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py as _pure
from .errors import NodeBudgetExceeded, PrecisionError  # re-export  # noqa: F401

_forced = os.environ.get("LATTICEZETA_BACKEND", "")
if _forced not in ("", "pure", "compiled"):
    raise RuntimeError(f"unknown LATTICEZETA_BACKEND value: {_forced!r}")

_compiled = None
if _forced != "pure":
    try:
        from . import _speedups as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None
if _forced == "compiled" and _compiled is None:
    raise RuntimeError("compiled backend requested but _speedups is not built")

BACKEND = "compiled" if _compiled is not None else "pure"

# Guard rails for the int64 path; outside them the pure path is authoritative.
_LLL_ENTRY_LIMIT = 1 << 55
_ENUM_ENTRY_LIMIT = 1 << 25
_ENUM_RADIUS_LIMIT = 1 << 50


def _as_int_rows(rows) -> list[list[int]]:
    return [[int(x) for x in row] for row in rows]


def lll_reduce_rows(rows, delta: float = 0.99) -> list[list[int]]:
    """LLL-reduce integer basis rows; returns a new row list (exact ints)."""
    pyrows = _as_int_rows(rows)
    if _compiled is not None and all(
        abs(x) < _LLL_ENTRY_LIMIT for row in pyrows for x in row
    ):
        arr = np.array(pyrows, dtype=np.int64)
        try:
            _compiled.lll_reduce_rows(arr, delta)
            return [[int(x) for x in row] for row in arr]
        except PrecisionError:
            pass
    try:
        return _pure.lll_reduce_rows([row[:] for row in pyrows], delta)
    except PrecisionError:
        return _pure.lll_reduce_rows_exact([row[:] for row in pyrows])


def enumerate_sqnorms(
    rows, radius_sq: int, max_nodes: int = 10_000_000
) -> list[int]:
    """All squared norms <= radius_sq (one per antipodal pair), sorted."""
    pyrows = _as_int_rows(rows)
    radius_sq = int(radius_sq)
    if (
        _compiled is not None
        and radius_sq < _ENUM_RADIUS_LIMIT
        and all(abs(x) < _ENUM_ENTRY_LIMIT for row in pyrows for x in row)
    ):
        arr = np.array(pyrows, dtype=np.int64)
        try:
            return [int(q) for q in _compiled.enumerate_sqnorms(arr, radius_sq, max_nodes)]
        except PrecisionError:
            pass
    return _pure.enumerate_sqnorms(pyrows, radius_sq, max_nodes)
