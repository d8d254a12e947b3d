"""Numerical laboratory for zeta sums over random unit-covolume lattices,
their Poisson-process limit, and the closed-form moment identities linking
the two.

The hot kernels (basis reduction and short-vector enumeration) live in a
compiled extension with a pure-Python fallback selected at import; see
``latticezeta.kernels.BACKEND``.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: E402

__all__ = ["KERNEL_BACKEND", "__version__"]
