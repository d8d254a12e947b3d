# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice kernels: int64 basis reduction and short-vector
enumeration.

Mirrors ``_kernels_py`` exactly in contract: every accept decision is redeemed
by an exact integer norm, pruning bounds carry the same inflation, and any
risk of int64 overflow raises PrecisionError so the caller can fall back to
the arbitrary-precision pure path.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, floor, llround, sqrt

from .errors import NodeBudgetExceeded, PrecisionError

BACKEND_NAME = "compiled"

cdef double BOUND_SLACK = 1e-9
cdef long long ENTRY_GUARD = (<long long>1) << 61
cdef long long COEFF_GUARD = (<long long>1) << 31
cdef long long MAX_LLL_LOOPS = 1000000


cdef inline long long llabs_(long long x) nogil:
    return -x if x < 0 else x


cdef int _refresh_gso(long long[:, ::1] rows, long double[:, ::1] mu,
                      long double[::1] b, long double[:, ::1] star,
                      Py_ssize_t n) except -1:
    """Gram-Schmidt data recomputed from the exact rows.

    Modified Gram-Schmidt in long double (64-bit mantissa on x86): entries up
    to 2^63 convert exactly, and the cancellation for near-triangular bases
    with one huge row happens on vector components before squaring, keeping
    the tiny orthogonal norms accurate.
    """
    cdef Py_ssize_t i, j, t
    cdef long double acc
    for i in range(n):
        for t in range(n):
            star[i, t] = <long double>rows[i, t]
        for j in range(i):
            acc = 0.0
            for t in range(n):
                acc += star[i, t] * star[j, t]
            mu[i, j] = acc / b[j]
            for t in range(n):
                star[i, t] -= mu[i, j] * star[j, t]
        acc = 0.0
        for t in range(n):
            acc += star[i, t] * star[i, t]
        b[i] = acc
        if not b[i] > 0.0:
            raise PrecisionError("degenerate Gram-Schmidt norm")
    return 0


def lll_reduce_rows(long long[:, ::1] rows, double delta=0.99):
    """In-place LLL reduction of int64 basis rows.

    Row operations are exact int64 with overflow guards; Gram-Schmidt data is
    refactorized from the rows after every swap and verified at the end, so
    float round-off can cost retries but never a wrong basis.
    """
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t i, j, t, k
    cdef long long r, e
    cdef long long loops
    cdef int attempt, ok

    if not (0.25 < delta < 1.0):
        raise ValueError("delta must lie in (1/4, 1)")
    if n == 1:
        return

    cdef cnp.ndarray[cnp.longdouble_t, ndim=2] mu_arr = np.zeros((n, n), dtype=np.longdouble)
    cdef cnp.ndarray[cnp.longdouble_t, ndim=2] star_arr = np.zeros((n, n), dtype=np.longdouble)
    cdef cnp.ndarray[cnp.longdouble_t, ndim=1] b_arr = np.zeros(n, dtype=np.longdouble)
    cdef long double[:, ::1] mu = mu_arr
    cdef long double[:, ::1] star = star_arr
    cdef long double[::1] b = b_arr

    for attempt in range(3):
        _refresh_gso(rows, mu, b, star, n)
        k = 1
        loops = 0
        while k < n:
            loops += 1
            if loops > MAX_LLL_LOOPS:
                raise PrecisionError("reduction failed to terminate")
            for j in range(k - 1, -1, -1):
                if mu[k, j] > 0.5 or mu[k, j] < -0.5:
                    if mu[k, j] > 4.5e15 or mu[k, j] < -4.5e15:
                        raise PrecisionError("size-reduction coefficient overflow")
                    r = llround(<double>mu[k, j])
                    for t in range(n):
                        e = rows[j, t]
                        if e != 0 and llabs_(r) > ENTRY_GUARD // llabs_(e):
                            raise PrecisionError("row operation would overflow")
                        e = rows[k, t] - r * e
                        if llabs_(e) > ENTRY_GUARD:
                            raise PrecisionError("row entry overflow")
                        rows[k, t] = e
                    for i in range(j):
                        mu[k, i] -= (<long double>r) * mu[j, i]
                    mu[k, j] -= <long double>r
            if b[k] >= (delta - <double>(mu[k, k - 1] * mu[k, k - 1])) * b[k - 1]:
                k += 1
                continue
            for t in range(n):
                e = rows[k - 1, t]
                rows[k - 1, t] = rows[k, t]
                rows[k, t] = e
            _refresh_gso(rows, mu, b, star, n)
            if k > 1:
                k -= 1

        # Verify against freshly computed data; retry the whole loop if the
        # locally updated mu drifted past the acceptance slack.
        _refresh_gso(rows, mu, b, star, n)
        ok = 1
        for i in range(n):
            for j in range(i):
                if mu[i, j] > 0.5 + 1e-8 or mu[i, j] < -0.5 - 1e-8:
                    ok = 0
        for k in range(1, n):
            if b[k] < (delta - <double>(mu[k, k - 1] * mu[k, k - 1]) - 1e-8) * b[k - 1]:
                ok = 0
        if ok:
            return
    raise PrecisionError("verification failed after repeated passes")


def enumerate_sqnorms(long long[:, ::1] rows, long long radius_sq,
                      long long max_nodes=10000000):
    """Exact squared norms below radius_sq, one per antipodal pair, sorted."""
    cdef Py_ssize_t n = rows.shape[0]
    cdef Py_ssize_t i, j, t

    if radius_sq < 0:
        raise ValueError("radius_sq must be nonnegative")

    cdef cnp.ndarray[cnp.int64_t, ndim=2] gram_arr = np.zeros((n, n), dtype=np.int64)
    cdef long long[:, ::1] gram = gram_arr
    cdef long long acc
    for i in range(n):
        for j in range(i + 1):
            acc = 0
            for t in range(n):
                acc += rows[i, t] * rows[j, t]
            gram[i, j] = acc
            gram[j, i] = acc

    cdef cnp.ndarray[cnp.float64_t, ndim=2] mu_arr = np.zeros((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] star_arr = np.zeros((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b_arr = np.zeros(n)
    cdef double[:, ::1] mu = mu_arr
    cdef double[:, ::1] star = star_arr
    cdef double[::1] b = b_arr
    cdef double tmp
    for i in range(n):
        for t in range(n):
            star[i, t] = <double>rows[i, t]
        for j in range(i):
            if b[j] <= 0.0:
                raise PrecisionError("degenerate Gram-Schmidt norm")
            tmp = 0.0
            for t in range(n):
                tmp += (<double>rows[i, t]) * star[j, t]
            mu[i, j] = tmp / b[j]
            for t in range(n):
                star[i, t] -= mu[i, j] * star[j, t]
        tmp = 0.0
        for t in range(n):
            tmp += star[i, t] * star[i, t]
        b[i] = tmp
        if b[i] <= 0.0:
            raise PrecisionError("degenerate Gram-Schmidt norm")

    cdef double bound = radius_sq * (1.0 + BOUND_SLACK) + BOUND_SLACK
    cdef cnp.ndarray[cnp.int64_t, ndim=1] u_arr = np.zeros(n, dtype=np.int64)
    cdef long long[::1] u = u_arr
    results = []
    cdef long long nodes = 0

    nodes = _descend(n - 1, 0.0, 1, rows, gram, mu, b, u, bound, radius_sq,
                     nodes, max_nodes, results, n)
    results.sort()
    return results


cdef long long _exact_norm(long long[::1] u, long long[:, ::1] gram,
                           Py_ssize_t n) except? -1:
    cdef long long total = 0
    cdef long long term, ui, uj
    cdef Py_ssize_t i, j
    for i in range(n):
        ui = u[i]
        if ui == 0:
            continue
        if llabs_(ui) > COEFF_GUARD:
            raise PrecisionError("coefficient overflow in exact norm")
        term = ui * ui
        if gram[i, i] != 0 and term > ENTRY_GUARD // gram[i, i]:
            raise PrecisionError("exact norm overflow")
        total += term * gram[i, i]
        for j in range(i):
            uj = u[j]
            if uj == 0 or gram[i, j] == 0:
                continue
            term = 2 * ui * uj
            if llabs_(term) > ENTRY_GUARD // llabs_(gram[i, j]):
                raise PrecisionError("exact norm overflow")
            total += term * gram[i, j]
        if llabs_(total) > ENTRY_GUARD:
            raise PrecisionError("exact norm overflow")
    return total


cdef long long _descend(Py_ssize_t level, double rho, bint zero_above,
                        long long[:, ::1] rows, long long[:, ::1] gram,
                        double[:, ::1] mu, double[::1] b, long long[::1] u,
                        double bound, long long radius_sq, long long nodes,
                        long long max_nodes, list results, Py_ssize_t n):
    cdef double center = 0.0
    cdef double slack, width, d, rho_here
    cdef long long lo, hi, uj, q
    cdef Py_ssize_t i

    for i in range(level + 1, n):
        if u[i] != 0:
            center += (<double>u[i]) * mu[i, level]
    slack = bound - rho
    if slack < 0.0:
        return nodes
    width = sqrt(slack / b[level]) if b[level] > 0.0 else 0.0
    if width > 4.0e18:
        raise PrecisionError("enumeration interval overflow")
    lo = <long long>ceil(-center - width)
    hi = <long long>floor(-center + width)
    if zero_above and lo < 0:
        lo = 0
    uj = lo
    while uj <= hi:
        nodes += 1
        if nodes > max_nodes:
            raise NodeBudgetExceeded(sorted(results), max_nodes)
        d = (<double>uj) + center
        rho_here = rho + d * d * b[level]
        if rho_here <= bound:
            u[level] = uj
            if level == 0:
                if not (zero_above and uj == 0):
                    q = _exact_norm(u, gram, n)
                    if 0 < q <= radius_sq:
                        results.append(q)
            else:
                nodes = _descend(level - 1, rho_here, zero_above and uj == 0,
                                 rows, gram, mu, b, u, bound, radius_sq,
                                 nodes, max_nodes, results, n)
        uj += 1
    u[level] = 0
    return nodes
