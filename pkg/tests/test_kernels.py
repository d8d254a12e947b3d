import itertools
from fractions import Fraction

import numpy as np
import pytest

from latticezeta import _kernels_py as pure
from latticezeta import kernels
from latticezeta.errors import NodeBudgetExceeded


def brute_force_sqnorms(rows, radius_sq, box):
    """Oracle: scan an explicit coordinate box, dedup antipodal pairs."""
    n = len(rows)
    out = []
    for u in itertools.product(range(-box, box + 1), repeat=n):
        if all(x == 0 for x in u):
            continue
        nz = [i for i, x in enumerate(u) if x != 0]
        if u[nz[-1]] < 0:
            continue
        v = [sum(u[i] * rows[i][t] for i in range(n)) for t in range(n)]
        q = sum(x * x for x in v)
        if q <= radius_sq:
            out.append(q)
    return sorted(out)


def random_basis(rng, n, span=4):
    while True:
        m = rng.integers(-span, span + 1, size=(n, n))
        if abs(np.linalg.det(m.astype(float))) > 0.5:
            return m.tolist()


def test_z2_enumeration_golden():
    assert kernels.enumerate_sqnorms([[1, 0], [0, 1]], 4) == [1, 1, 2, 2, 4, 4]


def test_z3_radius_one():
    identity = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert kernels.enumerate_sqnorms(identity, 1) == [1, 1, 1]


def test_enumeration_matches_brute_force_small_bases():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(2, 5))
        rows = random_basis(rng, n)
        red = kernels.lll_reduce_rows(rows)
        radius_sq = int(rng.integers(1, 30))
        got = kernels.enumerate_sqnorms(red, radius_sq)
        assert got == brute_force_sqnorms(red, radius_sq, 8)


def test_backends_agree_on_spectra():
    p = 1099511627791
    rng = np.random.default_rng(3)
    for trial in range(3):
        residues = [int(x) for x in rng.integers(0, p, size=9)]
        rows = [[p] + [0] * 9] + [
            [residues[i]] + [0] * i + [1] + [0] * (8 - i) for i in range(9)
        ]
        compiled_red = kernels.lll_reduce_rows(rows)
        pure_red = pure.lll_reduce_rows([r[:] for r in rows])
        a = kernels.enumerate_sqnorms(compiled_red, 500)
        b = pure.enumerate_sqnorms([r[:] for r in pure_red], 500)
        assert a == b


def test_lll_identity_fixed_point():
    identity = [[1, 0], [0, 1]]
    assert kernels.lll_reduce_rows(identity) == [[1, 0], [0, 1]]


def test_lll_skewed_basis_golden():
    red = kernels.lll_reduce_rows([[1, 0], [1000, 1]])
    assert max(abs(x) for row in red for x in row) <= 1


def exact_det(rows):
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def mat_inverse(rows):
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(rows)]
    for c in range(n):
        piv = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        a[c] = [x / a[c][c] for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def test_lll_transform_is_unimodular():
    rng = np.random.default_rng(5)
    for _ in range(5):
        rows = random_basis(rng, 4, span=9)
        red = kernels.lll_reduce_rows(rows)
        inv = mat_inverse(rows)
        transform = [
            [sum(Fraction(red[i][t]) * inv[t][j] for t in range(4)) for j in range(4)]
            for i in range(4)
        ]
        assert all(x.denominator == 1 for row in transform for x in row)
        assert abs(exact_det(transform)) == 1


def test_lll_preserves_determinant_exactly():
    rng = np.random.default_rng(11)
    rows = random_basis(rng, 5, span=20)
    red = kernels.lll_reduce_rows(rows)
    assert abs(exact_det(red)) == abs(exact_det(rows))


def test_lll_output_is_reduced():
    p = 2147483647
    rng = np.random.default_rng(2)
    residues = [int(x) for x in rng.integers(0, p, size=7)]
    rows = [[p] + [0] * 7] + [
        [residues[i]] + [0] * i + [1] + [0] * (6 - i) for i in range(7)
    ]
    red = kernels.lll_reduce_rows(rows)
    assert pure._is_reduced(red, 0.99)


def test_lll_delta_domain():
    with pytest.raises(ValueError):
        kernels.lll_reduce_rows([[1, 0], [0, 1]], delta=1.5)


def test_exact_lll_agrees_with_float_path():
    rows = [[1, 0], [1000, 1]]
    exact = pure.lll_reduce_rows_exact([r[:] for r in rows])
    assert sorted(sum(x * x for x in r) for r in exact) == [1, 1]


def test_node_budget_exceeded_carries_partial():
    identity = [[1 if i == j else 0 for j in range(6)] for i in range(6)]
    with pytest.raises(NodeBudgetExceeded) as info:
        pure.enumerate_sqnorms(identity, 100, max_nodes=50)
    assert isinstance(info.value.partial, list)
    assert info.value.budget == 50


def test_unimodular_transform_invariance_of_spectrum():
    rng = np.random.default_rng(13)
    rows = random_basis(rng, 3, span=3)
    base = kernels.enumerate_sqnorms(kernels.lll_reduce_rows(rows), 40)
    # apply a random unimodular transform: shear + permutation
    sheared = [r[:] for r in rows]
    sheared[0] = [x + 3 * y for x, y in zip(sheared[0], sheared[1])]
    sheared = [sheared[2], sheared[0], sheared[1]]
    again = kernels.enumerate_sqnorms(kernels.lll_reduce_rows(sheared), 40)
    assert base == again


def test_backend_label():
    assert kernels.BACKEND in ("compiled", "pure")
