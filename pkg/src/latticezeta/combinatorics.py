"""Exact enumeration of set partitions, compositions, and the 0/±1 integer
matrix classes that index multi-sum expansions of lattice averages.

All enumerations are deterministic: partitions are ordered lexicographically by
their growth string (the block index of each element), compositions
lexicographically, and matrices follow the partition order of their supports.
Ground-set elements and matrix column indices are 1-based throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

# Enumeration guards. Bell numbers grow super-exponentially; these caps keep
# worst-case enumerations at desk scale (Bell(12) ~ 4.2e6).
MAX_PARTITION_K = 12
MAX_COMPOSITION_K = 20
MAX_MATRIX_K = 8


@dataclass(frozen=True)
class SetPartition:
    """Partition of {1..k} into disjoint blocks, sorted by block minimum."""

    blocks: tuple[tuple[int, ...], ...]
    k: int

    def __post_init__(self):
        seen = set()
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            if any(b in seen for b in block):
                raise ValueError("blocks not disjoint")
            seen.update(block)
        if seen != set(range(1, self.k + 1)):
            raise ValueError(f"blocks do not cover 1..{self.k}")
        if list(self.blocks) != sorted(self.blocks, key=min):
            raise ValueError("blocks not sorted by minimum element")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def to_text(self) -> str:
        return ";".join(" ".join(str(e) for e in block) for block in self.blocks)

    @classmethod
    def from_text(cls, text: str) -> "SetPartition":
        blocks = tuple(
            tuple(int(tok) for tok in part.split()) for part in text.split(";")
        )
        k = sum(len(b) for b in blocks)
        return cls(blocks, k)


@dataclass(frozen=True)
class Composition:
    """Ordered tuple of positive integers (k_1, ..., k_m) summing to k."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive integers")

    @property
    def k(self) -> int:
        return sum(self.parts)

    @property
    def m(self) -> int:
        return len(self.parts)


@dataclass(frozen=True)
class AdmissibleMatrix:
    """Integer m x k matrix from the multi-sum expansion, with its division.

    ``division`` is the pair (nu, mu) of 1-based column index tuples: nu_j is
    the column carrying the single entry q of row j, mu lists the remaining
    columns in increasing order.  The k x k identity (m = k) is allowed as the
    distinguished diagonal element even though proper divisions require
    m <= k-1.
    """

    entries: tuple[tuple[int, ...], ...]
    q: int = 1
    division: tuple[tuple[int, ...], tuple[int, ...]] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.division is None:
            object.__setattr__(self, "division", derive_division(self.entries))
        validate_admissible(self.entries, self.q, self.division)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def k(self) -> int:
        return len(self.entries[0])

    @property
    def is_identity(self) -> bool:
        return self.m == self.k

    def row_weights(self) -> tuple[int, ...]:
        """Number of nonzero entries in each row."""
        return tuple(sum(1 for e in row if e != 0) for row in self.entries)

    def elementary_divisors(self) -> tuple[int, ...]:
        return smith_normal_form(self.entries)

    def to_text(self) -> str:
        return "\n".join(" ".join(str(e) for e in row) for row in self.entries)

    @classmethod
    def from_text(cls, text: str, q: int = 1) -> "AdmissibleMatrix":
        entries = tuple(
            tuple(int(tok) for tok in line.split())
            for line in text.strip().splitlines()
        )
        return cls(entries, q)


def derive_division(
    entries: tuple[tuple[int, ...], ...],
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Division (nu, mu) read off the matrix: nu_i is the first nonzero column
    of row i.  Raises if some row is identically zero."""
    nu = []
    for i, row in enumerate(entries):
        for j, e in enumerate(row):
            if e != 0:
                nu.append(j + 1)
                break
        else:
            raise ValueError(f"row {i + 1} is identically zero")
    k = len(entries[0])
    mu = tuple(j for j in range(1, k + 1) if j not in set(nu))
    return tuple(nu), mu


def validate_admissible(
    entries: tuple[tuple[int, ...], ...],
    q: int,
    division: tuple[tuple[int, ...], tuple[int, ...]],
) -> None:
    """Check every admissibility invariant; raises ValueError on failure.

    The identity matrix (m = k) is accepted with nu = (1, ..., k).
    """
    m = len(entries)
    if m == 0:
        raise ValueError("empty matrix")
    k = len(entries[0])
    if any(len(row) != k for row in entries):
        raise ValueError("ragged matrix")
    if q < 1:
        raise ValueError("q must be a positive integer")
    if not (m <= k):
        raise ValueError("more rows than columns")

    nu, mu = division
    if len(nu) != m or len(mu) != k - m:
        raise ValueError("division has wrong shape")
    if list(nu) != sorted(nu) or len(set(nu)) != m:
        raise ValueError("nu not strictly increasing")
    if list(mu) != sorted(mu) or len(set(mu)) != k - m:
        raise ValueError("mu not strictly increasing")
    if set(nu) | set(mu) != set(range(1, k + 1)):
        raise ValueError("division does not cover 1..k")

    for j in range(k):
        if all(entries[i][j] == 0 for i in range(m)):
            raise ValueError(f"column {j + 1} is identically zero")

    g = 0
    for row in entries:
        for e in row:
            g = math.gcd(g, e)
    if g != 1:
        raise ValueError("gcd of entries is not 1")

    for i in range(m):
        for j, col in enumerate(nu):
            want = q if i == j else 0
            if entries[i][col - 1] != want:
                raise ValueError(f"entry ({i + 1},{col}) != q*delta")
    for i in range(m):
        for col in mu:
            if col < nu[i] and entries[i][col - 1] != 0:
                raise ValueError(f"entry ({i + 1},{col}) must vanish left of nu_{i + 1}")

    # Consequence of the constraints above: the first elementary divisor is
    # coprime to q.  Cheap to recheck exactly, so do it.
    eps = smith_normal_form(entries)
    if math.gcd(eps[0], q) != 1:
        raise ValueError("first elementary divisor shares a factor with q")


def smith_normal_form(entries: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    """Diagonal of the Smith normal form (exact integer arithmetic).

    Returns the elementary divisors (eps_1 | eps_2 | ...), nonnegative, one per
    rank index, padded with zeros up to min(m, k).
    """
    a = [list(row) for row in entries]
    m, k = len(a), len(a[0])
    divisors = []
    top = 0
    while top < min(m, k):
        # Find a nonzero pivot below/right of (top, top).
        pivot = None
        for i in range(top, m):
            for j in range(top, k):
                if a[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        pi, pj = pivot
        a[top], a[pi] = a[pi], a[top]
        for row in a:
            row[top], row[pj] = row[pj], row[top]
        while True:
            # Clear column top: subtract the nearest multiple of the pivot
            # row; a nonzero remainder becomes the (strictly smaller) pivot.
            for i in range(top + 1, m):
                while a[i][top] != 0:
                    qq = a[i][top] // a[top][top]
                    a[i] = [x - qq * y for x, y in zip(a[i], a[top])]
                    if a[i][top] != 0:
                        a[top], a[i] = a[i], a[top]
            # Clear row top the same way with column operations.
            for j in range(top + 1, k):
                while a[top][j] != 0:
                    qq = a[top][j] // a[top][top]
                    for row in a:
                        row[j] -= qq * row[top]
                    if a[top][j] != 0:
                        for row in a:
                            row[top], row[j] = row[j], row[top]
            if all(a[i][top] == 0 for i in range(top + 1, m)) and all(
                a[top][j] == 0 for j in range(top + 1, k)
            ):
                # Enforce divisibility of the remaining block by the pivot;
                # folding an offending row back in restarts the elimination
                # with a strictly smaller eventual pivot.
                d = abs(a[top][top])
                bad = None
                for i in range(top + 1, m):
                    if any(a[i][j] % d != 0 for j in range(top + 1, k)):
                        bad = i
                        break
                if bad is None:
                    break
                a[top] = [x + y for x, y in zip(a[top], a[bad])]
        divisors.append(abs(a[top][top]))
        top += 1
    while len(divisors) < min(m, k):
        divisors.append(0)
    return tuple(divisors)


def bell_number(k: int) -> int:
    """k-th Bell number by the Bell-triangle recurrence (independent of any
    enumeration in this module)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def enumerate_set_partitions(k: int) -> list[SetPartition]:
    """All partitions of {1..k}, in growth-string lexicographic order."""
    if not 1 <= k <= MAX_PARTITION_K:
        raise ValueError(f"k must be in [1, {MAX_PARTITION_K}]")
    out: list[SetPartition] = []
    blocks: list[list[int]] = []

    def assign(element: int) -> None:
        if element > k:
            out.append(SetPartition(tuple(tuple(b) for b in blocks), k))
            return
        for b in blocks:
            b.append(element)
            assign(element + 1)
            b.pop()
        blocks.append([element])
        assign(element + 1)
        blocks.pop()

    assign(1)
    return out


def enumerate_compositions(k: int) -> list[Composition]:
    """All 2^(k-1) ordered tuples of positive integers summing to k, in
    lexicographic order."""
    if not 1 <= k <= MAX_COMPOSITION_K:
        raise ValueError(f"k must be in [1, {MAX_COMPOSITION_K}]")
    out: list[Composition] = []

    def extend(prefix: list[int], remaining: int) -> None:
        if remaining == 0:
            out.append(Composition(tuple(prefix)))
            return
        for part in range(1, remaining + 1):
            prefix.append(part)
            extend(prefix, remaining - part)
            prefix.pop()

    extend([], k)
    return out


def _matrix_from_support(
    supports: list[list[int]], k: int, signs: dict[int, int] | None = None
) -> AdmissibleMatrix:
    """Build the matrix whose row i is supported on ``supports[i]`` (1-based
    columns), with +1 at each row's leading column and ``signs`` elsewhere."""
    entries = []
    for support in supports:
        row = [0] * k
        leader = min(support)
        for col in support:
            row[col - 1] = 1 if col == leader else (signs or {}).get(col, 1)
        entries.append(tuple(row))
    return AdmissibleMatrix(tuple(entries), q=1)


def enumerate_partition_matrices(k: int) -> list[AdmissibleMatrix]:
    """The class D(k): 0/1 matrices with exactly one 1 per column satisfying
    the admissibility constraints, together with the k x k identity.

    Generated by assigning each column in turn to an existing row or to a new
    row (column 1 always opens row 1); the all-new assignment yields the
    identity.  Count equals the k-th Bell number.
    """
    if not 1 <= k <= MAX_MATRIX_K:
        raise ValueError(f"k must be in [1, {MAX_MATRIX_K}]")
    out: list[AdmissibleMatrix] = []
    supports: list[list[int]] = []

    def assign(col: int) -> None:
        if col > k:
            out.append(_matrix_from_support(supports, k))
            return
        for s in supports:
            s.append(col)
            assign(col + 1)
            s.pop()
        supports.append([col])
        assign(col + 1)
        supports.pop()

    assign(1)
    return out


def matrix_to_partition(matrix: AdmissibleMatrix) -> SetPartition:
    """The bijection from D(k) to partitions of {1..k}: block i collects the
    columns whose nonzero entry sits in row i."""
    if matrix.q != 1 or any(e not in (0, 1) for row in matrix.entries for e in row):
        raise ValueError("matrix is not in D(k): entries must be 0/1 with q = 1")
    for j in range(matrix.k):
        if sum(row[j] for row in matrix.entries) != 1:
            raise ValueError("matrix is not in D(k): each column needs exactly one 1")
    blocks = tuple(
        tuple(j + 1 for j, e in enumerate(row) if e == 1) for row in matrix.entries
    )
    return SetPartition(blocks, matrix.k)


def enumerate_signed_matrices(parts: Composition) -> list[AdmissibleMatrix]:
    """The class X_{k_1..k_m}: admissible m x k matrices with entries in
    {0, +1, -1}, exactly one nonzero per column and k_i nonzeros in row i.

    Row i's leading column is forced to be the smallest column unused by
    earlier rows and carries +1; the remaining k - m entries range over both
    signs.
    """
    k, m = parts.k, parts.m
    if not 1 <= m <= k - 1:
        raise ValueError("composition must have 1 <= m <= k-1 parts")
    if k > MAX_MATRIX_K:
        raise ValueError(f"k must be at most {MAX_MATRIX_K}")

    out: list[AdmissibleMatrix] = []

    def choose_rows(i: int, unused: list[int], supports: list[list[int]]) -> None:
        if i == m:
            free_cols = [c for s in supports for c in s if c != min(s)]
            for signing in itertools.product((1, -1), repeat=len(free_cols)):
                out.append(
                    _matrix_from_support(supports, k, dict(zip(free_cols, signing)))
                )
            return
        leader, rest = unused[0], unused[1:]
        for extra in itertools.combinations(rest, parts.parts[i] - 1):
            chosen = [leader, *extra]
            supports.append(chosen)
            choose_rows(i + 1, [c for c in rest if c not in extra], supports)
            supports.pop()

    choose_rows(0, list(range(1, k + 1)), [])
    return out


def count_signed_matrices(parts: Composition) -> int:
    """Closed-form size of X_{k_1..k_m}:

        2^(k-m) * prod_{i=1}^{m-1} C(k - k_1 - ... - k_{i-1} - 1, k_i - 1)

    with the empty product equal to 1.  Must agree with
    ``len(enumerate_signed_matrices(parts))``; the enumeration is the oracle.
    """
    k, m = parts.k, parts.m
    if not 1 <= m <= k - 1:
        raise ValueError("composition must have 1 <= m <= k-1 parts")
    total = 1
    used = 0
    for i in range(m - 1):
        total *= math.comb(k - used - 1, parts.parts[i] - 1)
        used += parts.parts[i]
    return 2 ** (k - m) * total
