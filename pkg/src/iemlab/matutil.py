"""Small dense matrix helpers over exact scalars.

Matrices are tuples of row tuples.  Cocycle matrices have int entries; the
generic helpers also accept Fractions, tracked reals, and field elements
(anything supporting + and *).  Sizes here are the alphabet dimension, at most
a handful, so everything is direct O(d^3) code.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple[tuple, ...]


def identity(d: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_vec(a: Matrix, v: Sequence):
    return [sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def vec_mat(v: Sequence, a: Matrix):
    d = len(a)
    return [sum(v[i] * a[i][j] for i in range(d)) for j in range(len(a[0]))]


def transpose(a: Matrix) -> Matrix:
    return tuple(tuple(a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def col_sums(a: Matrix) -> tuple:
    return tuple(sum(a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def norm_colsum(a: Matrix):
    """max_j sum_i |a_ij|; the operator norm convention used pipeline-wide."""
    return max(sum(abs(a[i][j]) for i in range(len(a))) for j in range(len(a[0])))


def is_positive(a: Matrix) -> bool:
    return all(v > 0 for row in a for v in row)


def is_nonnegative(a: Matrix) -> bool:
    return all(v >= 0 for row in a for v in row)


def det_int(a: Matrix) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    d = len(a)
    m = [list(row) for row in a]
    prev = 1
    sign = 1
    for k in range(d - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, d) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, d):
            for j in range(k + 1, d):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[d - 1][d - 1]


def is_primitive(a: Matrix) -> bool:
    """Some power of the nonnegative matrix is entrywise positive.

    Boolean reachability powers up to the Wielandt bound (d-1)^2 + 1.
    """
    d = len(a)
    reach = tuple(tuple(bool(v) for v in row) for row in a)
    power = reach
    for _ in range((d - 1) ** 2 + 1):
        if all(all(row) for row in power):
            return True
        power = tuple(
            tuple(any(power[i][t] and reach[t][j] for t in range(d)) for j in range(d))
            for i in range(d)
        )
    return False


def mat_to_lists(a: Matrix) -> list[list]:
    return [list(row) for row in a]


def lists_to_mat(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(r) for r in rows)


def mat_fraction_eq(a: Matrix, b: Matrix) -> bool:
    return all(
        Fraction(a[i][j]) == Fraction(b[i][j])
        for i in range(len(a))
        for j in range(len(a[0]))
    )
