"""Arithmetic and small linear algebra over Z_d for prime d.

Matrices are plain ``numpy`` integer arrays whose entries are kept in ``[0, d)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Modulus",
    "FieldElement",
    "check_prime",
    "inverse",
    "is_prime",
    "rref",
    "rank",
    "solve",
]


def is_prime(d: int) -> bool:
    """Deterministic trial-division primality test (moduli here are small)."""
    if d < 2:
        return False
    if d < 4:
        return True
    if d % 2 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Modulus:
    d: int

    def __post_init__(self):
        if not isinstance(self.d, (int, np.integer)) or not is_prime(int(self.d)):
            raise ValueError(f"dimension must be prime, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))

    def __int__(self) -> int:
        return self.d

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(value, self.d)


def check_prime(d: int) -> Modulus:
    return Modulus(d)


def _modulus_value(d) -> int:
    return d.d if isinstance(d, Modulus) else int(d)


@dataclass(frozen=True)
class FieldElement:
    """An element of Z_d; every result is reduced mod d."""

    value: int
    d: int

    def __post_init__(self):
        object.__setattr__(self, "d", _modulus_value(self.d))
        object.__setattr__(self, "value", int(self.value) % self.d)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.d != self.d:
                raise ValueError(f"cannot mix moduli {self.d} and {other.d}")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.d)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.d)

    def __rsub__(self, other):
        return FieldElement(self._coerce(other) - self.value, self.d)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.d)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.d)

    def __truediv__(self, other):
        return self * inverse(self._coerce(other), self.d)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.d == other.d and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.d
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.d))

    def __int__(self):
        return self.value

    def inverse(self) -> "FieldElement":
        return FieldElement(inverse(self.value, self.d), self.d)


def inverse(a, d) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``d``."""
    d = _modulus_value(d)
    if isinstance(a, FieldElement):
        if a.d != d:
            raise ValueError(f"cannot mix moduli {a.d} and {d}")
        a = a.value
    a = int(a) % d
    if a == 0:
        raise ZeroDivisionError("no inverse of zero")
    return pow(a, -1, d)


def _inverse_table(d: int) -> np.ndarray:
    table = np.zeros(d, dtype=np.int64)
    for a in range(1, d):
        table[a] = pow(a, -1, d)
    return table


def rref(
    matrix: np.ndarray,
    d: int,
    *,
    column_order: Sequence[int] | None = None,
    skip_rows: int = 0,
) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of ``matrix`` over Z_d.

    Rows ``[0, skip_rows)`` are never used as pivot rows but are still reduced
    against the pivots found below them. Pivot columns are tried in
    ``column_order`` (default: left to right). Returns ``(R, pivots)`` where
    ``pivots[i]`` is the pivot column of row ``skip_rows + i``.
    """
    R = np.array(matrix, dtype=np.int64) % d
    n_rows, n_cols = R.shape
    order = np.arange(n_cols) if column_order is None else np.asarray(list(column_order), dtype=np.int64)
    inv = _inverse_table(d)
    pivots: list[int] = []
    row = skip_rows
    for col in order.tolist():
        if row >= n_rows:
            break
        # first nonzero entry of this column at or below ``row``
        below = R[row:, col]
        p = int(below.argmax())
        if below[p] == 0:
            continue
        p += row
        if p != row:
            R[[row, p]] = R[[p, row]]
        R[row] = (R[row] * inv[R[row, col]]) % d
        factors = R[:, col].copy()
        factors[row] = 0
        hit = factors.nonzero()[0]
        if hit.size:
            R[hit] = (R[hit] - np.outer(factors[hit], R[row])) % d
        pivots.append(col)
        row += 1
    return R, pivots


def rank(matrix: np.ndarray, d: int) -> int:
    if np.size(matrix) == 0:
        return 0
    return len(rref(matrix, d)[1])


def solve(A: np.ndarray, b: Iterable[int], d: int, *, prefer: Sequence[int] | None = None):
    """Solve ``A x = b`` over Z_d; returns one solution or ``None``.

    Free variables are set to zero. ``prefer`` orders the columns tried as
    pivots, so the returned solution is supported on early columns of it.
    """
    A = np.array(A, dtype=np.int64) % d
    b = np.array(list(b), dtype=np.int64).reshape(-1, 1) % d
    n_cols = A.shape[1]
    if n_cols == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    order = list(range(n_cols)) if prefer is None else list(prefer)
    aug = np.hstack([A, b])
    R, pivots = rref(aug, d, column_order=order + [n_cols])
    if n_cols in pivots:
        return None
    x = np.zeros(n_cols, dtype=np.int64)
    for i, col in enumerate(pivots):
        x[col] = R[i, n_cols]
    return x
