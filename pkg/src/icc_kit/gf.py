"""Exact arithmetic over prime fields F_q: elements, vectors, matrices, rank."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    f = 2
    while f * f <= q:
        if q % f == 0:
            return False
        f += 1
    return True


def _check_prime(q) -> None:
    if not isinstance(q, int) or isinstance(q, bool) or not is_prime(q):
        raise ValueError(f"field order must be a prime integer, got {q!r}")


def inverse_mod(value: int, q: int) -> int:
    """Multiplicative inverse of value modulo the prime q (extended Euclid)."""
    v = value % q
    if v == 0:
        raise ZeroDivisionError("zero has no multiplicative inverse")
    old_r, r = q, v
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_t, t = t, old_t - quo * t
    return old_t % q


@dataclass(frozen=True)
class FieldElement:
    """A single residue in F_q. Immutable; mixing moduli is a hard error."""

    value: int
    q: int

    def __post_init__(self):
        _check_prime(self.q)
        object.__setattr__(self, "value", int(self.value) % self.q)

    def _other_value(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.q != self.q:
                raise ValueError(f"modulus mismatch: {self.q} vs {other.q}")
            return other.value
        if isinstance(other, int) and not isinstance(other, bool):
            return other % self.q
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other):
        return FieldElement(self.value + self._other_value(other), self.q)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._other_value(other), self.q)

    def __rsub__(self, other):
        return FieldElement(self._other_value(other) - self.value, self.q)

    def __mul__(self, other):
        return FieldElement(self.value * self._other_value(other), self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.q)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.q), self.q)

    def inverse(self) -> "FieldElement":
        return FieldElement(inverse_mod(self.value, self.q), self.q)

    def __truediv__(self, other):
        divisor = self._other_value(other)
        return FieldElement(self.value * inverse_mod(divisor, self.q), self.q)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.q})"


@dataclass(frozen=True)
class FieldVector:
    """Fixed-length vector over F_q. Values are reduced on construction."""

    values: tuple
    q: int

    def __post_init__(self):
        _check_prime(self.q)
        reduced = tuple(int(v) % self.q for v in self.values)
        if not reduced:
            raise ValueError("vector must have at least one coordinate")
        object.__setattr__(self, "values", reduced)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i) -> FieldElement:
        return FieldElement(self.values[i], self.q)

    def __iter__(self):
        return (FieldElement(v, self.q) for v in self.values)

    def __add__(self, other):
        return vec_add(self, other)

    def __sub__(self, other):
        return vec_sub(self, other)

    def to_json(self) -> dict:
        return {"q": self.q, "elements": list(self.values)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldVector":
        return cls(tuple(obj["elements"]), obj["q"])


@dataclass(frozen=True)
class FieldMatrix:
    """Row-major matrix over F_q. Entries are reduced on construction."""

    entries: tuple
    q: int

    def __post_init__(self):
        _check_prime(self.q)
        rows = tuple(tuple(int(v) % self.q for v in row) for row in self.entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise ValueError("matrix rows must all have the same length")
        object.__setattr__(self, "entries", rows)

    @property
    def num_rows(self) -> int:
        return len(self.entries)

    @property
    def num_cols(self) -> int:
        return len(self.entries[0])

    def entry(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.entries[i][j], self.q)

    def row(self, i: int) -> FieldVector:
        return FieldVector(self.entries[i], self.q)

    def column(self, j: int) -> FieldVector:
        return FieldVector(tuple(row[j] for row in self.entries), self.q)

    def to_json(self) -> dict:
        return {"q": self.q, "rows": [list(row) for row in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldMatrix":
        return cls(tuple(tuple(row) for row in obj["rows"]), obj["q"])

    @classmethod
    def identity(cls, size: int, q: int) -> "FieldMatrix":
        return cls(
            tuple(tuple(1 if i == j else 0 for j in range(size)) for i in range(size)),
            q,
        )


def _check_same_modulus(a, b) -> None:
    if a.q != b.q:
        raise ValueError(f"modulus mismatch: {a.q} vs {b.q}")


def vec_add(a: FieldVector, b: FieldVector) -> FieldVector:
    """Componentwise sum of two vectors over the same field."""
    _check_same_modulus(a, b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return FieldVector(tuple(x + y for x, y in zip(a.values, b.values)), a.q)


def vec_sub(a: FieldVector, b: FieldVector) -> FieldVector:
    _check_same_modulus(a, b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return FieldVector(tuple(x - y for x, y in zip(a.values, b.values)), a.q)


def mat_vec_left(k: FieldVector, matrix: FieldMatrix) -> FieldVector:
    """Row-vector times matrix: returns k.M with length matrix.num_cols."""
    _check_same_modulus(k, matrix)
    if len(k) != matrix.num_rows:
        raise ValueError(
            f"dimension mismatch: vector length {len(k)} vs {matrix.num_rows} rows"
        )
    cols = matrix.num_cols
    out = [0] * cols
    for kv, row in zip(k.values, matrix.entries):
        if kv:
            for j in range(cols):
                out[j] += kv * row[j]
    return FieldVector(tuple(out), matrix.q)


def _echelon(rows: list, q: int):
    # In-place forward elimination with back-substitution; returns pivot columns.
    pivots = []
    pr = 0
    num_rows = len(rows)
    num_cols = len(rows[0]) if rows else 0
    for col in range(num_cols):
        piv = None
        for i in range(pr, num_rows):
            if rows[i][col] % q:
                piv = i
                break
        if piv is None:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        inv = inverse_mod(rows[pr][col], q)
        rows[pr] = [(v * inv) % q for v in rows[pr]]
        for i in range(num_rows):
            if i != pr and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [(a - factor * b) % q for a, b in zip(rows[i], rows[pr])]
        pivots.append(col)
        pr += 1
        if pr == num_rows:
            break
    return pivots


def rank(matrix: FieldMatrix) -> int:
    """Rank over F_q by Gaussian elimination."""
    rows = [list(row) for row in matrix.entries]
    return len(_echelon(rows, matrix.q))


def pivot_columns(matrix: FieldMatrix) -> tuple:
    """Pivot column indices found by elimination in left-to-right order."""
    rows = [list(row) for row in matrix.entries]
    return tuple(_echelon(rows, matrix.q))


def submatrix_columns(matrix: FieldMatrix, cols: Sequence[int]) -> FieldMatrix:
    """New matrix keeping the given columns, in the given order."""
    for c in cols:
        if not 0 <= c < matrix.num_cols:
            raise ValueError(f"column index {c} out of range")
    return FieldMatrix(
        tuple(tuple(row[c] for c in cols) for row in matrix.entries), matrix.q
    )
