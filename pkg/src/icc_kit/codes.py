"""Random linear codes [n, m]_q and the additive masking encoder.

The encoder adds a uniformly random codeword to the data vector:
encoded = data + key.G. Generator matrices are sampled with i.i.d.
uniform entries and no rank screening, so ensemble experiments match
the unconditioned random-code model.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf import (
    FieldMatrix,
    FieldVector,
    _check_prime,
    mat_vec_left,
    rank,
    submatrix_columns,
    vec_add,
    vec_sub,
)


@dataclass(frozen=True)
class LinearCode:
    """An [n, m]_q linear code given by its m x n generator matrix."""

    generator: FieldMatrix

    def __post_init__(self):
        if self.generator.num_rows > self.generator.num_cols:
            raise ValueError("generator must have m <= n")

    @property
    def n(self) -> int:
        return self.generator.num_cols

    @property
    def m(self) -> int:
        return self.generator.num_rows

    @property
    def q(self) -> int:
        return self.generator.q

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "q": self.q,
            "G": [list(row) for row in self.generator.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LinearCode":
        code = cls(FieldMatrix(tuple(tuple(row) for row in obj["G"]), obj["q"]))
        if code.n != obj["n"] or code.m != obj["m"]:
            raise ValueError("declared dimensions disagree with the generator")
        return code


@dataclass(frozen=True)
class SecretKey:
    """Key vector in F_q^m; uniform when produced by key_gen."""

    vector: FieldVector


def sample_code(n: int, m: int, q: int, rng_seed) -> LinearCode:
    """Generator with i.i.d. uniform entries; pure function of the seed."""
    _check_prime(q)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(rng_seed)
    entries = rng.integers(0, q, size=(m, n))
    return LinearCode(FieldMatrix(tuple(tuple(int(v) for v in row) for row in entries), q))


def key_gen(m: int, q: int, rng_seed) -> SecretKey:
    """Uniform key in F_q^m; pure function of the seed."""
    _check_prime(q)
    if m < 1:
        raise ValueError("key length must be at least 1")
    rng = np.random.default_rng(rng_seed)
    values = rng.integers(0, q, size=m)
    return SecretKey(FieldVector(tuple(int(v) for v in values), q))


def encode(x: FieldVector, key: SecretKey, code: LinearCode) -> FieldVector:
    """x + key.G over F_q."""
    if len(x) != code.n:
        raise ValueError(f"data length {len(x)} does not match code length {code.n}")
    return vec_add(x, mat_vec_left(key.vector, code.generator))


def shift(encoded: FieldVector, t: FieldVector, code: LinearCode) -> FieldVector:
    """encoded - t.G over F_q; inverse of encode when t equals the key."""
    if len(encoded) != code.n:
        raise ValueError(f"vector length {len(encoded)} does not match code length {code.n}")
    return vec_sub(encoded, mat_vec_left(t, code.generator))


def subcolumns_full_rank(code: LinearCode, subset: Sequence[int]) -> bool:
    """True iff the m x r submatrix on the given columns has rank r.

    Diagnostic only (equivalent to the masked positions receiving a
    uniform additive pad); not part of the encode path.
    """
    cols = tuple(subset)
    if len(set(cols)) != len(cols):
        raise ValueError("column subset must not repeat indices")
    if len(cols) > code.m:
        raise ValueError(f"subset size {len(cols)} exceeds key length {code.m}")
    return rank(submatrix_columns(code.generator, cols)) == len(cols)
