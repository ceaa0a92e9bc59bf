"""Sparse multivariate polynomials over F_q with a total-degree bound.

Exponents are stored reduced through x^q = x, so every stored exponent is
below q and total_degree is well defined against the degree bound used by
the evaluation-code machinery. The zero polynomial is the empty term map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .gf import FieldElement, FieldVector, _check_prime


def reduce_exponent(e: int, q: int) -> int:
    # x^q = x in F_q, so positive exponents wrap with period q - 1.
    if e < 0:
        raise ValueError("exponents must be non-negative")
    if e == 0:
        return 0
    return (e - 1) % (q - 1) + 1


@lru_cache(maxsize=None)
def monomials(num_vars: int, max_degree: int, q: int) -> tuple:
    """All exponent tuples with entries below q and total degree at most
    max_degree, in lexicographic order. Shared by random polynomial
    generation and the evaluation-code basis."""
    _check_prime(q)
    if num_vars < 0 or max_degree < 0:
        raise ValueError("num_vars and max_degree must be non-negative")
    if num_vars == 0:
        return ((),)
    out = []
    for e in range(min(q - 1, max_degree) + 1):
        for rest in monomials(num_vars - 1, max_degree - e, q):
            out.append((e,) + rest)
    return tuple(out)


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial: map from reduced exponent tuple to nonzero coefficient."""

    num_vars: int
    q: int
    terms: dict
    degree_bound: int = field(default=-1)

    def __post_init__(self):
        _check_prime(self.q)
        if self.num_vars < 1:
            raise ValueError("polynomial needs at least one variable")
        for exp, coef in self.terms.items():
            if len(exp) != self.num_vars:
                raise ValueError(f"exponent tuple {exp} has wrong length")
            if any(not 0 <= e < self.q for e in exp):
                raise ValueError(f"exponent tuple {exp} is not reduced below q={self.q}")
            if not 0 < coef < self.q:
                raise ValueError(f"stored coefficients must be nonzero residues, got {coef}")
        max_deg = max((sum(exp) for exp in self.terms), default=0)
        if self.degree_bound < 0:
            object.__setattr__(self, "degree_bound", max_deg)
        elif max_deg > self.degree_bound:
            raise ValueError(
                f"term degree {max_deg} exceeds declared bound {self.degree_bound}"
            )

    @classmethod
    def from_terms(cls, num_vars: int, q: int, raw_terms, degree_bound: int = -1):
        """Build from (exponent tuple, coefficient) pairs; reduces exponents
        via x^q = x, merges collisions, and drops zero coefficients."""
        merged: dict = {}
        items = raw_terms.items() if isinstance(raw_terms, dict) else raw_terms
        for exp, coef in items:
            red = tuple(reduce_exponent(int(e), q) for e in exp)
            merged[red] = (merged.get(red, 0) + int(coef)) % q
        cleaned = {exp: c for exp, c in merged.items() if c}
        return cls(num_vars, q, cleaned, degree_bound)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if self.q != other.q or self.num_vars != other.num_vars:
            raise ValueError("polynomials live over different rings")
        raw = list(self.terms.items()) + list(other.terms.items())
        return MultiPoly.from_terms(
            self.num_vars, self.q, raw, max(self.degree_bound, other.degree_bound)
        )

    def to_json(self) -> dict:
        ordered = sorted(self.terms.items())
        return {
            "n": self.num_vars,
            "q": self.q,
            "d": self.degree_bound,
            "terms": [{"exp": list(exp), "coef": coef} for exp, coef in ordered],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MultiPoly":
        raw = [(tuple(t["exp"]), t["coef"]) for t in obj["terms"]]
        return cls.from_terms(obj["n"], obj["q"], raw, obj.get("d", -1))


def total_degree(f: MultiPoly) -> int:
    """Largest exponent sum over stored terms; 0 for the zero polynomial
    (check f.is_zero to tell the zero polynomial from a constant)."""
    return max((sum(exp) for exp in f.terms), default=0)


def evaluate(f: MultiPoly, x: FieldVector) -> FieldElement:
    """f(x) by term-wise product and sum over F_q."""
    if x.q != f.q:
        raise ValueError(f"modulus mismatch: {f.q} vs {x.q}")
    if len(x) != f.num_vars:
        raise ValueError(f"point has {len(x)} coordinates, expected {f.num_vars}")
    total = 0
    for exp, coef in f.terms.items():
        prod = coef
        for xv, e in zip(x.values, exp):
            if e:
                prod = prod * pow(xv, e, f.q) % f.q
        total += prod
    return FieldElement(total % f.q, f.q)


@lru_cache(maxsize=None)
def _pow_table(q: int) -> np.ndarray:
    table = np.array([[pow(x, e, q) for e in range(q)] for x in range(q)], dtype=np.int64)
    table.setflags(write=False)
    return table


def evaluate_batch(f: MultiPoly, points: np.ndarray) -> np.ndarray:
    """Evaluate f at many points at once.

    points: integer array of shape (count, num_vars) with entries in [0, q).
    Returns an int64 array of f values. Matches evaluate() pointwise.
    """
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != f.num_vars:
        raise ValueError(f"points must have shape (count, {f.num_vars})")
    if f.is_zero:
        return np.zeros(pts.shape[0], dtype=np.int64)
    exps = np.array(sorted(f.terms), dtype=np.int64)
    coefs = np.array([f.terms[tuple(e)] for e in exps.tolist()], dtype=np.int64)
    pw = _pow_table(f.q)
    vals = np.ones((pts.shape[0], exps.shape[0]), dtype=np.int64)
    for v in range(f.num_vars):
        vals = vals * pw[pts[:, v][:, None], exps[None, :, v]] % f.q
    return vals @ coefs % f.q


def random_poly(num_vars: int, degree: int, q: int, rng_seed) -> MultiPoly:
    """Uniformly random coefficients over every admissible monomial
    (per-variable exponent below q, total degree at most `degree`).
    Deterministic under rng_seed; zero draws drop the monomial."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    basis = monomials(num_vars, degree, q)
    rng = np.random.default_rng(rng_seed)
    coefs = rng.integers(0, q, size=len(basis))
    terms = {exp: int(c) for exp, c in zip(basis, coefs) if c}
    return MultiPoly(num_vars, q, terms, degree)
