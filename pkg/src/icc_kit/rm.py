"""Reed-Muller evaluation codes RM_q(d, m): dimension, information sets,
replicated super-sets for straggler tolerance, and decode-by-interpolation.

A codeword is the evaluation table of an m-variate polynomial of total
degree at most d over all q^m points of F_q^m, in lexicographic point
order. The code dimension equals the number of reduced monomials, which
is also the download cost of the distributed-evaluation protocol.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf import FieldVector, _check_prime, inverse_mod
from .poly import _pow_table, monomials


def _check_rm_params(q: int, d: int, m: int) -> None:
    _check_prime(q)
    if m < 1:
        raise ValueError("need at least one variable")
    if d < 0:
        raise ValueError("degree bound must be non-negative")
    if d >= m * (q - 1):
        # beyond this bound every function on F_q^m is a codeword and the
        # evaluation code degenerates; reject rather than guess a fallback
        raise ValueError(f"degree bound must satisfy d < m(q-1), got d={d}, m={m}, q={q}")


@lru_cache(maxsize=None)
def eval_points(q: int, m: int) -> tuple:
    """All q^m points of F_q^m in lexicographic order."""
    return tuple(itertools.product(range(q), repeat=m))


def rm_dimension(q: int, d: int, m: int) -> int:
    """Number of monomials with entries below q and total degree at most d."""
    _check_rm_params(q, d, m)
    return len(monomials(m, d, q))


@dataclass(frozen=True)
class RMCode:
    q: int
    d: int
    m: int

    def __post_init__(self):
        _check_rm_params(self.q, self.d, self.m)

    @property
    def monomial_basis(self) -> tuple:
        return monomials(self.m, self.d, self.q)

    @property
    def eval_points(self) -> tuple:
        return eval_points(self.q, self.m)

    @property
    def dimension(self) -> int:
        return len(self.monomial_basis)


@lru_cache(maxsize=None)
def rm_code(q: int, d: int, m: int) -> RMCode:
    return RMCode(q, d, m)


@dataclass(frozen=True)
class InfoSet:
    """Ordered points whose restricted generator matrix is invertible.

    sources, when present, maps each point to the super-set entry index
    that supplied its value during straggler recovery.
    """

    points: tuple
    sources: tuple = None


@dataclass(frozen=True)
class SuperSet:
    """Multiset of evaluation points such that, after up to
    straggler_budget losses, the survivors still contain an information
    set. replica_size marks the replicated layout built by
    trivial_superset; hand-built irregular sets leave it None and rely on
    the generic pivot search."""

    entries: tuple
    straggler_budget: int
    code_params: tuple  # (q, d, m)
    replica_size: int = None


@lru_cache(maxsize=None)
def _generator_matrix(q: int, d: int, m: int) -> np.ndarray:
    """Monomials-by-points evaluation matrix, shape (dimension, q^m)."""
    pts = np.array(eval_points(q, m), dtype=np.int64)
    mons = np.array(monomials(m, d, q), dtype=np.int64)
    pw = _pow_table(q)
    out = np.ones((mons.shape[0], pts.shape[0]), dtype=np.int64)
    for v in range(m):
        out = out * pw[pts[None, :, v], mons[:, v][:, None]] % q
    out.setflags(write=False)
    return out


def _eliminate_rows(mat: np.ndarray, q: int):
    """Row-reduce in place; returns pivot column indices."""
    pivots = []
    pr = 0
    for col in range(mat.shape[1]):
        nz = np.nonzero(mat[pr:, col])[0]
        if nz.size == 0:
            continue
        piv = pr + int(nz[0])
        if piv != pr:
            mat[[pr, piv]] = mat[[piv, pr]]
        inv = inverse_mod(int(mat[pr, col]), q)
        mat[pr] = mat[pr] * inv % q
        others = np.nonzero(mat[:, col])[0]
        others = others[others != pr]
        if others.size:
            mat[others] = (mat[others] - np.outer(mat[others, col], mat[pr])) % q
        pivots.append(col)
        pr += 1
        if pr == mat.shape[0]:
            break
    return pivots


@lru_cache(maxsize=None)
def _info_pivots(q: int, d: int, m: int) -> tuple:
    mat = _generator_matrix(q, d, m).copy()
    pivots = _eliminate_rows(mat, q)
    # full row rank is guaranteed for d < m(q-1)
    assert len(pivots) == mat.shape[0]
    return tuple(pivots)


def _matrix_inverse_mod(mat: np.ndarray, q: int) -> np.ndarray:
    size = mat.shape[0]
    if mat.shape != (size, size):
        raise ValueError("matrix must be square")
    aug = np.concatenate([mat % q, np.eye(size, dtype=np.int64)], axis=1)
    pivots = _eliminate_rows(aug, q)
    if pivots != list(range(size)):
        raise ValueError("matrix is singular over F_q")
    return aug[:, size:]


@lru_cache(maxsize=None)
def _restricted_inverse(q: int, d: int, m: int) -> np.ndarray:
    """Inverse of the points-by-monomials matrix on the canonical
    information set; rows follow the canonical point order."""
    pivots = _info_pivots(q, d, m)
    restricted = _generator_matrix(q, d, m)[:, pivots].T.copy()
    inv = _matrix_inverse_mod(restricted, q)
    inv.setflags(write=False)
    return inv


def information_set(rm: RMCode) -> InfoSet:
    """Pivot evaluation points of the generator under elimination in
    canonical point order; deterministic for a given (q, d, m)."""
    pts = rm.eval_points
    return InfoSet(points=tuple(pts[c] for c in _info_pivots(rm.q, rm.d, rm.m)))


def basis_at(rm: RMCode, point) -> np.ndarray:
    """Values of every basis monomial at one point, as int64."""
    pw = _pow_table(rm.q)
    mons = np.array(rm.monomial_basis, dtype=np.int64)
    out = np.ones(mons.shape[0], dtype=np.int64)
    for v in range(rm.m):
        out = out * pw[point[v] % rm.q, mons[:, v]] % rm.q
    return out


def trivial_superset(rm: RMCode, stragglers: int) -> SuperSet:
    """stragglers + 1 replicas of the canonical information set; total
    size (stragglers + 1) * dimension."""
    if stragglers < 0:
        raise ValueError("straggler budget must be non-negative")
    base = information_set(rm).points
    return SuperSet(
        entries=base * (stragglers + 1),
        straggler_budget=stragglers,
        code_params=(rm.q, rm.d, rm.m),
        replica_size=len(base),
    )


def select_available_infoset(ss: SuperSet, responded) -> InfoSet:
    """Pick an information set among responding entries.

    For the replicated layout each position takes its lowest-index
    responding replica. Otherwise (or if a position lost every replica)
    fall back to a generic search: walk responding points in canonical
    order and keep those that grow the span of basis rows.
    """
    resp = sorted(set(responded))
    for idx in resp:
        if not 0 <= idx < len(ss.entries):
            raise ValueError(f"responder index {idx} out of range")
    resp_set = set(resp)
    if ss.replica_size:
        size = ss.replica_size
        replicas = len(ss.entries) // size
        sources = []
        for pos in range(size):
            chosen = next(
                (rep * size + pos for rep in range(replicas) if rep * size + pos in resp_set),
                None,
            )
            if chosen is None:
                sources = None
                break
            sources.append(chosen)
        if sources is not None:
            return InfoSet(points=ss.entries[:size], sources=tuple(sources))

    q, d, m = ss.code_params
    rm = rm_code(q, d, m)
    dim = rm.dimension
    first_source = {}
    for idx in resp:
        first_source.setdefault(ss.entries[idx], idx)
    rows = np.zeros((dim, dim), dtype=np.int64)
    filled = 0
    chosen_points = []
    chosen_sources = []
    for point in sorted(first_source):
        cand = basis_at(rm, point)
        trial = rows.copy()
        trial[filled] = cand
        if len(_eliminate_rows(trial[: filled + 1], q)) == filled + 1:
            rows[filled] = cand
            filled += 1
            chosen_points.append(point)
            chosen_sources.append(first_source[point])
            if filled == dim:
                return InfoSet(points=tuple(chosen_points), sources=tuple(chosen_sources))
    raise ValueError("responding entries do not contain an information set")


def decode_at_key(rm: RMCode, answers, key: FieldVector):
    """Interpolate the unique degree-bounded polynomial matching the
    answers on an information set, then evaluate it at the key point.

    answers: mapping from evaluation point (tuple) to value in F_q.
    Raises ValueError when the answered points do not pin the polynomial
    down (the restricted system is singular).
    """
    from .gf import FieldElement

    if key.q != rm.q:
        raise ValueError(f"modulus mismatch: {rm.q} vs {key.q}")
    if len(key) != rm.m:
        raise ValueError(f"key length {len(key)} does not match {rm.m} variables")
    pts = sorted(answers)
    values = np.array([int(answers[z]) % rm.q for z in pts], dtype=np.int64)
    dim = rm.dimension
    canonical = information_set(rm).points
    if tuple(pts) == canonical:
        coeffs = _restricted_inverse(rm.q, rm.d, rm.m) @ values % rm.q
    else:
        if len(pts) < dim:
            raise ValueError(f"need at least {dim} answered points, got {len(pts)}")
        system = np.zeros((len(pts), dim + 1), dtype=np.int64)
        for i, z in enumerate(pts):
            system[i, :dim] = basis_at(rm, z)
        system[:, dim] = values
        pivots = _eliminate_rows(system, rm.q)
        if dim in pivots:
            raise ValueError("answers are inconsistent with a degree-bounded polynomial")
        if pivots != list(range(dim)):
            raise ValueError("answered points do not cover an information set")
        coeffs = system[:dim, dim]
    value = int(basis_at(rm, key.values) @ coeffs % rm.q)
    return FieldElement(value, rm.q)
