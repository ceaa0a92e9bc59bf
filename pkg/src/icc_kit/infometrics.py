"""Exact probability machinery for leakage audits over F_q^n.

Everything here is enumeration based: distributions are full tables over
q^n outcomes, encoders are pushed forward by summing over all q^m keys,
and mutual information comes from the exact joint table. Requests whose
joint outcome count q^(n+m) exceeds the enumeration cap are rejected
rather than sampled; the point of this module is exact verification, not
estimation.

Conventions
-----------
Logarithms are base q, so entropies and divergences are reported in
q-ary symbols and the uniform distribution on F_q^n has Renyi entropy
exactly n. Outcomes are indexed by the lexicographic order of F_q^n
(big-endian digit strings), matching the point order used by the
evaluation-code machinery.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import LinearCode
from .gf import FieldVector, _check_prime

DEFAULT_CAP = 2 ** 24
# absolute slack for floating-point verdicts: far above accumulated
# double-precision error at cap-sized sums, far below any real effect
VERDICT_TOL = 1e-9


def _log_q(x: float, q: int) -> float:
    if q == 2:
        return math.log2(x)
    return math.log(x) / math.log(q)


def check_cap(joint_outcomes: int, cap=None) -> None:
    limit = DEFAULT_CAP if cap is None else cap
    if joint_outcomes > limit:
        raise ValueError(
            f"enumeration of {joint_outcomes} joint outcomes exceeds cap {limit}"
        )


@lru_cache(maxsize=None)
def _digit_table(q: int, n: int) -> np.ndarray:
    """Digits of 0..q^n-1 in base q, most significant first; shape (q^n, n)."""
    radix = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    idx = np.arange(q ** n, dtype=np.int64)
    digits = (idx[:, None] // radix[None, :]) % q
    digits.setflags(write=False)
    return digits


def _radix(q: int, n: int) -> np.ndarray:
    return q ** np.arange(n - 1, -1, -1, dtype=np.int64)


@dataclass(frozen=True)
class Distribution:
    """Probability table over F_q^n, indexed lexicographically."""

    q: int
    n: int
    probs: np.ndarray

    def __post_init__(self):
        _check_prime(self.q)
        if self.n < 1:
            raise ValueError("need at least one coordinate")
        table = np.asarray(self.probs, dtype=np.float64)
        if table.shape != (self.q ** self.n,):
            raise ValueError(
                f"probability table must have length q^n = {self.q ** self.n}"
            )
        if table.min() < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(float(table.sum()) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "probs", table)

    def prob_of(self, outcome) -> float:
        index = int(np.dot(np.asarray(outcome, dtype=np.int64), _radix(self.q, self.n)))
        return float(self.probs[index])

    def to_json(self) -> dict:
        return {"q": self.q, "n": self.n, "probs": [float(p) for p in self.probs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Distribution":
        return cls(obj["q"], obj["n"], np.array(obj["probs"], dtype=np.float64))


@dataclass(frozen=True)
class SubsetSelector:
    """Sorted distinct coordinate positions; the audited sub-vector."""

    indices: tuple
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if idx != tuple(sorted(set(idx))):
            raise ValueError("indices must be sorted and distinct")
        if not idx or not (len(idx) < self.n):
            raise ValueError("need 1 <= subset size < n")
        if idx[0] < 0 or idx[-1] >= self.n:
            raise ValueError("indices out of range")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return len(self.indices)


def all_subsets(n: int, r: int):
    """Every SubsetSelector of size r over n coordinates."""
    return [SubsetSelector(c, n) for c in itertools.combinations(range(n), r)]


# ---------------------------------------------------------------------------
# named families

def uniform(q: int, n: int) -> Distribution:
    size = q ** n
    return Distribution(q, n, np.full(size, 1.0 / size))


def point_mass(q: int, n: int, at) -> Distribution:
    table = np.zeros(q ** n)
    table[int(np.dot(np.asarray(at, dtype=np.int64), _radix(q, n)))] = 1.0
    return Distribution(q, n, table)


def bernoulli_iid(n: int, alpha: float) -> Distribution:
    """n i.i.d. binary symbols, each equal to 1 with probability alpha."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    digits = _digit_table(2, n)
    table = np.prod(np.where(digits == 1, alpha, 1.0 - alpha), axis=1)
    return Distribution(2, n, table)


def random_dirichlet(q: int, n: int, rng_seed, alpha: float = 1.0) -> Distribution:
    """Strictly positive random table from a symmetric Dirichlet draw."""
    rng = np.random.default_rng(rng_seed)
    table = rng.dirichlet(np.full(q ** n, alpha))
    table = table / table.sum()
    return Distribution(q, n, table)


# ---------------------------------------------------------------------------
# entropies, distances, divergences (all base q)

def renyi_entropy(dist: Distribution, p: int) -> float:
    """Renyi entropy of integer order p >= 2, in q-ary symbols.

    Uses the 1/(1-p) prefactor, so the uniform table scores exactly n
    and a point mass scores 0.
    """
    _check_order(p)
    power_sum = float(np.sum(dist.probs ** p))
    return _log_q(power_sum, dist.q) / (1 - p)


def _check_order(p) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise ValueError(f"order p must be an integer >= 2, got {p!r}")


def _check_same_shape(a: Distribution, b: Distribution) -> None:
    if a.q != b.q or a.n != b.n:
        raise ValueError(
            f"distributions live on different spaces: F_{a.q}^{a.n} vs F_{b.q}^{b.n}"
        )


def v_distance(dist_a: Distribution, dist_b: Distribution) -> float:
    """Sum of absolute differences (twice the total variation)."""
    _check_same_shape(dist_a, dist_b)
    return float(np.sum(np.abs(dist_a.probs - dist_b.probs)))


def v_p_distance(dist_a: Distribution, dist_b: Distribution, p: int) -> float:
    """Scaled l_p distance q^n (mean |diff|^p)^(1/p); dominates v_distance."""
    _check_same_shape(dist_a, dist_b)
    _check_order(p)
    size = dist_a.q ** dist_a.n
    mean_power = float(np.mean(np.abs(dist_a.probs - dist_b.probs) ** p))
    return size * mean_power ** (1.0 / p)


def kl_divergence(dist_a: Distribution, dist_b: Distribution) -> float:
    """KL divergence in base-q units; +inf on a support violation."""
    _check_same_shape(dist_a, dist_b)
    pa = dist_a.probs
    pb = dist_b.probs
    mask = pa > 0
    if np.any(pb[mask] == 0):
        return math.inf
    return float(np.sum(pa[mask] * np.log(pa[mask] / pb[mask]))) / math.log(dist_a.q)


def renyi_divergence(dist_a: Distribution, dist_b: Distribution, p: int) -> float:
    """Renyi divergence of order p in base-q units; +inf on a support
    violation. Upper-bounds kl_divergence for every p >= 2."""
    _check_same_shape(dist_a, dist_b)
    _check_order(p)
    pa = dist_a.probs
    pb = dist_b.probs
    mask = pa > 0
    if np.any(pb[mask] == 0):
        return math.inf
    power_sum = float(np.sum(pa[mask] ** p * pb[mask] ** (1.0 - p)))
    return _log_q(power_sum, dist_a.q) / (p - 1)


# ---------------------------------------------------------------------------
# encoder pushforwards

def _check_code_matches(dist: Distribution, code: LinearCode) -> None:
    if code.q != dist.q:
        raise ValueError(f"modulus mismatch: {dist.q} vs {code.q}")
    if code.n != dist.n:
        raise ValueError(f"code length {code.n} does not match n = {dist.n}")


def _key_shifts(code: LinearCode) -> np.ndarray:
    """All q^m codewords key.G, shape (q^m, n)."""
    gen = np.array(code.generator.entries, dtype=np.int64)
    keys = _digit_table(code.q, code.m)
    return keys @ gen % code.q


def pushforward_encode(dist: Distribution, code: LinearCode, cap=None) -> Distribution:
    """Exact law of data + key.G under a uniform key.

    Averages the data law over every key shift:
    out(y) = q^-m * sum_k dist(y - k.G). Cost is q^(n+m) table reads,
    guarded by the enumeration cap.
    """
    _check_code_matches(dist, code)
    q, n, m = dist.q, dist.n, code.m
    check_cap(q ** (n + m), cap)
    digits = _digit_table(q, n)
    radix = _radix(q, n)
    out = np.zeros(q ** n)
    for shift_row in _key_shifts(code):
        out += dist.probs[((digits - shift_row[None, :]) % q) @ radix]
    return Distribution(q, n, out / q ** m)


def conditional_given(dist: Distribution, selector: SubsetSelector, z) -> Distribution:
    """Law of the full vector given that the selected coordinates equal z,
    as a table over the whole space (zero off the conditioning slice)."""
    if selector.n != dist.n:
        raise ValueError("selector was built for a different n")
    z_arr = np.asarray(tuple(int(v) for v in z), dtype=np.int64)
    if z_arr.shape != (selector.size,):
        raise ValueError(f"conditioning value must have length {selector.size}")
    digits = _digit_table(dist.q, dist.n)
    mask = np.all(digits[:, selector.indices] == z_arr[None, :], axis=1)
    total = float(dist.probs[mask].sum())
    if total <= 0:
        raise ValueError(f"conditioning on a zero-probability event: {tuple(z_arr)}")
    return Distribution(dist.q, dist.n, np.where(mask, dist.probs, 0.0) / total)


def conditional_encoded(
    dist: Distribution, code: LinearCode, selector: SubsetSelector, z, cap=None
) -> Distribution:
    """Exact law of data + key.G given that the selected data coordinates
    equal z. Errors on a zero-probability conditioning event."""
    return pushforward_encode(conditional_given(dist, selector, z), code, cap)


def marginal(dist: Distribution, selector: SubsetSelector) -> Distribution:
    """Marginal law of the selected coordinates."""
    if selector.n != dist.n:
        raise ValueError("selector was built for a different n")
    shaped = dist.probs.reshape((dist.q,) * dist.n)
    drop = tuple(i for i in range(dist.n) if i not in selector.indices)
    return Distribution(dist.q, selector.size, shaped.sum(axis=drop).ravel())


def mutual_information(
    dist: Distribution, code: LinearCode, selector: SubsetSelector, cap=None
) -> float:
    """Exact I(encoded vector; selected data coordinates) in q-ary symbols.

    Builds the full joint table over (encoded value, sub-vector value) by
    enumerating all q^(n+m) (data, key) pairs, then sums
    J log_q(J / (row marginal * column marginal)) over its support.
    """
    _check_code_matches(dist, code)
    if selector.n != dist.n:
        raise ValueError("selector was built for a different n")
    q, n, m = dist.q, dist.n, code.m
    check_cap(q ** (n + m), cap)
    r = selector.size
    digits = _digit_table(q, n)
    radix = _radix(q, n)
    sub_idx = digits[:, selector.indices] @ _radix(q, r)
    cols = q ** r
    joint = np.zeros(q ** n * cols)
    for shift_row in _key_shifts(code):
        enc_idx = ((digits + shift_row[None, :]) % q) @ radix
        joint += np.bincount(enc_idx * cols + sub_idx, weights=dist.probs, minlength=joint.size)
    joint = joint.reshape(q ** n, cols) / q ** m
    row_marg = joint.sum(axis=1)
    col_marg = joint.sum(axis=0)
    support = joint > 0
    ratio = joint[support] / (row_marg[:, None] * col_marg[None, :])[support]
    return float(np.sum(joint[support] * np.log(ratio))) / math.log(q)


# ---------------------------------------------------------------------------
# key-size and leakage bound calculators

@dataclass(frozen=True)
class BoundParams:
    """Inputs to the key-size and leakage bound formulas.

    data_entropy is the order-p Renyi entropy of the data law and
    max_subset_entropy the largest order-p entropy among the audited
    sub-vectors, both in q-ary symbols. epsilon is the smoothing target
    (the leakage bound derivation additionally needs epsilon < 1) and
    a > 1 trades ensemble failure probability 1/a against bound size.
    """

    n: int
    q: int
    p: int
    epsilon: float
    a: float
    data_entropy: float
    max_subset_entropy: float

    def __post_init__(self):
        _check_prime(self.q)
        _check_order(self.p)
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if not self.a > 1:
            raise ValueError("a must exceed 1")
        if self.max_subset_entropy < 0:
            raise ValueError("entropies are non-negative")


def keysize_lower_bound(bp: BoundParams) -> float:
    """Smallest real key length meeting the ensemble guarantee:
    n + p + log_q(1/epsilon) - data_entropy + max_subset_entropy.
    Callers take the ceiling for an integer key length."""
    return (
        bp.n
        + bp.p
        - _log_q(bp.epsilon, bp.q)
        - bp.data_entropy
        + bp.max_subset_entropy
    )


def leakage_bound(bp: BoundParams, variant: str = "theorem") -> float:
    """Confidentiality bound on max mutual information, q-ary symbols.

    Two published constant factors circulate for the same bound; the
    "theorem" variant uses (1 + q^-H) and the "proof" variant
    (1 + q^-(H/p)), with H = max_subset_entropy. Both are monotone in
    epsilon and vanish as epsilon goes to 0.
    """
    if not bp.epsilon < 1:
        raise ValueError("the leakage bound derivation requires epsilon < 1")
    if variant == "theorem":
        factor = 1.0 + bp.q ** (-bp.max_subset_entropy)
    elif variant == "proof":
        factor = 1.0 + bp.q ** (-bp.max_subset_entropy / bp.p)
    else:
        raise ValueError(f"variant must be 'theorem' or 'proof', got {variant!r}")
    inner = 1.0 + bp.a * 2 ** ((2 * bp.p - 1) / bp.p) * factor * bp.epsilon ** (1.0 / bp.p)
    return bp.p / (bp.p - 1) * _log_q(inner, bp.q)


def leakage_bounds_both(bp: BoundParams) -> dict:
    return {
        "theorem": leakage_bound(bp, "theorem"),
        "proof": leakage_bound(bp, "proof"),
    }


def smoothing_threshold(p: int, epsilon: float) -> float:
    """Guaranteed v_p distance to uniform once the key is long enough:
    2^((p-1)/p) ((1+epsilon)^p - 1)^(1/p)."""
    _check_order(p)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return 2 ** ((p - 1) / p) * ((1 + epsilon) ** p - 1) ** (1.0 / p)


@dataclass(frozen=True)
class SmoothingReport:
    """Measured smoothing quality of one code against its targets."""

    code_seed: object
    p: int
    epsilon: float
    vp_uniform: float
    conditional_vps: tuple  # ((indices, z), v_p(conditional encoded, encoded)) pairs
    threshold: float
    threshold_relaxed: float


def smoothing_report(
    dist: Distribution,
    code: LinearCode,
    p: int,
    epsilon: float,
    subset_size: int = None,
    code_seed=None,
    cap=None,
) -> SmoothingReport:
    """Measure v_p(encoded law, uniform) and, when subset_size is given,
    v_p of each conditional encoded law against the unconditioned one."""
    encoded = pushforward_encode(dist, code, cap)
    unif = uniform(dist.q, dist.n)
    conditionals = []
    if subset_size is not None:
        for selector in all_subsets(dist.n, subset_size):
            marg = marginal(dist, selector)
            for z_idx in np.nonzero(marg.probs > 0)[0]:
                z = tuple(int(v) for v in _digit_table(dist.q, selector.size)[z_idx])
                cond = conditional_encoded(dist, code, selector, z, cap)
                conditionals.append(
                    ((selector.indices, z), v_p_distance(cond, encoded, p))
                )
    relaxed = 2 ** ((2 * p - 1) / p) * epsilon ** (1.0 / p) if epsilon < 1 else math.inf
    return SmoothingReport(
        code_seed=code_seed,
        p=p,
        epsilon=epsilon,
        vp_uniform=v_p_distance(encoded, unif, p),
        conditional_vps=tuple(conditionals),
        threshold=smoothing_threshold(p, epsilon),
        threshold_relaxed=relaxed,
    )


# ---------------------------------------------------------------------------
# relation checkers

def check_entropy_gap(dist: Distribution, p: int, r: int) -> dict:
    """Verify that the entropy gap dominates the worst conditional entropy:

        H_p(X) - max_R H_p(X_R) >= min_{R,z} H_p(X | X_R = z)

    over every size-r coordinate subset R and every value z the subset
    attains with positive probability. Returns lhs, rhs, slack, holds.
    """
    _check_order(p)
    if not 1 <= r < dist.n:
        raise ValueError("need 1 <= r < n")
    full_entropy = renyi_entropy(dist, p)
    max_subset = -math.inf
    min_conditional = math.inf
    for selector in all_subsets(dist.n, r):
        marg = marginal(dist, selector)
        max_subset = max(max_subset, renyi_entropy(marg, p))
        z_digits = _digit_table(dist.q, r)
        for z_idx in np.nonzero(marg.probs > 0)[0]:
            z = tuple(int(v) for v in z_digits[z_idx])
            cond = conditional_given(dist, selector, z)
            min_conditional = min(min_conditional, renyi_entropy(cond, p))
    lhs = full_entropy - max_subset
    rhs = min_conditional
    return {
        "lhs": lhs,
        "rhs": rhs,
        "slack": lhs - rhs,
        "holds": lhs >= rhs - VERDICT_TOL,
    }


def check_divergence_distance_relation(
    dist_a: Distribution, dist_b: Distribution, p: int
) -> dict:
    """With delta = v_p(a, b), check the divergence cap
    D_p(a || b) <= (p/(p-1)) log_q(1 + delta).

    Validated here in the usage context that matters for the audits: the
    second argument is a strictly positive (smoothed) law. Raw values are
    reported so a violation is inspectable rather than silently asserted.
    """
    vp = v_p_distance(dist_a, dist_b, p)
    dp = renyi_divergence(dist_a, dist_b, p)
    bound = p / (p - 1) * _log_q(1 + vp, dist_a.q)
    return {"vp": vp, "dp": dp, "bound": bound, "holds": dp <= bound + VERDICT_TOL}


def pinsker_check(dist_a: Distribution, dist_b: Distribution) -> dict:
    """Evaluate both renderings of Pinsker's inequality.

    The sum form compares v = sum |a - b| against sqrt(D/2) with D in
    base-q units; its constant is not scale-correct for q > 2, so it is
    reported, not asserted. The classical form, total variation against
    sqrt(D_nats / 2), must always hold.
    """
    v = v_distance(dist_a, dist_b)
    d_base_q = kl_divergence(dist_a, dist_b)
    tv = v / 2.0
    d_nats = d_base_q * math.log(dist_a.q)
    return {
        "v_sum": v,
        "d_base_q": d_base_q,
        "sum_form_holds": bool(v <= math.sqrt(d_base_q / 2.0) + VERDICT_TOL)
        if math.isfinite(d_base_q)
        else True,
        "tv": tv,
        "d_nats": d_nats,
        "classical_form_holds": bool(tv <= math.sqrt(d_nats / 2.0) + VERDICT_TOL)
        if math.isfinite(d_nats)
        else True,
    }
