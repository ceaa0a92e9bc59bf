"""End-to-end distributed polynomial computation with a masked dataset.

Storage phase: the user masks the data with a random codeword
(encoded = data + key.G), uploads the masked vector, and keeps only the
key. The admin derives one share per worker by shifting the masked
vector along super-set points. Computation phase: workers evaluate the
polynomial on their shares, the admin collects answers on an available
information set, and the user interpolates and evaluates at the key,
recovering the polynomial's value on the original data exactly.

The session is an in-process transcript of which side saw what, so the
separation claims (admin never holds the key, user never retains the
data) are structural properties of the records, not just conventions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable

import numpy as np

from .codes import LinearCode, SecretKey, encode, key_gen, shift
from .gf import FieldElement, FieldVector, _check_prime
from .infometrics import (
    BoundParams,
    Distribution,
    all_subsets,
    keysize_lower_bound,
    leakage_bounds_both,
    marginal,
    mutual_information,
    renyi_entropy,
    VERDICT_TOL,
)
from .poly import MultiPoly, evaluate_batch, total_degree
from .rm import (
    RMCode,
    SuperSet,
    rm_code,
    rm_dimension,
    select_available_infoset,
    trivial_superset,
)


@dataclass(frozen=True)
class SchemeParams:
    """The scheme tuple: data length n over F_q, audited subsets of size
    protected_size, polynomial degree bound, and straggler budget."""

    n: int
    q: int
    protected_size: int
    degree_bound: int
    straggler_budget: int

    def __post_init__(self):
        _check_prime(self.q)
        if not 1 <= self.protected_size < self.n:
            raise ValueError("need 1 <= protected_size < n")
        if self.degree_bound < 0:
            raise ValueError("degree bound must be non-negative")
        if self.straggler_budget < 0:
            raise ValueError("straggler budget must be non-negative")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "r": self.protected_size,
            "d": self.degree_bound,
            "S": self.straggler_budget,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SchemeParams":
        return cls(obj["n"], obj["q"], obj["r"], obj["d"], obj["S"])


@dataclass(frozen=True)
class SchemeMetrics:
    """Cost triple: worker count, download cost in F_q symbols, key length."""

    num_workers: int
    download_cost: int
    key_length: int


@dataclass(frozen=True)
class WorkerShare:
    worker_id: int
    point: tuple
    data: FieldVector


@dataclass
class UserRecord:
    # holds the key and public parameters only; never the data vector
    key: SecretKey
    params: SchemeParams
    key_length: int


@dataclass
class AdminRecord:
    # everything the admin sees: masked vector, shares, super-set, code
    encoded: FieldVector
    shares: tuple
    superset: SuperSet
    code: LinearCode


@dataclass
class SessionState:
    user: UserRecord
    admin: AdminRecord
    metrics: SchemeMetrics
    transcript: list = field(default_factory=list)
    last_answer_count: int = 0

    def to_json(self) -> dict:
        return {
            "user": {
                "key": self.user.key.vector.to_json(),
                "params": self.user.params.to_json(),
                "key_length": self.user.key_length,
            },
            "admin": {
                "encoded": self.admin.encoded.to_json(),
                "shares": [
                    {
                        "worker_id": sh.worker_id,
                        "point": list(sh.point),
                        "data": sh.data.to_json(),
                    }
                    for sh in self.admin.shares
                ],
                "superset": [list(pt) for pt in self.admin.superset.entries],
                "code": self.admin.code.to_json(),
            },
            "transcript": list(self.transcript),
        }


def plan(params: SchemeParams, key_length: int) -> SchemeMetrics:
    """Cost triple for the replicated construction at the given key length."""
    if key_length < params.protected_size:
        raise ValueError(
            f"key length {key_length} is below the protected subset size "
            f"{params.protected_size}"
        )
    if key_length > params.n:
        raise ValueError(f"key length {key_length} exceeds data length {params.n}")
    if params.degree_bound >= key_length * (params.q - 1):
        raise ValueError(
            f"degree bound {params.degree_bound} needs a longer key: "
            f"require d < m(q-1) = {key_length * (params.q - 1)}"
        )
    download = rm_dimension(params.q, params.degree_bound, key_length)
    return SchemeMetrics(
        num_workers=(params.straggler_budget + 1) * download,
        download_cost=download,
        key_length=key_length,
    )


def storage_phase(
    data: FieldVector, params: SchemeParams, code: LinearCode, rng_seed
) -> SessionState:
    """Mask the data, derive all worker shares, and return the session.

    The returned session's user record holds only the key; the data
    vector is consumed here and recoverable by no record.
    """
    if len(data) != params.n or data.q != params.q:
        raise ValueError("data vector does not match the scheme parameters")
    if code.n != params.n or code.q != params.q:
        raise ValueError("code does not match the scheme parameters")
    metrics = plan(params, code.m)
    key = key_gen(code.m, params.q, rng_seed)
    encoded = encode(data, key, code)
    rm = rm_code(params.q, params.degree_bound, code.m)
    superset = trivial_superset(rm, params.straggler_budget)
    shares = tuple(
        WorkerShare(
            worker_id=i,
            point=pt,
            data=shift(encoded, FieldVector(pt, params.q), code),
        )
        for i, pt in enumerate(superset.entries)
    )
    session = SessionState(
        user=UserRecord(key=key, params=params, key_length=code.m),
        admin=AdminRecord(encoded=encoded, shares=shares, superset=superset, code=code),
        metrics=metrics,
    )
    session.transcript.append(
        {"phase": "storage", "event": "masked_upload", "n": params.n}
    )
    session.transcript.append(
        {"phase": "storage", "event": "shares_distributed", "count": len(shares)}
    )
    return session


def computation_phase(
    session: SessionState, f: MultiPoly, stragglers: Iterable[int] = ()
) -> FieldElement:
    """Run one polynomial through the session and decode its value.

    Stragglers are worker ids that stay silent; the budget is the
    session's straggler allowance. Answers are exact (workers are honest
    but possibly absent).
    """
    params = session.user.params
    straggler_set = set(int(s) for s in stragglers)
    num_workers = len(session.admin.shares)
    if not straggler_set.issubset(range(num_workers)):
        raise ValueError("straggler ids must be valid worker ids")
    if len(straggler_set) > params.straggler_budget:
        raise ValueError(
            f"straggler budget exceeded: {len(straggler_set)} > "
            f"{params.straggler_budget}"
        )
    if f.q != params.q or f.num_vars != params.n:
        raise ValueError("polynomial does not match the scheme parameters")
    if total_degree(f) > params.degree_bound:
        raise ValueError(
            f"degree bound exceeded: {total_degree(f)} > {params.degree_bound}"
        )
    session.transcript.append(
        {"phase": "computation", "event": "function_shared", "f": f.to_json()}
    )

    responding = [i for i in range(num_workers) if i not in straggler_set]
    share_rows = np.array(
        [session.admin.shares[i].data.values for i in responding], dtype=np.int64
    )
    answer_values = evaluate_batch(f, share_rows)
    answers_by_worker = {
        wid: int(val) for wid, val in zip(responding, answer_values)
    }
    session.transcript.append(
        {
            "phase": "computation",
            "event": "answers_collected",
            "workers": responding,
        }
    )

    selected = select_available_infoset(session.admin.superset, responding)
    answer_vector = {
        point: answers_by_worker[src]
        for point, src in zip(selected.points, selected.sources)
    }
    session.last_answer_count = len(answer_vector)
    session.transcript.append(
        {
            "phase": "computation",
            "event": "answer_vector_sent",
            "sources": list(selected.sources),
            "answers": {str(pt): val for pt, val in sorted(answer_vector.items())},
        }
    )

    rm = rm_code(params.q, params.degree_bound, session.user.key_length)
    from .rm import decode_at_key

    result = decode_at_key(rm, answer_vector, session.user.key.vector)
    session.transcript.append({"phase": "computation", "event": "user_decoded"})
    return result


def download_cost(session: SessionState) -> int:
    """F_q symbols the user pulled in the last computation phase."""
    if session.last_answer_count == 0:
        raise ValueError("no computation phase has run in this session")
    return session.last_answer_count


def straggler_patterns(num_workers: int, budget: int):
    """Every straggler set of size at most budget (including the empty set)."""
    for size in range(budget + 1):
        yield from itertools.combinations(range(num_workers), size)


def count_straggler_patterns(num_workers: int, budget: int) -> int:
    return sum(comb(num_workers, size) for size in range(budget + 1))


def leakage_audit(
    dist: Distribution,
    code_or_session,
    subset_size: int,
    *,
    p: int,
    epsilon: float,
    a: float,
    cap=None,
    code_seed=None,
) -> dict:
    """Exact leakage of one encoder against the bound calculators.

    Measures I(encoded; selected coordinates) for every coordinate subset
    of the given size (the adversary sees the whole encoded vector), then
    compares the maximum against both variants of the leakage bound
    computed from the measured entropies. Works from a LinearCode or
    from a session (whose code is audited).
    """
    code = (
        code_or_session.admin.code
        if isinstance(code_or_session, SessionState)
        else code_or_session
    )
    per_subset = []
    max_subset_entropy = 0.0
    for selector in all_subsets(dist.n, subset_size):
        mi = mutual_information(dist, code, selector, cap)
        per_subset.append({"indices": selector.indices, "mi": mi})
        max_subset_entropy = max(
            max_subset_entropy, renyi_entropy(marginal(dist, selector), p)
        )
    max_mi = max(row["mi"] for row in per_subset)
    bp = BoundParams(
        n=dist.n,
        q=dist.q,
        p=p,
        epsilon=epsilon,
        a=a,
        data_entropy=renyi_entropy(dist, p),
        max_subset_entropy=max_subset_entropy,
    )
    bounds = leakage_bounds_both(bp)
    return {
        "code_seed": code_seed,
        "subset_size": subset_size,
        "p": p,
        "epsilon": epsilon,
        "a": a,
        "key_length": code.m,
        "keysize_bound": keysize_lower_bound(bp),
        "data_entropy": bp.data_entropy,
        "max_subset_entropy": bp.max_subset_entropy,
        "per_subset": per_subset,
        "max_mi": max_mi,
        "epsilon_c": bounds,
        "passes": {
            variant: bool(max_mi <= bound + VERDICT_TOL)
            for variant, bound in bounds.items()
        },
    }


def audit_csv_rows(report: dict) -> list:
    """Flat per-subset rows (code_seed, subset, mi, bound, pass) for CSV export."""
    bound = report["epsilon_c"]["theorem"]
    rows = []
    for entry in report["per_subset"]:
        subset_label = "-".join(str(i) for i in entry["indices"])
        rows.append(
            (
                report["code_seed"],
                subset_label,
                entry["mi"],
                bound,
                entry["mi"] <= bound + VERDICT_TOL,
            )
        )
    return rows
