"""Command-line front door: simulate, audit, keysize-curves, metrics-check.

Every output file starts with a '#'-prefixed JSON header holding the
resolved config and seed, so a run can be reproduced byte for byte.
Exit codes: 0 success, 1 property failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import infometrics as im
from . import protocol
from .codes import sample_code
from .gf import FieldVector
from .poly import MultiPoly, evaluate, random_poly
from .protocol import SchemeParams, computation_phase, leakage_audit, storage_phase


class UsageError(Exception):
    pass


def _child_seeds(seed: int, count: int) -> list:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)]


def _require(config: dict, keys) -> None:
    missing = [k for k in keys if k not in config]
    if missing:
        raise UsageError(f"config is missing required keys: {missing}")


def _dist_from_config(spec: dict, q: int, n: int, seed: int) -> im.Distribution:
    family = spec.get("family", "dirichlet")
    if family == "uniform":
        return im.uniform(q, n)
    if family == "dirichlet":
        return im.random_dirichlet(q, n, seed, alpha=float(spec.get("alpha", 1.0)))
    if family == "bernoulli":
        if q != 2:
            raise UsageError("bernoulli family requires q = 2")
        return im.bernoulli_iid(n, float(spec["alpha"]))
    if family == "point_mass":
        return im.point_mass(q, n, tuple(spec["at"]))
    if family == "explicit":
        return im.Distribution(q, n, np.array(spec["probs"], dtype=np.float64))
    raise UsageError(f"unknown distribution family {family!r}")


def _header(command: str, config: dict, seed) -> str:
    payload = {"command": command, "config": config, "seed": seed}
    return "# " + json.dumps(payload, sort_keys=True)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _write_lines(path, lines) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# simulate

def cmd_simulate(config: dict, cap=None) -> tuple:
    _require(config, ["n", "q", "r", "d", "S", "m", "seed"])
    params = SchemeParams(
        n=int(config["n"]),
        q=int(config["q"]),
        protected_size=int(config["r"]),
        degree_bound=int(config["d"]),
        straggler_budget=int(config["S"]),
    )
    m = int(config["m"])
    seed = int(config["seed"])
    code_seed, key_seed, x_seed, f_seed = _child_seeds(seed, 4)
    code = sample_code(params.n, m, params.q, code_seed)
    if "x" in config:
        data = FieldVector(tuple(config["x"]), params.q)
    else:
        data = FieldVector(
            tuple(int(v) for v in np.random.default_rng(x_seed).integers(0, params.q, params.n)),
            params.q,
        )
    if "f" in config:
        f = MultiPoly.from_json(config["f"])
    else:
        f = random_poly(params.n, params.degree_bound, params.q, f_seed)
    session = storage_phase(data, params, code, key_seed)
    stragglers = [int(s) for s in config.get("stragglers", [])]
    decoded = computation_phase(session, f, stragglers)
    direct = evaluate(f, data)
    result = {
        "decoded": int(decoded),
        "direct": int(direct),
        "match": bool(int(decoded) == int(direct)),
        "metrics": {
            "N": session.metrics.num_workers,
            "D": session.metrics.download_cost,
            "m": session.metrics.key_length,
        },
        "download_cost": protocol.download_cost(session),
        "seed": seed,
    }
    return (0 if result["match"] else 1), result


# ---------------------------------------------------------------------------
# audit

def cmd_audit(config: dict, cap=None, variant: str = "theorem") -> tuple:
    _require(config, ["n", "q", "r", "p", "epsilon", "a", "seed"])
    n = int(config["n"])
    q = int(config["q"])
    r = int(config["r"])
    p = int(config["p"])
    epsilon = float(config["epsilon"])
    a = float(config["a"])
    num_codes = int(config.get("num_codes", 100))
    seed = int(config["seed"])
    dist_seed, *code_seeds = _child_seeds(seed, num_codes + 1)
    dist = _dist_from_config(config.get("dist", {}), q, n, dist_seed)

    max_subset_entropy = max(
        im.renyi_entropy(im.marginal(dist, sel), p) for sel in im.all_subsets(n, r)
    )
    bp = im.BoundParams(
        n=n,
        q=q,
        p=p,
        epsilon=epsilon,
        a=a,
        data_entropy=im.renyi_entropy(dist, p),
        max_subset_entropy=max_subset_entropy,
    )
    m = math.ceil(im.keysize_lower_bound(bp))
    if m < max(1, r):
        raise UsageError(f"key length from the bound is {m}; decrease epsilon")
    if m > n:
        raise UsageError(
            f"key length from the bound is {m} > n = {n}; increase epsilon or entropy"
        )
    im.check_cap(q ** (n + m), cap)
    bounds = im.leakage_bounds_both(bp)
    chosen_bound = bounds[variant]

    rows = ["code_seed,max_mi,epsilon_c_theorem,epsilon_c_proof,pass"]
    passes = 0
    for code_seed in code_seeds:
        code = sample_code(n, m, q, code_seed)
        max_mi = max(
            im.mutual_information(dist, code, sel, cap) for sel in im.all_subsets(n, r)
        )
        ok = max_mi <= chosen_bound + im.VERDICT_TOL
        passes += ok
        rows.append(
            ",".join(
                [str(code_seed), _fmt(max_mi), _fmt(bounds["theorem"]), _fmt(bounds["proof"]), _fmt(ok)]
            )
        )
    fraction = passes / num_codes
    target = 1 - 1 / a
    sigma = math.sqrt(target * (1 - target) / num_codes)
    footer = {
        "pass_fraction": fraction,
        "target": target,
        "sigma": sigma,
        "threshold": target - 3 * sigma,
        "epsilon_c": bounds,
        "variant": variant,
        "m": m,
        "keysize_bound": im.keysize_lower_bound(bp),
    }
    rows.append("# " + json.dumps(footer, sort_keys=True))
    exit_code = 0 if fraction >= target - 3 * sigma else 1
    return exit_code, rows


# ---------------------------------------------------------------------------
# keysize curves

def cmd_keysize_curves(config: dict) -> tuple:
    n = int(config.get("n", 2 ** 18))
    p = int(config.get("p", 2))
    q = int(config.get("q", 2))
    r = int(config.get("r", 2))
    entropy_a = float(config.get("entropy_a", n - 4))
    eps_exponents = config.get("epsilon_log_q_exponents", list(range(-60, 0)))
    epsilon_b = float(config.get("epsilon_b", float(q) ** (-2 * math.log(n, q))))
    entropy_offsets = config.get("entropy_offsets", list(range(64, -1, -1)))

    def bound(epsilon: float, entropy: float) -> float:
        bp = im.BoundParams(
            n=n, q=q, p=p, epsilon=epsilon, a=2.0,
            data_entropy=entropy, max_subset_entropy=0.0,
        )
        return im.keysize_lower_bound(bp)

    curve_a = ["x,m_real,m_ceil"]
    for j in sorted(eps_exponents):
        eps = float(q) ** j
        m_real = bound(eps, entropy_a)
        curve_a.append(",".join([_fmt(eps), _fmt(m_real), str(math.ceil(m_real))]))

    curve_b = ["x,m_real,m_ceil"]
    for k in sorted(entropy_offsets, reverse=True):
        entropy = float(n - k)
        m_real = bound(epsilon_b, entropy)
        curve_b.append(",".join([_fmt(entropy), _fmt(m_real), str(math.ceil(m_real))]))

    resolved = {
        "n": n, "p": p, "q": q, "r": r,
        "entropy_a": entropy_a,
        "epsilon_log_q_exponents": sorted(int(j) for j in eps_exponents),
        "epsilon_b": epsilon_b,
        "entropy_offsets": sorted(int(k) for k in entropy_offsets),
    }
    return 0, {"config": resolved, "curve_a": curve_a, "curve_b": curve_b}


# ---------------------------------------------------------------------------
# metrics check

def cmd_metrics_check(config: dict, cap=None) -> tuple:
    num_dists = int(config.get("num_dists", 200))
    num_pairs = int(config.get("num_pairs", 1000))
    seed = int(config.get("seed", 0))
    rng = np.random.default_rng(seed)
    spaces = [(2, 4), (2, 5), (2, 6), (3, 3), (3, 4)]
    violations = []

    gap_count = 0
    for i in range(num_dists):
        q, n = spaces[i % len(spaces)]
        r = 1 + i % 2
        p = 2 + (i // 2) % 2
        dist = im.random_dirichlet(q, n, rng.integers(0, 2 ** 63))
        report = im.check_entropy_gap(dist, p, r)
        gap_count += 1
        if not report["holds"]:
            violations.append({"check": "entropy_gap", "case": i, "report": report})

    uniform_count = 0
    for q, n in spaces:
        report = im.check_entropy_gap(im.uniform(q, n), 2, 1)
        uniform_count += 1
        if abs(report["slack"]) > im.VERDICT_TOL:
            violations.append({"check": "entropy_gap_uniform", "space": [q, n], "report": report})

    pair_count = 0
    for i in range(num_pairs):
        q, n = spaces[i % len(spaces)]
        p = 2 + i % 2
        da = im.random_dirichlet(q, n, rng.integers(0, 2 ** 63))
        db = im.random_dirichlet(q, n, rng.integers(0, 2 ** 63))
        pair_count += 1
        if im.v_distance(da, db) > im.v_p_distance(da, db, p) + im.VERDICT_TOL:
            violations.append({"check": "v_le_vp", "case": i})
        if im.kl_divergence(da, db) > im.renyi_divergence(da, db, p) + im.VERDICT_TOL:
            violations.append({"check": "d_le_dp", "case": i})
        if not im.pinsker_check(da, db)["classical_form_holds"]:
            violations.append({"check": "pinsker_classical", "case": i})
        if abs(im.renyi_entropy(im.uniform(q, n), p) - n) > im.VERDICT_TOL:
            violations.append({"check": "uniform_entropy", "case": i})

    # The divergence-distance relation is only claimed where the encoded law
    # is genuinely smoothed: key length at the bound, epsilon well below 1,
    # and the measured conditional distances within the ensemble envelope.
    relation_count = 0
    relation_skipped = 0
    for i in range(max(1, num_dists // 4)):
        q, n = [(2, 5), (2, 6), (3, 4)][i % 3]
        p = 2
        a = 2.0
        alpha = [20.0, 50.0, 100.0][i % 3]
        dist = im.random_dirichlet(q, n, rng.integers(0, 2 ** 63), alpha=alpha)
        entropy = im.renyi_entropy(dist, p)
        subsets = im.all_subsets(n, 1)
        max_sub = max(im.renyi_entropy(im.marginal(dist, s), p) for s in subsets)
        budget = entropy - max_sub - p
        if budget <= 0.05:
            relation_skipped += 1
            continue
        epsilon = min(float(q) ** (-budget), 0.5)
        bp = im.BoundParams(n=n, q=q, p=p, epsilon=epsilon, a=a,
                            data_entropy=entropy, max_subset_entropy=max_sub)
        m = math.ceil(im.keysize_lower_bound(bp))
        if m < 1 or m > n:
            relation_skipped += 1
            continue
        envelope = a * 2 ** ((2 * p - 1) / p) * (1 + q ** (-max_sub / p)) * epsilon ** (1 / p)
        code = sample_code(n, m, q, int(rng.integers(0, 2 ** 63)))
        encoded = im.pushforward_encode(dist, code, cap)
        reports = []
        worst = 0.0
        for selector in subsets:
            marg = im.marginal(dist, selector)
            for z_idx in range(q):
                if marg.probs[z_idx] <= 0:
                    continue
                cond = im.conditional_encoded(dist, code, selector, (z_idx,), cap)
                report = im.check_divergence_distance_relation(cond, encoded, p)
                worst = max(worst, report["vp"])
                reports.append(report)
        if worst > envelope:
            relation_skipped += 1
            continue
        for report in reports:
            relation_count += 1
            if not report["holds"]:
                violations.append({"check": "divergence_distance", "case": i, "report": report})

    result = {
        "counts": {
            "entropy_gap": gap_count,
            "entropy_gap_uniform": uniform_count,
            "metric_pairs": pair_count,
            "divergence_distance": relation_count,
            "divergence_distance_skipped": relation_skipped,
        },
        "violations": violations,
        "all_pass": not violations,
        "seed": seed,
    }
    return (0 if not violations else 1), result


# ---------------------------------------------------------------------------
# wiring

def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")


def _resolve_cap(args) -> int:
    if args.cap is not None:
        return args.cap
    env = os.environ.get("ICC_KIT_CAP")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"ICC_KIT_CAP must be an integer, got {env!r}")
    return im.DEFAULT_CAP


def _split_out(path: str, tag: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_{tag}{ext or '.csv'}"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="icc-kit",
        description="masked distributed polynomial computation: simulate, audit, curves",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "audit", "keysize-curves", "metrics-check"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", default=None, help="JSON config file")
        cmd.add_argument("--out", default=None, help="output path (default stdout)")
        cmd.add_argument("--seed", type=int, default=None, help="overrides config seed")
        cmd.add_argument("--cap", type=int, default=None,
                         help="joint-outcome enumeration cap (env ICC_KIT_CAP)")
        cmd.add_argument("--variant", choices=("theorem", "proof"), default="theorem",
                         help="leakage bound constant-factor variant")
    args = parser.parse_args(argv)

    try:
        config = _load_config(args.config)
        if args.seed is not None:
            config["seed"] = args.seed
        cap = _resolve_cap(args)

        if args.command == "simulate":
            code, result = cmd_simulate(config, cap=cap)
            text = json.dumps(result, indent=2, sort_keys=True)
            print(text)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            return code

        if args.command == "audit":
            code, rows = cmd_audit(config, cap=cap, variant=args.variant)
            lines = [_header("audit", config, config.get("seed"))] + rows
            _write_lines(args.out, lines)
            return code

        if args.command == "keysize-curves":
            if args.out is None:
                raise UsageError("keysize-curves requires --out (two files are written)")
            code, payload = cmd_keysize_curves(config)
            header = _header("keysize-curves", payload["config"], config.get("seed"))
            _write_lines(_split_out(args.out, "a"), [header] + payload["curve_a"])
            _write_lines(_split_out(args.out, "b"), [header] + payload["curve_b"])
            return code

        if args.command == "metrics-check":
            code, result = cmd_metrics_check(config, cap=cap)
            text = json.dumps(result, indent=2, sort_keys=True)
            print(text)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text + "\n")
            return code

        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(json.dumps({"error": str(exc)}))
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
