"""Command-line interface: gen, check, reduce, verify, bench.

Reports are canonical JSON on stdout and are byte-identical across reruns
with the same seed; wall-clock timings, which cannot be deterministic, go
to stderr and only when --timings is passed. Exit codes: 0 = YES/success,
1 = NO, 2 = error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__, backend
from .errors import QconsistError, SchemaError
from .feasibility import WalkConfig
from .hamiltonians import min_eigenvalue, random_lh
from .marginals import (
    ConsistencyInstance,
    ConsistencyPrimeInstance,
    consistency_from_prime,
    marginals_of_state,
    marginals_to_alphas,
    perturbed_no_prime,
    singlet_triangle_instance,
    state_alphas,
)
from .oracle import OracleConfig, fw_distance, pg_distance
from .paulis import local_pauli_set
from .reduction import (
    YES,
    ReductionConfig,
    amplified,
    fast_reduction_config,
    reduce_and_solve,
)
from .serialize import (
    canonical_dumps,
    decode_consistency,
    decode_lh,
    decode_matrix,
    decode_prime,
    encode_consistency,
    encode_lh,
    encode_prime,
    instance_kind,
    load_document,
    write_canonical,
)
from .states import (
    DensityMatrix,
    bell_phi_plus,
    ghz,
    random_mixed,
    random_pure,
    singlet,
    validate_density,
)
from .verifier import simulate_rounds, verifier_gap

# NO instances in trace form certify max_i ||sigma_i - rho_i||_1 >= beta for
# every global sigma. On a k-qubit subset the coordinate residual obeys
# ||delta_i||_2 = 2^(k/2) ||A||_2 >= ||A||_1 (A has at most 2^k eigenvalues),
# so the same data read as an expectation-form instance has L2 gap >= beta
# and the conversion factor is exactly 1.
TRACE_TO_L2 = 1.0


def _parse_subsets(text: str) -> tuple[tuple[int, ...], ...]:
    """Parse "1,2;2,3" into ((1, 2), (2, 3))."""
    try:
        groups = [g for g in text.split(";") if g.strip()]
        subsets = tuple(
            tuple(sorted({int(q) for q in g.split(",")})) for g in groups
        )
    except ValueError as exc:
        raise SchemaError(f"bad --subsets {text!r}: {exc}") from exc
    if not subsets:
        raise SchemaError(f"bad --subsets {text!r}: no subsets")
    return subsets


def _load_config(arg: str | None) -> dict:
    """--config accepts inline JSON or a path to a JSON file."""
    if arg is None:
        return {}
    text = arg
    if not arg.lstrip().startswith("{"):
        with open(arg, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"--config: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("--config: expected a JSON object")
    for key in doc:
        if key not in ("oracle", "walk", "reduction"):
            raise SchemaError(f"--config: unknown section {key!r}")
    return doc


def _oracle_config(overrides: dict, **defaults) -> OracleConfig:
    fields = dict(defaults)
    fields.update(overrides.get("oracle", {}))
    try:
        return OracleConfig(**fields)
    except TypeError as exc:
        raise SchemaError(f"--config oracle: {exc}") from exc


def _walk_config(overrides: dict, seed: int) -> WalkConfig:
    fields = dict(overrides.get("walk", {}))
    fields.setdefault("seed", seed)
    try:
        return WalkConfig(**fields)
    except TypeError as exc:
        raise SchemaError(f"--config walk: {exc}") from exc


def _emit(report: dict, out_path: str | None = None) -> None:
    if out_path:
        write_canonical(out_path, report)
    else:
        sys.stdout.write(canonical_dumps(report))


def _timing(args, label: str, seconds: float) -> None:
    if getattr(args, "timings", False):
        print(f"[time] {label}: {seconds:.3f}s", file=sys.stderr)


# ---------------------------------------------------------------- gen

_STATE_MAKERS = {
    "ghz": lambda rng, n: ghz(n),
    "bell": lambda rng, n: bell_phi_plus(),
    "singlet": lambda rng, n: singlet(),
    "random-pure": random_pure,
    "random-mixed": lambda rng, n: random_mixed(rng, n),
}


def _gen_state(args, rng: np.random.Generator, n: int) -> DensityMatrix:
    maker = _STATE_MAKERS.get(args.from_state)
    if maker is None:
        raise SchemaError(
            f"unknown --from-state {args.from_state!r}; "
            f"choose from {sorted(_STATE_MAKERS)}"
        )
    state = maker(rng, n)
    if state.n != n:
        raise SchemaError(
            f"--from-state {args.from_state} builds {state.n} qubits, "
            f"but the subsets span {n}"
        )
    return state


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == "lh":
        for name in ("n", "m", "k"):
            if getattr(args, name) is None:
                raise SchemaError(f"gen lh requires --{name}")
        lh = random_lh(
            rng, n=args.n, m=args.m, k=args.k, gap=args.gap, promise=args.promise
        )
        doc = encode_lh(lh)
    elif args.kind == "consistency":
        if args.preset == "singlet-triangle":
            inst = singlet_triangle_instance(weight=args.weight, beta=args.beta)
        elif args.preset is not None:
            raise SchemaError(f"unknown preset {args.preset!r} for consistency")
        else:
            if args.from_state is None or args.subsets is None:
                raise SchemaError(
                    "gen consistency needs --preset or --from-state with --subsets"
                )
            layout = _parse_subsets(args.subsets)
            n = args.n if args.n is not None else max(max(C) for C in layout)
            state = _gen_state(args, rng, n)
            inst = marginals_of_state(state, layout, beta=args.beta)
        doc = encode_consistency(inst)
    else:  # prime
        if args.preset == "perturbed-no":
            if args.subsets is None:
                raise SchemaError("gen prime --preset perturbed-no needs --subsets")
            layout = _parse_subsets(args.subsets)
            n = args.n if args.n is not None else max(max(C) for C in layout)
            inst = perturbed_no_prime(rng, layout, n, epsilon=args.epsilon)
        elif args.preset is not None:
            raise SchemaError(f"unknown preset {args.preset!r} for prime")
        else:
            if args.from_state is None or args.subsets is None:
                raise SchemaError(
                    "gen prime needs --preset or --from-state with --subsets"
                )
            layout = _parse_subsets(args.subsets)
            n = args.n if args.n is not None else max(max(C) for C in layout)
            state = _gen_state(args, rng, n)
            basis = local_pauli_set(layout, n)
            inst = ConsistencyPrimeInstance(
                n=n,
                basis=basis,
                alphas=state_alphas(state, basis),
                beta_prime=args.beta_prime,
            )
        doc = encode_prime(inst)
    _emit(doc, args.out)
    return 0


# ---------------------------------------------------------------- check


def _target_from_document(doc: dict) -> tuple[ConsistencyPrimeInstance, str]:
    kind = instance_kind(doc)
    if kind == "lh":
        raise SchemaError("check expects a consistency or prime instance, got lh")
    if kind == "prime":
        return decode_prime(doc), kind
    inst = decode_consistency(doc)
    basis = local_pauli_set(inst.layout, inst.n)
    alpha = marginals_to_alphas(inst, basis)
    prime = ConsistencyPrimeInstance(
        n=inst.n,
        basis=basis,
        alphas=alpha,
        beta_prime=TRACE_TO_L2 * inst.beta,
    )
    return prime, kind


def cmd_check(args) -> int:
    overrides = _load_config(args.config)
    prime, kind = _target_from_document(load_document(args.instance))
    bp = prime.beta_prime
    cfg = _oracle_config(
        overrides,
        dist_tol=min(1e-6, bp / 8.0),
        gap_tol=min(1e-8, bp**2 / 32.0),
        seed=args.seed,
    )
    t0 = time.perf_counter()
    res = fw_distance(prime.alphas, cfg)
    _timing(args, "fw_distance", time.perf_counter() - t0)
    decision = "YES" if res.distance <= bp / 2.0 else "NO"
    report = {
        "command": "check",
        "seed": args.seed,
        "input_kind": kind,
        "beta_prime": bp,
        "distance": res.distance,
        "distance_lower": res.distance_lower,
        "decision": decision,
        "iters": res.iters,
        "fw_gap": res.fw_gap,
    }
    if args.brute_force:
        t0 = time.perf_counter()
        pg = pg_distance(prime.alphas, cfg)
        _timing(args, "pg_distance", time.perf_counter() - t0)
        report["pg_distance"] = pg.distance
        report["pg_iters"] = pg.iters
    _emit(report)
    return 0 if decision == "YES" else 1


# ---------------------------------------------------------------- reduce


def cmd_reduce(args) -> int:
    overrides = _load_config(args.config)
    doc = load_document(args.instance)
    if instance_kind(doc) != "lh":
        raise SchemaError("reduce expects a local-Hamiltonian instance")
    lh = decode_lh(doc)
    red = dict(overrides.get("reduction", {}))
    if args.fast:
        base = fast_reduction_config(local_pauli_set(lh.layout, lh.n).d)
        walk_fields = dict(overrides.get("walk", {}))
        walk_fields.setdefault("seed", args.seed)
        try:
            cfg = replace(base, walk=replace(base.walk, **walk_fields), **red)
        except TypeError as exc:
            raise SchemaError(f"--config: {exc}") from exc
    else:
        try:
            cfg = ReductionConfig(walk=_walk_config(overrides, args.seed), **red)
        except TypeError as exc:
            raise SchemaError(f"--config reduction: {exc}") from exc
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    if args.runs == 1:
        sole = reduce_and_solve(lh, cfg, rng)
        answer, witness, t, bp = sole.answer, sole.witness, sole.t, sole.beta_prime
        votes = (sole.answer,)
        rounds_used = sole.feasibility.rounds
        oracle_calls = sole.oracle_calls
    else:
        amp = amplified(lh, cfg, args.runs, rng)
        answer, votes = amp.answer, amp.votes
        t, bp = amp.runs[0].t, amp.runs[0].beta_prime
        witness = next((r.witness for r in amp.runs if r.witness is not None), None)
        rounds_used = sum(r.feasibility.rounds for r in amp.runs)
        oracle_calls = sum(r.oracle_calls for r in amp.runs)
    _timing(args, "reduce", time.perf_counter() - t0)
    report = {
        "command": "reduce",
        "seed": args.seed,
        "answer": answer,
        "t": t,
        "beta_prime": bp,
        "rounds_used": rounds_used,
        "oracle_calls": oracle_calls,
        "votes": list(votes),
        "witness_alphas": (
            None
            if witness is None
            else {
                p.factors: float(witness.values[i])
                for i, p in enumerate(witness.basis.elements)
            }
        ),
        "ground_truth": None,
    }
    if args.ground_truth:
        lam = min_eigenvalue(lh)
        report["ground_truth"] = lam
        truth = "YES" if lam <= lh.a else ("NO" if lam >= lh.b else "in-gap")
        report["ground_truth_answer"] = truth
        report["agrees"] = answer == truth if truth != "in-gap" else None
    _emit(report)
    return 0 if answer == YES else 1


# ---------------------------------------------------------------- verify


def _consistency_from_document(doc: dict) -> ConsistencyInstance:
    kind = instance_kind(doc)
    if kind == "lh":
        raise SchemaError("verify expects a consistency or prime instance, got lh")
    if kind == "consistency":
        return decode_consistency(doc)
    prime = decode_prime(doc)
    image = consistency_from_prime(prime)
    if image.automatic_no or image.instance is None:
        raise SchemaError(
            "prime instance has no density-matrix form (non-PSD marginal); "
            "nothing for the verifier to measure against"
        )
    return image.instance


def cmd_verify(args) -> int:
    inst = _consistency_from_document(load_document(args.instance))
    wdoc = load_document(args.witness)
    sigma = validate_density(decode_matrix(wdoc, "witness"))
    if sigma.n != inst.n:
        raise SchemaError(f"witness has {sigma.n} qubits, instance has {inst.n}")
    gap, (i, q) = verifier_gap(inst, sigma)
    report = {
        "command": "verify",
        "seed": args.seed,
        "gap": gap,
        "no_threshold": min(
            0.5 * inst.beta / 4 ** len(C) for C in inst.layout
        ),
        "argmax": {"subset_index": i + 1, "pauli": q.factors},
    }
    if args.rounds:
        rng = np.random.default_rng(args.seed)
        counts = simulate_rounds(inst, sigma, args.rounds, rng)
        report["rounds"] = {
            f"{i + 1}:{factors}": {
                "accepts": acc,
                "trials": tot,
                "frequency": acc / tot,
            }
            for (i, factors), (acc, tot) in counts.items()
        }
    _emit(report)
    return 0


# ---------------------------------------------------------------- bench


def _bench_targets(rng: np.random.Generator, basis, count: int) -> list[np.ndarray]:
    """Half near-feasible (scaled state alphas), half random in the ball."""
    from .states import random_mixed as _rm

    targets = []
    for j in range(count):
        if j % 2 == 0:
            state = _rm(rng, basis.n)
            alpha = state_alphas(state, basis)
            targets.append(alpha.values * 0.9)
        else:
            v = rng.standard_normal(basis.d)
            v *= rng.uniform(0.2, 1.2) * np.sqrt(basis.d) / np.linalg.norm(v)
            targets.append(v)
    return targets


def cmd_bench(args) -> int:
    from .marginals import AlphaVector

    rng = np.random.default_rng(args.seed)
    if args.subsets:
        layout = _parse_subsets(args.subsets)
        n = args.n if args.n is not None else max(max(C) for C in layout)
    else:
        n = args.n if args.n is not None else 3
        if n < 2:
            raise SchemaError("bench needs n >= 2")
        pairs = [(i, i + 1) for i in range(1, n)]
        if n >= 3:
            pairs.append((1, n))
        layout = tuple(pairs)
    basis = local_pauli_set(layout, n)
    targets = _bench_targets(rng, basis, args.targets)
    cfg = OracleConfig(max_iters=args.iters, gap_tol=1e-10, dist_tol=1e-8)

    names = backend.available()
    distances: dict[str, list[float]] = {}
    iters: dict[str, int] = {}
    seconds: dict[str, float] = {}
    for name in names:
        with backend.use(name):
            dists = []
            total_iters = 0
            t0 = time.perf_counter()
            for vec in targets:
                res = fw_distance(AlphaVector(basis=basis, values=vec.copy()), cfg)
                dists.append(res.distance)
                total_iters += res.iters
            seconds[name] = time.perf_counter() - t0
        distances[name] = dists
        iters[name] = total_iters
        rate = total_iters / seconds[name] if seconds[name] > 0 else float("inf")
        print(
            f"[bench] {name}: {seconds[name]:.3f}s for {total_iters} iterations "
            f"({rate:,.0f} iters/s)",
            file=sys.stderr,
        )
    report = {
        "command": "bench",
        "seed": args.seed,
        "backends": list(names),
        "n": n,
        "d": basis.d,
        "targets": args.targets,
        "iters": iters,
        "distances": {name: distances[name] for name in names},
    }
    if len(names) > 1:
        base = np.array(distances[names[0]])
        worst = 0.0
        for name in names[1:]:
            worst = max(worst, float(np.max(np.abs(np.array(distances[name]) - base))))
        report["max_distance_disagreement"] = worst
        speed = (
            seconds[names[-1]] / seconds[names[0]]
            if seconds[names[0]] > 0
            else float("inf")
        )
        print(
            f"[bench] {names[0]} is {speed:.1f}x faster than {names[-1]}",
            file=sys.stderr,
        )
    _emit(report)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument(
        "--config",
        default=None,
        help="inline JSON or path: {\"oracle\": {...}, \"walk\": {...}, "
        "\"reduction\": {...}} overriding solver defaults",
    )
    common.add_argument(
        "--timings", action="store_true", help="print stage timings to stderr"
    )

    parser = argparse.ArgumentParser(
        prog="qconsist",
        description="Consistency of local density matrices: oracles, reductions, verifier.",
    )
    parser.add_argument("--version", action="version", version=f"qconsist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", parents=[common], help="generate an instance file")
    p_gen.add_argument("kind", choices=("lh", "consistency", "prime"))
    p_gen.add_argument("--n", type=int, default=None, help="number of qubits")
    p_gen.add_argument("--m", type=int, default=None, help="number of terms (lh)")
    p_gen.add_argument("--k", type=int, default=None, help="locality (lh)")
    p_gen.add_argument("--gap", type=float, default=0.2, help="promise gap b-a (lh)")
    p_gen.add_argument("--promise", choices=("yes", "no"), default="yes")
    p_gen.add_argument("--subsets", default=None, help='e.g. "1,2;2,3"')
    p_gen.add_argument(
        "--from-state",
        default=None,
        help="ghz | bell | singlet | random-pure | random-mixed",
    )
    p_gen.add_argument(
        "--preset",
        default=None,
        help="consistency: singlet-triangle; prime: perturbed-no",
    )
    p_gen.add_argument("--weight", type=float, default=1.0, help="singlet-triangle mix")
    p_gen.add_argument("--beta", type=float, default=0.1, help="trace-distance gap")
    p_gen.add_argument("--beta-prime", type=float, default=0.1, help="L2 gap (prime)")
    p_gen.add_argument("--epsilon", type=float, default=0.25, help="perturbed-no size")
    p_gen.add_argument("-o", "--out", default=None, help="output path (default stdout)")
    p_gen.set_defaults(func=cmd_gen)

    p_check = sub.add_parser(
        "check", parents=[common], help="decide consistency of an instance"
    )
    p_check.add_argument("instance")
    p_check.add_argument(
        "--brute-force",
        action="store_true",
        help="cross-check with the projected-gradient solver",
    )
    p_check.set_defaults(func=cmd_check)

    p_red = sub.add_parser(
        "reduce", parents=[common], help="decide ground energy via the oracle"
    )
    p_red.add_argument("instance")
    p_red.add_argument("--runs", type=int, default=1, help="majority vote over runs")
    p_red.add_argument(
        "--fast",
        action="store_true",
        help="desk-scale speed profile (--config fields still win)",
    )
    p_red.add_argument(
        "--ground-truth",
        action="store_true",
        help="also diagonalize and report agreement",
    )
    p_red.set_defaults(func=cmd_reduce)

    p_ver = sub.add_parser(
        "verify", parents=[common], help="measurement gap of a witness state"
    )
    p_ver.add_argument("instance")
    p_ver.add_argument("witness", help="density matrix JSON {qubits, entries}")
    p_ver.add_argument(
        "--rounds", type=int, default=0, help="Monte-Carlo rounds to simulate"
    )
    p_ver.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser(
        "bench", parents=[common], help="compare solver backends"
    )
    p_bench.add_argument("--n", type=int, default=None)
    p_bench.add_argument("--subsets", default=None, help='default "1,2;2,3;1,3"')
    p_bench.add_argument("--targets", type=int, default=20)
    p_bench.add_argument("--iters", type=int, default=2000, help="max iterations each")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QconsistError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
