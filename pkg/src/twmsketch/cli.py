"""Command-line harness: replay, sketch-vs-oracle comparison, dimension
sweep, and synthetic scalability benchmarks.

Exit codes: 0 ok, 1 input parse error, 2 configuration error, 3 numeric
range violation, 4 walk enumeration explosion.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import events as ev
from .errors import TwmError, WalkExplosion
from .snapshot import restore, snapshot
from .oracle import DEFAULT_WALK_CAP, WalkOracle
from .schemes import CAWN_DECAY, TIME_DECAY, UNIFORM_COUNT, ScoreScheme
from .sketch import SketchState, projection_matrix

SCHEMA_VERSION = 1
WINDOW = 10_000  # events per timing window
LAMBDA_WARN = 500.0
LAMBDA_HARD = 700.0

EXIT_PARSE = 1
EXIT_CONFIG = 2
EXIT_RANGE = 3
EXIT_EXPLOSION = 4


def jl_dimension(epsilon: float, k: int, n: int) -> int:
    """Smallest dimension meeting the inner-product preservation bound."""
    return math.ceil((24.0 / epsilon**2) * math.log(4.0 ** (1.0 / 3.0) * (k + 1) * n))


def auto_dimension(n_events: int) -> int:
    """The 10*ln(2E) convenience rule (natural logarithm)."""
    return max(1, math.ceil(10.0 * math.log(max(2, 2 * n_events))))


def synthetic_stream(n_events: int, avg_degree: int = 100, seed: int = 0):
    """Random temporal stream with fixed average degree.

    Node count is 2*E/avg_degree, endpoints uniform without self-loops,
    timestamps equal to the event index (distinct by construction).
    """
    n_nodes = max(2, (2 * n_events) // avg_degree)
    rng = np.random.default_rng(seed)
    us = rng.integers(0, n_nodes, size=n_events)
    vs = rng.integers(0, n_nodes - 1, size=n_events)
    vs = np.where(vs >= us, vs + 1, vs)  # uniform over nodes != u
    return [ev.InteractionEvent(int(u), int(v), float(i))
            for i, (u, v) in enumerate(zip(us, vs))], n_nodes


def _worker_pool():
    cap = os.environ.get("TWM_THREADS")
    workers = int(cap) if cap else min(8, os.cpu_count() or 1)
    return ThreadPoolExecutor(max_workers=max(1, workers))


def _scheme_from_args(args) -> ScoreScheme:
    if args.scheme == "decay":
        return ScoreScheme(TIME_DECAY, args.lam)
    if args.scheme == "count":
        return ScoreScheme(UNIFORM_COUNT)
    return ScoreScheme(CAWN_DECAY, args.alpha)


def _load_events(args):
    with open(args.input, "rb") as fh:
        stream = ev.parse_stream(fh)
    if args.t_origin == "none":
        origin = 0.0
    elif args.t_origin == "first":
        origin = stream[0].t if stream else 0.0
    else:
        origin = float(args.t_origin)
    return ev.normalize_times(stream, origin), origin


def _range_guard(scheme: ScoreScheme, stream) -> list[str]:
    warnings = []
    if scheme.variant == TIME_DECAY and stream:
        span = scheme.param * stream[-1].t
        if span > LAMBDA_HARD:
            raise _RangeError(
                f"lambda * time span = {span:.1f} exceeds {LAMBDA_HARD}; "
                "normalize timestamps or lower lambda"
            )
        if span > LAMBDA_WARN:
            msg = f"warning: lambda * time span = {span:.1f} > {LAMBDA_WARN}"
            print(msg, file=sys.stderr)
            warnings.append(msg)
    return warnings


class _RangeError(TwmError):
    pass


def _base_report(args, mode, **extra):
    config = {
        "mode": mode,
        "scheme": args.scheme,
        "lambda": args.lam,
        "alpha": args.alpha,
        "k": args.k,
        "dim": args.dim,
        "seed": args.seed,
        "epsilon": args.epsilon,
        "seeds": args.seeds,
        "t_origin": args.t_origin,
    }
    config.update(extra)
    return {"schema_version": SCHEMA_VERSION, "config": config}


def _replay_timed(state: SketchState, batches):
    """Replay batches, recording wall time per fixed-size event window."""
    windows = []
    done = 0
    mark = time.perf_counter()
    start = mark
    for batch in batches:
        state.apply_batch(batch)
        done += len(batch)
        if done >= WINDOW:
            now = time.perf_counter()
            windows.append({"events": done, "seconds": now - mark})
            done = 0
            mark = now
    if done:
        windows.append({"events": done, "seconds": time.perf_counter() - mark})
    return windows, time.perf_counter() - start


# -- modes -----------------------------------------------------------------


def cmd_replay(args):
    stream, origin = _load_events(args)
    scheme = _scheme_from_args(args)
    warnings = _range_guard(scheme, stream)
    if args.snapshot_in:
        with open(args.snapshot_in, "rb") as fh:
            state = restore(fh.read())
    else:
        n_hint = ev.max_node_id(stream) + 1
        state = SketchState(args.k, args.dim, scheme, args.seed, n_hint=n_hint)
    batches = ev.batch_by_timestamp([e for e in stream if e.t >= state.t_now])
    windows, total = _replay_timed(state, batches)
    if args.snapshot_out:
        with open(args.snapshot_out, "wb") as fh:
            fh.write(snapshot(state))
    report = _base_report(args, "replay", input=args.input, t_origin_value=origin)
    report.update({
        "events": len(stream),
        "batches": len(batches),
        "unique_stamps": len(batches),
        "n_seen": state.n_seen,
        "t_now": state.t_now,
        "memory_model_bytes": state.memory_model_bytes(),
        "memory_allocated_bytes": state.allocated_bytes(),
        "warnings": warnings,
        "timing": {"windows": windows, "total_seconds": total},
    })
    return report


def _rescaled_stack(state: SketchState, n: int) -> np.ndarray:
    """All rescaled rows, hop-major: shape ((k+1)*n, dim)."""
    blocks = []
    for l in range(state.k + 1):
        block = state.H[l][:n].copy()
        if state.scheme.variant == TIME_DECAY and l > 0:
            block = block * math.exp(-state.scheme.param * l * state.t_now)
        blocks.append(block)
    return np.vstack(blocks)


def _replay_for_seed(stream, scheme, k, dim, seed, n):
    state = SketchState(k, dim, scheme, seed, n_hint=n)
    state.replay(ev.batch_by_timestamp(stream))
    return state


def cmd_compare(args):
    stream, _ = _load_events(args)
    scheme = _scheme_from_args(args)
    warnings = _range_guard(scheme, stream)
    n = ev.max_node_id(stream) + 1
    k = args.k
    oracle = WalkOracle(stream, scheme, k, n, cap=args.walk_cap)
    ms = oracle.matrices()
    a_stack = np.vstack(ms.A)
    gram_a = a_stack @ a_stack.T
    sq = np.sum(a_stack * a_stack, axis=1)
    c = 0.5 * (sq[:, None] + sq[None, :])

    def one_seed(seed):
        state = _replay_for_seed(stream, scheme, k, args.dim, seed, n)
        proj = projection_matrix(seed, n, args.dim)
        target = a_stack @ proj
        rows = _rescaled_stack(state, n)
        scale = max(np.abs(target).max(), 1.0)
        hop_err = []
        for l in range(k + 1):
            block = slice(l * n, (l + 1) * n)
            diff = np.abs(rows[block] - target[block])
            denom = np.maximum(np.abs(target[block]), 1e-12 * scale)
            hop_err.append(float((diff / denom).max()))
        gram_h = rows @ rows.T
        diff = np.abs(gram_h - gram_a)
        viol = diff > args.epsilon * c
        norm = np.where(c > 0, diff / np.where(c > 0, c, 1.0), 0.0)
        return hop_err, float(viol.mean()), float(norm.max()), float(norm.mean())

    seeds = [args.seed + i for i in range(args.seeds)]
    with _worker_pool() as pool:
        results = list(pool.map(one_seed, seeds))
    hop_errs = np.array([r[0] for r in results])
    report = _base_report(args, "compare", input=args.input, n=n)
    report.update({
        "events": len(stream),
        "theorem1_max_rel_error_per_hop": hop_errs.max(axis=0).tolist(),
        "theorem1_max_rel_error": float(hop_errs.max()),
        "jl_violation_rate": float(np.mean([r[1] for r in results])),
        "jl_violation_bound": 1.0 / ((k + 1) * n),
        "jl_max_normalized_error": float(max(r[2] for r in results)),
        "jl_mean_normalized_error": float(np.mean([r[3] for r in results])),
        "quadruples_per_seed": int(((k + 1) * n) ** 2),
        "warnings": warnings,
    })
    return report


def cmd_sweep(args):
    stream, _ = _load_events(args)
    scheme = _scheme_from_args(args)
    warnings = _range_guard(scheme, stream)
    n = ev.max_node_id(stream) + 1
    k = args.k
    oracle = WalkOracle(stream, scheme, k, n, cap=args.walk_cap)
    ms = oracle.matrices()
    dims = [int(d) for d in args.dims.split(",")]
    seeds = [args.seed + i for i in range(args.seeds)]

    def one(dim_seed):
        dim, seed = dim_seed
        state = _replay_for_seed(stream, scheme, k, dim, seed, n)
        base = state.H[0][:n]  # rescaled hop-0 rows are the raw projection
        err = 0.0
        cells = 0
        for l in range(k + 1):
            block = state.H[l][:n]
            if scheme.variant == TIME_DECAY and l > 0:
                block = block * math.exp(-scheme.param * l * state.t_now)
            est = block @ base.T
            err += float(np.abs(est - ms.A[l]).sum())
            cells += n * n
        return err / cells

    tasks = [(d, s) for d in dims for s in seeds]
    with _worker_pool() as pool:
        flat = list(pool.map(one, tasks))
    table = []
    for i, dim in enumerate(dims):
        per_seed = flat[i * len(seeds):(i + 1) * len(seeds)]
        table.append({
            "dim": dim,
            "mean_abs_error": float(np.mean(per_seed)),
            "std_abs_error": float(np.std(per_seed)),
            "per_seed": per_seed,
        })
    means = [row["mean_abs_error"] for row in table]
    report = _base_report(args, "sweep", input=args.input, n=n, dims=dims)
    report.update({
        "events": len(stream),
        "table": table,
        "monotone_decreasing": all(b < a for a, b in zip(means, means[1:])),
        "warnings": warnings,
    })
    return report


def cmd_bench(args):
    scheme = _scheme_from_args(args)
    edge_counts = [int(x) for x in args.edge_counts.split(",")]
    rows = []
    for n_events in edge_counts:
        stream, n_nodes = synthetic_stream(n_events, seed=args.seed)
        state = SketchState(args.k, args.dim, scheme, args.seed, n_hint=n_nodes)
        start = time.perf_counter()
        for e in stream:  # distinct stamps by construction
            state.apply_event(e)
        elapsed = time.perf_counter() - start
        rows.append({
            "events": n_events,
            "nodes": n_nodes,
            "seconds": elapsed,
            "events_per_second": n_events / elapsed,
            "memory_model_bytes": state.memory_model_bytes(),
            "memory_allocated_bytes": state.allocated_bytes(),
        })
    base = rows[0]
    for row in rows:
        linear = base["seconds"] * row["events"] / base["events"]
        row["vs_linear"] = row["seconds"] / linear
    report = _base_report(args, "bench", edge_counts=edge_counts)
    report["table"] = rows
    return report


# -- entry point -----------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="twm",
        description="Temporal walk matrix sketching: replay, validate, benchmark.",
    )
    p.add_argument("--mode", choices=["replay", "compare", "sweep", "bench"],
                   required=True)
    p.add_argument("--input", help="CSV event stream (u,v,t per line)")
    p.add_argument("--scheme", choices=["decay", "count", "cawn"], default="decay")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-6,
                   help="time decay rate (decay scheme)")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="sampling decay rate (cawn scheme)")
    p.add_argument("--k", type=int, default=3, help="maximum hop count")
    p.add_argument("--dim", type=int, default=64, help="sketch dimension")
    p.add_argument("--dim-auto", action="store_true",
                   help="set dim to ceil(10*ln(2E)) from the input size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--seeds", type=int, default=1, help="ensemble size")
    p.add_argument("--report", help="write the JSON report here (default stdout)")
    p.add_argument("--snapshot-out")
    p.add_argument("--snapshot-in")
    p.add_argument("--edge-counts", default="100000,1000000")
    p.add_argument("--dims", default="1,4,16,64", help="sweep dimension list")
    p.add_argument("--t-origin", default="first",
                   help="'first', 'none', or a numeric origin")
    p.add_argument("--walk-cap", type=int, default=DEFAULT_WALK_CAP)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.mode != "bench" and not args.input:
        print("error: --input is required for this mode", file=sys.stderr)
        return EXIT_CONFIG
    if args.k < 1 or args.dim < 1 or args.seeds < 1 or not 0 < args.epsilon < 1:
        print("error: bad numeric configuration", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.dim_auto and args.input:
            with open(args.input, "rb") as fh:
                args.dim = auto_dimension(len(ev.parse_stream(fh)))
        handler = {"replay": cmd_replay, "compare": cmd_compare,
                   "sweep": cmd_sweep, "bench": cmd_bench}[args.mode]
        report = handler(args)
    except _RangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except WalkExplosion as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXPLOSION
    except (TwmError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
