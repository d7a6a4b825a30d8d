"""Command-line interface.

Exit codes: 0 success, 1 a check failed, 2 usage error, 3 unreadable or
malformed input, 4 matrix rank too low for the request, 5 instance too large
for the brute-force oracle.
"""

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InfeasibleCompletionError, OracleCapError, RankDeficientError, VolcolError
from .greedy import bound_report, greedy_path
from .hardness import HardInstanceSpec, make_block_instance, predicted_block_ratio
from .linalg import rank_k_error, spectrum
from .matrix_io import MatrixFormatError, read_matrix, write_matrix
from .oracle import best_subset
from .sampler import volume_sample
from .verify import verify_instance, verify_report

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_RANK = 4
EXIT_CAP = 5

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2) + "\n"


def cmd_select(args):
    X = read_matrix(args.input, args.format)
    r = args.r
    k = r if args.k is None else args.k
    if not 1 <= k <= r:
        raise UsageError(f"need 1 <= k <= r, got k={k}, r={r}")
    if r > X.shape[1]:
        raise UsageError(f"r={r} exceeds the number of columns {X.shape[1]}")
    if k > min(X.shape):
        raise UsageError(f"k={k} exceeds min(m, n)={min(X.shape)}")
    t0 = time.perf_counter()
    seed = None
    if args.method == "volume":
        seed = args.seed
        chosen = volume_sample(X, r, rng=seed).chosen
    elif args.method == "greedy":
        chosen = greedy_path(X, r)[-1].chosen
    else:
        chosen, _ = best_subset(X, r)
    elapsed = time.perf_counter() - t0 if args.timing else None
    report = bound_report(X, chosen, k, method=args.method, seed=seed, wall_time=elapsed)
    _emit(report.to_json(), args.output)
    return EXIT_OK


def _finish_checks(checks, output):
    payload = {
        "passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
    }
    _emit(_dump(payload), output)
    for c in checks:
        if not c.passed:
            print(f"FAILED {c.name}: {c.detail}", file=sys.stderr)
    return EXIT_OK if payload["passed"] else EXIT_CHECK_FAILED


def cmd_verify(args):
    X = read_matrix(args.input, args.format)
    if args.report:
        try:
            report = json.loads(Path(args.report).read_text())
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"{args.report}: invalid JSON: {exc}") from exc
        return _finish_checks(verify_report(X, report), args.output)
    r_max = args.r if args.r is not None else min(X.shape[1], 4)
    k_max = args.k if args.k is not None else r_max
    checks = verify_instance(X, r_max, k_max, trials=args.trials, seed=args.seed)
    return _finish_checks(checks, args.output)


def cmd_gen_hard(args):
    try:
        spec = HardInstanceSpec(k=args.blocks, n0=args.n0, delta=args.delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not args.output:
        raise UsageError("gen-hard needs --output")
    X = make_block_instance(spec)
    write_matrix(args.output, X, args.format)
    predicted = {
        str(r): predicted_block_ratio(spec, r) for r in range(spec.k, min(3 * spec.k, spec.n - 1) + 1)
    }
    meta = {
        "k": spec.k,
        "n0": spec.n0,
        "delta": spec.delta,
        "n": spec.n,
        "rank_k_error": rank_k_error(X, spec.k),
        "predicted_block_ratio": predicted,
    }
    Path(str(args.output) + ".json").write_text(_dump(meta))
    return EXIT_OK


def cmd_bench(args):
    from .bench import run_bench

    if min(args.rows, args.cols, args.r) < 1 or args.r > min(args.rows, args.cols):
        raise UsageError("need 1 <= r <= min(rows, cols)")
    result = run_bench(args.rows, args.cols, args.r, args.repetitions, args.seed, args.doublings)
    _emit(_dump(result), args.output)
    return EXIT_OK


def cmd_spectrum(args):
    X = read_matrix(args.input, args.format)
    sigma = spectrum(X)
    kmax = min(X.shape)
    payload = {
        "m": X.shape[0],
        "n": X.shape[1],
        "eigenvalues": [float(v) for v in sigma],
        "rank_k_error": {str(k): float(np.sum(sigma[k:])) for k in range(kmax + 1)},
    }
    _emit(_dump(payload), args.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="volcol", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"volcol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, need_input=True):
        if need_input:
            p.add_argument("--input", required=True, help="matrix file (CSV or VCOL1 binary)")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "bin"), help="matrix file format (default: by extension/magic)")

    p = sub.add_parser("select", help="choose r columns and report the achieved ratio")
    io_flags(p)
    p.add_argument("-r", type=int, required=True, help="number of columns to choose")
    p.add_argument("-k", type=int, help="rank of the comparison approximation (default: r)")
    p.add_argument("--method", choices=("volume", "greedy", "brute"), default="greedy")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for --method volume")
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("verify", help="check identities and bounds against the brute-force oracle")
    io_flags(p)
    p.add_argument("-r", type=int, help="largest subset size to check (default: min(n, 4))")
    p.add_argument("-k", type=int, help="largest rank to check (default: r)")
    p.add_argument("--trials", type=int, default=0, help="volume_sample draws for an empirical check")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--report", help="instead, re-check a selection report against the matrix")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen-hard", help="write a block instance with Gram I_k (x) (delta I + J)")
    io_flags(p, need_input=False)
    p.add_argument("--blocks", type=int, required=True, help="number of blocks k")
    p.add_argument("--n0", type=int, required=True, help="block size")
    p.add_argument("--delta", type=float, default=1e-3)
    p.set_defaults(func=cmd_gen_hard)

    p = sub.add_parser("bench", help="time volume_sample and estimate scaling exponents")
    p.add_argument("--rows", "-m", type=int, default=100)
    p.add_argument("--cols", "-n", type=int, default=1000)
    p.add_argument("-r", type=int, default=10)
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--doublings", type=int, default=1, help="size doublings in each sweep (0 disables)")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("spectrum", help="print Gram eigenvalues and rank-k errors")
    io_flags(p)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"volcol: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MatrixFormatError, OSError) as exc:
        print(f"volcol: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RankDeficientError, InfeasibleCompletionError) as exc:
        print(f"volcol: rank error: {exc}", file=sys.stderr)
        return EXIT_RANK
    except OracleCapError as exc:
        print(f"volcol: {exc}", file=sys.stderr)
        return EXIT_CAP
    except VolcolError as exc:
        print(f"volcol: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
