"""Command-line entry point: ``blockqp <subcommand> ...``.

Exit status: 0 on success, 1 on usage or input errors, 2 on numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .bench import PRESETS, BenchRow, load_config, parse_blocks, preset_rows, run_bench, write_csv
from .errors import BlockQpError, FactorizationError
from .factor import factorize_block_kkt, factorize_dense_bbk
from .generate import GenSpec, generate
from .model import assemble_kkt, read_problem, write_problem
from .pattern import predict_nnz_dense_h
from .solve import solve_qp

EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _blocks(text: str):
    try:
        return parse_blocks(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockqp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a random instance in BLOCKQP v1 format")
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--blocks", type=_blocks, required=True, help='e.g. "10x(50x10)"')
    p.add_argument("--density", type=float, default=1.0, help="Hessian density; 1 = dense")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("factorize", help="factorize the KKT matrix of an instance")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--strategy", choices=("structured", "bbk"), default="structured")
    p.add_argument("--seed", type=int, default=0, help="block-selection seed")
    p.add_argument("--stats-out", help="write statistics as JSON")

    p = sub.add_parser("solve", help="solve an instance and report the KKT residual")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--strategy", choices=("structured", "bbk"), default="structured")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--print-solution", action="store_true")

    p = sub.add_parser("bench", help="run nnz/residual benchmarks and write CSV")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="JSON config file")
    src.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--vars", type=int)
    p.add_argument("--blocks", type=_blocks)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--baseline", action=argparse.BooleanOptionalAction, default=True,
                   help="also factorize with whole-matrix BBK")
    p.add_argument("--csv-out", required=True)

    p = sub.add_parser("predict-nnz", help="closed-form nnz(L) for a dense Hessian")
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--blocks", type=_blocks, required=True)
    return parser


def _factor_stats(f, K) -> dict:
    structured = [r for r in f.pivot_log if r.phase == "structured"]
    dense = [r for r in f.pivot_log if r.phase == "dense"]
    stats = {
        "strategy": f.strategy,
        "s": f.s,
        "seed": f.seed,
        "nnz_L": f.nnz(),
        "fill_in_structured_phase": f.structured_fill(),
        "fill_total": sum(r.fill for r in f.pivot_log),
        "structured_pivots": len(structured),
        "dense_pivots_1x1": sum(1 for r in dense if r.kind.value == 1),
        "dense_pivots_2x2": sum(1 for r in dense if r.kind.value == 2),
        "max_dense_multiplier": f.max_multiplier(),
        "solve_flops": f.solve_flops(),
    }
    H = K.entries[:K.n, :K.n]
    if np.count_nonzero(H) == H.size:
        stats["predicted_nnz"] = predict_nnz_dense_h(K.n, _dims_from_layout(K.layout))
    return stats


def _dims_from_layout(layout):
    return [(int(layout.eC[b] - layout.sC[b] + 1), int(layout.eR[b] - layout.sR[b] + 1)) for b in range(layout.N)]


def _cmd_generate(args) -> int:
    try:
        spec = GenSpec(args.vars, args.blocks, args.density, args.seed)
    except BlockQpError as exc:
        raise UsageError(str(exc)) from None
    write_problem(generate(spec), args.out)
    return 0


def _cmd_factorize(args) -> int:
    K = assemble_kkt(read_problem(args.infile))
    if args.strategy == "structured":
        f = factorize_block_kkt(K, seed=args.seed)
    else:
        f = factorize_dense_bbk(K)
    stats = _factor_stats(f, K)
    for key, value in stats.items():
        print(f"{key}: {value}")
    if args.stats_out:
        with open(args.stats_out, "w") as fh:
            json.dump(stats, fh, indent=2)
    return 0


def _cmd_solve(args) -> int:
    problem = read_problem(args.infile)
    sol = solve_qp(problem, seed=args.seed, strategy=args.strategy)
    A = problem.constraint_matrix()
    print(f"residual: {sol.residual:.6e}")
    print(f"feasibility: {np.linalg.norm(A @ sol.x_star - problem.e):.6e}")
    print(f"stationarity: {np.linalg.norm(problem.H @ sol.x_star + problem.c - A.T @ sol.lambda_star):.6e}")
    if args.print_solution:
        for i, x in enumerate(sol.x_star, 1):
            print(f"x[{i}] = {x:.17g}")
        for i, lam in enumerate(sol.lambda_star, 1):
            print(f"lambda[{i}] = {lam:.17g}")
    return 0


def _cmd_bench(args) -> int:
    baseline = args.baseline
    if args.config:
        rows, cfg_baseline = load_config(args.config)
        baseline = baseline and cfg_baseline
    elif args.preset:
        rows = preset_rows(args.preset, args.instances, args.seed)
    elif args.vars is not None and args.blocks is not None:
        try:
            rows = [BenchRow(args.vars, args.blocks, args.density, args.instances, args.seed)]
        except BlockQpError as exc:
            raise UsageError(str(exc)) from None
    else:
        raise UsageError("bench: give --config, --preset, or both --vars and --blocks")
    reports = run_bench(rows, baseline=baseline)
    write_csv(reports, args.csv_out)
    for rep in reports:
        line = f"{rep.n:5d} {rep.block_spec:<45s} d={rep.density:<4g} nnz_ours={rep.nnz_ours}"
        if rep.nnz_bbk is not None:
            line += f" nnz_bbk={rep.nnz_bbk} flops_ours={rep.flops_ours} flops_bbk={rep.flops_bbk}"
        print(line)
        for err in rep.errors:
            print(f"  error: {err}", file=sys.stderr)
    return 0


def _cmd_predict(args) -> int:
    try:
        print(predict_nnz_dense_h(args.vars, args.blocks))
    except BlockQpError as exc:
        raise UsageError(str(exc)) from None
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "factorize": _cmd_factorize,
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "predict-nnz": _cmd_predict,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except FactorizationError as exc:
        print(f"blockqp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (BlockQpError, OSError, ValueError) as exc:
        print(f"blockqp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
