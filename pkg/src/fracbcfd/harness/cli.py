#
# cli - Command line front end: solve, convergence, compare, soe-check, bench.
#

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence

import pandas as pd

from ..grid import GRID_KINDS, StaggeredGrid, build_grid, read_grid_file
from ..krylov import FAST_BICGSTAB, METHODS, SolveConfig, cn_march
from ..problems import PROBLEMS, ManufacturedProblem, get_problem
from . import studies
from .tablefile import EXACT_FLOAT_FORMAT, STDOUT, data_from_json_file, emit_csv, parse_int_list

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class UsageError(Exception):
    """Raised by the parser in place of exiting with argparse's status 2."""


class HarnessParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors map to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_problem_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--problem", default="ex1", choices=sorted(PROBLEMS), help="Test problem")
    parser.add_argument("--alpha", type=float, default=1.5, help="Fractional order in (1, 2)")
    parser.add_argument("--gamma", type=float, default=0.5, help="Left/right weight in [0, 1]")


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", default="uniform", choices=GRID_KINDS, help="Grid family")
    parser.add_argument("--xi", type=float, default=0.0, help="Perturbation strength for perturbed grids")
    parser.add_argument("--kappa", type=float, default=1.0, help="Grading exponent for graded grids")
    parser.add_argument("--grid-gamma", type=float, default=None,
                        help="Split fraction for graded grids, the problem's gamma when omitted")
    parser.add_argument("--seed", type=int, default=0, help="Seed for perturbed grids")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--N", type=int, default=64, help="Time steps")
    parser.add_argument("--method", default=FAST_BICGSTAB, help=f"One of {', '.join(METHODS)}")
    parser.add_argument("--tol", type=float, default=1e-10, help="BiCGSTAB relative residual tolerance")
    parser.add_argument("--soe-eps", type=float, default=1e-10, help="Kernel tolerance for the fast method")
    parser.add_argument("--max-iters", type=int, default=None, help="BiCGSTAB iteration cap per level")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=STDOUT, help="Output CSV path, - for stdout")
    parser.add_argument("--no-timing", action="store_true", help="Leave out timing columns")


def _add_M_range_flags(parser: argparse.ArgumentParser, start: int, stop: int) -> None:
    parser.add_argument("--M-list", default=None, help="Comma separated cell counts")
    parser.add_argument("--M-start", type=int, default=start, help="First power-of-two cell count")
    parser.add_argument("--M-stop", type=int, default=stop, help="Last power-of-two cell count")


def build_parser() -> HarnessParser:
    """The full argument parser, one subparser per command."""
    parser = HarnessParser(prog="fracbcfd", description="Two-sided fractional diffusion solver harness")
    parser.add_argument("--config", default=None, help="JSON file of flag defaults, keyed by option name")
    parser.add_argument("--log-level", default="WARNING", choices=LOG_LEVELS, help="Logging level")
    parser.add_argument("-v", "--verbose", action="store_true", help="Same as --log-level INFO")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=HarnessParser)

    solve = sub.add_parser("solve", help="Solve one problem and report errors")
    _add_problem_flags(solve)
    _add_grid_flags(solve)
    _add_solver_flags(solve)
    _add_output_flags(solve)
    solve.add_argument("--M", type=int, default=64, help="Number of cells")
    solve.add_argument("--grid-file", default=None, help="Read the grid edges from a file")
    solve.set_defaults(handler=cmd_solve)

    conv = sub.add_parser("convergence", help="Errors and observed orders over a sequence of grids")
    _add_problem_flags(conv)
    _add_grid_flags(conv)
    _add_solver_flags(conv)
    _add_output_flags(conv)
    _add_M_range_flags(conv, 32, 256)
    conv.add_argument("--N-rule", default="fixed", choices=studies.N_RULES,
                      help="fixed: N from --N for every row; equal: N = M")
    conv.set_defaults(handler=cmd_convergence)

    compare = sub.add_parser("compare", help="Run all three methods on the same inputs")
    _add_problem_flags(compare)
    _add_grid_flags(compare)
    _add_solver_flags(compare)
    _add_output_flags(compare)
    compare.add_argument("--M", type=int, default=64, help="Number of cells")
    compare.add_argument("--grid-file", default=None, help="Read the grid edges from a file")
    compare.add_argument("--cap-dense-M", type=int, default=studies.DEFAULT_DENSE_CAP,
                         help="Largest M for the dense methods")
    compare.set_defaults(handler=cmd_compare)

    soe = sub.add_parser("soe-check", help="Build an exponential sum and write its nodes and weights")
    soe.add_argument("--alpha", type=float, default=1.5, help="Fractional order in (1, 2)")
    soe.add_argument("--soe-eps", type=float, default=1e-10, help="Absolute kernel tolerance")
    soe.add_argument("--dx", type=float, default=1e-4, help="Lower end of the range")
    soe.add_argument("--X", type=float, default=2.0, help="Upper end of the range")
    _add_output_flags(soe)
    soe.set_defaults(handler=cmd_soe_check)

    bench = sub.add_parser("bench", help="Time the fast operator against dense products")
    bench.add_argument("--alpha", type=float, default=1.5, help="Fractional order in (1, 2)")
    bench.add_argument("--soe-eps", type=float, default=1e-10, help="Kernel tolerance")
    _add_M_range_flags(bench, 1024, 16384)
    bench.add_argument("--repeats", type=int, default=3, help="Timed repetitions per size")
    bench.add_argument("--cap-dense-M", type=int, default=8192, help="Largest M for the dense product")
    bench.add_argument("--no-memory", action="store_true", help="Skip the allocation audit")
    bench.add_argument("--seed", type=int, default=0, help="Seed for the random vectors")
    _add_output_flags(bench)
    bench.set_defaults(handler=cmd_bench)
    return parser


def _subparsers(parser: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return dict(action.choices)
    return {}


def _known_dests(parser: argparse.ArgumentParser) -> set:
    return {action.dest for action in parser._actions if action.dest != argparse.SUPPRESS}


def apply_config_file(parser: argparse.ArgumentParser, command: str, filepath: str) -> None:
    """
    Install a JSON file's values as parser defaults so command-line flags win.

    Keys are option names with or without leading dashes, hyphens or underscores.

    Raises:
        ValueError: If a key is not an option of the command
    """
    config = data_from_json_file(filepath)
    sub = _subparsers(parser)[command]
    top_dests = _known_dests(parser)
    sub_dests = _known_dests(sub)
    top_values, sub_values = {}, {}
    for key, value in config.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest in sub_dests and dest != "help":
            sub_values[dest] = value
        elif dest in top_dests and dest not in ("config", "command", "help"):
            top_values[dest] = value
        else:
            raise ValueError(f"Config file {filepath}: unknown option {key!r} for command {command}")
    parser.set_defaults(**top_values)
    sub.set_defaults(**sub_values)
    logger.debug("config %s supplied %s", filepath, ", ".join(sorted(config)))


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse the command line, applying --config defaults first."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        parser = build_parser()
        apply_config_file(parser, args.command, args.config)
        args = parser.parse_args(argv)
    return args


def _M_values(args: argparse.Namespace) -> List[int]:
    if args.M_list:
        return parse_int_list(args.M_list)
    if args.M_start < 1 or args.M_stop < args.M_start:
        raise ValueError(f"bad M range {args.M_start}..{args.M_stop}")
    values = []
    M = args.M_start
    while M <= args.M_stop:
        values.append(M)
        M *= 2
    return values


def _problem(args: argparse.Namespace) -> ManufacturedProblem:
    return get_problem(args.problem, args.alpha, args.gamma)


def _grid_params(args: argparse.Namespace) -> Dict:
    split = args.gamma if args.grid_gamma is None else args.grid_gamma
    return {"xi": args.xi, "seed": args.seed, "gamma": split, "kappa": args.kappa}


def _grid(args: argparse.Namespace, problem: ManufacturedProblem) -> StaggeredGrid:
    if args.grid_file:
        grid = read_grid_file(args.grid_file)
        logger.info("read %d-cell grid from %s", grid.M, args.grid_file)
        return grid
    return build_grid(args.grid, problem.a, problem.b, args.M, **_grid_params(args))


def _config(args: argparse.Namespace, N: Optional[int] = None) -> SolveConfig:
    return SolveConfig(method=args.method, N=args.N if N is None else N, rel_tol=args.tol,
                       max_iters=args.max_iters, soe_eps=args.soe_eps)


def _status_code(statuses) -> int:
    return EXIT_OK if all(status == studies.STATUS_OK for status in statuses) else EXIT_SOLVER


def cmd_solve(args: argparse.Namespace) -> int:
    problem = _problem(args)
    grid = _grid(args, problem)
    config = _config(args)
    result = cn_march(grid, problem.spec, config)
    err_u, err_p = studies.solution_errors(grid, problem.spec, result)
    status = studies.STATUS_NONCONVERGED if result.nonconverged else studies.STATUS_OK
    row = {
        "problem": problem.name,
        "method": result.method,
        "M": grid.M,
        "N": config.N,
        "Error-u": err_u,
        "Error-p": err_p,
        "cpu_ms": 1000.0 * result.wall_time,
        "avg_iters": result.avg_iters,
        "N_exp": result.n_exp,
        "status": status,
    }
    if args.no_timing:
        del row["cpu_ms"]
    emit_csv(pd.DataFrame([row]))
    if args.out != STDOUT:
        emit_csv(studies.profile_frame(grid, problem.spec, result), args.out)
    return _status_code([status])


def cmd_convergence(args: argparse.Namespace) -> int:
    problem = _problem(args)
    rows = studies.run_convergence(
        problem,
        args.grid,
        _grid_params(args),
        M_list=_M_values(args),
        N_rule=args.N_rule,
        N=args.N,
        method=args.method,
        rel_tol=args.tol,
        soe_eps=args.soe_eps,
        max_iters=args.max_iters,
    )
    emit_csv(studies.convergence_frame(rows, timing=not args.no_timing), args.out)
    return _status_code(row.status for row in rows)


def cmd_compare(args: argparse.Namespace) -> int:
    problem = _problem(args)
    grid = _grid(args, problem)
    rows = studies.run_compare(problem, grid, args.N, rel_tol=args.tol, soe_eps=args.soe_eps,
                               max_iters=args.max_iters, dense_cap=args.cap_dense_M)
    emit_csv(studies.compare_frame(rows, timing=not args.no_timing), args.out)
    return _status_code(row.status for row in rows)


def cmd_soe_check(args: argparse.Namespace) -> int:
    soe, build_ms = studies.timed_soe(args.alpha, args.soe_eps, args.dx, args.X)
    summary = studies.soe_summary_frame(soe, None if args.no_timing else build_ms)
    emit_csv(studies.soe_nodes_frame(soe), args.out, float_format=EXACT_FLOAT_FORMAT)
    if args.out != STDOUT:
        emit_csv(summary)
    else:
        logger.info("soe: %d exponentials, sampled error %.3e", soe.n_exp, soe.max_error)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    rows = studies.run_bench(args.alpha, _M_values(args), eps=args.soe_eps, repeats=args.repeats,
                             dense_max_M=args.cap_dense_M, memory=not args.no_memory, seed=args.seed)
    emit_csv(studies.bench_frame(rows, timing=not args.no_timing), args.out)
    return EXIT_OK


def _configure_logging(args: argparse.Namespace) -> None:
    level = "INFO" if args.verbose and args.log_level == "WARNING" else args.log_level
    logging.basicConfig(level=getattr(logging, level), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one harness command.

    Returns:
        int: 0 on success, 1 on a usage or input error, 2 when a solve did not
        converge or failed numerically
    """
    try:
        args = parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as err:
        print(f"fracbcfd: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(args)
    try:
        return args.handler(args)
    except (ValueError, OSError) as err:
        logger.error("%s", err)
        print(f"fracbcfd: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as err:
        logger.error("%s", err)
        print(f"fracbcfd: solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
