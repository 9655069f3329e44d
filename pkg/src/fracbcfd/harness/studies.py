#
# studies - Convergence, comparison, kernel and timing studies behind the CLI.
#

from dataclasses import dataclass, fields
import logging
import math
import time
import tracemalloc
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..dense import ProblemSpec
from ..errors import DenseCapError
from ..fastop import apply_B, precompute
from ..grid import StaggeredGrid, build_grid, build_uniform
from ..krylov import DENSE_BICGSTAB, DENSE_GE, FAST_BICGSTAB, MarchResult, SolveConfig, cn_march
from ..problems import ManufacturedProblem
from ..soe import SoeApproximation, build_soe
from .tablefile import rows_to_frame

logger = logging.getLogger(__name__)

DEFAULT_DENSE_CAP = 1024
N_RULES = ("fixed", "equal")
STATUS_OK = "ok"
STATUS_NONCONVERGED = "nonconverged"

CONVERGENCE_HEADERS = {
    "M": "M",
    "N": "N",
    "error_u": "Error-u",
    "order_u": "Order-u",
    "error_p": "Error-p",
    "order_p": "Order-p",
    "cpu_ms": "cpu_ms",
    "avg_iters": "avg_iters",
    "status": "status",
}
TIMING_COLUMNS = ("cpu_ms",)


@dataclass
class ConvergenceRow:
    """One mesh level of a convergence study."""
    M: int
    N: int
    error_u: float
    order_u: Optional[float]
    error_p: float
    order_p: Optional[float]
    cpu_ms: float
    avg_iters: float
    status: str = STATUS_OK


@dataclass
class CompareRow:
    """One method's result on a shared grid and problem."""
    method: str
    M: int
    N: int
    error_u: float
    error_p: float
    discrepancy: float
    cpu_ms: float
    avg_iters: float
    n_exp: int
    status: str = STATUS_OK


COMPARE_HEADERS = {
    "method": "method",
    "M": "M",
    "N": "N",
    "error_u": "Error-u",
    "error_p": "Error-p",
    "discrepancy": "max_du",
    "cpu_ms": "cpu_ms",
    "avg_iters": "avg_iters",
    "n_exp": "N_exp",
    "status": "status",
}


@dataclass
class BenchRow:
    """Timing and storage of one operator size."""
    M: int
    n_exp: int
    fast_ms: float
    fast_ratio: Optional[float]
    dense_ms: Optional[float]
    dense_ratio: Optional[float]
    peak_bytes: Optional[int]
    bytes_per_mn: Optional[float]


BENCH_TIMING_COLUMNS = ("fast_ms", "fast_ratio", "dense_ms", "dense_ratio")


def table_columns(headers: Mapping[str, str], timing: bool, timing_columns: Sequence[str]) -> List[str]:
    """Field names to write, without the timing fields when timing is off."""
    return [name for name in headers if timing or name not in timing_columns]


def solution_errors(grid: StaggeredGrid, problem: ProblemSpec, result: MarchResult) -> Tuple[float, float]:
    """
    Max-norm errors of u over the centers and of p over the interior edges at t = T.

    Raises:
        ValueError: If the problem has no exact solution
    """
    if not problem.has_exact:
        raise ValueError("problem has no exact solution to measure errors against")
    T = problem.T
    u_exact = np.broadcast_to(problem.exact_u(np.asarray(grid.centers), T), (grid.M,))
    p_exact = np.broadcast_to(problem.exact_p(np.asarray(grid.edges[1:-1]), T), (grid.M - 1,))
    err_u = float(np.max(np.abs(result.u_final - u_exact)))
    err_p = float(np.max(np.abs(result.p_final[1:-1] - p_exact)))
    return err_u, err_p


def convergence_orders(M_list: Sequence[int], errors: Sequence[float]) -> List[Optional[float]]:
    """
    Observed orders log(e_prev / e) / log(M / M_prev); the first entry is None.

    Entries next to a missing or non-positive error are None.
    """
    orders: List[Optional[float]] = [None]
    for k in range(1, len(errors)):
        e_prev, e_cur = errors[k - 1], errors[k]
        if not (np.isfinite(e_prev) and np.isfinite(e_cur)) or e_prev <= 0.0 or e_cur <= 0.0:
            orders.append(None)
            continue
        orders.append(math.log(e_prev / e_cur) / math.log(M_list[k] / M_list[k - 1]))
    return orders


def steps_for(M: int, N_rule: str, N: int) -> int:
    """Number of time steps for a mesh level."""
    if N_rule == "equal":
        return M
    if N_rule == "fixed":
        return N
    raise ValueError(f"Unknown N rule {N_rule!r}, expected one of {', '.join(N_RULES)}")


def _check_M_list(M_list: Sequence[int]) -> List[int]:
    M_list = [int(M) for M in M_list]
    if not M_list:
        raise ValueError("M list is empty")
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise ValueError(f"M list must be increasing, got {M_list}")
    return M_list


def run_convergence(
    problem: ManufacturedProblem,
    grid_kind: str,
    grid_params: Optional[Dict] = None,
    M_list: Sequence[int] = (32, 64, 128, 256),
    N_rule: str = "fixed",
    N: int = 4096,
    method: str = FAST_BICGSTAB,
    rel_tol: float = 1e-10,
    soe_eps: float = 1e-10,
    max_iters: Optional[int] = None,
) -> List[ConvergenceRow]:
    """
    Solve one problem on a sequence of grids and tabulate errors and orders.

    Args:
        problem: Registered problem, carries alpha and gamma
        grid_kind: uniform, perturbed or graded
        grid_params: Keyword arguments for ``build_grid`` (xi, seed, gamma, kappa)
        M_list: Increasing cell counts
        N_rule: "fixed" uses N for every row, "equal" uses N = M
        N: Time steps for the fixed rule
        method: Solver method name
        rel_tol: BiCGSTAB tolerance
        soe_eps: Kernel tolerance for the fast method
        max_iters: BiCGSTAB iteration cap per level

    Returns:
        List[ConvergenceRow]: One row per M. A row whose solve raised a numerical
        error holds NaN errors and the message in its status.

    Raises:
        ValueError: If the inputs are invalid
    """
    M_list = _check_M_list(M_list)
    grid_params = dict(grid_params or {})
    spec = problem.spec
    rows: List[ConvergenceRow] = []
    for M in M_list:
        config = SolveConfig(method=method, N=steps_for(M, N_rule, N), rel_tol=rel_tol,
                             max_iters=max_iters, soe_eps=soe_eps)
        grid = build_grid(grid_kind, spec.a, spec.b, M, **grid_params)
        try:
            result = cn_march(grid, spec, config)
        except RuntimeError as err:
            logger.warning("%s M=%d failed: %s", problem.name, M, err)
            rows.append(ConvergenceRow(M, config.N, math.nan, None, math.nan, None, math.nan, math.nan,
                                       f"failed: {err}"))
            continue
        err_u, err_p = solution_errors(grid, spec, result)
        status = STATUS_NONCONVERGED if result.nonconverged else STATUS_OK
        rows.append(ConvergenceRow(M, config.N, err_u, None, err_p, None, 1000.0 * result.wall_time,
                                   result.avg_iters, status))
        logger.info("%s M=%d N=%d: Error-u %.4e Error-p %.4e", problem.name, M, config.N, err_u, err_p)

    orders_u = convergence_orders(M_list, [row.error_u for row in rows])
    orders_p = convergence_orders(M_list, [row.error_p for row in rows])
    for row, ou, op in zip(rows, orders_u, orders_p):
        row.order_u = ou
        row.order_p = op
    return rows


def convergence_frame(rows: Sequence[ConvergenceRow], timing: bool = True) -> pd.DataFrame:
    """ConvergenceRow list as a table with the published column headers."""
    columns = table_columns(CONVERGENCE_HEADERS, timing, TIMING_COLUMNS)
    return rows_to_frame(rows, columns, CONVERGENCE_HEADERS)


def run_compare(
    problem: ManufacturedProblem,
    grid: StaggeredGrid,
    N: int,
    rel_tol: float = 1e-10,
    soe_eps: float = 1e-10,
    max_iters: Optional[int] = None,
    dense_cap: int = DEFAULT_DENSE_CAP,
) -> List[CompareRow]:
    """
    Run dense-ge, dense-bicgstab and fast-bicgstab on the same inputs.

    The discrepancy column is max |u - u_dense_ge| at t = T.

    Raises:
        DenseCapError: If grid.M exceeds dense_cap
        SingularSystemError: If the dense-ge reference is singular
    """
    if grid.M > dense_cap:
        raise DenseCapError(f"dense solvers are capped at M={dense_cap}, got M={grid.M}; raise --cap-dense-M to force")
    spec = problem.spec
    results: Dict[str, MarchResult] = {}
    for method in (DENSE_GE, DENSE_BICGSTAB, FAST_BICGSTAB):
        config = SolveConfig(method=method, N=N, rel_tol=rel_tol, max_iters=max_iters, soe_eps=soe_eps)
        results[method] = cn_march(grid, spec, config)

    reference = results[DENSE_GE].u_final
    rows = []
    for method, result in results.items():
        err_u, err_p = solution_errors(grid, spec, result)
        rows.append(CompareRow(
            method=method,
            M=grid.M,
            N=N,
            error_u=err_u,
            error_p=err_p,
            discrepancy=float(np.max(np.abs(result.u_final - reference))),
            cpu_ms=1000.0 * result.wall_time,
            avg_iters=result.avg_iters,
            n_exp=result.n_exp,
            status=STATUS_NONCONVERGED if result.nonconverged else STATUS_OK,
        ))
    return rows


def compare_frame(rows: Sequence[CompareRow], timing: bool = True) -> pd.DataFrame:
    columns = table_columns(COMPARE_HEADERS, timing, TIMING_COLUMNS)
    return rows_to_frame(rows, columns, COMPARE_HEADERS)


def constant_coefficient_problem(alpha: float, gamma: float = 0.5) -> ProblemSpec:
    """K = 1 on [0, 1] with zero data, for operator timing."""
    def one(x, t):
        return np.ones_like(np.asarray(x, dtype=np.float64))

    def zero(x, t=0.0):
        return np.zeros_like(np.asarray(x, dtype=np.float64))

    return ProblemSpec(alpha=alpha, gamma=gamma, KL=one, KR=one, f=zero,
                       phi=lambda t: 0.0, varphi=lambda t: 0.0, u0=zero)


def _best_time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _ratio(cur: Optional[float], prev: Optional[float]) -> Optional[float]:
    if cur is None or prev is None or prev <= 0.0:
        return None
    return cur / prev


def fast_peak_bytes(grid: StaggeredGrid, problem: ProblemSpec, soe) -> int:
    """Peak traced allocation while building the fast operator and applying it once."""
    was_tracing = tracemalloc.is_tracing()
    if not was_tracing:
        tracemalloc.start()
    tracemalloc.reset_peak()
    base = tracemalloc.get_traced_memory()[0]
    op = precompute(grid, problem.alpha, soe).at_time(problem, 1.0)
    apply_B(op, problem, 1.0, np.ones(grid.M))
    peak = tracemalloc.get_traced_memory()[1]
    if not was_tracing:
        tracemalloc.stop()
    return int(peak - base)


def run_bench(
    alpha: float,
    M_list: Sequence[int],
    eps: float = 1e-10,
    repeats: int = 3,
    dense_max_M: int = 8192,
    memory: bool = True,
    seed: int = 0,
) -> List[BenchRow]:
    """
    Time the fast operator and a dense matrix-vector product across sizes.

    One exponential sum, built for the finest uniform grid on [0, 1], serves
    every size, so N_exp is the same in all rows.

    Args:
        alpha: Fractional order
        M_list: Increasing cell counts
        eps: Kernel tolerance
        repeats: Timed repetitions, the best is kept
        dense_max_M: Largest M for the dense product
        memory: Also record the traced peak allocation of the fast path
        seed: Seed for the random vectors

    Returns:
        List[BenchRow]: One row per M, ratios against the previous row
    """
    M_list = _check_M_list(M_list)
    if repeats < 1:
        raise ValueError(f"repeats must be at least 1, got {repeats}")
    problem = constant_coefficient_problem(alpha)
    soe = build_soe(alpha, eps, 1.0 / M_list[-1], 1.0)
    rng = np.random.Generator(np.random.PCG64(seed))
    rows: List[BenchRow] = []
    prev_fast = prev_dense = None
    for M in M_list:
        grid = build_uniform(0.0, 1.0, M)
        op = precompute(grid, alpha, soe).at_time(problem, 1.0)
        v = rng.standard_normal(M)
        fast_s = _best_time(lambda: apply_B(op, problem, 1.0, v), repeats)
        dense_s = None
        if M <= dense_max_M:
            A = rng.standard_normal((M, M))
            dense_s = _best_time(lambda: A @ v, repeats)
            del A
        peak = fast_peak_bytes(grid, problem, soe) if memory else None
        rows.append(BenchRow(
            M=M,
            n_exp=soe.n_exp,
            fast_ms=1000.0 * fast_s,
            fast_ratio=_ratio(fast_s, prev_fast),
            dense_ms=None if dense_s is None else 1000.0 * dense_s,
            dense_ratio=_ratio(dense_s, prev_dense),
            peak_bytes=peak,
            bytes_per_mn=None if peak is None else peak / (M * soe.n_exp),
        ))
        logger.info("bench M=%d: apply %.3f ms", M, 1000.0 * fast_s)
        prev_fast, prev_dense = fast_s, dense_s
    return rows


def bench_frame(rows: Sequence[BenchRow], timing: bool = True) -> pd.DataFrame:
    headers = {f.name: f.name for f in fields(BenchRow)}
    columns = table_columns(headers, timing, BENCH_TIMING_COLUMNS)
    return rows_to_frame(rows, columns)


def timed_soe(alpha: float, eps: float, dx_cut: float, X: float) -> Tuple[SoeApproximation, float]:
    """Build one exponential sum and return it with its build time in ms."""
    start = time.perf_counter()
    soe = build_soe(alpha, eps, dx_cut, X)
    return soe, 1000.0 * (time.perf_counter() - start)


def soe_summary_frame(soe: SoeApproximation, build_ms: Optional[float] = None) -> pd.DataFrame:
    """Single-row summary of an exponential sum; build_ms is left out when None."""
    row = {
        "alpha": soe.alpha,
        "eps": soe.eps,
        "dx_cut": soe.dx_cut,
        "X": soe.X,
        "N_exp": soe.n_exp,
        "gauss_order": soe.gauss_order,
        "max_error": soe.max_error,
        "min_lambda": float(np.min(soe.lambdas)),
        "max_lambda": float(np.max(soe.lambdas)),
        "positive": bool(np.all(soe.lambdas > 0.0) and np.all(soe.thetas > 0.0)),
    }
    if build_ms is not None:
        row["build_ms"] = build_ms
    return pd.DataFrame([row])


def soe_nodes_frame(soe: SoeApproximation) -> pd.DataFrame:
    """Nodes and weights of an exponential sum, one row per term, s counting from 1."""
    return pd.DataFrame({
        "s": np.arange(1, soe.n_exp + 1),
        "lambda": soe.lambdas,
        "theta": soe.thetas,
    })


def soe_report(alpha: float, eps: float, dx_cut: float, X: float, timing: bool = True) -> pd.DataFrame:
    """Build one exponential sum and summarise it as a single-row table."""
    soe, build_ms = timed_soe(alpha, eps, dx_cut, X)
    return soe_summary_frame(soe, build_ms if timing else None)


def profile_frame(grid: StaggeredGrid, problem: ProblemSpec, result: MarchResult) -> pd.DataFrame:
    """Final u at the centers and p at the edges in long form, with exact values when known."""
    T = problem.T
    centers = np.asarray(grid.centers)
    edges = np.asarray(grid.edges)
    if problem.has_exact:
        u_exact = np.broadcast_to(problem.exact_u(centers, T), centers.shape)
        p_exact = np.broadcast_to(problem.exact_p(edges, T), edges.shape)
    else:
        u_exact = np.full(centers.shape, np.nan)
        p_exact = np.full(edges.shape, np.nan)
    u_part = pd.DataFrame({"quantity": "u", "x": centers, "computed": result.u_final, "exact": u_exact})
    p_part = pd.DataFrame({"quantity": "p", "x": edges, "computed": result.p_final, "exact": p_exact})
    return pd.concat([u_part, p_part], ignore_index=True)
