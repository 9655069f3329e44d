#
# harness - Studies, CSV tables and the command line front end.
#

from .studies import BenchRow
from .studies import CompareRow
from .studies import ConvergenceRow
from .studies import bench_frame
from .studies import compare_frame
from .studies import convergence_frame
from .studies import convergence_orders
from .studies import profile_frame
from .studies import run_bench
from .studies import run_compare
from .studies import run_convergence
from .studies import soe_nodes_frame
from .studies import soe_report
from .studies import soe_summary_frame
from .studies import solution_errors
from .studies import timed_soe
from .tablefile import data_from_json_file
from .tablefile import emit_csv
from .tablefile import parse_int_list
from .tablefile import read_table_csv
from .tablefile import rows_to_frame

__all__ = [
    "BenchRow",
    "CompareRow",
    "ConvergenceRow",
    "bench_frame",
    "compare_frame",
    "convergence_frame",
    "convergence_orders",
    "profile_frame",
    "run_bench",
    "run_compare",
    "run_convergence",
    "soe_nodes_frame",
    "soe_report",
    "soe_summary_frame",
    "solution_errors",
    "timed_soe",
    "data_from_json_file",
    "emit_csv",
    "parse_int_list",
    "read_table_csv",
    "rows_to_frame",
]
