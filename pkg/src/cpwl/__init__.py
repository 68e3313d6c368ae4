"""Continuous piecewise-linear approximation of univariate functions.

Build an interpolant or an L2 projection on a uniform or error-equalizing
partition, compare its measured L2 error against predicted bounds, and freeze
it into a lookup table for fast evaluation.
"""

from .analysis import ErrorReport, SweepRecord, convergence_sweep, measure, report
from .approx import CpwlFunction, eval_cpwl, interpolant, project
from .bench import BenchResult, run_bench
from .errors import CpwlError, OutOfDomain
from .funcs import FunctionSpec, builtin
from .expr import parse_expression
from .lut import LutTable, eval_batch, evaluate, from_cpwl
from .partition import Partition, optimized, uniform
from .tableio import read_table, write_table

__version__ = "0.1.0"

__all__ = [
    "BenchResult", "CpwlError", "CpwlFunction", "ErrorReport", "FunctionSpec",
    "LutTable", "OutOfDomain", "Partition", "SweepRecord", "builtin",
    "convergence_sweep", "eval_batch", "eval_cpwl", "evaluate", "from_cpwl",
    "interpolant", "measure", "optimized", "parse_expression", "project",
    "read_table", "report", "run_bench", "uniform", "write_table",
]
