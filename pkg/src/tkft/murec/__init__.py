"""Partial recursive functions: expressions, evaluation, flowcharts, machines."""

from .ast import (Compose, Const, Expr, Mu, PrimRec, Proj, Succ, Tuple, count_loops,
                  format_expr, parse_expr, parse_program)
from .flowchart import (Flowchart, compile_to_flowchart, flowchart_dot, format_flowchart,
                        loop_count, parse_flowchart, run_flowchart)
from .interp import OutOfFuel, Value, evaluate, pair_decode, pair_encode

__all__ = [
    "Compose", "Const", "Expr", "Mu", "PrimRec", "Proj", "Succ", "Tuple", "count_loops",
    "format_expr", "parse_expr", "parse_program", "Flowchart", "compile_to_flowchart",
    "flowchart_dot", "format_flowchart", "loop_count", "parse_flowchart", "run_flowchart",
    "OutOfFuel", "Value", "evaluate", "pair_decode", "pair_encode",
]
