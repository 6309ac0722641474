"""Exact enumeration, verification and construction of binary row-column designs."""

from .grid import Grid, classify, read_grids, write_grids
from .params import derive, nonexistence_report
from .search import enumerate_designs, enumerate_proper

__all__ = ["Grid", "classify", "read_grids", "write_grids", "derive", "nonexistence_report",
           "enumerate_designs", "enumerate_proper"]
__version__ = "0.1.0"
