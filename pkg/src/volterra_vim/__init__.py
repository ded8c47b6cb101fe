"""Successive approximation and variational iteration solvers for nonlinear
Volterra integral equations of the second kind."""

from .expr import Expression, evaluate, parse, to_source
from .quadrature import cumulative_trapezoid, trapezoid
from .solver import (
    Method,
    SolveResult,
    SolverConfig,
    error_vs_exact,
    max_abs_diff,
    multiplier_exponent,
    sam_step,
    solve,
    vim_step,
)
from .volterra import (
    DivergenceError,
    Mesh,
    VolterraProblem,
    builtin_problem,
    load_problem,
    make_mesh,
    mesh_from_points,
    picard_apply,
    sample,
)

__version__ = "0.1.0"
