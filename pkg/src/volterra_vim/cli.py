"""Command-line front end.

    volterra-vim solve   --problem example1 --method vim --n 30 --eps 1e-5
    volterra-vim compare --problem example2 --n 101 --trace table.csv

Exit status: 0 converged, 1 usage or input error, 2 not converged within
``--max-iter``, 3 diverged.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from itertools import zip_longest

import numpy as np

from .expr import ExpressionError
from .solver import Method, SolverConfig, error_vs_exact, solve
from .volterra import BUILTIN_PROBLEMS, VolterraProblem, builtin_problem, load_problem, sample

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_DIVERGED = 3

_INLINE = ("f", "kernel", "nonlin", "nonlin_deriv", "xf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    # shortest repr that round-trips exactly
    return repr(float(value))


def _add_common(sp):
    src = sp.add_argument_group("problem (choose one source)")
    src.add_argument("--problem", metavar="NAME", help=f"builtin: {', '.join(BUILTIN_PROBLEMS)}")
    src.add_argument("--problem-file", metavar="PATH", help="key = expression problem file")
    src.add_argument("--f", metavar="EXPR", help="forcing term f(x)")
    src.add_argument("--kernel", metavar="EXPR", help="kernel K(x,t)")
    src.add_argument("--nonlin", metavar="EXPR", help="nonlinearity F(y)")
    src.add_argument("--nonlin-deriv", metavar="EXPR", help="derivative F'(y)")
    src.add_argument("--xf", metavar="NUM", help="right endpoint x_f")
    src.add_argument("--exact", metavar="EXPR", help="known solution y(x), optional")
    sp.add_argument("--n", type=int, default=30, help="number of grid points (default 30)")
    sp.add_argument("--eps", type=float, default=1e-5, help="stopping tolerance (default 1e-5)")
    sp.add_argument("--max-iter", type=int, default=100, help="iteration cap (default 100)")
    sp.add_argument("--trace", metavar="PATH", help="write the error trace as CSV")
    sp.add_argument("-v", "--verbose", action="store_true", help="log every iteration")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="volterra-vim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="solve one problem with SAM or VIM")
    _add_common(sp)
    sp.add_argument("--method", choices=[m.value for m in Method], default="vim")
    sp.add_argument("--out", metavar="PATH", help="write the solution as CSV")

    cp = sub.add_parser("compare", help="run SAM and VIM side by side")
    _add_common(cp)
    return parser


def resolve_problem(args) -> VolterraProblem:
    inline = {k: getattr(args, k) for k in _INLINE if getattr(args, k) is not None}
    sources = [args.problem is not None, args.problem_file is not None, bool(inline)]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --problem, --problem-file, or the inline flags")
    if args.exact is not None and not inline:
        raise UsageError("--exact only applies to inline problems")
    if args.problem is not None:
        return builtin_problem(args.problem)
    if args.problem_file is not None:
        return load_problem(args.problem_file)
    missing = [k for k in _INLINE if k not in inline]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"inline problem is missing {flags}")
    return VolterraProblem.from_strings(
        f=args.f,
        K=args.kernel,
        F=args.nonlin,
        F_prime=args.nonlin_deriv,
        x_f=args.xf,
        exact=args.exact,
    )


def _status(result) -> int:
    if result.diverged:
        return EXIT_DIVERGED
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _status_text(result) -> str:
    if result.diverged:
        return "diverged"
    return "converged" if result.converged else "not converged"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_solution_csv(path, problem, result):
    x = result.mesh.points
    u = result.solution
    if problem.exact is None:
        rows = ([_fmt(a), _fmt(b)] for a, b in zip(x, u))
        _write_csv(path, ["x", "u"], rows)
        return
    y = sample(problem.exact, result.mesh)
    err = np.abs(u - y)
    rows = ([_fmt(a), _fmt(b), _fmt(c), _fmt(d)] for a, b, c, d in zip(x, u, y, err))
    _write_csv(path, ["x", "u", "exact", "abs_err"], rows)


def write_trace_csv(path, result):
    _write_csv(path, ["iteration", "error"], ([k, _fmt(e)] for k, e in enumerate(result.trace, 1)))


def write_compare_csv(path, sam, vim):
    rows = []
    for k, (a, b) in enumerate(zip_longest(sam.trace, vim.trace), 1):
        rows.append([k, "" if a is None else _fmt(a), "" if b is None else _fmt(b)])
    _write_csv(path, ["iteration", "sam_error", "vim_error"], rows)


def _summary(label, problem, result, out):
    print(f"{label}: {result.iterations} iterations, {_status_text(result)}", file=out)
    if problem.exact is not None and not result.diverged:
        print(f"{label}: max |u - exact| = {error_vs_exact(result, problem):.6f}", file=out)


def format_compare_table(sam, vim) -> str:
    lines = [
        f"{'Successive Approximation':^28} | {'Variational Iteration':^28}",
        f"{'Iteration':>9} {'Error':>18} | {'Iteration':>9} {'Error':>18}",
        "-" * 28 + "-+-" + "-" * 28,
    ]
    for k, (a, b) in enumerate(zip_longest(sam.trace, vim.trace), 1):
        left = f"{k:>9} {a:>18.6f}" if a is not None else " " * 28
        right = f"{k:>9} {b:>18.6f}" if b is not None else ""
        lines.append(f"{left} | {right}".rstrip())
    return "\n".join(lines)


def cmd_solve(args, out=None) -> int:
    out = out or sys.stdout
    problem = resolve_problem(args)
    cfg = SolverConfig(Method(args.method), args.n, args.eps, args.max_iter)
    result = solve(problem, cfg)
    if args.out:
        write_solution_csv(args.out, problem, result)
    if args.trace:
        write_trace_csv(args.trace, result)
    _summary(cfg.method.value.upper(), problem, result, out)
    return _status(result)


def cmd_compare(args, out=None) -> int:
    out = out or sys.stdout
    problem = resolve_problem(args)
    results = {
        method: solve(problem, SolverConfig(method, args.n, args.eps, args.max_iter))
        for method in Method
    }
    sam, vim = results[Method.SAM], results[Method.VIM]
    print(format_compare_table(sam, vim), file=out)
    _summary("SAM", problem, sam, out)
    _summary("VIM", problem, vim, out)
    if args.trace:
        write_compare_csv(args.trace, sam, vim)
    # exit codes are ordered by severity
    return max(_status(sam), _status(vim))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = cmd_solve if args.command == "solve" else cmd_compare
    try:
        return handler(args)
    except (UsageError, ExpressionError, ValueError, OSError) as exc:
        print(f"volterra-vim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
