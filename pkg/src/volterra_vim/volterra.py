"""Nonlinear Volterra equations of the second kind,

    y(x) = f(x) + int_0^x K(x, t) F(y(t)) dt,    x in [0, x_f],

their uniform discretization, and the discrete Picard operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .expr import Expression, evaluate, parse
from .quadrature import trapezoid_rows

__all__ = [
    "DivergenceError",
    "VolterraProblem",
    "Mesh",
    "make_mesh",
    "mesh_from_points",
    "sample",
    "kernel_matrix",
    "picard_apply",
    "BUILTIN_PROBLEMS",
    "builtin_problem",
    "parse_problem_text",
    "load_problem",
    "dump_problem",
]


class DivergenceError(FloatingPointError):
    """An iterate picked up a non-finite value."""


@dataclass(frozen=True)
class VolterraProblem:
    f: Expression  # in x
    K: Expression  # in x, t
    F: Expression  # in y
    F_prime: Expression  # in y
    x_f: float
    exact: Optional[Expression] = None  # in x

    def __post_init__(self):
        if not (math.isfinite(self.x_f) and self.x_f > 0):
            raise ValueError(f"x_f must be positive and finite, got {self.x_f!r}")

    @classmethod
    def from_strings(cls, f, K, F, F_prime, x_f, exact=None) -> "VolterraProblem":
        if isinstance(x_f, str):
            x_f = evaluate(parse(x_f), {})
        return cls(
            f=parse(f, {"x"}),
            K=parse(K, {"x", "t"}),
            F=parse(F, {"y"}),
            F_prime=parse(F_prime, {"y"}),
            x_f=float(x_f),
            exact=parse(exact, {"x"}) if exact is not None else None,
        )


@dataclass(frozen=True)
class Mesh:
    """Uniform grid ``x_i = i*h``, ``i = 0..n``, with ``h = x_f/n``."""

    x_f: float
    n: int
    h: float = field(init=False)
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = self.x_f / self.n
        points = np.arange(self.n + 1) * h
        points.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "points", points)

    @property
    def size(self) -> int:
        return self.n + 1


def make_mesh(x_f: float, n: int) -> Mesh:
    """Mesh with ``n`` subintervals (``n + 1`` points) on ``[0, x_f]``."""
    if not (math.isfinite(x_f) and x_f > 0):
        raise ValueError(f"x_f must be positive and finite, got {x_f!r}")
    if int(n) != n or n < 1:
        raise ValueError(f"need at least one subinterval, got n={n!r}")
    return Mesh(float(x_f), int(n))


def mesh_from_points(x_f: float, num_points: int) -> Mesh:
    """Mesh with ``num_points`` grid points, i.e. ``h = x_f/(num_points - 1)``."""
    if int(num_points) != num_points or num_points < 2:
        raise ValueError(f"need at least two grid points, got {num_points!r}")
    return make_mesh(x_f, int(num_points) - 1)


def sample(e: Expression, m: Mesh) -> np.ndarray:
    """Values of an expression in ``x`` at the mesh points."""
    values = evaluate(e, {"x": m.points})
    return np.array(np.broadcast_to(values, m.points.shape), dtype=np.float64)


def kernel_matrix(p: VolterraProblem, m: Mesh) -> np.ndarray:
    """``K(x_i, x_j)`` for all pairs; only the lower triangle is ever used."""
    x = m.points
    values = evaluate(p.K, {"x": x[:, None], "t": x[None, :]})
    return np.array(np.broadcast_to(values, (x.size, x.size)), dtype=np.float64)


def _finite_or_raise(values, what):
    if not np.all(np.isfinite(values)):
        raise DivergenceError(f"non-finite value in {what}")
    return values


def _values_on(u, m: Mesh) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.shape != m.points.shape:
        raise ValueError(f"grid function has shape {u.shape}, mesh has {m.size} points")
    return u


def picard_apply(p: VolterraProblem, m: Mesh, u) -> np.ndarray:
    """One successive-approximation sweep.

    Returns ``v_i = f(x_i) + trapezoid_{j=0..i} K(x_i, x_j) F(u_j)``. The
    integral is empty at ``i = 0`` so ``v_0 = f(x_0)``. Raises
    :class:`DivergenceError` if any value is non-finite.
    """
    u = _values_on(u, m)
    Fu = np.broadcast_to(evaluate(p.F, {"y": u}), u.shape)
    with np.errstate(all="ignore"):
        integral = trapezoid_rows(kernel_matrix(p, m) * Fu[None, :], m.h)
        v = sample(p.f, m) + integral
    return _finite_or_raise(v, "Picard iterate")


# -- builtin problems ---------------------------------------------------------

BUILTIN_PROBLEMS = {
    # y = cos x
    "example1": dict(
        f="cos(x) - 0.25*sin(2*x) - 0.5*x",
        K="1",
        F="y^2",
        F_prime="2*y",
        x_f="pi",
        exact="cos(x)",
    ),
    # y = exp x
    "example2": dict(
        f="exp(x) - (1/3)*x*exp(3*x) + x/3",
        K="x",
        F="y^3",
        F_prime="3*y^2",
        x_f="1",
        exact="exp(x)",
    ),
}


def builtin_problem(name: str) -> VolterraProblem:
    try:
        spec = BUILTIN_PROBLEMS[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_PROBLEMS))
        raise ValueError(f"unknown builtin problem {name!r} (known: {known})") from None
    return VolterraProblem.from_strings(**spec)


# -- problem files ------------------------------------------------------------

_REQUIRED_KEYS = ("f", "K", "F", "F_prime", "x_f")
_KEYS = _REQUIRED_KEYS + ("exact",)


def parse_problem_text(text: str) -> VolterraProblem:
    """Parse the ``key = value`` problem format.

    Blank lines and lines starting with ``#`` are skipped. Keys are
    ``f, K, F, F_prime, x_f`` and optionally ``exact``; values are
    expressions (``x_f`` may be a constant expression such as ``pi``).
    """
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not value:
            raise ValueError(f"line {lineno}: expected 'key = expression'")
        if key not in _KEYS:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    missing = [k for k in _REQUIRED_KEYS if k not in entries]
    if missing:
        raise ValueError(f"problem file is missing: {', '.join(missing)}")
    return VolterraProblem.from_strings(**entries)


def load_problem(path) -> VolterraProblem:
    return parse_problem_text(Path(path).read_text())


def dump_problem(p: VolterraProblem) -> str:
    lines = [
        f"f = {p.f.source}",
        f"K = {p.K.source}",
        f"F = {p.F.source}",
        f"F_prime = {p.F_prime.source}",
        f"x_f = {p.x_f!r}",
    ]
    if p.exact is not None:
        lines.append(f"exact = {p.exact.source}")
    return "\n".join(lines) + "\n"
