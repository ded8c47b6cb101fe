"""Successive approximation (SAM) and variational iteration (VIM) solvers.

The VIM update on the grid is

    u+_i = v_i + trapezoid_{j=0..i} exp(E_i - E_j) g_j (v_j - u_j)

where ``v`` is the Picard image of ``u``, ``g_j = K(x_j, x_j) F'(u_j)`` and
``E`` is the cumulative trapezoid integral of ``g``. The factor
``exp(E_i - E_j) g_j`` is the derivative of the Lagrange multiplier
``-exp(int_t^x K(s,s) F'(u(s)) ds)`` at ``t = x_j`` for target ``x = x_i``.
With ``F' = 0`` the correction vanishes and VIM is exactly SAM.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .expr import evaluate
from .quadrature import cumulative_trapezoid, trapezoid_rows
from .volterra import (
    DivergenceError,
    Mesh,
    VolterraProblem,
    _finite_or_raise,
    _values_on,
    mesh_from_points,
    picard_apply,
    sample,
)

__all__ = [
    "Method",
    "SolverConfig",
    "SolveResult",
    "sam_step",
    "multiplier_exponent",
    "vim_step",
    "max_abs_diff",
    "solve",
    "error_vs_exact",
]

log = logging.getLogger(__name__)


class Method(str, enum.Enum):
    SAM = "sam"
    VIM = "vim"


@dataclass(frozen=True)
class SolverConfig:
    """Iteration settings.

    ``n`` counts grid points, so the step is ``x_f/(n - 1)``; ``n = 2`` is a
    single subinterval.
    """

    method: Method = Method.VIM
    n: int = 30
    epsilon: float = 1e-5
    max_iter: int = 100

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be an integer >= 1, got {self.max_iter!r}")


@dataclass
class SolveResult:
    solution: np.ndarray
    mesh: Mesh
    trace: List[float] = field(default_factory=list)
    converged: bool = False
    diverged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.trace)


def sam_step(p: VolterraProblem, m: Mesh, u) -> np.ndarray:
    return picard_apply(p, m, u)


def _diag_weights(p: VolterraProblem, m: Mesh, u: np.ndarray) -> np.ndarray:
    x = m.points
    k_diag = np.broadcast_to(evaluate(p.K, {"x": x, "t": x}), x.shape)
    fp = np.broadcast_to(evaluate(p.F_prime, {"y": u}), x.shape)
    with np.errstate(all="ignore"):
        g = k_diag * fp
    return _finite_or_raise(g, "K(x,x)*F'(u)")


def multiplier_exponent(p: VolterraProblem, m: Mesh, u) -> np.ndarray:
    """Prefix integrals ``E_j`` of ``K(s,s) F'(u(s))``.

    ``int_{x_j}^{x_i} K(s,s) F'(u(s)) ds`` is ``E_i - E_j``.
    """
    u = _values_on(u, m)
    g = _diag_weights(p, m, u)
    with np.errstate(all="ignore"):
        E = cumulative_trapezoid(g, m.h)
    return _finite_or_raise(E, "multiplier exponent")


def vim_step(p: VolterraProblem, m: Mesh, u) -> np.ndarray:
    u = _values_on(u, m)
    v = picard_apply(p, m, u)
    g = _diag_weights(p, m, u)
    with np.errstate(all="ignore"):
        E = _finite_or_raise(cumulative_trapezoid(g, m.h), "multiplier exponent")
        lower = np.tri(m.size, dtype=bool)
        # exp of the difference, never exp(E_i)*exp(-E_j)
        gap = np.where(lower, E[:, None] - E[None, :], 0.0)
        weights = np.exp(gap) * (g * (v - u))[None, :]
        correction = trapezoid_rows(weights, m.h)
        out = v + correction
    return _finite_or_raise(out, "VIM iterate")


def max_abs_diff(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"grid functions differ in shape: {u.shape} vs {v.shape}")
    return float(np.max(np.abs(u - v)))


_STEPS = {Method.SAM: sam_step, Method.VIM: vim_step}


def solve(p: VolterraProblem, cfg: SolverConfig, mesh: Optional[Mesh] = None) -> SolveResult:
    """Iterate from ``u0 = f`` until ``max|u_k - u_{k-1}| < epsilon``.

    ``mesh`` overrides the grid implied by ``cfg.n``. Stops early, with
    ``diverged`` set, on the first non-finite value.
    """
    m = mesh if mesh is not None else mesh_from_points(p.x_f, cfg.n)
    step = _STEPS[cfg.method]
    u = sample(p.f, m)
    result = SolveResult(solution=u, mesh=m)
    if not np.all(np.isfinite(u)):
        result.diverged = True
        return result
    for k in range(1, cfg.max_iter + 1):
        try:
            u_next = step(p, m, u)
        except DivergenceError as exc:
            log.warning("%s diverged at iteration %d: %s", cfg.method.value, k, exc)
            result.diverged = True
            return result
        err = max_abs_diff(u_next, u)
        result.trace.append(err)
        result.solution = u = u_next
        log.debug("%s iteration %d: error %.6g", cfg.method.value, k, err)
        if err < cfg.epsilon:
            result.converged = True
            break
    return result


def error_vs_exact(r: SolveResult, p: VolterraProblem, m: Optional[Mesh] = None) -> float:
    """Max-norm distance between the computed solution and the known one."""
    if p.exact is None:
        raise ValueError("problem has no exact solution")
    m = m if m is not None else r.mesh
    return max_abs_diff(r.solution, sample(p.exact, m))
