"""Deterministic multistart constrained minimization and threshold
bisection.

The minimizer is a penalized downhill simplex restarted from a
low-discrepancy set of points.  The objective being minimized in this
package (the compatibility functional over shift parameters) is a min
of vector norms and therefore piecewise smooth; gradient-based SQP-type
methods are unreliable at its kinks, while the simplex handles them
without derivatives.  Correctness downstream is always tied to grid
oracles, not to the identity of the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

# The generic entry point takes arbitrary Python callables, so it always
# runs on the pure-Python simplex; the compiled backend only accelerates
# the specialized objectives in the kernel modules.  Both implement the
# same algorithm, keeping results backend-independent.
from ._kernels import _pure as _kern
from .errors import NonFiniteError, NotBracketedError, SolverFailureError

_HALTON_BASES = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 32
    penalty_weight: float = 1e6
    tol: float = 1e-8
    max_iter: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.starts <= 0 or self.penalty_weight <= 0 or self.tol <= 0 or self.max_iter <= 0:
            raise ValueError("optimizer configuration fields must be positive")


@dataclass(frozen=True)
class MinResult:
    value: float
    point: tuple[float, ...]
    feasibility_violation: float
    iterations: int


def halton(index: int, base: int) -> float:
    """Radical-inverse low-discrepancy sequence member (index >= 1)."""
    return _kern._halton(index, base)


def minimize(
    objective: Callable[[Sequence[float]], float],
    constraints: Sequence[Callable[[Sequence[float]], float]],
    box: Sequence[tuple[float, float]],
    cfg: OptimizerConfig | None = None,
) -> MinResult:
    """Minimize objective subject to g(x) <= 0 for each g in constraints.

    The origin (clipped into the box) is assumed feasible and is always
    the first start, so the returned value never exceeds the objective
    there.
    """
    cfg = cfg or OptimizerConfig()
    k = len(box)
    if k > len(_HALTON_BASES):
        raise ValueError(f"dimension {k} not supported")
    origin = tuple(min(max(0.0, lo), hi) for lo, hi in box)

    def violation(x) -> float:
        v = 0.0
        for g in constraints:
            gv = g(x)
            if gv > v:
                v = gv
        return v

    # the penalized optimum may sit slightly outside the feasible set, so
    # remember the best strictly feasible point the search ever evaluates
    feas_best: list = [math.inf, None]

    def penalized(x) -> float:
        pen = 0.0
        worst = 0.0
        for g in constraints:
            gv = g(x)
            if gv > worst:
                worst = gv
            if gv > 0.0:
                pen += gv * gv
        fv = objective(x)
        if not math.isfinite(fv) and pen <= 1e-12:
            raise NonFiniteError(f"objective non-finite at feasible point {tuple(x)!r}")
        if worst <= 1e-12 and fv < feas_best[0]:
            feas_best[0] = fv
            feas_best[1] = list(x)
        return fv + cfg.penalty_weight * pen

    # cfg.tol bounds the achieved value; drive the simplex spread well
    # below it so the argmin is usable too (spread ~ point error squared)
    spread_tol = max(cfg.tol * 1e-4, 1e-15)
    best_f = math.inf
    best_x: list[float] | None = None
    steps = 0
    for s in range(cfg.starts):
        if s == 0:
            x0 = list(origin)
        else:
            idx = cfg.seed * cfg.starts + s
            x0 = [
                lo + (hi - lo) * halton(idx, _HALTON_BASES[j])
                for j, (lo, hi) in enumerate(box)
            ]
        fv, xv, it = _kern._nelder_mead(penalized, x0, spread_tol, cfg.max_iter)
        steps += it
        if fv < best_f:
            best_f = fv
            best_x = xv
    assert best_x is not None

    # feasibility repair: shrink toward the origin until constraints hold
    if violation(best_x) > 1e-12:
        lo_s, hi_s = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo_s + hi_s)
            cand = [origin[j] + mid * (best_x[j] - origin[j]) for j in range(k)]
            if violation(cand) <= 1e-12:
                lo_s = mid
            else:
                hi_s = mid
        best_x = [origin[j] + lo_s * (best_x[j] - origin[j]) for j in range(k)]

    value = objective(best_x)
    if feas_best[1] is not None and feas_best[0] < value:
        value = feas_best[0]
        best_x = feas_best[1]
    origin_value = objective(origin)
    if violation(origin) <= 1e-12 and origin_value < value:
        value = origin_value
        best_x = list(origin)
    viol = max(0.0, violation(best_x))
    if viol > 1e-7:
        raise SolverFailureError(
            f"no feasible point found (violation {viol!r}); origin infeasible?"
        )
    return MinResult(value, tuple(best_x), viol, steps)


def bisect_threshold(
    pred: Callable[[float], bool], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    """Bracket the flip point of a monotone boolean predicate.

    Returns (a, b) with b - a <= tol and pred changing value inside.
    If the input bracket is already no wider than tol it is returned
    unchanged.
    """
    if hi - lo <= tol:
        return (lo, hi)
    plo = pred(lo)
    phi = pred(hi)
    if plo == phi:
        raise NotBracketedError(
            f"predicate is {plo} at both endpoints ({lo!r}, {hi!r})"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid) == plo:
            lo = mid
        else:
            hi = mid
    return (lo, hi)
