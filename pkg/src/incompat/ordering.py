"""Search engine for the incompatibility pre-order.

A pair D is "below" a pair E when every state set detecting D's
incompatibility also detects E's.  The relation is universally
quantified over state sets, so finite search can only ever refute it
(by exhibiting a witness set detecting the lesser pair but not the
greater) or report consistency up to a recorded search budget.  The
pipeline is: cheap sufficient conditions (convex mixing with a
compatible pair, classical post-processing), then through-origin plane
sections via the closed-form projection criterion, then solver-backed
max-min scans over plane and line sections.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _kernels
from .bloch import Vec3, ObservablePair, QubitObservable, make_mub_pair, make_unbiased
from .errors import BudgetExceededError, OutOfRangeError
from .jointness import TOL_F, busch_f, is_compatible, unbiased_compat
from .optimizer import OptimizerConfig, bisect_threshold
from .restriction import WITNESS_TOL
from .statesets import StateSetLine, StateSetPlane, StateSetR, _plane_basis

REFUTED = "RefutedByWitness"
SUFFICIENT_CONVEX = "SufficientConvex"
SUFFICIENT_POST = "SufficientPostProcessing"
CONSISTENT = "ConsistentUpToBudget"

INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _default_r_values() -> tuple[float, ...]:
    return tuple(0.05 * i for i in range(20))  # 0, 0.05, ..., 0.95


def _default_line_r_values() -> tuple[float, ...]:
    return tuple(0.1 * i for i in range(10))  # 0, 0.1, ..., 0.9


@dataclass(frozen=True)
class SearchConfig:
    """Grids and tolerances for pre-order searches.

    The plane grid is the product of ``r_values`` with a Fibonacci
    sphere of ``sphere_points`` normals.  Line sections use their own
    coarser product grid: sweeping every plane with a thousand line
    directions would cost tens of millions of four-parameter solver
    calls, so the line budget is explicit and configurable instead.
    """

    sphere_points: int = 4000
    r_values: tuple[float, ...] = field(default_factory=_default_r_values)
    line_sphere_points: int = 96
    line_directions: int = 32
    line_r_values: tuple[float, ...] = field(default_factory=_default_line_r_values)
    convex_grid: int = 1000
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    tol_f: float = TOL_F
    witness_tol: float = WITNESS_TOL
    bisect_tol: float = 5e-4
    confirm_scans: bool = True
    # The bisected boundary inherits the normal grid's resolution and can
    # overshoot the converged through-origin boundary by ~1e-3; the
    # confirmation scan therefore runs this far below the bracket, still
    # inside the reported uncertainty.  Deviations beyond the margin are
    # genuine and get logged.
    confirm_margin: float = 3e-3
    max_solver_calls: Optional[int] = None
    jobs: int = 1


@dataclass
class SearchBudget:
    """Effort record attached to every verdict."""

    sphere_points: int = 0
    plane_sets: int = 0
    line_sets: int = 0
    solver_calls: int = 0

    def merge(self, other: "SearchBudget") -> None:
        self.sphere_points += other.sphere_points
        self.plane_sets += other.plane_sets
        self.line_sets += other.line_sets
        self.solver_calls += other.solver_calls


@dataclass(frozen=True)
class OrderVerdict:
    kind: str
    witness: Optional[StateSetR | StateSetPlane | StateSetLine]
    budget: SearchBudget
    max_min_f: float = -math.inf
    note: str = ""

    @property
    def refuted(self) -> bool:
        return self.kind == REFUTED


@dataclass(frozen=True)
class DimensionReport:
    chi_inc: int
    chi_com: int
    witnesses: dict
    budget: SearchBudget


@dataclass(frozen=True)
class RegionClass:
    label: str  # "blue" | "gray" | "white" | "ordered_new"
    t: float
    theta: float


@dataclass(frozen=True)
class TmaxResult:
    theta: float
    lo: float
    hi: float
    confirmed: Optional[bool]  # None when confirmation scans were skipped
    deviation_witness: Optional[StateSetPlane | StateSetLine]

    @property
    def tmax(self) -> float:
        return 0.5 * (self.lo + self.hi)


def fibonacci_sphere(count: int) -> np.ndarray:
    """Deterministic near-uniform unit vectors, shape (count, 3)."""
    i = np.arange(count, dtype=np.float64)
    z = 1.0 - 2.0 * (i + 0.5) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    ang = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.ascontiguousarray(
        np.stack([rho * np.cos(ang), rho * np.sin(ang), z], axis=1)
    )


def mub_tilted_pair(t: float, theta: float) -> ObservablePair:
    """The tilted family: first vector t*x, second t*(y cos(theta) + z sin(theta))."""
    return ObservablePair(
        make_unbiased(Vec3(t, 0.0, 0.0)),
        make_unbiased(Vec3(0.0, t * math.cos(theta), t * math.sin(theta))),
    )


def _pair8(p: ObservablePair) -> tuple[float, ...]:
    a1, a2 = p.first, p.second
    return (
        a1.bias, a1.bloch.x, a1.bloch.y, a1.bloch.z,
        a2.bias, a2.bloch.x, a2.bloch.y, a2.bloch.z,
    )


def _both_unbiased(p: ObservablePair) -> bool:
    return p.first.unbiased() and p.second.unbiased()


# --- sufficient conditions --------------------------------------------------

def convex_region_blue(t: float, theta: float) -> bool:
    """Closed-form test for mixing the t=1 mutually unbiased pair with a
    compatible pair: 1/t - 1 + sqrt(2 - 1/t^2) <= cos(theta)."""
    if not (INV_SQRT2 < t <= 1.0 + 1e-12):
        raise OutOfRangeError(f"t = {t!r} outside (1/sqrt(2), 1]")
    if not (0.0 <= theta <= math.pi / 2 + 1e-12):
        raise OutOfRangeError(f"theta = {theta!r} outside [0, pi/2]")
    rad = 2.0 - 1.0 / (t * t)
    return 1.0 / t - 1.0 + math.sqrt(max(rad, 0.0)) <= math.cos(theta) + 1e-12


def convex_region_oracle(t: float, theta: float, grid: int = 1000) -> bool:
    """Brute-force counterpart of convex_region_blue: sweep the mixing
    weight and test the residual pair for validity and compatibility."""
    if not (INV_SQRT2 < t <= 1.0 + 1e-12):
        raise OutOfRangeError(f"t = {t!r} outside (1/sqrt(2), 1]")
    if not (0.0 <= theta <= math.pi / 2 + 1e-12):
        raise OutOfRangeError(f"theta = {theta!r} outside [0, pi/2]")
    if t == 1.0 and theta == 0.0:
        return True  # pure weight-1 mixture
    c, s = math.cos(theta), math.sin(theta)
    lam = np.arange(1, grid) / grid
    w = 1.0 - lam
    n1x = (t - lam) / w
    n2y = (t * c - lam) / w
    n2z = t * s / w
    norm1 = np.abs(n1x)
    norm2 = np.sqrt(n2y**2 + n2z**2)
    # orthogonal residual vectors: |n1 +/- n2| = sqrt(|n1|^2 + |n2|^2)
    compat = 2.0 * np.sqrt(norm1**2 + norm2**2) <= 2.0 + 1e-12
    ok = (norm1 <= 1.0 + 1e-12) & (norm2 <= 1.0 + 1e-12) & compat
    return bool(ok.any())


def _convex_decomposition_exists(
    lesser: ObservablePair, greater: ObservablePair, grid: int
) -> bool:
    """Is `lesser` a convex mixture of `greater` with some compatible
    unbiased pair?  Sweeps the mixing weight on a uniform grid."""
    b1, b2 = lesser.first.bloch, lesser.second.bloch
    a1, a2 = greater.first.bloch, greater.second.bloch
    for k in range(1, grid):
        lam = k / grid
        w = 1.0 - lam
        n1 = (b1 - a1.scale(lam)).scale(1.0 / w)
        n2 = (b2 - a2.scale(lam)).scale(1.0 / w)
        if n1.norm() <= 1.0 + 1e-12 and n2.norm() <= 1.0 + 1e-12:
            if (n1 + n2).norm() + (n1 - n2).norm() <= 2.0 + 1e-12:
                return True
    # weight-1 mixture: identical pairs
    return (b1 - a1).norm() <= 1e-12 and (b2 - a2).norm() <= 1e-12


def post_processing_check(
    b: QubitObservable, a: QubitObservable
) -> Optional[tuple[tuple[float, float], tuple[float, float]]]:
    """Stochastic matrix p with b(y) = sum_x p(y|x) a(x), or None.

    Returned rows are outcomes of b, columns outcomes of a:
    ((p(+|+), p(+|-)), (p(-|+), p(-|-))).  For a binary pair this forces
    the Bloch vector of b to be a scalar multiple of a's.
    """
    av, bv = a.bloch, b.bloch
    an2 = av.dot(av)
    if an2 <= 1e-24:
        if bv.norm() > 1e-9:
            return None
        u = v = 0.5 * b.bias  # any split reproduces the trivial vector part
    else:
        c = bv.dot(av) / an2
        if (bv - av.scale(c)).norm() > 1e-9 * (1.0 + bv.norm()):
            return None
        v = 0.5 * (b.bias - c * a.bias)
        u = v + c
    eps = 1e-9
    if not (-eps <= u <= 1.0 + eps and -eps <= v <= 1.0 + eps):
        return None
    u = min(max(u, 0.0), 1.0)
    v = min(max(v, 0.0), 1.0)
    return ((u, v), (1.0 - u, 1.0 - v))


# --- through-origin witness search ------------------------------------------

def sR_witness_search(
    lesser: ObservablePair, greater: ObservablePair, grid: int
) -> Optional[StateSetR]:
    """First through-origin plane section (on a Fibonacci normal grid)
    detecting the lesser pair's incompatibility but not the greater's."""
    if not (_both_unbiased(lesser) and _both_unbiased(greater)):
        raise OutOfRangeError("projection-criterion search needs unbiased pairs")
    normals = fibonacci_sphere(grid)
    l1, l2 = lesser.first.bloch, lesser.second.bloch
    g1, g2 = greater.first.bloch, greater.second.bloch
    idx = _kernels.sr_witness_scan(
        l1.x, l1.y, l1.z, l2.x, l2.y, l2.z,
        g1.x, g1.y, g1.z, g2.x, g2.y, g2.z,
        normals.reshape(-1), WITNESS_TOL, 1e-12,
    )
    if idx < 0:
        return None
    n = normals[idx]
    return StateSetR(Vec3(float(n[0]), float(n[1]), float(n[2])))


# --- solver-backed scans ------------------------------------------------------

def _enumerate_plane_sets(cfg: SearchConfig) -> np.ndarray:
    """Rows (r, nx, ny, nz) in deterministic r-major order."""
    normals = fibonacci_sphere(cfg.sphere_points)
    rows = np.empty((len(cfg.r_values) * cfg.sphere_points, 4))
    k = 0
    for r in cfg.r_values:
        rows[k:k + cfg.sphere_points, 0] = r
        rows[k:k + cfg.sphere_points, 1:] = normals
        k += cfg.sphere_points
    return rows


def _enumerate_line_sets(cfg: SearchConfig) -> np.ndarray:
    """Rows (r, nx, ny, nz, mx, my, mz): line at in-plane distance r
    along n inside the plane with normal m."""
    ms = fibonacci_sphere(cfg.line_sphere_points)
    rows = np.empty(
        (cfg.line_sphere_points * len(cfg.line_r_values) * cfg.line_directions, 7)
    )
    k = 0
    for mi in range(cfg.line_sphere_points):
        m = Vec3(float(ms[mi, 0]), float(ms[mi, 1]), float(ms[mi, 2]))
        u, v = _plane_basis(m)
        for r in cfg.line_r_values:
            for d in range(cfg.line_directions):
                ang = 2.0 * math.pi * d / cfg.line_directions
                n = u.scale(math.cos(ang)) + v.scale(math.sin(ang))
                rows[k] = (r, n.x, n.y, n.z, m.x, m.y, m.z)
                k += 1
    return rows


def _probe_shift(obs4, row) -> tuple[float, float, float, float]:
    """Best-effort feasible shift for one observable: project its Bloch
    vector out of the section normals when positivity allows, falling
    back to the zero shift.  Returns the shifted (bias, vector).

    On line sections the full projection leaves both shifted vectors
    along the line direction, so the shifted pair commutes; whenever the
    projection is feasible for both observables the section is settled
    as compatible without any solver call.
    """
    a0, ax, ay, az = obs4
    if len(row) == 4:
        r, nx, ny, nz = row
        shifts = ((-(ax * nx + ay * ny + az * nz), 0.0),)
        mx = my = mz = 0.0
    else:
        r, nx, ny, nz, mx, my, mz = row
        full_l = -(ax * nx + ay * ny + az * nz)
        full_x = -(ax * mx + ay * my + az * mz)
        shifts = ((full_l, full_x), (0.0, full_x))
    for lam, xi in shifts:
        t0 = a0 - lam * r
        tx = ax + lam * nx + xi * mx
        ty = ay + lam * ny + xi * my
        tz = az + lam * nz + xi * mz
        tn = math.sqrt(tx * tx + ty * ty + tz * tz)
        if tn - t0 <= 1e-12 and t0 + tn - 2.0 <= 1e-12:
            return (t0, tx, ty, tz)
    return (a0, ax, ay, az)


def _probe_min_f(pair8, row) -> float:
    """Upper bound on min F from cheap feasible shifts (no solver)."""
    t1 = _probe_shift(pair8[:4], row)
    t2 = _probe_shift(pair8[4:], row)
    return _kernels.busch_f_raw(*t1, *t2)


def _solve_min_f(pair8, row, opt: OptimizerConfig) -> float:
    if len(row) == 4:
        r, nx, ny, nz = row
        out = _kernels.min_f_plane(
            *pair8, r, nx, ny, nz,
            opt.starts, opt.penalty_weight, opt.tol, opt.max_iter, opt.seed,
        )
    else:
        r, nx, ny, nz, mx, my, mz = row
        out = _kernels.min_f_line(
            *pair8, r, nx, ny, nz, mx, my, mz,
            opt.starts, opt.penalty_weight, opt.tol, opt.max_iter, opt.seed,
        )
    return out[0]


# worker-process state for the chunked scans
_JOB: dict = {}


def _init_job(job: dict) -> None:
    _JOB.clear()
    _JOB.update(job)


def _admissible_chunk(bounds: tuple[int, int]) -> tuple[np.ndarray, int]:
    """Mark sets on which the 'greater' pair is section-compatible."""
    start, stop = bounds
    sets = _JOB["sets"]
    pair8 = _JOB["pair8"]
    opt = _JOB["opt"]
    cheap_opt = _JOB["cheap_opt"]
    tol_f = _JOB["tol_f"]
    unbiased = _JOB["unbiased"]
    out = np.zeros(stop - start, dtype=bool)
    calls = 0
    for i in range(start, stop):
        row = tuple(sets[i])
        if unbiased and len(row) == 4 and row[0] == 0.0:
            # closed form on through-origin planes
            ok = _kernels.proj_slack(
                pair8[1], pair8[2], pair8[3], pair8[5], pair8[6], pair8[7],
                row[1], row[2], row[3],
            ) <= 1e-12
            out[i - start] = ok
            continue
        if _probe_min_f(pair8, row) <= tol_f:
            out[i - start] = True
            continue
        # a small multistart already proves compatibility (upper bound);
        # only the negative conclusion needs the full effort
        calls += 1
        if _solve_min_f(pair8, row, cheap_opt) <= tol_f:
            out[i - start] = True
            continue
        calls += 1
        out[i - start] = _solve_min_f(pair8, row, opt) <= tol_f
    return out, calls


def _witness_chunk(bounds: tuple[int, int]) -> tuple[float, int, int, int]:
    """Scan sets for the 'lesser' pair; returns (max value, argmax index,
    first witness index or -1, solver calls)."""
    start, stop = bounds
    sets = _JOB["sets"]
    pair8 = _JOB["pair8"]
    opt = _JOB["opt"]
    cheap_opt = _JOB["cheap_opt"]
    tol_f = _JOB["tol_f"]
    wtol = _JOB["wtol"]
    best = -math.inf
    best_i = -1
    calls = 0
    for i in range(start, stop):
        row = tuple(sets[i])
        val = _probe_min_f(pair8, row)
        if val > tol_f:
            calls += 1
            val = _solve_min_f(pair8, row, cheap_opt)
            if val > wtol:
                # witness claims always get the full multistart
                calls += 1
                val = _solve_min_f(pair8, row, opt)
        if val > best:
            best = val
            best_i = i
        if val > wtol:
            return best, best_i, i, calls
    return best, best_i, -1, calls


def _chunk_bounds(n: int, chunk: int) -> list[tuple[int, int]]:
    return [(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def _run_chunks(worker, job: dict, n: int, jobs: int, chunk: int = 2048):
    bounds = _chunk_bounds(n, chunk)
    if jobs <= 1 or len(bounds) <= 1:
        _init_job(job)
        for b in bounds:
            yield b, worker(b)
        return
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=jobs, initializer=_init_job, initargs=(job,)) as pool:
        for b, res in zip(bounds, pool.imap(worker, bounds)):
            yield b, res


def _row_to_set(row) -> StateSetPlane | StateSetLine:
    if len(row) == 4:
        return StateSetPlane(row[0], Vec3(row[1], row[2], row[3]))
    return StateSetLine(
        row[0], Vec3(row[1], row[2], row[3]), Vec3(row[4], row[5], row[6])
    )


@dataclass(frozen=True)
class ScanGrids:
    """Admissible section grids: sets on which the greater pair is
    section-compatible, ready for max-min scans of candidate lessers."""

    plane_sets: np.ndarray
    line_sets: np.ndarray
    budget: SearchBudget


def build_scan_grids(greater: ObservablePair, cfg: SearchConfig) -> ScanGrids:
    budget = SearchBudget()
    g8 = _pair8(greater)
    greater_everywhere = is_compatible(greater, cfg.tol_f)
    unbiased = _both_unbiased(greater)
    out = []
    for sets in (_enumerate_plane_sets(cfg), _enumerate_line_sets(cfg)):
        if greater_everywhere:
            out.append(sets)
            continue
        job = {
            "sets": sets, "pair8": g8, "opt": cfg.optimizer,
            "cheap_opt": replace(cfg.optimizer, starts=min(4, cfg.optimizer.starts)),
            "tol_f": cfg.tol_f, "unbiased": unbiased,
        }
        mask = np.zeros(len(sets), dtype=bool)
        for (start, stop), (ok, calls) in _run_chunks(
            _admissible_chunk, job, len(sets), cfg.jobs
        ):
            mask[start:stop] = ok
            budget.solver_calls += calls
        out.append(sets[mask])
    budget.plane_sets = len(out[0])
    budget.line_sets = len(out[1])
    return ScanGrids(out[0], out[1], budget)


def scan_for_witness(
    lesser: ObservablePair, grids: ScanGrids, cfg: SearchConfig
) -> tuple[float, Optional[StateSetPlane | StateSetLine], SearchBudget]:
    """Max-min scan of the lesser pair over the admissible grids; stops
    at the first section whose solver minimum exceeds the witness
    tolerance."""
    budget = SearchBudget(
        plane_sets=len(grids.plane_sets), line_sets=len(grids.line_sets)
    )
    l8 = _pair8(lesser)
    best = -math.inf
    for sets in (grids.plane_sets, grids.line_sets):
        if len(sets) == 0:
            continue
        job = {
            "sets": sets, "pair8": l8, "opt": cfg.optimizer,
            "cheap_opt": replace(cfg.optimizer, starts=min(4, cfg.optimizer.starts)),
            "tol_f": cfg.tol_f, "wtol": cfg.witness_tol,
        }
        for _bounds, (val, _vi, wi, calls) in _run_chunks(
            _witness_chunk, job, len(sets), cfg.jobs
        ):
            budget.solver_calls += calls
            if val > best:
                best = val
            if wi >= 0:
                return best, _row_to_set(tuple(sets[wi])), budget
            if (
                cfg.max_solver_calls is not None
                and budget.solver_calls > cfg.max_solver_calls
            ):
                raise BudgetExceededError(
                    f"solver budget {cfg.max_solver_calls} exhausted", partial=best
                )
    return best, None, budget


# --- the pre-order check ------------------------------------------------------

def order_check(
    lesser: ObservablePair, greater: ObservablePair, cfg: SearchConfig | None = None
) -> OrderVerdict:
    """Decide what the search can establish about lesser <= greater.

    Witness verdicts are re-verifiable: the returned state set detects
    the lesser pair while the greater pair stays compatible on it.  A
    consistent verdict is NOT a proof of the ordering; it only records
    that the recorded budget found no witness.
    """
    cfg = cfg or SearchConfig()
    budget = SearchBudget()

    if is_compatible(lesser, cfg.tol_f):
        return OrderVerdict(
            CONSISTENT, None, budget,
            note="trivially ordered: lesser pair is compatible",
        )

    if _both_unbiased(lesser) and _both_unbiased(greater):
        if _convex_decomposition_exists(lesser, greater, cfg.convex_grid):
            return OrderVerdict(SUFFICIENT_CONVEX, None, budget)

    for g, l in (  # post-processing in either device pairing
        ((greater.first, greater.second), (lesser.first, lesser.second)),
        ((greater.second, greater.first), (lesser.first, lesser.second)),
    ):
        if (
            post_processing_check(l[0], g[0]) is not None
            and post_processing_check(l[1], g[1]) is not None
        ):
            return OrderVerdict(SUFFICIENT_POST, None, budget)

    if _both_unbiased(lesser) and _both_unbiased(greater):
        budget.sphere_points = cfg.sphere_points
        w = sR_witness_search(lesser, greater, cfg.sphere_points)
        if w is not None:
            return OrderVerdict(REFUTED, w, budget, note="projection criterion")

    grids = build_scan_grids(greater, cfg)
    budget.merge(grids.budget)
    best, witness, scan_budget = scan_for_witness(lesser, grids, cfg)
    budget.merge(scan_budget)
    if witness is not None:
        return OrderVerdict(REFUTED, witness, budget, max_min_f=best)
    return OrderVerdict(CONSISTENT, None, budget, max_min_f=best)


# --- the tilted-pair boundary -------------------------------------------------

def tmax_bracket_for_theta(theta: float, cfg: SearchConfig | None = None) -> TmaxResult:
    """Largest sharpness (bracketed by bisection) at which no
    through-origin section detects the tilted pair without detecting the
    t=1 mutually unbiased pair; optionally confirmed by full plane/line
    max-min scans at the lower bracket end."""
    cfg = cfg or SearchConfig()
    greater = make_mub_pair(1.0)

    def no_witness(t: float) -> bool:
        return sR_witness_search(mub_tilted_pair(t, theta), greater, cfg.sphere_points) is None

    if no_witness(1.0):
        return TmaxResult(theta, 1.0, 1.0, None, None)
    lo = INV_SQRT2 + 1e-6
    lo_t, hi_t = bisect_threshold(no_witness, lo, 1.0, cfg.bisect_tol)
    confirmed = None
    deviation = None
    if cfg.confirm_scans:
        t_confirm = max(lo_t - cfg.confirm_margin, lo)
        grids = build_scan_grids(greater, cfg)
        _best, witness, _b = scan_for_witness(
            mub_tilted_pair(t_confirm, theta), grids, cfg
        )
        confirmed = witness is None
        deviation = witness
    return TmaxResult(theta, lo_t, hi_t, confirmed, deviation)


def tmax_for_theta(theta: float, cfg: SearchConfig | None = None) -> float:
    return tmax_bracket_for_theta(theta, cfg).tmax


def classify_region(
    t: float,
    theta: float,
    cfg: SearchConfig | None = None,
    tmax_hint: Optional[float] = None,
) -> RegionClass:
    """Label a point of the tilted-pair parameter square.

    blue: ordering follows from convex mixing; gray: a through-origin
    witness refutes it; ordered_new: no witness up to the sharpness
    boundary; white: beyond the boundary without a direct witness.
    """
    cfg = cfg or SearchConfig()
    if convex_region_blue(t, theta):
        return RegionClass("blue", t, theta)
    w = sR_witness_search(mub_tilted_pair(t, theta), make_mub_pair(1.0), cfg.sphere_points)
    if w is not None:
        return RegionClass("gray", t, theta)
    if tmax_hint is None:
        tmax_hint = tmax_bracket_for_theta(theta, replace(cfg, confirm_scans=False)).hi
    if t <= tmax_hint:
        return RegionClass("ordered_new", t, theta)
    return RegionClass("white", t, theta)


def classify_region_with_witness(
    t: float,
    theta: float,
    cfg: SearchConfig | None = None,
    tmax_hint: Optional[float] = None,
) -> tuple[RegionClass, Optional[StateSetR]]:
    """classify_region plus the refuting section for gray points."""
    cfg = cfg or SearchConfig()
    if convex_region_blue(t, theta):
        return RegionClass("blue", t, theta), None
    w = sR_witness_search(mub_tilted_pair(t, theta), make_mub_pair(1.0), cfg.sphere_points)
    if w is not None:
        return RegionClass("gray", t, theta), w
    if tmax_hint is None:
        tmax_hint = tmax_bracket_for_theta(theta, replace(cfg, confirm_scans=False)).hi
    label = "ordered_new" if t <= tmax_hint else "white"
    return RegionClass(label, t, theta), None


# --- dimensions and equivalence ------------------------------------------------

def dimensions(p: ObservablePair, cfg: SearchConfig | None = None) -> DimensionReport:
    """Witnessed bounds on how many affinely independent states are
    needed (chi_inc) or may be needed (chi_com) to detect the pair."""
    cfg = cfg or SearchConfig()
    if is_compatible(p, cfg.tol_f):
        raise OutOfRangeError("dimensions are defined for incompatible pairs only")
    budget = SearchBudget()
    witnesses: dict = {}
    p8 = _pair8(p)

    # chi_inc = 2 iff some line section detects the pair
    line_sets = _enumerate_line_sets(cfg)
    budget.line_sets = len(line_sets)
    job = {
        "sets": line_sets, "pair8": p8, "opt": cfg.optimizer,
        "cheap_opt": replace(cfg.optimizer, starts=min(4, cfg.optimizer.starts)),
        "tol_f": cfg.tol_f, "wtol": cfg.witness_tol,
    }
    chi_inc = 0
    for _bounds, (_val, _vi, wi, calls) in _run_chunks(
        _witness_chunk, job, len(line_sets), cfg.jobs
    ):
        budget.solver_calls += calls
        if wi >= 0:
            chi_inc = 2
            witnesses["chi_inc"] = _row_to_set(tuple(line_sets[wi]))
            break
    if chi_inc == 0:
        plane_sets = _enumerate_plane_sets(cfg)
        budget.plane_sets = len(plane_sets)
        job = dict(job, sets=plane_sets)
        for _bounds, (_val, _vi, wi, calls) in _run_chunks(
            _witness_chunk, job, len(plane_sets), cfg.jobs
        ):
            budget.solver_calls += calls
            if wi >= 0:
                chi_inc = 3
                witnesses["chi_inc"] = _row_to_set(tuple(plane_sets[wi]))
                break
    if chi_inc == 0:
        chi_inc = 4  # only the full ball detected the incompatibility

    chi_com = _chi_com_search(p, cfg, budget, witnesses)
    return DimensionReport(chi_inc, chi_com, witnesses, budget)


def _chi_com_search(p, cfg, budget, witnesses) -> int:
    """Largest section kind on which the pair stays compatible."""
    a1, a2 = p.first.bloch, p.second.bloch
    if _both_unbiased(p):
        # a through-origin plane normal to a1 + a2 hides the pair:
        # projecting kills a1 + a2 and leaves |P(a1 - a2)| <= 2
        axis = a1 + a2
        if axis.norm() < 1e-9:
            axis = a1
        s = StateSetR(axis.normalized())
        witnesses["chi_com"] = s.as_plane()
        return 3
    # biased pairs: scan plane sections with the solver
    from .restriction import s0_compatible_plane  # local import avoids a cycle

    for r in cfg.r_values:
        for n in fibonacci_sphere(cfg.sphere_points):
            budget.solver_calls += 1
            s = StateSetPlane(r, Vec3(float(n[0]), float(n[1]), float(n[2])))
            v = s0_compatible_plane(p, s, cfg.optimizer)
            if v.compatible:
                witnesses["chi_com"] = s
                return 3
            if (
                cfg.max_solver_calls is not None
                and budget.solver_calls > cfg.max_solver_calls
            ):
                raise BudgetExceededError("chi_com search budget exhausted")
    witnesses["chi_com"] = None
    return 1  # single states are always compatible


@dataclass(frozen=True)
class EquivalenceVerdict:
    kind: str  # "DistinctWithWitness" | "IndistinguishableUpToBudget"
    forward: OrderVerdict
    backward: OrderVerdict


def equivalence_probe(
    a: ObservablePair, b: ObservablePair, cfg: SearchConfig | None = None
) -> EquivalenceVerdict:
    """Run the order check both ways; any witness separates the pairs."""
    cfg = cfg or SearchConfig()
    fwd = order_check(a, b, cfg)
    bwd = order_check(b, a, cfg)
    kind = (
        "DistinctWithWitness"
        if fwd.refuted or bwd.refuted
        else "IndistinguishableUpToBudget"
    )
    return EquivalenceVerdict(kind, fwd, bwd)
