"""Command-line surface.

Subcommands: check (full-state compatibility), s0check (section
compatibility), table1 (sharpness thresholds of the ordered band),
fig4 (region scan as NDJSON), boundary (analytic boundary curve as
CSV), sampling (distributed-sampling demo).

Numeric output is locale-independent with 6 significant digits.  File
outputs are accompanied by a JSON manifest (same path plus
".manifest.json") echoing the command, configuration, seed, library
version and wall time; identical configurations reproduce identical
data files byte for byte, for any --jobs value.

Exit codes: 0 success/compatible, 1 incompatible (check/s0check) or no
boundary (boundary), 2 malformed input, 3 search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import os
import re
import sys
import time
from dataclasses import replace

from . import __version__
from .bloch import Vec3, ObservablePair, QubitObservable, make_mub_pair
from .boundary import InPlanePair, compatibility_curve
from .errors import (
    BudgetExceededError,
    IncompatError,
    OutOfRangeError,
    ParseError,
)
from .jointness import busch_f
from .optimizer import OptimizerConfig
from . import ordering
from .ordering import SearchConfig
from .restriction import s0_compatible
from .sampling import behavior_of, certify_non_cc, synthesize_cc, verify_strategy
from .statesets import (
    StateSetLine,
    StateSetPlane,
    StateSetR,
    format_state_set,
    parse_state_set,
)

_ANGLE_RE = re.compile(r"(-?)(?:(\d+(?:\.\d*)?)\*)?pi(?:/(\d+(?:\.\d*)?))?")


def fmt(x: float) -> str:
    return f"{x:.6g}"


def parse_angle(text: str) -> float:
    """Radians, with pi literals: "pi/12", "2*pi/5", "-pi", "0.785"."""
    s = text.strip().replace(" ", "")
    m = _ANGLE_RE.fullmatch(s)
    if m:
        sign = -1.0 if m.group(1) else 1.0
        a = float(m.group(2)) if m.group(2) else 1.0
        b = float(m.group(3)) if m.group(3) else 1.0
        return sign * a * math.pi / b
    try:
        return float(s)
    except ValueError as exc:
        raise ParseError(f"bad angle {text!r}") from exc


def parse_vector(text: str) -> Vec3:
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"expected x,y,z — got {text!r}")
    try:
        return Vec3(*(float(p) for p in parts))
    except ValueError as exc:
        raise ParseError(f"bad vector {text!r}") from exc


def parse_pair(args) -> ObservablePair:
    try:
        first = QubitObservable(args.bias1, parse_vector(args.a1))
        second = QubitObservable(args.bias2, parse_vector(args.a2))
    except OutOfRangeError as exc:
        raise ParseError(str(exc)) from exc
    return ObservablePair(first, second)


def _add_pair_flags(sp) -> None:
    sp.add_argument("--a1", required=True, help="first Bloch vector x,y,z")
    sp.add_argument("--a2", required=True, help="second Bloch vector x,y,z")
    sp.add_argument("--bias1", type=float, default=1.0, help="first bias (default 1)")
    sp.add_argument("--bias2", type=float, default=1.0, help="second bias (default 1)")


def _default_jobs() -> int:
    env = os.environ.get("INCOMPAT_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


class _Output:
    """stdout or a file plus its manifest."""

    def __init__(self, path: str | None, command: str, config: dict, seed: int):
        self.path = path
        self.command = command
        self.config = config
        self.seed = seed
        self.t0 = time.perf_counter()
        self.lines: list[str] = []

    def write(self, line: str) -> None:
        self.lines.append(line)

    def finish(self) -> None:
        data = "".join(self.lines)
        if self.path is None:
            sys.stdout.write(data)
            return
        with open(self.path, "w") as fh:
            fh.write(data)
        manifest = {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": __version__,
            "wall_time_s": round(time.perf_counter() - self.t0, 3),
        }
        with open(self.path + ".manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _search_config(args) -> SearchConfig:
    opt = OptimizerConfig(
        starts=args.starts, seed=args.seed
    )
    return SearchConfig(
        sphere_points=args.sphere_points,
        optimizer=opt,
        bisect_tol=args.tol,
        confirm_scans=not args.no_confirm,
        jobs=args.jobs,
    )


# --- subcommands ---------------------------------------------------------------

def cmd_check(args) -> int:
    pair = parse_pair(args)
    d = busch_f(pair)
    compatible = d.degenerate_parallel or d.F <= 1e-9
    print(f"F     = {fmt(d.F)}" + ("  (collinear shortcut)" if d.degenerate_parallel else ""))
    print(f"gamma = {fmt(d.gamma)}")
    print(f"alpha = {fmt(d.alpha)}")
    print(f"beta  = {fmt(d.beta)}")
    print("verdict: compatible" if compatible else "verdict: incompatible, F > 0")
    return 0 if compatible else 1


def cmd_s0check(args) -> int:
    pair = parse_pair(args)
    sset = parse_state_set(args.set)
    opt = OptimizerConfig(starts=args.starts, seed=args.seed)
    verdict = s0_compatible(pair, sset, opt)
    params = verdict.argmin.as_tuple()
    print(f"set      : {format_state_set(sset)}")
    print(f"min_F    : {fmt(verdict.min_F)}")
    print(f"argmin   : ({', '.join(fmt(v) for v in params)})")
    print(f"slack    : {fmt(verdict.certificate_quality)}")
    print("verdict  : compatible" if verdict.compatible else "verdict  : incompatible")
    return 0 if verdict.compatible else 1


def cmd_table1(args) -> int:
    thetas = [parse_angle(tok) for tok in args.thetas.split(",")]
    cfg = _search_config(args)
    config_echo = {
        "thetas": thetas,
        "bisect_tol": cfg.bisect_tol,
        "sphere_points": cfg.sphere_points,
        "confirm": cfg.confirm_scans,
        "jobs": cfg.jobs,
        "starts": cfg.optimizer.starts,
    }
    out = _Output(args.out, "table1", config_echo, args.seed)
    out.write("theta,tmax,lo,hi\n")
    grids = None
    if cfg.confirm_scans:
        grids = ordering.build_scan_grids(make_mub_pair(1.0), cfg)
    for theta in thetas:
        res = ordering.tmax_bracket_for_theta(theta, replace(cfg, confirm_scans=False))
        if grids is not None and res.lo < 1.0:
            t_confirm = max(res.lo - cfg.confirm_margin, 1.0 / math.sqrt(2.0) + 1e-6)
            _best, witness, _b = ordering.scan_for_witness(
                ordering.mub_tilted_pair(t_confirm, theta), grids, cfg
            )
            if witness is not None:
                print(
                    f"warning: plane/line scan found a witness at theta={fmt(theta)}, "
                    f"t={fmt(t_confirm)}: {format_state_set(witness)} "
                    "(boundary deviates from the through-origin analysis)",
                    file=sys.stderr,
                )
        out.write(
            f"{fmt(theta)},{fmt(res.tmax)},{fmt(res.lo)},{fmt(res.hi)}\n"
        )
    out.finish()
    return 0


def _fig4_column(job):
    """Classify one theta column; deterministic and picklable."""
    j, theta, t_values, sphere_points = job
    cfg = SearchConfig(sphere_points=sphere_points, confirm_scans=False)
    tmax_hi = ordering.tmax_bracket_for_theta(theta, cfg).hi
    records = []
    for i, t in enumerate(t_values):
        cls, witness = ordering.classify_region_with_witness(t, theta, cfg, tmax_hi)
        wit = None
        if witness is not None:
            wit = (witness.n.x, witness.n.y, witness.n.z)
        records.append((i, cls.label, wit))
    return j, records


def cmd_fig4(args) -> int:
    lo = 1.0 / math.sqrt(2.0)
    t_values = [lo + (1.0 - lo) * (i + 1) / args.grid_t for i in range(args.grid_t)]
    theta_values = [
        (math.pi / 2) * j / (args.grid_theta - 1) if args.grid_theta > 1 else 0.0
        for j in range(args.grid_theta)
    ]
    config_echo = {
        "grid_t": args.grid_t,
        "grid_theta": args.grid_theta,
        "sphere_points": args.sphere_points,
        "jobs": args.jobs,
    }
    out = _Output(args.out, "fig4", config_echo, args.seed)
    jobs_list = [
        (j, theta, t_values, args.sphere_points) for j, theta in enumerate(theta_values)
    ]
    if args.jobs > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=args.jobs) as pool:
            results = dict(pool.imap(_fig4_column, jobs_list))
    else:
        results = dict(map(_fig4_column, jobs_list))
    for j, theta in enumerate(theta_values):
        for i, label, wit in results[j]:
            rec = {
                "t": float(fmt(t_values[i])),
                "theta": float(fmt(theta)),
                "class": label,
            }
            if wit is not None:
                rec["witness"] = {"plane_r0_n": [float(fmt(c)) for c in wit]}
            out.write(json.dumps(rec) + "\n")
    out.finish()
    return 0


def cmd_boundary(args) -> int:
    pair = parse_pair(args)
    if not (pair.first.unbiased() and pair.second.unbiased()):
        raise ParseError("boundary curves are defined for unbiased in-plane pairs")
    v1, v2 = pair.first.bloch, pair.second.bloch
    if abs(v1.z) > 1e-12 or abs(v2.z) > 1e-12:
        raise ParseError("boundary curves need Bloch vectors in the xy plane")
    ip = InPlanePair(
        v1.norm(), v2.norm(), math.atan2(v1.y, v1.x), math.atan2(v2.y, v2.x)
    )
    if not ip.incompatible():
        print("pair is compatible: no boundary curve", file=sys.stderr)
        return 1
    config_echo = {"samples": args.samples, "pair": [args.a1, args.a2]}
    out = _Output(args.out, "boundary", config_echo, args.seed)
    out.write("phi,x0\n")
    curve = compatibility_curve(ip, args.samples)
    for phi, x0 in curve.samples:
        out.write(f"{fmt(phi)},{fmt(x0) if x0 is not None else 'no_root'}\n")
    out.finish()
    return 0


def cmd_sampling(args) -> int:
    pair = parse_pair(args)
    sset = parse_state_set(args.set)
    if isinstance(sset, StateSetPlane):
        states = [sset.n.scale(sset.r)] + sset.boundary_states(args.states - 1)
    else:
        states = sset.states(args.states)
    behavior = behavior_of(pair, states)
    print(f"set: {format_state_set(sset)}")
    print("behavior P(+|state, observable):")
    for j, s in enumerate(states):
        row = "  ".join(fmt(behavior.prob(1, j, i)) for i in range(2))
        print(f"  state ({fmt(s.x)}, {fmt(s.y)}, {fmt(s.z)}):  {row}")
    through_origin = isinstance(sset, StateSetPlane) and sset.r == 0.0
    unbiased = pair.first.unbiased() and pair.second.unbiased()
    strategy = None
    if through_origin and unbiased:
        strategy = synthesize_cc(pair, StateSetR(sset.n))
    if strategy is not None:
        print("strategy: measure the joint observable, answer its i-th coordinate")
        for (e0, v), (mu, nu) in zip(
            strategy.alice_effects, ((1, 1), (1, -1), (-1, 1), (-1, -1))
        ):
            print(
                f"  effect ({mu:+d},{nu:+d}): scalar {fmt(e0)}, "
                f"vector ({fmt(v.x)}, {fmt(v.y)}, {fmt(v.z)})"
            )
        dev = verify_strategy(strategy, behavior, states)
        print(f"replay deviation: {fmt(dev)}")
        return 0
    opt = OptimizerConfig(starts=args.starts, seed=args.seed)
    cert = certify_non_cc(pair, sset, opt)
    if cert is not None:
        params = cert.argmin.as_tuple()
        print("no classical strategy reproduces this behavior on the section:")
        print(f"  certificate min_F = {fmt(cert.min_F)} > 0")
        print(f"  at shift params ({', '.join(fmt(v) for v in params)})")
    else:
        print(
            "pair is compatible on this section; a classical strategy exists"
            + ("" if strategy else " (explicit synthesis covers through-origin planes)")
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="incompat",
        description="(In)compatibility of qubit observable pairs under restricted state sets",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--seed", type=int, default=0, help="solver seed (default 0)")
        sp.add_argument("--starts", type=int, default=32, help="solver multistarts")
        if out:
            sp.add_argument("--out", default=None, help="output file (manifest written alongside)")

    sp = sub.add_parser("check", help="full-state-space compatibility of a pair")
    _add_pair_flags(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("s0check", help="compatibility restricted to a section")
    _add_pair_flags(sp)
    sp.add_argument("--set", required=True, help='e.g. "plane r=0 n=0,1,0"')
    common(sp, out=False)
    sp.set_defaults(func=cmd_s0check)

    sp = sub.add_parser("table1", help="sharpness thresholds of the ordered band (CSV)")
    sp.add_argument("--thetas", default="pi/12,pi/6,pi/4,pi/3", help="comma-separated angles")
    sp.add_argument("--tol", type=float, default=5e-4, help="bisection tolerance in t")
    sp.add_argument("--sphere-points", type=int, default=4000)
    sp.add_argument("--no-confirm", action="store_true",
                    help="skip the plane/line max-min confirmation scans")
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    common(sp)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("fig4", help="region classification scan (NDJSON)")
    sp.add_argument("--grid-t", type=int, default=101)
    sp.add_argument("--grid-theta", type=int, default=91)
    sp.add_argument("--sphere-points", type=int, default=4000)
    sp.add_argument("--jobs", type=int, default=_default_jobs())
    common(sp)
    sp.set_defaults(func=cmd_fig4)

    sp = sub.add_parser("boundary", help="analytic boundary curve (CSV phi,x0)")
    _add_pair_flags(sp)
    sp.add_argument("--samples", type=int, default=720)
    common(sp)
    sp.set_defaults(func=cmd_boundary)

    sp = sub.add_parser("sampling", help="distributed-sampling demo on a section")
    _add_pair_flags(sp)
    sp.add_argument("--set", required=True, help='e.g. "plane r=0 n=1,0,0"')
    sp.add_argument("--states", type=int, default=5, help="states printed in the table")
    common(sp, out=False)
    sp.set_defaults(func=cmd_sampling)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, matching the parse-error contract
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, OutOfRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except IncompatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
