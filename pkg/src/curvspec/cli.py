"""Command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 no solution (lambda outside
the spectral interval), 3 validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, io, shooting, spectrum, timemap, validation
from .errors import CurvSpecError, NoSolution
from .quadrature import DEFAULT_ABS_TOL
from .spectrum import NodalClass

log = logging.getLogger("curvspec")

EXIT_OK, EXIT_NUMERICAL, EXIT_NO_SOLUTION, EXIT_VALIDATION = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    kappa: float = 1.0
    n: int = 1
    nu: str = "+"
    lam: float | None = None
    xi_min: float = 0.01
    xi_max: float = 0.45
    xi_count: int = 45
    output_path: Path | None = None
    format: str = "csv"
    quad_tol: float = DEFAULT_ABS_TOL
    root_tol: float = timemap.ROOT_TOL
    step_tol: float = shooting.STEP_TOL
    fast: bool = False
    perturb_b: float = 0.0

    def __post_init__(self):
        for name in ("quad_tol", "root_tol", "step_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.xi_count < 2:
            raise ValueError("xi-count must be at least 2")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    @property
    def tolerances(self) -> dict:
        return {"quad_tol": self.quad_tol, "root_tol": self.root_tol,
                "step_tol": self.step_tol}

    def out_path(self) -> Path | None:
        if self.output_path is None:
            return None
        p = Path(self.output_path)
        suffix = "." + self.format
        if p.suffix.lower() in (".csv", ".json") and p.suffix.lower() != suffix:
            raise ValueError(f"--out {p} does not match --format {self.format}")
        return p if p.suffix.lower() == suffix else p.with_name(p.name + suffix)


def threads_from_env() -> int:
    raw = os.environ.get("CURVSPEC_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring CURVSPEC_THREADS=%r", raw)
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# Commands

def cmd_constants(cfg: RunConfig) -> int:
    res = timemap.b_quadrature()
    B = res.value
    print(f"B      = {B:.16g}  (error estimate {res.error_estimate:.1e})")
    print(f"8B^2   = {8 * B * B:.16g}  (error estimate {16 * B * res.error_estimate:.1e})")
    print(f"pi^2   = {math.pi ** 2:.16g}")
    return EXIT_OK


def cmd_interval(cfg: RunConfig) -> int:
    lo, hi = spectrum.spectrum_interval(cfg.kappa, cfg.n)
    regime = "euclidean" if cfg.kappa > 0 else "minkowski"
    print(f"kappa={cfg.kappa:g} n={cfg.n} ({regime}): "
          f"lambda in ({lo:.10g}, {hi if math.isinf(hi) else format(hi, '.10g')})")
    return EXIT_OK


def solve_profile(cfg: RunConfig):
    """Solution, metadata and rows for ``cmd_solve``; raises on failure."""
    cls = NodalClass(cfg.n, cfg.nu)
    sol = spectrum.nodal_solution(cfg.kappa, cfg.lam, cls, root_tol=cfg.root_tol,
                                  quad_tol=cfg.quad_tol)
    kt, lt = spectrum.rescale(cfg.kappa, cfg.lam, cfg.n)
    residual_j = timemap.time_map(kt, lt, sol.sup_norm).value - 0.5
    traj = shooting.integrate_ivp(cfg.kappa, cfg.lam, sol.boundary_slope,
                                  step_tol=cfg.step_tol)
    replay, _ = traj.evaluate(sol.x)
    meta = {
        "kind": "profile",
        "kappa": cfg.kappa, "lambda": cfg.lam, "n": cfg.n, "nu": cls.sign,
        "xi": sol.sup_norm, "b": sol.boundary_slope,
        "residual_J": residual_j,
        "residual_shoot": float(abs(traj.u[-1])),
        "replay_sup_diff": float(np.max(np.abs(replay - sol.u))),
        "tolerances": cfg.tolerances,
    }
    rows = np.column_stack([sol.x, sol.u])
    return sol, meta, rows


def cmd_solve(cfg: RunConfig) -> int:
    if cfg.lam is None:
        raise ValueError("--lambda is required for solve")
    try:
        sol, meta, rows = solve_profile(cfg)
    except NoSolution as exc:
        print("no solution: lambda outside spectral interval", file=sys.stderr)
        log.info("%s", exc)
        return EXIT_NO_SOLUTION
    out = cfg.out_path()
    if out is not None:
        io.write_table(out, meta, io.PROFILE_COLUMNS, rows, cfg.format)
    else:
        sys.stdout.write(io.dumps_table(meta, io.PROFILE_COLUMNS, rows, cfg.format))
    print(f"xi={meta['xi']:.12g} b={meta['b']:.12g} residual_J={meta['residual_J']:.2e} "
          f"residual_shoot={meta['residual_shoot']:.2e}", file=sys.stderr)
    return EXIT_OK


def branch_rows(cfg: RunConfig, branch: spectrum.Branch):
    rows = []
    for p in branch.points:
        kt, lt = spectrum.rescale(cfg.kappa, p.lam, cfg.n)
        res_j = timemap.time_map(kt, lt, p.xi).value - 0.5
        try:
            traj = shooting.integrate_ivp(cfg.kappa, p.lam, p.b, step_tol=cfg.step_tol)
            res_s = float(abs(traj.u[-1]))
        except CurvSpecError as exc:
            log.warning("shooting replay failed at xi=%r: %s", p.xi, exc)
            res_s = math.nan
        rows.append([p.xi, p.lam, p.b, p.xi, res_j, res_s])
    return rows


def cmd_branch(cfg: RunConfig) -> int:
    grid = np.linspace(cfg.xi_min, cfg.xi_max, cfg.xi_count)
    cls = NodalClass(cfg.n, cfg.nu)
    branch = spectrum.trace_branch(cfg.kappa, cls, grid, threads=threads_from_env(),
                                   root_tol=cfg.root_tol, quad_tol=cfg.quad_tol)
    for xi, why in branch.failures:
        log.warning("skipped xi=%.17g: %s", xi, why)
    if len(branch.failures) > 0.5 * len(grid):
        print(f"branch failed: {len(branch.failures)} of {len(grid)} grid points "
              "have no solution", file=sys.stderr)
        return EXIT_NUMERICAL
    rows = branch_rows(cfg, branch)
    meta = {"kind": "branch", "kappa": cfg.kappa, "n": cfg.n, "nu": cls.sign,
            "skipped": len(branch.failures), "tolerances": cfg.tolerances}
    out = cfg.out_path()
    if out is not None:
        io.write_table(out, meta, io.BRANCH_COLUMNS, rows, cfg.format)
    else:
        sys.stdout.write(io.dumps_table(meta, io.BRANCH_COLUMNS, rows, cfg.format))
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    settings = validation.Settings(fast=cfg.fast, b_offset=cfg.perturb_b)
    results = []
    for check in validation.CHECKS:
        res = validation.run_check(check, settings)
        print(res.line(), file=sys.stderr)
        results.append(res)
    rep = validation.report(results)
    rep["version"] = __version__
    rep["fast"] = cfg.fast
    text = json.dumps(rep, indent=1)
    out = cfg.out_path()
    if out is not None:
        out.write_text(text + "\n")
    print(text)
    return EXIT_OK if rep["passed"] else EXIT_VALIDATION


COMMANDS = {
    "constants": cmd_constants,
    "interval": cmd_interval,
    "solve": cmd_solve,
    "branch": cmd_branch,
    "validate": cmd_validate,
}


# --------------------------------------------------------------------------
# Argument parsing

def _nu(text: str) -> str:
    if text not in ("+", "-"):
        raise argparse.ArgumentTypeError("nu must be + or -")
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kappa", type=float, default=1.0)
    common.add_argument("--n", type=int, default=1)
    common.add_argument("--nu", type=_nu, default="+")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--quad-tol", type=float, default=DEFAULT_ABS_TOL)
    common.add_argument("--root-tol", type=float, default=timemap.ROOT_TOL)
    common.add_argument("--step-tol", type=float, default=shooting.STEP_TOL)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="curvspec",
        description="Nodal solutions of the 1-D mean-curvature eigenvalue problem.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="print B, 8B^2, pi^2")
    sub.add_parser("interval", parents=[common], help="spectral interval for (kappa, n)")
    p = sub.add_parser("solve", parents=[common], help="solve one instance")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p = sub.add_parser("branch", parents=[common], help="trace a branch over xi")
    p.add_argument("--xi-min", type=float, default=0.01)
    p.add_argument("--xi-max", type=float, default=0.45)
    p.add_argument("--xi-count", type=int, default=45)
    p = sub.add_parser("validate", parents=[common], help="run the verification suite")
    p.add_argument("--fast", action="store_true")
    p.add_argument("--perturb-b", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fmt = args.format or (io.format_for(args.out) if args.out else "csv")
    return RunConfig(
        command=args.command, kappa=args.kappa, n=args.n, nu=args.nu,
        lam=getattr(args, "lam", None),
        xi_min=getattr(args, "xi_min", 0.01), xi_max=getattr(args, "xi_max", 0.45),
        xi_count=getattr(args, "xi_count", 45), output_path=args.out, format=fmt,
        quad_tol=args.quad_tol, root_tol=args.root_tol, step_tol=args.step_tol,
        fast=getattr(args, "fast", False), perturb_b=getattr(args, "perturb_b", 0.0))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        cfg.out_path()
    except ValueError as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[cfg.command](cfg)
    except CurvSpecError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
