"""Numerical verification suite run by ``curvspec validate`` and the tests.

Every check returns a :class:`CheckResult`; oracles are independent of the
code path under test wherever one exists (gamma-function closed forms,
finite differences, the shooting integrator, linear eigenfunctions).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import shooting, spectrum, timemap
from .errors import CurvSpecError, MultipleRoots, NoSolution
from .spectrum import NodalClass, rescale
from .timemap import Regime

PI2 = math.pi ** 2


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name} ({self.elapsed:.2f}s)"

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "elapsed_s": round(self.elapsed, 3), "detail": _jsonable(self.detail)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass(frozen=True)
class Settings:
    """``b_offset`` shifts the constant B used for interval predictions; it
    exists only as a negative control and must make the suite fail."""

    fast: bool = False
    b_offset: float = 0.0

    @property
    def B(self) -> float:
        return timemap.compute_B() + self.b_offset


def gamma_oracle_B() -> float:
    """B = Gamma(3/4) Gamma(1/2) / (4 Gamma(5/4)), a Beta-function identity."""
    return 0.25 * math.gamma(0.75) * math.gamma(0.5) / math.gamma(1.25)


@lru_cache(maxsize=None)
def _scan(kappa: float, lam: float):
    return timemap.amplitude_scan(Regime(kappa), lam)


def _try_solve(kappa: float, lam: float, n: int):
    """(xi or None, number of sign-change brackets) for the n-hump problem."""
    kt, lt = rescale(kappa, lam, n)
    scan = _scan(kt, lt)
    nb = len(timemap.sign_changes(scan[1]))
    try:
        return timemap.solve_amplitude(Regime(kt), lt, scan=scan), nb
    except NoSolution:
        return None, nb
    except MultipleRoots:
        return None, nb


def _ns(s: Settings):
    return (1,) if s.fast else (1, 2, 3)


# --------------------------------------------------------------------------
# Individual criteria

def check_constant_b(s: Settings) -> CheckResult:
    t0 = time.perf_counter()
    B = s.B
    oracle = gamma_oracle_B()
    elapsed = time.perf_counter() - t0
    ok = abs(B - oracle) <= 1e-10 and elapsed < 1.0
    return CheckResult("01 constant B vs Gamma closed form (1e-10, <1s)", ok,
                       {"B": B, "oracle": oracle, "error": B - oracle})


def _interval_cases(kappas, s: Settings, minkowski: bool):
    rows, ok = [], True
    for n in _ns(s):
        for kappa in kappas:
            lo, hi = spectrum.spectrum_interval(kappa, n, B=s.B)
            if minkowski:
                inside, outside = [2 * n * n * PI2], [lo - 0.5]
            else:
                inside, outside = [0.5 * (lo + hi)], [lo - 0.5, hi + 0.5]
            for lam in inside:
                xi, _ = _try_solve(kappa, lam, n)
                rows.append({"kappa": kappa, "n": n, "lam": lam, "expect": "root",
                             "xi": xi, "ok": xi is not None})
            for lam in outside:
                xi, _ = _try_solve(kappa, lam, n)
                rows.append({"kappa": kappa, "n": n, "lam": lam, "expect": "none",
                             "xi": xi, "ok": xi is None})
            if not minkowski:
                # The left endpoint is where the time map at the amplitude bound
                # equals 1/2; the quadrature knows nothing about the value of B.
                kt, lt = rescale(kappa, lo, n)
                j_edge = timemap._j(kt, lt, Regime(kt).xi_max(lt))[0]
                rows.append({"kappa": kappa, "n": n, "lam": lo,
                             "expect": "J(edge)=1/2", "J": j_edge,
                             "ok": abs(j_edge - 0.5) <= 1e-9})
    ok = all(r["ok"] for r in rows)
    return ok, rows


def check_euclidean_interval(s: Settings) -> CheckResult:
    ok, rows = _interval_cases((0.5, 1.0, 4.0), s, minkowski=False)
    return CheckResult("02 Euclidean interval (8n^2B^2, n^2pi^2)", ok, {"cases": rows})


def check_minkowski_interval(s: Settings) -> CheckResult:
    ok, rows = _interval_cases((-0.5, -1.0, -4.0), s, minkowski=True)
    return CheckResult("03 Minkowski interval (n^2pi^2, inf)", ok, {"cases": rows})


def check_uniqueness(s: Settings) -> CheckResult:
    rows = []
    for n in _ns(s):
        for kappa in (0.5, 1.0, 4.0, -0.5, -1.0, -4.0):
            lo, hi = spectrum.spectrum_interval(kappa, n, B=s.B)
            lam = 0.5 * (lo + hi) if kappa > 0 else 2 * n * n * PI2
            _, nb = _try_solve(kappa, lam, n)
            rows.append({"kappa": kappa, "n": n, "lam": lam, "brackets": nb})
    ok = all(r["brackets"] == 1 for r in rows)
    return CheckResult("04 uniqueness: one bracket on the 512-point scan", ok,
                       {"cases": rows,
                        "multiple_root_events": sum(r["brackets"] > 1 for r in rows)})


def _shoot_point(kappa, n, p: spectrum.BranchPoint):
    traj = shooting.integrate_ivp(kappa, p.lam, p.b)
    return {"xi": p.xi, "lam": p.lam, "b": p.b, "u1": float(traj.u[-1]),
            "zeros": len(shooting.find_zeros(traj)), "drift": traj.energy_drift()}


def check_shooting_crossval(s: Settings) -> CheckResult:
    count = 5 if s.fast else 20
    rows = []
    grids = {1.0: np.linspace(0.02, 0.80, count), -1.0: np.linspace(0.02, 0.45, count)}
    for kappa, grid in grids.items():
        for xi in grid:
            p = spectrum.branch_point(kappa, 1, float(xi))
            r = _shoot_point(kappa, 1, p)
            r["kappa"] = kappa
            r["ok"] = abs(r["u1"]) < 1e-6 and r["zeros"] == 0 and r["drift"] < 1e-9
            rows.append(r)
    return CheckResult("05 time-map / shooting cross-validation",
                       all(r["ok"] for r in rows), {"points": rows})


def _hump_metrics(x, u, n):
    """Max reflection asymmetry and max deviation between humps."""
    m = (x.size - 1) // n
    humps = [u[j * m:(j + 1) * m + 1] for j in range(n)]
    sym = max(float(np.max(np.abs(h - h[::-1]))) for h in humps)
    eq = max(float(np.max(np.abs((-1) ** j * h - humps[0]))) for j, h in enumerate(humps))
    return sym, eq


def check_hump_symmetry(s: Settings) -> CheckResult:
    rows = []
    n = 3
    cases = [(1.0, None), (-1.0, 10 * PI2)]
    for kappa, lam in cases:
        if lam is None:
            lo, hi = spectrum.spectrum_interval(kappa, n)
            lam = 0.5 * (lo + hi)
        for nu in (1, -1):
            sol = spectrum.nodal_solution(kappa, lam, NodalClass(n, nu))
            sym, eq = _hump_metrics(sol.x, sol.u, n)
            traj = shooting.integrate_ivp(kappa, lam, sol.boundary_slope)
            us, _ = traj.evaluate(sol.x)
            ssym, seq = _hump_metrics(sol.x, us, n)
            replay = float(np.max(np.abs(us - sol.u)))
            rows.append({"kappa": kappa, "lam": lam, "nu": nu,
                         "assembled_symmetry": sym, "assembled_equality": eq,
                         "shooting_symmetry": ssym, "shooting_equality": seq,
                         "replay": replay,
                         "zeros": shooting.find_zeros(traj),
                         "ok": max(sym, eq, ssym, seq) <= 1e-8 and replay <= 1e-6})
    return CheckResult("06 hump symmetry and equality, n=3 (1e-8)",
                       all(r["ok"] for r in rows), {"cases": rows})


def check_scaling(s: Settings) -> CheckResult:
    a = spectrum.nodal_solution(1.0, 24.0, NodalClass(2))
    b = spectrum.nodal_solution(4.0, 6.0, NodalClass(1))
    m = b.x.size - 1
    # On [0, 1/2] the n=2 grid point j sits at 2x = j/m on the n=1 grid.
    diff_grid = float(np.max(np.abs(a.u[:m + 1] - b.u)))
    tiled = np.concatenate([b.u[:-1], -b.u])
    diff_tiled = float(np.max(np.abs(a.u - tiled)))
    ta = shooting.integrate_ivp(1.0, 24.0, a.boundary_slope)
    tb = shooting.integrate_ivp(4.0, 6.0, b.boundary_slope)
    xq = np.linspace(0.0, 0.5, 257)
    ua, _ = ta.evaluate(xq)
    ub, _ = tb.evaluate(2 * xq)
    diff_shoot = float(np.max(np.abs(ua - ub)))
    ok = max(diff_grid, diff_tiled, diff_shoot) <= 1e-8
    return CheckResult("07 scaling law u(x) = v(2x) (1e-8)", ok,
                       {"grid": diff_grid, "tiled": diff_tiled, "shooting": diff_shoot})


def check_branch_monotonicity(s: Settings) -> CheckResult:
    count = 15 if s.fast else 45
    rows = {}
    ok = True
    for kappa, top in ((1.0, 0.83), (-1.0, 0.45)):
        br = spectrum.trace_branch(kappa, NodalClass(1), np.linspace(0.01, top, count),
                                   check=False)
        pts = sorted(br.points, key=lambda p: p.lam)
        db = np.diff([p.b for p in pts])
        viol = int(np.sum(db >= 0)) if kappa > 0 else int(np.sum(db <= 0))
        rows[str(kappa)] = {"points": len(br.points), "failures": len(br.failures),
                            "violations": viol}
        ok &= viol == 0 and len(br.points) == count
    return CheckResult("08 branch monotonicity of u'(0) in lambda", ok, rows)


def check_euclidean_limit(s: Settings) -> CheckResult:
    rows = []
    ok = True
    for n, kappa in ((1, 1.0), (2, 1.0)):
        xi_lim = 1.0 / (2 * n * s.B * math.sqrt(kappa))
        lam_lim = 8 * n * n * s.B ** 2
        xis = [(1 - 10.0 ** -k) * xi_lim for k in range(1, 5)]
        lams = []
        for xi in xis:
            try:
                lams.append(spectrum.branch_point(kappa, n, xi).lam)
            except CurvSpecError:
                lams.append(math.nan)
        mono = all(a > b for a, b in zip(lams, lams[1:]))
        close = abs(lams[-1] - lam_lim) < 1e-2
        ok &= mono and close
        rows.append({"n": n, "kappa": kappa, "xi": xis, "lam": lams,
                     "lam_limit": lam_lim, "monotone": mono, "within_1e-2": close})
    return CheckResult("09 Euclidean amplitude limit lam -> 8n^2B^2", ok, {"cases": rows})


def check_minkowski_asymptotics(s: Settings) -> CheckResult:
    rep = spectrum.asymptote_check(-1.0, 1)
    grid = np.linspace(0.01, 0.45, 10 if s.fast else 45)
    br = spectrum.trace_branch(-1.0, NodalClass(1), grid, check=False)
    below = all(p.xi < 0.5 for p in br.points)
    ok = rep["passed"] and below
    return CheckResult("10 Minkowski asymptotics (sup < 1/2, u'(0) -> 1)", ok,
                       {"report": rep, "branch_sup_below_half": below})


def check_small_amplitude(s: Settings) -> CheckResult:
    rows = []
    for n in (1, 2):
        for kappa in (1.0, -1.0):
            lam = spectrum.branch_point(kappa, n, 1e-4).lam
            rows.append({"n": n, "kappa": kappa, "lam": lam, "gap": lam - n * n * PI2,
                         "ok": abs(lam - n * n * PI2) < 1e-3})
    return CheckResult("11 bifurcation from n^2 pi^2 at xi=1e-4 (1e-3)",
                       all(r["ok"] for r in rows), {"cases": rows})


def check_time_map_monotonicity(s: Settings) -> CheckResult:
    size = 8 if s.fast else 20
    lams = np.linspace(2.0, 200.0, size)
    xis = np.linspace(0.02, 0.6, size)
    J = np.array([[timemap.time_map(-1.0, lam, xi).value for xi in xis] for lam in lams])
    dec_lam = bool(np.all(np.diff(J, axis=0) < 0))
    inc_xi = bool(np.all(np.diff(J, axis=1) > 0))
    sign_mismatch = 0
    rel_printed, rel_rederived = [], []
    for lam in lams:
        for xi in xis:
            fd = timemap.time_map_derivative_fd(-1.0, lam, xi)
            pr = timemap.time_map_derivative_xi(-1.0, lam, xi, form="printed")
            rd = timemap.time_map_derivative_xi(-1.0, lam, xi, form="rederived")
            sign_mismatch += int(np.sign(pr) != np.sign(fd))
            rel_printed.append(abs(pr - fd) / abs(fd))
            rel_rederived.append(abs(rd - fd) / abs(fd))
    ok = dec_lam and inc_xi and sign_mismatch == 0
    return CheckResult("12 monotonicity of J and sign of dJ/dxi", ok, {
        "decreasing_in_lambda": dec_lam, "increasing_in_xi": inc_xi,
        "sign_mismatches": sign_mismatch,
        "printed_vs_fd_max_rel_discrepancy": max(rel_printed),
        "rederived_vs_fd_max_rel_discrepancy": max(rel_rederived)})


def check_linear_limit(s: Settings) -> CheckResult:
    rows = []
    xi = 0.01
    for kappa in (1e-8, -1e-8):
        for n in (1, 2):
            p = spectrum.branch_point(kappa, n, xi)
            hump = spectrum.build_hump(kappa, p.lam, n, xi)
            sol = spectrum.assemble_nodal(hump, NodalClass(n))
            err = float(np.max(np.abs(sol.u - xi * np.sin(n * math.pi * sol.x))))
            rows.append({"kappa": kappa, "n": n, "lam": p.lam, "error": err,
                         "ok": err <= 1e-4})
    return CheckResult("13 linear limit kappa=+-1e-8 vs xi sin(n pi x) (1e-4)",
                       all(r["ok"] for r in rows), {"cases": rows})


CHECKS = (
    check_constant_b,
    check_euclidean_interval,
    check_minkowski_interval,
    check_uniqueness,
    check_shooting_crossval,
    check_hump_symmetry,
    check_scaling,
    check_branch_monotonicity,
    check_euclidean_limit,
    check_minkowski_asymptotics,
    check_small_amplitude,
    check_time_map_monotonicity,
    check_linear_limit,
)


# Wall-clock budgets in seconds.
BUDGETS = {
    check_constant_b: 1.0,
    check_euclidean_interval: 30.0,
    check_minkowski_interval: 30.0,
}


def run_check(check, settings: Settings) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = check(settings)
    except CurvSpecError as exc:
        res = CheckResult(check.__name__, False, {"error": f"{type(exc).__name__}: {exc}"})
    res.elapsed = time.perf_counter() - t0
    budget = BUDGETS.get(check)
    if budget is not None and res.elapsed > budget:
        res.passed = False
        res.detail["budget_exceeded_s"] = budget
    return res


def run_all(settings: Settings = Settings()) -> list[CheckResult]:
    return [run_check(c, settings) for c in CHECKS]


def report(results) -> dict:
    return {"passed": all(r.passed for r in results),
            "checks": [r.as_dict() for r in results]}
