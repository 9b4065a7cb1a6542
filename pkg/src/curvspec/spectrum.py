"""Nodal solutions, spectral intervals and bifurcation branches.

An n-hump solution on (0, 1) is u(x) = v(n x) on the first hump, where v is
the one-hump solution of the same equation with kappa n^2 and lam / n^2.
Every further hump is the first one reflected in sign and translated by
j / n, so all the work reduces to the scalar time map of the one-hump
problem.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C

from . import shooting, timemap
from .errors import (CurvSpecError, InvalidInput, InvariantViolation,
                     NonConvergence, NotASolution)
from .timemap import Regime

log = logging.getLogger(__name__)

GRID_POINTS = 1024
HUMP_TOL = 1e-8
SOLUTION_TOL = 1e-8


@dataclass(frozen=True)
class NodalClass:
    """n humps (n - 1 interior zeros); ``nu`` is the sign of u near 0."""

    n: int
    nu: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInput(f"n must be a positive integer, got {self.n!r}")
        nu = self.nu
        if isinstance(nu, str):
            nu = {"+": 1, "-": -1}.get(nu.strip(), 0)
        if nu not in (1, -1):
            raise InvalidInput(f"nu must be + or -, got {self.nu!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "nu", int(nu))

    @property
    def sign(self) -> str:
        return "+" if self.nu > 0 else "-"


def spectrum_interval(kappa: float, n: int, B: float | None = None):
    """Open lam-interval on which S_n solutions exist.

    (8 n^2 B^2, n^2 pi^2) for kappa > 0 and (n^2 pi^2, inf) for kappa < 0.
    ``B`` overrides the computed constant (used for negative controls).
    """
    if kappa == 0 or not math.isfinite(kappa):
        raise InvalidInput("kappa must be finite and nonzero")
    if int(n) != n or n < 1:
        raise InvalidInput("n must be a positive integer")
    if kappa > 0:
        B = timemap.compute_B() if B is None else B
        return 8.0 * n * n * B * B, n * n * math.pi ** 2
    return n * n * math.pi ** 2, math.inf


def rescale(kappa: float, lam: float, n: int):
    """(kappa n^2, lam / n^2): parameters of the equivalent one-hump problem."""
    if int(n) != n or n < 1:
        raise InvalidInput("n must be a positive integer")
    return kappa * n * n, lam / (n * n)


# --------------------------------------------------------------------------
# Humps

@dataclass(frozen=True)
class HumpProfile:
    n: int
    xi: float
    b: float
    x: np.ndarray
    u: np.ndarray
    lam: float
    kappa: float
    half_width_residual: float = 0.0

    @property
    def grid(self):
        return list(zip(self.x.tolist(), self.u.tolist()))

    def violations(self, tol: float = HUMP_TOL) -> list[str]:
        out = []
        u, m = self.u, self.u.size
        if abs(u[0]) > tol or abs(u[-1]) > tol:
            out.append("hump does not vanish at its ends")
        if abs(np.max(u) - self.xi) > tol:
            out.append("max u differs from the amplitude")
        if m % 2 == 1 and abs(u[m // 2] - self.xi) > tol:
            out.append("u at the midpoint differs from the amplitude")
        if np.max(np.abs(u - u[::-1])) > tol:
            out.append("hump is not symmetric about its midpoint")
        if np.any(np.diff(u[: m // 2 + 1]) <= 0):
            out.append("u is not strictly increasing on the left half")
        return out


def _hump_speed(s0: float):
    """d(y)/d(tau) * sqrt(lam) along u = xi sin(tau): (1 - s)/sqrt(1 - s/2)."""
    def g(tau):
        s = s0 * np.cos(tau) ** 2
        return (1.0 - s) / np.sqrt(1.0 - 0.5 * s)
    return g


def _chebfit(g, a, b, tol=1e-15, max_deg=4096):
    """Chebyshev interpolant of a smooth g on [a, b], degree doubled until
    the trailing coefficients reach ``tol`` or the roundoff floor, whichever
    is larger, relative to the largest coefficient."""
    deg = 32
    while True:
        series = C.Chebyshev.interpolate(g, deg, domain=[a, b])
        coef = np.abs(series.coef)
        floor = max(tol, 16 * deg * np.finfo(float).eps)
        if np.max(coef[-4:]) <= floor * np.max(coef):
            return series.trim(tol * np.max(coef) * 1e-3)
        if deg >= max_deg:
            raise NonConvergence(f"Chebyshev fit did not converge by degree {deg}")
        deg *= 2


def build_hump(kappa: float, lam: float, n: int, xi: float,
               grid_points: int = GRID_POINTS) -> HumpProfile:
    """First hump of the n-hump solution with amplitude ``xi``, on [0, 1/n].

    Along the rising half write u = xi sin(tau); the first integral then
    gives dy/dtau = (1 - s)/sqrt(lam~ (1 - s/2)) with s = s0 cos^2 tau and
    y = n x, which is smooth on [0, pi/2]. Its Chebyshev interpolant is
    integrated to y(tau) and inverted by Newton iteration on a uniform
    x-grid; the falling half is the mirror image.
    """
    if grid_points < 16 or grid_points % 2:
        raise InvalidInput("grid_points must be an even integer >= 16")
    kt, lt = rescale(kappa, lam, n)
    regime = Regime(kt)
    j = timemap.time_map(regime, lt, xi).value
    if abs(j - 0.5) > SOLUTION_TOL:
        raise NotASolution(f"|J(lam~, xi) - 1/2| = {abs(j - 0.5):.3e} exceeds {SOLUTION_TOL:g}")

    s0 = 0.5 * lt * kt * xi * xi
    g = _hump_speed(s0)
    rl = math.sqrt(lt)
    half_pi = 0.5 * math.pi
    speed = _chebfit(g, 0.0, half_pi)
    y_of_tau = speed.integ(lbnd=0.0) / rl
    y_mid = float(y_of_tau(half_pi))

    # Left half of the uniform grid, including the midpoint.
    half = grid_points // 2
    y = np.arange(half + 1) / grid_points          # in [0, 1/2]
    y_target = np.minimum(y * (2.0 * y_mid), y_mid)  # stretch onto [0, y_mid]
    tab_tau = np.linspace(0.0, half_pi, 4 * grid_points + 1)
    tau = np.interp(y_target, y_of_tau(tab_tau), tab_tau)
    for _ in range(8):
        step = (y_of_tau(tau) - y_target) * rl / g(tau)
        tau = np.clip(tau - step, 0.0, half_pi)
        if np.max(np.abs(step)) < 1e-15:
            break
    tau[-1] = half_pi
    left = xi * np.sin(tau)
    u = np.concatenate([left, left[-2::-1]])
    x = np.arange(grid_points + 1) / (grid_points * n)
    for arr in (x, u):
        arr.flags.writeable = False
    b = n * shooting.slope_from_amplitude(kt, lt, xi)
    hump = HumpProfile(n=n, xi=float(xi), b=float(b), x=x, u=u, lam=float(lam),
                       kappa=float(kappa), half_width_residual=float(2 * y_mid - 1))
    bad = hump.violations()
    if bad:
        raise InvariantViolation("; ".join(bad))
    return hump


# --------------------------------------------------------------------------
# Nodal solutions

@dataclass(frozen=True)
class NodalSolution:
    cls: NodalClass
    lam: float
    kappa: float
    x: np.ndarray
    u: np.ndarray
    zeros: tuple
    sup_norm: float
    boundary_slope: float
    hump: HumpProfile | None = field(default=None, repr=False, compare=False)

    @property
    def grid(self):
        return list(zip(self.x.tolist(), self.u.tolist()))

    @classmethod
    def from_grid(klass, nodal_class: NodalClass, lam: float, kappa: float,
                  x, u, boundary_slope: float) -> "NodalSolution":
        """Rebuild from sampled data, e.g. a profile read back from disk."""
        x = np.array(x, dtype=float)
        u = np.array(u, dtype=float)
        zeros = []
        for i in range(1, x.size - 1):
            if u[i] == 0.0 or u[i] * u[i + 1] < 0:
                zeros.append(float(x[i]) if u[i] == 0.0 else
                             float(x[i] - u[i] * (x[i + 1] - x[i]) / (u[i + 1] - u[i])))
        for arr in (x, u):
            arr.flags.writeable = False
        return klass(cls=nodal_class, lam=float(lam), kappa=float(kappa), x=x, u=u,
                   zeros=tuple(zeros), sup_norm=float(np.max(np.abs(u))),
                   boundary_slope=float(boundary_slope))

    def hump_slices(self):
        m = (self.x.size - 1) // self.cls.n
        return [slice(j * m, (j + 1) * m + 1) for j in range(self.cls.n)]

    def violations(self, tol: float = SOLUTION_TOL) -> list[str]:
        out = []
        n = self.cls.n
        if len(self.zeros) != n - 1:
            out.append(f"expected {n - 1} interior zeros, found {len(self.zeros)}")
        slices = self.hump_slices()
        first = self.cls.nu * self.u[slices[0]]
        for j, sl in enumerate(slices):
            seg = self.u[sl]
            if abs(seg[0]) > tol or abs(seg[-1]) > tol:
                out.append(f"hump {j} does not vanish at j/n")
            if np.max(np.abs((-1) ** j * self.cls.nu * seg - first)) > tol:
                out.append(f"hump {j} is not a reflected translate of hump 0")
            if np.max(np.abs(seg - seg[::-1])) > tol:
                out.append(f"hump {j} is not symmetric")
            inner = seg[1:-1] * ((-1) ** j * self.cls.nu)
            if np.any(inner <= 0):
                out.append(f"hump {j} changes sign")
        for z, expect in zip(self.zeros, range(1, n)):
            if abs(z - expect / n) > tol:
                out.append(f"zero {z!r} is not at {expect}/{n}")
        return out


def assemble_nodal(hump: HumpProfile, cls: NodalClass) -> NodalSolution:
    """Tile [0, 1] with alternating copies of ``hump``."""
    if hump.n != cls.n:
        raise InvalidInput(f"hump built for n={hump.n}, class has n={cls.n}")
    n = cls.n
    m = hump.u.size - 1
    pieces = [((-1) ** j) * hump.u[:-1] for j in range(n)]
    u = cls.nu * np.concatenate(pieces + [np.zeros(1)])
    x = np.arange(n * m + 1) / (n * m)
    for arr in (x, u):
        arr.flags.writeable = False
    sol = NodalSolution(cls=cls, lam=hump.lam, kappa=hump.kappa, x=x, u=u,
                        zeros=tuple(j / n for j in range(1, n)),
                        sup_norm=hump.xi, boundary_slope=cls.nu * hump.b,
                        hump=hump)
    bad = sol.violations()
    if bad:
        raise InvariantViolation("; ".join(bad))
    return sol


def nodal_solution(kappa: float, lam: float, cls: NodalClass,
                   grid_points: int = GRID_POINTS,
                   root_tol: float = timemap.ROOT_TOL,
                   quad_tol: float = timemap.DEFAULT_ABS_TOL) -> NodalSolution:
    """Solve for the amplitude at ``lam`` and assemble the S_n^nu solution."""
    kt, lt = rescale(kappa, lam, cls.n)
    xi = timemap.solve_amplitude(Regime(kt), lt, 0.5, root_tol=root_tol,
                                 quad_tol=quad_tol)
    hump = build_hump(kappa, lam, cls.n, xi, grid_points)
    positive = assemble_nodal(hump, NodalClass(cls.n, 1))
    if cls.nu > 0:
        return positive
    return negate(positive)


def negate(sol: NodalSolution) -> NodalSolution:
    u = -sol.u
    u.flags.writeable = False
    return NodalSolution(cls=NodalClass(sol.cls.n, -sol.cls.nu), lam=sol.lam,
                         kappa=sol.kappa, x=sol.x, u=u, zeros=sol.zeros,
                         sup_norm=sol.sup_norm, boundary_slope=-sol.boundary_slope,
                         hump=sol.hump)


# --------------------------------------------------------------------------
# Branches

@dataclass(frozen=True)
class BranchPoint:
    lam: float
    xi: float
    b: float


@dataclass(frozen=True)
class Branch:
    kappa: float
    cls: NodalClass
    points: tuple
    failures: tuple = ()

    @property
    def regime(self) -> Regime:
        return Regime(self.kappa)

    def violations(self) -> list[str]:
        out = []
        pts = self.points
        if any(p.xi >= q.xi for p, q in zip(pts, pts[1:])):
            out.append("points are not ordered by increasing xi")
        if self.kappa < 0 and any(p.lam >= q.lam for p, q in zip(pts, pts[1:])):
            out.append("lambda is not strictly increasing in xi")
        by_lam = sorted(pts, key=lambda p: p.lam)
        pairs = list(zip(by_lam, by_lam[1:]))
        if self.kappa > 0 and any(p.b <= q.b for p, q in pairs):
            out.append("u'(0) is not strictly decreasing in lambda")
        if self.kappa < 0 and any(p.b >= q.b for p, q in pairs):
            out.append("u'(0) is not strictly increasing in lambda")
        return out


def branch_point(kappa: float, n: int, xi: float,
                 root_tol: float = timemap.ROOT_TOL,
                 quad_tol: float = timemap.DEFAULT_ABS_TOL) -> BranchPoint:
    kt, _ = rescale(kappa, 1.0, n)
    lt = timemap.lambda_of_xi(Regime(kt), xi, 0.5, root_tol=root_tol,
                              quad_tol=quad_tol)
    # u(x) = v(n x) so u'(0) = n v'(0).
    b = n * shooting.slope_from_amplitude(kt, lt, xi)
    return BranchPoint(lam=n * n * lt, xi=float(xi), b=b)


def trace_branch(kappa: float, cls: NodalClass, xi_grid,
                 threads: int = 1, root_tol: float = timemap.ROOT_TOL,
                 quad_tol: float = timemap.DEFAULT_ABS_TOL,
                 check: bool = True) -> Branch:
    """Branch points (lam(xi), xi, |u'(0)|) over an increasing xi-grid.

    Grid points with no solution are recorded in ``Branch.failures``.
    With ``check`` the monotonicity invariants are enforced.
    """
    xs = [float(x) for x in xi_grid]
    if any(a >= b for a, b in zip(xs, xs[1:])):
        raise InvalidInput("xi_grid must be strictly increasing")

    def one(xi):
        try:
            return branch_point(kappa, cls.n, xi, root_tol, quad_tol)
        except CurvSpecError as exc:
            log.info("branch point xi=%r skipped: %s", xi, exc)
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, xs))
    else:
        results = [one(x) for x in xs]
    points = tuple(r for r in results if isinstance(r, BranchPoint))
    failures = tuple((x, str(r)) for x, r in zip(xs, results)
                     if not isinstance(r, BranchPoint))
    branch = Branch(kappa=float(kappa), cls=cls, points=points, failures=failures)
    if check:
        bad = branch.violations()
        if bad:
            raise InvariantViolation("; ".join(bad))
    return branch


# --------------------------------------------------------------------------
# Asymptotic trends

def _claim(name, passed, **detail):
    return {"claim": name, "passed": bool(passed), **detail}


def asymptote_check(kappa: float, n: int) -> dict:
    """Check the limiting behaviour of the branch at its far end.

    Euclidean: as xi -> 1/(2 n B sqrt(kappa)), lam decreases monotonically to
    8 n^2 B^2 while u'(0) grows. Minkowski: at lam = 1e3, 1e4, 1e5 the
    sup-norm increases but stays below 1/(2 n sqrt(-kappa)) and u'(0)
    increases toward 1/sqrt(-kappa).
    """
    claims = []
    if kappa > 0:
        B = timemap.compute_B()
        xi_lim = 1.0 / (2 * n * B * math.sqrt(kappa))
        lam_lim = 8 * n * n * B * B
        xis = [(1 - 10.0 ** -k) * xi_lim for k in range(1, 5)]
        pts = [branch_point(kappa, n, x) for x in xis]
        lams = [p.lam for p in pts]
        claims.append(_claim("lambda decreasing as xi -> xi_limit",
                             all(a > b for a, b in zip(lams, lams[1:])),
                             xi=xis, lam=lams))
        claims.append(_claim("lambda -> 8 n^2 B^2", abs(lams[-1] - lam_lim) < 1e-2,
                             lam_limit=lam_lim, gap=lams[-1] - lam_lim))
        bs = [p.b for p in pts]
        claims.append(_claim("u'(0) increasing toward infinity",
                             all(a < b for a, b in zip(bs, bs[1:])), b=bs))
        claims.append(_claim("xi limit", True, xi_limit=xi_lim))
    else:
        bound = 1.0 / (2 * n * math.sqrt(-kappa))
        slope_lim = 1.0 / math.sqrt(-kappa)
        lams = [1e3, 1e4, 1e5]
        kt_lt = [rescale(kappa, lam, n) for lam in lams]
        xis = [timemap.solve_amplitude(Regime(kt), lt) for kt, lt in kt_lt]
        bs = [n * shooting.slope_from_amplitude(kt, lt, x)
              for (kt, lt), x in zip(kt_lt, xis)]
        claims.append(_claim("sup-norm below 1/(2 n sqrt(-kappa))",
                             all(x < bound for x in xis), sup_norm=xis, bound=bound))
        claims.append(_claim("sup-norm increasing in lambda",
                             all(a < b for a, b in zip(xis, xis[1:])), lam=lams))
        claims.append(_claim("u'(0) increasing in lambda",
                             all(a < b for a, b in zip(bs, bs[1:])), b=bs))
        claims.append(_claim("u'(0) at lambda=1e5 in (0.99, 1) / sqrt(-kappa)",
                             0.99 * slope_lim < bs[-1] < slope_lim,
                             slope_limit=slope_lim))
    return {"kappa": kappa, "n": n, "claims": claims,
            "passed": all(c["passed"] for c in claims)}
