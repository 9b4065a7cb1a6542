"""Time map of the one-hump problem and the root solves built on it.

For a symmetric positive hump of amplitude ``xi`` the first integral gives
the slope as a function of height, and the half-width of the hump is

    J(lam, xi) = sqrt(|kappa|) * int_0^1 xi / sqrt(|1 - c(theta)^-2|) dtheta,
    c(theta)   = 1 - lam * (kappa / 2) * xi**2 * (1 - theta**2).

Writing s = 1 - c and factoring c^2 - 1 = -s (2 - s) gives the equivalent
form used for evaluation,

    J(lam, xi) = lam**-0.5 * int_0^1 (1 - s) / sqrt((1 - theta**2) (1 - s/2)) dtheta,

valid for both signs of kappa. It has no cancellation as xi -> 0 (where the
raw form loses half the working digits) and stays regular at the Euclidean
boundary xi = sqrt(2 / (lam kappa)), where it reduces to B * sqrt(2 / lam).
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quadrature
from .errors import (DomainViolation, InvalidInput, MultipleRoots,
                     NonConvergence, NoSolution)
from .quadrature import DEFAULT_ABS_TOL, DEFAULT_REL_TOL

ROOT_TOL = 1e-10
SCAN_POINTS = 512
LAMBDA_BUDGET = 1e6
# Fraction of the Euclidean amplitude bound used as the last scan node.
EUCLIDEAN_EDGE = 1.0 - 1e-8


class Kind(enum.Enum):
    EUCLIDEAN = "euclidean"
    MINKOWSKI = "minkowski"


@dataclass(frozen=True)
class Regime:
    """Curvature regime; the kind is fixed by the sign of ``kappa``."""

    kappa: float

    def __post_init__(self):
        k = float(self.kappa)
        if not math.isfinite(k) or k == 0.0:
            raise InvalidInput(f"kappa must be finite and nonzero, got {self.kappa!r}")
        object.__setattr__(self, "kappa", k)

    @classmethod
    def of(cls, value: "Regime | float") -> "Regime":
        return value if isinstance(value, Regime) else cls(value)

    @property
    def kind(self) -> Kind:
        return Kind.EUCLIDEAN if self.kappa > 0 else Kind.MINKOWSKI

    @property
    def is_euclidean(self) -> bool:
        return self.kappa > 0

    def xi_max(self, lam: float) -> float:
        """Supremum of admissible amplitudes at ``lam`` (inf for Minkowski)."""
        if self.kappa < 0:
            return math.inf
        return math.sqrt(2.0 / (lam * self.kappa))


@dataclass(frozen=True)
class TimeMapEval:
    lam: float
    xi: float
    value: float
    error_estimate: float


# --------------------------------------------------------------------------
# The constant B

_B_LOCK = threading.Lock()
_B_RESULT: quadrature.QuadratureResult | None = None


def _b_integrand(theta, comp):
    # 1/sqrt(theta^-4 - 1) written as theta^2 / sqrt((1 - theta^2)(1 + theta^2))
    t2 = theta * theta
    return t2 / np.sqrt(comp * (1.0 + theta) * (1.0 + t2))


def b_quadrature() -> quadrature.QuadratureResult:
    """Quadrature result for B, computed once and cached."""
    global _B_RESULT
    if _B_RESULT is None:
        with _B_LOCK:
            if _B_RESULT is None:
                _B_RESULT = quadrature.integrate(_b_integrand, quadrature.RIGHT,
                                                 abs_tol=1e-14, rel_tol=1e-14,
                                                 complement=True)
    return _B_RESULT


def compute_B() -> float:
    """B = int_0^1 dtheta / sqrt(theta^-4 - 1)."""
    return b_quadrature().value


# --------------------------------------------------------------------------
# Time map

def _check_point(regime: Regime, lam: float, xi: float) -> None:
    if not (lam > 0 and math.isfinite(lam)):
        raise InvalidInput(f"lambda must be positive, got {lam!r}")
    if not (xi > 0 and math.isfinite(xi)):
        raise InvalidInput(f"xi must be positive, got {xi!r}")
    if regime.is_euclidean and xi >= regime.xi_max(lam):
        raise DomainViolation(
            f"Euclidean amplitude xi={xi!r} >= sqrt(2/(lambda*kappa))="
            f"{regime.xi_max(lam)!r}")


def _integrand(kappa: float, lam: float, xi: float) -> Callable:
    half_s0 = 0.25 * lam * kappa * xi * xi   # s/2 at theta = 0

    def f(theta, comp):
        one_m_t2 = comp * (1.0 + theta)
        hs = half_s0 * one_m_t2
        return (1.0 - 2.0 * hs) / np.sqrt(one_m_t2 * (1.0 - hs))
    return f


def _j(kappa: float, lam: float, xi: float,
       abs_tol: float = DEFAULT_ABS_TOL, rel_tol: float = DEFAULT_REL_TOL):
    """Unchecked J; accepts xi = 0 (the linear limit pi / (2 sqrt(lam)))."""
    res = quadrature.integrate(_integrand(kappa, lam, xi), quadrature.RIGHT,
                               abs_tol=abs_tol, rel_tol=rel_tol, complement=True)
    scale = 1.0 / math.sqrt(lam)
    return res.value * scale, res.error_estimate * scale


def time_map(regime: Regime | float, lam: float, xi: float,
             abs_tol: float = DEFAULT_ABS_TOL,
             rel_tol: float = DEFAULT_REL_TOL) -> TimeMapEval:
    """Half-width J(lam, xi) of the symmetric hump with amplitude ``xi``."""
    regime = Regime.of(regime)
    _check_point(regime, lam, xi)
    value, err = _j(regime.kappa, lam, xi, abs_tol, rel_tol)
    return TimeMapEval(lam, xi, value, err)


def time_map_raw(regime: Regime | float, lam: float, xi: float,
                 abs_tol: float = DEFAULT_ABS_TOL,
                 rel_tol: float = DEFAULT_REL_TOL) -> TimeMapEval:
    """J from the unsimplified integrand sqrt|k| xi / sqrt(|1 - c^-2|).

    Kept as an independent route for cross-checks; loses accuracy for small
    ``lam * kappa * xi**2`` because of the cancellation in 1 - c^-2.
    """
    regime = Regime.of(regime)
    _check_point(regime, lam, xi)
    k = regime.kappa
    sk = math.sqrt(abs(k))

    def f(theta, comp):
        c = 1.0 - lam * (k / 2.0) * xi * xi * comp * (1.0 + theta)
        return sk * xi / np.sqrt(np.abs(1.0 - c ** -2))
    res = quadrature.integrate(f, quadrature.RIGHT, abs_tol=abs_tol,
                               rel_tol=rel_tol, complement=True)
    return TimeMapEval(lam, xi, res.value, res.error_estimate)


def euclidean_boundary_value(lam: float) -> float:
    """Exact J at the Euclidean amplitude bound: B * sqrt(2 / lam)."""
    return compute_B() * math.sqrt(2.0 / lam)


# --------------------------------------------------------------------------
# d J / d xi  (Minkowski)

def time_map_derivative_xi(regime: Regime | float, lam: float, xi: float,
                           form: str = "printed") -> float:
    """Analytic dJ/dxi in the Minkowski regime, alpha = 1 / c(theta).

    ``form="printed"`` evaluates

        2 sqrt(-k) int_0^1 (1 - alpha^2)^{3/2} (1 - alpha)^2 (alpha + 1/2) dtheta

    exactly as published. Differentiating J under the integral sign gives
    the same expression with (1 - alpha^2)^{-3/2}; ``form="rederived"``
    evaluates that version, which matches finite differences of
    :func:`time_map`. Both are positive for xi > 0.
    """
    regime = Regime.of(regime)
    if regime.kappa >= 0:
        raise DomainViolation("dJ/dxi formula applies to the Minkowski regime only")
    _check_point(regime, lam, xi)
    k = regime.kappa
    s0 = 0.5 * lam * k * xi * xi     # s at theta = 0, negative

    if form == "printed":
        def f(theta):
            s = s0 * (1.0 - theta * theta)
            alpha = 1.0 / (1.0 - s)
            one_m_a = -s * alpha
            one_m_a2 = one_m_a * (1.0 + alpha)
            return one_m_a2 ** 1.5 * one_m_a ** 2 * (alpha + 0.5)
    elif form == "rederived":
        def f(theta):
            s = s0 * (1.0 - theta * theta)
            alpha = 1.0 / (1.0 - s)
            one_m_a = -s * alpha
            return np.sqrt(one_m_a) * (alpha + 0.5) / (1.0 + alpha) ** 1.5
    else:
        raise InvalidInput(f"unknown form {form!r}")
    res = quadrature.integrate(f, quadrature.NONE)
    return 2.0 * math.sqrt(-k) * res.value


def time_map_derivative_fd(regime: Regime | float, lam: float, xi: float,
                           h: float = 1e-6) -> float:
    """Central finite difference of J in xi."""
    regime = Regime.of(regime)
    _check_point(regime, lam, xi + h)
    _check_point(regime, lam, xi - h)
    jp, _ = _j(regime.kappa, lam, xi + h, 1e-15, 1e-15)
    jm, _ = _j(regime.kappa, lam, xi - h, 1e-15, 1e-15)
    return (jp - jm) / (2.0 * h)


# --------------------------------------------------------------------------
# Root finding

def bracketed_root(F: Callable[[float], float], a: float, b: float,
                   fa: float, fb: float, ftol: float = ROOT_TOL,
                   max_iter: int = 200) -> tuple[float, float]:
    """Root of F in [a, b] with fa * fb < 0, by false position with
    Illinois weighting, falling back to bisection whenever two consecutive
    steps fail to halve the bracket.

    Returns (x, F(x)); stops once |F(x)| <= ftol. If the bracket collapses
    to rounding level first, the better end is returned and the caller
    decides whether its residual is acceptable.
    """
    if fa == 0.0:
        return a, fa
    if fb == 0.0:
        return b, fb
    if fa * fb > 0:
        raise InvalidInput("root not bracketed")
    side = 0
    width_hist = [abs(b - a)] * 2
    for _ in range(max_iter):
        if abs(b - a) <= 4.0 * np.finfo(float).eps * max(abs(a), abs(b)):
            break
        x = b - fb * (b - a) / (fb - fa)
        if not (min(a, b) < x < max(a, b)) or abs(b - a) > 0.5 * width_hist[0]:
            x = 0.5 * (a + b)
        fx = F(x)
        if abs(fx) <= ftol:
            return x, fx
        width_hist = [width_hist[1], abs(b - a)]
        if fx * fb < 0:
            a, fa = b, fb
            b, fb = x, fx
            side = 0
        else:
            b, fb = x, fx
            if side == 1:
                fa *= 0.5
            side = 1
    # fa may carry Illinois weighting, so re-derive the better end from b only.
    return b, fb


def _sign(v: float) -> int:
    return int(v > 0) - int(v < 0)


def amplitude_scan(regime: Regime | float, lam: float, target: float = 0.5,
                   scan_points: int = SCAN_POINTS,
                   quad_tol: float = DEFAULT_ABS_TOL):
    """Sample J - target on a uniform xi-grid over the admissible range.

    Returns (xi_grid, values). The grid starts at xi = 0 (the linear limit
    pi / (2 sqrt(lam))). The upper end is the Euclidean amplitude bound
    (last node pulled in by 1e-8 relative), or target / sqrt(-kappa) for
    Minkowski, beyond which J > target since the integrand exceeds
    sqrt(-kappa) xi.
    """
    regime = Regime.of(regime)
    if regime.is_euclidean:
        xi_hi = regime.xi_max(lam)
    else:
        xi_hi = target / math.sqrt(-regime.kappa)
    xs = xi_hi * np.arange(scan_points + 1) / scan_points
    if regime.is_euclidean:
        xs[-1] = EUCLIDEAN_EDGE * xi_hi
    vals = np.array([_j(regime.kappa, lam, float(x), quad_tol, quad_tol)[0]
                     for x in xs]) - target
    return xs, vals


def sign_changes(vals) -> list[int]:
    """Indices i where vals changes sign on [i, i+1], or vanishes at i > 0."""
    signs = np.sign(vals)
    out = [i for i in range(len(signs) - 1) if signs[i] * signs[i + 1] < 0]
    out += [i for i in range(1, len(signs)) if signs[i] == 0]
    return sorted(out)


def solve_amplitude(regime: Regime | float, lam: float,
                    half_width_target: float = 0.5,
                    root_tol: float = ROOT_TOL,
                    scan_points: int = SCAN_POINTS,
                    scan=None,
                    quad_tol: float = DEFAULT_ABS_TOL) -> float:
    """Amplitude xi with J(lam, xi) = half_width_target.

    A ``scan_points`` uniform scan brackets every sign change; more than one
    bracket raises :class:`MultipleRoots`, none raises :class:`NoSolution`.
    The single bracket is refined by :func:`bracketed_root`. A result of
    :func:`amplitude_scan` for the same arguments may be passed as ``scan``.
    """
    regime = Regime.of(regime)
    if not (lam > 0 and math.isfinite(lam)):
        raise InvalidInput(f"lambda must be positive, got {lam!r}")
    if not half_width_target > 0:
        raise InvalidInput("target must be positive")
    target = half_width_target
    if scan is None:
        scan = amplitude_scan(regime, lam, target, scan_points, quad_tol)
    xs, vals = scan
    signs = np.sign(vals)
    brackets = sign_changes(vals)
    if not brackets:
        raise NoSolution(
            f"J(lambda={lam!r}, xi) - {target} keeps sign "
            f"{_sign(vals[0]):+d} on the admissible amplitude range",
            {"sign_at_xi_min": _sign(vals[0]), "sign_at_xi_max": _sign(vals[-1]),
             "xi_max": float(xs[-1])})
    if len(brackets) > 1:
        raise MultipleRoots(
            f"{len(brackets)} sign changes of J(lambda={lam!r}, xi) - {target}",
            [(float(xs[i]), float(xs[i + 1])) for i in brackets if i + 1 < len(xs)])
    i = brackets[0]
    if signs[i] == 0:
        return float(xs[i])

    def F(x):
        return _j(regime.kappa, lam, x, quad_tol, quad_tol)[0] - target
    if i == 0:
        # xi = 0 is not an admissible amplitude; it only anchors the sign.
        a, fa = float(xs[0]), float(vals[0])
    else:
        a, fa = float(xs[i]), float(vals[i])
    x, fx = bracketed_root(F, a, float(xs[i + 1]), fa, float(vals[i + 1]),
                           ftol=min(root_tol, 1e-13))
    if abs(fx) > root_tol or x <= 0:
        raise NonConvergence(f"amplitude residual {fx:.3e} exceeds {root_tol:.1e}")
    return x


def lambda_of_xi(regime: Regime | float, xi: float,
                 half_width_target: float = 0.5,
                 root_tol: float = ROOT_TOL,
                 lam_budget: float = LAMBDA_BUDGET,
                 quad_tol: float = DEFAULT_ABS_TOL) -> float:
    """The unique lam with J(lam, xi) = half_width_target.

    J decreases strictly in lam and blows up as lam -> 0. In the Euclidean
    regime lam is capped by 2 / (kappa xi^2), where J equals
    B xi sqrt(kappa) exactly; no root exists once that exceeds the target.
    """
    regime = Regime.of(regime)
    if not (xi > 0 and math.isfinite(xi)):
        raise InvalidInput(f"xi must be positive, got {xi!r}")
    if not half_width_target > 0:
        raise InvalidInput("target must be positive")
    target = half_width_target
    k = regime.kappa

    def F(lam):
        return _j(k, lam, xi, quad_tol, quad_tol)[0] - target

    if regime.is_euclidean:
        lam_edge = 2.0 / (k * xi * xi)
        if lam_edge <= lam_budget:
            hi = lam_edge
            f_hi = compute_B() * xi * math.sqrt(k) - target
        else:
            hi = lam_budget
            f_hi = F(hi)
        if f_hi >= 0:
            raise NoSolution(
                f"J(lambda, xi={xi!r}) stays above {target} up to lambda={hi!r}",
                {"sign_at_lambda_max": _sign(f_hi), "lambda_max": hi})
    else:
        hi = min(1.0, lam_budget)
        f_hi = F(hi)
        while f_hi >= 0 and hi < lam_budget:
            hi = min(4.0 * hi, lam_budget)
            f_hi = F(hi)
        if f_hi >= 0:
            raise NoSolution(
                f"J(lambda, xi={xi!r}) stays above {target} up to budget {lam_budget!r}",
                {"sign_at_lambda_max": _sign(f_hi), "lambda_max": hi})

    lo = 0.5 * hi
    f_lo = F(lo)
    for _ in range(2000):
        if f_lo > 0:
            break
        hi, f_hi = lo, f_lo
        lo *= 0.25
        f_lo = F(lo)
    else:
        raise NonConvergence("failed to bracket lambda from below")
    x, fx = bracketed_root(F, lo, hi, f_lo, f_hi, ftol=min(root_tol, 1e-13))
    if abs(fx) > root_tol:
        raise NonConvergence(f"lambda residual {fx:.3e} exceeds {root_tol:.1e}")
    return x
