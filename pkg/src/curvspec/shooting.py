"""Initial value problem u'' = -lam u (1 + kappa u'^2)^{3/2}, u(0) = 0, u'(0) = b.

This is the independent check on the time-map construction: an adaptive
Dormand-Prince 5(4) integrator with PI step control, a dense interpolant,
zero location, and the first integral

    E = lam (kappa/2) u^2 - 1 / sqrt(1 + kappa v^2),

which is constant along exact trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConstraintViolation, DegenerateZero, DomainViolation,
                     GradientBlowup, InvalidInput, StepUnderflow)

STEP_TOL = 1e-11
GRADIENT_CAP = 1e6
MINKOWSKI_MARGIN = 1e-12
ZERO_TOL = 1e-12
DEGENERATE_TOL = 1e-10

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
       187 / 2100, 1 / 40)
_E = tuple(p - q for p, q in zip(_B5, _B4))


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of one shooting run.

    ``a`` holds u'' at each sample, so the piecewise quintic Hermite
    interpolant through (u, v, a) is available as dense output.
    """

    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    a: np.ndarray
    lam: float
    kappa: float
    b: float

    @property
    def samples(self):
        return list(zip(self.x.tolist(), self.u.tolist(), self.v.tolist()))

    def evaluate(self, xq):
        """Dense output (u, v) at points ``xq`` inside [0, x[-1]]."""
        xq = np.asarray(xq, dtype=float)
        if np.any(xq < self.x[0]) or np.any(xq > self.x[-1]):
            raise InvalidInput("evaluation point outside the trajectory")
        i = np.clip(np.searchsorted(self.x, xq, side="right") - 1, 0, self.x.size - 2)
        return _hermite5(self.x[i], self.x[i + 1], self.u[i], self.u[i + 1],
                         self.v[i], self.v[i + 1], self.a[i], self.a[i + 1], xq)

    def energy_drift(self) -> float:
        e = energy(self.kappa, self.lam, self.u, self.v)
        return float(np.max(np.abs(e - e[0])))


def _hermite5(x0, x1, u0, u1, v0, v1, a0, a1, xq):
    h = x1 - x0
    t = (xq - x0) / h
    t2, t3 = t * t, t * t * t
    # Quintic Hermite basis and its derivative in t.
    h00 = 1 - 10 * t3 + 15 * t3 * t - 6 * t3 * t2
    h01 = 10 * t3 - 15 * t3 * t + 6 * t3 * t2
    h10 = t - 6 * t3 + 8 * t3 * t - 3 * t3 * t2
    h11 = -4 * t3 + 7 * t3 * t - 3 * t3 * t2
    h20 = 0.5 * (t2 - 3 * t3 + 3 * t3 * t - t3 * t2)
    h21 = 0.5 * (t3 - 2 * t3 * t + t3 * t2)
    d00 = -30 * t2 + 60 * t3 - 30 * t3 * t
    d10 = 1 - 18 * t2 + 32 * t3 - 15 * t3 * t
    d11 = -12 * t2 + 28 * t3 - 15 * t3 * t
    d20 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t3 * t)
    d21 = 0.5 * (3 * t2 - 8 * t3 + 5 * t3 * t)
    u = (h00 * u0 + h01 * u1 + h * (h10 * v0 + h11 * v1)
         + h * h * (h20 * a0 + h21 * a1))
    v = (d00 * (u0 - u1)) / h + d10 * v0 + d11 * v1 + h * (d20 * a0 + d21 * a1)
    return u, v


def energy(kappa: float, lam: float, u, v):
    """First integral lam (kappa/2) u^2 - (1 + kappa v^2)^{-1/2}."""
    q = 1.0 + kappa * np.square(v)
    if np.any(q <= 0):
        raise DomainViolation("1 + kappa v^2 must be positive")
    e = lam * 0.5 * kappa * np.square(u) - 1.0 / np.sqrt(q)
    return float(e) if np.ndim(e) == 0 else e


def slope_from_amplitude(kappa: float, lam: float, xi: float) -> float:
    """Initial slope b >= 0 of the trajectory whose hump has height ``xi``.

    Energy balance between (u, v) = (0, b) and (xi, 0) gives
    b^2 = (c^-2 - 1) / kappa with c = 1 - lam (kappa/2) xi^2, evaluated as
    lam xi^2 (1 - s/2) / c^2 with s = 1 - c to avoid cancellation.
    """
    if kappa == 0 or not lam > 0:
        raise InvalidInput("need kappa != 0 and lam > 0")
    if xi < 0:
        raise InvalidInput("amplitude must be nonnegative")
    s = 0.5 * lam * kappa * xi * xi
    c = 1.0 - s
    if c <= 0:
        raise DomainViolation(
            f"Euclidean amplitude xi={xi!r} is beyond sqrt(2/(lam kappa))")
    return xi * math.sqrt(lam * (1.0 - 0.5 * s)) / c


def _rhs(lam, kappa, u, v):
    q = 1.0 + kappa * v * v
    if q <= 0.0:
        return math.nan
    return -lam * u * q * math.sqrt(q)


def integrate_ivp(kappa: float, lam: float, b: float, x_end: float = 1.0,
                  step_tol: float = STEP_TOL, gradient_cap: float = GRADIENT_CAP,
                  max_step: float | None = None,
                  max_steps: int = 1_000_000) -> Trajectory:
    """Integrate from (0, 0, b) to ``x_end`` with local error <= step_tol.

    The error test is mixed absolute/relative with both weights equal to
    ``step_tol``. Stages that leave the Minkowski domain 1 + kappa v^2 > 0
    are treated as rejected steps.
    """
    if kappa == 0 or not lam > 0:
        raise InvalidInput("need kappa != 0 and lam > 0")
    if not 0 < x_end <= 1:
        raise InvalidInput("x_end must lie in (0, 1]")
    if not step_tol > 0:
        raise InvalidInput("step_tol must be positive")
    v_limit = math.inf
    if kappa < 0:
        v_limit = (1.0 - MINKOWSKI_MARGIN) / math.sqrt(-kappa)
        if abs(b) >= v_limit:
            raise ConstraintViolation(f"|b|={abs(b)!r} violates |v| < 1/sqrt(-kappa)")
    max_step = x_end / 8 if max_step is None else max_step

    xs, us, vs, as_ = [0.0], [0.0], [float(b)], [0.0]
    x, u, v = 0.0, 0.0, float(b)
    a = _rhs(lam, kappa, u, v)
    if b == 0.0:
        # The zero trajectory; exact.
        return _freeze([0.0, x_end], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], lam, kappa, b)

    scale0 = max(abs(b), 1e-300)
    h = min(max_step, 0.01 * x_end, 0.1 / (math.sqrt(lam) * max(1.0, scale0)))
    err_prev = 1e-4
    for _ in range(max_steps):
        if x >= x_end:
            break
        h = min(h, x_end - x, max_step)
        if h <= 1e-14 * max(1.0, x):
            raise StepUnderflow(f"step size underflow at x={x!r}")
        ku = [v]
        kv = [a]
        ok = True
        for s in range(1, 7):
            coeffs = _A[s]
            us_ = u + h * sum(c * k for c, k in zip(coeffs, ku))
            vs_ = v + h * sum(c * k for c, k in zip(coeffs, kv))
            f = _rhs(lam, kappa, us_, vs_)
            if not math.isfinite(f):
                ok = False
                break
            ku.append(vs_)
            kv.append(f)
        if not ok:
            h *= 0.25
            continue
        u_new = u + h * sum(c * k for c, k in zip(_B5, ku))
        v_new = v + h * sum(c * k for c, k in zip(_B5, kv))
        eu = h * sum(c * k for c, k in zip(_E, ku))
        ev = h * sum(c * k for c, k in zip(_E, kv))
        err = max(abs(eu) / (step_tol * (1.0 + max(abs(u), abs(u_new)))),
                  abs(ev) / (step_tol * (1.0 + max(abs(v), abs(v_new)))))
        if err <= 1.0 and abs(v_new) < v_limit:
            x = x + h if x + h < x_end * (1 - 1e-15) else x_end
            u, v = u_new, v_new
            a = kv[-1]          # FSAL: stage 7 is f at the new point
            if kappa > 0 and abs(v) > gradient_cap:
                raise GradientBlowup(f"|u'|={abs(v):.3e} exceeds cap {gradient_cap:.1e} at x={x!r}")
            xs.append(x)
            us.append(u)
            vs.append(v)
            as_.append(a)
            fac = 0.9 * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            h *= min(5.0, max(0.2, fac))
            err_prev = max(err, 1e-4)
        elif err <= 1.0:
            # Accepted by the error test but on the light-cone bound.
            if h <= 1e-12:
                raise ConstraintViolation(
                    f"Minkowski slope reached 1/sqrt(-kappa) at x={x!r}")
            h *= 0.5
        else:
            h *= max(0.1, 0.9 * err ** (-1 / 5))
    else:
        raise StepUnderflow(f"step budget {max_steps} exhausted at x={x!r}")
    return _freeze(xs, us, vs, as_, lam, kappa, b)


def _freeze(xs, us, vs, as_, lam, kappa, b):
    arrs = [np.array(z, dtype=float) for z in (xs, us, vs, as_)]
    for z in arrs:
        z.flags.writeable = False
    return Trajectory(*arrs, lam=float(lam), kappa=float(kappa), b=float(b))


def find_zeros(traj: Trajectory, end_margin: float = 1e-6) -> list[float]:
    """Interior sign changes of u, located on the dense output to 1e-12.

    Crossings within ``end_margin`` of the final abscissa are the boundary
    zero of a (numerically) solved Dirichlet problem and are not reported.
    """
    x, u, v = traj.x, traj.u, traj.v
    deg = (np.abs(u) < DEGENERATE_TOL) & (np.abs(v) < DEGENERATE_TOL)
    if traj.b != 0.0 and np.any(deg):
        raise DegenerateZero(f"u and u' both vanish near x={x[np.argmax(deg)]!r}")
    if traj.b == 0.0:
        return []
    zeros = []
    x_last = x[-1]
    for i in range(1, x.size - 1 + 1):
        u0, u1 = u[i - 1], u[i]
        if i - 1 > 0 and u0 == 0.0:
            zeros.append(float(x[i - 1]))
            continue
        if u0 * u1 >= 0.0:
            continue
        lo, hi = x[i - 1], x[i]
        ulo = u0
        while hi - lo > ZERO_TOL:
            mid = 0.5 * (lo + hi)
            um, _ = traj.evaluate(mid)
            if um * ulo > 0:
                lo, ulo = mid, um
            else:
                hi = mid
        zeros.append(float(0.5 * (lo + hi)))
    zeros = [z for z in zeros if 0.0 < z < x_last - end_margin]
    for z in zeros:
        _, vz = traj.evaluate(z)
        if abs(vz) < DEGENERATE_TOL:
            raise DegenerateZero(f"double zero at x={z!r}")
    return zeros
