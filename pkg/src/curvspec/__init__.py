"""Sign-changing solutions of -(u'/sqrt(1 + kappa u'^2))' = lam u, u(0) = u(1) = 0."""

__version__ = "0.1.0"

from .errors import (ConstraintViolation, CurvSpecError, DegenerateZero,  # noqa: E402
                     DomainViolation, GradientBlowup, InvalidInput,
                     InvariantViolation, MultipleRoots, NonConvergence,
                     NoSolution, NotASolution, StepUnderflow)
from .quadrature import QuadratureResult, SingularityFlags, integrate  # noqa: E402
from .shooting import (Trajectory, energy, find_zeros, integrate_ivp,  # noqa: E402
                       slope_from_amplitude)
from .spectrum import (Branch, BranchPoint, HumpProfile, NodalClass,  # noqa: E402
                       NodalSolution, assemble_nodal, asymptote_check,
                       build_hump, nodal_solution, rescale, spectrum_interval,
                       trace_branch)
from .timemap import (Regime, TimeMapEval, compute_B, lambda_of_xi,  # noqa: E402
                      solve_amplitude, time_map, time_map_derivative_xi)
