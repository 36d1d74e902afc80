"""Set-avoiding numerical optimization.

Build walls (poles, deflation products, big constants, log penalties) on a
closed avoidance set, minimize through them with descent methods that
cannot cross, and drive outer loops for lower-bound refinement, deflation,
component escape, and feasibility. A rasterizer maps basins of attraction.
"""

from .avoidance import (
    AvoidanceSet,
    BoxBoundary,
    FinitePoints,
    HyperplaneBoundary,
    RegionComplement,
    Union,
    avoidance_set_from_dict,
    constant_wall,
    equality_relaxation,
    penalty_h1,
    penalty_h2,
    pole_wall,
    product_pole_wall,
)
from .basins import Attractor, BasinGrid, LabelField, basin_stats, rasterize, write_ppm
from .drivers import (
    AvoidanceRoundLog,
    GammaState,
    avoid_iterate,
    escape_component,
    feasibility_indicator,
    feasibility_slack,
    gamma_update_loop,
)
from .functions import Objective, bessel_j1, builtin, modulus_objective, poly_example2
from .numerics import EigenDecomposition, StencilCrossesWall, fd_gradient, fd_hessian, jacobi_eigen
from .optimizers import (
    OptimizerConfig,
    Termination,
    Trace,
    armijo_with_constraints,
    backtracking_gd,
    bnqn,
    bnqn_direction,
    gradient_descent,
    projected_gd,
)

__version__ = "0.1.0"
