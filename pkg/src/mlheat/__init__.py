"""Semi-analytical solver for the heat equation in piecewise-constant media.

The core is a Laplace-domain solve of the layered Green's function (a
tridiagonal system per inversion node, inverted by Gaver-Stehfest),
backed by Jacobi-theta special functions, an analytic uniform-strip
reference, a Crank-Nicolson finite-difference reference, a Volterra
solver for moving boundaries, and changes of variables mapping pricing
PDEs (Dupire, Black-Karasinski, Verhulst) onto the heat equation.
"""

from .analytic import StripProblem, strip_green
from .errors import ConfigError, NumericalError
from .fd import FdGrid, fd_solve
from .laplace import (StehfestScheme, forward_laplace_numeric, invert_laplace,
                      stehfest_weights)
from .layered import (GreensProblem, LayeredMedium, SolutionField,
                      TridiagonalSystem, assemble_system, boundary_values,
                      greens_function, laplace_field, locate_source_layer,
                      solve_tridiagonal)
from .special_functions import eta_kernel, theta3, theta3_dz, theta3_dzz
from .transforms import (Curve, DivergentChart, HeatChart, TermStructure,
                         bk_affine_zcb, bk_layer_chart, dupire_to_heat,
                         nondivergent_to_divergent, verhulst_chart)
from .volterra import (GitKernels, GitLayerProblem, GradientPair,
                       PolynomialBoundarySet, build_internal_boundaries,
                       check_refinement, git_field_single_layer,
                       git_kernel_set, solve_volterra_single_layer)

__all__ = [
    "ConfigError", "NumericalError",
    "theta3", "theta3_dz", "theta3_dzz", "eta_kernel",
    "StehfestScheme", "stehfest_weights", "invert_laplace",
    "forward_laplace_numeric",
    "LayeredMedium", "GreensProblem", "TridiagonalSystem", "SolutionField",
    "locate_source_layer", "assemble_system", "solve_tridiagonal",
    "laplace_field", "boundary_values", "greens_function",
    "StripProblem", "strip_green",
    "FdGrid", "fd_solve",
    "PolynomialBoundarySet", "GitLayerProblem", "GradientPair", "GitKernels",
    "build_internal_boundaries", "git_kernel_set",
    "solve_volterra_single_layer", "git_field_single_layer", "check_refinement",
    "Curve", "TermStructure", "HeatChart", "DivergentChart",
    "dupire_to_heat", "bk_layer_chart", "bk_affine_zcb", "verhulst_chart",
    "nondivergent_to_divergent",
]

__version__ = "1.0.0"
