"""Minimum-power slip gaits of rigid microswimmers in Stokes flow.

Given a star-shaped rigid body, the package solves the boundary-integral
auxiliary problems that reduce the infinite-dimensional power-loss
minimization over tangential slip velocities to a 6x6 algebraic problem,
then finds the globally optimal swimming motion (direction, spin, drift)
and its helical trajectory.
"""

from .axisym import AxisymGait, axisym_optimize, cross_check_general
from .bie import SolverError, assemble_operators, solve_dirichlet, solve_mixed
from .grid import build_grid, surface_scalar_product
from .optimizer import (OptimalGait, global_minimize, partial_minimize,
                        rotationless_optimal, spinning_straight)
from .reduction import (GaitSystem, build_gait_system, efficiency,
                        perfect_slip_resistance, power_from_alpha)
from .rigid_body import (ResolutionError, RigidSystem, assemble_rigid_system,
                         drag_power, power_loss_direct, swim_velocity)
from .shapes import (ShapeError, ShapeSpec, chiral_helical_shape, sphere,
                     tilted_dumbbell, wavy_validation_shape)
from .symmetry import (SymmetryReport, build_symmetry_report,
                       check_prop_symmetry_consequences,
                       detect_shape_symmetry, verify_matrix_pattern)
from .trajectory import (HelixGeometry, analytic_helix, helix_geometry,
                         integrate_path, net_velocity)

__version__ = "1.0.0"

__all__ = [
    "AxisymGait", "axisym_optimize", "cross_check_general",
    "SolverError", "assemble_operators", "solve_dirichlet", "solve_mixed",
    "build_grid", "surface_scalar_product",
    "OptimalGait", "global_minimize", "partial_minimize",
    "rotationless_optimal", "spinning_straight",
    "GaitSystem", "build_gait_system", "efficiency",
    "perfect_slip_resistance", "power_from_alpha",
    "ResolutionError", "RigidSystem", "assemble_rigid_system",
    "drag_power", "power_loss_direct", "swim_velocity",
    "ShapeError", "ShapeSpec", "chiral_helical_shape", "sphere",
    "tilted_dumbbell", "wavy_validation_shape",
    "SymmetryReport", "build_symmetry_report",
    "check_prop_symmetry_consequences", "detect_shape_symmetry",
    "verify_matrix_pattern",
    "HelixGeometry", "analytic_helix", "helix_geometry",
    "integrate_path", "net_velocity",
]
