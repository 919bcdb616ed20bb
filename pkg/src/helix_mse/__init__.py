"""Helicoidal reduction of the minimal surface equation.

Quotient geometry of screw-motion groups, closed-form barriers, a damped
Newton solver for the reduced quasilinear drift equation on truncated
exterior domains, and drivers for the two existence constructions
(gradient-budget family, height-prescribed solution) with machine-checkable
certificates.
"""

from helix_mse.groups import (
    GroupSpec,
    MetricSample,
    group_action,
    helicoidal_projection,
    orbit_mean_curvature,
    sup_orbit_curvature,
    quotient_metric,
    horizontal_lift,
    drift_field,
    oneill_curvature_check,
)
from helix_mse.closed_forms import (
    BarrierSpec,
    CatenoidProfile,
    PerronSubsolution,
    barrier_constant,
    catenoid_eval,
    catenoid_height,
    collar_barrier,
    collar_barrier_spec,
    height_cap,
    perron_subsolution,
    solve_varsigma,
)
from helix_mse.domains import DomainSpec, exterior_ball, figure1_circle, custom_obstacle
from helix_mse.grids import GridSpec, Grid, GridField, build_grid
from helix_mse.solver import (
    SolveReport,
    SolverConfig,
    radial_solve,
    reduced_operator_residual,
    solve_dirichlet,
    sup_gradient,
)
from helix_mse.distance import distance_field, distance_grid
from helix_mse.drivers import (
    Certificate,
    FamilyConfig,
    FamilyReport,
    HeightCapError,
    PerronReport,
    certify_barriers,
    gradient_constrained_family,
    gradient_decay_check,
    height_prescribed_solution,
)
from helix_mse.ambient import AmbientReport, lift_and_verify

__version__ = "0.1.0"
