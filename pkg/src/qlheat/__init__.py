"""Quasilinear heat conduction with a finite-speed heat front.

Modules:
    flux_law     constitutive relations (modified flux, effective diffusivity)
    similarity   self-similar ODE, its integration and the front location
    pde_solver   explicit solvers for the quasilinear, linear and gradient forms
    analysis     symmetry checks, linear analytic oracle, cross-validation
    cli          scenario files to CSV
"""
from .flux_law import (PhysParams, effective_diffusivity, flux_gap, linear_flux,
                       modified_flux)
from .similarity import (FrontInfo, IntegrationOptions, SimilarityProfile,
                         front_position, front_velocity, integrate_profile,
                         locate_front, ode_rhs)
from .pde_solver import (BoundarySpec, Field, GradientBC, Grid1D, Regime,
                         SolveReport, classify_regime, gradient_of,
                         solve_gradient_form, solve_linear, solve_quasilinear,
                         step_gradient_form, step_linear, step_quasilinear)
from .analysis import (GroupElement, cross_validate, discrete_residual,
                       linear_oracle, symmetry_residual, transform_point)

__version__ = "0.1.0"
