"""Python bindings for the chemoflux spectral chemotaxis solver.

Fields are N x N float64 arrays indexed [iy, ix]; every function takes the
torus side length L alongside them.
"""

from ._chemoflux import (
    Scheme,
    apply_config,
    assemble_ut,
    c_step,
    compute_eta0,
    curl2d,
    curl_flux_residual,
    divergence,
    effective_flux,
    fit_decay,
    flux_divergence_residual,
    forward_transform,
    gradient,
    helmholtz_solve,
    initial_data,
    laplacian,
    lp_norm,
    mollify,
    project_curl_free,
    run_config,
    run_study,
    step_original,
    step_transformed,
)

__all__ = [
    "Scheme",
    "apply_config",
    "assemble_ut",
    "c_step",
    "compute_eta0",
    "curl2d",
    "curl_flux_residual",
    "divergence",
    "effective_flux",
    "fit_decay",
    "flux_divergence_residual",
    "forward_transform",
    "gradient",
    "helmholtz_solve",
    "initial_data",
    "laplacian",
    "lp_norm",
    "mollify",
    "project_curl_free",
    "run_config",
    "run_study",
    "step_original",
    "step_transformed",
]
