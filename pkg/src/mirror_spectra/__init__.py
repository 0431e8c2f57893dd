"""Arbitrary-precision spectral solver for a modular pair of Harper-type
functional difference equations and the associated self-dual Harper problem."""

__version__ = "0.1.0"

from .chi import (
    ChiPolySeq,
    chi_dual_eval,
    chi_check_eval,
    chi_eval,
    chi_mult_check,
    chi_poly_seq,
    G_eval,
)
from .eigenfunction import (
    EigenfunctionParams,
    PoleCancellationReport,
    make_params,
    pole_cancellation_check,
    psi_eval,
    psi_residual,
)
from .precision import (
    ConvergenceError,
    ModularParam,
    PoleSignal,
    PrecCtx,
    PrecisionExceeded,
    SolverError,
    make_context,
    pochhammer_q,
    theta1,
)
from .selfdual import (
    SelfDualSpectrum,
    alpha_beta,
    canonical_integral,
    composite_gl,
    gauss_legendre_nodes,
    leg_integral,
    path_funcs,
    period_integrals,
    phi_eval,
    psi_selfdual,
    quantize_selfdual,
)
from .spectral import (
    Orbit,
    SpectralPoint,
    WronskianFactorization,
    factorize,
    quantize,
    rho_extract,
    sheet_seed,
    solve_eps,
    trace_orbit,
    wronskian_eval,
    wronskian_residue,
)
from .transfer import (
    TransferMatrix,
    L_eval,
    M_n_eval,
    R_orbit,
    chi_via_Minf,
    classify_r_orbit,
)

__all__ = [
    "ChiPolySeq",
    "ConvergenceError",
    "EigenfunctionParams",
    "G_eval",
    "L_eval",
    "M_n_eval",
    "ModularParam",
    "Orbit",
    "PoleCancellationReport",
    "PoleSignal",
    "PrecCtx",
    "PrecisionExceeded",
    "R_orbit",
    "SelfDualSpectrum",
    "SolverError",
    "SpectralPoint",
    "TransferMatrix",
    "WronskianFactorization",
    "alpha_beta",
    "canonical_integral",
    "chi_check_eval",
    "chi_dual_eval",
    "chi_eval",
    "chi_mult_check",
    "chi_poly_seq",
    "chi_via_Minf",
    "classify_r_orbit",
    "composite_gl",
    "factorize",
    "gauss_legendre_nodes",
    "leg_integral",
    "make_context",
    "make_params",
    "path_funcs",
    "period_integrals",
    "phi_eval",
    "pochhammer_q",
    "pole_cancellation_check",
    "psi_eval",
    "psi_residual",
    "psi_selfdual",
    "quantize",
    "quantize_selfdual",
    "rho_extract",
    "sheet_seed",
    "solve_eps",
    "theta1",
    "trace_orbit",
    "wronskian_eval",
    "wronskian_residue",
]
