"""Flux reconstruction from multipliers."""
from .bilinear import bilinear_S
from .direct import FluxSpec, flux_direct
from .homotopy import (
    LAMBDA,
    flux_homotopy1,
    flux_homotopy2,
    homotopy1_integrand,
    integrate_lambda,
    law_homotopy1,
    law_homotopy2,
)
from .law import CHARACTERISTIC, ON_SOLUTIONS, UNVERIFIED, ConservationLaw
from .scaling import (
    ScalingSymmetry,
    WeightReport,
    flux_scaling,
    flux_symmetry_pair,
    pair_fluxes,
    scaling_weights,
)

__all__ = [
    "CHARACTERISTIC", "ON_SOLUTIONS", "UNVERIFIED", "LAMBDA", "ConservationLaw", "FluxSpec",
    "ScalingSymmetry", "WeightReport", "bilinear_S", "flux_direct", "flux_homotopy1",
    "flux_homotopy2", "flux_scaling", "flux_symmetry_pair", "homotopy1_integrand", "integrate_lambda",
    "law_homotopy1", "law_homotopy2", "pair_fluxes", "scaling_weights",
]
