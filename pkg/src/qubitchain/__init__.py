"""Exact diagonalisation of driven qubit chains: band structure, level
statistics, eigenstate delocalisation and closed-form border estimates."""

from .eigensolve import EigensolveError, Spectrum, eigh, eigvalsh
from .hamiltonian import (HermitianMatrix, MeanFieldData, build_interaction_terms, build_quasi_integrable,
                          build_z_hamiltonian, mean_field)
from .params import (CouplingSpec, ConstantGradient, Homogeneous, ModelParams, ParameterError,
                     QuadraticGradient, coupling_matrix, gradient_chain, make_params)
from .spectral import (Band, SpacingHistogram, central_band, central_band_width_scan, closer_to,
                       distribution_distance, identify_bands, reference_density, spacing_distribution)
from .states import Census, EigenstateMetrics, band_metrics, coupling_census, ipr, state_width
from .theory import (BorderEstimates, border_estimates, chaos_border, crossover_j0, deloc_border,
                     deloc_border_homogeneous, n_central, overlap_jb, quadratic_gradient_scaling,
                     width_interacting, width_unperturbed)

__all__ = [
    "Band", "BorderEstimates", "Census", "ConstantGradient", "CouplingSpec", "EigensolveError",
    "EigenstateMetrics", "HermitianMatrix", "Homogeneous", "MeanFieldData", "ModelParams",
    "ParameterError", "QuadraticGradient", "SpacingHistogram", "Spectrum", "band_metrics",
    "border_estimates", "build_interaction_terms", "build_quasi_integrable", "build_z_hamiltonian",
    "central_band", "central_band_width_scan", "chaos_border", "closer_to", "coupling_census",
    "coupling_matrix", "crossover_j0", "deloc_border", "deloc_border_homogeneous",
    "distribution_distance", "eigh", "eigvalsh", "gradient_chain", "identify_bands", "ipr",
    "make_params", "mean_field", "n_central", "overlap_jb", "quadratic_gradient_scaling",
    "reference_density", "spacing_distribution", "state_width", "width_interacting",
    "width_unperturbed",
]

__version__ = "0.1.0"
