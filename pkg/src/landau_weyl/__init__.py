"""Numerical Weyl asymptotics for a magnetic Laplacian with a perturbing potential."""
from .asymptotics import C0, D0, CoeffReport, alpha0, b0, c0_curve, level_set_density, marching_squares_density
from .errors import LandauWeylError
from .experiments import (SweepResult, count_eigs, fit_power_law, h_sweep, lambda_sweep, match_eigenvalues,
                          run_spectrum, smoothed_density, trace_sum)
from .model import (BandRange, Mollifier, PotentialSpec, Regime, SmoothTestFunction, SpectralWindow, algebraic_well,
                    contributing_bands, gaussian_well, indicator_approximation, make_mollifier, make_test_function,
                    power_tail, sampled_radial)
from .quantize import Grid1D, inverse_weyl_symbol, moyal_residual, weyl_matrix_1d
from .solvers import (SpectrumResult, band_effective_spectrum, effective_symbol_probe, feshbach_assemble,
                      feshbach_spectrum, radial_spectrum, schur_complement)

__version__ = "0.1.0"

__all__ = [
    "BandRange", "C0", "CoeffReport", "D0", "Grid1D", "LandauWeylError", "Mollifier", "PotentialSpec", "Regime",
    "SmoothTestFunction", "SpectralWindow", "SpectrumResult", "SweepResult", "algebraic_well", "alpha0", "b0",
    "band_effective_spectrum", "c0_curve", "contributing_bands", "count_eigs", "effective_symbol_probe",
    "feshbach_assemble", "feshbach_spectrum", "fit_power_law", "gaussian_well", "h_sweep", "indicator_approximation",
    "inverse_weyl_symbol", "lambda_sweep", "level_set_density", "make_mollifier", "make_test_function",
    "marching_squares_density", "match_eigenvalues", "moyal_residual", "power_tail", "radial_spectrum",
    "run_spectrum", "sampled_radial", "schur_complement", "smoothed_density", "trace_sum", "weyl_matrix_1d",
]
