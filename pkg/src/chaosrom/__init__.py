"""Non-intrusive reduced-order modeling of chaotic systems.

Learn quadratic latent dynamics from snapshot data by regularized least
squares, with reference solvers for the benchmark systems (a cyclic
Lorenz lattice and the Kuramoto-Sivashinsky equation), PCA compression,
forecast metrics in Lyapunov time units, and a file-based experiment
pipeline with a CLI.

Submodule attributes load lazily so that importing the package stays
cheap and the CLI can pin BLAS thread counts before numpy comes in.
"""

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    # errors
    "ChaosRomError": "errors", "ConfigurationError": "errors",
    "NumericalError": "errors", "DegenerateDataError": "errors",
    "BlowUpError": "errors", "IntegrationFailureError": "errors",
    "IndefiniteSystemError": "errors", "GridSearchError": "errors",
    # snapshots
    "SnapshotMatrix": "snapshots", "split_columns": "snapshots",
    # dynamics
    "Lorenz96Config": "dynamics", "Lorenz96ThreeTierConfig": "dynamics",
    "QuadraticModel": "dynamics", "lorenz96_rhs": "dynamics",
    "lorenz96_three_tier_rhs": "dynamics", "lorenz96_operators": "dynamics",
    "lorenz63_rhs": "dynamics", "lorenz63_operators": "dynamics",
    "quadratic_rhs": "dynamics",
    # integrate
    "IntegratorSpec": "integrate", "integrate": "integrate",
    "output_grid": "integrate",
    # spectral
    "KsConfig": "spectral", "EtdrkCoefficients": "spectral",
    "etdrk4_coefficients": "spectral", "etdrk4_step": "spectral",
    "simulate_ks": "spectral", "ks_initial_condition": "spectral",
    "ks_linear_symbol": "spectral", "wavenumbers": "spectral",
    "grid_points": "spectral",
    # reduction
    "ReducedBasis": "reduction", "fit_pca": "reduction",
    "identity_basis": "reduction", "project": "reduction",
    "reconstruct": "reduction", "explained_variance": "reduction",
    "projection_error": "reduction", "truncate_basis": "reduction",
    # opinf
    "DataMatrixDims": "opinf", "RegularizerSpec": "opinf",
    "NormalEquations": "opinf", "RomOperators": "opinf",
    "GridSpec": "opinf", "kron_comp": "opinf",
    "feature_dimension": "opinf", "quadratic_feature_count": "opinf",
    "assemble_data_matrix": "opinf", "gram_accumulate": "opinf",
    "estimate_derivatives": "opinf", "estimate_derivatives_spline": "opinf",
    "build_gamma": "opinf", "solve_regularized": "opinf",
    "solve_pseudoinverse": "opinf", "grid_search": "opinf",
    "objective_value": "opinf",
    # metrics
    "MetricSeries": "metrics", "nrmse": "metrics", "nrse_field": "metrics",
    "vpt": "metrics", "relative_l2": "metrics", "aggregate_vpt": "metrics",
    "sigma_from_truth": "metrics",
}

__all__ = sorted(_EXPORTS) + ["pipeline"]


def __getattr__(name):
    if name in _EXPORTS:
        sub = _EXPORTS[name]
        module = importlib.import_module(f".{sub}", __name__)
        value = getattr(module, name)
        globals()[name] = value
        # Importing a submodule also binds it on the package under its
        # own name; when a function export shares that name (integrate),
        # the function must win at the package surface.
        if sub != name and sub in _EXPORTS:
            globals()[sub] = getattr(module, sub)
        return value
    if name == "pipeline":
        return importlib.import_module(".pipeline", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(__all__))
