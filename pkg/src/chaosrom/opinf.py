"""Operator inference: learn quadratic latent operators by regularized
least squares on snapshot data.

The regression target is dq/dt ~ c + A q + H kron_comp(q) + B u. Stacking
k samples gives the data matrix D (k rows, d(r, m) columns, column order
[ones | linear | quadratic | inputs]) and the problem

    min_O || D O^T - R^T ||_F^2 + || Gamma O^T ||_F^2

whose solution satisfies the modified normal equations
(D^T D + Gamma^2) O^T = D^T R^T. The Gram pair (D^T D, D^T R^T) can be
accumulated batch by batch so the full D never has to exist in memory,
which is what makes the KS-scale regression (d = 13041) workable.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import interpolate
from scipy.linalg import blas as _blas

from ._quadratic import (compress_quadratic, expand_quadratic, kron_comp,
                         kron_comp_columns, quadratic_feature_count)
from .dynamics import QuadraticModel
from .errors import (ConfigurationError, GridSearchError,
                     IndefiniteSystemError, IntegrationFailureError)
from .snapshots import as_state_array

__all__ = [
    "DataMatrixDims", "RegularizerSpec", "NormalEquations", "RomOperators",
    "GridSpec", "kron_comp", "kron_comp_columns", "compress_quadratic",
    "expand_quadratic", "quadratic_feature_count", "feature_dimension",
    "assemble_data_matrix", "gram_accumulate", "estimate_derivatives",
    "build_gamma", "solve_regularized", "solve_pseudoinverse", "grid_search",
]

# Refuse to materialize a full data matrix bigger than this (bytes); the
# caller should switch to gram_accumulate instead.
DEFAULT_MEMORY_LIMIT = 2_000_000_000


def feature_dimension(r: int, m: int = 0) -> int:
    """Width d(r, m) = 1 + r + r(r+1)/2 + m of the data matrix."""
    return 1 + r + quadratic_feature_count(r) + m


@dataclass(frozen=True)
class DataMatrixDims:
    r: int
    m: int
    k: int

    def __post_init__(self):
        if self.r < 1 or self.m < 0 or self.k < 1:
            raise ConfigurationError(
                f"invalid dims r={self.r}, m={self.m}, k={self.k}")

    @property
    def d(self) -> int:
        return feature_dimension(self.r, self.m)


@dataclass(frozen=True)
class RegularizerSpec:
    """Per-block Tikhonov weights; the diagonal of Gamma."""

    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0
    lambda4: float = 0.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3", "lambda4"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ConfigurationError(f"{name} must be finite and >= 0")


@dataclass
class NormalEquations:
    """Accumulated D^T D and D^T R^T plus what a solve needs.

    rhs_sq_norm carries ||R||_F^2 so the fit residual can be recovered
    without the full D: ||D O^T - R^T||^2 = tr(O G O^T) - 2 tr(O C) + ||R||^2.
    """

    gram: np.ndarray
    cross: np.ndarray
    dims: DataMatrixDims
    rhs_sq_norm: float = 0.0


@dataclass
class RomOperators(QuadraticModel):
    """Learned operators plus fit provenance."""

    regularizer: RegularizerSpec | None = None
    solver: str = "unknown"
    residual: float = 0.0


def _feature_rows(Qhat: np.ndarray, U: np.ndarray | None) -> np.ndarray:
    """Rows [1 | q^T | kron_comp(q)^T | u^T] for a block of samples."""
    k = Qhat.shape[1]
    blocks = [np.ones((1, k)), Qhat, kron_comp_columns(Qhat)]
    if U is not None:
        blocks.append(U)
    return np.concatenate(blocks, axis=0).T


def _check_training_shapes(Qhat, U, R=None):
    Qhat = as_state_array(Qhat)
    r, k = Qhat.shape
    if U is not None:
        U = as_state_array(U)
        if U.shape[1] != k:
            raise ConfigurationError(
                f"U has {U.shape[1]} columns, expected {k}")
    if R is not None:
        R = as_state_array(R)
        if R.shape != (r, k):
            raise ConfigurationError(
                f"R must have shape {(r, k)}, got {R.shape}")
    return Qhat, U, R


def assemble_data_matrix(Qhat, U=None,
                         memory_limit: int = DEFAULT_MEMORY_LIMIT) -> np.ndarray:
    """Materialize the full k x d data matrix.

    Refuses (with a ConfigurationError) when the result would exceed
    memory_limit bytes; use gram_accumulate for such problems.
    """
    Qhat, U, _ = _check_training_shapes(Qhat, U)
    r, k = Qhat.shape
    m = 0 if U is None else U.shape[0]
    d = feature_dimension(r, m)
    needed = k * d * 8
    if needed > memory_limit:
        raise ConfigurationError(
            f"data matrix would take {needed:.3g} bytes "
            f"(k={k}, d={d}), over the {memory_limit:.3g} byte budget; "
            "use gram_accumulate instead")
    return _feature_rows(Qhat, U)


def gram_accumulate(Qhat, U, R, batch_size: int = 2048,
                    memory_limit: int = DEFAULT_MEMORY_LIMIT) -> NormalEquations:
    """Accumulate D^T D and D^T R^T over contiguous sample batches.

    The per-batch contributions are summed sequentially in batch-index
    order, so the result is bit-for-bit deterministic for a fixed
    batch_size no matter how the batches were computed.
    """
    Qhat, U, R = _check_training_shapes(Qhat, U, R)
    if R is None:
        raise ConfigurationError("derivative matrix R is required")
    r, k = Qhat.shape
    m = 0 if U is None else U.shape[0]
    dims = DataMatrixDims(r=r, m=m, k=k)
    d = dims.d
    if batch_size < 1:
        raise ConfigurationError(f"batch_size must be >= 1, got {batch_size}")
    if batch_size * d * 8 > memory_limit:
        raise ConfigurationError(
            f"one batch of {batch_size} samples needs "
            f"{batch_size * d * 8:.3g} bytes, over the memory budget; "
            "reduce batch_size")

    gram = np.zeros((d, d), order="F")
    cross = np.zeros((d, r))
    for start in range(0, k, batch_size):
        stop = min(start + batch_size, k)
        Dj = _feature_rows(Qhat[:, start:stop],
                           None if U is None else U[:, start:stop])
        # dsyrk updates only the upper triangle, half the flops of a gemm;
        # Dj.T is an F-order view so no copy happens.
        gram = _blas.dsyrk(1.0, Dj.T, beta=1.0, c=gram, trans=0,
                           lower=0, overwrite_c=1)
        cross += Dj.T @ R[:, start:stop].T
    # Mirror the upper triangle tile by tile; whole-matrix triu copies
    # would quadruple the peak footprint right when gram is largest.
    tile = 2048
    for start in range(0, d, tile):
        stop = min(start + tile, d)
        gram[stop:, start:stop] = gram[start:stop, stop:].T
        blk = gram[start:stop, start:stop]
        blk += np.triu(blk, 1).T
    return NormalEquations(gram=gram, cross=cross, dims=dims,
                           rhs_sq_norm=float(np.sum(R * R)))


def estimate_derivatives(Qhat, dt: float) -> np.ndarray:
    """Second-order finite differences along the time axis.

    Central stencils inside, one-sided second-order at the two ends.
    """
    Qhat = as_state_array(Qhat)
    if Qhat.shape[1] < 3:
        raise ConfigurationError(
            f"need at least 3 samples for second-order stencils, "
            f"got {Qhat.shape[1]}")
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    return np.gradient(Qhat, dt, axis=1, edge_order=2)


def estimate_derivatives_spline(Qhat, dt: float) -> np.ndarray:
    """Derivatives from a not-a-knot cubic spline through each row.

    One order more accurate than the finite-difference estimator, which
    matters when the sampling interval is the dominant error source in
    the learned operators.
    """
    Qhat = as_state_array(Qhat)
    if Qhat.shape[1] < 4:
        raise ConfigurationError(
            f"need at least 4 samples for a cubic spline, "
            f"got {Qhat.shape[1]}")
    if not dt > 0:
        raise ConfigurationError(f"dt must be positive, got {dt}")
    t = dt * np.arange(Qhat.shape[1])
    return interpolate.CubicSpline(t, Qhat, axis=1).derivative()(t)


def build_gamma(spec: RegularizerSpec, dims: DataMatrixDims) -> np.ndarray:
    """Diagonal of Gamma: blocks of length (1, r, r(r+1)/2, m) receive
    (lambda1, lambda2, lambda3, lambda4)."""
    return np.concatenate([
        np.array([spec.lambda1], dtype=np.float64),
        np.full(dims.r, spec.lambda2, dtype=np.float64),
        np.full(quadratic_feature_count(dims.r), spec.lambda3,
                dtype=np.float64),
        np.full(dims.m, spec.lambda4, dtype=np.float64),
    ])


def _unpack_transposed(OT: np.ndarray, dims: DataMatrixDims, spec, solver,
                       residual) -> RomOperators:
    O = OT.T
    r, w = dims.r, quadratic_feature_count(dims.r)
    c_hat = O[:, 0].copy()
    A_hat = O[:, 1:1 + r].copy()
    H_hat = O[:, 1 + r:1 + r + w].copy()
    B_hat = O[:, 1 + r + w:].copy() if dims.m > 0 else None
    return RomOperators(c_hat, A_hat, H_hat, B_hat,
                        regularizer=spec, solver=solver, residual=residual)


def solve_regularized(ne: NormalEquations, spec: RegularizerSpec) -> RomOperators:
    """Solve (D^T D + Gamma^2) O^T = D^T R^T by Cholesky factorization.

    The system is Jacobi-equilibrated before the factorization (spanning
    many orders of magnitude across feature columns is normal here) and
    polished with one iterative-refinement pass. A failed factorization
    raises IndefiniteSystemError: the system is not positive definite, so
    the caller should use solve_pseudoinverse.

    The attached fit residual comes from the Gram identity, so its square
    carries an absolute error of order eps * ||R||_F^2; residuals far
    below that floor read as roughly sqrt(eps) * ||R||_F.
    """
    dims = ne.dims
    gamma = build_gamma(spec, dims)
    diag = np.diag(ne.gram) + gamma**2
    if np.any(diag <= 0):
        raise IndefiniteSystemError(
            "normal equations have a non-positive diagonal entry; "
            "use solve_pseudoinverse")
    scale = 1.0 / np.sqrt(diag)
    g2 = gamma**2
    # One equilibrated d x d buffer, overwritten by the factorization;
    # a dense diag(gamma^2) or a kept copy of M doubles the peak memory.
    M_eq = ne.gram * scale[:, np.newaxis]
    M_eq *= scale[np.newaxis, :]
    idx = np.arange(dims.d)
    M_eq[idx, idx] = diag * scale * scale
    try:
        factor = scipy.linalg.cho_factor(M_eq, lower=False,
                                         overwrite_a=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise IndefiniteSystemError(
            f"Cholesky factorization failed ({exc}); "
            "use solve_pseudoinverse") from exc

    def eq_solve(B):
        return scale[:, np.newaxis] * scipy.linalg.cho_solve(
            factor, scale[:, np.newaxis] * B, check_finite=False)

    OT = eq_solve(ne.cross)
    M_OT = ne.gram @ OT + g2[:, np.newaxis] * OT
    OT = OT + eq_solve(ne.cross - M_OT)

    # Fit residual from the Gram identity; G @ OT = M @ OT - gamma^2 * OT
    # up to the refinement correction, cheap to recompute exactly.
    G_OT = ne.gram @ OT
    fit_sq = ne.rhs_sq_norm - 2.0 * float(np.sum(OT * ne.cross)) \
        + float(np.sum(OT * G_OT))
    residual = math.sqrt(max(fit_sq, 0.0))
    return _unpack_transposed(OT, dims, spec, "regularized", residual)


def solve_pseudoinverse(D: np.ndarray, R) -> RomOperators:
    """Minimum-norm least squares O^T = pinv(D) R^T via SVD.

    Singular values below eps * max(k, d) * sigma_max are treated as zero.
    """
    D = np.asarray(D, dtype=np.float64)
    R = as_state_array(R)
    if D.ndim != 2:
        raise ConfigurationError("D must be 2-D")
    k, d = D.shape
    if R.shape[1] != k:
        raise ConfigurationError(
            f"R must have {k} columns to match D, got {R.shape[1]}")
    r = R.shape[0]
    m = d - 1 - r - quadratic_feature_count(r)
    if m < 0:
        raise ConfigurationError(
            f"D width {d} is too small for latent dimension {r}")
    dims = DataMatrixDims(r=r, m=m, k=k)
    cutoff = np.finfo(np.float64).eps * max(k, d)
    OT, _, _, _ = scipy.linalg.lstsq(D, R.T, cond=cutoff,
                                     lapack_driver="gelsd")
    residual = float(np.linalg.norm(D @ OT - R.T))
    return _unpack_transposed(OT, dims, None, "pseudoinverse", residual)


@dataclass(frozen=True)
class GridSpec:
    """Log10 grid over (lambda2, lambda3), the same range on both axes."""

    log10_min: float = -3.0
    log10_max: float = 3.0
    log10_step: float = 0.5

    def __post_init__(self):
        if self.log10_max < self.log10_min or self.log10_step <= 0:
            raise ConfigurationError(
                f"bad grid range [{self.log10_min}, {self.log10_max}] "
                f"step {self.log10_step}")

    def axis_values(self) -> np.ndarray:
        count = int(round((self.log10_max - self.log10_min) / self.log10_step)) + 1
        return 10.0 ** np.linspace(self.log10_min, self.log10_max, count)


def objective_value(ne: NormalEquations, spec: RegularizerSpec,
                    model: QuadraticModel) -> float:
    """Regularized objective ||D O^T - R^T||_F^2 + ||Gamma O^T||_F^2
    evaluated through the Gram identity."""
    blocks = [model.c_hat[:, np.newaxis], model.A_hat, model.H_hat]
    if model.B_hat is not None:
        blocks.append(model.B_hat)
    OT = np.concatenate(blocks, axis=1).T
    gamma = build_gamma(spec, ne.dims)
    fit = ne.rhs_sq_norm - 2.0 * float(np.sum(OT * ne.cross)) \
        + float(np.sum(OT * (ne.gram @ OT)))
    penalty = float(np.sum((gamma[:, np.newaxis] * OT)**2))
    return fit + penalty


def grid_search(train, validation, grid: GridSpec | None = None,
                horizon: float | None = None, dt: float | None = None,
                lambda4: float = 0.0, batch_size: int = 2048,
                integrator=None):
    """Pick the (lambda2, lambda3) pair whose model best forecasts the
    validation window; lambda1 is tied to lambda2 and lambda4 defaults to 0.

    Parameters
    ----------
    train : NormalEquations or (Qhat, U, R) tuple
        The Gram pair is computed once and shared by every candidate.
    validation : (q0, reference) tuple
        Latent start state and the reference latent trajectory on the
        uniform dt grid (reference[:, 0] corresponds to q0's time).
    grid : GridSpec, optional
        Defaults to log10 in [-3, 3] step 0.5 (13 x 13 candidates).
    horizon : float, optional
        Scoring horizon in seconds; defaults to the whole reference.
    dt : float, optional
        Grid spacing of the reference; required when it cannot be inferred.
    integrator : IntegratorSpec, optional
        Overrides the forecast integrator (default adaptive, rtol 1e-6).

    Returns
    -------
    (best RegularizerSpec, best RomOperators, score table)
        The table has one dict per candidate: lambda2, lambda3, score,
        failure_time (None unless the forecast diverged). Candidates are
        scored by mean latent NRMSE over the horizon; ties break toward
        smaller lambda2, then smaller lambda3.
    """
    from .integrate import IntegratorSpec, integrate  # local to avoid cycle
    from .dynamics import quadratic_rhs
    from .metrics import nrmse, sigma_from_truth

    if isinstance(train, NormalEquations):
        ne = train
    else:
        Qhat, U, R = train
        ne = gram_accumulate(Qhat, U, R, batch_size=batch_size)
    if grid is None:
        grid = GridSpec()

    q0, reference = validation
    q0 = np.asarray(q0, dtype=np.float64)
    reference = as_state_array(reference)
    if reference.shape[0] != ne.dims.r:
        raise ConfigurationError(
            f"validation reference has {reference.shape[0]} rows, "
            f"expected r={ne.dims.r}")
    if dt is None:
        raise ConfigurationError("dt of the validation grid is required")
    max_horizon = dt * (reference.shape[1] - 1)
    if horizon is None:
        horizon = max_horizon
    if horizon > max_horizon + 1e-9:
        raise ConfigurationError(
            f"horizon {horizon} exceeds the reference window {max_horizon}")
    n_cols = int(np.floor(horizon / dt + 1e-9)) + 1
    truth = reference[:, :n_cols]
    sigma = sigma_from_truth(truth)
    spec_int = integrator or IntegratorSpec(dt_output=dt)
    if spec_int.dt_output != dt:
        spec_int = IntegratorSpec(method=spec_int.method, rtol=spec_int.rtol,
                                  atol=spec_int.atol, dt_output=dt,
                                  max_steps=spec_int.max_steps)

    table = []
    best = None
    values = grid.axis_values()
    for lam2 in (float(v) for v in values):
        for lam3 in (float(v) for v in values):
            cand = RegularizerSpec(lambda1=lam2, lambda2=lam2,
                                   lambda3=lam3, lambda4=lambda4)
            entry = {"lambda2": float(lam2), "lambda3": float(lam3),
                     "score": np.inf, "failure_time": None}
            try:
                model = solve_regularized(ne, cand)
            except IndefiniteSystemError:
                entry["failure_time"] = 0.0
                table.append(entry)
                continue
            try:
                pred = integrate(lambda q: quadratic_rhs(model, q), q0,
                                 0.0, horizon, spec_int).data
                series = nrmse(truth, pred[:, :n_cols], sigma,
                               times=dt * np.arange(n_cols))
                entry["score"] = float(np.mean(series.values))
            except IntegrationFailureError as exc:
                entry["failure_time"] = float(exc.last_valid_time)
            table.append(entry)
            if np.isfinite(entry["score"]) and (
                    best is None or entry["score"] < best[0]):
                best = (entry["score"], cand, model)

    if best is None:
        failures = {(e["lambda2"], e["lambda3"]): e["failure_time"]
                    for e in table}
        raise GridSearchError(
            "every regularization candidate diverged on the validation "
            f"window; failure times: {failures}", failure_times=failures)
    return best[1], best[2], table
