"""PCA/POD dimensionality reduction for snapshot matrices.

fit_pca centers the snapshots by their temporal mean (PCA proper; an
uncentered flag exists), computes the singular spectrum, and keeps either a
fixed number of modes or the smallest count reaching an explained-variance
threshold. For matrices too large for a direct SVD the decomposition runs
on the Gram matrix of the thin side, which is how the full KS dataset
(512 x 4.8e5) stays tractable.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, DegenerateDataError
from .snapshots import as_state_array

# Above this element count fit_pca switches from a direct thin SVD to the
# Gram-side eigendecomposition.
_GRAM_THRESHOLD = 20_000_000


@dataclass
class ReducedBasis:
    """Orthonormal basis with the centering vector and singular spectrum.

    basis is n x r with orthonormal columns; mean is the temporal mean that
    was subtracted before the SVD (zeros when centering was off);
    singular_values holds the full non-increasing spectrum of the centered
    snapshot matrix, not just the leading r values.
    """

    basis: np.ndarray
    mean: np.ndarray
    singular_values: np.ndarray

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=np.float64)
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.singular_values = np.asarray(self.singular_values, dtype=np.float64)
        if self.basis.ndim != 2:
            raise ConfigurationError("basis must be 2-D")
        if self.mean.shape != (self.basis.shape[0],):
            raise ConfigurationError(
                f"mean must have shape ({self.basis.shape[0]},), "
                f"got {self.mean.shape}")

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def r(self) -> int:
        return self.basis.shape[1]


def identity_basis(n: int) -> ReducedBasis:
    """Pass-through basis used when no reduction is requested."""
    return ReducedBasis(np.eye(n), np.zeros(n), np.ones(n))


def _sign_fix(V: np.ndarray) -> np.ndarray:
    """Deterministic column signs: largest-magnitude entry made positive."""
    if V.shape[1] == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _spectrum(Qc: np.ndarray, method: str):
    """Left singular vectors and singular values of the centered snapshots.

    method 'svd' is the direct thin SVD; 'gram' eigendecomposes the Gram
    matrix of the thin side; 'auto' picks by size.
    """
    n, k = Qc.shape
    if method == "auto":
        method = "gram" if n * k > _GRAM_THRESHOLD else "svd"
    if method == "svd":
        U, s, _ = np.linalg.svd(Qc, full_matrices=False)
        return U, s
    if method != "gram":
        raise ConfigurationError(f"unknown pca method {method!r}")
    if n <= k:
        C = Qc @ Qc.T
        lam, W = scipy.linalg.eigh(C)
        lam = lam[::-1]
        W = W[:, ::-1]
        s = np.sqrt(np.clip(lam, 0.0, None))
        return W, s
    K = Qc.T @ Qc
    lam, W = scipy.linalg.eigh(K)
    lam = lam[::-1]
    W = W[:, ::-1]
    s = np.sqrt(np.clip(lam, 0.0, None))
    safe = np.where(s > 0, s, 1.0)
    U = Qc @ (W / safe)
    # Columns past the numerical rank lose orthogonality in this branch;
    # a thin QR pass restores it without disturbing the leading span.
    U, _ = np.linalg.qr(U)
    return U, s


def fit_pca(Q, r: int | None = None, energy: float | None = None,
            center: bool = True, method: str = "auto") -> ReducedBasis:
    """Fit a PCA basis on snapshots.

    Parameters
    ----------
    Q : SnapshotMatrix or ndarray, shape (n, k)
    r : int, optional
        Fixed number of modes. Exactly one of r and energy must be given.
    energy : float, optional
        Explained-variance threshold in (0, 1]; the smallest r whose
        cumulative ratio reaches it is kept.
    center : bool, optional
        Subtract the temporal mean before the SVD (default). PCA proper;
        disable for plain uncentered POD.
    method : {'auto', 'svd', 'gram'}, optional

    Raises
    ------
    ConfigurationError
        If both or neither of r/energy are given, or r > min(n, k).
    DegenerateDataError
        If the (centered) snapshots are numerically zero.
    """
    A = as_state_array(Q)
    n, k = A.shape
    if (r is None) == (energy is None):
        raise ConfigurationError("give exactly one of r and energy")
    if r is not None and not 1 <= r <= min(n, k):
        raise ConfigurationError(
            f"r must be in [1, {min(n, k)}], got {r}")
    if energy is not None and not 0.0 < energy <= 1.0:
        raise ConfigurationError(f"energy must be in (0, 1], got {energy}")

    mean = A.mean(axis=1) if center else np.zeros(n)
    Qc = A - mean[:, np.newaxis]
    scale = np.abs(A).max() if A.size else 0.0
    if not np.all(np.isfinite(Qc)):
        raise ConfigurationError("snapshots contain non-finite entries")
    if np.abs(Qc).max() <= 1e-13 * max(1.0, scale):
        raise DegenerateDataError(
            "centered snapshots are numerically zero (no variance)")

    U, s = _spectrum(Qc, method)
    total = float(np.sum(s**2))
    if total == 0.0:
        raise DegenerateDataError("zero singular spectrum")
    if energy is not None:
        cumulative = np.cumsum(s**2) / total
        r = int(np.searchsorted(cumulative, energy - 1e-14) + 1)
        r = min(r, U.shape[1])
    return ReducedBasis(_sign_fix(U[:, :r]), mean, s)


def project(basis: ReducedBasis, Q) -> np.ndarray:
    """Latent coordinates V^T (Q - mean) of full-space snapshots."""
    A = as_state_array(Q)
    if A.shape[0] != basis.n:
        raise ConfigurationError(
            f"snapshots have {A.shape[0]} rows, basis expects {basis.n}")
    return basis.basis.T @ (A - basis.mean[:, np.newaxis])


def reconstruct(basis: ReducedBasis, Qr) -> np.ndarray:
    """Full-space snapshots V Qr + mean from latent coordinates."""
    B = as_state_array(Qr)
    if B.shape[0] != basis.r:
        raise ConfigurationError(
            f"latent snapshots have {B.shape[0]} rows, basis expects {basis.r}")
    return basis.basis @ B + basis.mean[:, np.newaxis]


def explained_variance(basis: ReducedBasis) -> np.ndarray:
    """Cumulative explained-variance ratios over the singular spectrum."""
    s2 = basis.singular_values**2
    total = float(s2.sum())
    if total == 0.0:
        raise DegenerateDataError("all singular values are zero")
    return np.cumsum(s2) / total


def truncate_basis(basis: ReducedBasis, r: int) -> ReducedBasis:
    """Keep the leading r modes of a fitted basis.

    SVD nesting makes the truncation optimal among rank-r bases of the
    same snapshots; the stored spectrum is kept whole.
    """
    if not 1 <= r <= basis.r:
        raise ConfigurationError(
            f"r must be in [1, {basis.r}], got {r}")
    return ReducedBasis(basis.basis[:, :r].copy(), basis.mean,
                        basis.singular_values)


def projection_error(Q, basis: ReducedBasis) -> float:
    """Relative Frobenius reconstruction error of Q under the basis."""
    A = as_state_array(Q)
    denom = np.linalg.norm(A)
    if denom == 0.0:
        raise DegenerateDataError("cannot compute a relative error of zero data")
    resid = A - reconstruct(basis, project(basis, A))
    return float(np.linalg.norm(resid) / denom)
