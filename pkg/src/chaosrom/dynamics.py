"""Right-hand sides for the benchmark ODE systems and learned quadratic models.

All functions here are pure: derivatives depend only on (state, config).
"""

from dataclasses import dataclass

import numpy as np

from ._quadratic import kron_comp, quadratic_feature_count
from .errors import ConfigurationError


@dataclass(frozen=True)
class Lorenz96Config:
    """Single-tier Lorenz 96 parameters.

    damping toggles the -X_k term: the standard chaotic benchmark keeps it
    (default); damping=False gives the pure advection + forcing variant that
    coincides with the X tier of the 3-tier model when the couplings vanish.
    """

    n_vars: int = 40
    forcing: float = 8.0
    damping: bool = True

    def __post_init__(self):
        if self.n_vars < 4:
            raise ConfigurationError(
                f"n_vars must be >= 4 for the cyclic stencil, got {self.n_vars}")
        if not np.isfinite(self.forcing):
            raise ConfigurationError(f"forcing must be finite, got {self.forcing}")


@dataclass(frozen=True)
class Lorenz96ThreeTierConfig:
    """3-tier Lorenz 96 parameters: tier sizes and the fixed coefficients."""

    n_x: int
    n_y: int
    n_z: int
    b: float = 10.0
    c: float = 10.0
    d: float = 10.0
    e: float = 10.0
    g: float = 10.0
    h: float = 1.0
    forcing: float = 20.0

    def __post_init__(self):
        for name, dim in (("n_x", self.n_x), ("n_y", self.n_y), ("n_z", self.n_z)):
            if dim < 4:
                raise ConfigurationError(f"{name} must be >= 4, got {dim}")
        for name in ("b", "c", "d", "e", "g", "h", "forcing"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")


@dataclass
class QuadraticModel:
    """Learned latent model dq/dt = c + A q + H kron_comp(q) + B u.

    H_hat acts on the compressed quadratic features and must therefore have
    exactly r(r+1)/2 columns. B_hat is None when there are no inputs (m=0).
    """

    c_hat: np.ndarray
    A_hat: np.ndarray
    H_hat: np.ndarray
    B_hat: np.ndarray | None = None

    def __post_init__(self):
        self.c_hat = np.asarray(self.c_hat, dtype=np.float64)
        self.A_hat = np.asarray(self.A_hat, dtype=np.float64)
        self.H_hat = np.asarray(self.H_hat, dtype=np.float64)
        if self.B_hat is not None:
            self.B_hat = np.asarray(self.B_hat, dtype=np.float64)
        r = self.c_hat.shape[0]
        if self.A_hat.shape != (r, r):
            raise ConfigurationError(
                f"A_hat must be {(r, r)}, got {self.A_hat.shape}")
        if self.H_hat.shape != (r, quadratic_feature_count(r)):
            raise ConfigurationError(
                f"H_hat must have r(r+1)/2 = {quadratic_feature_count(r)} "
                f"columns, got shape {self.H_hat.shape}")
        if self.B_hat is not None and self.B_hat.shape[0] != r:
            raise ConfigurationError(
                f"B_hat must have {r} rows, got shape {self.B_hat.shape}")
        for name in ("c_hat", "A_hat", "H_hat", "B_hat"):
            block = getattr(self, name)
            if block is not None and not np.all(np.isfinite(block)):
                raise ConfigurationError(f"{name} contains non-finite entries")

    @property
    def r(self) -> int:
        return self.c_hat.shape[0]

    @property
    def m(self) -> int:
        return 0 if self.B_hat is None else self.B_hat.shape[1]


def lorenz96_rhs(state: np.ndarray, cfg: Lorenz96Config) -> np.ndarray:
    """Cyclic Lorenz 96 derivative.

    dX_k/dt = X_{k-1} (X_{k+1} - X_{k-2}) - X_k + F, indices mod n_vars;
    the -X_k term is dropped when cfg.damping is False.
    """
    x = np.asarray(state, dtype=np.float64)
    if x.shape != (cfg.n_vars,):
        raise ConfigurationError(
            f"state must have shape {(cfg.n_vars,)}, got {x.shape}")
    x_m1 = np.roll(x, 1)
    x_m2 = np.roll(x, 2)
    x_p1 = np.roll(x, -1)
    dx = x_m1 * (x_p1 - x_m2) + cfg.forcing
    if cfg.damping:
        dx -= x
    return dx


def lorenz96_three_tier_rhs(state_x, state_y, state_z,
                            cfg: Lorenz96ThreeTierConfig):
    """3-tier Lorenz 96 derivative with both coupling sums.

    X is length K; Y is (J, K) with Y[j, k]; Z is (I, J, K) with Z[i, j, k].
    The Y advection runs over the j index within each k column, and the Z
    advection over the i index within each (j, k) column.
    """
    X = np.asarray(state_x, dtype=np.float64)
    Y = np.asarray(state_y, dtype=np.float64)
    Z = np.asarray(state_z, dtype=np.float64)
    K, J, I = cfg.n_x, cfg.n_y, cfg.n_z
    if X.shape != (K,) or Y.shape != (J, K) or Z.shape != (I, J, K):
        raise ConfigurationError(
            f"tier shapes must be {(K,)}, {(J, K)}, {(I, J, K)}; "
            f"got {X.shape}, {Y.shape}, {Z.shape}")

    dX = (np.roll(X, 1) * (np.roll(X, -1) - np.roll(X, 2))
          + cfg.forcing
          - (cfg.h * cfg.c / cfg.b) * Y.sum(axis=0))

    dY = (-cfg.c * cfg.b * np.roll(Y, -1, axis=0)
          * (np.roll(Y, -2, axis=0) - np.roll(Y, 1, axis=0))
          - cfg.c * Y
          + (cfg.h * cfg.c / cfg.b) * X[np.newaxis, :]
          - (cfg.h * cfg.e / cfg.d) * Z.sum(axis=0))

    dZ = (cfg.e * cfg.d * np.roll(Z, 1, axis=0)
          * (np.roll(Z, -1, axis=0) - np.roll(Z, 2, axis=0))
          - cfg.g * cfg.e * Z
          + (cfg.h * cfg.e / cfg.d) * Y[np.newaxis, :, :])

    return dX, dY, dZ


def quadratic_rhs(model: QuadraticModel, state: np.ndarray,
                  input_vec: np.ndarray | None = None) -> np.ndarray:
    """Evaluate c + A q + H kron_comp(q) + B u for a learned model."""
    q = np.asarray(state, dtype=np.float64)
    if q.shape != (model.r,):
        raise ConfigurationError(
            f"state must have shape {(model.r,)}, got {q.shape}")
    dq = model.c_hat + model.A_hat @ q + model.H_hat @ kron_comp(q)
    if model.B_hat is not None:
        if input_vec is None:
            raise ConfigurationError("model has inputs but none were given")
        u = np.asarray(input_vec, dtype=np.float64)
        if u.shape != (model.m,):
            raise ConfigurationError(
                f"input must have shape {(model.m,)}, got {u.shape}")
        dq = dq + model.B_hat @ u
    return dq


def lorenz63_rhs(state, sigma=10.0, rho=28.0, beta=8.0 / 3.0):
    """Classic Lorenz 63 derivative, used as the operator-recovery oracle."""
    s = np.asarray(state, dtype=np.float64)
    if s.shape != (3,):
        raise ConfigurationError(f"state must have shape (3,), got {s.shape}")
    x, y, z = s
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def lorenz63_operators(sigma=10.0, rho=28.0, beta=8.0 / 3.0) -> QuadraticModel:
    """Exact Lorenz 63 operators in compressed quadratic form.

    Feature order for r=3: [x^2, xy, xz, y^2, yz, z^2].
    """
    A = np.array([[-sigma, sigma, 0.0],
                  [rho, -1.0, 0.0],
                  [0.0, 0.0, -beta]])
    H = np.zeros((3, 6))
    H[1, 2] = -1.0   # -xz
    H[2, 1] = 1.0    # +xy
    return QuadraticModel(np.zeros(3), A, H)


def lorenz96_operators(cfg: Lorenz96Config) -> QuadraticModel:
    """Exact Lorenz 96 operators in compressed quadratic form.

    c = F 1, A = -I (or 0 without damping), and H carries +1 on the
    (k-1, k+1) product and -1 on the (k-2, k-1) product for every k
    (cyclic).
    """
    n = cfg.n_vars
    c = np.full(n, cfg.forcing)
    A = -np.eye(n) if cfg.damping else np.zeros((n, n))
    iu, ju = np.triu_indices(n)
    flat = {(int(i), int(j)): idx for idx, (i, j) in enumerate(zip(iu, ju))}

    def feature(i, j):
        return flat[(min(i, j), max(i, j))]

    H = np.zeros((n, n * (n + 1) // 2))
    for k in range(n):
        H[k, feature((k - 1) % n, (k + 1) % n)] += 1.0
        H[k, feature((k - 2) % n, (k - 1) % n)] -= 1.0
    return QuadraticModel(c, A, H)
