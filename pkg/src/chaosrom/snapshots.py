"""Snapshot matrices: dense state-over-time records on a uniform time grid."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass
class SnapshotMatrix:
    """States over time, one column per sample.

    Parameters
    ----------
    data : ndarray, shape (n, k)
        State dimension n by k time samples, float64.
    dt : float
        Uniform grid spacing in seconds.
    t0 : float, optional
        Time of the first column.
    system : str or None, optional
        Free-form tag of the producing system ("lorenz96", "ks", ...).
    """

    data: np.ndarray
    dt: float
    t0: float = 0.0
    system: str | None = None

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ConfigurationError(
                f"snapshot data must be 2-D, got shape {self.data.shape}")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")

    @property
    def n_states(self) -> int:
        return self.data.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.data.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_snapshots)

    def window(self, start: int, stop: int) -> "SnapshotMatrix":
        """Contiguous column slice [start, stop) as a new SnapshotMatrix."""
        if not 0 <= start <= stop <= self.n_snapshots:
            raise ConfigurationError(
                f"window [{start}, {stop}) out of range for k={self.n_snapshots}")
        return SnapshotMatrix(self.data[:, start:stop], self.dt,
                              t0=self.t0 + start * self.dt, system=self.system)


def as_state_array(Q) -> np.ndarray:
    """Accept a SnapshotMatrix or a plain 2-D array, return the ndarray."""
    if isinstance(Q, SnapshotMatrix):
        return Q.data
    arr = np.asarray(Q, dtype=np.float64)
    if arr.ndim != 2:
        raise ConfigurationError(f"expected a 2-D array, got shape {arr.shape}")
    return arr


def split_columns(k: int, fractions) -> tuple[slice, slice, slice]:
    """Partition k columns into contiguous train/validation/test slices.

    fractions must be three non-negative numbers summing to 1 within 1e-12.
    The slices are disjoint and cover [0, k) exactly.
    """
    f = tuple(float(x) for x in fractions)
    if len(f) != 3 or any(x < 0 for x in f):
        raise ConfigurationError(f"need three non-negative fractions, got {f}")
    if abs(sum(f) - 1.0) > 1e-12:
        raise ConfigurationError(f"split fractions must sum to 1, got {sum(f)!r}")
    k1 = int(round(f[0] * k))
    k2 = k1 + int(round(f[1] * k))
    k1, k2 = min(k1, k), min(k2, k)
    return slice(0, k1), slice(k1, k2), slice(k2, k)
