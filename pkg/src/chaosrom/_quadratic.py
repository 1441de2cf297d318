"""Compressed quadratic features shared by the dynamics and opinf modules.

The quadratic term of an r-dimensional model has r(r+1)/2 unique products
q_i * q_j with i <= j. The compressed ordering is lexicographic with i outer:
[q1^2, q1 q2, ..., q1 qr, q2^2, ..., qr^2], which is exactly the row-major
upper triangle enumerated by np.triu_indices.
"""

import numpy as np


def quadratic_feature_count(r: int) -> int:
    """Number of unique quadratic products, binom(r+1, 2)."""
    return r * (r + 1) // 2


def kron_comp(q: np.ndarray) -> np.ndarray:
    """Compressed Kronecker product of a state vector with itself.

    Parameters
    ----------
    q : ndarray, shape (r,)

    Returns
    -------
    ndarray, shape (r(r+1)/2,)
        Entries q_i q_j for i <= j in lexicographic order (i outer).
    """
    q = np.asarray(q)
    iu, ju = np.triu_indices(q.shape[0])
    return q[iu] * q[ju]


def kron_comp_columns(Q: np.ndarray) -> np.ndarray:
    """kron_comp applied to every column of an r x k matrix at once."""
    Q = np.asarray(Q)
    iu, ju = np.triu_indices(Q.shape[0])
    return Q[iu, :] * Q[ju, :]


def compress_quadratic(H_full: np.ndarray) -> np.ndarray:
    """Fold a full quadratic operator (n x r^2, acting on q kron q) into the
    compressed form (n x r(r+1)/2).

    Off-diagonal compressed coefficients are the sums of the two symmetric
    full coefficients, so H_comp @ kron_comp(q) == H_full @ kron(q, q).
    """
    H_full = np.asarray(H_full)
    n, r2 = H_full.shape
    r = int(round(np.sqrt(r2)))
    if r * r != r2:
        raise ValueError(f"full operator width {r2} is not a perfect square")
    H3 = H_full.reshape(n, r, r)
    iu, ju = np.triu_indices(r)
    folded = H3[:, iu, ju] + H3[:, ju, iu]
    folded[:, iu == ju] = H3[:, iu[iu == ju], ju[iu == ju]]
    return folded


def expand_quadratic(H_comp: np.ndarray) -> np.ndarray:
    """Unfold a compressed quadratic operator into the symmetric full form.

    Off-diagonal compressed weight is split evenly between (i,j) and (j,i),
    so the result is the symmetric representative of the same operator.
    """
    H_comp = np.asarray(H_comp)
    n, w = H_comp.shape
    r = int((np.sqrt(8 * w + 1) - 1) / 2 + 0.5)
    if quadratic_feature_count(r) != w:
        raise ValueError(f"width {w} is not a triangular number")
    iu, ju = np.triu_indices(r)
    H3 = np.zeros((n, r, r))
    half = np.where(iu == ju, H_comp, H_comp / 2.0)
    H3[:, iu, ju] = half
    H3[:, ju, iu] = half
    return H3.reshape(n, r * r)
