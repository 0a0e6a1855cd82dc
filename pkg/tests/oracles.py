"""Independent reference computations used only by the tests."""

import numpy as np


def direct_dft(x, block=256):
    """O(N^2) evaluation of sum_n x_n exp(-i 2 pi k n / N), a block of k rows at a time."""
    x = np.asarray(x, dtype=float)
    N = x.size
    n = np.arange(N)
    out = np.empty(N, dtype=complex)
    for start in range(0, N, block):
        k = np.arange(start, min(N, start + block))[:, None]
        # (k * n) % N keeps the phase argument small for large N
        out[start : start + k.shape[0]] = np.exp(-2j * np.pi * ((k * n) % N) / N) @ x
    return out


def eig_pca(Z, n_pcs):
    """PCA through the eigendecomposition of Z^T Z / T, oriented like fit_pca."""
    Z = np.asarray(Z, dtype=float)
    cov = Z.T @ Z / Z.shape[0]
    w, v = np.linalg.eigh(cov)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    P = v[:, :n_pcs]
    idx = np.argmax(np.abs(P), axis=0)
    P = P * np.sign(P[idx, np.arange(n_pcs)])
    return P, w[:n_pcs]


def general_t2(scores, cov):
    """Quadratic-form T^2 valid for any (non-diagonal) score covariance."""
    return float(scores @ np.linalg.solve(cov, scores))
