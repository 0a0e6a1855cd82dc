"""PCA on standardized features via the thin SVD."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadDimensionsError, DimensionMismatchError, RankDeficientError

MIN_SINGULAR_VALUE = 1e-12


@dataclass(frozen=True)
class PcaModel:
    """Fitted PCA model.

    ``loadings`` is q x n_pcs with orthonormal columns.  ``score_variances``
    are the population variances of the calibration scores (S_j**2 / T), so
    the calibration mean of T^2 is exactly ``n_pcs``.  ``eigenvalues`` holds
    all q correlation-matrix eigenvalues (zero-padded when T <= q).
    """

    loadings: np.ndarray
    score_variances: np.ndarray
    n_pcs: int
    explained_variance_ratio: np.ndarray
    eigenvalues: np.ndarray
    calibration_rows: int

    @property
    def n_features(self) -> int:
        return self.loadings.shape[0]


def _orient(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def fit_pca(Z, n_pcs: int) -> PcaModel:
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise BadDimensionsError("Z must be a 2-D matrix")
    T, q = Z.shape
    if T < 2 or q < 1:
        raise BadDimensionsError(f"need at least 2 rows and 1 column, got {Z.shape}")
    if not 1 <= n_pcs <= min(T - 1, q):
        raise BadDimensionsError(f"n_pcs={n_pcs} outside 1..{min(T - 1, q)}")

    _, s, vt = np.linalg.svd(Z, full_matrices=False)
    if s[n_pcs - 1] < MIN_SINGULAR_VALUE:
        raise RankDeficientError(
            f"singular value {n_pcs} is {s[n_pcs - 1]:.3g}, below {MIN_SINGULAR_VALUE}"
        )
    eig = np.zeros(q)
    eig[: s.size] = s**2 / T
    total = eig.sum()
    ratio = eig / total if total > 0 else eig
    loadings = _orient(vt[:n_pcs].T)
    return PcaModel(
        loadings=loadings,
        score_variances=eig[:n_pcs].copy(),
        n_pcs=n_pcs,
        explained_variance_ratio=ratio,
        eigenvalues=eig,
        calibration_rows=T,
    )


def correlation_eigenvalues(Z) -> np.ndarray:
    """Descending eigenvalues of Z^T Z / T for a column-standardized Z."""
    Z = np.asarray(Z, dtype=float)
    s = np.linalg.svd(Z, compute_uv=False)
    eig = np.zeros(Z.shape[1])
    eig[: s.size] = s**2 / Z.shape[0]
    return eig


def select_n_pcs(eigenvalues) -> int:
    """Kaiser rule: keep every component with eigenvalue >= 1, at least one."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    return max(1, int(np.sum(eigenvalues >= 1.0)))


def cumulative_explained(eigenvalues, n_pcs: int) -> float:
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    return float(eigenvalues[:n_pcs].sum() / eigenvalues.sum())


def _check_dim(m: PcaModel, v: np.ndarray, expected: int, what: str) -> None:
    if v.shape[-1] != expected:
        raise DimensionMismatchError(f"{what} has length {v.shape[-1]}, expected {expected}")


def project(m: PcaModel, z) -> np.ndarray:
    """Scores t = z^T P.  Accepts a vector or a matrix of row vectors."""
    z = np.asarray(z, dtype=float)
    _check_dim(m, z, m.n_features, "feature vector")
    return z @ m.loadings


def reconstruct(m: PcaModel, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    _check_dim(m, t, m.n_pcs, "score vector")
    return t @ m.loadings.T
