"""Dense decompositions with deterministic ordering and phase conventions."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EPS",
    "SvdResult",
    "EigResult",
    "svd",
    "pinv_values",
    "pinv",
    "eig_general",
    "eig_symmetric",
]

EPS = float(np.finfo(np.float64).eps)


@dataclass
class SvdResult:
    Q: np.ndarray
    S: np.ndarray
    Z: np.ndarray
    r: int

    def reconstruct(self):
        return (self.Q * self.S) @ self.Z.conj().T


@dataclass
class EigResult:
    values: np.ndarray
    vectors: np.ndarray
    ordering: str = "abs-desc,real-desc,imag-desc"


def _as_finite_2d(M, name="matrix"):
    M = np.asarray(M)
    if M.ndim != 2 or M.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    if not np.iscomplexobj(M):
        M = M.astype(np.float64, copy=False)
    return M


def svd(M):
    """Economy SVD ``M = Q @ diag(S) @ Z^H`` with ``r = min(m, n)``."""
    M = _as_finite_2d(M)
    Q, S, Zh = np.linalg.svd(M, full_matrices=False)
    return SvdResult(Q=Q, S=S, Z=Zh.conj().T, r=S.size)


def pinv_values(S, rtol=EPS, shape=None):
    """Reciprocals of singular values with relative truncation.

    ``s`` maps to ``1/s`` when ``s > rtol * S[0] * max(shape)`` and to 0
    otherwise. ``shape`` defaults to ``(len(S), len(S))``.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 1:
        raise ValueError("S must be one-dimensional")
    if S.size == 0:
        return S.copy()
    if np.any(np.diff(S) > 0):
        raise ValueError("singular values must be sorted in descending order")
    if shape is None:
        shape = (S.size, S.size)
    out = np.zeros_like(S)
    if S[0] <= 0:
        return out
    keep = S > rtol * S[0] * max(shape)
    out[keep] = 1.0 / S[keep]
    return out


def pinv(M, rtol=EPS):
    """Moore-Penrose pseudo-inverse assembled from :func:`svd` and :func:`pinv_values`."""
    M = _as_finite_2d(M)
    res = svd(M)
    inv = pinv_values(res.S, rtol, M.shape)
    return (res.Z * inv) @ res.Q.conj().T


def _fix_phase(vectors):
    """Unit-normalise columns and rotate so the largest-magnitude entry is real positive."""
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    idx = np.argmax(np.abs(vectors), axis=0)
    pivot = vectors[idx, np.arange(vectors.shape[1])]
    phase = pivot / np.abs(pivot)
    vectors = vectors / phase
    # the pivot entry is real by construction; drop its rounding residue
    vectors[idx, np.arange(vectors.shape[1])] = np.abs(vectors[idx, np.arange(vectors.shape[1])])
    return vectors


def sort_eigenvalues(values):
    """Permutation ordering by ``|l|`` desc, then real part desc, then imaginary part desc."""
    values = np.asarray(values, dtype=complex)
    return np.lexsort((-values.imag, -values.real, -np.abs(values)))


def eig_general(M):
    """Eigen-decomposition of a square matrix with deterministic ordering and phase."""
    M = _as_finite_2d(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    values, vectors = np.linalg.eig(M)
    values = values.astype(complex)
    vectors = vectors.astype(complex)
    order = sort_eigenvalues(values)
    return EigResult(values=values[order], vectors=_fix_phase(vectors[:, order]))


def eig_symmetric(M, tol=1e-10):
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Raises ``ValueError`` when ``M`` deviates from its (conjugate) transpose
    by more than ``tol`` relative to its largest entry.
    """
    M = _as_finite_2d(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    scale = np.max(np.abs(M))
    if np.max(np.abs(M - M.conj().T)) > tol * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric within tolerance")
    values, vectors = np.linalg.eigh(M)
    values = values[::-1]
    vectors = vectors[:, ::-1]
    vectors = _fix_phase(vectors)
    if not np.iscomplexobj(M):
        vectors = vectors.real
    return values, vectors
