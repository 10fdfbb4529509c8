"""Feature-space and kernel extended DMD.

Two routes to the same finite Koopman approximation:

* :func:`edmd_feature` works with an explicit dictionary ``psi`` and forms
  ``K = pinv(Psi_x^T Psi_x) @ (Psi_x^T Psi_y)`` (``N_k x N_k``).
* :func:`kernel_edmd` only evaluates a kernel. With ``G[i, j] = k(x_i, x_j)``
  factored as ``Q diag(S**2) Q^T`` and ``A[i, j] = k(y_i, x_j)``, it forms
  ``K_hat = (S^+ Q^T) A (Q S^+)`` (``r x r``). For a kernel with an explicit
  feature map the nonzero spectra of ``K`` and ``K_hat`` coincide.

Snapshot matrices have one snapshot per column. The estimator classes at the
bottom follow scikit-learn orientation instead (one snapshot per row).
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_positive_int, check_snapshots
from .augment import SnapshotPairs
from .kernels import KernelSpec, gram, interaction, make_kernel, pairwise
from .linalg import EPS, eig_general, eig_symmetric, pinv_values, svd

__all__ = [
    "SnapshotPairs",
    "FeatureDictionary",
    "EdmdResult",
    "edmd_feature",
    "kernel_edmd",
    "koopman_modes",
    "predict",
    "mode_similarity",
    "KernelEDMD",
    "FeatureEDMD",
]


@dataclass(frozen=True)
class FeatureDictionary:
    """Monomials of total degree ``<= degree`` in ``n_vars`` state variables.

    Ordered by degree, the constant first; within a degree, lexicographic
    in the variable indices.
    """

    n_vars: int
    degree: int
    exponents: tuple = field(init=False, repr=False)

    def __post_init__(self):
        check_positive_int(self.n_vars, "n_vars")
        check_positive_int(self.degree, "degree", minimum=0)
        exps = []
        for p in range(self.degree + 1):
            for combo in combinations_with_replacement(range(self.n_vars), p):
                e = [0] * self.n_vars
                for i in combo:
                    e[i] += 1
                exps.append(tuple(e))
        object.__setattr__(self, "exponents", tuple(exps))

    @property
    def n_features(self):
        return comb(self.n_vars + self.degree, self.degree)

    def __call__(self, X):
        """Observation matrix ``Psi`` of shape ``(m, N_k)`` for snapshots ``X`` (n x m)."""
        X = check_snapshots(X)
        if X.shape[0] != self.n_vars:
            raise ValueError(f"expected {self.n_vars} state variables, got {X.shape[0]}")
        E = np.array(self.exponents, dtype=float)  # (N_k, n)
        return np.prod(X.T[:, None, :] ** E[None, :, :], axis=2)

    def kernel(self, A, B):
        """Induced kernel matrix ``psi(a_i)^T psi(b_j)``."""
        return self(A) @ self(B).T

    def to_dict(self):
        return {"kind": "monomials", "n_vars": self.n_vars, "degree": self.degree}


@dataclass
class EdmdResult:
    eigenvalues: np.ndarray
    eigvecs_hat: np.ndarray
    phi_data: np.ndarray
    modes: np.ndarray
    singular_values: np.ndarray
    rank: int
    kernel: object
    koopman: np.ndarray = field(repr=False, default=None)
    basis: np.ndarray = field(repr=False, default=None)

    def top(self, k):
        """Copy restricted to the first ``k`` eigen-triples."""
        k = min(int(k), self.eigenvalues.size)
        return EdmdResult(
            eigenvalues=self.eigenvalues[:k],
            eigvecs_hat=self.eigvecs_hat[:, :k],
            phi_data=self.phi_data[:, :k],
            modes=self.modes[:, :k],
            singular_values=self.singular_values,
            rank=self.rank,
            kernel=self.kernel,
            koopman=self.koopman,
            basis=None if self.basis is None else self.basis[:, :k],
        )


def _check_pairs(pairs):
    if not isinstance(pairs, SnapshotPairs):
        X, Y = pairs
        pairs = SnapshotPairs(X=X, Y=Y)
    return pairs.X, pairs.Y


def _retain_eigs(K, rank):
    eig = eig_general(K)
    return eig.values[:rank], eig.vectors[:, :rank]


def edmd_feature(pairs, dictionary, rtol=EPS):
    """Dictionary eDMD: ``K = pinv(G) @ A`` with ``G = Psi_x^T Psi_x``, ``A = Psi_x^T Psi_y``.

    Only the ``rank(G)`` eigenvalues of largest magnitude are kept; the
    remaining ones are zero because ``K`` maps into the range of ``G``.
    """
    X, Y = _check_pairs(pairs)
    if dictionary.n_features == 0:
        raise ValueError("dictionary has no features")
    Psi_x = dictionary(X)
    Psi_y = dictionary(Y)
    if not (np.all(np.isfinite(Psi_x)) and np.all(np.isfinite(Psi_y))):
        raise ValueError("dictionary produced non-finite features")
    G = Psi_x.T @ Psi_x
    feature_A = Psi_x.T @ Psi_y
    dec = svd(G)
    inv = pinv_values(dec.S, rtol, G.shape)
    rank = int(np.count_nonzero(inv))
    if rank == 0:
        raise ValueError("feature Gram matrix is zero")
    K = (dec.Z * inv) @ dec.Q.T @ feature_A
    values, V = _retain_eigs(K, rank)
    phi = Psi_x @ V
    modes = koopman_modes(phi, X, rtol)
    return EdmdResult(
        eigenvalues=values,
        eigvecs_hat=V,
        phi_data=phi,
        modes=modes,
        singular_values=np.sqrt(np.clip(dec.S[:rank], 0.0, None)),
        rank=rank,
        kernel=dictionary,
        koopman=K,
        basis=V,
    )


def _kernel_matrices(X, Y, kernel):
    if isinstance(kernel, KernelSpec):
        return gram(X, kernel), interaction(Y, X, kernel)
    if isinstance(kernel, FeatureDictionary):
        kernel = kernel.kernel
    G = kernel(X, X)
    G = np.triu(G) + np.conj(np.triu(G, 1)).T
    return G, kernel(Y, X)


def _kernel_row(Xnew, Xtrain, kernel):
    if isinstance(kernel, KernelSpec):
        return pairwise(Xnew, Xtrain, kernel)
    if isinstance(kernel, FeatureDictionary):
        return kernel.kernel(Xnew, Xtrain)
    return kernel(Xnew, Xtrain)


def kernel_edmd(pairs, kernel, rtol=EPS):
    """Kernel eDMD on snapshot pairs.

    ``kernel`` is a :class:`KernelSpec`, a :class:`FeatureDictionary` (its
    induced kernel) or a callable ``k(A, B)`` returning the matrix of
    ``k(a_i, b_j)`` over columns.

    The Gram matrix is factored with a symmetric eigendecomposition; its
    eigenvalues are clipped at 0 and those not exceeding
    ``rtol * largest * m`` are discarded, leaving rank ``r``.
    """
    X, Y = _check_pairs(pairs)
    m = X.shape[1]
    G, kernel_A = _kernel_matrices(X, Y, kernel)
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(kernel_A))):
        raise ValueError("kernel evaluation produced non-finite values; check the kernel scale")
    if not np.any(G):
        raise ValueError("Gram matrix is identically zero; degenerate kernel or scale")

    lam, Q = eig_symmetric(G)
    lam = np.clip(lam.real, 0.0, None)
    keep = pinv_values(lam, rtol, (m, m)) > 0
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        raise ValueError("Gram matrix has numerical rank 0")
    Q = Q[:, keep]
    S = np.sqrt(lam[keep])
    S_inv = 1.0 / S

    K_hat = (S_inv[:, None] * (Q.conj().T @ kernel_A @ Q)) * S_inv[None, :]
    eig = eig_general(K_hat)
    V = eig.vectors
    phi = (Q * S) @ V
    modes = koopman_modes(phi, X, rtol)
    return EdmdResult(
        eigenvalues=eig.values,
        eigvecs_hat=V,
        phi_data=phi,
        modes=modes,
        singular_values=S,
        rank=rank,
        kernel=kernel,
        koopman=K_hat,
        basis=(Q * S_inv) @ V,
    )


def koopman_modes(phi_data, X, rtol=EPS):
    """Least-squares modes: ``Xi = pinv(phi_data) @ X^T``; returns ``Xi^T`` (n x r)."""
    phi_data = np.atleast_2d(np.asarray(phi_data))
    X = np.atleast_2d(np.asarray(X))
    if phi_data.shape[1] == 0:
        raise ValueError("no eigenfunctions to build modes from (r = 0)")
    if phi_data.shape[0] != X.shape[1]:
        raise ValueError(
            f"phi_data has {phi_data.shape[0]} rows but X has {X.shape[1]} snapshots"
        )
    dec = svd(phi_data)
    inv = pinv_values(dec.S, rtol, phi_data.shape)
    Xi = (dec.Z * inv) @ (dec.Q.conj().T @ X.T)
    return Xi.T


def predict(result, x0_phi, steps):
    """Columns ``t = 1..steps`` of ``sum_k xi_k * lambda_k**t * phi_k(x0)``."""
    x0_phi = np.asarray(x0_phi).ravel()
    r = result.eigenvalues.size
    if x0_phi.size != r:
        raise ValueError(f"x0_phi has length {x0_phi.size}, expected {r}")
    steps = check_positive_int(steps, "steps", minimum=0)
    t = np.arange(1, steps + 1)
    powers = result.eigenvalues[:, None] ** t[None, :]
    return result.modes @ (powers * x0_phi[:, None])


def mode_similarity(modes_a, eigs_a, modes_b, eigs_b):
    """Match modes by eigenvalue proximity and report ``|cos|`` per matched pair.

    Pairs are taken greedily in order of increasing ``|lambda_a - lambda_b|``
    (ties by index). Returns ``(i, j, similarity)`` tuples sorted by ``i``.
    """
    modes_a = np.atleast_2d(np.asarray(modes_a))
    modes_b = np.atleast_2d(np.asarray(modes_b))
    eigs_a = np.atleast_1d(np.asarray(eigs_a, dtype=complex))
    eigs_b = np.atleast_1d(np.asarray(eigs_b, dtype=complex))
    if modes_a.shape[0] != modes_b.shape[0]:
        raise ValueError(
            f"mode dimension mismatch: {modes_a.shape[0]} vs {modes_b.shape[0]}"
        )
    if modes_a.shape[1] != eigs_a.size or modes_b.shape[1] != eigs_b.size:
        raise ValueError("each mode column needs exactly one eigenvalue")

    dist = np.abs(eigs_a[:, None] - eigs_b[None, :])
    # flat index order coincides with (i, j) order, so it breaks ties
    order = np.lexsort((np.arange(dist.size), dist.ravel()))
    used_a, used_b, matches = set(), set(), []
    for flat in order:
        i, j = divmod(int(flat), eigs_b.size)
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        a, b = modes_a[:, i], modes_b[:, j]
        denom = np.linalg.norm(a) * np.linalg.norm(b)
        sim = 0.0 if denom == 0 else min(1.0, float(np.abs(np.vdot(a, b)) / denom))
        matches.append((i, j, sim))
    return sorted(matches)


class _BaseEDMD(BaseEstimator):
    """Shared fit/transform/predict plumbing.

    Input follows scikit-learn orientation: ``X`` has one snapshot per row.
    With ``Y`` omitted, consecutive rows of ``X`` form the pairs.
    """

    def _pairs(self, X, Y):
        X = check_array(X, ensure_min_samples=2 if Y is None else 1)
        if Y is None:
            X, Y = X[:-1], X[1:]
        else:
            Y = check_array(Y)
            if X.shape != Y.shape:
                raise ValueError(f"X and Y shapes differ: {X.shape} vs {Y.shape}")
        self.n_features_in_ = X.shape[1]
        return SnapshotPairs(X=X.T, Y=Y.T)

    def _store(self, result, Xcols):
        self.result_ = result
        self.eigenvalues_ = result.eigenvalues
        self.modes_ = result.modes
        self.rank_ = result.rank
        self._X_fit = Xcols

    def transform(self, X):
        """Eigenfunction values, shape ``(n_samples, r)``."""
        check_is_fitted(self, "result_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self._eigenfunctions(X.T)

    def predict(self, X):
        """One-step-ahead state ``sum_k xi_k lambda_k phi_k(x)`` for each row of ``X``."""
        phi = self.transform(X)
        out = (phi * self.eigenvalues_[None, :]) @ self.modes_.T
        return out.real if np.allclose(out.imag, 0.0, atol=1e-10 * max(1.0, np.abs(out).max())) else out

    def forecast(self, x0, steps):
        """Trajectory ``(steps, n)`` started from state ``x0``."""
        phi0 = self.transform(np.atleast_2d(x0))[0]
        return predict(self.result_, phi0, steps).T


class KernelEDMD(_BaseEDMD):
    """Kernel eDMD estimator.

    Parameters
    ----------
    kernel : {"laplace", "grbf", "poly", "laplace-rk"}, default="laplace"
    sigma : float or None, default=None
        Bandwidth. ``None`` picks the median heuristic on the fitted data
        (median pairwise distance raised to ``gamma``).
    gamma : float or None, default=None
        Exponent of the exponential-power kernel; ``None`` means 1 for
        ``"laplace"`` and 2 for ``"grbf"``.
    alpha, d : polynomial kernel degree and scale.
    rtol : float
        Relative truncation threshold for the Gram spectrum.
    seed : int
        Seed for the median-heuristic pair subsample.
    """

    def __init__(self, kernel="laplace", sigma=None, gamma=None, alpha=1, d=1.0, rtol=EPS, seed=0):
        self.kernel = kernel
        self.sigma = sigma
        self.gamma = gamma
        self.alpha = alpha
        self.d = d
        self.rtol = rtol
        self.seed = seed

    def fit(self, X, Y=None):
        pairs = self._pairs(X, Y)
        self.kernel_spec_ = make_kernel(
            self.kernel, pairs.X, self.sigma, self.gamma, self.alpha, self.d, self.seed
        )
        self._store(kernel_edmd(pairs, self.kernel_spec_, self.rtol), pairs.X)
        return self

    def _eigenfunctions(self, Xcols):
        return _kernel_row(Xcols, self._X_fit, self.kernel_spec_) @ self.result_.basis


class FeatureEDMD(_BaseEDMD):
    """Dictionary eDMD with monomials up to total degree ``degree``."""

    def __init__(self, degree=1, rtol=EPS):
        self.degree = degree
        self.rtol = rtol

    def fit(self, X, Y=None):
        pairs = self._pairs(X, Y)
        self.dictionary_ = FeatureDictionary(pairs.X.shape[0], self.degree)
        self._store(edmd_feature(pairs, self.dictionary_, self.rtol), pairs.X)
        return self

    def _eigenfunctions(self, Xcols):
        return self.dictionary_(Xcols) @ self.result_.basis
