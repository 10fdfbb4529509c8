"""Kernel functions and Gram / interaction matrix assembly.

Snapshot matrices are laid out with one snapshot per column, so ``gram(X)``
is ``m x m`` for ``X`` of shape ``(n, m)``.
"""

from dataclasses import dataclass
from enum import Enum
from math import factorial

import numpy as np
from scipy.spatial.distance import cdist

from ._validation import check_positive, check_positive_int, check_snapshots

__all__ = [
    "KernelKind",
    "KernelSpec",
    "eval_exp_power",
    "eval_polynomial",
    "eval_laplace_rk",
    "pairwise",
    "gram",
    "interaction",
    "median_heuristic",
    "make_kernel",
    "KERNEL_NAMES",
]

# Below this |t| the closed form sinh(sqrt(t))/sqrt(t) is replaced by its series.
_SERIES_SWITCH = 1e-2
_SERIES_COEFFS = np.array([1.0 / factorial(2 * k + 1) for k in range(10)])


class KernelKind(str, Enum):
    EXP_POWER = "exp_power"
    POLYNOMIAL = "polynomial"
    LAPLACE_RK = "laplace_rk"


@dataclass(frozen=True)
class KernelSpec:
    """Tagged kernel description.

    ``EXP_POWER`` is ``exp(-||x - z||**gamma / sigma)`` (gamma=1 Laplace,
    gamma=2 GRBF), ``POLYNOMIAL`` is ``(1 + <x, z>/d**2)**alpha`` and
    ``LAPLACE_RK`` is ``sinh(sqrt(t))/sqrt(t)`` with ``t = <x, z>/sigma**2``.
    """

    kind: KernelKind
    sigma: float = 1.0
    gamma: float = 1.0
    alpha: int = 1
    d: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind is KernelKind.POLYNOMIAL:
            check_positive_int(self.alpha, "alpha")
            check_positive(self.d, "d")
        else:
            check_positive(self.sigma, "sigma")
            if self.kind is KernelKind.EXP_POWER:
                check_positive(self.gamma, "gamma")

    @classmethod
    def laplace(cls, sigma):
        return cls(KernelKind.EXP_POWER, sigma=sigma, gamma=1.0)

    @classmethod
    def grbf(cls, sigma):
        return cls(KernelKind.EXP_POWER, sigma=sigma, gamma=2.0)

    @classmethod
    def exp_power(cls, gamma, sigma):
        return cls(KernelKind.EXP_POWER, sigma=sigma, gamma=gamma)

    @classmethod
    def polynomial(cls, alpha, d=1.0):
        return cls(KernelKind.POLYNOMIAL, alpha=alpha, d=d)

    @classmethod
    def laplace_rk(cls, sigma):
        return cls(KernelKind.LAPLACE_RK, sigma=sigma)

    def __call__(self, x, z):
        x = np.asarray(x)
        z = np.asarray(z)
        if self.kind is KernelKind.EXP_POWER:
            return eval_exp_power(x, z, self.gamma, self.sigma)
        if self.kind is KernelKind.POLYNOMIAL:
            return eval_polynomial(x, z, self.alpha, self.d)
        _check_pair(x, z)
        return eval_laplace_rk(np.vdot(z, x) / self.sigma**2)

    def to_dict(self):
        out = {"kind": self.kind.value}
        if self.kind is KernelKind.POLYNOMIAL:
            out.update(alpha=int(self.alpha), d=float(self.d))
        else:
            out["sigma"] = float(self.sigma)
            if self.kind is KernelKind.EXP_POWER:
                out["gamma"] = float(self.gamma)
        return out


def _check_pair(x, z):
    if x.ndim != 1 or z.ndim != 1:
        raise ValueError("kernel arguments must be vectors")
    if x.shape != z.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {z.shape[0]}")


def eval_exp_power(x, z, gamma, sigma):
    """Exponential power kernel ``exp(-||x - z||_2**gamma / sigma)``."""
    gamma = check_positive(gamma, "gamma")
    sigma = check_positive(sigma, "sigma")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_pair(x, z)
    dist = np.linalg.norm(x - z)
    return float(np.exp(-(dist**gamma) / sigma))


def eval_polynomial(x, z, alpha, d):
    """Polynomial kernel ``(1 + <x, z>/d**2)**alpha``."""
    alpha = check_positive_int(alpha, "alpha")
    d = check_positive(d, "d")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_pair(x, z)
    return float((1.0 + np.dot(x, z) / d**2) ** alpha)


def eval_laplace_rk(t):
    """Evaluate ``sinh(sqrt(t))/sqrt(t)`` for real or complex ``t``.

    The function is entire and even in ``sqrt(t)``, so the branch of the
    square root does not matter. Real input gives real output (``t < 0``
    becomes ``sin(sqrt(-t))/sqrt(-t)``); complex input gives complex output.
    Scalars in, scalars out.
    """
    t_arr = np.asarray(t)
    scalar = t_arr.ndim == 0
    if np.iscomplexobj(t_arr):
        out = _laplace_rk_complex(t_arr.astype(np.complex128).ravel())
    else:
        out = _laplace_rk_real(t_arr.astype(np.float64).ravel())
    out = out.reshape(t_arr.shape)
    if scalar:
        return out[()].item()
    return out


def _series(t):
    acc = np.full_like(t, _SERIES_COEFFS[-1])
    for c in _SERIES_COEFFS[-2::-1]:
        acc = acc * t + c
    return acc


def _laplace_rk_real(t):
    out = np.empty_like(t)
    small = np.abs(t) < _SERIES_SWITCH
    pos = ~small & (t > 0)
    neg = ~small & (t < 0)
    out[small] = _series(t[small])
    u = np.sqrt(t[pos])
    with np.errstate(over="ignore"):
        out[pos] = np.sinh(u) / u
    u = np.sqrt(-t[neg])
    out[neg] = np.sin(u) / u
    return out


def _laplace_rk_complex(t):
    out = np.empty_like(t)
    small = np.abs(t) < _SERIES_SWITCH
    out[small] = _series(t[small])
    u = np.sqrt(t[~small])
    with np.errstate(over="ignore", invalid="ignore"):
        out[~small] = np.sinh(u) / u
    return out


def pairwise(A, B, kernel):
    """Matrix ``K[i, j] = kernel(A[:, i], B[:, j])`` for column-snapshot inputs."""
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"state dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    if kernel.kind is KernelKind.EXP_POWER:
        dist = cdist(A.T, B.T, metric="euclidean")
        if kernel.gamma != 1.0:
            dist = dist**kernel.gamma
        return np.exp(-dist / kernel.sigma)
    if kernel.kind is KernelKind.POLYNOMIAL:
        # overflow surfaces as inf and is rejected by the callers
        with np.errstate(over="ignore"):
            return (1.0 + (A.T @ B) / kernel.d**2) ** kernel.alpha
    return eval_laplace_rk((A.T @ np.conj(B)) / kernel.sigma**2)


def gram(X, kernel):
    """Gram matrix ``G[i, j] = k(x_i, x_j)`` over the columns of ``X``.

    Only the upper triangle is kept; the lower triangle is its (conjugate)
    mirror, so the result is exactly symmetric / Hermitian.
    """
    X = check_snapshots(X, allow_complex=kernel.kind is KernelKind.LAPLACE_RK)
    G = pairwise(X, X, kernel)
    upper = np.triu(G)
    return upper + np.conj(np.triu(G, 1)).T


def interaction(Y, X, kernel):
    """Interaction matrix ``A[i, j] = k(y_i, x_j)``; not symmetric in general."""
    allow_complex = kernel.kind is KernelKind.LAPLACE_RK
    Y = check_snapshots(Y, "Y", allow_complex=allow_complex)
    X = check_snapshots(X, "X", allow_complex=allow_complex)
    if X.shape != Y.shape:
        raise ValueError(f"X and Y must have the same shape, got {X.shape} and {Y.shape}")
    return pairwise(Y, X, kernel)


def median_heuristic(X, gamma=1.0, seed=0, max_pairs=10_000):
    """Bandwidth ``median(||x_i - x_j||)**gamma`` over distinct column pairs.

    With more than ``max_pairs`` pairs, a seeded random subset is used.
    Falls back to 1.0 when every sampled distance is zero.
    """
    X = check_snapshots(X)
    m = X.shape[1]
    if m < 2:
        return 1.0
    iu, ju = np.triu_indices(m, k=1)
    if iu.size > max_pairs:
        rng = np.random.Generator(np.random.PCG64(seed))
        pick = rng.choice(iu.size, size=max_pairs, replace=False)
        iu, ju = iu[pick], ju[pick]
    dist = np.linalg.norm(X[:, iu] - X[:, ju], axis=0)
    med = float(np.median(dist))
    if med == 0.0:
        return 1.0
    return med**gamma


KERNEL_NAMES = ("laplace", "grbf", "poly", "laplace-rk")


def make_kernel(name, X=None, sigma=None, gamma=None, alpha=1, d=1.0, seed=0):
    """Build a :class:`KernelSpec` from a CLI-style kernel name.

    A missing ``sigma`` falls back to :func:`median_heuristic` on ``X``.
    """
    name = name.replace("_", "-").lower()
    if name == "poly":
        return KernelSpec.polynomial(alpha, d)
    if name in ("laplace", "grbf"):
        if gamma is None:
            gamma = 1.0 if name == "laplace" else 2.0
        if sigma is None:
            sigma = median_heuristic(X, gamma, seed)
        return KernelSpec.exp_power(gamma, sigma)
    if name == "laplace-rk":
        if sigma is None:
            sigma = median_heuristic(X, 1.0, seed)
        return KernelSpec.laplace_rk(sigma)
    raise ValueError(f"unknown kernel {name!r}; expected one of {KERNEL_NAMES}")
