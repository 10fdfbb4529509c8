"""Analytics for the RKHS of entire functions under the Laplacian measure.

The reproducing kernel is ``K(z, w) = sinh(sqrt(t))/sqrt(t)`` with
``t = <z, w>/sigma**2``; its diagonal ``||K_z||**2 = sinh(u)/u`` with
``u = ||z||/sigma`` drives the norm bounds, the compactness ratio and the
closability sequences below.
"""

from dataclasses import dataclass, field
from math import factorial, pi

import numpy as np

from ._validation import check_positive, check_positive_int
from .kernels import eval_laplace_rk

__all__ = [
    "MAX_DEGREE",
    "AffineSymbol",
    "QuadratureGrid",
    "monomial_inner_product",
    "monomial_inner_product_quadrature",
    "onb_eval",
    "rk_norm_sq",
    "log_rk_norm_sq",
    "rk_norm_bounds",
    "pi_ratio",
    "pi_sup_estimate",
    "closability_sequence",
]

MAX_DEGREE = 20


def _check_degree(N, name):
    N = check_positive_int(N, name, minimum=0)
    if N > MAX_DEGREE:
        raise ValueError(
            f"{name}={N} exceeds {MAX_DEGREE}: factorial growth would overflow "
            "or lose precision in double arithmetic"
        )
    return N


@dataclass(frozen=True)
class AffineSymbol:
    """The map ``z -> A @ z + B`` on C^n."""

    A: np.ndarray
    B: np.ndarray
    norm_A: float = field(init=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        B = np.atleast_1d(np.asarray(self.B))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if B.shape != (A.shape[0],):
            raise ValueError(f"B must have length {A.shape[0]}, got shape {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "norm_A", float(np.linalg.norm(A, 2)))

    @classmethod
    def scaled_identity(cls, c, n, B=None):
        return cls(c * np.eye(n), np.zeros(n) if B is None else B)

    @property
    def dim(self):
        return self.A.shape[0]

    def __call__(self, z):
        return self.A @ z + self.B


@dataclass(frozen=True)
class QuadratureGrid:
    """Polar grid: Gauss-Laguerre in the radius, uniform trapezoid in the angle."""

    radial: int = 64
    angular: int = 64
    sigma: float = 1.0

    def __post_init__(self):
        check_positive_int(self.radial, "radial", minimum=4)
        check_positive_int(self.angular, "angular", minimum=4)
        check_positive(self.sigma, "sigma")

    def nodes(self):
        u, w = np.polynomial.laguerre.laggauss(self.radial)
        theta = 2.0 * pi * np.arange(self.angular) / self.angular
        return u, w, theta


def monomial_inner_product(N, M, sigma):
    """``integral over C of z**N conj(z)**M exp(-|z|/sigma) dA``, in closed form."""
    N = _check_degree(N, "N")
    M = _check_degree(M, "M")
    sigma = check_positive(sigma, "sigma")
    if N != M:
        return 0.0
    return 2.0 * pi * sigma**2 * sigma ** (N + M) * float(factorial(N + M + 1))


def monomial_inner_product_quadrature(N, M, sigma, grid=None):
    """Numerical counterpart of :func:`monomial_inner_product`.

    With ``r = sigma * u`` the radial factor is
    ``sigma**(N+M+2) * integral u**(N+M+1) exp(-u) du`` (Gauss-Laguerre);
    the angular factor integrates ``exp(i (N - M) theta)`` with the
    trapezoid rule over one full period.
    """
    N = check_positive_int(N, "N", minimum=0)
    M = check_positive_int(M, "M", minimum=0)
    sigma = check_positive(sigma, "sigma")
    if grid is None:
        grid = QuadratureGrid(sigma=sigma)
    u, w, theta = grid.nodes()
    radial = sigma ** (N + M + 2) * np.sum(w * u ** (N + M + 1))
    angular = 2.0 * pi * np.mean(np.exp(1j * (N - M) * theta))
    return complex(radial * angular)


def onb_eval(N, sigma, z):
    """Orthonormal basis element ``z**N / sqrt(sigma**(2N) (2N+1)!)``."""
    N = _check_degree(N, "N")
    sigma = check_positive(sigma, "sigma")
    return np.asarray(z) ** N / np.sqrt(sigma ** (2 * N) * float(factorial(2 * N + 1)))


def _radius(z, sigma):
    sigma = check_positive(sigma, "sigma")
    return float(np.linalg.norm(np.atleast_1d(np.asarray(z)))) / sigma


def log_rk_norm_sq(z, sigma):
    """``log(sinh(u)/u)`` with ``u = ||z||/sigma``, stable for large ``u``."""
    u = _radius(z, sigma)
    if u < 1.0:
        return float(np.log(eval_laplace_rk(u * u)))
    return u + np.log1p(-np.exp(-2.0 * u)) - np.log(2.0 * u)


def rk_norm_sq(z, sigma):
    """Squared norm of the reproducing kernel at ``z``: ``sinh(u)/u``, equal to 1 at 0."""
    u = _radius(z, sigma)
    return float(eval_laplace_rk(u * u))


def _xcothx_minus_one(u):
    if u < 0.1:
        # u coth u - 1 = sum_{k>=1} 2^{2k} B_{2k} u^{2k} / (2k)!
        u2 = u * u
        return u2 * (1 / 3 + u2 * (-1 / 45 + u2 * (2 / 945 + u2 * (-1 / 4725 + u2 * 2 / 93555))))
    return u / np.tanh(u) - 1.0


def rk_norm_bounds(z, sigma):
    """Lower/upper bounds ``exp((u coth u - 1)/2) < sinh(u)/u < exp(u**2/6)``."""
    u = _radius(z, sigma)
    if u == 0.0:
        raise ValueError("bounds degenerate at z = 0 (norm and both bounds equal 1)")
    lower = float(np.exp(0.5 * _xcothx_minus_one(u)))
    upper = float(np.exp(u * u / 6.0))
    return lower, upper


def pi_ratio(z, phi, sigma):
    """``||K_{phi(z)}||**2 / ||K_z||**2`` for an affine symbol ``phi``."""
    z = np.atleast_1d(np.asarray(z))
    if z.shape != (phi.dim,):
        raise ValueError(f"z must have length {phi.dim}, got shape {z.shape}")
    return float(np.exp(log_rk_norm_sq(phi(z), sigma) - log_rk_norm_sq(z, sigma)))


def pi_sup_estimate(phi, sigma, radii, directions_per_radius=16, seed=0):
    """Sampled maximum of :func:`pi_ratio` over shells ``||z|| = r * sigma``.

    Directions are uniform on the complex unit sphere, drawn from a seeded
    generator; the result is a lower bound on the supremum.
    """
    sigma = check_positive(sigma, "sigma")
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if radii.size == 0:
        raise ValueError("radii must be non-empty")
    directions_per_radius = check_positive_int(directions_per_radius, "directions_per_radius")
    rng = np.random.Generator(np.random.PCG64(seed))
    n = phi.dim
    best = -np.inf
    for r in radii:
        for _ in range(directions_per_radius):
            d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            d /= np.linalg.norm(d)
            best = max(best, pi_ratio(r * sigma * d, phi, sigma))
    return best


def closability_sequence(n_terms, sigma, A=None):
    """Terms ``sigma * sin(||z_N||/sigma)`` at ``z_N = e_1 / N`` for ``N = 1..n_terms``.

    With ``A`` given, returns the image sequence ``sigma * sin(||A z_N||/sigma)``.
    """
    n_terms = check_positive_int(n_terms, "n_terms")
    sigma = check_positive(sigma, "sigma")
    N = np.arange(1, n_terms + 1, dtype=float)
    if A is None:
        radius = 1.0 / N
    else:
        A = np.atleast_2d(np.asarray(A))
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        # ||A (e_1/N)|| = ||A[:, 0]|| / N
        radius = np.linalg.norm(A[:, 0]) / N
    return sigma * np.sin(radius / sigma)
