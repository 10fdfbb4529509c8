"""Named numerical property checks, run by ``kedmd validate``.

Each check takes a seed and returns ``(passed, detail)``. Oracles here are
deliberately naive (explicit series, quadrature, least squares) so they stay
independent of the code paths they check.
"""

from math import ceil, factorial, pi

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import data_io
from .augment import AugmentationPlan, SnapshotPairs, make_rng, pad_snapshots
from .edmd import FeatureDictionary, edmd_feature, kernel_edmd, koopman_modes
from .kernels import KernelSpec, eval_laplace_rk, gram, median_heuristic
from .linalg import eig_general, pinv_values, svd
from .rkhs import (
    AffineSymbol,
    QuadratureGrid,
    closability_sequence,
    monomial_inner_product,
    monomial_inner_product_quadrature,
    onb_eval,
    pi_ratio,
    rk_norm_bounds,
    rk_norm_sq,
)

__all__ = ["CHECKS", "run_checks", "select", "series_oracle", "match_spectra"]


def series_oracle(t, terms=40):
    """``sum_{N <= terms} t**N / (2N+1)!`` term by term."""
    total = 0j
    for N in range(terms + 1):
        total += t**N / factorial(2 * N + 1)
    return total


def match_spectra(a, b):
    """Largest deviation of an optimal one-to-one matching between two eigenvalue lists."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        return np.inf
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0


def _random_complex(rng, n, radius):
    d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return radius * d / np.linalg.norm(d)


# -- kernels -----------------------------------------------------------------


def check_kernel_symmetry(seed):
    rng = make_rng(seed)
    specs = [
        KernelSpec.laplace(1.3),
        KernelSpec.grbf(0.7),
        KernelSpec.exp_power(1.5, 2.0),
        KernelSpec.polynomial(3, 1.7),
        KernelSpec.laplace_rk(2.0),
    ]
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 6))
        x, z = rng.standard_normal(n), rng.standard_normal(n)
        for k in specs:
            a, b = k(x, z), k(z, x)
            worst = max(worst, abs(a - b) / max(abs(a), np.finfo(float).tiny))
    return worst <= 1e-15, f"max relative asymmetry {worst:.2e}"


def check_kernel_bounds(seed):
    rng = make_rng(seed)
    ok = True
    for _ in range(200):
        n = int(rng.integers(1, 6))
        x, z = rng.standard_normal(n), 3 * rng.standard_normal(n)
        for g in (1.0, 2.0, 0.5):
            k = KernelSpec.exp_power(g, float(rng.uniform(0.1, 5)))
            v = k(x, z)
            ok &= 0.0 < v <= 1.0 and k(x, x) == 1.0
    return bool(ok), "exp-power values in (0, 1], k(x, x) == 1"


def check_kernel_psd(seed):
    rng = make_rng(seed)
    worst = -np.inf
    for _ in range(20):
        m = int(rng.integers(2, 51))
        X = rng.standard_normal((int(rng.integers(1, 8)), m))
        for g in (1.0, 2.0):
            sigma = median_heuristic(X, g) * float(rng.uniform(0.2, 5))
            lam = np.linalg.eigvalsh(gram(X, KernelSpec.exp_power(g, sigma)))
            worst = max(worst, -lam[0] / lam[-1])
    return worst <= 1e-10, f"max -lambda_min/lambda_max {worst:.2e}"


def check_kernel_series(seed):
    rng = make_rng(seed)
    r = 10 * np.sqrt(rng.uniform(0, 1, 1000))
    t = r * np.exp(2j * pi * rng.uniform(0, 1, 1000))
    got = eval_laplace_rk(t)
    worst = 0.0
    for ti, gi in zip(t, got):
        ref = series_oracle(complex(ti))
        worst = max(worst, abs(gi - ref) / max(1.0, abs(gi)))
    return worst <= 1e-12, f"max scaled error {worst:.2e}"


def check_moore_aronszajn(seed):
    rng = make_rng(seed)
    worst = 0.0
    for sigma in (0.5, 1.0, 2.0):
        for _ in range(100):
            z = complex(_random_complex(rng, 1, 3 * sigma * rng.uniform())[0])
            w = complex(_random_complex(rng, 1, 3 * sigma * rng.uniform())[0])
            total = sum(onb_eval(N, sigma, z) * np.conj(onb_eval(N, sigma, w)) for N in range(21))
            # terms beyond N = 20 are below 1e-30 for |z w| <= 9 sigma^2
            worst = max(worst, abs(total - eval_laplace_rk(z * np.conj(w) / sigma**2)))
    return worst <= 1e-10, f"max |basis sum - kernel| {worst:.2e}"


# -- rkhs --------------------------------------------------------------------


def check_quadrature(seed):
    worst = 0.0
    for sigma in (0.5, 1.0, 2.0):
        grid = QuadratureGrid(64, 64, sigma)
        for N in range(7):
            for M in range(7):
                q = monomial_inner_product_quadrature(N, M, sigma, grid)
                ref = monomial_inner_product(N, M, sigma)
                scale = np.sqrt(monomial_inner_product(N, N, sigma) * monomial_inner_product(M, M, sigma))
                worst = max(worst, abs(q - ref) / scale)
    return worst <= 1e-8, f"max relative error {worst:.2e}"


def check_orthonormality(seed):
    worst = 0.0
    for sigma in (0.5, 1.0, 2.0):
        grid = QuadratureGrid(64, 64, sigma)
        for N in range(7):
            for M in range(7):
                norm = np.sqrt(sigma ** (2 * N) * factorial(2 * N + 1) * sigma ** (2 * M) * factorial(2 * M + 1))
                g = monomial_inner_product_quadrature(N, M, sigma, grid) / norm / (2 * pi * sigma**2)
                worst = max(worst, abs(g - (N == M)))
    return worst <= 1e-8, f"max |<e_N, e_M> - delta| {worst:.2e}"


def check_norm_bounds(seed):
    rng = make_rng(seed)
    # both ends of the range are always sampled so the verdict does not hinge on the seed
    u_values = np.concatenate([[1e-3, 10.0], rng.uniform(1e-3, 10.0, 998)])
    worst_margin = np.inf
    strict = True
    for u in u_values:
        sigma = float(rng.uniform(0.5, 2.0))
        z = _random_complex(rng, 3, u * sigma)
        lo, hi = rk_norm_bounds(z, sigma)
        val = rk_norm_sq(z, sigma)
        strict &= lo < val < hi
        worst_margin = min(worst_margin, (val - lo) / val, (hi - val) / val)
    spot_lo, spot_hi = rk_norm_bounds(np.array([1.0]), 1.0)
    spot = rk_norm_sq(np.array([1.0]), 1.0)
    spot_ok = round(spot_lo, 4) == 1.1694 and round(spot, 4) == 1.1752 and round(spot_hi, 4) == 1.1814
    ok = strict and worst_margin > 1e-12 and spot_ok
    return ok, f"strict ordering {'holds' if strict else 'violated'}; min relative margin {worst_margin:.2e}; at ||z|| = sigma: {spot_lo:.4f} < {spot:.4f} < {spot_hi:.4f}"


def check_point_evaluation(seed):
    rng = make_rng(seed)
    worst = -np.inf
    for _ in range(1000):
        sigma = float(rng.uniform(0.5, 2.0))
        c = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        z = complex(_random_complex(rng, 1, 5 * sigma * rng.uniform())[0])
        f_z = sum(c[N] * onb_eval(N, sigma, z) for N in range(7))
        bound = np.sqrt(rk_norm_sq(np.array([z]), sigma)) * np.linalg.norm(c)
        worst = max(worst, abs(f_z) / bound)
    return worst <= 1.0, f"max |f(z)| / (||K_z|| ||f||) {worst:.6f}"


def check_weak_convergence(seed):
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(50):
        sigma = float(rng.uniform(0.5, 2.0))
        n = int(rng.integers(1, 4))
        direction = rng.standard_normal(n)
        direction /= np.linalg.norm(direction)
        w = float(rng.uniform(0.05, 1.0)) * sigma * direction

        def g(s):
            z = s * sigma * direction
            return abs(eval_laplace_rk(np.dot(z, w) / sigma**2)) / np.sqrt(rk_norm_sq(z, sigma))

        worst = max(worst, g(50.0) / g(1.0))
    return worst < 1e-6, f"max value ratio (50 sigma vs sigma) {worst:.2e}"


def check_pi_decay(seed):
    rng = make_rng(seed)
    ok = True
    worst_tail = 0.0
    for c in (0.3, 0.5, 0.9):
        for _ in range(10):
            sigma = float(rng.uniform(0.5, 2.0))
            n = int(rng.integers(1, 4))
            phi = AffineSymbol.scaled_identity(c, n, _random_complex(rng, n, sigma * rng.uniform()))
            ray = _random_complex(rng, n, 1.0)
            r_end = 50 * sigma / (1 - c)
            radii = np.linspace(r_end / 2, r_end, 50)
            vals = np.array([pi_ratio(r * ray, phi, sigma) for r in radii])
            ok &= bool(np.all(np.diff(vals) < 0))
            worst_tail = max(worst_tail, vals[-1])
    exact = pi_ratio(np.array([20.0]), AffineSymbol.scaled_identity(0.5, 1), 1.0)
    ref = 2 * np.sinh(10.0) / np.sinh(20.0)
    ok &= abs(exact - ref) <= 1e-10 * ref and worst_tail < 1e-6
    return bool(ok), f"tail max {worst_tail:.2e}; Pi(20 sigma) = {exact:.6e} vs {ref:.6e}"


def check_closability(seed):
    ok = True
    detail = []
    for sigma in (0.5, 1.0, 2.0):
        start = ceil(2 / (pi * sigma)) + 1
        for A in (None, 0.5 * np.eye(2)):
            seq = closability_sequence(1000, sigma, A)
            tail = seq[start - 1:]
            ok &= bool(np.all(seq > 0) and np.all(np.diff(tail) < 0) and seq[-1] < 1e-2 * seq[0])
            detail.append(f"{seq[-1] / seq[0]:.2e}")
    return bool(ok), "final/first ratios " + ", ".join(detail)


# -- linalg ------------------------------------------------------------------


def check_moore_penrose(seed):
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(10):
        X = rng.standard_normal((int(rng.integers(1, 6)), int(rng.integers(2, 40))))
        for spec in (KernelSpec.laplace(median_heuristic(X)), KernelSpec.polynomial(1)):
            G = gram(X, spec)
            dec = svd(G)
            Gp = (dec.Z * pinv_values(dec.S, shape=G.shape)) @ dec.Q.T
            worst = max(worst, np.linalg.norm(G @ Gp @ G - G) / np.linalg.norm(G))
    return worst <= 1e-8, f"max ||G G+ G - G|| / ||G|| {worst:.2e}"


def check_linalg_determinism(seed):
    rng = make_rng(seed)
    M = rng.standard_normal((30, 30))
    a, b = svd(M), svd(M)
    e1, e2 = eig_general(M), eig_general(M)
    same = (
        np.array_equal(a.Q, b.Q) and np.array_equal(a.S, b.S) and np.array_equal(a.Z, b.Z)
        and np.array_equal(e1.values, e2.values) and np.array_equal(e1.vectors, e2.vectors)
    )
    return bool(same), "repeated decompositions bitwise identical"


# -- augment -----------------------------------------------------------------


def check_augment_stats(seed):
    n, m0, m = 1000, 1, 101
    true = np.zeros((n, m0))
    seq = pad_snapshots(true, AugmentationPlan(m, m0, seed=seed))
    synth = seq.data[:, m0:]
    mean, std = float(synth.mean()), float(synth.std())
    ok = synth.size >= 100_000 and abs(mean) <= 0.02 and abs(std - 1) <= 0.02
    return ok, f"{synth.size} draws: mean {mean:+.4f}, std {std:.4f}"


def check_augment_determinism(seed):
    rng = make_rng(seed)
    true = rng.standard_normal((17, 5))
    plan = AugmentationPlan(40, 5, seed=seed)
    a, b = pad_snapshots(true, plan), pad_snapshots(true, plan)
    same = np.array_equal(a.data, b.data) and np.array_equal(a.mask, b.mask)
    verbatim = np.array_equal(a.data[:, :5], true) and int(a.mask.sum()) == 5
    return bool(same and verbatim), "padding reproducible; genuine columns verbatim"


# -- edmd --------------------------------------------------------------------


def _nonlinear_step(X, rng):
    W = rng.standard_normal((X.shape[0], X.shape[0])) * 0.5
    return np.tanh(W @ X) + 0.1 * X**2


def check_spectral_equivalence(seed):
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        degree = {1: int(rng.integers(1, 6)), 2: int(rng.integers(1, 3)), 3: 1}[n]
        dictionary = FeatureDictionary(n, degree)
        m = int(rng.integers(2, 13))
        X = rng.uniform(-1, 1, (n, m))
        pairs = SnapshotPairs(X, _nonlinear_step(X, rng))
        kf = edmd_feature(pairs, dictionary)
        kk = kernel_edmd(pairs, dictionary)
        a = kf.eigenvalues[np.abs(kf.eigenvalues) > 1e-6]
        b = kk.eigenvalues[np.abs(kk.eigenvalues) > 1e-6]
        worst = max(worst, match_spectra(a, b))
    return worst <= 1e-8, f"max nonzero-spectrum mismatch {worst:.2e}"


def _linear_case(rng, n):
    lam = rng.uniform(0.5, 0.95, n) * rng.choice([-1.0, 1.0], n)
    V = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    A = V @ np.diag(lam) @ np.linalg.inv(V)
    return A, data_io.gen_linear_system(A, rng.standard_normal(n), 3 * n + 6)


def check_exact_dmd(seed):
    rng = make_rng(seed)
    worst = 0.0
    for n in (1, 2, 3, 4):
        A, traj = _linear_case(rng, n)
        X, Y = traj[:, :-1], traj[:, 1:]
        A_ls = np.linalg.lstsq(X.T, Y.T, rcond=None)[0].T
        oracle = np.concatenate([[1.0], np.linalg.eigvals(A_ls)])
        res = kernel_edmd(SnapshotPairs(X, Y), KernelSpec.polynomial(1, 1.0))
        worst = max(worst, match_spectra(res.eigenvalues, oracle))
    return worst <= 1e-8, f"max deviation from least-squares DMD spectrum {worst:.2e}"


def check_reconstruction(seed):
    rng = make_rng(seed)
    X = rng.standard_normal((4, 15))
    phi = rng.standard_normal((15, 6)) + 1j * rng.standard_normal((15, 6))
    Xi = koopman_modes(phi, X).T
    base = np.linalg.norm(X.T - phi @ Xi)
    worst = np.inf
    for _ in range(100):
        D = rng.standard_normal(Xi.shape) + 1j * rng.standard_normal(Xi.shape)
        D *= 1e-3 / np.linalg.norm(D)
        worst = min(worst, np.linalg.norm(X.T - phi @ (Xi + D)) - base)
    return worst >= 0, f"min residual change under perturbation {worst:.2e}"


def check_edmd_determinism(seed):
    rng = make_rng(seed)
    X = rng.standard_normal((6, 25))
    pairs = SnapshotPairs(X[:, :-1], X[:, 1:])
    spec = KernelSpec.laplace(median_heuristic(pairs.X))
    a, b = kernel_edmd(pairs, spec), kernel_edmd(pairs, spec)
    same = all(
        np.array_equal(getattr(a, f), getattr(b, f))
        for f in ("eigenvalues", "eigvecs_hat", "phi_data", "modes", "singular_values")
    )
    return bool(same), "repeated kernel eDMD bitwise identical"


# -- data_io -----------------------------------------------------------------


def check_io_roundtrip(seed):
    import tempfile
    from pathlib import Path

    rng = make_rng(seed)
    X = rng.standard_normal((5, 7)) * 10.0 ** rng.integers(-200, 200, (5, 7))
    with tempfile.TemporaryDirectory() as tmp:
        data_io.save_snapshots(X, Path(tmp) / "x.kdmd")
        data_io.save_snapshots(X, Path(tmp) / "x.csv")
        b = data_io.load_snapshots(Path(tmp) / "x.kdmd")
        c = data_io.load_snapshots(Path(tmp) / "x.csv")
        data_io.write_pgm(Path(tmp) / "m.pgm", rng.standard_normal((3, 4)))
        pix, maxval = data_io.read_pgm(Path(tmp) / "m.pgm")
    ok = np.array_equal(b, X) and np.array_equal(c, X) and pix.shape == (3, 4) and maxval == 255
    return bool(ok), "binary and CSV round-trips lossless; PGM header valid"


CHECKS = {
    "kernels.symmetry": check_kernel_symmetry,
    "kernels.bounds": check_kernel_bounds,
    "kernels.psd": check_kernel_psd,
    "kernels.series": check_kernel_series,
    "kernels.moore_aronszajn": check_moore_aronszajn,
    "rkhs.quadrature": check_quadrature,
    "rkhs.orthonormality": check_orthonormality,
    "rkhs.bounds": check_norm_bounds,
    "rkhs.point_eval": check_point_evaluation,
    "rkhs.weak_convergence": check_weak_convergence,
    "rkhs.pi_decay": check_pi_decay,
    "rkhs.closability": check_closability,
    "linalg.moore_penrose": check_moore_penrose,
    "linalg.determinism": check_linalg_determinism,
    "augment.stats": check_augment_stats,
    "augment.determinism": check_augment_determinism,
    "edmd.equivalence": check_spectral_equivalence,
    "edmd.exact_dmd": check_exact_dmd,
    "edmd.reconstruction": check_reconstruction,
    "edmd.determinism": check_edmd_determinism,
    "io.roundtrip": check_io_roundtrip,
}


def select(only=None):
    """Check names matching ``only`` (exact names or dotted prefixes such as ``rkhs``)."""
    if not only:
        return list(CHECKS)
    chosen = []
    for pattern in only:
        hits = [name for name in CHECKS if name == pattern or name.startswith(pattern + ".")]
        if not hits:
            raise KeyError(pattern)
        chosen.extend(h for h in hits if h not in chosen)
    return chosen


def run_checks(names, seed=0):
    """Yield ``(name, passed, detail)``; an exception inside a check counts as a failure."""
    for name in names:
        try:
            passed, detail = CHECKS[name](seed)
        except Exception as exc:  # noqa: BLE001 - reported as a failed property
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        yield name, bool(passed), detail
