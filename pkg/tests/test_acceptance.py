"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is printed at the end of the run.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import time
from contextlib import contextmanager
from math import factorial, pi, sinh

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from conftest import lstsq_dmd_eigs, rotation
from kedmd import cli
from kedmd.augment import AugmentationPlan, SnapshotPairs
from kedmd.data_io import FieldLayout, gen_linear_system, gen_oscillator_field, save_snapshots
from kedmd.edmd import FeatureDictionary, edmd_feature, kernel_edmd
from kedmd.kernels import KernelSpec, eval_laplace_rk, median_heuristic
from kedmd.pipeline import compare_kernels
from kedmd.rkhs import (
    AffineSymbol,
    QuadratureGrid,
    closability_sequence,
    monomial_inner_product,
    monomial_inner_product_quadrature,
    pi_ratio,
    rk_norm_bounds,
    rk_norm_sq,
)

# Regression constants for the limited-data comparison, frozen from the first verified build:
# mean top-4 similarity at m0 = 7 against each kernel's own full-data run.
LAPLACE_SIMILARITY_M7 = 0.10517425510476669
GRBF_SIMILARITY_M7 = 0.015761188944234183
REGRESSION_ATOL = 1e-6

SURROGATE = dict(
    layout=FieldLayout(40, 50),
    m=60,
    components=[(0, pi / 8, 0.99, 1.0), (1, pi / 3, 0.95, 1.0)],
    noise_std=0.01,
    seed=7,
)


def rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@contextmanager
def budget(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    print(f"elapsed {elapsed:.3f}s (limit {seconds}s)")
    assert elapsed < seconds, f"took {elapsed:.2f}s, limit {seconds}s"


def matched_deviation(a, b):
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    assert a.size == b.size, f"spectrum sizes differ: {a.size} vs {b.size}"
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


@pytest.mark.criterion(1, "monomial inner products: closed form vs quadrature, rel err <= 1e-8")
def test_criterion_1_quadrature():
    worst = 0.0
    with budget(2.0):
        for sigma in (0.5, 1.0, 2.0):
            grid = QuadratureGrid(64, 64, sigma)
            for N in range(7):
                for M in range(7):
                    q = monomial_inner_product_quadrature(N, M, sigma, grid)
                    ref = monomial_inner_product(N, M, sigma)
                    # off-diagonal values are zero, so errors are taken relative to the diagonal scale
                    scale = np.sqrt(monomial_inner_product(N, N, sigma) * monomial_inner_product(M, M, sigma))
                    worst = max(worst, abs(q - ref) / scale)
    print(f"max relative error {worst:.3e}")
    assert worst <= 1e-8


@pytest.mark.criterion(2, "reproducing kernel closed form vs 40-term series, <= 1e-12")
def test_criterion_2_series():
    g = rng(2)
    t = 10 * np.sqrt(g.uniform(0, 1, 1000)) * np.exp(2j * pi * g.uniform(0, 1, 1000))
    worst = 0.0
    with budget(1.0):
        got = eval_laplace_rk(t)
        for ti, gi in zip(t, got):
            ref = sum(ti**N / factorial(2 * N + 1) for N in range(41))
            worst = max(worst, abs(gi - ref) / max(1.0, abs(gi)))
    print(f"max scaled error {worst:.3e}")
    assert worst <= 1e-12


@pytest.mark.criterion(3, "norm sandwich strict with relative margins > 1e-12 on 1e-3 <= |z|/sigma <= 10")
def test_criterion_3_norm_sandwich():
    g = rng(3)
    u = np.concatenate([[1e-3, 10.0], g.uniform(1e-3, 10.0, 998)])
    margins = np.empty(u.size)
    strict = True
    with budget(1.0):
        for k, uk in enumerate(u):
            sigma = g.uniform(0.5, 2.0)
            d = g.standard_normal(3) + 1j * g.standard_normal(3)
            z = uk * sigma * d / np.linalg.norm(d)
            lo, hi = rk_norm_bounds(z, sigma)
            val = rk_norm_sq(z, sigma)
            strict &= lo < val < hi
            margins[k] = min((val - lo) / val, (hi - val) / val)
        lo1, hi1 = rk_norm_bounds(np.array([1.0]), 1.0)
        val1 = rk_norm_sq(np.array([1.0]), 1.0)
    assert (round(lo1, 4), round(val1, 4), round(hi1, 4)) == (1.1694, 1.1752, 1.1814)
    assert strict, "strict ordering violated"
    worst = int(np.argmin(margins))
    print(f"min relative margin {margins[worst]:.3e} at |z|/sigma = {u[worst]:.4g}")
    assert margins[worst] > 1e-12


@pytest.mark.criterion(4, "feature and kernel spectra agree within 1e-8 on 20 random instances")
def test_criterion_4_equivalence():
    g = rng(4)
    worst, worst_cond = 0.0, 0.0
    with budget(2.0):
        for _ in range(20):
            n = int(g.integers(1, 4))
            degree = {1: int(g.integers(1, 6)), 2: int(g.integers(1, 3)), 3: 1}[n]
            d = FeatureDictionary(n, degree)
            assert d.n_features <= 6
            m = int(g.integers(2, 13))
            X = g.uniform(-1, 1, (n, m))
            Y = np.tanh(g.standard_normal((n, n)) @ X) + 0.1 * X**2
            pairs = SnapshotPairs(X, Y)
            a = edmd_feature(pairs, d).eigenvalues
            b = kernel_edmd(pairs, d).eigenvalues
            dev = matched_deviation(a[np.abs(a) > 1e-6], b[np.abs(b) > 1e-6])
            if dev > worst:
                worst, worst_cond = dev, np.linalg.cond(d.kernel(X, X))
    print(f"max nonzero-spectrum deviation {worst:.3e} (Gram condition number {worst_cond:.2e})")
    assert worst <= 1e-8


@pytest.mark.criterion(5, "degree-1 polynomial kernel recovers {1} and spec(A) within 1e-8")
def test_criterion_5_linear_recovery():
    worst = 0.0
    with budget(1.0):
        for A, x0 in ((np.diag([0.9, 0.5]), [1.0, 1.0]), (rotation(pi / 8, 0.95), [1.0, 0.0])):
            T = gen_linear_system(A, x0, 21)
            X, Y = T[:, :-1], T[:, 1:]
            oracle = np.concatenate([[1.0], lstsq_dmd_eigs(X, Y)])
            res = kernel_edmd(SnapshotPairs(X, Y), KernelSpec.polynomial(1, 1.0))
            worst = max(worst, matched_deviation(res.eigenvalues, oracle))
            assert matched_deviation(oracle[1:], np.linalg.eigvals(A)) <= 1e-10
    print(f"max deviation from least-squares oracle {worst:.3e}")
    assert worst <= 1e-8


@pytest.mark.criterion(6, "identity dynamics collapse the spectrum to 1 within 1e-10")
def test_criterion_6_identity_collapse():
    g = rng(6)
    worst = 0.0
    with budget(1.0):
        for _ in range(5):
            X = g.standard_normal((int(g.integers(1, 6)), int(g.integers(5, 40))))
            for spec in (
                KernelSpec.laplace(median_heuristic(X)),
                KernelSpec.grbf(median_heuristic(X, 2.0)),
                KernelSpec.polynomial(2),
            ):
                res = kernel_edmd(SnapshotPairs(X, X), spec)
                worst = max(worst, float(np.max(np.abs(res.eigenvalues - 1.0))))
    print(f"max |lambda - 1| {worst:.3e}")
    assert worst <= 1e-10


@pytest.mark.criterion(7, "Pi ratio at 20 sigma matches 2 sinh(10)/sinh(20) and drops below 1e-6 by 50 sigma")
def test_criterion_7_pi_decay():
    phi = AffineSymbol.scaled_identity(0.5, 1)
    with budget(1.0):
        at20 = pi_ratio(np.array([20.0]), phi, 1.0)
        at50 = pi_ratio(np.array([50.0]), phi, 1.0)
    ref = 2 * sinh(10.0) / sinh(20.0)
    print(f"Pi(20 sigma) = {at20:.6e}, reference {ref:.6e}; Pi(50 sigma) = {at50:.3e}")
    assert abs(at20 - ref) <= 1e-10 * ref
    assert at50 < 1e-6


@pytest.mark.criterion(8, "closability sequences strictly decreasing from N = 2, final/first < 1e-2")
def test_criterion_8_closability():
    with budget(1.0):
        seqs = [closability_sequence(1000, 1.0), closability_sequence(1000, 1.0, 0.5 * np.eye(2))]
    for seq in seqs:
        assert np.all(seq > 0)
        assert np.all(np.diff(seq[1:]) < 0)
        print(f"final/first {seq[-1] / seq[0]:.3e}")
        assert seq[-1] < 1e-2 * seq[0]


@pytest.mark.criterion(9, "limited data: Laplace beats GRBF at m0 = 7; full-data runs reach similarity 1")
def test_criterion_9_limited_data():
    m = SURROGATE["m"]
    counts = [AugmentationPlan(m, m0).n_synthetic for m0 in (3, 7, 20, 55, m)]
    assert counts == [57, 53, 40, 5, 0]
    with budget(20.0):
        X = gen_oscillator_field(
            SURROGATE["layout"], m, 1.0, SURROGATE["components"], SURROGATE["noise_std"], SURROGATE["seed"]
        )
        rows = compare_kernels(X, (3, 7, 20, 55), ("laplace", "grbf"), top_k=4, baseline="own", seed=SURROGATE["seed"])

    def mean_sim(m0, kernel):
        return float(np.mean([r[4] for r in rows if r[0] == m0 and r[1] == kernel]))

    lap, grbf = mean_sim(7, "laplace"), mean_sim(7, "grbf")
    print(f"m0 = 7: laplace {lap:.6f}, grbf {grbf:.6f}")
    full = [r[4] for r in rows if r[0] == m]
    assert len(full) == 8 and all(abs(s - 1.0) <= 1e-12 for s in full)
    assert lap > grbf
    assert lap == pytest.approx(LAPLACE_SIMILARITY_M7, abs=REGRESSION_ATOL)
    assert grbf == pytest.approx(GRBF_SIMILARITY_M7, abs=REGRESSION_ATOL)


@pytest.mark.criterion(10, "dmd run twice gives bit-identical eigenvalues, modes and images")
def test_criterion_10_determinism(tmp_path):
    X = gen_oscillator_field(SURROGATE["layout"], SURROGATE["m"], 1.0, SURROGATE["components"], 0.01, 7)
    data = tmp_path / "osc.kdmd"
    save_snapshots(X, data)
    with budget(5.0):
        for name in ("a", "b"):
            code = cli.main(["dmd", "--input", str(data), "--kernel", "laplace", "--true-count", "7",
                             "--seed", "7", "--height", "40", "--width", "50", "--top-k", "4",
                             "--out-dir", str(tmp_path / name)])
            assert code == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert {"eigenvalues.csv", "modes_re.csv", "modes_im.csv", "mode_1_re.pgm"} <= set(files)
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))
