import numpy as np
import pytest

from kedmd.data_io import FieldLayout, gen_oscillator_field
from kedmd.pipeline import compare_kernels, run_limited_data


@pytest.fixture(scope="module")
def field():
    return gen_oscillator_field(FieldLayout(6, 7), 30, components=[(0, np.pi / 8, 0.99), (1, np.pi / 3, 0.95)], noise_std=0.01, seed=2)


def test_meta(field):
    _, meta = run_limited_data(field, "laplace", m_true=5, seed=3)
    assert meta["m_true"] == 5 and meta["m_target"] == 30 and meta["n_synthetic"] == 25
    assert meta["generator"] == "numpy.random.PCG64" and meta["seed"] == 3
    assert meta["kernel"]["gamma"] == 1.0 and meta["state_dim"] == 42


def test_pad_beyond_available(field):
    res, meta = run_limited_data(field, "grbf", m_true=3, m_target=151)
    assert meta["n_synthetic"] == 148 and res.phi_data.shape[0] == 150


def test_too_many_true(field):
    with pytest.raises(ValueError, match="exceeds"):
        run_limited_data(field, m_true=31)


def test_deterministic(field):
    a, _ = run_limited_data(field, m_true=4, seed=9)
    b, _ = run_limited_data(field, m_true=4, seed=9)
    np.testing.assert_array_equal(a.modes, b.modes)


def test_compare_full_only(field):
    rows = compare_kernels(field, m0_list=[30], top_k=3)
    assert {r[0] for r in rows} == {30}
    laplace = [r for r in rows if r[1] == "laplace"]
    assert len(laplace) == 3 and all(r[4] == pytest.approx(1.0, abs=1e-12) for r in laplace)


def test_compare_row_count(field):
    rows = compare_kernels(field, m0_list=[3, 7, 20], top_k=2, baseline="own")
    assert len(rows) == 2 * 4 * 2
    assert all(r[4] == pytest.approx(1.0, abs=1e-12) for r in rows if r[0] == 30)


def test_compare_bad_inputs(field):
    with pytest.raises(ValueError):
        compare_kernels(field, m0_list=[40])
    with pytest.raises(ValueError):
        compare_kernels(field, baseline="grbf")
