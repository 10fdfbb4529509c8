"""Limited-data kernel eDMD: truncate, pad, pair, decompose."""

import numpy as np

from ._validation import check_positive_int, check_snapshots
from .augment import GENERATOR_ID, AugmentationPlan, build_pairs, pad_snapshots
from .edmd import kernel_edmd, mode_similarity
from .kernels import make_kernel
from .linalg import EPS

__all__ = ["DEFAULT_M0", "run_limited_data", "compare_kernels"]

DEFAULT_M0 = (3, 7, 20, 55)


def run_limited_data(
    data,
    kernel="laplace",
    m_true=None,
    m_target=None,
    seed=0,
    pad_mode="unit",
    sigma=None,
    gamma=None,
    alpha=1,
    d=1.0,
    rtol=EPS,
):
    """Keep the first ``m_true`` snapshots, pad to ``m_target`` and run kernel eDMD.

    ``m_true`` and ``m_target`` default to the number of available columns.
    An unset ``sigma`` is chosen by the median heuristic on the padded data.
    Returns ``(result, meta)``.
    """
    data = check_snapshots(data, "data")
    available = data.shape[1]
    m_true = available if m_true is None else check_positive_int(m_true, "m_true")
    m_target = available if m_target is None else check_positive_int(m_target, "m_target")
    if m_true > available:
        raise ValueError(f"m_true={m_true} exceeds the {available} available snapshots")
    plan = AugmentationPlan(m_target=m_target, m_true=m_true, scale_mode=pad_mode, seed=seed)
    seq = pad_snapshots(data[:, :m_true], plan)
    pairs = build_pairs(seq)
    spec = make_kernel(kernel, seq.data, sigma, gamma, alpha, d, seed)
    result = kernel_edmd(pairs, spec, rtol)
    meta = {
        "kernel_name": kernel,
        "kernel": spec.to_dict(),
        "sigma": spec.to_dict().get("sigma"),
        "seed": int(seed),
        "rtol": float(rtol),
        "m_true": int(m_true),
        "m_target": int(m_target),
        "n_synthetic": int(plan.n_synthetic),
        "pad_mode": pad_mode,
        "generator": GENERATOR_ID,
        "rank": int(result.rank),
        "state_dim": int(data.shape[0]),
    }
    return result, meta


def compare_kernels(
    data,
    m0_list=DEFAULT_M0,
    kernels=("laplace", "grbf"),
    top_k=4,
    baseline="laplace",
    **options,
):
    """Similarity of top-``k`` modes at each ``m0`` against a full-data baseline.

    ``baseline="laplace"`` compares every run with the full-data Laplace
    modes; ``baseline="own"`` compares each kernel with its own full-data
    run. The full-data count is always included in ``m0_list``. Rows are
    ``(m0, kernel, mode, magnitude, similarity)`` with ``mode`` the 1-based
    baseline mode index and ``magnitude`` the matched run eigenvalue's modulus.
    """
    data = check_snapshots(data, "data")
    full = options.get("m_target") or data.shape[1]
    values = sorted({int(v) for v in m0_list} | {full})
    if values[0] < 1 or values[-1] > full:
        raise ValueError(f"m0 values must lie in [1, {full}]")
    if baseline not in ("laplace", "own"):
        raise ValueError("baseline must be 'laplace' or 'own'")

    def run(kernel, m0):
        result, _ = run_limited_data(data, kernel, m_true=m0, **options)
        return result.top(top_k)

    full_runs = {k: run(k, full) for k in kernels}
    if baseline == "laplace" and "laplace" not in full_runs:
        full_runs["laplace"] = run("laplace", full)

    rows = []
    for m0 in values:
        for kernel in kernels:
            res = full_runs[kernel] if m0 == full else run(kernel, m0)
            base = full_runs["laplace" if baseline == "laplace" else kernel]
            for i, j, sim in mode_similarity(base.modes, base.eigenvalues, res.modes, res.eigenvalues):
                rows.append((m0, kernel, i + 1, float(np.abs(res.eigenvalues[j])), sim))
    return rows
