"""Gaussian padding of limited snapshot data and snapshot pairing.

When only ``m_true`` of the desired ``m_target`` snapshots are available,
the missing columns are filled with i.i.d. Gaussian vectors appended after
the genuine ones. Pairing then runs over the single padded sequence, so the
pair straddling the genuine/synthetic boundary is kept.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive_int, check_snapshots

__all__ = [
    "GENERATOR_ID",
    "make_rng",
    "AugmentationPlan",
    "AugmentedSequence",
    "SnapshotPairs",
    "pad_snapshots",
    "build_pairs",
    "GaussianPadder",
]

GENERATOR_ID = "numpy.random.PCG64"

_SCALE_MODES = ("unit", "data_std")


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class AugmentationPlan:
    m_target: int
    m_true: int
    mean: object = 0.0
    scale_mode: str = "unit"
    seed: int = 0

    def __post_init__(self):
        check_positive_int(self.m_target, "m_target")
        check_positive_int(self.m_true, "m_true")
        if self.m_true > self.m_target:
            raise ValueError(f"m_true ({self.m_true}) exceeds m_target ({self.m_target})")
        if self.scale_mode not in _SCALE_MODES:
            raise ValueError(f"scale_mode must be one of {_SCALE_MODES}, got {self.scale_mode!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def n_synthetic(self):
        return self.m_target - self.m_true


@dataclass
class AugmentedSequence:
    data: np.ndarray
    mask: np.ndarray

    @property
    def n_true(self):
        return int(self.mask.sum())


@dataclass
class SnapshotPairs:
    """Snapshot pairs ``(X, Y)`` with ``Y[:, k]`` the one-step image of ``X[:, k]``."""

    X: np.ndarray
    Y: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.X = check_snapshots(self.X, "X")
        self.Y = check_snapshots(self.Y, "Y")
        if self.X.shape != self.Y.shape:
            raise ValueError(
                f"X and Y must have the same shape, got {self.X.shape} and {self.Y.shape}"
            )

    @property
    def shape(self):
        return self.X.shape


def pad_snapshots(true_data, plan):
    """Append ``plan.n_synthetic`` Gaussian columns to ``true_data``.

    Draws come sequentially from ``PCG64(plan.seed)`` in column-major order,
    one column of ``n`` standard normals at a time, then get scaled and
    shifted by the plan's mean. ``data_std`` mode scales by the global
    standard deviation of the genuine entries.
    """
    true_data = check_snapshots(true_data, "true_data")
    n, m0 = true_data.shape
    if m0 != plan.m_true:
        raise ValueError(f"true_data has {m0} columns but plan.m_true is {plan.m_true}")
    mean = np.broadcast_to(np.asarray(plan.mean, dtype=float), (n,))

    data = np.empty((n, plan.m_target))
    data[:, :m0] = true_data
    k = plan.n_synthetic
    if k:
        scale = 1.0 if plan.scale_mode == "unit" else float(np.std(true_data))
        draws = make_rng(plan.seed).standard_normal((k, n)).T
        data[:, m0:] = mean[:, None] + scale * draws
    mask = np.zeros(plan.m_target, dtype=bool)
    mask[:m0] = True
    return AugmentedSequence(data=data, mask=mask)


def build_pairs(seq):
    """``X = columns 0..m-2``, ``Y = columns 1..m-1`` of a snapshot sequence."""
    data = seq.data if isinstance(seq, AugmentedSequence) else np.asarray(seq)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError("at least 2 snapshots are required to build pairs")
    return SnapshotPairs(X=data[:, :-1], Y=data[:, 1:])


class GaussianPadder(TransformerMixin, BaseEstimator):
    """Transformer padding a short trajectory to ``m_target`` snapshots.

    Follows the scikit-learn orientation: rows are snapshots and columns are
    state variables, so ``transform`` returns ``(m_target, n)``.

    Parameters
    ----------
    m_target : int
        Snapshot count after padding.
    mean : float or array-like, default=0.0
        Mean of the synthetic vectors.
    scale_mode : {"unit", "data_std"}, default="unit"
    seed : int, default=0
    """

    def __init__(self, m_target=151, mean=0.0, scale_mode="unit", seed=0):
        self.m_target = m_target
        self.mean = mean
        self.scale_mode = scale_mode
        self.seed = seed

    def fit(self, X, y=None):
        X = check_snapshots(np.asarray(X).T, "X")
        self.n_features_in_ = X.shape[0]
        self.plan_ = AugmentationPlan(
            m_target=self.m_target,
            m_true=X.shape[1],
            mean=self.mean,
            scale_mode=self.scale_mode,
            seed=self.seed,
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "plan_")
        X = check_snapshots(np.asarray(X).T, "X")
        seq = pad_snapshots(X, self.plan_)
        self.mask_ = seq.mask
        return seq.data.T
