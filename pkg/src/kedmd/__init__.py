"""Kernel extended DMD with limited-data padding and Laplacian-measure RKHS tools."""

from .augment import AugmentationPlan, GaussianPadder, SnapshotPairs, build_pairs, pad_snapshots
from .edmd import (
    EdmdResult,
    FeatureDictionary,
    FeatureEDMD,
    KernelEDMD,
    edmd_feature,
    kernel_edmd,
    koopman_modes,
    mode_similarity,
    predict,
)
from .kernels import KernelKind, KernelSpec, gram, interaction, median_heuristic
from .pipeline import compare_kernels, run_limited_data

__version__ = "0.1.0"

__all__ = [
    "AugmentationPlan",
    "GaussianPadder",
    "SnapshotPairs",
    "build_pairs",
    "pad_snapshots",
    "EdmdResult",
    "FeatureDictionary",
    "FeatureEDMD",
    "KernelEDMD",
    "edmd_feature",
    "kernel_edmd",
    "koopman_modes",
    "mode_similarity",
    "predict",
    "KernelKind",
    "KernelSpec",
    "gram",
    "interaction",
    "median_heuristic",
    "compare_kernels",
    "run_limited_data",
]
