"""Input validation helpers shared across the package."""

import numbers

import numpy as np


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return float(value)


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_snapshots(X, name="X", allow_complex=False):
    """Validate a snapshot matrix (rows = state, columns = time samples).

    Returns a 2-D float64 (or complex128) array. One-dimensional input is
    read as a single state row.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric")
    if np.iscomplexobj(arr):
        if not allow_complex:
            raise TypeError(f"{name} must be real-valued")
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} is empty (shape {arr.shape})")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_same_shape(A, B, names=("X", "Y")):
    if A.shape != B.shape:
        raise ValueError(
            f"{names[0]} and {names[1]} must have the same shape, "
            f"got {A.shape} and {B.shape}"
        )
