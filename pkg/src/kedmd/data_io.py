"""Snapshot file formats, synthetic generators and result export.

Binary snapshot layout (little-endian)::

    b"KDMD" | uint32 version=1 | uint64 rows | uint64 cols | float64[rows*cols]

with values in column-major order (one snapshot after another).
"""

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import check_positive_int, check_snapshots
from .augment import make_rng

__all__ = [
    "MAGIC",
    "VERSION",
    "SnapshotFormatError",
    "BadMagicError",
    "UnsupportedVersionError",
    "TruncatedFileError",
    "NonFiniteDataError",
    "RaggedCSVError",
    "FieldLayout",
    "OscillatorComponent",
    "load_snapshots",
    "save_snapshots",
    "format_float",
    "save_result",
    "write_pgm",
    "read_pgm",
    "read_matrix_csv",
    "gen_linear_system",
    "gen_oscillator_field",
    "spatial_profiles",
]

MAGIC = b"KDMD"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


class SnapshotFormatError(ValueError):
    """Base class for unreadable snapshot files."""


class BadMagicError(SnapshotFormatError):
    pass


class UnsupportedVersionError(SnapshotFormatError):
    pass


class TruncatedFileError(SnapshotFormatError):
    pass


class NonFiniteDataError(SnapshotFormatError):
    pass


class RaggedCSVError(SnapshotFormatError):
    pass


@dataclass(frozen=True)
class FieldLayout:
    height: int
    width: int

    def __post_init__(self):
        check_positive_int(self.height, "height")
        check_positive_int(self.width, "width")

    @property
    def size(self):
        return self.height * self.width


@dataclass(frozen=True)
class OscillatorComponent:
    """One travelling-wave component of the synthetic field."""

    profile: int
    omega: float
    rho: float = 1.0
    amplitude: float = 1.0


# -- snapshot files ----------------------------------------------------------


def _infer_format(path, fmt):
    if fmt is not None:
        return fmt
    return "csv" if Path(path).suffix.lower() == ".csv" else "binary"


def save_snapshots(X, path, fmt=None):
    X = check_snapshots(X)
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        lines = [",".join(format_float(v) for v in row) for row in X]
        Path(path).write_text("\n".join(lines) + "\n")
        return
    if fmt != "binary":
        raise ValueError(f"unknown format {fmt!r}")
    rows, cols = X.shape
    payload = np.asarray(X, dtype="<f8").tobytes(order="F")
    Path(path).write_bytes(_HEADER.pack(MAGIC, VERSION, rows, cols) + payload)


def load_snapshots(path, fmt=None):
    """Read a snapshot matrix (n x m) from a binary or CSV file."""
    fmt = _infer_format(path, fmt)
    if fmt == "csv":
        return _load_csv(path)
    if fmt != "binary":
        raise ValueError(f"unknown format {fmt!r}")
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        if not raw.startswith(MAGIC[: len(raw)]):
            raise BadMagicError(f"{path}: not a KDMD snapshot file")
        raise TruncatedFileError(f"{path}: header truncated ({len(raw)} bytes)")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported version {version}")
    if rows == 0 or cols == 0:
        raise SnapshotFormatError(f"{path}: empty matrix ({rows} x {cols})")
    expected = rows * cols * 8
    body = raw[_HEADER.size:]
    if len(body) < expected:
        raise TruncatedFileError(f"{path}: expected {expected} payload bytes, found {len(body)}")
    if len(body) > expected:
        raise SnapshotFormatError(f"{path}: {len(body) - expected} trailing bytes")
    X = np.frombuffer(body, dtype="<f8").reshape((rows, cols), order="F").astype(np.float64)
    if not np.all(np.isfinite(X)):
        raise NonFiniteDataError(f"{path}: non-finite values")
    return X


def read_matrix_csv(path, skip_header=True):
    """Rows of comma-separated floats; a non-numeric first line is skipped."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    rows = []
    for lineno, line in enumerate(lines):
        fields = [f.strip() for f in line.split(",")]
        try:
            rows.append([float(f) for f in fields])
        except ValueError:
            if lineno == 0 and skip_header:
                continue
            raise SnapshotFormatError(f"{path}:{lineno + 1}: non-numeric entry") from None
    if not rows:
        raise SnapshotFormatError(f"{path}: no data rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedCSVError(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
    return np.array(rows, dtype=np.float64)


def _load_csv(path):
    X = read_matrix_csv(path)
    if not np.all(np.isfinite(X)):
        raise NonFiniteDataError(f"{path}: non-finite values")
    return X


# -- result export -----------------------------------------------------------


def format_float(x):
    """Shortest decimal string that round-trips to the same double ("0.9", "0", "1e-20")."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _write_matrix_csv(path, M):
    with open(path, "w") as fh:
        for row in M:
            fh.write(",".join(format_float(v) for v in row))
            fh.write("\n")


def _to_pixels(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        return np.full(values.shape, 128, dtype=np.uint8)
    return np.rint((values - lo) / (hi - lo) * 255.0).astype(np.uint8)


def write_pgm(path, image):
    """Binary (P5) 8-bit greyscale image from a 2-D float array, min-max scaled."""
    image = np.asarray(image, dtype=float)
    h, w = image.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + _to_pixels(image).tobytes())


def read_pgm(path):
    raw = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise SnapshotFormatError(f"{path}: not a P5 image")
    w, h, maxval = (int(t) for t in tokens[1:])
    pixels = np.frombuffer(raw[pos + 1:], dtype=np.uint8)
    if pixels.size != w * h:
        raise SnapshotFormatError(f"{path}: expected {w * h} pixels, found {pixels.size}")
    return pixels.reshape(h, w), maxval


def save_result(result, layout=None, out_dir=".", meta=None, max_images=None):
    """Write eigenvalues, modes and (optionally) per-mode PGM images.

    Files: ``eigenvalues.csv`` (``index,re,im,magnitude``, 1-based index),
    ``modes_re.csv`` / ``modes_im.csv`` (n rows x r columns),
    ``mode_<k>_re.pgm`` for ``k = 1..`` when ``layout`` is given, and
    ``run_meta.json`` holding ``meta``. Returns the list of written paths.
    """
    out = Path(out_dir)
    modes = np.asarray(result.modes)
    n, r = modes.shape
    if layout is not None and layout.size != n:
        raise ValueError(
            f"layout {layout.height}x{layout.width} does not match state dimension {n}"
        )
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "eigenvalues.csv"
    with open(path, "w") as fh:
        fh.write("index,re,im,magnitude\n")
        for k, lam in enumerate(np.asarray(result.eigenvalues, dtype=complex), start=1):
            fh.write(f"{k},{format_float(lam.real)},{format_float(lam.imag)},{format_float(abs(lam))}\n")
    written.append(path)

    for part, values in (("re", modes.real), ("im", modes.imag)):
        path = out / f"modes_{part}.csv"
        _write_matrix_csv(path, values)
        written.append(path)

    if layout is not None:
        n_img = r if max_images is None else min(r, max_images)
        for k in range(n_img):
            path = out / f"mode_{k + 1}_re.pgm"
            write_pgm(path, modes[:, k].real.reshape(layout.height, layout.width))
            written.append(path)

    path = out / "run_meta.json"
    path.write_text(json.dumps(meta or {}, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written


# -- synthetic data ----------------------------------------------------------


def gen_linear_system(A, x0, m):
    """Trajectory ``x_k = A^k x0`` for ``k = 0..m-1`` by repeated multiplication."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    m = check_positive_int(m, "m")
    if A.shape != (x0.size, x0.size):
        raise ValueError(f"A has shape {A.shape} but x0 has length {x0.size}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(x0))):
        raise ValueError("A and x0 must be finite")
    X = np.empty((x0.size, m))
    X[:, 0] = x0
    for k in range(1, m):
        X[:, k] = A @ X[:, k - 1]
    return X


def spatial_profiles(layout, profile):
    """Cosine/sine pair for profile ``profile``: a wave train under a Gaussian envelope.

    Profile ``p`` has streamwise wavenumber ``p + 1`` and transverse
    structure ``sin((p % 3 + 1) * pi * y)``; both arrays are ``height x width``.
    """
    check_positive_int(profile, "profile", minimum=0)
    y = (np.arange(layout.height) + 0.5) / layout.height
    x = (np.arange(layout.width) + 0.5) / layout.width
    Yg, Xg = np.meshgrid(y, x, indexing="ij")
    envelope = np.exp(-((Yg - 0.5) ** 2) / 0.08) * np.exp(-((Xg - 0.6) ** 2) / 0.18)
    transverse = np.sin((profile % 3 + 1) * np.pi * Yg)
    phase = 2.0 * np.pi * (profile + 1) * Xg
    return envelope * transverse * np.cos(phase), envelope * transverse * np.sin(phase)


def gen_oscillator_field(layout, m, dt=1.0, components=(), noise_std=0.0, seed=0):
    """Synthetic flattened field: damped travelling waves plus seeded pixel noise.

    Snapshot ``t`` is ``sum_k a_k rho_k**t [cos(w_k t dt) C_k + sin(w_k t dt) S_k]``
    flattened row-major, where ``(C_k, S_k)`` come from :func:`spatial_profiles`.
    Without noise each component spans at most two dimensions and the
    Koopman eigenvalues are ``rho_k exp(+-i w_k dt)``.
    """
    m = check_positive_int(m, "m")
    components = [c if isinstance(c, OscillatorComponent) else OscillatorComponent(*c) for c in components]
    if not components:
        raise ValueError("at least one component is required")
    if noise_std < 0:
        raise ValueError("noise_std must be non-negative")
    t = np.arange(m)
    X = np.zeros((layout.size, m))
    for c in components:
        C, S = spatial_profiles(layout, c.profile)
        decay = c.amplitude * float(c.rho) ** t
        X += np.outer(C.ravel(), decay * np.cos(c.omega * t * dt))
        X += np.outer(S.ravel(), decay * np.sin(c.omega * t * dt))
    if noise_std > 0:
        X += noise_std * make_rng(seed).standard_normal((m, layout.size)).T
    return X
