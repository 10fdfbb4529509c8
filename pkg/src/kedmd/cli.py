"""Command-line interface: ``kedmd {gen,dmd,compare,validate}``.

Exit codes: 0 success, 1 compute or property failure, 2 usage error.
Defaults may come from a flat ``key = value`` file passed with ``--config``;
flags given on the command line win.
"""

import argparse
import configparser
import re
import sys
from math import pi
from pathlib import Path

import numpy as np

from . import data_io
from .kernels import KERNEL_NAMES
from .linalg import EPS
from .pipeline import DEFAULT_M0, compare_kernels, run_limited_data
from .validation import run_checks, select

__all__ = ["main", "build_parser"]


class UsageError(Exception):
    """Bad flags or configuration; exit code 2."""


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {value}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _nonneg_float(text):
    value = _float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return value


def _float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return value


def _float_list(text):
    try:
        return [_float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}: {exc}") from None


def _int_list(text):
    return [_positive_int(t) for t in text.split(",") if t.strip()]


def _name_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


_ANGLE = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.eE+]+))?\s*$")


def _angle(text):
    """A float, or a multiple of pi such as ``pi/8`` or ``2pi/3``."""
    match = _ANGLE.match(text)
    if match is None:
        return float(text)
    num = float(match.group(1)) if match.group(1) else 1.0
    den = float(match.group(2)) if match.group(2) else 1.0
    return num * pi / den


def _components(text):
    """``profile:omega:rho:amplitude`` entries separated by ``;`` (``pi`` allowed in omega)."""
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        fields = chunk.split(":")
        if not 2 <= len(fields) <= 4:
            raise argparse.ArgumentTypeError(f"bad component {chunk!r}")
        try:
            profile = int(fields[0])
            omega = _angle(fields[1])
            rest = [float(f) for f in fields[2:]]
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad component {chunk!r}") from None
        if profile < 0:
            raise argparse.ArgumentTypeError(f"negative profile in {chunk!r}")
        out.append(data_io.OscillatorComponent(profile, omega, *rest))
    if not out:
        raise argparse.ArgumentTypeError("no components given")
    return out


DEFAULT_COMPONENTS = "0:pi/8:0.99:1;1:pi/3:0.95:1"

# Applied after the config file, so that config values can fill unset flags.
DEFAULTS = {
    "out_dir": ".",
    "kernel": "laplace",
    "alpha": 1,
    "d": 1.0,
    "seed": 0,
    "rtol": EPS,
    "top_k": 4,
    "pad_mode": "unit",
    "system": "linear",
    "a": [0.9],
    "x0": [1.0],
    "m": 60,
    "dt": 1.0,
    "noise_std": 0.0,
    "components": _components(DEFAULT_COMPONENTS),
    "m0_list": list(DEFAULT_M0),
    "baseline": "laplace",
}


def _shared_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--config", type=Path, help="flat key = value file with default flag values")
    g.add_argument("--input", type=Path, help="snapshot file (.kdmd binary or .csv)")
    g.add_argument("--out-dir", type=Path, help="output directory (default: .)")
    g.add_argument("--kernel", choices=KERNEL_NAMES, help="kernel (default: laplace)")
    g.add_argument("--sigma", type=_positive_float, help="bandwidth; median heuristic if omitted")
    g.add_argument("--gamma", type=_positive_float, help="exponent of the exp-power kernel")
    g.add_argument("--alpha", type=_positive_int, help="polynomial degree (default: 1)")
    g.add_argument("--d", type=_positive_float, help="polynomial scale (default: 1)")
    g.add_argument("--true-count", type=_positive_int, help="genuine snapshots kept (default: all)")
    g.add_argument("--m-target", type=_positive_int, help="padded snapshot count (default: available)")
    g.add_argument("--seed", type=_seed, help="seed for padding, noise and sampling (default: 0)")
    g.add_argument("--rtol", type=_positive_float, help="relative rank-truncation tolerance")
    g.add_argument("--top-k", type=_positive_int, help="number of dominant modes (default: 4)")
    g.add_argument("--height", type=_positive_int, help="field height for images")
    g.add_argument("--width", type=_positive_int, help="field width for images")
    g.add_argument("--pad-mode", choices=("unit", "data_std"), help="padding scale (default: unit)")
    return p


def build_parser():
    shared = _shared_flags()
    parser = argparse.ArgumentParser(prog="kedmd", description="Kernel eDMD with limited-data padding.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[shared], help="write a synthetic snapshot file")
    gen.add_argument("--system", choices=("linear", "oscillator"))
    gen.add_argument("--a", type=_float_list, help="linear system matrix, row-major, comma separated")
    gen.add_argument("--x0", type=_float_list, help="initial state, comma separated")
    gen.add_argument("--m", type=_positive_int, help="number of snapshots (default: 60)")
    gen.add_argument("--dt", type=_positive_float, help="oscillator time step (default: 1)")
    gen.add_argument("--noise-std", type=_nonneg_float, help="oscillator pixel noise (default: 0)")
    gen.add_argument(
        "--components",
        type=_components,
        help=f"oscillator components profile:omega:rho:amp;... (default: {DEFAULT_COMPONENTS})",
    )
    gen.add_argument("--output", type=Path, help="output file (default: <out-dir>/snapshots.kdmd)")

    dmd = sub.add_parser("dmd", parents=[shared], help="limited-data kernel eDMD on a snapshot file")

    cmp_ = sub.add_parser("compare", parents=[shared], help="Laplace vs GRBF mode similarity table")
    cmp_.add_argument("--m0-list", type=_int_list, help="genuine snapshot counts (default: 3,7,20,55)")
    cmp_.add_argument("--baseline", choices=("laplace", "own"), help="full-data baseline (default: laplace)")

    val = sub.add_parser("validate", parents=[shared], help="run the numerical property suite")
    val.add_argument("--only", type=_name_list, help="comma-separated property names or prefixes")
    parser.subcommands = {"gen": gen, "dmd": dmd, "compare": cmp_, "validate": val}
    return parser


def _apply_config(args, parser):
    if args.config is None:
        return
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string("[kedmd]\n" + args.config.read_text())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if cp.sections() != ["kedmd"]:
        raise UsageError(f"config {args.config} must be a flat key = value file without sections")
    actions = {a.dest: a for a in parser.subcommands[args.command]._actions}
    for key, raw in cp["kedmd"].items():
        dest = key.strip().replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for '{args.command}'")
        if getattr(args, dest) is not None:
            continue
        try:
            value = action.type(raw) if action.type else raw
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"config key {key!r}: {exc}") from None
        if action.choices and value not in action.choices:
            raise UsageError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
        setattr(args, dest, value)


def _apply_defaults(args):
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _check_layout(args):
    if (args.height is None) != (args.width is None):
        raise UsageError("--height and --width must be given together")
    if args.height is None:
        return None
    return data_io.FieldLayout(args.height, args.width)


def _run_options(args):
    return dict(
        m_target=args.m_target,
        seed=args.seed,
        pad_mode=args.pad_mode,
        sigma=args.sigma,
        gamma=args.gamma,
        alpha=args.alpha,
        d=args.d,
        rtol=args.rtol,
    )


def _load_input(args):
    if args.input is None:
        raise UsageError("--input is required")
    return data_io.load_snapshots(args.input)


def cmd_gen(args):
    layout = _check_layout(args)
    if args.system == "linear":
        n = len(args.x0)
        if len(args.a) != n * n:
            raise UsageError(f"--a needs {n * n} entries for a {n}-dimensional --x0, got {len(args.a)}")
        X = data_io.gen_linear_system(np.reshape(args.a, (n, n)), args.x0, args.m)
    else:
        if layout is None:
            raise UsageError("--system oscillator needs --height and --width")
        X = data_io.gen_oscillator_field(layout, args.m, args.dt, args.components, args.noise_std, args.seed)
    out = args.output or Path(args.out_dir) / "snapshots.kdmd"
    out.parent.mkdir(parents=True, exist_ok=True)
    data_io.save_snapshots(X, out)
    print(f"wrote {out}: {X.shape[0]} x {X.shape[1]} ({args.system}, seed {args.seed})")
    return 0


def cmd_dmd(args):
    layout = _check_layout(args)
    data = _load_input(args)
    if layout is not None and layout.size != data.shape[0]:
        raise UsageError(f"layout {layout.height}x{layout.width} does not match state dimension {data.shape[0]}")
    m_true = args.true_count or data.shape[1]
    m_target = args.m_target or data.shape[1]
    if m_true > data.shape[1]:
        raise UsageError(f"--true-count {m_true} exceeds the {data.shape[1]} available snapshots")
    if m_true > m_target:
        raise UsageError(f"--true-count {m_true} exceeds --m-target {m_target}")
    options = _run_options(args)
    options["m_target"] = m_target
    result, meta = run_limited_data(data, args.kernel, m_true=m_true, **options)
    meta["input"] = str(args.input)
    meta["top_k"] = args.top_k
    data_io.save_result(result, layout, args.out_dir, meta, max_images=args.top_k)
    top = result.top(args.top_k)
    print(f"rank {result.rank}, {meta['n_synthetic']} synthetic snapshots; top {len(top.eigenvalues)} eigenvalues:")
    for k, lam in enumerate(top.eigenvalues, start=1):
        print(f"  {k:3d}  {data_io.format_float(lam.real):>24}  {data_io.format_float(lam.imag):>24}  |{abs(lam):.6f}|")
    return 0


def cmd_compare(args):
    data = _load_input(args)
    full = args.m_target or data.shape[1]
    if max(args.m0_list) > full:
        raise UsageError(f"--m0-list values must not exceed {full}")
    if args.true_count is not None:
        raise UsageError("compare takes --m0-list, not --true-count")
    rows = compare_kernels(data, args.m0_list, ("laplace", "grbf"), args.top_k, args.baseline, **_run_options(args))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "compare.csv"
    with open(path, "w") as fh:
        fh.write("m0,kernel,mode,magnitude,similarity\n")
        for m0, kernel, mode, mag, sim in rows:
            fh.write(f"{m0},{kernel},{mode},{data_io.format_float(mag)},{data_io.format_float(sim)}\n")
    print(f"wrote {path} ({len(rows)} rows)")
    for m0 in sorted({r[0] for r in rows}):
        means = {k: np.mean([r[4] for r in rows if r[0] == m0 and r[1] == k]) for k in ("laplace", "grbf")}
        print(f"  m0={m0:4d}  laplace {means['laplace']:.4f}  grbf {means['grbf']:.4f}")
    return 0


def cmd_validate(args):
    try:
        names = select(args.only)
    except KeyError as exc:
        raise UsageError(f"unknown property {exc.args[0]!r}") from None
    failed = []
    for name, passed, detail in run_checks(names, args.seed):
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        if not passed:
            failed.append(name)
    if failed:
        print(f"{len(failed)} of {len(names)} properties failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    print(f"all {len(names)} properties passed")
    return 0


COMMANDS = {"gen": cmd_gen, "dmd": cmd_dmd, "compare": cmd_compare, "validate": cmd_validate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, parser)
        _apply_defaults(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.subcommands[args.command].print_usage(sys.stderr)
        print(f"kedmd {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"kedmd {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
