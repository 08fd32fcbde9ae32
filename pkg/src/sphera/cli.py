"""Command-line front end.

Subcommands: estimate, test, fit, sample, expand.  All reports are JSON
with fixed key order and 17-significant-digit floats; point and ring data
are CSV.  Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
failure; errors are emitted as JSON on standard error.
"""
import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import jsonio
from .estimation import estimate_coeffs
from .fitting import FitError, fit_mixture_watson
from .geometry import UnitVector
from .model_io import load_model
from .models import coefficients
from .sampling import SampleSet, sample
from .symmetry_tests import (test_axial, test_equatorial, test_meridial,
                             test_rotational, test_uniformity)

DEG = math.pi / 180.0


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass(frozen=True)
class DatasetDescriptor:
    """How to read directional data from a CSV file."""
    path: str
    longitude_column: str = "phi"
    colatitude_column: str | None = "theta"
    latitude_column: str | None = None      # geographic: colatitude = pi/2 - lat
    unit: str = "radians"
    dedupe: bool = False


def ingest(desc: DatasetDescriptor) -> SampleSet:
    """Parse a CSV of directions; per-row failures are collected and the
    ingest aborts when more than 1% of rows fail."""
    if desc.colatitude_column and desc.latitude_column:
        raise UsageError("give either a colatitude or a latitude column, not both")
    angle_col = desc.colatitude_column or desc.latitude_column
    if not angle_col:
        raise UsageError("no colatitude/latitude column configured")
    scale = DEG if desc.unit == "degrees" else 1.0
    theta, phi, bad = [], [], []
    try:
        fh = open(desc.path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {desc.path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{desc.path}: empty file")
        for col in (angle_col, desc.longitude_column):
            if col not in reader.fieldnames:
                raise DataError(f"{desc.path}: missing column {col!r} "
                                f"(have {reader.fieldnames})")
        for i, row in enumerate(reader, start=2):
            try:
                a = float(row[angle_col]) * scale
                lon = float(row[desc.longitude_column]) * scale
                t = (math.pi / 2.0 - a) if desc.latitude_column else a
                if not (-1e-9 <= t <= math.pi + 1e-9) or not math.isfinite(lon):
                    raise ValueError("angle out of range")
                theta.append(min(max(t, 0.0), math.pi))
                phi.append(lon % (2.0 * math.pi))
            except (TypeError, ValueError) as exc:
                bad.append((i, str(exc)))
    total = len(theta) + len(bad)
    if total == 0:
        raise DataError(f"{desc.path}: no data rows")
    if len(bad) > 0.01 * total:
        raise DataError(f"{desc.path}: {len(bad)} of {total} rows failed to parse; "
                        f"first: line {bad[0][0]} ({bad[0][1]})")
    th = np.array(theta)
    ph = np.array(phi)
    if desc.dedupe:
        _, idx = np.unique(np.column_stack((th, ph)), axis=0, return_index=True)
        keep = np.sort(idx)
        th, ph = th[keep], ph[keep]
    return SampleSet(th, ph)


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file of directions")
    p.add_argument("--colat-col", default=None, help="colatitude column (default 'theta')")
    p.add_argument("--lat-col", default=None, help="geographic latitude column")
    p.add_argument("--lon-col", default=None, help="longitude column (default 'phi')")
    p.add_argument("--unit", choices=["radians", "degrees"], default="radians")
    p.add_argument("--dedupe", action="store_true",
                   help="drop exact duplicate coordinate pairs")


def _descriptor(args) -> DatasetDescriptor:
    colat = args.colat_col
    lat = args.lat_col
    if colat and lat:
        raise UsageError("--colat-col and --lat-col are mutually exclusive")
    if not colat and not lat:
        colat = "theta"
    return DatasetDescriptor(path=args.data,
                             longitude_column=args.lon_col or "phi",
                             colatitude_column=colat, latitude_column=lat,
                             unit=args.unit, dedupe=args.dedupe)


def _write_out(args, obj) -> None:
    text = jsonio.dumps(obj) + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_config(path) -> dict:
    """TOML-style key = value file with defaults for L, alpha, resolution."""
    if path is None:
        return {}
    parsers = {"L": int, "alpha": float, "resolution": int}
    cfg = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open config {path}: {exc}") from exc
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in parsers:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}; "
                                 f"allowed: {sorted(parsers)}")
            try:
                cfg[key] = parsers[key](value.strip())
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return cfg


def _threads_cap() -> int:
    raw = os.environ.get("SPHERA_THREADS")
    if raw is None:
        return 1
    try:
        v = int(raw)
    except ValueError as exc:
        raise UsageError(f"SPHERA_THREADS must be an integer, got {raw!r}") from exc
    if v < 1:
        raise UsageError("SPHERA_THREADS must be >= 1")
    return v  # kernels are serial; the cap is honored trivially


def _parse_axis(text: str) -> UnitVector:
    try:
        t, p = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--axis must be 'theta,phi' in radians, got {text!r}") from exc
    return UnitVector(t, p)


def _cmd_estimate(args, cfg) -> int:
    L = args.L if args.L is not None else cfg.get("L", 10)
    sample_set = ingest(_descriptor(args))
    est = estimate_coeffs(sample_set, int(L))
    _write_out(args, est.to_json_dict())
    return 0


def _cmd_test(args, cfg) -> int:
    L = int(args.L if args.L is not None else cfg.get("L", 3))
    alpha = float(args.alpha if args.alpha is not None else cfg.get("alpha", 0.05))
    sample_set = ingest(_descriptor(args))
    if args.kind == "uniform":
        report = test_uniformity(sample_set, L, alpha)
    elif args.kind == "rotational":
        if args.axis is None:
            raise UsageError("--kind rotational requires --axis theta,phi")
        report = test_rotational(sample_set, _parse_axis(args.axis), L, alpha,
                                 mode=args.mode)
    elif args.kind == "axial":
        report = test_axial(sample_set, L, alpha)
    elif args.kind == "equatorial":
        report = test_equatorial(sample_set, L, alpha)
    elif args.kind == "meridial":
        if args.phi0 is None:
            raise UsageError("--kind meridial requires --phi0")
        report = test_meridial(sample_set, float(args.phi0), L, alpha)
    else:  # unreachable behind argparse choices
        raise UsageError(f"unknown test kind {args.kind!r}")
    _write_out(args, report.to_json_dict())
    return 0


def _write_ring_csv(path, hist) -> None:
    theta = hist.theta_centers()
    avg = hist.ring_averages()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("ring,theta_center,mean_count\n")
        for i, (t, a) in enumerate(zip(theta, avg)):
            fh.write(f"{i},{t:.17g},{a:.17g}\n")


def _cmd_fit(args, cfg) -> int:
    resolution = int(args.resolution if args.resolution is not None
                     else cfg.get("resolution", 16))
    sample_set = ingest(_descriptor(args))
    if args.group_col:
        groups = _read_groups(args)
        rows = []
        for key, subset in groups:
            fit, _ = fit_mixture_watson(subset, resolution=resolution)
            rows.append((key, fit))
        if args.butterfly_csv:
            with open(args.butterfly_csv, "w", encoding="utf-8") as fh:
                fh.write("group,alpha_hat,neg_alpha_hat\n")
                for key, fit in rows:
                    fh.write(f"{key},{fit.alpha_hat:.17g},{-fit.alpha_hat:.17g}\n")
        _write_out(args, {"groups": [{"group": key, **fit.to_json_dict()}
                                     for key, fit in rows]})
        return 0
    fit, hist = fit_mixture_watson(sample_set, resolution=resolution)
    if args.rings_csv:
        _write_ring_csv(args.rings_csv, hist)
    _write_out(args, fit.to_json_dict())
    return 0


def _read_groups(args):
    """Split the data file by a grouping column (e.g. an epoch/year column)."""
    desc = _descriptor(args)
    scale = DEG if desc.unit == "degrees" else 1.0
    angle_col = desc.colatitude_column or desc.latitude_column
    by_key: dict = {}
    with open(desc.path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or args.group_col not in reader.fieldnames:
            raise DataError(f"{desc.path}: missing group column {args.group_col!r}")
        for row in reader:
            try:
                a = float(row[angle_col]) * scale
                lon = float(row[desc.longitude_column]) * scale
            except (TypeError, ValueError):
                continue
            t = (math.pi / 2.0 - a) if desc.latitude_column else a
            by_key.setdefault(row[args.group_col], []).append(
                (min(max(t, 0.0), math.pi), lon % (2.0 * math.pi)))
    out = []
    for key in sorted(by_key):
        arr = np.array(by_key[key])
        out.append((key, SampleSet(arr[:, 0], arr[:, 1])))
    return out


def _cmd_sample(args, cfg) -> int:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    model = _load_model_file(args.model)
    ss = sample(model, args.n, args.seed)
    if args.out in (None, "-"):
        sys.stdout.write("theta,phi\n")
        for t, p in zip(ss.theta, ss.phi):
            sys.stdout.write(f"{t:.17g},{p:.17g}\n")
    else:
        ss.to_csv(args.out)
    return 0


def _cmd_expand(args, cfg) -> int:
    L = int(args.L if args.L is not None else cfg.get("L", 10))
    model = _load_model_file(args.model)
    coeffs = coefficients(model, L)
    _write_out(args, coeffs.to_json_dict())
    return 0


def _load_model_file(path):
    try:
        return load_model(path)
    except OSError as exc:
        raise DataError(f"cannot open model file {path}: {exc}") from exc
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"bad model file {path}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sphera",
                description="Harmonic analysis and symmetry tests on the unit sphere")
    p.add_argument("--config", default=None,
                   help="TOML key=value file with defaults for L, alpha, resolution")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("estimate", help="estimate harmonic coefficients from data")
    _add_data_args(pe)
    pe.add_argument("--L", type=int, default=None)
    pe.add_argument("--out", default=None)

    pt = sub.add_parser("test", help="run a uniformity/symmetry test")
    _add_data_args(pt)
    pt.add_argument("--kind", required=True,
                    choices=["uniform", "rotational", "axial", "equatorial", "meridial"])
    pt.add_argument("--L", type=int, default=None)
    pt.add_argument("--alpha", type=float, default=None)
    pt.add_argument("--axis", default=None, help="rotation axis 'theta,phi' (radians)")
    pt.add_argument("--phi0", type=float, default=None, help="meridian plane longitude")
    pt.add_argument("--mode", choices=["full", "diagonal"], default="full")
    pt.add_argument("--out", default=None)

    pf = sub.add_parser("fit", help="girdle pipeline: histogram, alpha-hat, gamma-hat")
    _add_data_args(pf)
    pf.add_argument("--resolution", type=int, default=None)
    pf.add_argument("--rings-csv", default=None,
                    help="write the ring-averaged histogram to this CSV")
    pf.add_argument("--group-col", default=None,
                    help="fit per group of this column; emits a butterfly table")
    pf.add_argument("--butterfly-csv", default=None,
                    help="with --group-col: CSV of (group, +alpha, -alpha)")
    pf.add_argument("--out", default=None)

    ps = sub.add_parser("sample", help="draw pseudo-random directions from a model")
    ps.add_argument("--model", required=True, help="model JSON file")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", default=None)

    px = sub.add_parser("expand", help="harmonic coefficients of a model")
    px.add_argument("--model", required=True, help="model JSON file")
    px.add_argument("--L", type=int, default=None)
    px.add_argument("--out", default=None)
    return p


_COMMANDS = {
    "estimate": _cmd_estimate,
    "test": _cmd_test,
    "fit": _cmd_fit,
    "sample": _cmd_sample,
    "expand": _cmd_expand,
}


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(jsonio.dumps({"error": kind, "message": message}) + "\n")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _threads_cap()
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return 1
    except DataError as exc:
        _emit_error("data", str(exc))
        return 2
    except (FitError, RuntimeError, ValueError, OverflowError,
            np.linalg.LinAlgError) as exc:
        _emit_error("numerical", str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
