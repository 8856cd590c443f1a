"""Command-line front end.

Plant files are JSON objects with ascending-degree coefficients::

    {"type": "delay_rational", "delay": 1.0, "num": [-3, 1], "den": [-1, 1]}

is ``exp(-s) (s - 3) / (s - 1)``. A plant argument may also be the JSON text
itself. Factor tables for ``check`` are JSON objects::

    {"omega": [w0, w1, ...],
     "N": [...], "D": [...], "Ntilde": [...], "Dtilde": [...]}

where each factor is a list (one entry per frequency) of matrices and every
matrix entry is a real number or a ``[re, im]`` pair.

Exit status: 0 conclusive result, 1 input error, 2 inconclusive numerics.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InconclusiveError, NuGapError, PlantSpecError
from .hnorm import boundary_gain, coarse_grid
from .ncf import default_validation_grid, normalization_residuals, normalized_coprime_factorization, validate_normalization
from .numetric import NuOptions, as_pair, cross_gram, nu_metric, nu_metric_fixed_rho, parallel_residual
from .plantcore import DelayRationalPlant, Polynomial
from .windex import RadiusSchedule, det_boundary, scan_schedule

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2


def _coefficients(value, name, problems):
    if not isinstance(value, list) or not value:
        problems.append(f"{name}: expected a nonempty list of numbers")
        return None
    try:
        out = [float(x) for x in value]
    except (TypeError, ValueError):
        problems.append(f"{name}: coefficients must be numbers")
        return None
    if not all(math.isfinite(x) for x in out):
        problems.append(f"{name}: coefficients must be finite")
        return None
    return out


def parse_plant_spec(text: str) -> DelayRationalPlant:
    """Parse a plant description; every violated invariant is reported at once."""
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlantSpecError(f"parse error: {exc}") from None
    if not isinstance(spec, dict):
        raise PlantSpecError("parse error: plant spec must be a JSON object")
    problems = []
    if spec.get("type") != "delay_rational":
        problems.append(f"type: expected 'delay_rational', got {spec.get('type')!r}")
    delay = spec.get("delay", 0.0)
    num = _coefficients(spec.get("num"), "num", problems)
    den = _coefficients(spec.get("den"), "den", problems)
    unknown = set(spec) - {"type", "delay", "num", "den"}
    if unknown:
        problems.append(f"unknown fields: {sorted(unknown)}")
    if num is not None and den is not None:
        problems += DelayRationalPlant.problems(delay, Polynomial(num), Polynomial(den))
    elif not isinstance(delay, (int, float)) or isinstance(delay, bool) or not delay >= 0:
        problems.append(f"delay must be a finite nonnegative number, got {delay!r}")
    if problems:
        raise PlantSpecError(problems)
    return DelayRationalPlant(float(delay), Polynomial(num), Polynomial(den))


def _load_plant(arg: str) -> DelayRationalPlant:
    text = arg if arg.lstrip().startswith("{") else Path(arg).read_text()
    return parse_plant_spec(text)


def atomic_write(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out):
    if out:
        atomic_write(Path(out), text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _options(args) -> NuOptions:
    schedule = RadiusSchedule.geometric(args.r_max, args.stabilize)
    return NuOptions(delta=args.delta, schedule=schedule, omega_max=args.omega_max)


def _margin_rows(scans):
    return [(s.radius, s.winding, s.min_modulus, s.samples_used) for s in scans]


def cmd_metric(args) -> int:
    opts = _options(args)
    p1, p2 = _load_plant(args.plant1), _load_plant(args.plant2)
    if args.rho is None:
        res = nu_metric(p1, p2, opts)
    else:
        res = nu_metric_fixed_rho(p1, p2, args.rho, opts)
    if args.format == "json":
        report = res.to_dict()
        report["plants"] = [_plant_dict(p1), _plant_dict(p2)]
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        head = (
            f"# value={res.value!r} branch={res.branch.value} invertible={res.invertible} "
            f"winding={res.winding} route={res.route.value} rho={res.rho}\n"
            f"# options={json.dumps(opts.to_dict())}\n"
        )
        body = _csv(_margin_rows(res.winding_sequence), ["r", "winding", "min_modulus", "samples_used"])
        _emit(head + body, args.out)
    return EXIT_OK


def _plant_dict(p: DelayRationalPlant) -> dict:
    return {
        "type": "delay_rational",
        "delay": p.delay,
        "num": list(p.num.coefficients),
        "den": list(p.den.coefficients),
    }


def cmd_sweep(args) -> int:
    opts = _options(args)
    pair1 = as_pair(_load_plant(args.plant1), opts)
    pair2 = as_pair(_load_plant(args.plant2), opts)
    residual = parallel_residual(pair1, pair2)
    omega = coarse_grid(opts.omega_max, args.points)
    gain = boundary_gain(residual, omega)
    sweep_rows = list(zip(omega.tolist(), gain.tolist()))
    try:
        from .hnorm import hinf_norm

        ns = hinf_norm(residual, opts.omega_max, opts.coarse_n)
        sweep_rows = sorted(set(sweep_rows) | set(ns.trace))
    except NuGapError:
        pass
    f = det_boundary(cross_gram(pair1, pair2))
    scans = scan_schedule(f, opts.schedule.radii, opts.initial_n, opts.sample_budget)
    margin_rows = _margin_rows(scans)
    prefix = args.out or "sweep"
    if args.format == "json":
        doc = {
            "tool": "nugap",
            "version": __version__,
            "sweep": {"columns": ["omega", "sigma_max"], "rows": sweep_rows},
            "margin": {"columns": ["r", "winding", "min_modulus", "samples_used"], "rows": margin_rows},
            "options": opts.to_dict(),
        }
        atomic_write(Path(f"{prefix}.json"), json.dumps(doc, indent=2) + "\n")
    else:
        atomic_write(Path(f"{prefix}.sweep.csv"), _csv(sweep_rows, ["omega", "sigma_max"]))
        atomic_write(
            Path(f"{prefix}.margin.csv"), _csv(margin_rows, ["r", "winding", "min_modulus", "samples_used"])
        )
    return EXIT_OK


def cmd_ncf(args) -> int:
    plant = _load_plant(args.plant)
    pair = normalized_coprime_factorization(plant)
    d = list(pair.spectral.d.coefficients)
    grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 999)])
    report = {
        "tool": "nugap",
        "version": __version__,
        "plant": _plant_dict(plant),
        "N": {"delay": plant.delay, "num": list(plant.num.coefficients), "den": d},
        "D": {"delay": 0.0, "num": list(plant.den.coefficients), "den": d},
        "spectral_residual": pair.spectral.residual,
        "normalization_residual": validate_normalization(pair, grid),
    }
    if args.format == "json":
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        rows = [
            ("N", plant.delay, " ".join(map(repr, report["N"]["num"])), " ".join(map(repr, d))),
            ("D", 0.0, " ".join(map(repr, report["D"]["num"])), " ".join(map(repr, d))),
        ]
        text = _csv(rows, ["factor", "delay", "num", "den"])
        text += f"# normalization_residual={report['normalization_residual']!r}\n"
        _emit(text, args.out)
    return EXIT_OK


def _complex_matrices(value, name, problems):
    def entry(x):
        if isinstance(x, list):
            if len(x) != 2:
                raise ValueError("complex entries are [re, im]")
            return complex(float(x[0]), float(x[1]))
        return complex(float(x))

    try:
        arr = np.array([[[entry(x) for x in row] for row in mat] for mat in value], dtype=complex)
    except (TypeError, ValueError) as exc:
        problems.append(f"{name}: {exc}")
        return None
    if arr.ndim != 3:
        problems.append(f"{name}: expected a list of matrices")
        return None
    return arr


def load_factor_table(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlantSpecError(f"parse error: {exc}") from None
    problems = []
    if not isinstance(doc, dict):
        raise PlantSpecError("parse error: factor table must be a JSON object")
    omega = doc.get("omega")
    if not isinstance(omega, list) or not omega:
        problems.append("omega: expected a nonempty list")
    mats = {k: _complex_matrices(doc.get(k), k, problems) for k in ("N", "D", "Ntilde", "Dtilde") if k in doc}
    for k in ("N", "D", "Ntilde", "Dtilde"):
        if k not in doc:
            problems.append(f"{k}: missing")
    if problems:
        raise PlantSpecError(problems)
    n = len(omega)
    N, D, Nt, Dt = mats["N"], mats["D"], mats["Ntilde"], mats["Dtilde"]
    p, m = N.shape[1:]
    want = {"N": (n, p, m), "D": (n, m, m), "Ntilde": (n, p, m), "Dtilde": (n, p, p)}
    for k, shape in want.items():
        if mats[k].shape != shape:
            problems.append(f"{k}: shape {mats[k].shape}, expected {shape}")
    if problems:
        raise PlantSpecError(problems)
    return np.asarray(omega, dtype=float), N, D, Nt, Dt


def cmd_check(args) -> int:
    text = Path(args.table).read_text()
    omega, N, D, Nt, Dt = load_factor_table(text)
    G = np.concatenate([N, D], axis=1)
    Gt = np.concatenate([-Dt, Nt], axis=2)
    right, left = normalization_residuals(G, Gt)
    ok = max(right, left) <= args.tol
    report = {
        "tool": "nugap",
        "version": __version__,
        "points": len(omega),
        "right_residual": right,
        "left_residual": left,
        "tolerance": args.tol,
        "normalized": ok,
    }
    if args.format == "json":
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        _emit(_csv([(k, v) for k, v in report.items()], ["field", "value"]), args.out)
    return EXIT_OK if ok else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nugap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nugap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output path (prefix for sweep)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    def numeric(p):
        p.add_argument("--delta", type=float, default=1e-4, help="invertibility margin")
        p.add_argument("--r-max", type=float, default=None, help="largest radius of the schedule")
        p.add_argument("--stabilize", type=int, default=4, help="tail radii that must agree")
        p.add_argument("--omega-max", type=float, default=1e6)

    p = sub.add_parser("metric", help="nu-gap distance between two plants")
    p.add_argument("plant1")
    p.add_argument("plant2")
    p.add_argument("--rho", type=float, default=None, help="use the fixed-rho route")
    numeric(p)
    common(p)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("sweep", help="frequency sweep and margin curve files")
    p.add_argument("plant1")
    p.add_argument("plant2")
    p.add_argument("--points", type=int, default=4096)
    numeric(p)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ncf", help="normalized coprime factorization of one plant")
    p.add_argument("plant")
    common(p)
    p.set_defaults(func=cmd_ncf)

    p = sub.add_parser("check", help="validate sampled MIMO factor tables")
    p.add_argument("table")
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("delta", "omega_max", "tol"):
        val = getattr(args, name, None)
        if val is not None and not val > 0:
            print(f"error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (NuGapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
