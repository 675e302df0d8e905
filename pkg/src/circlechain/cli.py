"""Command-line front end.

Every subcommand resolves a run configuration from an optional JSON file,
``--set key=value`` overrides and dedicated flags (in increasing priority),
validates it against a JSON schema, runs one operation and reports:
a short summary on stdout, the full report as JSON (``--out``) and a table as
CSV (``--csv``). Exit status is 0 on success, 2 on a typed infeasibility
outcome and 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import jsonschema
import numpy as np

from . import __version__
from .asymptotics import fine_scale_report, uniformity_sweep
from .circle import SymmetricSpec, construct_symmetric, glue_probe, repair_gap_points
from .dynamics import DynamicsParams, relax
from .exceptions import (
    CircleChainError,
    CommensurabilityError,
    ConfigError,
    InfeasibleTargetError,
    ParityError,
    PartitionImbalanceError,
)
from .existence import verdict
from .model import Configuration, InteractionLaw, PiecewiseForce, RingGeometry, residual
from .newton import NewtonOptions, random_ordered, solve
from .segment import SegmentProblem, perturbative_deltas, solve_exact
from .validation import as_fraction

SCHEMA_VERSION = 1
CSV_SCHEMA_VERSION = 1
THREADS_ENV = "CIRCLECHAIN_THREADS"

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
INFEASIBLE_ERRORS = (ParityError, InfeasibleTargetError, CommensurabilityError, PartitionImbalanceError)

_RATIONAL = {
    "oneOf": [
        {"type": "string", "pattern": r"^\s*-?\d+(\.\d+)?(/\d+)?\s*$"},
        {"type": "number"},
    ]
}
_COUNT_SPEC = {
    "oneOf": [
        {"type": "integer", "minimum": 1},
        {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        {"type": "string", "pattern": r"^\d+(:\d+(:(x|\+)?\d+)?)?$"},
    ]
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "L": _RATIONAL,
        "M": _RATIONAL,
        "M1": _RATIONAL,
        "M2": _RATIONAL,
        "F": _RATIONAL,
        "F1": _RATIONAL,
        "F2": _RATIONAL,
        "breakpoints": {"type": "array", "items": _RATIONAL, "minItems": 2},
        "values": {"type": "array", "items": _RATIONAL, "minItems": 1},
        "overrides": {"type": "object", "additionalProperties": _RATIONAL},
        "a": {"type": "number", "exclusiveMinimum": 1},
        "N": _COUNT_SPEC,
        "N1": {"type": "integer", "minimum": 1},
        "N2": {"type": "integer", "minimum": 1},
        "length": _RATIONAL,
        "target": {"type": "number"},
        "family": {"enum": ["symmetric"]},
        "seed": {"type": "integer", "minimum": 0},
        "init": {"enum": ["equidistant", "random", "symmetric"]},
        "positions": {"type": "array", "items": {"type": "number"}, "minItems": 2},
        "perturb": {"type": "number", "minimum": 0},
        "certify": {"type": "boolean"},
        "allow_repair": {"type": "boolean"},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 0},
        "pin": {"type": "integer", "minimum": 0},
        "step_cap": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "mass": {"type": "number", "exclusiveMinimum": 0},
        "damping": {"type": "number", "minimum": 0},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "t_max": {"type": "number", "exclusiveMinimum": 0},
        "max_steps": {"type": "integer", "minimum": 0},
        "residual_tol": {"type": "number", "exclusiveMinimum": 0},
        "velocity_tol": {"type": "number", "exclusiveMinimum": 0},
        "mode": {"enum": ["second_order", "overdamped"]},
        "sample_every": {"type": "integer", "minimum": 1},
    },
}

DEFAULTS = {"L": "1", "a": 2.0, "seed": 0}

# flag -> argparse type; values are kept as strings so rationals stay exact
_FLAGS = {
    "L": str, "M": str, "M1": str, "M2": str, "F": str, "F1": str, "F2": str, "length": str,
    "a": float, "N": str, "N1": int, "N2": int, "target": float, "family": str, "seed": int,
    "init": str, "perturb": float, "tol": float, "max_iter": int, "pin": int, "step_cap": float,
    "mass": float, "damping": float, "dt": float, "t_max": float, "max_steps": int,
    "residual_tol": float, "velocity_tol": float, "mode": str, "sample_every": int,
}

_COMMANDS = {
    "segment": ("pinned-chain equilibrium on [0, length]", ["length", "N", "F", "a"]),
    "symmetric": ("equilibrium for +F on (0, L/2], -F on (L/2, L]", ["L", "F", "N", "a", "target"]),
    "glue-probe": ("gluing constraints for a two-piece field", ["M1", "M2", "F1", "F2", "N1", "N2", "a"]),
    "exists": ("existence verdict for a two-piece field", ["L", "M", "F1", "F2", "N", "a", "certify", "allow_repair"]),
    "newton": ("Newton solve of the circle equilibrium", ["L", "M", "F", "F1", "F2", "N", "a", "init", "perturb", "seed", "tol", "max_iter", "pin", "step_cap", "target"]),
    "relax": ("damped dynamics relaxation", ["L", "M", "F", "F1", "F2", "N", "a", "init", "perturb", "seed", "mass", "damping", "dt", "t_max", "max_steps", "residual_tol", "velocity_tol", "mode", "sample_every", "target"]),
    "sweep": ("gap-uniformity sweep over N", ["family", "L", "F", "N", "a"]),
    "fine-scale": ("per-gap deviation profile of an equilibrium", ["L", "M", "F", "F1", "F2", "N", "a", "target"]),
    "repair-gap": ("equilibrium with overridden force at the breakpoints", ["L", "M", "F1", "F2", "N1", "N2", "a"]),
}

# ---------------------------------------------------------------- config


def parse_counts(spec) -> list[int]:
    """``16``, ``[8, 16]``, ``2:12`` (step 1), ``2:12:+2`` or ``16:4096:x2``."""
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, list):
        return [int(n) for n in spec]
    parts = str(spec).split(":")
    if len(parts) == 1:
        return [int(parts[0])]
    start, stop = int(parts[0]), int(parts[1])
    step = parts[2] if len(parts) == 3 else "+1"
    out = []
    n = start
    if step.startswith("x"):
        factor = int(step[1:])
        if factor < 2:
            raise ConfigError("N: geometric factor must be >= 2")
        while n <= stop:
            out.append(n)
            n *= factor
    else:
        inc = int(step.lstrip("+"))
        if inc < 1:
            raise ConfigError("N: step must be >= 1")
        out = list(range(start, stop + 1, inc))
    if not out:
        raise ConfigError(f"N: empty range {spec!r}")
    return out


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    # accept a previous report and re-run its embedded config
    if isinstance(data, dict) and "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data


def validate_config(cfg: dict) -> dict:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"{where}: {e.message}")
        raise ConfigError("invalid config:\n  " + "\n  ".join(lines))
    return cfg


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(load_config(args.config))
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        cfg[key.strip()] = _parse_value(value)
    for key in _COMMANDS[args.command][1]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if isinstance(cfg.get("N"), str) and cfg["N"].isdigit():
        cfg["N"] = int(cfg["N"])
    return validate_config(cfg)


def _need(cfg: dict, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError("missing config keys: " + ", ".join(missing))
    return [cfg[k] for k in keys]


def _single_N(cfg: dict) -> int:
    (N,) = _need(cfg, "N")
    Ns = parse_counts(N)
    if len(Ns) != 1:
        raise ConfigError("N: this command takes a single particle count")
    return Ns[0]


def build_field(cfg: dict) -> PiecewiseForce:
    """Field from explicit breakpoints/values, a two-piece (M, F1, F2) or a symmetric F."""
    L = as_fraction(cfg["L"])
    if "breakpoints" in cfg or "values" in cfg:
        bps, vals = _need(cfg, "breakpoints", "values")
        overrides = {as_fraction(k): as_fraction(v) for k, v in cfg.get("overrides", {}).items()}
        field_ = PiecewiseForce([as_fraction(b) for b in bps], [as_fraction(v) for v in vals], overrides)
        if field_.L != L:
            raise ConfigError(f"breakpoints end at {field_.L}, but L = {L}")
        return field_
    if "F1" in cfg or "F2" in cfg:
        M, F1, F2 = _need(cfg, "M", "F1", "F2")
        return PiecewiseForce.two_piece(L, as_fraction(M), as_fraction(F1), as_fraction(F2))
    if "F" in cfg:
        F = as_fraction(cfg["F"])
        M = as_fraction(cfg.get("M", L / 2))
        return PiecewiseForce.two_piece(L, M, F, -F)
    return PiecewiseForce.constant(L)


def _symmetric_spec(cfg: dict, N: int, law: InteractionLaw) -> SymmetricSpec:
    if "F" not in cfg and "F1" in cfg and as_fraction(cfg["F1"]) == -as_fraction(cfg.get("F2", 0)):
        cfg = {**cfg, "F": cfg["F1"]}
    L, F = _need(cfg, "L", "F")
    return SymmetricSpec(float(as_fraction(L)), float(as_fraction(F)), N, law, target=cfg.get("target"))


def _initial(cfg: dict, field_: PiecewiseForce, N: int, law: InteractionLaw) -> Configuration:
    L = float(field_.L)
    geo = RingGeometry(L)
    if "positions" in cfg:
        return Configuration(geo, cfg["positions"])
    kind = cfg.get("init", "equidistant")
    rng = np.random.default_rng(cfg["seed"])
    if kind == "random":
        return random_ordered(L, N, rng)
    if kind == "symmetric":
        base = construct_symmetric(_symmetric_spec(cfg, N, law)).positions
    else:
        base = Configuration.equidistant(L, N).positions
    eps = float(cfg.get("perturb", 0.0))
    if eps:
        # uniform noise below half the smallest gap keeps the order
        g = np.diff(np.append(base, base[0] + L))
        base = base + rng.uniform(-1, 1, N) * min(eps * L / N, 0.49 * g.min())
        base = np.sort(np.where(base <= 0, base + L, np.where(base > L, base - L, base)))
    return Configuration(geo, base)


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(x) -> str:
    return format(float(x), ".17g")


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def report_json(command: str, cfg: dict, result: dict) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "program": f"circlechain {__version__}",
        "command": command,
        "seed": cfg.get("seed"),
        "config": cfg,
        "result": result,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def _particle_rows(x: np.ndarray, L: float):
    g = np.append(np.diff(x), x[0] + L - x[-1])
    return [(k + 1, x[k], g[k]) for k in range(x.size)]


# ---------------------------------------------------------------- commands
# each returns (summary lines, JSON result, (csv header, rows) or None, exit code)


def cmd_segment(cfg):
    length, F = _need(cfg, "length", "F")
    n = _single_N(cfg)
    problem = SegmentProblem(float(as_fraction(length)), n, float(as_fraction(F)), InteractionLaw(cfg["a"]))
    sol = solve_exact(problem)
    d1_hat, dl_hat = perturbative_deltas(problem)
    result = {
        "gaps": sol.gaps, "deltas": sol.deltas, "positions": sol.positions, "q": sol.q,
        "length_defect": sol.length_defect, "residual_norm": sol.residual_norm,
        "delta_first_twoterm": d1_hat, "delta_last_twoterm": dl_hat,
    }
    summary = [
        f"segment: {n} points on [0, {length}], F = {F}, a = {cfg['a']}",
        f"  first gap {format_float(sol.first_gap)}, last gap {format_float(sol.last_gap)}",
        f"  delta_1 = {sol.deltas[0]:.6e} (two-term {d1_hat:.6e}), residual {sol.residual_norm:.3e}",
    ]
    rows = [(k + 1, sol.gaps[k], sol.deltas[k]) for k in range(sol.gaps.size)]
    return summary, result, (["k", "gap", "delta"], rows), EXIT_OK


def cmd_symmetric(cfg):
    law = InteractionLaw(cfg["a"])
    spec = _symmetric_spec(cfg, _single_N(cfg), law)
    config = construct_symmetric(spec)
    res = residual(config, spec.field(), law)
    x = config.positions
    result = {"positions": x, "gaps": config.gaps(), "residual_norm": res.norm, "relative_residual": res.relative_norm}
    summary = [
        f"symmetric: N = {spec.N}, L = {cfg['L']}, F = {cfg['F']}, a = {cfg['a']}",
        f"  relative residual {res.relative_norm:.3e}",
    ]
    if spec.target is not None:
        summary.append(f"  particle {int(np.argmin(np.abs(x - spec.target))) + 1} sits at target {spec.target!r}")
    return summary, result, (["k", "x", "gap"], _particle_rows(x, config.L)), EXIT_OK


def cmd_glue_probe(cfg):
    M1, M2, F1, F2, N1, N2 = _need(cfg, "M1", "M2", "F1", "F2", "N1", "N2")
    rep = glue_probe(M1, M2, F1, F2, N1, N2, InteractionLaw(cfg["a"]))
    d = rep.to_dict()
    summary = [
        f"glue-probe: M1 = {M1}, M2 = {M2}, F = ({F1}, {F2}), N = ({N1}, {N2}), gamma = {rep.gamma}",
        f"  infeasibility {rep.infeasibility:.3e}, m_A = {rep.m_A:.6e}, m_B = {rep.m_B:.6e}",
        f"  placement window {rep.placement_window}, feasible: {rep.placement_feasible}",
    ]
    keys = ["N1", "N2", "m1", "m2", "infeasibility", "m_A", "m_B", "m_A_twoterm", "m_B_twoterm", "c1", "c4", "d1", "d4"]
    return summary, d, (keys, [[d[k] for k in keys]]), EXIT_OK


def cmd_exists(cfg):
    L, M, F1, F2 = _need(cfg, "L", "M", "F1", "F2")
    N = _single_N(cfg)
    v = verdict(L, M, F1, F2, N, InteractionLaw(cfg["a"]), certify=cfg.get("certify", False),
                allow_repair=cfg.get("allow_repair", False))
    summary = [f"exists: {v.kind.value}", f"  partition {v.partition}, circulation {v.circulation}, failed {list(v.failed)}"]
    code = EXIT_INFEASIBLE if v.kind.impossible else EXIT_OK
    d = v.to_dict()
    return summary, d, (["kind", "N1", "N2", "circulation"], [[d["kind"], *(v.partition or ("", "")), d["circulation"]]]), code


def _solve_summary(name, rep):
    return [
        f"{name}: {rep.status.value} after {rep.iterations} steps",
        f"  residual {rep.residual_norm:.3e} (relative {rep.relative_residual:.3e}), partition {rep.partition}",
    ]


def cmd_newton(cfg):
    law = InteractionLaw(cfg["a"])
    field_ = build_field(cfg)
    N = _single_N(cfg)
    init = _initial(cfg, field_, N, law)
    opts = NewtonOptions(**{k: cfg[k] for k in ("tol", "max_iter", "pin", "step_cap") if k in cfg}, seed=cfg["seed"])
    rep = solve(init, field_, law, opts)
    result = {"initial": init.positions, **rep.to_dict()}
    rows = _particle_rows(rep.config.positions, rep.config.L)
    return _solve_summary("newton", rep), result, (["k", "x", "gap"], rows), EXIT_OK if rep.converged else EXIT_INFEASIBLE


def cmd_relax(cfg, trajectory_path=None):
    law = InteractionLaw(cfg["a"])
    field_ = build_field(cfg)
    N = _single_N(cfg)
    init = _initial(cfg, field_, N, law)
    keys = ("mass", "damping", "dt", "t_max", "max_steps", "residual_tol", "velocity_tol", "mode", "sample_every")
    params = DynamicsParams(**{k: cfg[k] for k in keys if k in cfg})
    rep, traj = relax(init, field_, law, params)
    result = {"initial": init.positions, **rep.to_dict()}
    if trajectory_path:
        t = traj.as_arrays()
        atomic_write(trajectory_path, csv_text(
            ["t", "residual", "energy"], zip(t["times"], t["residual_norms"], t["energies"])
        ))
    rows = _particle_rows(rep.config.positions, rep.config.L)
    return _solve_summary("relax", rep), result, (["k", "x", "gap"], rows), EXIT_OK if rep.converged else EXIT_INFEASIBLE


def cmd_sweep(cfg):
    Ns = parse_counts(_need(cfg, "N")[0])
    F = cfg.get("F", "1/5")
    threads = int(os.environ.get(THREADS_ENV, "1") or 1)
    res = uniformity_sweep(as_fraction(cfg["L"]), as_fraction(F), Ns, InteractionLaw(cfg["a"]), threads=threads)
    rows = [(r.N, r.D, r.slope_so_far, r.D2, r.predicted) for r in res.rows]
    result = {
        "family": cfg.get("family", "symmetric"), "F": F, "slope": res.slope, "intercept": res.intercept,
        "strictly_decreasing": res.strictly_decreasing(),
        "rows": [dict(zip(["N", "D", "slope_so_far", "D2", "predicted"], r)) for r in rows],
    }
    summary = [f"sweep: {len(rows)} values of N, fitted slope {res.slope:.4f}, D strictly decreasing: {res.strictly_decreasing()}"]
    summary += [f"  N = {r[0]:6d}  D = {r[1]:.6e}" for r in rows]
    return summary, result, (["N", "D", "slope_so_far", "D2", "predicted"], rows), EXIT_OK


def cmd_fine_scale(cfg):
    law = InteractionLaw(cfg["a"])
    field_ = build_field(cfg)
    if "positions" in cfg:
        config = Configuration(RingGeometry(float(field_.L)), cfg["positions"])
    elif "F" in cfg:
        config = construct_symmetric(_symmetric_spec(cfg, _single_N(cfg), law))
    else:
        config = Configuration.equidistant(float(field_.L), _single_N(cfg))
    prof = fine_scale_report(config, field_, law)
    result = {"positions": config.positions, "deltas": prof.deltas, "predicted": prof.predicted,
              "max_abs": prof.max_abs, "scale": prof.scale, "ratio": prof.ratio}
    summary = [f"fine-scale: N = {config.N}, max |delta| = {prof.max_abs:.6e} = {prof.ratio:.4f} N^-(a-1)"]
    rows = [(k + 1, prof.deltas[k], prof.predicted[k]) for k in range(config.N)]
    return summary, result, (["k", "delta", "predicted"], rows), EXIT_OK


def cmd_repair_gap(cfg):
    L, M, F1, F2, N1, N2 = _need(cfg, "L", "M", "F1", "F2", "N1", "N2")
    law = InteractionLaw(cfg["a"])
    field_, config = repair_gap_points(L, M, F1, F2, N1, N2, law)
    with_ov = residual(config, field_, law)
    without = residual(config, field_.without_overrides(), law)
    result = {
        "overrides": {str(k): str(v) for k, v in field_.overrides.items()},
        "positions": config.positions, "gaps": config.gaps(),
        "relative_residual": with_ov.relative_norm, "relative_residual_without_overrides": without.relative_norm,
    }
    summary = [
        f"repair-gap: overrides {result['overrides']}",
        f"  relative residual {with_ov.relative_norm:.3e}, without overrides {without.relative_norm:.3e}",
    ]
    return summary, result, (["k", "x", "gap"], _particle_rows(config.positions, config.L)), EXIT_OK


_HANDLERS = {
    "segment": cmd_segment, "symmetric": cmd_symmetric, "glue-probe": cmd_glue_probe, "exists": cmd_exists,
    "newton": cmd_newton, "relax": cmd_relax, "sweep": cmd_sweep, "fine-scale": cmd_fine_scale,
    "repair-gap": cmd_repair_gap,
}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circlechain", description="Equilibria of repelling particles on a circle.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (help_, keys) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_, description=help_)
        p.add_argument("--config", help="JSON config file (or a previous JSON report)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--csv", help="write the CSV table here")
        p.add_argument("-q", "--quiet", action="store_true", help="no summary on stdout")
        if name == "relax":
            p.add_argument("--trajectory", help="write sampled (t, residual, energy) CSV here")
        if name == "exists":
            p.add_argument("--certify", action="store_true", default=None, help="attach a gluing report")
            p.add_argument("--allow-repair", dest="allow_repair", action="store_true", default=None)
        for key in keys:
            if key in _FLAGS:
                p.add_argument(f"--{key}", type=_FLAGS[key], default=None)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse refuses "-1/2" as an option value; glue it to its flag
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            nxt = argv[i + 1]
            try:
                Fraction(nxt)
            except (ValueError, ZeroDivisionError):
                out.append(tok)
                i += 1
                continue
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for infeasibility here
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        cfg = resolve_config(args)
        handler = _HANDLERS[args.command]
        if args.command == "relax":
            summary, result, table, code = handler(cfg, getattr(args, "trajectory", None))
        else:
            summary, result, table, code = handler(cfg)
    except INFEASIBLE_ERRORS as exc:
        print(f"infeasible: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.out:
            atomic_write(args.out, report_json(args.command, cfg, {"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_INFEASIBLE
    except (CircleChainError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not args.quiet:
        print("\n".join(summary))
    if args.out:
        atomic_write(args.out, report_json(args.command, cfg, result))
    if args.csv and table is not None:
        atomic_write(args.csv, csv_text(*table))
    return code


if __name__ == "__main__":
    sys.exit(main())
