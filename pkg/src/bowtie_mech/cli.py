"""Command line front-end: ``bowtie-mech run|verify|export``.

Exit codes: 0 ok, 2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import sl2c as S
from .matched_algebra import MatchedPairStructure, load_structure, save_structure, so3_direct_sum, \
    so3_left_trivial, so3_right_trivial
from .matched_dynamics import (IntegratorConfig, LagrangianOnH, NumericalAbort, QuadraticLagrangian,
                               ReducedState, integrate, linear_potential)
from .verify import FAULTS, SUITES, report_json, verify

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

SYSTEMS = ("sl2c_ep", "sl2c_el_on_H", "semidirect_left_trivial", "semidirect_right_trivial",
           "custom_structure")

EXPORTABLE = {
    "sl2c": S.sl2c_structure,
    "semidirect_left_trivial": so3_left_trivial,
    "semidirect_right_trivial": so3_right_trivial,
    "so3_direct_sum": so3_direct_sum,
}


class ConfigError(ValueError):
    pass


def _matrix(v, n, name):
    try:
        M = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: not a numeric matrix") from None
    if M.shape != (n, n):
        raise ConfigError(f"{name}: expected {n}x{n}, got shape {M.shape}")
    return M


def _vector(v, n, name):
    try:
        x = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: not a numeric vector") from None
    if x.shape != (n,) or not np.all(np.isfinite(x)):
        raise ConfigError(f"{name}: expected {n} finite numbers")
    return x


def _su2_from_config(v):
    try:
        arr = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("initial.A: not numeric") from None
    if arr.shape == (2, 2, 2):
        M = arr[..., 0] + 1j * arr[..., 1]
    elif arr.shape == (2, 2):
        M = arr.astype(complex)
    else:
        raise ConfigError("initial.A: expected 2x2 entries as [re, im] pairs")
    try:
        return S.SU2Element(M)
    except ArithmeticError as exc:
        raise ConfigError(f"initial.A: {exc}") from None


def load_config(path):
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    system = cfg.get("system")
    if system not in SYSTEMS:
        raise ConfigError(f"system must be one of {SYSTEMS}")
    for key in ("initial", "integrator", "output"):
        if key not in cfg:
            raise ConfigError(f"missing field {key!r}")
    return cfg, p.parent


def build_run(cfg, base: Path):
    system = cfg["system"]
    if system == "custom_structure":
        sp = cfg.get("structure")
        if not sp:
            raise ConfigError("custom_structure needs a 'structure' path")
        spath = (base / sp) if not Path(sp).is_absolute() else Path(sp)
        if not spath.is_file():
            raise ConfigError(f"structure file not found: {spath}")
        try:
            s = load_structure(spath)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad structure document: {exc}") from None
    elif system in ("sl2c_ep", "sl2c_el_on_H"):
        s = S.sl2c_structure()
    elif system == "semidirect_left_trivial":
        s = so3_left_trivial()
    else:
        s = so3_right_trivial()
    n, m = s.dim_g, s.dim_h
    try:
        L = QuadraticLagrangian(_matrix(cfg.get("inertia_1", np.eye(n).tolist()), n, "inertia_1"),
                                _matrix(cfg.get("inertia_2", np.eye(m).tolist()), m, "inertia_2"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ini = cfg["initial"]
    if not isinstance(ini, dict):
        raise ConfigError("initial must be an object")
    state = ReducedState(_vector(ini.get("xi"), n, "initial.xi"), _vector(ini.get("eta"), m, "initial.eta"))
    it = cfg["integrator"]
    try:
        conf = IntegratorConfig(float(it["step"]), float(it["t_end"]), it.get("scheme", "rk4"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"integrator: {exc}") from None
    return s, L, state, conf


def execute(cfg, base: Path):
    """Run a parsed config; returns (structure, trajectory, group path or None)."""
    s, L, state, conf = build_run(cfg, base)
    system = cfg["system"]
    ini = cfg["initial"]
    group = None
    if system in ("sl2c_ep", "sl2c_el_on_H") and (system == "sl2c_el_on_H" or "A" in ini or "B" in ini):
        A0 = _su2_from_config(ini["A"]) if "A" in ini else S.SU2Element.identity()
        try:
            B0 = S.KElement.from_vec(_vector(ini.get("B", [0, 0, 0]), 3, "initial.B"))
        except ValueError as exc:
            raise ConfigError(f"initial.B: {exc}") from None
        L_full = None
        if system == "sl2c_el_on_H":
            pot = cfg.get("potential") or {}
            if not isinstance(pot, dict):
                raise ConfigError("potential must be an object with a 'chi' vector")
            chi = pot.get("chi", [0, 0, 0])
            L_full = LagrangianOnH(L, *linear_potential(_vector(chi, 3, "potential.chi")))
        tr, As, Bs = S.integrate_with_group(L, state.xi, state.eta, A0, B0, conf, L_full=L_full)
        group = (As, Bs)
    else:
        rhs = {"semidirect_left_trivial": "left_trivial", "semidirect_right_trivial": "right_trivial"}.get(system, "ep")
        tr = integrate(s, L, state, conf, rhs=rhs)
    return s, tr, group


def _write_group_csv(path, t, As, Bs):
    cols = ["t"] + [f"A{i}{j}_{p}" for i in range(2) for j in range(2) for p in ("re", "im")] + ["a", "b", "c"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for k in range(len(t)):
            vals = [t[k]]
            for z in As[k].ravel():
                vals += [z.real, z.imag]
            vals += list(Bs[k])
            fh.write(",".join(repr(float(v)) for v in vals) + "\n")


def cmd_run(args) -> int:
    t0 = time.perf_counter()
    try:
        cfg, base = load_config(args.config)
        s, tr, group = execute(cfg, base)
    except ConfigError as exc:
        print(f"bowtie-mech: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalAbort, FloatingPointError, ArithmeticError) as exc:
        print(f"bowtie-mech: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    prefix = Path(cfg["output"])  # relative prefixes resolve against the working directory
    try:
        prefix.parent.mkdir(parents=True, exist_ok=True)
        tr.to_csv(f"{prefix}.csv")
        extra = {}
        if group is not None:
            _write_group_csv(f"{prefix}.group.csv", tr.t, *group)
            extra["group_csv"] = f"{prefix.name}.group.csv"
        meta = {
            "system": cfg["system"],
            "structure_hash": s.digest(),
            "config": cfg,
            "seed": cfg.get("seed"),
            "rows": int(len(tr.t)),
            "energy_initial": float(tr.energy[0]),
            "energy_final": float(tr.energy[-1]),
            "energy_drift": tr.energy_drift(),
            "wall_time_s": time.perf_counter() - t0,
            **extra,
        }
        Path(f"{prefix}.meta.json").write_text(json.dumps(meta, indent=2))
    except OSError as exc:
        print(f"bowtie-mech: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects name=value, got {item!r}")
        try:
            out[name] = float(val)
        except ValueError:
            raise ConfigError(f"--tol {name}: not a number") from None
    return out


def cmd_verify(args) -> int:
    try:
        tol = _parse_tol(args.tol)
        report = verify(seed=args.seed, tolerances=tol, faults=tuple(args.inject_fault or ()),
                        only=set(args.only) if args.only else None)
    except (ConfigError, KeyError) as exc:
        print(f"bowtie-mech: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(report_json(report) + "\n")
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def cmd_export(args) -> int:
    build = EXPORTABLE.get(args.system)
    if build is None:
        print(f"bowtie-mech: unknown system {args.system!r}; choose from {sorted(EXPORTABLE)}", file=sys.stderr)
        return EXIT_USAGE
    s: MatchedPairStructure = build()
    try:
        save_structure(s, args.path)
    except OSError as exc:
        print(f"bowtie-mech: cannot write {args.path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bowtie-mech", description="Matched-pair Lagrangian dynamics")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="integrate a system described by a JSON config")
    r.add_argument("config")
    r.set_defaults(fn=cmd_run)
    v = sub.add_parser("verify", help="run the verification suites and print a JSON report")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE")
    v.add_argument("--only", action="append", choices=[n for n, _, _ in SUITES])
    v.add_argument("--inject-fault", action="append", choices=FAULTS, help=argparse.SUPPRESS)
    v.set_defaults(fn=cmd_verify)
    e = sub.add_parser("export", help="write a structure document")
    e.add_argument("system")
    e.add_argument("path")
    e.set_defaults(fn=cmd_export)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
