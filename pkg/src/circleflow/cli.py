"""Command-line front end: ``circleflow <verb> [flags]``.

Every verb writes its artifacts plus ``<verb>_report.json`` to ``--out-dir``,
prints the report to stdout and exits with status 0 iff all checks pass.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOLERANCES, FAMILIES, ConfigError, RunConfig
from .measures import _jsonable

VERBS = ("build-map", "measure", "herglotz", "map-exterior", "flow", "verify", "radius", "dump-config")


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        key, _, val = item.partition("=")
        if key not in DEFAULT_TOLERANCES or not val:
            raise ConfigError(f"--tol expects key=value with key in {sorted(DEFAULT_TOLERANCES)}, got {item!r}")
        out[key] = float(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="circleflow", description="Capacity flow of analytic circle maps.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("ids", nargs="*", help="suite ids for verify (default: all)")
    p.add_argument("--config", help="JSON file as written by dump-config")
    p.add_argument("--N", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--coeffs", nargs="+", help="lift coefficients p_1 p_2 ... of the fourier family")
    p.add_argument("--alpha")
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE")
    p.add_argument("--method", default="exact", help="flow: exact | euler | midpoint")
    p.add_argument("--measure", default="mu2", help="herglotz: mu2 | lebesgue | mixed")
    p.add_argument("--curve", default="hull", help="map-exterior: hull | circle | ellipse")
    return p


def config_from_args(args) -> RunConfig:
    cfg = RunConfig.from_json(json.loads(Path(args.config).read_text())) if args.config else RunConfig()
    kw = {k: getattr(args, k) for k in ("N", "seed", "family", "a", "b", "alpha", "s", "t", "t_end", "dt",
                                         "out_dir") if getattr(args, k) is not None}
    if args.coeffs:
        kw["coeffs"] = tuple(args.coeffs)
    return cfg.with_overrides(tolerances=_parse_tol(args.tol), **kw)


def _check(name, value, tol):
    return {"name": name, "value": float(value), "tolerance": tol, "op": "<", "pass": bool(value < tol)}


# ------------------------------------------------------------------ verbs

def cmd_build_map(cfg: RunConfig, args, out: Path) -> dict:
    from .circlemap import estimate_rotation_number
    g = cfg.build_map()
    (out / "map.json").write_text(g.dumps())
    est, err = estimate_rotation_number(g)
    checks = [_check("circle residual", g.circle_residual(), cfg.tol("tol_eval")),
              _check("|rotation estimate - alpha|", min(abs(est - g.rotation_number), 1 - abs(est - g.rotation_number)),
                     10 * err)]
    if g.linearizer is not None:
        checks.append(_check("conjugacy residual", g.conjugacy_residual(), 1e-8))
    return {"artifacts": ["map.json"], "checks": checks, "annulus": list(g.annulus)}


def cmd_measure(cfg: RunConfig, args, out: Path) -> dict:
    from .measures import conformal_measure_oracle, conformal_measure_solve, verify_conformal
    g = cfg.build_map()
    mu = conformal_measure_solve(g, cfg.s)
    (out / "measure.csv").write_text(mu.to_csv())
    (out / "measure.json").write_text(_dumps(mu.to_json()))
    ident = verify_conformal(mu, g, cfg.s, n_arcs=100, seed=cfg.seed)
    checks = [_check("defining identity over seeded arcs", ident["max_residual"], cfg.tol("conformal_identity"))]
    if g.linearizer is not None:
        ref = conformal_measure_oracle(g, cfg.s, mu.M)
        checks.insert(0, _check("sup |density - oracle|", np.max(np.abs(mu.density - ref.density)),
                                cfg.tol("measure_gap")))
    return {"artifacts": ["measure.csv", "measure.json"], "checks": checks, "method": mu.meta.get("method")}


def cmd_herglotz(cfg: RunConfig, args, out: Path) -> dict:
    from .herglotz import boundary_values
    from .measures import CircleMeasure, conformal_measure_solve
    from .suites import herglotz_checks
    M = 2 * cfg.N
    if args.measure == "lebesgue":
        mu = CircleMeasure.lebesgue(M)
    elif args.measure == "mixed":
        mu = CircleMeasure.lebesgue(M).mix(CircleMeasure.dirac(0.0, M), 0.5)
    elif args.measure == "mu2":
        mu = conformal_measure_solve(cfg.build_map(), 2.0).pullback_conj()
    else:
        raise ConfigError(f"unknown measure {args.measure!r}")
    bv = boundary_values(mu)
    (out / "boundary.csv").write_text(bv.to_csv())
    checks = herglotz_checks(args.measure, mu, cfg.tol("herglotz_infinity"))
    return {"artifacts": ["boundary.csv"], "checks": checks, "flagged": int(np.count_nonzero(bv.flagged))}


def cmd_map_exterior(cfg: RunConfig, args, out: Path) -> dict:
    from .confmap import JordanCurveSamples, boundary_residual, exterior_map
    from .flow import phi_exact
    M = 2 * cfg.N
    if args.curve == "circle":
        emap = exterior_map(JordanCurveSamples.circle(1.5, M=M))
    elif args.curve == "ellipse":
        emap = exterior_map(JordanCurveSamples.ellipse(2.0, 1.0, M=M))
    elif args.curve == "hull":
        emap = phi_exact(cfg.build_map(), cfg.t).hull
    else:
        raise ConfigError(f"unknown curve {args.curve!r}")
    (out / "correspondence.csv").write_text(emap.correspondence_csv())
    (out / "exterior.json").write_text(_dumps(emap.to_json()))
    checks = [_check("boundary residual", boundary_residual(emap), cfg.tol("joukowski"))]
    if args.curve == "hull":
        checks.append(_check("|capacity - t|", abs(emap.capacity - cfg.t), cfg.tol("capacity")))
    return {"artifacts": ["correspondence.csv", "exterior.json"], "checks": checks, "capacity": emap.capacity}


def cmd_flow(cfg: RunConfig, args, out: Path) -> dict:
    from .flow import dumps_jsonl, integrate_flow, phi_exact, sup_distance
    g = cfg.build_map()
    exact_end = phi_exact(g, cfg.t_end)
    if args.method == "exact":
        n = 10
        states = [phi_exact(g, cfg.t_end * j / n) for j in range(n + 1)]
        checks = [_check("capacity error at t_end", exact_end.diagnostics["capacity_error"], cfg.tol("capacity"))]
    elif args.method in ("euler", "midpoint"):
        states = integrate_flow(g, cfg.t_end, cfg.dt, args.method, cfg.tol("tol_eval"))
        checks = [_check("endpoint gap to exact flow", sup_distance(states[-1].map, exact_end.map),
                         cfg.tol("euler_gap"))]
    else:
        raise ConfigError(f"unknown flow method {args.method!r}")
    (out / "trajectory.jsonl").write_text(dumps_jsonl(states))
    return {"artifacts": ["trajectory.jsonl"], "checks": checks, "steps": len(states) - 1}


def cmd_radius(cfg: RunConfig, args, out: Path) -> dict:
    from .radius import radius_trace, verify_radius_identities
    from .suites import _germ_for
    germ = _germ_for(cfg)
    h = 1e-3
    t_list = cfg.t + h * np.arange(-5, 6)
    trace = radius_trace(germ, t_list, 2 * cfg.N)
    rep = verify_radius_identities(trace)
    (out / "radius.csv").write_text(trace.to_csv(rep["rows"]))
    checks = [_check("real-part identity residual", rep["max_residual_real"], cfg.tol("radius")),
              _check("k-dot identity residual", rep["max_residual_imag"], cfg.tol("radius")),
              _check("integral consistency", rep["max_integral_gap"], cfg.tol("radius"))]
    return {"artifacts": ["radius.csv"], "checks": checks, "germ": germ.to_json()}


def cmd_verify(cfg: RunConfig, args, out: Path) -> dict:
    from .suites import run_suites
    res = run_suites(args.ids or "all", cfg)
    (out / "verify.json").write_text(_dumps(res))
    checks = [{"name": f"suite {r['id']}", "value": r["status"], "tolerance": "PASS", "op": "==",
               "pass": r["status"] == "PASS"} for r in res["reports"]]
    return {"artifacts": ["verify.json"], "checks": checks, "reports": res["reports"]}


def cmd_dump_config(cfg: RunConfig, args, out: Path) -> dict:
    (out / "config.json").write_text(cfg.dumps() + "\n")
    return {"artifacts": ["config.json"], "checks": [], "config_json": cfg.to_json()}


COMMANDS = {"build-map": cmd_build_map, "measure": cmd_measure, "herglotz": cmd_herglotz,
            "map-exterior": cmd_map_exterior, "flow": cmd_flow, "verify": cmd_verify, "radius": cmd_radius,
            "dump-config": cmd_dump_config}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.ids and args.verb != "verify":
        parser.error(f"positional ids are only accepted by verify, got {args.ids}")
    try:
        cfg = config_from_args(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        body = COMMANDS[args.verb](cfg, args, out)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    status = "PASS" if all(c["pass"] for c in body["checks"]) else "FAIL"
    report = {"verb": args.verb, "status": status, "seed": cfg.seed, "config": cfg.to_json(), **body}
    text = _dumps(report)
    (out / f"{args.verb}_report.json").write_text(text)
    sys.stdout.write(text)
    print(f"{args.verb}: {status} ({time.perf_counter() - start:.1f} s)", file=sys.stderr)
    return 0 if status == "PASS" else 1


if __name__ == "__main__":
    sys.exit(main())
