"""Verification suites behind ``circleflow verify``.

Each suite returns a deterministic report::

    {"id", "status": "PASS" | "FAIL", "params", "checks": [...], "data"}

where every check records its value against a tolerance, so a FAIL
always carries the residual and the parameters that produced it.  Reports
hold no timings, which keeps repeated runs byte-identical.
"""
from __future__ import annotations

import math

import numpy as np

from .config import RunConfig
from .confmap import JordanCurveSamples, boundary_residual, exterior_map
from .flow import (Germ, backward_limit_check, generator, integrate_flow, loewner_measure, phi_exact,
                   sup_distance)
from .herglotz import boundary_values, poltoratski_report, positivity_probe
from .measures import (CircleMeasure, conformal_measure_oracle, conformal_measure_solve, verify_conformal,
                       weak_distance)
from .radius import radius_trace, verify_radius_identities


def _check(name: str, value, tolerance, op: str = "<") -> dict:
    value = float(value) if not isinstance(value, bool) else value
    if op == "<":
        ok = value < tolerance
    elif op == ">":
        ok = value > tolerance
    elif op == "within":
        lo, hi = tolerance
        ok = lo <= value <= hi
        tolerance = [lo, hi]
    elif op == "is":
        ok = value is tolerance
    else:
        raise ValueError(op)
    return {"name": name, "value": value, "tolerance": tolerance, "op": op, "pass": bool(ok)}


def _report(sid: str, cfg: RunConfig, params: dict, checks: list[dict], data: dict | None = None) -> dict:
    params = dict(params)
    params.setdefault("seed", cfg.seed)
    params.setdefault("N", cfg.N)
    return {"id": sid, "status": "PASS" if all(c["pass"] for c in checks) else "FAIL",
            "params": params, "checks": checks, "data": data or {}}


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def herglotz_checks(label: str, mu: CircleMeasure, tol: float, value_at_infinity=None) -> list[dict]:
    """Positivity of ``Re H`` on sampled exterior circles and ``|H(inf) - 1|``."""
    h_inf = mu.mass if value_at_infinity is None else value_at_infinity
    return [_check(f"{label}: min Re H on exterior samples", positivity_probe(mu), 0.0, ">"),
            _check(f"{label}: |H(inf) - 1|", abs(h_inf - 1.0), tol)]


def _flow_family(cfg: RunConfig) -> RunConfig:
    """Flow suites need a map with a nontrivial linearizer; germs map to Moebius."""
    return cfg if cfg.family in ("moebius", "fourier", "rotation") else cfg.with_overrides(family="moebius")


# ------------------------------------------------------------------ suites

def suite_measure(cfg: RunConfig) -> dict:
    """2-conformal measure: solver vs closed form and the defining identity on arcs."""
    cfg = _flow_family(cfg)
    g = cfg.build_map()
    mu = conformal_measure_solve(g, cfg.s)
    ref = conformal_measure_oracle(g, cfg.s, mu.M)
    gap = float(np.max(np.abs(mu.density - ref.density)))
    ident = verify_conformal(mu, g, cfg.s, n_arcs=100, seed=cfg.seed)
    checks = [_check("sup |solver - oracle| density", gap, cfg.tol("measure_gap")),
              _check("defining identity over seeded arcs", ident["max_residual"], cfg.tol("conformal_identity"))]
    checks += herglotz_checks("conj pullback of mu_s", mu.pullback_conj(), cfg.tol("herglotz_infinity"))
    return _report("Measure", cfg, {"family": cfg.family, "a": cfg.a, "alpha": cfg.alpha, "s": cfg.s,
                                    "method": mu.meta.get("method"), "n_arcs": 100}, checks)


def suite_exterior(cfg: RunConfig) -> dict:
    """Circle and ellipse capacities and the Joukowski boundary residual."""
    M = 2 * cfg.N
    tol = cfg.tol("capacity")
    R, A, B = 1.7, 2.0, 1.0
    circ = exterior_map(JordanCurveSamples.circle(R, center=0.2 - 0.1j, M=M))
    ell = exterior_map(JordanCurveSamples.ellipse(A, B, M=M))

    def warped(s):  # same ellipse, non-uniform parametrization
        u = s + 0.3 * np.sin(s)
        return A * np.cos(u) + 1j * B * np.sin(u)

    def dwarped(s):
        u = s + 0.3 * np.sin(s)
        return (-A * np.sin(u) + 1j * B * np.cos(u)) * (1 + 0.3 * np.cos(s))

    jmap = exterior_map(JordanCurveSamples.from_function(warped, dwarped, M=M))
    z = 1.25 * np.exp(1j * np.linspace(0.0, 2 * np.pi, 257))
    c0 = 0.5 * (A + B)
    c1 = 0.5 * (A - B)
    jouk = float(np.max(np.abs(jmap.phi(z) - (c0 * z + c1 / z))))
    checks = [_check("|cap(circle) - log R|", abs(circ.capacity - math.log(R)), tol),
              _check("|cap(ellipse) - log((a+b)/2)|", abs(ell.capacity - math.log(c0)), tol),
              _check("|cap(warped ellipse) - log((a+b)/2)|", abs(jmap.capacity - math.log(c0)), tol),
              _check("Joukowski boundary residual", boundary_residual(jmap), cfg.tol("joukowski")),
              _check("sup |phi - Joukowski| on |z| = 1.25", jouk, cfg.tol("joukowski"))]
    return _report("Exterior", cfg, {"R": R, "a": A, "b": B, "M": M}, checks)


def suite_T1_1(cfg: RunConfig) -> dict:
    """Driving measure of the chain equals ``r^* mu_{2, g_t}``."""
    cfg = _flow_family(cfg)
    g = cfg.build_map()
    t0 = 0.05
    ds_list = [1e-2, 1e-3, 1e-4]
    st = phi_exact(g, t0)
    ref = conformal_measure_oracle(st.map, 2.0).pullback_conj()
    rows, checks = [], []
    for ds in ds_list:
        L = loewner_measure(st, phi_exact(g, t0 + ds))
        rows.append({"ds": ds, "weak_distance": weak_distance(L, ref), "raw_mass": L.meta["raw_mass"],
                     "clipped_mass": L.meta["clipped_mass"], "psd_ok": L.meta["psd_ok"]})
        checks += herglotz_checks(f"Loewner measure ds={ds:g}", L, cfg.tol("herglotz_infinity"),
                                  L.meta["raw_mass"])
    wd = [r["weak_distance"] for r in rows]
    checks.insert(0, _check("weak distance at ds = 1e-3", wd[1], cfg.tol("loewner_weak")))
    checks.insert(1, _check("weak distance decreasing under refinement",
                            all(x > y for x, y in zip(wd, wd[1:])), True, "is"))
    checks.insert(2, _check("Toeplitz positivity of moments", all(r["psd_ok"] for r in rows), True, "is"))
    return _report("T1.1", cfg, {"family": cfg.family, "a": cfg.a, "alpha": cfg.alpha, "t": t0,
                                 "ds": ds_list}, checks, {"rows": rows})


def suite_T1_2(cfg: RunConfig) -> dict:
    """Difference quotients ``(Phi_t(g) - g)/t`` converge to ``X(g)`` at order one."""
    cfg = _flow_family(cfg)
    g = cfg.build_map()
    G = generator(g, "oracle")
    ts = [1e-2, 1e-3, 1e-4]
    errs = [float(np.max(np.abs((phi_exact(g, t).map.samples() - g.samples()) / t - G.X))) for t in ts]
    checks = []
    if cfg.family == "rotation":
        checks.append(_check("max difference-quotient error", max(errs), 1e-10))
    else:
        sl = _slope(ts, errs)
        checks.append(_check("log-log slope", sl, (1 - cfg.tol("generator_slope"), 1 + cfg.tol("generator_slope")),
                             "within"))
    checks.append(_check("tangency |Re(X/g)|", G.tangency_residual(), 1e-8))
    checks.append(_check("min Re chi(z)/z (Herglotz)", G.herglotz_min(), 0.0, ">"))
    return _report("T1.2", cfg, {"family": cfg.family, "a": cfg.a, "alpha": cfg.alpha, "t": ts}, checks,
                   {"errors": errs})


def suite_T1_3(cfg: RunConfig) -> dict:
    """Euler flow converges to the exact flow at order one; round trip through negative times."""
    cfg = _flow_family(cfg)
    g = cfg.build_map()
    exact = phi_exact(g, cfg.t_end).map
    dts = [4 * cfg.dt, 2 * cfg.dt, cfg.dt]
    gaps = [sup_distance(integrate_flow(g, cfg.t_end, dt)[-1].map, exact) for dt in dts]
    back = phi_exact(exact, -cfg.t_end).map
    checks = []
    if cfg.family == "rotation":
        checks.append(_check("Euler endpoint gap", max(gaps), 1e-10))
    else:
        order = [math.log2(gaps[i] / gaps[i + 1]) for i in range(2)]
        lo, hi = 1 - cfg.tol("euler_order"), 1 + cfg.tol("euler_order")
        checks += [_check(f"observed order {dts[i]:g} -> {dts[i + 1]:g}", o, (lo, hi), "within")
                   for i, o in enumerate(order)]
        checks.append(_check(f"endpoint gap at dt = {cfg.dt:g}", gaps[-1], cfg.tol("euler_gap")))
    checks.append(_check("two-sided round trip Phi_-t o Phi_t", sup_distance(back, g), 1e-6))
    return _report("T1.3", cfg, {"family": cfg.family, "a": cfg.a, "alpha": cfg.alpha, "t_end": cfg.t_end,
                                 "dt": dts}, checks, {"gaps": gaps})


def _germ_for(cfg: RunConfig) -> Germ:
    if cfg.family in ("rotation", "moebius_germ"):
        return cfg.germ()
    return Germ("moebius", cfg.alpha_value, cfg.b)


def suite_T1_5(cfg: RunConfig) -> dict:
    """Backward maps of a linearizable germ tend to the rotation."""
    germ = _germ_for(cfg)
    ts = [-1.0, -2.0, -3.0]
    rep = backward_limit_check(germ, ts, 2 * cfg.N)
    last = rep["rows"][-1]["sup_distance"]
    checks = [_check("strictly decreasing over t = -1, -2, -3", rep["strictly_decreasing"], True, "is"),
              _check("||g_t - R_alpha|| at t = -3", last, cfg.tol("backward_limit")),
              _check("capacity error", rep["max_capacity_error"], cfg.tol("capacity"))]
    return _report("T1.5", cfg, {"germ": germ.to_json(), "t": ts}, checks, {"rows": rep["rows"]})


def suite_P5_1(cfg: RunConfig) -> dict:
    """Semigroup law ``Phi_s o Phi_t = Phi_{s+t}``."""
    cfg = _flow_family(cfg)
    g = cfg.build_map()
    pairs = [(0.05, 0.05), (0.1, 0.05)]
    gaps = []
    for s, t in pairs:
        two = phi_exact(phi_exact(g, t).map, s).map
        gaps.append(sup_distance(two, phi_exact(g, s + t).map))
    checks = [_check(f"sup gap Phi_{s:g} o Phi_{t:g} vs Phi_{s + t:g}", gp, cfg.tol("semigroup"))
              for (s, t), gp in zip(pairs, gaps)]
    return _report("P5.1", cfg, {"family": cfg.family, "a": cfg.a, "alpha": cfg.alpha, "pairs": pairs}, checks,
                   {"gaps": gaps})


def suite_T8_3(cfg: RunConfig) -> dict:
    """Conformal radius identities along the germ flow."""
    germ = _germ_for(cfg)
    t_mid = 0.5
    M = 2 * cfg.N
    reps = []
    for h in (1e-3, 5e-4):
        reps.append(verify_radius_identities(radius_trace(germ, [t_mid - h, t_mid, t_mid + h], M)))
    coarse, fine = reps
    tol = cfg.tol("radius")
    checks = [_check("real-part identity residual (dt = 1e-3)", coarse["max_residual_real"], tol),
              _check("k-dot identity residual (dt = 1e-3)", coarse["max_residual_imag"], tol),
              _check("integral consistency", coarse["max_integral_gap"], tol)]
    if germ.kind != "linear":
        order = math.log2(coarse["max_residual_imag"] / fine["max_residual_imag"])
        checks.append(_check("observed order of k-dot residual", order, (1.8, 2.2), "within"))
    trace = radius_trace(germ, np.linspace(-1.0, 1.0, 9), M)
    inc = trace.increments()
    checks.append(_check("r(t) strictly increasing", min(inc["first_differences"]), 0.0, ">"))
    checks.append(_check("r(t) below the Siegel radius", bool(np.all(trace.r < germ.siegel_radius)), True, "is"))
    return _report("T8.3", cfg, {"germ": germ.to_json(), "t": t_mid, "dt": [1e-3, 5e-4], "M": M}, checks,
                   {"coarse": coarse["rows"], "fine": fine["rows"], "r": trace.r.tolist(),
                    "second_differences": inc["second_differences"]})


def suite_fatou(cfg: RunConfig) -> dict:
    """Radial limits of ``Re H`` recover a band-limited density."""
    M = 2 * cfg.N

    def f(th):
        return 1.0 + 0.5 * np.cos(th) + 0.3 * np.sin(2 * th)

    mu = CircleMeasure.from_function(f, M)
    bv = boundary_values(mu)
    # Re H at xi tends to 2 pi times the density at conj(xi) (densities are per d theta)
    target = 2 * np.pi * mu.density_at(-bv.theta)
    err = float(np.max(np.abs(bv.P - target)))
    checks = [_check("sup |P - f o r| after extrapolation", err, cfg.tol("fatou")),
              _check("flagged grid points", int(np.count_nonzero(bv.flagged)), 1)]
    checks += herglotz_checks("Fatou test measure", mu, cfg.tol("herglotz_infinity"))
    return _report("Fatou", cfg, {"density": "1 + 0.5 cos + 0.3 sin 2t (normalized)", "eps": [1e-3, 5e-4],
                                  "M": M}, checks)


def suite_poltoratski(cfg: RunConfig) -> dict:
    """Superlevel sets of ``|Q|`` recover the atom of ``(Leb + delta_1) / 2``."""
    M = 2 * cfg.N
    mu = CircleMeasure.lebesgue(M).mix(CircleMeasure.dirac(0.0, M), 0.5)
    ts = [1e2, 1e3, 1e4]
    rep = poltoratski_report(mu, ts)
    masses = [r["mass"] for r in rep["rows"]]
    wd = [r["weak_distance"] for r in rep["rows"]]
    errs = [abs(m - 0.5) for m in masses]
    checks = [_check("relative mass error at finest threshold", errs[-1] / 0.5, cfg.tol("poltoratski_mass_rel")),
              _check("mass error improves monotonically", all(x > y for x, y in zip(errs, errs[1:])), True, "is"),
              _check("weak distance improves monotonically", all(x > y for x, y in zip(wd, wd[1:])), True, "is")]
    checks += herglotz_checks("mixed measure", mu, cfg.tol("herglotz_infinity"))
    return _report("Poltoratski", cfg, {"measure": "0.5 Lebesgue + 0.5 delta_1", "t": ts, "M": M}, checks,
                   {"rows": rep["rows"]})


SUITES = {
    "T1.1": suite_T1_1,
    "T1.2": suite_T1_2,
    "T1.3": suite_T1_3,
    "T1.5": suite_T1_5,
    "P5.1": suite_P5_1,
    "T8.3": suite_T8_3,
    "Fatou": suite_fatou,
    "Poltoratski": suite_poltoratski,
    "Measure": suite_measure,
    "Exterior": suite_exterior,
}


def run_suites(ids, cfg: RunConfig) -> dict:
    """Run the named suites (``"all"`` expands to every suite) in a fixed order."""
    ids = list(SUITES) if ids in (None, "all") or list(ids) == ["all"] else list(ids)
    unknown = [i for i in ids if i not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite ids {unknown}; choose from {list(SUITES)}")
    reports = [SUITES[i](cfg) for i in ids]
    return {"config": cfg.to_json(), "seed": cfg.seed, "reports": reports,
            "status": "PASS" if all(r["status"] == "PASS" for r in reports) else "FAIL"}
