"""The capacity flow on circle maps together with its generator and driving measures.

For a map ``g`` linearized by ``h`` the invariant curves ``h({|w| = r})``
bound hulls ``K`` (closed disk plus Herman annulus).  With ``phi`` the
normalized exterior map of ``K`` and capacity ``t``, the flowed map is
``Phi_t(g) = psi o g o phi`` on the circle.  Parametrizing the curve by the
linearizing angle ``s`` makes ``g`` the translation ``s -> s + 2 pi alpha``,
so with the boundary correspondence ``phi(e^{i theta}) = gamma(S(theta))``

    Phi_t(g)(e^{i theta}) = exp(i S^{-1}(S(theta) + 2 pi alpha)),

and ``e^{i S^{-1}}`` linearizes the flowed map.  The same construction with
``r < 1`` runs the flow backwards, and with an interior germ linearizer it
produces the maps attached to Siegel compacts.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .circlemap import TOL_EVAL, CircleMap, ConformalConjugacy
from .cohomology import kam_linearize
from .confmap import (ExteriorMap, JordanCurveSamples, capacity_root, exterior_map, linearized_curve)
from .fourier import TWO_PI, Laurent, circle_grid, trig_from_samples
from .measures import CircleMeasure, _jsonable, conformal_measure_oracle, conformal_measure_solve

CAPACITY_XTOL = 1e-15


class FlowDomainError(ValueError):
    """Requested time lies outside the certified family of invariant hulls."""


class StepRejected(RuntimeError):
    pass


# ------------------------------------------------------------------ states

@dataclass(frozen=True, eq=False)
class FlowState:
    t: float
    map: CircleMap
    hull: ExteriorMap | None = None
    diagnostics: dict = field(default_factory=dict)

    def distance_to_rotation(self) -> float:
        """sup over the circle of ``|g_t(xi) - e^{2 pi i alpha} xi|``."""
        g = self.map
        xi = np.exp(1j * circle_grid(g.M))
        return float(np.max(np.abs(g.samples() - np.exp(2j * np.pi * g.rotation_number) * xi)))

    def fourier_norm_from_rotation(self) -> float:
        g = self.map
        c = g.series.dense(g.N).copy()
        c[g.N + 1] -= np.exp(2j * np.pi * g.rotation_number)
        return float(np.sqrt(np.sum(np.abs(c) ** 2)))

    def summary(self) -> dict:
        d = {"t": self.t,
             "capacity": None if self.hull is None else self.hull.capacity,
             "fourier_norm_minus_rotation": self.fourier_norm_from_rotation(),
             "circle_residual": self.map.circle_residual(),
             "annulus": list(self.map.annulus)}
        d.update(self.diagnostics)
        return _jsonable(d)


def _unit_disk_map(M: int) -> ExteriorMap:
    return exterior_map(JordanCurveSamples.circle(1.0, M=M))


# ------------------------------------------------------------------ exact flow

def flowed_map(emap: ExteriorMap, alpha: float) -> CircleMap:
    """``psi o g o phi`` on the circle for a curve parametrized by linearizing angle."""
    omega = TWO_PI * alpha
    x = emap.S_inv(emap.S + omega)
    k = emap.welding().inverse_conjugacy()
    return CircleMap.from_samples(np.exp(1j * x), alpha, "constructed", k)


def _capacity_bracket(t: float, lo: float, hi: float) -> tuple[float, float]:
    return (0.0, math.log(hi) * (1 - 1e-9)) if t > 0 else (math.log(lo) * (1 - 1e-9), 0.0)


def phi_exact(g: CircleMap, t: float, M: int | None = None) -> FlowState:
    """Exact semigroup ``Phi_t(g)`` for a map with constructed linearizer.

    ``t < 0`` gives the backward map built from an invariant curve inside
    the disk (the inverse of the forward step).
    """
    h = g.linearizer
    if h is None or g.rotation_number is None:
        raise ValueError("exact flow needs a constructed linearizer")
    M = M or g.M
    if t == 0:
        return FlowState(0.0, g, _unit_disk_map(M), {"r": 1.0})
    omega = TWO_PI * g.rotation_number
    lo, hi = h.annulus

    def curve_of_u(u):
        return linearized_curve(h, math.exp(u), omega, M)

    bracket = _capacity_bracket(t, lo, hi)
    try:
        u, emap = capacity_root(curve_of_u, t, bracket, guess=t, xtol=CAPACITY_XTOL)
    except (ValueError, RuntimeError) as exc:
        raise FlowDomainError(f"t = {t} is beyond the certified family of invariant curves: {exc}") from None
    gt = flowed_map(emap, g.rotation_number)
    diag = {"r": math.exp(u), "capacity_error": abs(emap.capacity - t),
            "map_residual": emap.residual, "theodorsen_iterations": emap.iterations}
    return FlowState(t, gt, emap, diag)


# ------------------------------------------------------------------ closed forms

def moebius_flow_oracle(a: complex, t: float) -> tuple[complex, float, float]:
    """Hull of ``h_a o R o h_a^{-1}`` at capacity ``t`` is a round disk.

    Returns ``(center c, radius e^t, r)`` with ``h_a({|w| = r})`` the bounding
    circle; the exterior map is ``phi_t(z) = e^t z + c``.
    """
    a = complex(a)
    A = abs(a) ** 2
    e = math.exp(t)
    if A == 0:
        return 0j, e, e
    r = (-(1 - A) + math.sqrt((1 - A) ** 2 + 4 * e * e * A)) / (2 * e * A)
    c = a * (1 - r * r) / (1 - A * r * r)
    return c, e, r


def moebius_flowed_samples(g: CircleMap, a: complex, t: float, M: int | None = None) -> np.ndarray:
    """Closed-form ``Phi_t(g)`` on the circle grid: ``(g(e^t z + c) - c) e^{-t}``."""
    c, e, _ = moebius_flow_oracle(a, t)
    h = ConformalConjugacy.moebius(a)
    lam = np.exp(2j * np.pi * g.rotation_number)
    z = np.exp(1j * circle_grid(M or g.M))
    w = e * z + c
    return (h(lam * h.inverse(w)) - c) / e


# ------------------------------------------------------------------ generator

@dataclass(frozen=True, eq=False)
class GeneratorField:
    """``chi(z) = z H(z)`` with ``H`` the Herglotz transform of ``r^* mu_2``, and
    ``X(g) = g' chi - chi o g`` sampled on the circle."""

    g: CircleMap
    mu2: CircleMeasure
    chi: Laurent
    X: np.ndarray

    def chi_eval(self, z) -> np.ndarray:
        return self.chi(np.asarray(z, dtype=complex))

    @cached_property
    def X_series(self) -> Laurent:
        return Laurent.from_samples(self.X, trunc=0.0)

    def tangency_residual(self) -> float:
        """sup over the grid of ``|Re(X / g)|`` (zero for fields tangent to circle maps)."""
        return float(np.max(np.abs((self.X / self.g.samples()).real)))

    def herglotz_min(self, radii=None) -> float:
        """min ``Re(chi(z)/z)`` over circles of the given radii (> 1)."""
        radii = np.geomspace(1.001, 1e3, 50) if radii is None else np.asarray(radii)
        th = circle_grid(256)
        z = radii[:, None] * np.exp(1j * th)[None, :]
        return float(np.min((self.chi(z) / z).real))


def generator(g: CircleMap, method: str = "auto", mu2: CircleMeasure | None = None) -> GeneratorField:
    """Generator field at ``g`` from the 2-conformal measure.

    ``method`` is passed to :func:`conformal_measure_solve`; ``"oracle"``
    uses the closed form from the attached linearizer.
    """
    if mu2 is None:
        mu2 = conformal_measure_oracle(g, 2.0) if method == "oracle" else conformal_measure_solve(g, 2.0, method)
    nu = mu2.pullback_conj()
    M = g.M
    K = M // 2
    mom = nu.moments(K)
    mom[K] *= 0.5
    coeffs = np.empty(K + 1, dtype=complex)        # powers z^{1-K} .. z^1
    coeffs[K] = mom[0]
    coeffs[:K] = 2.0 * mom[1:][::-1]
    chi = Laurent(coeffs, 1 - K).trimmed(1e-16 * abs(mom[0]))
    xi = np.exp(1j * circle_grid(M))
    gx = g.samples()
    dg = g.series.deriv().on_circle(M)
    X = dg * chi(xi) - chi(gx)
    return GeneratorField(g, mu2, chi, X)


# ------------------------------------------------------------------ Euler flow

def _as_fourier_lift(h: ConformalConjugacy, M: int) -> Laurent:
    th = circle_grid(M)
    return trig_from_samples(h.lift_on_circle(th) - th)


def _project(values: np.ndarray, g_prev: CircleMap, tol_eval: float) -> tuple[CircleMap, dict]:
    """Renormalize to the circle and refit, then re-linearize from a warm start."""
    alpha = g_prev.rotation_number
    values = values / np.abs(values)
    raw = CircleMap.from_samples(values, alpha, "constructed", None, tol_eval=tol_eval)
    resid = raw.circle_residual()
    if resid > 10 * tol_eval:
        raise StepRejected(f"circle residual {resid:.3e} after projection exceeds {10 * tol_eval:.1e}")
    eta0 = _as_fourier_lift(g_prev.linearizer, g_prev.M) if g_prev.linearizer is not None else None
    h, lam, info = kam_linearize(raw, alpha, eta0)
    out = CircleMap.from_samples(values * np.exp(1j * lam), alpha, "constructed", h, tol_eval=tol_eval)
    return out, {"rotation_correction": lam, "projection_residual": resid,
                 "newton_iterations": info["iterations"]}


def integrate_flow(g0: CircleMap, t_end: float, dt: float, method: str = "euler",
                   tol_eval: float = TOL_EVAL, measure_method: str = "auto") -> list[FlowState]:
    """Explicit Euler (or midpoint) integration of ``dg/dt = X(g)``.

    Each step is renormalized to modulus one on the circle, refit, and
    projected back to rotation number ``alpha`` by Newton linearization.
    """
    n = int(round(t_end / dt))
    if abs(n * dt - t_end) > 1e-12 * max(1.0, t_end):
        raise ValueError("t_end must be an integer multiple of dt")
    g = g0
    out = [FlowState(0.0, g0, None, {"rotation_correction": 0.0})]
    for j in range(n):
        X = generator(g, measure_method).X
        if method == "euler":
            values = g.samples() + dt * X
        elif method == "midpoint":
            half, _ = _project(g.samples() + 0.5 * dt * X, g, tol_eval)
            values = g.samples() + dt * generator(half, measure_method).X
        else:
            raise ValueError(f"unknown method {method!r}")
        g, diag = _project(values, g, tol_eval)
        # certified annulus relative to the start; no a priori width is known
        lo0, hi0 = g0.annulus
        diag["annulus_shrinkage"] = max(math.log(g.annulus[0] / lo0), math.log(hi0 / g.annulus[1]), 0.0)
        out.append(FlowState((j + 1) * dt, g, None, diag))
    return out


def sup_distance(g1: CircleMap, g2, M: int | None = None) -> float:
    """sup over the circle grid; ``g2`` may be a map or an array of samples."""
    M = M or g1.M
    a = g1.samples(M)
    b = g2 if isinstance(g2, np.ndarray) else g2.samples(M)
    return float(np.max(np.abs(a - b)))


# ------------------------------------------------------------------ driving measure

def loewner_measure(state_t: FlowState, state_s: FlowState, R0: float = 2.0, n_moments: int = 64,
                    noise_tol: float = 1e-8, psd_tol: float = 1e-8) -> CircleMeasure:
    """Driving measure from the chain increment ``psi_t o phi_s`` on ``|z| = R0``.

    ``log(psi_t(phi_s(z)) / z) / (s - t)`` approximates the Herglotz function
    ``H_t``; its value at infinity is exactly one by the capacity
    normalization.  The coefficient of ``z^{-k}`` gives ``2 nu_hat(k)``.
    Moments are kept while the amplified noise (estimated from the positive
    powers, which vanish exactly) stays below ``noise_tol``.
    """
    ds = state_s.t - state_t.t
    if ds <= 0:
        raise ValueError("need s > t")
    M = state_t.map.M
    th = circle_grid(M)
    z = R0 * np.exp(1j * th)
    w = state_s.hull.phi(z)
    zeta = state_t.hull.psi(w, z0=z)
    Hs = Laurent.from_samples(np.log(zeta / z) / ds, radius=R0, trunc=0.0)
    pos = np.array([abs(Hs.coef(k)) * R0 ** k for k in range(1, M // 2)])
    noise = float(np.max(pos)) if len(pos) else 0.0
    K = 0
    while K < n_moments and noise * R0 ** (K + 1) < noise_tol:
        K += 1
    h0 = Hs.coef(0)
    mom = np.array([h0] + [0.5 * Hs.coef(-k) for k in range(1, K + 1)]) / h0.real
    # Toeplitz positivity of the truncated moment sequence
    idx = np.arange(K + 1)
    T = mom[np.abs(idx[:, None] - idx[None, :])]
    T = np.where(idx[:, None] >= idx[None, :], T, np.conj(T))
    min_eig = float(np.min(np.linalg.eigvalsh(T)))
    k = np.arange(1, K + 1)
    dens = (1.0 + 2.0 * np.real(np.exp(1j * np.outer(th, k)) @ mom[1:])) / TWO_PI
    clipped = float(TWO_PI * np.mean(np.maximum(-dens, 0.0)))
    dens = np.maximum(dens, 0.0)
    meta = {"raw_mass": float(h0.real), "raw_mass_imag": float(h0.imag), "n_moments_effective": K,
            "noise_level": noise, "toeplitz_min_eig": min_eig, "psd_ok": bool(min_eig > -psd_tol),
            "clipped_mass": clipped, "ds": ds, "R0": R0}
    return CircleMeasure(dens, (), meta)


# ------------------------------------------------------------------ germs

@dataclass(frozen=True)
class Germ:
    """Linearizable germ ``f = H o R_alpha o H^{-1}`` fixing 0 with ``H'(0) = 1``.

    kinds: ``linear`` (``H = id``); ``moebius`` with ``f(z) = lambda z / (1 - b z)``,
    ``H(w) = z* w / (z* + w)`` where ``z* = (1 - lambda) / b``; ``poly`` with
    ``H(w) = w + b w^2``.  ``rho_max`` is the radius of the disk on which the
    level sets ``H({|w| = rho})`` are certified for the mapping routine.
    """

    kind: str
    alpha: float
    b: complex = 0j

    @property
    def lam(self) -> complex:
        return complex(np.exp(2j * np.pi * self.alpha))

    @property
    def zstar(self) -> complex:
        return (1 - self.lam) / self.b

    @property
    def siegel_radius(self) -> float:
        """Conformal radius of the linearization domain at 0."""
        if self.kind == "linear":
            return math.inf
        if self.kind == "moebius":
            return abs(self.zstar)
        return 1.0 / (2 * abs(self.b))

    @property
    def rho_max(self) -> float:
        return 0.5 * self.siegel_radius

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if self.kind == "linear":
            return w.copy()
        if self.kind == "moebius":
            zs = self.zstar
            return zs * w / (zs + w)
        return w + self.b * w * w

    def deriv(self, w):
        w = np.asarray(w, dtype=complex)
        if self.kind == "linear":
            return np.ones_like(w)
        if self.kind == "moebius":
            zs = self.zstar
            return zs * zs / (zs + w) ** 2
        return 1.0 + 2 * self.b * w

    def inverse(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "linear":
            return z.copy()
        if self.kind == "moebius":
            zs = self.zstar
            return zs * z / (zs - z)
        return (-1 + np.sqrt(1 + 4 * self.b * z)) / (2 * self.b)

    def f(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "moebius":
            return self.lam * z / (1 - self.b * z)
        return self(self.lam * self.inverse(z))

    def to_json(self) -> dict:
        return {"kind": self.kind, "alpha": self.alpha, "b": [complex(self.b).real, complex(self.b).imag]}


def germ_state(germ: Germ, t: float, M: int = 2048, S0=None) -> tuple[FlowState, float]:
    """Map ``g^f_t`` on the circle from the Siegel compact ``K_t = H({|w| <= rho})`` of capacity ``t``."""
    omega = TWO_PI * germ.alpha
    log_max = math.log(germ.rho_max) if math.isfinite(germ.rho_max) else t + 2.0
    hi = min(t + 2.0, log_max * (1 - 1e-12) if log_max > 0 else log_max - 1e-12)
    lo = t - 2.0
    if hi <= lo:
        raise FlowDomainError(f"K_t at t = {t} leaves the certified disk of the germ linearizer")

    def curve_of_u(u):
        return linearized_curve(germ, math.exp(u), omega, M)

    try:
        u, emap = capacity_root(curve_of_u, t, (lo, hi), guess=t, xtol=CAPACITY_XTOL)
    except (ValueError, RuntimeError) as exc:
        raise FlowDomainError(f"K_t at t = {t} leaves the certified disk of the germ linearizer: {exc}") from None
    gt = flowed_map(emap, germ.alpha)
    rho = math.exp(u)
    return FlowState(t, gt, emap, {"rho": rho, "capacity_error": abs(emap.capacity - t),
                                   "map_residual": emap.residual}), rho


def backward_limit_check(germ: Germ, t_list, M: int = 2048) -> dict:
    """``||g^f_t - R_alpha||`` along decreasing ``t``; reports monotonicity."""
    rows = []
    for t in t_list:
        st, rho = germ_state(germ, t, M)
        rows.append({"t": float(t), "rho": rho, "sup_distance": st.distance_to_rotation(),
                     "capacity_error": st.diagnostics["capacity_error"]})
    d = [r["sup_distance"] for r in rows]
    order = np.argsort([-r["t"] for r in rows])      # increasing -t
    ds = [d[i] for i in order]
    return {"germ": germ.to_json(), "rows": rows,
            "strictly_decreasing": bool(all(x > y for x, y in zip(ds, ds[1:]))),
            "max_capacity_error": max(r["capacity_error"] for r in rows)}


def dumps_jsonl(states) -> str:
    return "".join(json.dumps(s.summary(), sort_keys=True) + "\n" for s in states)
