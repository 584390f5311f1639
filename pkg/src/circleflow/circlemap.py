"""Analytic circle diffeomorphisms and their conjugacies.

A :class:`CircleMap` is a truncated Laurent series ``g(z) = sum c_k z^k``
(``-N <= k <= N``) that maps the unit circle to itself, together with the
annulus on which the truncation is trusted.  Maps built by conjugating a
rigid rotation carry their rotation number exactly and keep the conjugacy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .fourier import (TRUNC, TWO_PI, Laurent, certified_annulus, circle_grid, invert_lift,
                      lift_from_circle_values, trig_eval, trig_from_samples)

DEFAULT_N = 1024
TOL_EVAL = 1e-10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SILVER = math.sqrt(2.0) - 1.0
_BRONZE = (math.sqrt(13.0) - 3.0) / 2.0
_SQRT3 = math.sqrt(3.0) - 1.0

#: Quadratic irrationals (bounded partial quotients) admitted as rotation numbers.
DIOPHANTINE_MENU = {
    "golden": _GOLDEN,
    "golden_c": 1.0 - _GOLDEN,
    "silver": _SILVER,
    "silver_c": 1.0 - _SILVER,
    "bronze": _BRONZE,
    "bronze_c": 1.0 - _BRONZE,
    "sqrt3": _SQRT3,
    "sqrt3_c": 1.0 - _SQRT3,
}


class AnnulusError(ValueError):
    """Evaluation or composition outside the certified annulus."""


class AdmissibilityError(ValueError):
    """Rotation number outside the Diophantine menu."""


def resolve_alpha(alpha) -> float:
    """Menu name or numeric value -> float."""
    if isinstance(alpha, str):
        try:
            return DIOPHANTINE_MENU[alpha]
        except KeyError:
            raise AdmissibilityError(f"unknown rotation-number name {alpha!r}") from None
    return float(alpha)


def check_admissible(alpha: float, bypass: bool = False) -> float:
    alpha = float(alpha) % 1.0
    if bypass:
        return alpha
    for value in DIOPHANTINE_MENU.values():
        if abs(alpha - value) < 1e-12:
            return value
    frac = Fraction(alpha).limit_denominator(1000)
    if abs(float(frac) - alpha) < 1e-12:
        raise AdmissibilityError(f"rotation number {alpha} is rational ({frac})")
    raise AdmissibilityError(
        f"rotation number {alpha} is not in the Diophantine menu {sorted(DIOPHANTINE_MENU)}")


# ------------------------------------------------------------ conjugacies

@dataclass(frozen=True, eq=False)
class ConformalConjugacy:
    """Conformal map ``h`` near the unit circle, preserving the circle.

    kinds
        ``identity``; ``moebius`` with ``h(w) = (w + a) / (1 + conj(a) w)``;
        ``fourier`` with ``h(w) = w exp(i p(w))`` where ``p`` is real on the
        circle (``lift``), and ``inv_lift`` the same data for ``h^{-1}``.
    """

    kind: str
    a: complex = 0j
    lift: Laurent | None = None
    inv_lift: Laurent | None = None
    annulus: tuple[float, float] = (0.1, 10.0)

    @classmethod
    def identity(cls) -> "ConformalConjugacy":
        return cls("identity", annulus=(0.1, 10.0))

    @classmethod
    def moebius(cls, a: complex) -> "ConformalConjugacy":
        a = complex(a)
        if abs(a) >= 1:
            raise ValueError("moebius conjugacy needs |a| < 1")
        if a == 0:
            return cls.identity()
        r = min(10.0, 1.0 / (1.05 * abs(a)))
        return cls("moebius", a=a, annulus=(1.0 / r, r))

    @classmethod
    def fourier(cls, coeffs, p0: float = 0.0, M: int = 2 * DEFAULT_N) -> "ConformalConjugacy":
        """``h(e^{i t}) = exp(i (t + p(t)))`` with ``p = p0 + sum_k 2 Re(p_k e^{ikt})``."""
        coeffs = np.asarray(coeffs, dtype=complex)
        K = len(coeffs)
        c = np.zeros(2 * K + 1, dtype=complex)
        c[K] = p0
        c[K + 1:] = coeffs
        c[:K] = np.conj(coeffs[::-1])
        return cls.from_lift(Laurent(c, -K), M=M)

    @classmethod
    def from_lift(cls, lift: Laurent, M: int = 2 * DEFAULT_N, inv_lift: Laurent | None = None,
                  trunc: float = TRUNC) -> "ConformalConjugacy":
        theta = circle_grid(M)
        dlift = trig_eval(lift.theta_deriv(), theta)
        if np.min(1.0 + dlift) <= 0:
            raise ValueError("conjugacy is not a circle diffeomorphism (derivative vanishes)")
        if inv_lift is None:
            x = invert_lift(lift, theta)
            inv_lift = trig_from_samples(x - theta, trunc=trunc)
        lo1, hi1 = certified_annulus(lift, TOL_EVAL)
        lo2, hi2 = certified_annulus(inv_lift, TOL_EVAL)
        ann = (max(lo1, lo2), min(hi1, hi2))
        return cls("fourier", lift=lift, inv_lift=inv_lift, annulus=ann)

    def _check(self, w):
        r = np.abs(w)
        lo, hi = self.annulus
        if np.any(r < lo * (1 - 1e-12)) or np.any(r > hi * (1 + 1e-12)):
            raise AnnulusError(f"|w| in [{r.min():.6g}, {r.max():.6g}] outside conjugacy annulus {self.annulus}")

    def forward(self, w):
        w = np.asarray(w, dtype=complex)
        if self.kind == "identity":
            return w.copy()
        if self.kind == "moebius":
            return (w + self.a) / (1.0 + np.conj(self.a) * w)
        self._check(w)
        return w * np.exp(1j * self.lift(w))

    __call__ = forward

    def deriv(self, w):
        w = np.asarray(w, dtype=complex)
        if self.kind == "identity":
            return np.ones_like(w)
        if self.kind == "moebius":
            a = self.a
            return (1.0 - abs(a) ** 2) / (1.0 + np.conj(a) * w) ** 2
        self._check(w)
        return np.exp(1j * self.lift(w)) * (1.0 + 1j * w * self.lift.deriv()(w))

    def inverse(self, z, newton: int = 4):
        z = np.asarray(z, dtype=complex)
        if self.kind == "identity":
            return z.copy()
        if self.kind == "moebius":
            return (z - self.a) / (1.0 - np.conj(self.a) * z)
        w = z * np.exp(1j * self.inv_lift(z))
        for _ in range(newton):
            w = w - (self.forward(w) - z) / self.deriv(w)
        return w

    def lift_on_circle(self, theta) -> np.ndarray:
        """Angle lift ``t -> arg h(e^{it})`` (continuous, degree one)."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "identity":
            return theta.copy()
        if self.kind == "moebius":
            xi = np.exp(1j * theta)
            a = self.a
            return theta + np.angle((1.0 + a * np.conj(xi)) / (1.0 + np.conj(a) * xi))
        return theta + trig_eval(self.lift, theta)

    def inverse_lift_on_circle(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.kind == "identity":
            return theta.copy()
        if self.kind == "moebius":
            return ConformalConjugacy.moebius(-self.a).lift_on_circle(theta)
        return invert_lift(self.lift, theta, x0=theta + trig_eval(self.inv_lift, theta))

    def abs_deriv_on_circle(self, theta) -> np.ndarray:
        """``|h'(e^{it})|`` = derivative of the angle lift."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == "identity":
            return np.ones_like(theta)
        if self.kind == "moebius":
            a = self.a
            return (1.0 - abs(a) ** 2) / np.abs(1.0 + np.conj(a) * np.exp(1j * theta)) ** 2
        return 1.0 + trig_eval(self.lift.theta_deriv(), theta)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "annulus": list(self.annulus)}
        if self.kind == "moebius":
            d["a"] = [self.a.real, self.a.imag]
        if self.kind == "fourier":
            d["lift"] = self.lift.to_json()
            d["inv_lift"] = self.inv_lift.to_json()
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ConformalConjugacy":
        if d["kind"] == "identity":
            return cls.identity()
        if d["kind"] == "moebius":
            return cls.moebius(complex(*d["a"]))
        return cls("fourier", lift=Laurent.from_json(d["lift"]), inv_lift=Laurent.from_json(d["inv_lift"]),
                   annulus=tuple(d["annulus"]))


# ------------------------------------------------------------ circle maps

@dataclass(frozen=True, eq=False)
class CircleMap:
    """Analytic circle diffeomorphism stored as a truncated Laurent series."""

    series: Laurent
    N: int = DEFAULT_N
    annulus: tuple[float, float] = (1.0, 1.0)
    rotation_number: float | None = None
    rotation_tag: str | None = None
    linearizer: ConformalConjugacy | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_samples(cls, values, rotation_number=None, rotation_tag=None, linearizer=None,
                     tol_eval: float = TOL_EVAL, meta=None) -> "CircleMap":
        values = np.asarray(values, dtype=complex)
        M = len(values)
        series = Laurent.from_samples(values, trunc=TRUNC)
        ann = certified_annulus(series, tol_eval)
        return cls(series, M // 2, ann, rotation_number, rotation_tag, linearizer, dict(meta or {}))

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients for k = -N..N."""
        return self.series.dense(self.N)

    @property
    def M(self) -> int:
        return 2 * self.N

    def _check(self, z):
        r = np.abs(z)
        lo, hi = self.annulus
        if np.any(r < lo * (1 - 1e-12)) or np.any(r > hi * (1 + 1e-12)):
            raise AnnulusError(
                f"|z| in [{np.min(r):.6g}, {np.max(r):.6g}] outside certified annulus "
                f"({lo:.6g}, {hi:.6g})")

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        return self.series(z)

    __call__ = eval

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        return self._dseries(z)

    @cached_property
    def _dseries(self) -> Laurent:
        return self.series.deriv()

    def samples(self, M: int | None = None) -> np.ndarray:
        return self.series.on_circle(M or self.M)

    @cached_property
    def _disp_ref(self) -> np.ndarray:
        theta = circle_grid(self.M)
        return lift_from_circle_values(self.samples(), theta) - theta

    def displacement(self, x) -> np.ndarray:
        """Lift displacement ``G(x) - x`` with ``g(e^{ix}) = e^{i G(x)}``."""
        x = np.asarray(x, dtype=float)
        M = self.M
        idx = np.round(np.mod(x, TWO_PI) * M / TWO_PI).astype(int) % M
        ref = self._disp_ref[idx]
        v = self.series(np.exp(1j * x)) * np.exp(-1j * (x + ref))
        return ref + np.angle(v)

    def lift(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) + self.displacement(x)

    def abs_deriv_on_circle(self, x) -> np.ndarray:
        return np.abs(self._dseries(np.exp(1j * np.asarray(x, dtype=float))))

    def inverse_lift(self, y, tol: float = 1e-15, maxit: int = 60) -> np.ndarray:
        """Solve ``G(x) = y`` on the circle (Newton seeded by grid interpolation)."""
        y = np.asarray(y, dtype=float)
        theta = circle_grid(self.M)
        G = theta + self._disp_ref
        Gx = np.concatenate([G - TWO_PI, G, G + TWO_PI])
        tx = np.concatenate([theta - TWO_PI, theta, theta + TWO_PI])
        base = np.floor((y - G[0]) / TWO_PI) * TWO_PI
        x = np.interp(y - base, Gx, tx) + base
        for _ in range(maxit):
            r = self.lift(x) - y
            x = x - r / self.abs_deriv_on_circle(x)
            if np.max(np.abs(r)) < tol:
                break
        return x

    def scaled(self, phase: float) -> "CircleMap":
        """Post-compose with the rotation ``z -> e^{i phase} z``."""
        series = self.series.scale(np.exp(1j * phase))
        return CircleMap(series, self.N, self.annulus, self.rotation_number, self.rotation_tag,
                         self.linearizer, dict(self.meta))

    # -------------------------------------------------------- diagnostics

    def circle_residual(self, M: int | None = None) -> float:
        return float(np.max(np.abs(np.abs(self.samples(M or 2 * self.M)) - 1.0)))

    def reflection_residual(self, n_radii: int = 3) -> float:
        """max |conj(g(1/conj z)) - 1/g(z)| on circles inside the annulus."""
        lo, hi = self.annulus
        radii = np.exp(np.linspace(0.0, 0.9 * min(np.log(hi), -np.log(lo)), n_radii + 1)[1:])
        worst = 0.0
        for rho in radii:
            z = rho * np.exp(1j * circle_grid(self.M))
            lhs = np.conj(self.series(1.0 / np.conj(z)))
            worst = max(worst, float(np.max(np.abs(lhs - 1.0 / self.series(z)))))
        return worst

    def min_abs_deriv(self) -> float:
        return float(np.min(self.abs_deriv_on_circle(circle_grid(self.M))))

    def conjugacy_residual(self) -> float:
        """sup |g(h(xi)) - h(R_alpha xi)| on the circle, when a linearizer is attached."""
        if self.linearizer is None or self.rotation_number is None:
            raise ValueError("map has no constructed linearizer")
        xi = np.exp(1j * circle_grid(self.M))
        h = self.linearizer
        lam = np.exp(2j * np.pi * self.rotation_number)
        return float(np.max(np.abs(self.series(h(xi)) - h(lam * xi))))

    # -------------------------------------------------------- serialization

    def to_json(self) -> dict:
        d = {
            "alpha": self.rotation_number,
            "rotation_tag": self.rotation_tag,
            "N": self.N,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "annulus": [float(self.annulus[0]), float(self.annulus[1])],
        }
        if self.linearizer is not None:
            d["linearizer"] = self.linearizer.to_json()
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, d: dict) -> "CircleMap":
        c = np.array([complex(re, im) for re, im in d["coeffs"]])
        lin = ConformalConjugacy.from_json(d["linearizer"]) if d.get("linearizer") else None
        return cls(Laurent.from_dense(c), int(d["N"]), tuple(d["annulus"]), d.get("alpha"),
                   d.get("rotation_tag"), lin)

    @classmethod
    def loads(cls, s: str) -> "CircleMap":
        return cls.from_json(json.loads(s))


# ------------------------------------------------------------ constructors

def make_rotation(alpha, N: int = DEFAULT_N, bypass: bool = False) -> CircleMap:
    alpha = check_admissible(resolve_alpha(alpha), bypass)
    lam = np.exp(2j * np.pi * alpha)
    return CircleMap(Laurent([lam], 1), N, (0.1, 10.0), alpha, "constructed",
                     ConformalConjugacy.identity())


def make_linearizable(alpha, h: ConformalConjugacy, N: int = DEFAULT_N, bypass: bool = False,
                      tol_eval: float = TOL_EVAL) -> CircleMap:
    """``g = h o R_alpha o h^{-1}`` sampled on the 2N-grid."""
    alpha = check_admissible(resolve_alpha(alpha), bypass)
    if h.kind == "identity":
        return make_rotation(alpha, N, bypass=True)
    theta = circle_grid(2 * N)
    if np.min(h.abs_deriv_on_circle(theta)) <= 0:
        raise ValueError("conjugacy is not univalent near the circle")
    xi = np.exp(1j * theta)
    lam = np.exp(2j * np.pi * alpha)
    values = h.forward(lam * h.inverse(xi))
    return CircleMap.from_samples(values, alpha, "constructed", h, tol_eval=tol_eval)


def eval(g: CircleMap, z):  # noqa: A001 - module-level mirror of the method
    return g.eval(z)


def deriv(g: CircleMap, z):
    return g.deriv(z)


def compose(g1: CircleMap, g2: CircleMap, tol_eval: float = TOL_EVAL) -> CircleMap:
    """Laurent re-expansion of ``g1 o g2`` on the common annulus."""
    N = max(g1.N, g2.N)
    M = 2 * N
    theta = circle_grid(M)
    values = g1.series(g2.series.on_circle(M))
    alpha, tag, lin = None, None, None
    if g1.rotation_tag == "constructed" and g2.rotation_tag == "constructed":
        alpha, tag = (g1.rotation_number + g2.rotation_number) % 1.0, "constructed"
        l1, l2 = g1.linearizer, g2.linearizer
        if l1 is not None and l2 is not None and l1.kind == l2.kind and l1.kind in ("identity", "moebius") \
                and l1.a == l2.a:
            lin = l1
    out = CircleMap.from_samples(values, alpha, tag, lin, tol_eval=tol_eval)
    # radii whose g2-image stays inside g1's annulus
    lo1, hi1 = g1.annulus
    lo, hi = out.annulus
    for r in np.linspace(1.0, hi, 12)[1:]:
        if r > g2.annulus[1] or np.max(np.abs(g2.series(r * np.exp(1j * theta)))) > hi1:
            hi = min(hi, r)
            break
    for r in np.linspace(1.0, lo, 12)[1:]:
        if r < g2.annulus[0] or np.min(np.abs(g2.series(r * np.exp(1j * theta)))) < lo1:
            lo = max(lo, r)
            break
    if not lo < 1.0 < hi:
        raise AnnulusError("image annulus of g2 does not meet the domain annulus of g1")
    return CircleMap(out.series, out.N, (lo, hi), alpha, tag, lin)


def orbit_displacements(g: CircleMap, n_iter: int, x0: float = 0.0) -> np.ndarray:
    """Lift displacements ``G(x_j) - x_j`` along the orbit ``x_{j+1} = G(x_j)``."""
    c = [complex(v) for v in g.series.coeffs]
    kmin = g.series.kmin
    ref = g._disp_ref.tolist()
    M = g.M
    scale = M / TWO_PI
    x = float(x0)
    out = np.empty(n_iter)
    for j in range(n_iter):
        z = complex(math.cos(x), math.sin(x))
        acc = 0j
        for cj in reversed(c):
            acc = acc * z + cj
        if kmin:
            acc *= z ** kmin
        r = ref[int(round((x % TWO_PI) * scale)) % M]
        v = acc * complex(math.cos(-x - r), math.sin(-x - r))
        d = r + math.atan2(v.imag, v.real)
        out[j] = d
        x += d
    return out


def estimate_rotation_number(g: CircleMap, n_iter: int = 10_000, x0: float = 0.0) -> tuple[float, float]:
    """Birkhoff average of lift displacements; returns (estimate, error bound 1/n_iter)."""
    d = orbit_displacements(g, n_iter, x0)
    est = (math.fsum(d) / (TWO_PI * n_iter)) % 1.0
    return est, 1.0 / n_iter
