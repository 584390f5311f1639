"""Exterior Riemann maps of hulls bounded by analytic Jordan curves.

The normalized map ``phi(z) = e^t z + a_0 + ...`` from ``|z| > 1`` onto the
exterior of a curve ``gamma`` is found through its boundary correspondence
``phi(e^{i theta}) = gamma(S(theta))``.  Since ``log(phi(z)/z)`` is holomorphic
at infinity with real value ``t`` there, its boundary values ``A + iB`` satisfy
``B = K[A]`` with ``K`` the conjugation operator of the exterior disk (Fourier
multiplier ``+i sgn(k)``).  The Theodorsen-type iteration alternates

* ``A = log|gamma(S)|``, ``B = K[A]``;
* solve ``arg gamma(S) = theta + B`` for ``S`` by Newton's method.

Curves must be star-shaped about the origin (strictly monotone argument).
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .circlemap import ConformalConjugacy
from .fourier import TWO_PI, Laurent, circle_grid, invert_lift, trig_eval, trig_from_samples

MAX_ITER = 200
TOL_MAP = 1e-9
STEP_TOL = 1e-14


class CurveError(ValueError):
    """Curve fails the pre-checks (not simple, not around 0, not star-shaped)."""


class MappingConvergenceError(RuntimeError):
    def __init__(self, message: str, history: list[float]):
        super().__init__(message)
        self.history = history


# ------------------------------------------------------------------ curves

@dataclass(frozen=True, eq=False)
class JordanCurveSamples:
    """Closed analytic curve ``s -> gamma(s)``, ``s`` in ``[0, 2 pi)``.

    ``points`` are samples on the uniform ``s``-grid and ``series`` their
    trigonometric interpolant in ``e^{is}``.  ``fn``/``dfn`` give exact
    evaluation when the curve comes with a formula; otherwise the series is used.
    ``shift`` marks parametrizations in which a circle map acts as the
    translation ``s -> s + shift`` (invariant curves in linearizing coordinates).
    """

    points: np.ndarray
    fn: Callable | None = None
    dfn: Callable | None = None
    shift: float | None = None
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_function(cls, fn, dfn=None, M: int = 2048, shift=None, check: bool = True,
                      meta=None) -> "JordanCurveSamples":
        s = circle_grid(M)
        curve = cls(np.asarray(fn(s), dtype=complex), fn, dfn, shift, dict(meta or {}))
        if check:
            curve.check()
        return curve

    @classmethod
    def from_points(cls, points, check: bool = True) -> "JordanCurveSamples":
        curve = cls(np.asarray(points, dtype=complex))
        if check:
            curve.check()
        return curve

    @classmethod
    def circle(cls, R: float, center: complex = 0.0, M: int = 2048) -> "JordanCurveSamples":
        return cls.from_function(lambda s: center + R * np.exp(1j * s),
                                 lambda s: 1j * R * np.exp(1j * s), M)

    @classmethod
    def ellipse(cls, a: float, b: float, M: int = 2048) -> "JordanCurveSamples":
        return cls.from_function(lambda s: a * np.cos(s) + 1j * b * np.sin(s),
                                 lambda s: -a * np.sin(s) + 1j * b * np.cos(s), M)

    @property
    def M(self) -> int:
        return len(self.points)

    @cached_property
    def series(self) -> Laurent:
        s = Laurent.from_samples(self.points, trunc=0.0)
        return s.trimmed(1e-16 * np.max(np.abs(s.coeffs)))

    @cached_property
    def _dseries(self) -> Laurent:
        return self.series.theta_deriv()

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.fn is not None:
            return np.asarray(self.fn(s), dtype=complex)
        return self.series(np.exp(1j * s))

    def deriv(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.dfn is not None:
            return np.asarray(self.dfn(s), dtype=complex)
        return self._dseries(np.exp(1j * s))

    def scaled(self, c: complex) -> "JordanCurveSamples":
        fn = None if self.fn is None else (lambda s, f=self.fn: c * f(s))
        dfn = None if self.dfn is None else (lambda s, f=self.dfn: c * f(s))
        return JordanCurveSamples(c * self.points, fn, dfn, self.shift, dict(self.meta))

    # ------------------------------------------------------------ checks

    @cached_property
    def _angle_ref(self) -> np.ndarray:
        s = circle_grid(self.M)
        return np.unwrap(np.angle(self.points)) - s

    def arg(self, s) -> np.ndarray:
        """Continuous argument ``Theta(s)`` with ``Theta(s + 2 pi) = Theta(s) + 2 pi``."""
        s = np.asarray(s, dtype=float)
        idx = np.round(np.mod(s, TWO_PI) * self.M / TWO_PI).astype(int) % self.M
        ref = self._angle_ref[idx]
        turns = np.floor_divide(s + np.pi / self.M, TWO_PI) * TWO_PI
        base = ref + (s - turns) + turns
        return base + np.angle(self(s) * np.exp(-1j * base))

    def arg_deriv(self, s) -> np.ndarray:
        return np.imag(self.deriv(s) / self(s))

    def check(self, factor: int = 4):
        z = self.points
        if np.any(np.abs(z) == 0):
            raise CurveError("curve passes through the origin")
        total = np.sum(np.angle(np.roll(z, -1) / z))
        if abs(total - TWO_PI) > 1e-6:
            raise CurveError(f"curve winds {total / TWO_PI:.4f} times around 0 (expected 1)")
        s = circle_grid(factor * self.M)
        if np.min(self.arg_deriv(s)) <= 0:
            raise CurveError("curve is not star-shaped about 0 (argument not monotone); "
                             "the boundary-correspondence iteration requires it")

    def to_json(self) -> dict:
        return {"M": self.M, "points": [[p.real, p.imag] for p in self.points], "meta": self.meta}


# ------------------------------------------------------------------ the map

def conjugate_exterior(A: np.ndarray) -> np.ndarray:
    """Boundary conjugation for the exterior disk: ``B_k = i sgn(k) A_k``."""
    M = len(A)
    c = np.fft.fft(A)
    k = np.fft.fftfreq(M, 1.0 / M)
    c = 1j * np.sign(k) * c
    if M % 2 == 0:
        c[M // 2] = 0.0
    return np.fft.ifft(c).real


@dataclass(frozen=True, eq=False)
class ExteriorMap:
    """``phi(z) = z exp(F(z))`` with ``F = t + sum_{k>=1} F_k z^{-k}``."""

    curve: JordanCurveSamples
    S: np.ndarray
    F: Laurent
    capacity: float
    residual: float
    history: list
    iterations: int

    @property
    def M(self) -> int:
        return len(self.S)

    @property
    def theta(self) -> np.ndarray:
        return circle_grid(self.M)

    @cached_property
    def _dF(self) -> Laurent:
        return self.F.deriv()

    def phi(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return z * np.exp(self.F(z))

    __call__ = phi

    def dphi(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.exp(self.F(z)) * (1.0 + z * self._dF(z))

    @cached_property
    def correspondence(self) -> Laurent:
        """Trigonometric series of ``S(theta) - theta``."""
        return trig_from_samples(self.S - self.theta)

    def S_at(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return theta + trig_eval(self.correspondence, theta)

    def S_inv(self, s) -> np.ndarray:
        return invert_lift(self.correspondence, np.asarray(s, dtype=float))

    def boundary(self, theta=None) -> np.ndarray:
        theta = self.theta if theta is None else np.asarray(theta, dtype=float)
        return self.curve(self.S_at(theta))

    def psi(self, w, tol: float = 1e-15, maxit: int = 60, z0=None) -> np.ndarray:
        """Inverse map on the exterior of the curve, by Newton's method.

        Without ``z0`` the seed has the argument of ``w`` read off the
        boundary correspondence and modulus ``|w| / |curve|`` in that direction.
        """
        w = np.asarray(w, dtype=complex)
        shape = w.shape
        w = w.ravel()
        if z0 is not None:
            z = np.array(z0, dtype=complex).ravel()
        else:
            theta = self.theta
            arg_b = self.curve.arg(self.S)
            target = np.angle(w)
            target = target - TWO_PI * np.floor((target - arg_b[0]) / TWO_PI)
            ax = np.concatenate([arg_b, [arg_b[0] + TWO_PI]])
            tx = np.concatenate([theta, [TWO_PI]])
            th0 = np.interp(target, ax, tx)
            rad = np.abs(w) / np.abs(self.boundary(th0))
            z = np.maximum(rad, 1.0 + 1e-3) * np.exp(1j * th0)
        for _ in range(maxit):
            r = self.phi(z) - w
            step = r / self.dphi(z)
            z_new = z - step
            # keep iterates outside the unit disk
            bad = np.abs(z_new) <= 1.0
            z_new[bad] = (z - 0.5 * step)[bad]
            z = z_new
            if np.max(np.abs(r)) < tol * max(1.0, np.max(np.abs(w))):
                break
        return z.reshape(shape)

    def welding(self) -> "Welding":
        return Welding(self.S.copy(), self)

    def to_json(self) -> dict:
        return {"capacity": self.capacity, "residual": self.residual, "iterations": self.iterations,
                "history": self.history, "F": self.F.to_json(),
                "curve": self.curve.to_json()}

    def correspondence_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theta_in,re_out,im_out\n")
        for t, p in zip(self.theta, self.boundary()):
            buf.write(f"{t:.17g},{p.real:.17g},{p.imag:.17g}\n")
        return buf.getvalue()


def _solve_arg(curve: JordanCurveSamples, target: np.ndarray, s0: np.ndarray,
               tol: float = 1e-15, maxit: int = 50) -> np.ndarray:
    """Newton solve of ``Theta(s) = target`` (Theta the continuous argument)."""
    s = s0.copy()
    for _ in range(maxit):
        r = curve.arg(s) - target
        s = s - r / curve.arg_deriv(s)
        if np.max(np.abs(r)) < tol:
            break
    return s


def exterior_map(curve: JordanCurveSamples, M: int | None = None, max_iter: int = MAX_ITER,
                 tol_map: float = TOL_MAP, S0=None, check: bool = True) -> ExteriorMap:
    """Normalized exterior map of the region bounded by ``curve``.

    Iterates until the correspondence update stalls below ``STEP_TOL``;
    raises :class:`MappingConvergenceError` with the update history when
    ``max_iter`` is exhausted or the final boundary residual exceeds ``tol_map``.
    """
    if check:
        curve.check()
    M = M or curve.M
    theta = circle_grid(M)
    S = theta.copy() if S0 is None else np.array(S0, dtype=float)
    history: list[float] = []
    for it in range(max_iter):
        A = np.log(np.abs(curve(S)))
        B = conjugate_exterior(A)
        # branch of the argument: Theta(S) - theta - B has zero mean for the normalized map
        shift = TWO_PI * np.round(np.mean(curve.arg(S) - theta - B) / TWO_PI)
        S_new = _solve_arg(curve, theta + B + shift, S)
        step = float(np.max(np.abs(S_new - S)))
        history.append(step)
        S = S_new
        if step < STEP_TOL or (it > 10 and step >= history[-2] and step < 1e3 * STEP_TOL):
            break
    else:
        raise MappingConvergenceError(
            f"boundary-correspondence iteration did not converge in {max_iter} steps "
            f"(last update {history[-1]:.3e})", history)
    A = np.log(np.abs(curve(S)))
    a = np.fft.fft(A) / M
    n = M // 2
    Fc = np.zeros(n + 1, dtype=complex)     # Fc[n - k] multiplies z^{-k}
    Fc[n] = a[0].real
    k = np.arange(1, n + M % 2)
    Fc[n - k] = 2.0 * a[M - k]
    if M % 2 == 0:
        Fc[0] = a[n]                        # Nyquist mode, split evenly
    F = Laurent(Fc, -n).trimmed(0.0)
    emap = ExteriorMap(curve, S, F, float(a[0].real), 0.0, history, len(history))
    resid = boundary_residual(emap)
    if resid > tol_map:
        raise MappingConvergenceError(f"boundary residual {resid:.3e} exceeds tol_map {tol_map:.1e}", history)
    object.__setattr__(emap, "residual", resid)
    return emap


def boundary_residual(emap: ExteriorMap, factor: int = 2) -> float:
    """sup over a refined circle grid of ``|phi(e^{i theta}) - gamma(S(theta))|``."""
    th = circle_grid(factor * emap.M)
    return float(np.max(np.abs(emap.phi(np.exp(1j * th)) - emap.curve(emap.S_at(th)))))


# ------------------------------------------------------------------ welding

@dataclass(frozen=True, eq=False)
class Welding:
    """Welding homeomorphism ``w(e^{i theta}) = e^{i S(theta)}`` and its inverse."""

    S: np.ndarray
    emap: ExteriorMap

    @property
    def theta(self) -> np.ndarray:
        return circle_grid(len(self.S))

    def forward(self, theta=None) -> np.ndarray:
        theta = self.theta if theta is None else theta
        return np.exp(1j * self.emap.S_at(theta))

    def inverse(self, s=None) -> np.ndarray:
        s = self.theta if s is None else s
        return np.exp(1j * self.emap.S_inv(s))

    def inverse_conjugacy(self) -> ConformalConjugacy:
        """``k = w^{-1}`` as a circle conjugacy (lift ``S^{-1} - s``, inverse lift ``S - theta``)."""
        s = self.theta
        p = trig_from_samples(self.emap.S_inv(s) - s)
        return ConformalConjugacy("fourier", lift=p, inv_lift=self.emap.correspondence,
                                  annulus=_conj_annulus(p, self.emap.correspondence))

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(np.concatenate([self.S, [self.S[0] + TWO_PI]])) > 0))


def _conj_annulus(p: Laurent, q: Laurent) -> tuple[float, float]:
    from .circlemap import TOL_EVAL
    from .fourier import certified_annulus
    lo1, hi1 = certified_annulus(p, TOL_EVAL)
    lo2, hi2 = certified_annulus(q, TOL_EVAL)
    return max(lo1, lo2), min(hi1, hi2)


def welding(hull_map: ExteriorMap, interior=None) -> Welding:
    """Welding ``h^{-1} o phi`` on the circle.

    ``interior`` parametrizes the curve as ``gamma(s) = h(e^{is})`` (the hull
    curve's own parameter is used when omitted); a different interior
    parametrization ``h`` is handled by solving ``h(e^{i s}) = phi(e^{i theta})``.
    """
    if interior is None:
        w = hull_map.welding()
    else:
        curve = JordanCurveSamples.from_function(lambda s: interior(np.exp(1j * s)), M=hull_map.M, check=False)
        target = hull_map.curve.arg(hull_map.S)
        s = circle_grid(curve.M)
        table = curve.arg(s)
        target = target - TWO_PI * np.floor((target[0] - table[0]) / TWO_PI)
        s0 = np.interp(target, np.concatenate([table, table + TWO_PI]), np.concatenate([s, s + TWO_PI]))
        S = _solve_arg(curve, target, s0)
        w = Welding(S, ExteriorMap(curve, S, hull_map.F, hull_map.capacity, hull_map.residual,
                                   hull_map.history, hull_map.iterations))
    if not w.is_monotone():
        raise CurveError("welding is not monotone: upstream mapping failed")
    return w


# ------------------------------------------------------------------ hulls

def hull_from_invariant_curve(g, r: float, M: int | None = None) -> JordanCurveSamples:
    """Invariant curve ``h({|w| = r})`` of a map with constructed linearizer ``h``.

    The curve is parametrized by the linearizing angle, so ``g`` acts on it as
    ``s -> s + 2 pi alpha``.  ``r > 1`` gives the outer boundary of the hull
    ``closed disk + Herman annulus``; ``r < 1`` an invariant curve inside.
    """
    h = g.linearizer
    if h is None or g.rotation_number is None:
        raise ValueError("map carries no constructed linearizer")
    lo, hi = h.annulus
    if not lo <= r <= hi:
        from .circlemap import AnnulusError
        raise AnnulusError(f"invariant curve |w| = {r:.6g} leaves the certified annulus {h.annulus}")
    return linearized_curve(h, r, TWO_PI * g.rotation_number, M or g.M)


def linearized_curve(h, r: float, omega: float, M: int) -> JordanCurveSamples:
    fn = lambda s: h(r * np.exp(1j * s))                       # noqa: E731
    dfn = lambda s: 1j * r * np.exp(1j * s) * h.deriv(r * np.exp(1j * s))  # noqa: E731
    return JordanCurveSamples.from_function(fn, dfn, M, shift=omega, meta={"r": r})


def capacity_root(curve_of_r: Callable[[float], JordanCurveSamples], t: float, bracket: tuple[float, float],
                  guess: float | None = None, xtol: float = 1e-15, **kw) -> tuple[float, ExteriorMap]:
    """Find the parameter with capacity of ``curve_of_r(r)`` equal to ``t``.

    ``bracket`` holds hard limits for the parameter.  The search starts from
    a small interval around ``guess`` and widens it geometrically, so curves
    near the limits (where the mapping iteration degrades) are only visited
    when needed.  The root is polished by brentq with warm-started maps.
    """
    cache: dict = {"S": None}

    def f(r):
        em = exterior_map(curve_of_r(r), S0=cache["S"], **kw)
        cache["S"] = em.S
        cache[r] = em
        return em.capacity - t

    lo_lim, hi_lim = bracket
    g0 = t if guess is None else guess
    g0 = min(max(g0, lo_lim), hi_lim)
    d = 0.05 * max(abs(t), 0.02)
    lo, hi = max(lo_lim, g0 - d), min(hi_lim, g0 + d)
    flo, fhi = f(lo), f(hi)
    while flo * fhi > 0:
        if flo > 0 and lo > lo_lim:
            d *= 2
            lo = max(lo_lim, lo - d)
            flo = f(lo)
        elif fhi < 0 and hi < hi_lim:
            d *= 2
            hi = min(hi_lim, hi + d)
            fhi = f(hi)
        else:
            raise ValueError(f"capacity {t} outside the range [{flo + t:.6g}, {fhi + t:.6g}] of the family")
    r = brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    em = cache.get(r) or exterior_map(curve_of_r(r), S0=cache["S"], **kw)
    return r, em


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True)
