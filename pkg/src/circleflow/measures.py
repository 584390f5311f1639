"""Probability measures on the circle and s-conformal measures of circle maps.

A measure is an absolutely continuous part, sampled on the uniform grid as a
density with respect to ``d theta`` (so its total mass is the trapezoid sum
``2 pi / M * sum f``), plus a finite list of atoms.  The density is treated
as its trigonometric interpolant, which makes moments and arc masses exact for
band-limited densities.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .circlemap import DEFAULT_N, CircleMap
from .cohomology import (DIVISOR_FLOOR, kam_linearize, solve_cohomological)
from .fourier import TWO_PI, Laurent, circle_grid, trig_eval

TOL_MASS = 1e-12


class ConvergenceError(RuntimeError):
    """An iterative solver did not reach its tolerance; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True, eq=False)
class CircleMeasure:
    """Finite positive measure on the unit circle.

    Parameters
    ----------
    density : ndarray
        Samples of the density with respect to ``d theta`` on the uniform grid.
    atoms : tuple of (theta, mass)
        Point masses at ``exp(i theta)``.
    meta : dict
        Free-form diagnostics from the producing computation.
    """

    density: np.ndarray
    atoms: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.density, dtype=float)
        if np.any(d < 0):
            raise ValueError("density must be nonnegative")
        atoms = tuple((float(np.mod(t, TWO_PI)), float(m)) for t, m in self.atoms)
        if any(m <= 0 for _, m in atoms):
            raise ValueError("atom masses must be positive")
        object.__setattr__(self, "density", d)
        object.__setattr__(self, "atoms", atoms)

    # ------------------------------------------------------------ builders

    @classmethod
    def lebesgue(cls, M: int = 2 * DEFAULT_N) -> "CircleMeasure":
        return cls(np.full(M, 1.0 / TWO_PI))

    @classmethod
    def dirac(cls, theta: float = 0.0, M: int = 2 * DEFAULT_N, mass: float = 1.0) -> "CircleMeasure":
        return cls(np.zeros(M), ((theta, mass),))

    @classmethod
    def from_function(cls, f, M: int = 2 * DEFAULT_N, normalize: bool = True) -> "CircleMeasure":
        """Density ``f(theta)`` sampled on the grid (normalized to mass one by default)."""
        mu = cls(np.asarray(f(circle_grid(M)), dtype=float))
        return mu.normalized() if normalize else mu

    def mix(self, other: "CircleMeasure", w: float) -> "CircleMeasure":
        """Convex combination ``(1 - w) self + w other`` on a common grid."""
        if self.M != other.M:
            raise ValueError("measures live on different grids")
        atoms = tuple((t, (1 - w) * m) for t, m in self.atoms if w < 1) + \
            tuple((t, w * m) for t, m in other.atoms if w > 0)
        return CircleMeasure((1 - w) * self.density + w * other.density, atoms)

    # ------------------------------------------------------------ basic data

    @property
    def M(self) -> int:
        return len(self.density)

    @property
    def theta(self) -> np.ndarray:
        return circle_grid(self.M)

    @property
    def ac_mass(self) -> float:
        return float(TWO_PI * np.mean(self.density))

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    @property
    def mass(self) -> float:
        return self.ac_mass + self.atom_mass

    def normalized(self) -> "CircleMeasure":
        m = self.mass
        if m <= 0:
            raise ValueError("cannot normalize the zero measure")
        return CircleMeasure(self.density / m, tuple((t, w / m) for t, w in self.atoms), dict(self.meta))

    def with_meta(self, **kw) -> "CircleMeasure":
        return CircleMeasure(self.density, self.atoms, {**self.meta, **kw})

    def pullback_conj(self) -> "CircleMeasure":
        """Pullback ``r^* mu`` by complex conjugation ``r(xi) = conj(xi)``."""
        d = np.roll(self.density[::-1], 1)            # f(-theta_j) = f(theta_{M-j})
        return CircleMeasure(d, tuple((-t, m) for t, m in self.atoms), dict(self.meta))

    # ------------------------------------------------------------ Fourier data

    @cached_property
    def _fft(self) -> np.ndarray:
        return np.fft.fft(self.density) * (TWO_PI / self.M)

    def moments(self, kmax: int) -> np.ndarray:
        """``mu_hat(k) = int exp(-i k theta) d mu`` for ``k = 0..kmax``."""
        k = np.arange(kmax + 1)
        out = self._fft[k % self.M].copy()
        for t, m in self.atoms:
            out += m * np.exp(-1j * k * t)
        return out

    def moment(self, k: int) -> complex:
        if k < 0:
            return complex(np.conj(self.moment(-k)))
        return complex(self.moments(k)[k])

    @cached_property
    def density_series(self) -> Laurent:
        """Trigonometric interpolant of the density, trimmed relative to its size."""
        s = Laurent.from_samples(self.density.astype(complex), trunc=0.0)
        scale = max(np.max(np.abs(s.coeffs)), 1e-300)
        return s.trimmed(1e-16 * scale)

    def density_at(self, theta) -> np.ndarray:
        return trig_eval(self.density_series, theta)

    def arc_mass(self, a, b) -> np.ndarray:
        """Mass of the positively oriented arc from angle ``a`` to ``b``.

        ``b - a`` is taken in ``[0, 2 pi]`` after reducing mod 2 pi unless the
        caller passes lifts with ``0 <= b - a <= 2 pi`` (then used as given).
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        length = b - a
        length = np.where((length >= 0) & (length <= TWO_PI), length, np.mod(length, TWO_PI))
        s = self.density_series
        ks = np.arange(s.kmin, s.kmax + 1)
        c0 = s.coef(0).real
        nz = ks != 0
        anti = Laurent(np.where(nz, s.coeffs / np.where(nz, 1j * ks, 1), 0), s.kmin)
        out = c0 * length + trig_eval(anti, a + length) - trig_eval(anti, a)
        for t, m in self.atoms:
            rel = np.mod(t - a, TWO_PI)
            out = out + m * (rel <= length)
        return out

    # ------------------------------------------------------------ export

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theta,density\n")
        for t, v in zip(self.theta, self.density):
            buf.write(f"{t:.17g},{v:.17g}\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"M": self.M, "mass": self.mass,
                "atoms": [[t, m] for t, m in self.atoms],
                "density": [float(v) for v in self.density],
                "meta": _jsonable(self.meta)}

    @classmethod
    def from_json(cls, d: dict) -> "CircleMeasure":
        return cls(np.array(d["density"], dtype=float), tuple(tuple(a) for a in d["atoms"]), d.get("meta", {}))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# ---------------------------------------------------------------- operations

def pushforward(mu: CircleMeasure, g: CircleMap) -> CircleMeasure:
    """``g_* mu``: density ``(f o g^{-1}) |(g^{-1})'|``, atoms moved by ``g``."""
    y = mu.theta
    x = g.inverse_lift(y)
    dens = mu.density_at(x) / g.abs_deriv_on_circle(x)
    atoms = tuple((float(g.lift(np.array([t]))[0]), m) for t, m in mu.atoms)
    return CircleMeasure(np.maximum(dens, 0.0), atoms, {"pushforward": True})


def _require_linearizer(g: CircleMap):
    if g.linearizer is None or g.rotation_number is None:
        raise ValueError("map carries no constructed linearizer")
    return g.linearizer


def conformal_measure_oracle(g: CircleMap, s: float, M: int | None = None) -> CircleMeasure:
    """Closed form ``f = c |h'(h^{-1}(xi))|^{s-1}`` from the attached linearizer ``h``."""
    h = _require_linearizer(g)
    theta = circle_grid(M or g.M)
    w = h.inverse_lift_on_circle(theta)
    f = h.abs_deriv_on_circle(w) ** (s - 1.0)
    return CircleMeasure(f).normalized().with_meta(method="oracle", s=s)


def conformal_measure_solve(g: CircleMap, s: float, method: str = "auto",
                            divisor_floor: float = DIVISOR_FLOOR, initial_scale: float = 1.0,
                            n_birkhoff: int = 1000, tol: float = 1e-8) -> CircleMeasure:
    """Density of the s-conformal measure from ``u o g - u = (s - 1) log|g'|``.

    Parameters
    ----------
    method : {"auto", "linearizer", "newton", "birkhoff"}
        ``linearizer`` uses the attached conjugacy ``h``: with ``v = u o h`` the
        equation becomes ``v(w + 2 pi alpha) - v(w) = (s - 1) log|g'(h(w))|``,
        solved coefficientwise.  ``newton`` first computes a numerical
        linearizer.  ``birkhoff`` uses weighted Birkhoff sums along grid orbits
        and raises :class:`ConvergenceError` when two orbit lengths disagree.
        ``auto`` picks ``linearizer`` when available, otherwise ``newton``.
    initial_scale : float
        Arbitrary positive constant multiplying ``exp(u)`` before normalization.
    """
    if method == "auto":
        method = "linearizer" if g.linearizer is not None else "newton"
    M = g.M
    theta = circle_grid(M)
    diag: dict = {"method": method, "s": s}
    if method in ("linearizer", "newton"):
        if method == "linearizer":
            h = _require_linearizer(g)
            alpha = g.rotation_number
        else:
            if g.rotation_number is None:
                raise ValueError("newton method needs a rotation number")
            alpha = g.rotation_number
            h, lam, info = kam_linearize(g, alpha)
            diag["rotation_correction"] = lam
            diag["newton_iterations"] = info["iterations"]
        hw = h.lift_on_circle(theta)
        rhs = (s - 1.0) * np.log(g.abs_deriv_on_circle(hw))
        v, info = solve_cohomological(rhs, alpha, divisor_floor)
        diag.update(info)
        vs = Laurent.from_samples(v.astype(complex), trunc=0.0)
        u = trig_eval(vs, h.inverse_lift_on_circle(theta))
    elif method == "birkhoff":
        u, info = _weighted_birkhoff(g, (s - 1.0) * np.log(g.abs_deriv_on_circle(theta)), n_birkhoff, tol)
        diag.update(info)
    else:
        raise ValueError(f"unknown method {method!r}")
    f = initial_scale * np.exp(u - np.max(u))
    return CircleMeasure(f).normalized().with_meta(**diag)


def _dy_weights(n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def _weighted_birkhoff(g: CircleMap, phi: np.ndarray, n: int, tol: float) -> tuple[np.ndarray, dict]:
    """``u(x) = const - sum_n w_n S_n phi(x)`` with smooth bump weights.

    From ``u(g^n x) - u(x) = S_n phi(x)``, averaging ``u`` along the orbit with
    weights that vanish to infinite order at both ends converges faster than
    any power of ``n`` for Diophantine rotation numbers.  The estimate at
    ``n`` is compared with the one at ``n / 2``.
    """
    phi_series = Laurent.from_samples(phi.astype(complex), trunc=0.0)
    phi_series = phi_series.trimmed(1e-16 * max(np.max(np.abs(phi_series.coeffs)), 1e-300))
    x = circle_grid(g.M)
    S = np.zeros_like(x)
    estimates = {}
    checkpoints = {n // 2: _dy_weights(n // 2), n: _dy_weights(n)}
    acc = {m: np.zeros_like(x) for m in checkpoints}
    for j in range(n):
        for m, w in checkpoints.items():
            if j < m:
                acc[m] += w[j] * S
        S = S + trig_eval(phi_series, x)
        x = g.lift(x)
    for m in checkpoints:
        u = -acc[m]
        estimates[m] = u - np.mean(u)
    gap = float(np.max(np.abs(estimates[n] - estimates[n // 2])))
    info = {"birkhoff_n": n, "birkhoff_gap": gap}
    if not np.isfinite(gap) or gap > tol:
        raise ConvergenceError(f"weighted Birkhoff sums did not settle: gap {gap:.3e} > {tol:.1e}", info)
    return estimates[n], info


def density_equation_residual(mu: CircleMeasure, g: CircleMap, s: float) -> float:
    """sup over the grid of ``|f(g(xi)) - |g'(xi)|^{s-1} f(xi)|``."""
    theta = mu.theta
    lhs = mu.density_at(g.lift(theta))
    rhs = g.abs_deriv_on_circle(theta) ** (s - 1.0) * mu.density
    return float(np.max(np.abs(lhs - rhs)))


def verify_conformal(mu: CircleMeasure, g: CircleMap, s: float, n_arcs: int = 100,
                     seed: int = 0, n_gauss: int = 24, pieces: int = 64) -> dict:
    """Compare ``mu(g(E))`` with ``int_E |g'|^s d mu`` on seeded random arcs.

    The left side uses the exact antiderivative of the density interpolant;
    the right side composite Gauss-Legendre quadrature plus atom sums.
    """
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, TWO_PI, n_arcs)
    L = rng.uniform(0.01, np.pi, n_arcs)
    Ga = g.lift(a)
    Gb = g.lift(a + L)
    lhs = mu.arc_mass(Ga, Gb)
    nodes, weights = np.polynomial.legendre.leggauss(n_gauss)
    # composite rule: `pieces` panels per arc, n_gauss nodes per panel
    edges = a[:, None] + L[:, None] * np.linspace(0.0, 1.0, pieces + 1)[None, :]
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    x = mid[..., None] + half[..., None] * nodes
    integrand = g.abs_deriv_on_circle(x) ** s * mu.density_at(x)
    rhs = np.sum(integrand * weights * half[..., None], axis=(1, 2))
    for t, m in mu.atoms:
        inside = np.mod(t - a, TWO_PI) <= L
        rhs = rhs + inside * m * float(g.abs_deriv_on_circle(np.array([t]))[0]) ** s
    resid = np.abs(lhs - rhs)
    return {"max_residual": float(np.max(resid)), "n_arcs": int(n_arcs), "seed": int(seed),
            "params": {"s": float(s), "alpha": g.rotation_number, "M": mu.M}}


def weak_distance(mu1: CircleMeasure, mu2: CircleMeasure, n_moments: int = 16) -> float:
    """max over ``0 <= k <= n_moments`` of ``|mu1_hat(k) - mu2_hat(k)|`` (negative k by symmetry)."""
    return float(np.max(np.abs(mu1.moments(n_moments) - mu2.moments(n_moments))))


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)
