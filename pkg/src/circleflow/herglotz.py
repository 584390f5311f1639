"""Herglotz transforms of circle measures on the exterior of the unit disk.

``H(z) = int (xi + 1/z) / (xi - 1/z) d mu(xi)`` for ``|z| > 1``.  Expanding the
kernel in powers of ``1/z`` gives ``H(z) = mu(S^1) + 2 sum_k mu_hat(k) z^{-k}``;
the density part is evaluated from this series (exact for the trigonometric
interpolant) and atoms in closed form.  With densities taken with respect to
``d theta``, the radial limit of ``Re H`` at ``xi`` is ``2 pi f(conj(xi))``.
"""
from __future__ import annotations

import io
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .fourier import TWO_PI, circle_grid
from .measures import CircleMeasure, _jsonable

DEFAULT_EPS = (1e-3, 5e-4)


class ResolutionError(ValueError):
    """A superlevel set is too thin for the sampling grid."""


@dataclass(frozen=True, eq=False)
class HerglotzField:
    """The Herglotz transform of ``source``, with series and closed-form atoms."""

    source: CircleMeasure

    @cached_property
    def coefficients(self) -> np.ndarray:
        """``b_k`` with ``H_ac(z) = sum_{k>=0} b_k z^{-k}`` (density part)."""
        mu = self.source
        K = mu.M // 2
        c = mu._fft[: K + 1].copy()
        c[K] *= 0.5                      # Nyquist mode split evenly
        c[1:] *= 2.0
        return c

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) <= 1.0):
            raise ValueError("Herglotz transform is evaluated on |z| > 1 only")
        return self._eval(z)

    def _eval(self, z) -> np.ndarray:
        w = 1.0 / z
        c = self.coefficients
        out = np.full(w.shape, c[-1], dtype=complex)
        for ck in c[-2::-1]:
            out = out * w + ck
        for t, m in self.source.atoms:
            xi = np.exp(1j * t)
            out = out + m * (xi + w) / (xi - w)
        return out

    def exact_boundary(self, theta) -> np.ndarray:
        """Boundary values ``P + i Q`` at ``e^{i theta}`` by the spectral limit.

        The density part is the finite series on the circle; an atom of mass
        ``m`` at ``e^{i t}`` contributes ``-i m cot((theta + t) / 2)``.
        """
        theta = np.asarray(theta, dtype=float)
        c = self.coefficients
        w = np.exp(-1j * theta)
        out = np.full(theta.shape, c[-1], dtype=complex)
        for ck in c[-2::-1]:
            out = out * w + ck
        with np.errstate(divide="ignore", invalid="ignore"):
            for t, m in self.source.atoms:
                out = out - 1j * m / np.tan(0.5 * (theta + t))
        return out


def herglotz_eval(mu: CircleMeasure, z) -> np.ndarray:
    return HerglotzField(mu)(z)


def _neville(deltas, values) -> tuple[np.ndarray, np.ndarray]:
    """Polynomial extrapolation to delta = 0; returns (limit, last correction)."""
    table = [np.asarray(v) for v in values]
    d = list(deltas)
    correction = np.zeros_like(table[0])
    n = len(table)
    for level in range(1, n):
        new = []
        for i in range(n - level):
            di, dj = d[i], d[i + level]
            new.append((dj * table[i] - di * table[i + 1]) / (dj - di))
        correction = new[-1] - table[-1]
        table = new
    return table[0], correction


@dataclass(frozen=True)
class BoundaryValues:
    theta: np.ndarray
    P: np.ndarray
    Q: np.ndarray
    flagged: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theta,P,Q,flagged\n")
        for row in zip(self.theta, self.P, self.Q, self.flagged):
            buf.write(f"{row[0]:.17g},{row[1]:.17g},{row[2]:.17g},{int(row[3])}\n")
        return buf.getvalue()


def boundary_values(mu: CircleMeasure, eps_list=DEFAULT_EPS, theta=None,
                    flag_tol: float = 1e-3) -> BoundaryValues:
    """Radial limits ``P + i Q`` from ``H`` at radii ``1 + eps`` (extrapolated).

    Extrapolation runs in ``delta = 1 - 1/rho``: on each ray ``H`` is a power
    series in ``delta`` for band-limited densities.  Grid points where the
    extrapolation correction exceeds ``flag_tol`` relative to the value are
    flagged (expected near atoms).
    """
    eps = sorted((float(e) for e in eps_list), reverse=True)
    if len(eps) < 2:
        raise ValueError("extrapolation needs at least two radii")
    theta = mu.theta if theta is None else np.asarray(theta, dtype=float)
    field = HerglotzField(mu)
    xi = np.exp(1j * theta)
    values = [field._eval((1.0 + e) * xi) for e in eps]
    deltas = [1.0 - 1.0 / (1.0 + e) for e in eps]
    limit, corr = _neville(deltas, values)
    flagged = np.abs(corr) > flag_tol * np.maximum(1.0, np.abs(limit))
    return BoundaryValues(theta, limit.real, limit.imag, flagged)


def _refined_grid(mu: CircleMeasure, levels: int = 400, smallest: float = 1e-9) -> np.ndarray:
    """Uniform grid plus geometric clusters around the conjugates of atoms."""
    pts = [mu.theta]
    offsets = np.geomspace(smallest, TWO_PI / mu.M * 4, levels)
    for t, _ in mu.atoms:
        c = -t
        pts.append(c + offsets)
        pts.append(c - offsets)
    return np.unique(np.mod(np.concatenate(pts), TWO_PI))


def poltoratski_reconstruct(mu: CircleMeasure, t_list, n_gauss: int = 16, min_points: int = 4
                            ) -> list[CircleMeasure]:
    """Measures ``(pi / 2) t 1{|Q| > t} d lambda`` (normalized ``lambda``).

    ``Q`` is sampled on a locally refined grid; each superlevel interval has
    its endpoints refined by root finding and is represented by Gauss-Legendre
    atoms carrying total mass ``t * length / 4``.
    """
    field = HerglotzField(mu)
    grid = _refined_grid(mu)
    # close the circle for interval detection
    gx = np.concatenate([grid, [grid[0] + TWO_PI]])
    q = np.abs(field.exact_boundary(gx).imag)
    nodes, weights = np.polynomial.legendre.leggauss(n_gauss)
    out = []
    for t in t_list:
        above = q > t
        n_in = int(np.count_nonzero(above[:-1]))
        if n_in == 0:
            out.append(CircleMeasure(np.zeros(mu.M), (), {"t": t, "n_points": 0, "intervals": 0}))
            continue
        if n_in < min_points:
            raise ResolutionError(f"superlevel set |Q| > {t:g} holds only {n_in} grid points")

        def fq(x, t=t):
            return abs(field.exact_boundary(np.array([x])).imag[0]) - t

        edges = np.flatnonzero(np.diff(above.astype(int)))
        crossings = [brentq(fq, gx[i], gx[i + 1], xtol=1e-15, rtol=1e-15) for i in edges]
        # pair up crossings into intervals (wrapping around 2 pi when needed)
        if above[0]:
            crossings = crossings[1:] + [crossings[0] + TWO_PI]
        atoms = []
        for lo, hi in zip(crossings[0::2], crossings[1::2]):
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            mass = t * (hi - lo) / 4.0
            for x, w in zip(nodes, weights):
                atoms.append((mid + half * x, 0.5 * w * mass))
        out.append(CircleMeasure(np.zeros(mu.M), tuple(atoms),
                                 {"t": t, "n_points": n_in, "intervals": len(crossings) // 2}))
    return out


def singular_part(mu: CircleMeasure) -> CircleMeasure:
    return CircleMeasure(np.zeros(mu.M), mu.atoms)


def positivity_probe(mu: CircleMeasure, n_radii: int = 24, n_angles: int = 256,
                     r_max: float = 1e3) -> float:
    """min of ``Re H`` over log-spaced radii in ``(1, r_max]`` and uniform angles."""
    field = HerglotzField(mu)
    radii = 1.0 + np.geomspace(1e-3, r_max - 1.0, n_radii)
    z = radii[:, None] * np.exp(1j * (circle_grid(n_angles) + 0.5 * TWO_PI / n_angles))[None, :]
    return float(np.min(field(z).real))


def poltoratski_report(mu: CircleMeasure, t_list, n_moments: int = 16) -> dict:
    from .measures import weak_distance
    target = singular_part(mu).pullback_conj()
    recs = poltoratski_reconstruct(mu, t_list)
    rows = [{"t": float(t), "mass": r.mass, "weak_distance": weak_distance(r, target, n_moments),
             "n_points": r.meta["n_points"]} for t, r in zip(t_list, recs)]
    return {"target_mass": target.mass, "rows": rows}


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True)
