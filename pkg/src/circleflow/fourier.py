"""Laurent series on annuli around the unit circle, and periodic lifts.

Every holomorphic object in the package (circle maps, conjugacies, exterior
maps, Herglotz fields) is stored as a finite Laurent series sampled on the
uniform grid ``theta_j = 2 pi j / M``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TRUNC = 1e-14
TWO_PI = 2.0 * np.pi


def circle_grid(M: int) -> np.ndarray:
    return TWO_PI * np.arange(M) / M


def _horner(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.full(x.shape, c[-1], dtype=complex)
    for cj in c[-2::-1]:
        out = out * x + cj
    return out


@dataclass(frozen=True, eq=False)
class Laurent:
    """Finite Laurent series ``sum_k coeffs[k - kmin] * z**k``."""

    coeffs: np.ndarray
    kmin: int = 0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "kmin", int(self.kmin))

    @property
    def kmax(self) -> int:
        return self.kmin + len(self.coeffs) - 1

    def coef(self, k: int) -> complex:
        if k < self.kmin or k > self.kmax:
            return 0j
        return complex(self.coeffs[k - self.kmin])

    def dense(self, N: int) -> np.ndarray:
        """Coefficients for k = -N..N (entries outside the support are zero)."""
        out = np.zeros(2 * N + 1, dtype=complex)
        for k in range(max(self.kmin, -N), min(self.kmax, N) + 1):
            out[k + N] = self.coeffs[k - self.kmin]
        return out

    @classmethod
    def from_dense(cls, c: np.ndarray, trunc: float = 0.0) -> "Laurent":
        c = np.asarray(c, dtype=complex)
        N = (len(c) - 1) // 2
        return cls(c, -N).trimmed(trunc)

    @classmethod
    def from_samples(cls, values, radius: float = 1.0, trunc: float = TRUNC) -> "Laurent":
        """Interpolating series through samples on ``|z| = radius`` (uniform grid).

        The Nyquist mode of an even grid is split evenly between ``+M/2`` and
        ``-M/2``; coefficients with modulus below ``trunc`` are dropped.
        """
        values = np.asarray(values, dtype=complex)
        M = len(values)
        c = np.fft.fft(values) / M
        n = M // 2
        out = np.zeros(2 * n + 1, dtype=complex)
        out[n: 2 * n] = c[:n]                      # k = 0 .. n-1
        out[1:n] = c[M - n + 1:]                   # k = -n+1 .. -1
        if M % 2 == 0:
            out[0] = out[2 * n] = 0.5 * c[n]
        else:
            out[0] = c[n + 1] if n + 1 < M else 0.0
            out[2 * n] = c[n]
        if trunc > 0:
            out[np.abs(out) < trunc] = 0.0
        if radius != 1.0:
            # rescale to the unit circle; modes whose factor leaves the float range are dropped
            k = np.arange(-n, n + 1).astype(float)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                out = out / radius ** k
            out[~np.isfinite(out)] = 0.0
        return cls(out, -n).trimmed(0.0)

    def trimmed(self, trunc: float = 0.0) -> "Laurent":
        c = self.coeffs.copy()
        if trunc > 0:
            c[np.abs(c) < trunc] = 0.0
        nz = np.flatnonzero(c)
        if len(nz) == 0:
            return Laurent(np.zeros(1), 0)
        return Laurent(c[nz[0]: nz[-1] + 1], self.kmin + int(nz[0]))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        lo, hi = self.kmin, self.kmax
        if hi >= 0:
            k0 = max(lo, 0)
            part = _horner(self.coeffs[k0 - lo:], z)
            out = out + (part * z ** k0 if k0 else part)
        if lo < 0:
            kneg = min(hi, -1)
            u = 1.0 / z
            c = self.coeffs[: kneg - lo + 1][::-1]
            out = out + _horner(c, u) * u ** (-kneg)
        return out

    def on_circle(self, M: int, radius: float = 1.0) -> np.ndarray:
        """Exact samples on the uniform ``M``-grid of ``|z| = radius`` (FFT folding)."""
        k = np.arange(self.kmin, self.kmax + 1)
        a = np.zeros(M, dtype=complex)
        np.add.at(a, k % M, self.coeffs * radius ** k.astype(float))
        return np.fft.ifft(a) * M

    def deriv(self) -> "Laurent":
        k = np.arange(self.kmin, self.kmax + 1)
        return Laurent(self.coeffs * k, self.kmin - 1)

    def theta_deriv(self) -> "Laurent":
        """Series of d/dtheta f(e^{i theta}) as a function of z = e^{i theta}."""
        k = np.arange(self.kmin, self.kmax + 1)
        return Laurent(1j * k * self.coeffs, self.kmin)

    def shift(self, m: int) -> "Laurent":
        """Multiply by z**m."""
        return Laurent(self.coeffs, self.kmin + m)

    def scale(self, s) -> "Laurent":
        return Laurent(self.coeffs * s, self.kmin)

    def __add__(self, other: "Laurent") -> "Laurent":
        lo = min(self.kmin, other.kmin)
        hi = max(self.kmax, other.kmax)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self.kmin - lo: self.kmax - lo + 1] += self.coeffs
        c[other.kmin - lo: other.kmax - lo + 1] += other.coeffs
        return Laurent(c, lo)

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + other.scale(-1.0)

    def rotated(self, omega: float) -> "Laurent":
        """Series of f(e^{i omega} z)."""
        k = np.arange(self.kmin, self.kmax + 1)
        return Laurent(self.coeffs * np.exp(1j * k * omega), self.kmin)

    def tail(self, fraction: float = 0.1) -> tuple[float, float]:
        """Largest coefficient modulus in the outer ``fraction`` of each side."""
        pos = self.coeffs[max(0, -self.kmin):]
        neg = self.coeffs[: max(0, -self.kmin)][::-1]

        def _t(side):
            if len(side) < 2:
                return 0.0
            m = max(1, int(np.ceil(fraction * len(side))))
            return float(np.max(np.abs(side[-m:])))

        return _t(pos), _t(neg)

    def to_json(self) -> dict:
        return {"kmin": self.kmin, "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, d: dict) -> "Laurent":
        c = np.array([complex(re, im) for re, im in d["coeffs"]])
        return cls(c, int(d["kmin"]))


def decay_rates(series: Laurent, trunc: float = TRUNC) -> tuple[float, float]:
    """Geometric decay rates (q+, q-) fitted to |c_k| ~ C q^|k| above ``trunc``.

    A side with fewer than three significant coefficients reports 0.
    """
    rates = []
    for sign in (1, -1):
        ks = np.arange(series.kmin, series.kmax + 1)
        mask = (sign * ks > 0) & (np.abs(series.coeffs) > trunc)
        if mask.sum() < 3:
            rates.append(0.0)
            continue
        x = sign * ks[mask]
        y = np.log(np.abs(series.coeffs[mask]))
        slope = np.polyfit(x, y, 1)[0]
        rates.append(float(min(np.exp(slope), 1.0)))
    return rates[0], rates[1]


def certified_annulus(series: Laurent, tol_eval: float = 1e-10, trunc: float = TRUNC,
                      cap: float = 10.0) -> tuple[float, float]:
    """Radii on which the truncated series is trusted to ``tol_eval``.

    The dropped tail is below ``trunc`` (or the measured tail level when the
    grid did not resolve the decay), so ``|c| r^K <= tol_eval`` bounds the
    outer radius with K the top retained frequency; likewise inward.
    """
    tail_pos, tail_neg = series.tail()
    out = []
    for K, tail in ((series.kmax, tail_pos), (-series.kmin, tail_neg)):
        level = max(trunc, tail)
        if K <= 1 and tail <= trunc:
            out.append(cap)
        elif level >= tol_eval or K <= 0:
            out.append(1.0)
        else:
            out.append(min(cap, (tol_eval / level) ** (1.0 / max(K, 1))))
    return 1.0 / out[1], out[0]


# ---------------------------------------------------------------- lifts

def trig_eval(series: Laurent, theta) -> np.ndarray:
    """Real periodic function with Fourier series ``series`` at angles ``theta``."""
    return series(np.exp(1j * np.asarray(theta, dtype=float))).real


def trig_from_samples(values, trunc: float = TRUNC) -> Laurent:
    """Trigonometric interpolant of real samples; coefficients below ``trunc`` are dropped."""
    return Laurent.from_samples(np.asarray(values, dtype=float).astype(complex), trunc=trunc)


def invert_lift(sigma: Laurent, y, x0=None, tol: float = 1e-15, maxit: int = 60) -> np.ndarray:
    """Solve ``x + sigma(x) = y`` for a lift of a circle diffeomorphism."""
    y = np.asarray(y, dtype=float)
    dsig = sigma.theta_deriv()
    x = y - trig_eval(sigma, y) if x0 is None else np.array(x0, dtype=float)
    best = np.inf
    for _ in range(maxit):
        r = x + trig_eval(sigma, x) - y
        x = x - r / (1.0 + trig_eval(dsig, x))
        err = float(np.max(np.abs(r)))
        if err < tol or err >= best:          # converged or stagnating at rounding level
            break
        best = err
    return x


def lift_from_circle_values(values, theta) -> np.ndarray:
    """Continuous angle lift ``S(theta)`` of unit-modulus samples of a degree-one map."""
    d = np.unwrap(np.angle(np.asarray(values) * np.exp(-1j * theta)))
    return theta + d
