"""Small-divisor solvers: the cohomological equation over a rotation and
numerical linearization of circle maps by Newton's method."""
from __future__ import annotations

import numpy as np

from .circlemap import CircleMap, ConformalConjugacy, TOL_EVAL, orbit_displacements
from .fourier import TRUNC, TWO_PI, Laurent, circle_grid, trig_from_samples

DIVISOR_FLOOR = 1e-12


class SmallDivisorError(ArithmeticError):
    def __init__(self, k: int, divisor: float):
        super().__init__(f"small divisor |exp(2 pi i k alpha) - 1| = {divisor:.3e} at frequency k = {k}")
        self.k = k
        self.divisor = divisor


class LinearizationError(RuntimeError):
    pass


def solve_cohomological(rhs, alpha: float, divisor_floor: float = DIVISOR_FLOOR,
                        trunc: float = 1e-15) -> tuple[np.ndarray, dict]:
    """Solve ``v(t + 2 pi alpha) - v(t) = rhs(t)`` on the uniform grid.

    Returns the mean-zero solution samples and a diagnostics dict.  The mean
    of ``rhs`` is the obstruction and is reported, not silently absorbed.
    """
    rhs = np.asarray(rhs, dtype=float)
    M = len(rhs)
    c = np.fft.fft(rhs) / M
    k = np.fft.fftfreq(M, 1.0 / M)
    div = np.exp(2j * np.pi * k * alpha) - 1.0
    vhat = np.zeros_like(c)
    active = (k != 0) & (np.abs(c) > trunc)
    bad = active & (np.abs(div) < divisor_floor)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise SmallDivisorError(int(k[j]), float(abs(div[j])))
    vhat[active] = c[active] / div[active]
    v = np.fft.ifft(vhat * M).real
    smallest = float(np.min(np.abs(div[active]))) if np.any(active) else 1.0
    return v, {"obstruction": float(abs(c[0])), "min_divisor": smallest}


def orbit_guess(g: CircleMap, alpha: float, n_orbit: int | None = None) -> np.ndarray:
    """Linearizer lift displacement from one long orbit.

    The conjugacy sends the orbit point ``x_j`` to ``j * 2 pi alpha``, so
    sorting the orbit by that target angle and interpolating gives ``eta``
    on the grid with error O(n_orbit^-2).
    """
    M = g.M
    n = n_orbit or 4 * M
    d = orbit_displacements(g, n)
    x = np.concatenate([[0.0], np.cumsum(d[:-1])])
    y = TWO_PI * alpha * np.arange(n)
    eta = np.angle(np.exp(1j * (x - y)))
    ref = eta[0]
    eta = ref + np.angle(np.exp(1j * (eta - ref)))
    ym = np.mod(y, TWO_PI)
    order = np.argsort(ym)
    guess = np.interp(circle_grid(M), ym[order], eta[order], period=TWO_PI)
    # interpolation kinks sit at the 1/n_orbit^2 level; drop them so that small
    # divisors do not amplify them in the first Newton step
    c = np.fft.fft(guess)
    c[np.abs(c) < 10.0 * M * (TWO_PI / n) ** 2 * np.max(np.abs(c[1:]))] = 0.0
    return np.fft.ifft(c).real


def kam_linearize(g: CircleMap, alpha: float | None = None, eta0: Laurent | None = None,
                  tol: float = 1e-13, maxit: int = 40, divisor_floor: float = DIVISOR_FLOOR,
                  strict: bool = True                  ) -> tuple[ConformalConjugacy, float, dict]:
    """Find ``h(e^{it}) = e^{i(t + eta(t))}`` and a rotation ``lam`` with
    ``G(t + eta(t)) + lam = t + omega + eta(t + omega)`` (lifts, omega = 2 pi alpha).

    ``lam`` is zero exactly when ``g`` has rotation number ``alpha``; it is
    returned so callers can project onto that rotation number.
    """
    alpha = g.rotation_number if alpha is None else alpha
    if alpha is None:
        raise LinearizationError("rotation number unknown")
    M = g.M
    omega = TWO_PI * alpha
    theta = circle_grid(M)
    k = np.fft.fftfreq(M, 1.0 / M)
    shift = np.exp(1j * k * omega)
    div = shift - 1.0
    eta = orbit_guess(g, alpha) if eta0 is None else eta0.on_circle(M).real

    def residual(eta, lam):
        eta_hat = np.fft.fft(eta)
        eta_shift = np.fft.ifft(eta_hat * shift).real
        E = g.lift(theta + eta) + lam - (theta + omega + eta_shift)
        E -= TWO_PI * np.round(np.mean(E) / TWO_PI)   # the lift is fixed only mod 2 pi
        return E, eta_hat

    lam = 0.0
    E, eta_hat = residual(eta, lam)
    history = [float(np.max(np.abs(E)))]
    for _ in range(maxit):
        if history[-1] < tol:
            break
        dH = 1.0 + np.fft.ifft(1j * k * eta_hat).real
        dH_shift = 1.0 + np.fft.ifft(1j * k * eta_hat * shift).real
        # W(t + omega) - W(t) = (E + dlam) / H'(t + omega), dlam fixed by solvability
        R = E / dH_shift
        w = 1.0 / dH_shift
        dlam = -np.mean(R) / np.mean(w)
        c = np.fft.fft(R + dlam * w) / M
        active = (k != 0) & (np.abs(c) > 1e-17)
        bad = active & (np.abs(div) < divisor_floor)
        if np.any(bad):
            j = int(np.flatnonzero(bad)[0])
            raise SmallDivisorError(int(k[j]), float(abs(div[j])))
        W_hat = np.zeros_like(c)
        W_hat[active] = c[active] / div[active]
        delta = dH * np.fft.ifft(W_hat * M).real
        # damped Newton: halve the step until the residual decreases and H stays monotone
        step = 1.0
        while True:
            trial = eta + step * delta
            E_new, hat_new = residual(trial, lam + step * dlam)
            err = float(np.max(np.abs(E_new)))
            monotone = np.min(1.0 + np.fft.ifft(1j * k * hat_new).real) > 0.0
            if (monotone and err < history[-1]) or step < 1e-3:
                break
            step *= 0.5
        if err >= history[-1]:
            break
        eta, lam, E, eta_hat = trial, lam + step * dlam, E_new, hat_new
        history.append(err)
    if strict and history[-1] >= max(tol, 1e-11):
        raise LinearizationError(f"Newton linearization stalled at residual {history[-1]:.3e}")
    h = ConformalConjugacy.from_lift(trig_from_samples(eta, trunc=TRUNC), M=M)
    return h, lam, {"iterations": len(history), "residual": history[-1], "history": history}


def linearized(g: CircleMap, alpha: float | None = None, eta0: Laurent | None = None,
               tol_eval: float = TOL_EVAL) -> tuple[CircleMap, dict]:
    """Project ``g`` onto rotation number ``alpha`` and attach a numerical linearizer.

    The projection post-composes with the rotation found by Newton (zero
    when ``g`` already has rotation number ``alpha``).
    """
    alpha = g.rotation_number if alpha is None else alpha
    h, lam, info = kam_linearize(g, alpha, eta0)
    values = g.samples() * np.exp(1j * lam)
    out = CircleMap.from_samples(values, alpha, "constructed", h, tol_eval=tol_eval,
                                 meta={"rotation_correction": lam})
    info["rotation_correction"] = lam
    return out, info
