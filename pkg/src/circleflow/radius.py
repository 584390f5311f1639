"""Conformal radius of linearization domains along the flow, and the two
boundary identities linking it to the Herglotz data of the 2-conformal measure.

For a germ linearizer ``H`` with ``H'(0) = 1`` the interior domain at time
``t`` is ``D_t = H({|w| < rho(t)})`` with conformal radius ``r(t) = rho(t)``.
The welding inverse ``k_t(e^{is}) = e^{i S_t^{-1}(s)}`` linearizes the map
``g_t`` and, with ``P_t + i Q_t`` the boundary values of the Herglotz transform
of ``r^* mu_{2, g_t}``,

    P_t(k_t(xi)) = (r'(t) / r(t)) |k_t'(xi)|,
    k_t_dot(xi) / k_t(xi) + i Q_t(k_t(xi)) = 0.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .flow import FlowState, Germ, germ_state
from .fourier import circle_grid
from .herglotz import HerglotzField
from .measures import CircleMeasure, conformal_measure_oracle


@dataclass(frozen=True, eq=False)
class RadiusTrace:
    """Samples along a uniform ``t_list``.

    ``k_lift[j]`` holds ``S_{t_j}^{-1}`` on the uniform ``s``-grid, so that
    ``k_{t_j}(e^{is}) = exp(i k_lift[j])``.
    """

    germ: Germ
    t: np.ndarray
    r: np.ndarray
    capacity: np.ndarray
    k_lift: np.ndarray
    states: list = field(repr=False, default_factory=list)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def interior(self) -> range:
        return range(1, len(self.t) - 1)

    def r_prime(self, j: int) -> float:
        return float((self.r[j + 1] - self.r[j - 1]) / (2 * self.dt))

    def k_dot_over_k(self, j: int) -> np.ndarray:
        """``k_dot / k = i d/dt S^{-1}`` by centered differences (returned without the ``i``)."""
        return (self.k_lift[j + 1] - self.k_lift[j - 1]) / (2 * self.dt)

    def abs_k_prime(self, j: int) -> np.ndarray:
        """``|k_t'|`` on the circle: derivative of the angle lift, spectrally."""
        p = self.k_lift[j] - circle_grid(self.k_lift.shape[1])
        M = len(p)
        kk = np.fft.fftfreq(M, 1.0 / M)
        mult = np.where(np.abs(kk) == M // 2, 0.0, 1j * kk)   # drop the Nyquist mode
        return 1.0 + np.fft.ifft(mult * np.fft.fft(p)).real

    def increments(self) -> dict:
        """First and second differences of ``r`` and sup gaps of consecutive ``k_t``."""
        dr = np.diff(self.r)
        d2r = np.diff(self.r, 2)
        gaps = np.max(np.abs(np.exp(1j * np.diff(self.k_lift, axis=0)) - 1.0), axis=1)
        return {"first_differences": dr.tolist(), "second_differences": d2r.tolist(),
                "k_gap_over_dt": (gaps / self.dt).tolist()}

    def to_csv(self, residuals: list | None = None) -> str:
        buf = io.StringIO()
        buf.write("t,r,capacity,residual_real_identity,residual_imag_identity\n")
        res = {row["t"]: row for row in (residuals or [])}
        for t, r, c in zip(self.t, self.r, self.capacity):
            row = res.get(float(t))
            a = f"{row['residual_real']:.17g}" if row else ""
            b = f"{row['residual_imag']:.17g}" if row else ""
            buf.write(f"{t:.17g},{r:.17g},{c:.17g},{a},{b}\n")
        return buf.getvalue()


def radius_trace(germ: Germ, t_list, M: int = 2048) -> RadiusTrace:
    """Conformal radii and welding inverses (with capacities) at each ``t``.

    ``t_list`` must be uniform for the centered differences.
    """
    t = np.asarray(t_list, dtype=float)
    if len(t) > 2 and np.max(np.abs(np.diff(t, 2))) > 1e-9 * max(1.0, np.max(np.abs(t))):
        raise ValueError("t_list must be uniformly spaced")
    states: list[FlowState] = []
    r, cap, lifts = [], [], []
    s = circle_grid(M)
    for tj in t:
        st, rho = germ_state(germ, float(tj), M)
        states.append(st)
        r.append(rho)                       # H'(0) = 1, so the conformal radius is rho
        cap.append(st.hull.capacity)
        lifts.append(st.hull.S_inv(s))
    return RadiusTrace(germ, t, np.array(r), np.array(cap), np.array(lifts), states)


def verify_radius_identities(trace: RadiusTrace, measures: list[CircleMeasure] | None = None) -> dict:
    """sup-norm residuals of both identities at each interior ``t``.

    ``measures[j]`` is ``mu_{2, g_{t_j}}``; by default the closed-form
    measure from the map's linearizer.
    """
    rows = []
    for j in trace.interior:
        state = trace.states[j]
        mu2 = measures[j] if measures is not None else conformal_measure_oracle(state.map, 2.0)
        field = HerglotzField(mu2.pullback_conj())
        at_k = field.exact_boundary(trace.k_lift[j])
        P, Q = at_k.real, at_k.imag
        rate = trace.r_prime(j) / trace.r[j]
        kprime = trace.abs_k_prime(j)
        res_real = float(np.max(np.abs(P - rate * kprime)))
        res_imag = float(np.max(np.abs(trace.k_dot_over_k(j) + Q)))
        rows.append({"t": float(trace.t[j]), "r": float(trace.r[j]), "log_r_prime": rate,
                     "residual_real": res_real, "residual_imag": res_imag,
                     "integral_gap": float(abs(np.mean(P) - rate))})
    return {"dt": trace.dt, "rows": rows,
            "max_residual_real": max(r["residual_real"] for r in rows),
            "max_residual_imag": max(r["residual_imag"] for r in rows),
            "max_integral_gap": max(r["integral_gap"] for r in rows)}
