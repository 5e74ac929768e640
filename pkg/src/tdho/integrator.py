"""Adaptive embedded Runge-Kutta integration over the complex numbers.

A single explicit Dormand-Prince 5(4) core serves every ODE in the
package (amplitude equation, classical oscillator equation, Pinney
cross-checks). The solver

* controls the local error against ``abs_tol + rel_tol * |y|``,
* lands step endpoints exactly on caller-supplied event times
  (frequency-profile breakpoints), and
* stores a quartic dense-output interpolant per accepted step, so the
  solution can be queried anywhere in the span.

Everything is deterministic: identical inputs give bit-identical output.

References
----------
.. [1] Dormand, J. R., & Prince, P. J. (1980). "A family of embedded
       Runge-Kutta formulae". J. Comp. Appl. Math., 6(1), 19-26.
.. [2] Shampine, L. F. (1986). "Some practical Runge-Kutta formulas".
       Math. Comp., 46(173), 135-150 (the quartic interpolant).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import StiffnessError

__all__ = ["integrate", "OdeSolution", "IntegrationStats"]

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between 5th- and embedded 4th-order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200,
               22 / 525, -1 / 40])
# quartic dense-output coefficients (Shampine's free interpolant)
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ORDER_EXP = -1.0 / 5.0


@dataclass(frozen=True)
class IntegrationStats:
    n_steps: int
    n_rejected: int
    n_rhs: int


class OdeSolution:
    """Solution samples plus a piecewise-quartic dense output.

    ``ts``/``ys`` hold the accepted step endpoints (event times included);
    calling the object evaluates the interpolant. Evaluation exactly at a
    sample time returns the stored state.
    """

    def __init__(self, ts: np.ndarray, ys: np.ndarray, qs: np.ndarray,
                 stats: IntegrationStats):
        self.ts = ts
        self.ys = ys
        self._qs = qs  # (n_steps, dim, 4) interpolant coefficients
        self.stats = stats

    @property
    def t0(self) -> float:
        return float(self.ts[0])

    @property
    def t1(self) -> float:
        return float(self.ts[-1])

    def __call__(self, t):
        scalar = np.isscalar(t)
        tq = np.atleast_1d(np.asarray(t, dtype=float))
        eps = 1e-12 * max(abs(self.t0), abs(self.t1), 1.0)
        if np.any(tq < self.t0 - eps) or np.any(tq > self.t1 + eps):
            raise ValueError(f"dense output queried outside [{self.t0}, {self.t1}]")
        idx = np.clip(np.searchsorted(self.ts, tq, side="right") - 1,
                      0, len(self.ts) - 2)
        h = self.ts[idx + 1] - self.ts[idx]
        theta = (tq - self.ts[idx]) / h
        # y = y_k + h * Q_k @ (theta, theta^2, theta^3, theta^4)
        powers = theta[:, None] ** np.arange(1, 5)[None, :]
        out = self.ys[idx] + h[:, None] * np.einsum("kdp,kp->kd", self._qs[idx], powers)
        # exact sample times reproduce stored states bit-for-bit
        pos = np.searchsorted(self.ts, tq)
        pos = np.clip(pos, 0, len(self.ts) - 1)
        exact = self.ts[pos] == tq
        if np.any(exact):
            out[exact] = self.ys[pos[exact]]
        return out[0] if scalar else out


def _error_norm(err, y0, y1, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, t_end, rel_tol, abs_tol):
    """Hairer-style deterministic first-step guess (one extra rhs call)."""
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean(np.abs(y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean(np.abs(f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_end - t0)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = float(np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, t_end - t0)


def integrate(rhs: Callable, y0, span, rel_tol: float = 1e-10,
              abs_tol: float = 1e-12, events: Sequence[float] = (),
              max_step: float = np.inf) -> OdeSolution:
    """Integrate ``y' = rhs(t, y)`` over ``span = (t0, t1)``.

    ``events`` are interior times the stepper must land on exactly.
    Raises :class:`StiffnessError` if the step size underflows below
    ``1e-14 * (t1 - t0)``.
    """
    t0, t1 = float(span[0]), float(span[1])
    if not t1 > t0:
        raise ValueError("integration span must have t1 > t0")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    y0 = np.atleast_1d(np.asarray(y0, dtype=complex))
    dim = y0.size

    ev = sorted({float(e) for e in events if t0 < float(e) < t1})
    checkpoints = [t0] + ev + [t1]
    h_min = 1e-14 * (t1 - t0)

    ts = [t0]
    ys = [y0]
    qs = []
    n_steps = n_rejected = 0
    n_rhs = 0

    def call(t, y):
        nonlocal n_rhs
        n_rhs += 1
        return np.asarray(rhs(t, y), dtype=complex)

    k = np.empty((7, dim), dtype=complex)
    t = t0
    y = y0
    f_start = call(t, y)
    h = _initial_step(call, t, y, f_start, t1, rel_tol, abs_tol)

    for seg_end in checkpoints[1:]:
        while t < seg_end:
            h = min(h, max_step)
            # land exactly on the segment end; the truncation does not feed
            # back into the controller step h, so a short segment (close
            # event times) cannot collapse the step size downstream
            landing = (t + h) >= seg_end - 1e-14 * max(abs(seg_end), 1.0)
            h_step = seg_end - t if landing else h
            if not landing and h < h_min:
                raise StiffnessError(
                    f"step size underflow near t = {t:.9g} (h = {h:.3g}); "
                    "the problem may be stiff or singular", t=t)

            k[0] = f_start
            for i in range(1, 7):
                k[i] = call(t + _C[i] * h_step, y + h_step * (_A[i] @ k[:i]))
            y_new = y + h_step * (_B @ k)
            err = _error_norm(h_step * (_E @ k), y, y_new, rel_tol, abs_tol)

            if err <= 1.0:
                t_new = seg_end if landing else t + h_step
                ts.append(t_new)
                ys.append(y_new)
                qs.append(k.T @ _P)
                n_steps += 1
                # FSAL: stage 7 is the derivative at t_new; copy, since the
                # stage array is overwritten on a rejected retry
                f_start = k[6].copy()
                t, y = t_new, y_new
                factor = _MAX_FACTOR if err == 0.0 else min(
                    _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** _ORDER_EXP))
                h = h * factor
            else:
                n_rejected += 1
                h = h_step * max(_MIN_FACTOR, _SAFETY * err ** _ORDER_EXP)

    stats = IntegrationStats(n_steps=n_steps, n_rejected=n_rejected, n_rhs=n_rhs)
    return OdeSolution(np.asarray(ts), np.asarray(ys), np.asarray(qs), stats)
