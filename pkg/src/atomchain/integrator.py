"""Adaptive embedded Runge-Kutta 5(4) time integration with dense output.

The pair is the classic seven-stage Dormand-Prince scheme with its quartic
interpolant. Error control uses a scaled max-norm over all components
(an L2 norm makes the controller sluggish once shocks form). A domain
error raised by the right-hand side during a trial stage is treated as a
step rejection; if shrinking the step cannot avoid it, the integration
aborts carrying the failure time and the last accepted state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chain import ChainState, snapshot
from .errors import DomainError, IntegrationAbort, StiffnessError
from .fields import FieldSnapshot

# Dormand-Prince 5(4) tableau.
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
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# Difference between the 5th- and embedded 4th-order weights.
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# Quartic dense-output polynomial: y(t0 + q h) = y0 + h * sum_i k_i * P_i(q).
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_ORDER = 5
_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, step cap and requested output instants."""

    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    max_step: float | None = None
    sample_times: tuple = ()

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_step is not None and self.max_step <= 0:
            raise DomainError("max_step must be positive")
        times = tuple(float(t) for t in self.sample_times)
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise DomainError("sample_times must be strictly increasing")
        object.__setattr__(self, "sample_times", times)


def _stages(f, t, y, h, k1):
    """The six follow-up stages; returns (y5, stage slopes)."""
    k = np.empty((7, len(y)))
    k[0] = k1
    for i in range(1, 6):
        k[i] = f(t + _C[i] * h, y + h * (_A[i] @ k[:i]))
    y5 = y + h * (_B5[:6] @ k[:6])
    k[6] = f(t + h, y5)  # FSAL stage, reused as k1 of the next step
    return y5, k


def _initial_step(f, t0, y0, f0, t_end, rtol, atol, max_step):
    """Hairer-style starting step estimate."""
    scale = atol + rtol * np.abs(y0)
    d0 = np.max(np.abs(y0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, abs(t_end - t0))
    y1 = y0 + h0 * f0
    try:
        f1 = f(t0 + h0, y1)
        d2 = np.max(np.abs(f1 - f0) / scale) / h0
    except DomainError:
        d2 = 1.0 / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)
    h = min(100 * h0, h1, abs(t_end - t0))
    if max_step is not None:
        h = min(h, max_step)
    return h


def adaptive_solve(f, t0, y0, t_end, *, rtol=1e-6, atol=1e-9, max_step=None, sample_times=()):
    """Integrate y' = f(t, y) from t0 to t_end, sampling at ``sample_times``.

    Returns (samples, y_end) where samples is a list of (t, y) pairs, one
    per requested time, evaluated from the dense interpolant of the step
    containing it. Sample times must lie in (t0, t_end].
    """
    y0 = np.asarray(y0, dtype=float)
    sample_times = list(sample_times)
    if any(t <= t0 or t > t_end + 1e-15 for t in sample_times):
        raise DomainError("sample times must lie in (t0, t_end]")
    t, y = t0, y0.copy()
    k1 = f(t, y)
    h = _initial_step(f, t0, y0, k1, t_end, rtol, atol, max_step)
    samples = []
    next_i = 0
    h_floor = 1e-14 * max(1.0, abs(t_end))
    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        h = min(h, t_end - t)
        rejected_by_domain = False
        try:
            y_new, k = _stages(f, t, y, h, k1)
            err_vec = h * (_E @ k)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = float(np.max(np.abs(err_vec) / scale))
            if not np.isfinite(err):
                rejected_by_domain = True
        except DomainError:
            rejected_by_domain = True
        if rejected_by_domain:
            h *= 0.5
            if h < h_floor:
                raise IntegrationAbort(
                    "right-hand side not evaluable even at the smallest step", t, y
                )
            continue
        if err > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / _ORDER))
            if h < h_floor:
                raise StiffnessError("step size underflow", t, y)
            continue
        # accepted: serve any sample times inside (t, t+h]
        while next_i < len(sample_times) and sample_times[next_i] <= t + h + 1e-15:
            q = (sample_times[next_i] - t) / h
            q = min(max(q, 0.0), 1.0)
            qs = np.array([q, q * q, q**3, q**4])
            samples.append((sample_times[next_i], y + h * (k.T @ (_P @ qs))))
            next_i += 1
        t += h
        y = y_new
        k1 = k[6]
        factor = _MAX_FACTOR if err == 0.0 else min(_MAX_FACTOR, _SAFETY * err ** (-1.0 / _ORDER))
        h *= max(_MIN_FACTOR, factor)
        if max_step is not None:
            h = min(h, max_step)
    return samples, y


def fixed_step_solve(f, t0, y0, t_end, n_steps):
    """Propagate with the 5th-order weights at a fixed step (no error control)."""
    y = np.asarray(y0, dtype=float).copy()
    h = (t_end - t0) / n_steps
    t = t0
    for _ in range(n_steps):
        k1 = f(t, y)
        y, _ = _stages(f, t, y, h, k1)
        t += h
    return y


def _chain_ode(rhs, state0: ChainState):
    """First-order interior formulation of a chain with its boundary condition."""
    M = state0.M
    bc = state0.bc
    template = state0.copy()

    def state_at(t, y):
        s = template.copy()
        s.t = t
        s.positions[1:-1] = y[: M - 1]
        s.velocities[1:-1] = y[M - 1 :]
        s.positions[0] = bc.left_position(t)
        s.positions[M] = bc.a
        s.velocities[0] = bc.left_velocity(t)
        s.velocities[M] = 0.0
        return s

    def f(t, y):
        s = state_at(t, y)
        acc = rhs(s)
        return np.concatenate([s.velocities[1:-1], acc[1:-1]])

    y0 = np.concatenate([state0.positions[1:-1], state0.velocities[1:-1]])
    return f, y0, state_at


def integrate(rhs, initial: ChainState, cfg: IntegratorConfig) -> list[FieldSnapshot]:
    """Integrate a chain under ``rhs`` and export snapshots at the sample times.

    ``rhs`` maps a ChainState to nodal accelerations (conservative or
    viscous). The boundary nodes are not integrated; they follow the
    state's boundary condition exactly.
    """
    if not cfg.sample_times:
        raise DomainError("config must request at least one sample time")
    f, y0, state_at = _chain_ode(rhs, initial)
    samples, _ = adaptive_solve(
        f,
        initial.t,
        y0,
        cfg.sample_times[-1],
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        sample_times=cfg.sample_times,
    )
    return [snapshot(state_at(t, y)) for t, y in samples]


def integrate_states(rhs, initial: ChainState, cfg: IntegratorConfig) -> list[ChainState]:
    """Like :func:`integrate` but returning full chain states."""
    f, y0, state_at = _chain_ode(rhs, initial)
    samples, _ = adaptive_solve(
        f,
        initial.t,
        y0,
        cfg.sample_times[-1],
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        sample_times=cfg.sample_times,
    )
    return [state_at(t, y) for t, y in samples]


def observed_order(f, t0, y0, t_end, n0=32):
    """Richardson estimate of the propagation order from runs at h, h/2, h/4."""
    y_h = fixed_step_solve(f, t0, y0, t_end, n0)
    y_h2 = fixed_step_solve(f, t0, y0, t_end, 2 * n0)
    y_h4 = fixed_step_solve(f, t0, y0, t_end, 4 * n0)
    e1 = float(np.max(np.abs(y_h - y_h2)))
    e2 = float(np.max(np.abs(y_h2 - y_h4)))
    if e1 == 0.0 and e2 == 0.0:
        return float("inf")  # exact propagation (zero right-hand side)
    return float(np.log2(e1 / e2))


def convergence_order(rhs, initial, t_end, n0=32):
    """Observed order for a chain (ChainState) or a generic second-order system.

    For the generic form, ``initial`` is a pair (u0, v0) of arrays and
    ``rhs(t, u, v)`` returns accelerations.
    """
    if isinstance(initial, ChainState):
        f, y0, _ = _chain_ode(rhs, initial)
        return observed_order(f, initial.t, y0, t_end, n0)
    u0, v0 = (np.atleast_1d(np.asarray(a, dtype=float)) for a in initial)
    n = len(u0)

    def f(t, y):
        return np.concatenate([y[n:], np.atleast_1d(rhs(t, y[:n], y[n:]))])

    return observed_order(f, 0.0, np.concatenate([u0, v0]), t_end, n0)
