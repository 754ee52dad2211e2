"""Bohmian trajectories: first-order integration of the guidance equation.

Angles are integrated unreduced so that winding numbers survive; reduction to
[0, 2 pi) happens only when presenting results.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import _kernels
from .geometry import metric_diag, reduce_angle
from .wavefield import NodeProximity, Superposition, evaluate_jet, velocity

COMPLETED = "completed"
NODE_STOPPED = "node_stopped"


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectoryConfig:
    sp: Superposition
    theta0: float
    phi0: float = 0.0
    t_end: float = 10.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    sample_dt: float = 0.01
    t_start: float = 0.0

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end must exceed t_start, got t_end={self.t_end}, t_start={self.t_start}")
        for name in ("rel_tol", "abs_tol"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if not self.sample_dt > 0:
            raise ValueError(f"sample_dt must be positive, got {self.sample_dt}")

    def sample_times(self) -> np.ndarray:
        n = int(np.floor((self.t_end - self.t_start) / self.sample_dt + 1e-9))
        return self.t_start + self.sample_dt * np.arange(n + 1)


@dataclass
class TrajectoryRecord:
    t: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    theta_dot: np.ndarray
    phi_dot: np.ndarray
    status: str = COMPLETED
    stop_time: float | None = None
    nfev: int = 0
    segments: list = field(default_factory=list, repr=False)

    @property
    def theta_mod(self) -> np.ndarray:
        return reduce_angle(self.theta)

    @property
    def phi_mod(self) -> np.ndarray:
        return reduce_angle(self.phi)

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    def position(self, t):
        """(theta, phi) at time ``t`` from the integrator's dense output."""
        for lo, hi, sol, index in self.segments:
            if lo <= t <= hi:
                y = sol(t)
                return y[index[0]], y[index[1]]
        raise ValueError(f"t={t} outside the integrated interval")

    def samples(self) -> np.ndarray:
        return np.column_stack([self.t, self.theta, self.phi, self.theta_dot, self.phi_dot])


def _node_event(pk, eps, offset=0):
    def event(t, y):
        return _kernels.density(y[offset], y[offset + 1], t, pk) - eps

    event.terminal = True
    event.direction = -1
    return event


def _check_start(sp: Superposition, theta0, phi0, t0):
    rho = _kernels.density(theta0, phi0, t0, sp.packed)
    if rho < sp.node_eps:
        raise NodeProximity(
            f"initial point theta0={theta0}, phi0={phi0} lies at a node (|Psi|^2={rho:.3e})", t=t0
        )


def solve_segment(rhs, t0, t1, y0, cfg: TrajectoryConfig, events):
    """One adaptive DOP853 run with dense output."""
    sol = solve_ivp(
        rhs,
        (t0, t1),
        y0,
        method="DOP853",
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        dense_output=True,
        events=events,
    )
    if sol.status == -1:
        raise IntegrationError(f"integration failed at t={sol.t[-1]!r}: {sol.message}")
    return sol


def _stopping_event(sol, i):
    return sol.status == 1 and len(sol.t_events[i]) > 0


def _record_from_dense(cfg, segments, index, stop_time, nfev):
    times = cfg.sample_times()
    end = segments[-1][1]
    times = times[times <= end + 1e-12]
    theta = np.empty(len(times))
    phi = np.empty(len(times))
    pos = 0
    for lo, hi, sol, _ in segments:
        mask = (times >= lo) & (times <= hi)
        mask[:pos] = False
        idx = np.nonzero(mask)[0]
        if len(idx):
            y = sol(np.clip(times[idx], lo, hi))
            theta[idx] = y[index[0]]
            phi[idx] = y[index[1]]
            pos = idx[-1] + 1
    jet = evaluate_jet(cfg.sp, theta, phi, times)
    theta_dot, phi_dot = velocity(jet, cfg.sp.kind, cfg.sp.shape, theta)
    status = COMPLETED if stop_time is None else NODE_STOPPED
    return TrajectoryRecord(
        times, theta, phi, np.asarray(theta_dot), np.asarray(phi_dot), status, stop_time, nfev,
        [(lo, hi, sol, index) for lo, hi, sol, _ in segments],
    )


def integrate_trajectory(cfg: TrajectoryConfig) -> TrajectoryRecord:
    """Integrate d(theta, phi)/dt = inverse metric * grad S from (theta0, phi0)."""
    sp = cfg.sp
    pk = sp.packed
    _check_start(sp, cfg.theta0, cfg.phi0, cfg.t_start)
    sol = solve_segment(
        lambda t, y: _kernels.rhs_trajectory(t, y, pk),
        cfg.t_start, cfg.t_end, np.array([cfg.theta0, cfg.phi0], dtype=float), cfg,
        [_node_event(pk, sp.node_eps)],
    )
    stop = float(sol.t[-1]) if _stopping_event(sol, 0) else None
    segments = [(cfg.t_start, float(sol.t[-1]), sol.sol, None)]
    return _record_from_dense(cfg, segments, (0, 1), stop, sol.nfev)


def phase_space_series(record: TrajectoryRecord) -> np.ndarray:
    """(theta mod 2 pi, theta_dot) pairs, one row per sample."""
    return np.column_stack([record.theta_mod, record.theta_dot])


def sensitivity_pair(cfg: TrajectoryConfig, delta_theta0: float):
    """Two trajectories started delta_theta0 apart in theta, and their metric separation.

    Both are advanced as one coupled system so that they share a step
    sequence; their difference is then not swamped by independent
    truncation errors.
    """
    sp = cfg.sp
    pk = sp.packed
    theta1 = cfg.theta0 + delta_theta0
    _check_start(sp, cfg.theta0, cfg.phi0, cfg.t_start)
    _check_start(sp, theta1, cfg.phi0, cfg.t_start)
    y0 = np.array([cfg.theta0, cfg.phi0, theta1, cfg.phi0], dtype=float)
    events = [_node_event(pk, sp.node_eps, 0), _node_event(pk, sp.node_eps, 2)]
    sol = solve_segment(lambda t, y: _kernels.rhs_pair(t, y, pk), cfg.t_start, cfg.t_end, y0, cfg, events)
    stop = float(sol.t[-1]) if sol.status == 1 else None
    segments = [(cfg.t_start, float(sol.t[-1]), sol.sol, None)]
    first = _record_from_dense(cfg, segments, (0, 1), stop, sol.nfev)
    second = _record_from_dense(cfg, segments, (2, 3), stop, sol.nfev)
    g_tt, g_pp = metric_diag(sp.shape, sp.kind, first.theta)
    sep = np.sqrt(g_tt * (second.theta - first.theta) ** 2 + g_pp * (second.phi - first.phi) ** 2)
    return first, second, sep
