"""Monodromy matrix along Bohmian trajectories and the derived Lyapunov exponents.

The separation between neighbouring trajectories, measured in the local
orthonormal frame, evolves as dx(t) = M(t) dx(0) with dM/dt = J M and

    J_ij = S_ij / sqrt(g_ii g_jj)

for the diagonal surface metric. On the torus this gives
J = [[S_tt / a^2, S_tp / (a R G)], [S_tp / (a R G), S_pp / (R G)^2]].
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .dynamics import (
    COMPLETED,
    NODE_STOPPED,
    TrajectoryConfig,
    TrajectoryRecord,
    _check_start,
    _node_event,
    _record_from_dense,
    _stopping_event,
    solve_segment,
)
from .geometry import SurfaceKind, TorusShape, metric_diag
from .wavefield import NodeProximity, SHessian, Superposition

OVERFLOW_LIMIT = 1e150
LN2 = math.log(2.0)


@dataclass(frozen=True)
class JMatrix:
    j_11: float
    j_12: float
    j_21: float
    j_22: float

    def as_array(self) -> np.ndarray:
        return np.array([[self.j_11, self.j_12], [self.j_21, self.j_22]])

    @property
    def trace(self) -> float:
        return self.j_11 + self.j_22


def build_J(hess: SHessian, kind, shape: TorusShape, theta) -> JMatrix:
    g_tt, g_pp = metric_diag(shape, SurfaceKind(kind), theta)
    off = hess.s_tp / np.sqrt(g_tt * g_pp)
    return JMatrix(hess.s_tt / g_tt, off, off, hess.s_pp / g_pp)


@dataclass(frozen=True)
class MonodromyState:
    """M(t) = exp(log_scale) * matrix; the scale absorbs overflow rescalings."""

    t: float
    matrix: np.ndarray
    log_scale: float = 0.0

    def eigen(self):
        """Log-magnitudes (descending) and matching eigenvectors of M."""
        vals, vecs = np.linalg.eig(self.matrix)
        mags = np.abs(vals)
        if np.any(mags == 0.0):
            raise ValueError(f"singular monodromy matrix at t={self.t}")
        order = np.argsort(-mags, kind="stable")
        return np.log(mags[order]) + self.log_scale, vecs[:, order]

    def log_det(self) -> float:
        return math.log(abs(np.linalg.det(self.matrix))) + 2.0 * self.log_scale


def propagate(cfg: TrajectoryConfig, t_checkpoints, overflow_limit: float = OVERFLOW_LIMIT):
    """Advance (theta, phi, M) jointly; return the trajectory and M at each checkpoint.

    Checkpoints beyond a node stop are omitted from the returned list.
    """
    checkpoints = sorted(float(t) for t in t_checkpoints)
    if any(t < cfg.t_start or t > cfg.t_end for t in checkpoints):
        raise ValueError(f"checkpoints {checkpoints} must lie within [{cfg.t_start}, {cfg.t_end}]")
    sp = cfg.sp
    pk = sp.packed
    _check_start(sp, cfg.theta0, cfg.phi0, cfg.t_start)

    def rhs(t, y):
        return _kernels.rhs_monodromy(t, y, pk)

    def overflow(t, y):
        return np.max(np.abs(y[2:])) - overflow_limit

    overflow.terminal = True
    overflow.direction = 1
    events = [_node_event(pk, sp.node_eps), overflow]

    y = np.array([cfg.theta0, cfg.phi0, 1.0, 0.0, 0.0, 1.0])
    t = cfg.t_start
    log_scale = 0.0
    segments = []
    states = []
    stop = None
    nfev = 0
    while True:
        sol = solve_segment(rhs, t, cfg.t_end, y, cfg, events)
        nfev += sol.nfev
        t_hi = float(sol.t[-1])
        segments.append((t, t_hi, sol.sol, None))
        for tc in checkpoints:
            if t <= tc <= t_hi and not any(s.t == tc for s in states):
                states.append(MonodromyState(tc, sol.sol(tc)[2:].reshape(2, 2), log_scale))
        if _stopping_event(sol, 0):
            stop = t_hi
            break
        if _stopping_event(sol, 1):
            y = sol.y[:, -1].copy()
            k = math.ceil(math.log2(np.max(np.abs(y[2:]))))
            y[2:] = np.ldexp(y[2:], -k)
            log_scale += k * LN2
            t = t_hi
            continue
        break
    record = _record_from_dense(cfg, segments, (0, 1), stop, nfev)
    return record, states


@dataclass(frozen=True)
class LyapunovEstimate:
    """Exponents from eigenvalue magnitudes of M at two checkpoints.

    ``lambda_t1`` / ``lambda_t2`` hold (1/t) ln|beta_i(t)| per branch in
    descending order; ``lambda_window`` holds
    ln(|beta_i(t2)| / |beta_i(t1)|) / (t2 - t1) with branches paired by that
    order. When the eigenvectors show the branches swapped between the two
    checkpoints, ``crossed_window`` holds the other pairing too.
    """

    t1: float
    t2: float
    log_beta_t1: np.ndarray
    log_beta_t2: np.ndarray
    lambda_t1: np.ndarray
    lambda_t2: np.ndarray
    lambda_window: np.ndarray
    crossed_window: np.ndarray | None
    branch_taken: int
    swapped: bool = False

    @property
    def crossed(self) -> bool:
        return self.crossed_window is not None

    @property
    def value(self) -> float:
        """The larger windowed exponent over branches (and pairings if crossed)."""
        best = float(np.max(self.lambda_window))
        if self.crossed_window is not None:
            best = max(best, float(np.max(self.crossed_window)))
        return best

    @property
    def taken_pair(self) -> tuple[float, float]:
        """(lambda(t1), lambda(t2)) of the branch pairing behind ``value``."""
        i = self.branch_taken
        j = 1 - i if self.swapped else i
        return float(self.lambda_t1[i]), float(self.lambda_t2[j])

    @property
    def at_t1(self) -> float:
        return float(self.lambda_t1[0])

    @property
    def at_t2(self) -> float:
        return float(self.lambda_t2[0])


def _pick(states, t):
    for s in states:
        if math.isclose(s.t, t, rel_tol=0.0, abs_tol=1e-12):
            return s
    raise ValueError(f"no monodromy checkpoint at t={t}")


def lyapunov(states, t1: float, t2: float) -> LyapunovEstimate:
    if not 0 < t1 < t2:
        raise ValueError(f"need 0 < t1 < t2, got t1={t1}, t2={t2}")
    s1, s2 = _pick(states, t1), _pick(states, t2)
    log1, vec1 = s1.eigen()
    log2, vec2 = s2.eigen()
    window = (log2 - log1) / (t2 - t1)
    crossed = None
    overlap = np.abs(vec1.conj().T @ vec2)
    if overlap[0, 1] + overlap[1, 0] > overlap[0, 0] + overlap[1, 1] and log1[0] != log1[1] and log2[0] != log2[1]:
        crossed = (log2[::-1] - log1) / (t2 - t1)
    branch = int(np.argmax(window))
    swapped = False
    if crossed is not None and np.max(crossed) > window[branch]:
        branch = int(np.argmax(crossed))
        swapped = True
    return LyapunovEstimate(t1, t2, log1, log2, log1 / t1, log2 / t2, window, crossed, branch, swapped)


def integrated_trace(record: TrajectoryRecord, sp: Superposition, t: float) -> float:
    """Quadrature of tr J along the recorded path from its start to ``t``.

    Independent of the monodromy integration; exp of this is det M(t).
    """
    pk = sp.packed
    t0 = record.t[0]

    def integrand(s):
        theta, phi = record.position(s)
        return _kernels.trace_j(theta, phi, s, pk)

    # split at the sample grid so quad sees smooth pieces
    edges = np.unique(np.concatenate([record.t[record.t < t], [t]]))
    edges = edges[::10] if len(edges) > 20 else edges
    edges = np.unique(np.concatenate([[t0], edges, [t]]))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _ = quad(integrand, lo, hi, epsabs=1e-10, epsrel=1e-10, limit=200)
        total += value
    return total


@dataclass
class SweepRow:
    theta0: float
    lambda_t1: float
    lambda_t2: float
    lambda_window: float
    status: str
    crossed: bool = False
    stop_time: float | None = None
    taken_t1: float = float("nan")
    taken_t2: float = float("nan")

    @property
    def ok(self) -> bool:
        return self.status == COMPLETED


def lyapunov_row(sp: Superposition, theta0: float, checkpoints=(9.0, 10.0), rel_tol=1e-10, abs_tol=1e-10,
                 phi0: float = 0.0) -> SweepRow:
    t1, t2 = checkpoints
    cfg = TrajectoryConfig(sp, theta0, phi0=phi0, t_end=t2, rel_tol=rel_tol, abs_tol=abs_tol, sample_dt=t2)
    try:
        record, states = propagate(cfg, checkpoints)
    except NodeProximity as exc:
        nan = float("nan")
        return SweepRow(theta0, nan, nan, nan, NODE_STOPPED, stop_time=exc.t)
    if record.status != COMPLETED:
        nan = float("nan")
        return SweepRow(theta0, nan, nan, nan, NODE_STOPPED, stop_time=record.stop_time)
    est = lyapunov(states, t1, t2)
    taken = est.taken_pair
    return SweepRow(theta0, est.at_t1, est.at_t2, est.value, COMPLETED, est.crossed, None, *taken)


def _row_task(args):
    return lyapunov_row(*args)


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def table_sweep(sp: Superposition, theta0_list, checkpoints=(9.0, 10.0), rel_tol=1e-10, abs_tol=1e-10,
                jobs: int | None = None, phi0: float = 0.0) -> list[SweepRow]:
    """One Lyapunov row per theta0, in input order regardless of scheduling."""
    theta0_list = list(theta0_list)
    if not theta0_list:
        raise ValueError("no theta0 points")
    tasks = [(sp, float(th), tuple(checkpoints), rel_tol, abs_tol, phi0) for th in theta0_list]
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(tasks) == 1:
        return [_row_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(_row_task, tasks))
