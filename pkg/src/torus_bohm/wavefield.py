"""Time-dependent superpositions, their phase S and the Bohmian velocity field.

Every term is a finite trigonometric series in theta times exp(i m phi) times a
time phase exp(-i E t), so all partial derivatives are evaluated in closed
form. The wavefunction is factored as Psi = carrier * b, where the carrier is
the largest-weight term's weight and plane-wave phase; S then splits into a
linear part (exact) plus arg b.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .geometry import SurfaceKind, TorusShape, metric_diag, scale_factor_G
from .spectral import StationaryState

NODE_REL_EPS = 1e-12


class NodeProximity(ArithmeticError):
    """Raised where |Psi|^2 falls below the node threshold and S is undefined."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True, eq=False)
class Superposition:
    """sum_j c_j Psi_j(theta, phi) exp(-i E_j t) with sum |c_j|^2 = 1."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((state, complex(c)) for state, c in self.terms)
        if not terms:
            raise ValueError("a superposition needs at least one term")
        first = terms[0][0]
        for state, _ in terms:
            if not isinstance(state, StationaryState):
                raise TypeError(f"expected StationaryState, got {type(state).__name__}")
            if state.kind is not first.kind or state.shape != first.shape:
                raise ValueError("all terms must share one surface kind and shape")
        norm = sum(abs(c) ** 2 for _, c in terms)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"weights must satisfy sum |c|^2 = 1, got {norm!r}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def normalized(cls, terms) -> "Superposition":
        terms = [(state, complex(c)) for state, c in terms]
        scale = np.sqrt(sum(abs(c) ** 2 for _, c in terms))
        if scale == 0:
            raise ValueError("all weights are zero")
        return cls(tuple((state, c / scale) for state, c in terms))

    @property
    def kind(self) -> SurfaceKind:
        return self.terms[0][0].kind

    @property
    def shape(self) -> TorusShape:
        return self.terms[0][0].shape

    @property
    def shared_m(self) -> bool:
        return len({state.m for state, _ in self.terms}) == 1

    @cached_property
    def _reference(self) -> int:
        return int(np.argmax([abs(c) for _, c in self.terms]))

    @cached_property
    def packed(self):
        ref_state, c0 = self.terms[self._reference]
        width = max(int(state.modes[-1]) for state, _ in self.terms) + 1
        nterm = len(self.terms)
        cc = np.zeros((nterm, width))
        sc = np.zeros((nterm, width))
        r = np.empty(nterm, dtype=np.complex128)
        dm = np.empty(nterm)
        de = np.empty(nterm)
        for j, (state, c) in enumerate(self.terms):
            target = cc if state.parity == "+" else sc
            target[j, state.modes] = state.coeffs
            r[j] = 1.0 + 0j if j == self._reference else c / c0
            dm[j] = state.m - ref_state.m
            de[j] = state.energy - ref_state.energy
        kind = _kernels.TORUS if self.kind is SurfaceKind.TORUS else _kernels.FLAT
        geo = np.array([kind, self.shape.a, self.shape.R, float(ref_state.m), abs(c0) ** 2])
        return (r, dm, de, cc, sc, geo)

    def carrier(self, phi, t):
        state, c0 = self.terms[self._reference]
        return c0 * np.exp(1j * (state.m * np.asarray(phi) - state.energy * np.asarray(t)))

    @cached_property
    def node_eps(self) -> float:
        """1e-12 times the surface-averaged |Psi|^2 (time independent)."""
        n = 96
        grid = 2.0 * np.pi * np.arange(n) / n
        th, ph = np.meshgrid(grid, grid, indexing="ij")
        rho = density(self, th, ph, 0.0)
        w = scale_factor_G(self.shape, th) if self.kind is SurfaceKind.TORUS else np.ones_like(th)
        return NODE_REL_EPS * float(np.sum(rho * w) / np.sum(w))


@dataclass(frozen=True)
class AmplitudeJet:
    """Psi and its partials up to second order at one (theta, phi, t).

    Stored in factored form, Psi = carrier * b; the ``psi`` / ``d_*``
    properties give the plain partials of Psi.
    """

    carrier: complex
    carrier_m: float
    b: complex
    b_theta: complex
    b_phi: complex
    b_theta_theta: complex
    b_theta_phi: complex
    b_phi_phi: complex
    node_eps: float = 0.0

    @property
    def psi(self):
        return self.carrier * self.b

    @property
    def d_theta(self):
        return self.carrier * self.b_theta

    @property
    def d_phi(self):
        return self.carrier * (1j * self.carrier_m * self.b + self.b_phi)

    @property
    def d_theta_theta(self):
        return self.carrier * self.b_theta_theta

    @property
    def d_theta_phi(self):
        return self.carrier * (1j * self.carrier_m * self.b_theta + self.b_theta_phi)

    @property
    def d_phi_phi(self):
        m = self.carrier_m
        return self.carrier * (-(m**2) * self.b + 2j * m * self.b_phi + self.b_phi_phi)

    def check_off_node(self):
        rho = np.abs(self.psi) ** 2
        if np.any(rho < self.node_eps):
            raise NodeProximity(f"|Psi|^2 = {np.min(rho):.3e} below node threshold {self.node_eps:.3e}")


@dataclass(frozen=True)
class SHessian:
    s_tt: float
    s_tp: float
    s_pp: float


def evaluate_jet(sp: Superposition, theta, phi, t) -> AmplitudeJet:
    """Closed-form jet; accepts scalars or broadcastable arrays."""
    th, ph, tt = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (theta, phi, t)))
    shape = th.shape
    r, dm, de, cc, sc, geo = sp.packed
    out = _kernels.envelope_jet_many(th.ravel(), ph.ravel(), tt.ravel(), r, dm, de, cc, sc)
    carrier = sp.carrier(ph, tt)
    if shape == ():
        fields = [complex(v[0]) for v in out]
        carrier = complex(carrier)
    else:
        fields = [v.reshape(shape) for v in out]
    return AmplitudeJet(carrier, float(geo[3]), *fields, node_eps=sp.node_eps)


def density(sp: Superposition, theta, phi, t):
    """|Psi|^2; zeros are allowed here."""
    th, ph, tt = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (theta, phi, t)))
    r, dm, de, cc, sc, geo = sp.packed
    b = _kernels.envelope_jet_many(th.ravel(), ph.ravel(), tt.ravel(), r, dm, de, cc, sc)[0]
    rho = geo[4] * np.abs(b.reshape(th.shape)) ** 2
    return float(rho) if rho.ndim == 0 else rho


def phase_S(jet: AmplitudeJet):
    """arg Psi in (-pi, pi]."""
    jet.check_off_node()
    s = np.angle(jet.psi)
    s = np.where(s <= -np.pi, np.pi, s)
    return float(s) if np.ndim(s) == 0 else s


def unwrapped_phase(sp: Superposition, theta, phi, t) -> np.ndarray:
    """S sampled along a path, made continuous between consecutive samples."""
    return np.unwrap(np.atleast_1d(phase_S(evaluate_jet(sp, theta, phi, t))))


def phase_gradient(jet: AmplitudeJet):
    """Coordinate gradient (S_theta, S_phi)."""
    jet.check_off_node()
    return (jet.b_theta / jet.b).imag, jet.carrier_m + (jet.b_phi / jet.b).imag


def velocity(jet: AmplitudeJet, kind, shape: TorusShape, theta):
    """Coordinate velocity (theta_dot, phi_dot) = inverse metric times grad S."""
    s_t, s_p = phase_gradient(jet)
    g_tt, g_pp = metric_diag(shape, kind, theta)
    return s_t / g_tt, s_p / g_pp


def hessian_S(jet: AmplitudeJet) -> SHessian:
    """Exact coordinate Hessian of S = arg Psi."""
    jet.check_off_node()
    lt = jet.b_theta / jet.b
    lp = jet.b_phi / jet.b
    return SHessian(
        (jet.b_theta_theta / jet.b - lt * lt).imag,
        (jet.b_theta_phi / jet.b - lt * lp).imag,
        (jet.b_phi_phi / jet.b - lp * lp).imag,
    )


def quantum_potential(sp: Superposition, theta, phi, t):
    """Q = -(1/2) Lap(|Psi|) / |Psi| with the surface Laplace-Beltrami operator."""
    jet = evaluate_jet(sp, theta, phi, t)
    jet.check_off_node()
    b = jet.b
    rho = np.abs(b) ** 2
    rho_t = 2.0 * (np.conj(b) * jet.b_theta).real
    rho_p = 2.0 * (np.conj(b) * jet.b_phi).real
    rho_tt = 2.0 * (np.abs(jet.b_theta) ** 2 + (np.conj(b) * jet.b_theta_theta).real)
    rho_pp = 2.0 * (np.abs(jet.b_phi) ** 2 + (np.conj(b) * jet.b_phi_phi).real)
    # derivatives of amp = sqrt(rho), divided by amp
    a_t = rho_t / (2.0 * rho)
    a_tt = rho_tt / (2.0 * rho) - rho_t**2 / (4.0 * rho**2)
    a_pp = rho_pp / (2.0 * rho) - rho_p**2 / (4.0 * rho**2)
    shape = sp.shape
    g_tt, g_pp = metric_diag(shape, sp.kind, theta)
    if sp.kind is SurfaceKind.TORUS:
        # d/dtheta log sqrt(g_phi_phi)
        log_h_t = -shape.a * np.sin(theta) / (shape.R + shape.a * np.cos(theta))
    else:
        log_h_t = 0.0
    lap_over_amp = (a_tt + log_h_t * a_t) / g_tt + a_pp / g_pp
    q = -0.5 * lap_over_amp
    return float(q) if np.ndim(q) == 0 else q


FIELD_COLUMNS = ("theta", "phi", "density", "phase", "theta_dot", "phi_dot")


def sample_field(sp: Superposition, n_theta: int, n_phi: int, t: float = 0.0) -> np.ndarray:
    """|Psi|^2, S and the velocity on a uniform grid; phase and velocity are NaN at nodes."""
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    ph = 2.0 * np.pi * np.arange(n_phi) / n_phi
    th, ph = np.meshgrid(th, ph, indexing="ij")
    jet = evaluate_jet(sp, th, ph, t)
    rho = np.abs(jet.psi) ** 2
    off = rho >= sp.node_eps
    safe_b = np.where(off, jet.b, 1.0)
    s_t = np.where(off, (jet.b_theta / safe_b).imag, np.nan)
    s_p = np.where(off, jet.carrier_m + (jet.b_phi / safe_b).imag, np.nan)
    g_tt, g_pp = metric_diag(sp.shape, sp.kind, th)
    phase = np.where(off, np.angle(jet.psi), np.nan)
    cols = (th, ph, rho, phase, s_t / g_tt, s_p / g_pp)
    return np.column_stack([c.ravel() for c in cols])
