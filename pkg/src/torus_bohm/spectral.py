"""Stationary states of a particle confined to the torus surface.

With psi(theta, phi) = f(theta) exp(i m phi), the surface Schrodinger equation
in the scaled eigenvalue beta = 2 E a^2 reads

    f'' - alpha sin(theta) / G f' - m^2 alpha^2 / G^2 f + beta f = 0,

G = 1 + alpha cos(theta). Multiplying by G gives the self-adjoint form
(G f')' - m^2 alpha^2 / G f + beta G f = 0, which a Fourier-Galerkin projection
turns into the symmetric-definite pencil A x = beta B x.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .geometry import SurfaceKind, TorusShape
from .reference_values import TABLE1

PARITIES = ("+", "-")


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class StationaryState:
    """One eigenstate f(theta) exp(i m phi).

    ``coeffs[i]`` multiplies cos(k_i theta) for parity "+" (k_i = i) or
    sin(k_i theta) for parity "-" (k_i = i + 1). The theta part is normalised
    to one under the surface weight G (weight 1 on the flat strip).
    """

    kind: SurfaceKind
    parity: str
    n: int
    m: int
    coeffs: np.ndarray = field(repr=False)
    beta: float
    shape: TorusShape

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be '+' or '-', got {self.parity!r}")
        object.__setattr__(self, "kind", SurfaceKind(self.kind))
        coeffs = np.array(self.coeffs, dtype=float)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def energy(self) -> float:
        return self.beta / (2.0 * self.shape.a**2)

    @property
    def modes(self) -> np.ndarray:
        start = 0 if self.parity == "+" else 1
        return np.arange(start, start + len(self.coeffs))

    @property
    def label(self) -> str:
        return f"Psi{self.parity}_{self.n}{self.m}"

    def with_beta(self, beta: float) -> "StationaryState":
        return replace(self, beta=float(beta))

    def theta_profile(self, theta, derivative: int = 0):
        """f(theta) or one of its first two derivatives."""
        theta = np.asarray(theta, dtype=float)
        k = self.modes
        kt = np.multiply.outer(theta, k)
        if self.parity == "+":
            basis = (np.cos(kt), -k * np.sin(kt), -(k**2) * np.cos(kt))[derivative]
        else:
            basis = (np.sin(kt), k * np.cos(kt), -(k**2) * np.sin(kt))[derivative]
        return basis @ self.coeffs


@dataclass(frozen=True)
class SpectralProblem:
    shape: TorusShape
    m: int
    parity: str
    basis_size: int = 32

    def __post_init__(self):
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be '+' or '-', got {self.parity!r}")
        if self.basis_size < 8:
            raise ValueError(f"basis_size must be at least 8, got {self.basis_size}")


def _basis_modes(parity: str, basis_size: int) -> np.ndarray:
    return np.arange(basis_size) if parity == "+" else np.arange(1, basis_size + 1)


def galerkin_pencil(alpha: float, m: int, parity: str, basis_size: int, quad_points: int | None = None):
    """Stiffness A, Gram matrix B (weight G) and the Fourier modes of the basis.

    Integrals use the periodic trapezoid rule, which is exact for the
    trigonometric-polynomial parts and geometrically convergent for the 1/G
    term.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    k = _basis_modes(parity, basis_size)
    q = quad_points or max(512, 16 * basis_size)
    theta = 2.0 * np.pi * np.arange(q) / q
    w = 2.0 * np.pi / q
    G = 1.0 + alpha * np.cos(theta)
    kt = np.outer(theta, k)
    if parity == "+":
        f, df = np.cos(kt), -k * np.sin(kt)
    else:
        f, df = np.sin(kt), k * np.cos(kt)
    A = (df.T * (w * G)) @ df + (f.T * (w * (m * alpha) ** 2 / G)) @ f
    B = (f.T * (w * G)) @ f
    return 0.5 * (A + A.T), 0.5 * (B + B.T), k


def _sign_reference(parity: str, n: int, m: int) -> float:
    entry = TABLE1.get((parity, n, m))
    if entry is None:
        return 1.0
    coeffs = entry[1]
    lead = max(coeffs, key=lambda mode: abs(coeffs[mode]))
    return float(np.sign(coeffs[lead]))


def eigenpairs(alpha: float, m: int, parity: str, basis_size: int = 32):
    """Sorted betas and G-orthonormal coefficient vectors (columns)."""
    A, B, _ = galerkin_pencil(alpha, m, parity, basis_size)
    try:
        beta, vecs = scipy.linalg.eigh(A, B)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralError(
            f"eigensolve failed for alpha={alpha}, m={m}, parity={parity}, basis_size={basis_size}: {exc}"
        ) from exc
    if not np.all(np.isfinite(beta)):
        raise SpectralError(f"non-finite eigenvalues for alpha={alpha}, m={m}, parity={parity}")
    return beta, vecs


def label_n(parity: str, index: int) -> int:
    """theta-excitation label of the index-th state (ascending beta)."""
    return index if parity == "+" else index + 1


def solve_torus_states(problem: SpectralProblem) -> list[StationaryState]:
    beta, vecs = eigenpairs(problem.shape.alpha, problem.m, problem.parity, problem.basis_size)
    states = []
    for i in range(len(beta)):
        n = label_n(problem.parity, i)
        x = vecs[:, i]
        lead = np.argmax(np.abs(x))
        x = x * (_sign_reference(problem.parity, n, problem.m) * np.sign(x[lead]))
        states.append(
            StationaryState(SurfaceKind.TORUS, problem.parity, n, problem.m, x, float(beta[i]), problem.shape)
        )
    return states


def torus_state(shape: TorusShape, parity: str, n: int, m: int, basis_size: int = 32) -> StationaryState:
    index = n if parity == "+" else n - 1
    if index < 0 or index >= basis_size:
        raise ValueError(f"no state with n={n} for parity {parity!r} in a basis of {basis_size}")
    return solve_torus_states(SpectralProblem(shape, m, parity, basis_size))[index]


def flat_states(n: int, m: int, parity: str, shape: TorusShape) -> StationaryState:
    """cos(n theta) or sin(n theta) times exp(i m phi) on the flat strip.

    Under ds^2 = a^2 dtheta^2 + R^2 dphi^2 the energy is n^2/(2a^2) + m^2/(2R^2),
    i.e. beta = n^2 + m^2 alpha^2.
    """
    if parity not in PARITIES:
        raise ValueError(f"parity must be '+' or '-', got {parity!r}")
    if n < 0 or (parity == "-" and n == 0):
        raise ValueError(f"invalid flat state n={n} with parity {parity!r}")
    size = n + 1 if parity == "+" else n
    coeffs = np.zeros(size)
    coeffs[-1] = 1.0 / np.sqrt(2.0 * np.pi if n == 0 else np.pi)
    beta = n**2 + (m * shape.alpha) ** 2
    return StationaryState(SurfaceKind.FLAT, parity, n, m, coeffs, beta, shape)


def table1_states(shape: TorusShape | None = None, basis_size: int = 32, use_table_beta: bool = False):
    """The six tabulated states, keyed by (parity, n, m)."""
    shape = shape or TorusShape(1.0, 0.5)
    out = {}
    for key, (beta_table, _) in TABLE1.items():
        parity, n, m = key
        state = torus_state(shape, parity, n, m, basis_size)
        out[key] = state.with_beta(beta_table) if use_table_beta else state
    return out


@dataclass
class Table1Row:
    label: str
    beta: float
    beta_table: float
    beta_dev: float
    ratio_devs: dict
    fitted_devs: dict
    tail_ratio: float

    @property
    def tail_ok(self) -> bool:
        return self.tail_ratio <= 0.1


@dataclass
class Table1Report:
    rows: list

    def max_beta_dev(self) -> float:
        return max(r.beta_dev for r in self.rows)

    def format(self) -> str:
        lines = ["state       beta_solved   beta_table   |dbeta|     max|dratio|  tail/min_listed"]
        for r in self.rows:
            dr = max(abs(v) for v in r.ratio_devs.values()) if r.ratio_devs else 0.0
            lines.append(
                f"{r.label:<10} {r.beta:12.6f} {r.beta_table:12.4f} {r.beta_dev:10.2e} {dr:12.2e} {r.tail_ratio:10.3f}"
            )
        return "\n".join(lines)


def verify_against_table1(states) -> Table1Report:
    """Compare solved states with the tabulated betas and coefficients.

    Coefficient comparisons are convention-free ratios c_k / c_lead, with the
    lead mode being the largest tabulated coefficient, plus absolute
    deviations after scaling the solved vector to the tabulated lead value.
    """
    if isinstance(states, dict):
        states = list(states.values())
    rows = []
    for state in states:
        key = (state.parity, state.n, state.m)
        if key not in TABLE1:
            continue
        beta_table, table = TABLE1[key]
        ours = dict(zip(state.modes.tolist(), state.coeffs))
        lead = max(table, key=lambda k: abs(table[k]))
        ratio_devs = {k: ours[k] / ours[lead] - table[k] / table[lead] for k in table if k != lead}
        scale = table[lead] / ours[lead]
        fitted_devs = {k: ours[k] * scale - table[k] for k in table}
        unlisted = [abs(c) for k, c in ours.items() if k not in table]
        tail = max(unlisted) * abs(scale) / min(abs(v) for v in table.values())
        rows.append(
            Table1Row(state.label, state.beta, beta_table, abs(state.beta - beta_table), ratio_devs, fitted_devs, tail)
        )
    return Table1Report(rows)


def eq5_residual(state: StationaryState, theta) -> np.ndarray:
    """Pointwise residual of the theta equation for a solved torus state."""
    alpha = state.shape.alpha
    G = 1.0 + alpha * np.cos(theta)
    f = state.theta_profile(theta)
    df = state.theta_profile(theta, 1)
    d2f = state.theta_profile(theta, 2)
    return d2f - alpha * np.sin(theta) / G * df - (state.m * alpha) ** 2 / G**2 * f + state.beta * f
