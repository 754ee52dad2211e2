"""Surface metrics for the embedded torus and its flat periodic analog.

Coordinates are (theta, phi): theta runs around the minor circle, phi around
the symmetry axis. The embedding is

    r(theta, phi) = (R + a cos theta) e_rho(phi) + a sin theta e_z

so that ds^2 = a^2 dtheta^2 + (R + a cos theta)^2 dphi^2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class SurfaceKind(str, enum.Enum):
    TORUS = "torus"
    FLAT = "flat"


@dataclass(frozen=True)
class TorusShape:
    """Major radius ``R`` and minor radius ``a``; ``alpha = a / R`` is derived."""

    R: float = 1.0
    a: float = 0.5

    def __post_init__(self):
        if not (self.R > 0 and self.a > 0):
            raise ValueError(f"radii must be positive, got R={self.R}, a={self.a}")
        if not self.a < self.R:
            raise ValueError(f"need a < R so that 1 + alpha cos(theta) > 0, got R={self.R}, a={self.a}")

    @property
    def alpha(self) -> float:
        return self.a / self.R

    @classmethod
    def from_alpha(cls, alpha: float, R: float = 1.0) -> "TorusShape":
        return cls(R=R, a=alpha * R)


def scale_factor_G(shape: TorusShape, theta):
    """G(theta) = 1 + alpha cos(theta)."""
    return 1.0 + shape.alpha * np.cos(theta)


def metric_diag(shape: TorusShape, kind: SurfaceKind, theta):
    """Diagonal metric components (g_theta_theta, g_phi_phi) at ``theta``.

    The flat strip uses ds^2 = a^2 dtheta^2 + R^2 dphi^2: same coordinate
    periods and length scales as the torus, with zero curvature.
    """
    theta = np.asarray(theta, dtype=float)
    g_tt = np.full_like(theta, shape.a**2)
    if SurfaceKind(kind) is SurfaceKind.TORUS:
        g_pp = (shape.R + shape.a * np.cos(theta)) ** 2
    else:
        g_pp = np.full_like(theta, shape.R**2)
    if g_tt.ndim == 0:
        return float(g_tt), float(g_pp)
    return g_tt, g_pp


def curvatures(shape: TorusShape, theta, kind: SurfaceKind = SurfaceKind.TORUS):
    """Gaussian curvature K and mean curvature H at ``theta``.

    Mean curvature is signed with the normal pointing toward the tube axis,
    which makes H positive everywhere on the torus.
    """
    if SurfaceKind(kind) is SurfaceKind.FLAT:
        zero = np.zeros_like(np.asarray(theta, dtype=float))
        return (float(zero), float(zero)) if zero.ndim == 0 else (zero, zero.copy())
    R, a = shape.R, shape.a
    c = np.cos(theta)
    K = c / (a * (R + a * c))
    H = (R + 2.0 * a * c) / (2.0 * a * (R + a * c))
    return K, H


def embed(shape: TorusShape, theta, phi):
    """Cartesian coordinates of the torus point (theta, phi), stacked on the last axis."""
    rho = shape.R + shape.a * np.cos(theta)
    return np.stack(
        np.broadcast_arrays(rho * np.cos(phi), rho * np.sin(phi), shape.a * np.sin(theta)),
        axis=-1,
    )


def reduce_angle(x):
    """Map angles onto [0, 2 pi)."""
    y = np.mod(x, 2.0 * np.pi)
    # np.mod can round up to exactly 2 pi for tiny negative inputs
    return np.where(y >= 2.0 * np.pi, 0.0, y)
