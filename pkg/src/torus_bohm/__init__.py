"""Bohmian trajectories, monodromy and Lyapunov exponents on the torus surface."""

__version__ = "0.1.0"
