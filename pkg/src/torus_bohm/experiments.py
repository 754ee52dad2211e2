"""Turn an ExperimentSpec into superpositions on the torus or the flat strip."""

from __future__ import annotations

from .config import ConfigError, ExperimentSpec
from .geometry import TorusShape
from .reference_values import TABLE1, TABLE1_SHAPE
from .spectral import SpectralProblem, flat_states, solve_torus_states
from .wavefield import Superposition


def spec_shape(spec: ExperimentSpec) -> TorusShape:
    try:
        return TorusShape(spec.R, spec.a)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


class StateCache:
    """Solves each (m, parity) pencil once per shape and basis size."""

    def __init__(self, shape: TorusShape, basis_size: int, use_table_beta: bool = False):
        self.shape = shape
        self.basis_size = basis_size
        self.use_table_beta = use_table_beta
        self._solved = {}

    def torus(self, parity: str, n: int, m: int):
        key = (parity, m)
        if key not in self._solved:
            self._solved[key] = solve_torus_states(SpectralProblem(self.shape, m, parity, self.basis_size))
        index = n if parity == "+" else n - 1
        states = self._solved[key]
        if not 0 <= index < len(states):
            raise ConfigError(f"no torus state with parity {parity!r}, n={n} in a basis of {self.basis_size}")
        state = states[index]
        table_shape = self.shape == TorusShape(**TABLE1_SHAPE)
        if self.use_table_beta and table_shape and (parity, n, m) in TABLE1:
            state = state.with_beta(TABLE1[(parity, n, m)][0])
        return state

    def flat(self, parity: str, n: int, m: int):
        try:
            return flat_states(n, m, parity, self.shape)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def build_superposition(spec: ExperimentSpec, kind: str, cache: StateCache | None = None) -> Superposition:
    if not spec.terms:
        raise ConfigError("the superposition needs at least one term")
    cache = cache or StateCache(spec_shape(spec), spec.basis_size, spec.use_table_beta)
    make = cache.torus if kind == "torus" else cache.flat
    terms = [(make(t.parity, t.n, t.m), t.weight) for t in spec.terms]
    try:
        if spec.renormalize:
            return Superposition.normalized(terms)
        return Superposition(tuple(terms))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
