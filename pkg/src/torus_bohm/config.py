"""Experiment definitions: YAML files with nested sections.

Numeric fields accept either numbers or short arithmetic expressions such as
``"sqrt(2/3)"``, ``"1j*sqrt(1/3)"`` or ``"1.424*pi"``. Example::

    name: fig1
    kind: both                # torus | flat | both
    shape: {R: 1.0, a: 0.5}
    spectral: {basis_size: 32, use_table_beta: false}
    superposition:
      renormalize: false
      terms:
        - {parity: "+", n: 3, m: 2, weight: "sqrt(2/3)"}
        - {parity: "-", n: 3, m: 2, weight: "1j*sqrt(1/3)"}
    initial: {theta0: [0], phi0: 0}
    integration: {t_end: 30, rel_tol: 1.0e-10, abs_tol: 1.0e-10, sample_dt: 0.01}
    lyapunov: {checkpoints: [9, 10], reference_table: null}
    states: {alpha_override: null, convergence_bases: [8, 16, 32]}
    output: {dir: out/fig1}
"""

from __future__ import annotations

import ast
import cmath
import hashlib
import math
import operator
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import yaml

KINDS = ("torus", "flat", "both")


class ConfigError(ValueError):
    pass


_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_NAMES = {"pi": math.pi, "i": 1j, "j": 1j, "e": math.e}
_FUNCS = {"sqrt": cmath.sqrt, "cos": cmath.cos, "sin": cmath.sin, "exp": cmath.exp}


def evaluate(expr) -> complex:
    """Evaluate a number or a small arithmetic expression."""
    if isinstance(expr, bool):
        raise ConfigError(f"expected a number, got {expr!r}")
    if isinstance(expr, (int, float, complex)):
        return complex(expr)
    if not isinstance(expr, str):
        raise ConfigError(f"expected a number or expression, got {expr!r}")
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {expr!r}") from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)):
            return complex(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return complex(_NAMES[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            value = walk(node.operand)
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return _FUNCS[node.func.id](walk(node.args[0]))
        raise ConfigError(f"unsupported element in expression {expr!r}")

    try:
        return walk(tree)
    except (ZeroDivisionError, OverflowError) as exc:
        raise ConfigError(f"cannot evaluate {expr!r}: {exc}") from exc


def evaluate_real(expr) -> float:
    value = evaluate(expr)
    if value.imag != 0.0:
        raise ConfigError(f"expected a real value, got {expr!r}")
    return value.real


def format_complex(z: complex) -> str:
    # adding 0.0 drops signed zeros, which do not survive re-evaluation
    return f"{float(z.real) + 0.0!r}{float(z.imag) + 0.0:+}j"


@dataclass(frozen=True)
class TermSpec:
    parity: str
    n: int
    m: int
    weight: complex


@dataclass(frozen=True)
class ExperimentSpec:
    name: str = "run"
    kind: str = "torus"
    R: float = 1.0
    a: float = 0.5
    basis_size: int = 32
    use_table_beta: bool = False
    terms: tuple = ()
    renormalize: bool = False
    theta0: tuple = (0.0,)
    phi0: float = 0.0
    t_end: float = 10.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    sample_dt: float = 0.01
    checkpoints: tuple = (9.0, 10.0)
    reference_table: str | None = None
    alpha_override: float | None = None
    convergence_bases: tuple = (8, 16, 32)
    out_dir: str | None = None

    def kinds(self) -> list[str]:
        return ["torus", "flat"] if self.kind == "both" else [self.kind]

    def output_dir(self) -> Path:
        return Path(self.out_dir or Path("out") / self.name)

    def with_tolerance(self, tol: float) -> "ExperimentSpec":
        return replace(self, rel_tol=tol, abs_tol=tol)


def _section(data: dict, key: str) -> dict:
    value = data.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    return value


def parse(data: dict) -> ExperimentSpec:
    """Build a spec from a parsed YAML mapping, filling defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    known = {"name", "kind", "shape", "spectral", "superposition", "initial", "integration", "lyapunov",
             "states", "output"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    d = ExperimentSpec()
    shape = _section(data, "shape")
    spectral = _section(data, "spectral")
    sup = _section(data, "superposition")
    initial = _section(data, "initial")
    integ = _section(data, "integration")
    lyap = _section(data, "lyapunov")
    states = _section(data, "states")
    output = _section(data, "output")

    kind = str(data.get("kind", d.kind))
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")

    terms = []
    for raw in sup.get("terms") or []:
        try:
            parity = str(raw["parity"])
            n, m = int(raw["n"]), int(raw["m"])
            weight = evaluate(raw["weight"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad superposition term {raw!r}: needs parity, n, m, weight") from exc
        if parity not in ("+", "-"):
            raise ConfigError(f"parity must be '+' or '-', got {parity!r}")
        terms.append(TermSpec(parity, n, m, weight))

    theta0 = initial.get("theta0", list(d.theta0))
    if not isinstance(theta0, list):
        theta0 = [theta0]
    alpha_override = states.get("alpha_override")

    reference = lyap.get("reference_table", d.reference_table)
    if reference is not None and reference not in ("table2", "table3"):
        raise ConfigError(f"reference_table must be table2, table3 or null, got {reference!r}")

    try:
        spec = ExperimentSpec(
            name=str(data.get("name", d.name)),
            kind=kind,
            R=evaluate_real(shape.get("R", d.R)),
            a=evaluate_real(shape.get("a", d.a)),
            basis_size=int(spectral.get("basis_size", d.basis_size)),
            use_table_beta=bool(spectral.get("use_table_beta", d.use_table_beta)),
            terms=tuple(terms),
            renormalize=bool(sup.get("renormalize", d.renormalize)),
            theta0=tuple(evaluate_real(x) for x in theta0),
            phi0=evaluate_real(initial.get("phi0", d.phi0)),
            t_end=evaluate_real(integ.get("t_end", d.t_end)),
            rel_tol=evaluate_real(integ.get("rel_tol", d.rel_tol)),
            abs_tol=evaluate_real(integ.get("abs_tol", d.abs_tol)),
            sample_dt=evaluate_real(integ.get("sample_dt", d.sample_dt)),
            checkpoints=tuple(evaluate_real(x) for x in lyap.get("checkpoints", list(d.checkpoints))),
            reference_table=reference,
            alpha_override=None if alpha_override is None else evaluate_real(alpha_override),
            convergence_bases=tuple(int(x) for x in states.get("convergence_bases", list(d.convergence_bases))),
            out_dir=output.get("dir", d.out_dir),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if len(spec.checkpoints) != 2 or not 0 < spec.checkpoints[0] < spec.checkpoints[1]:
        raise ConfigError(f"checkpoints must be two increasing positive times, got {spec.checkpoints}")
    return spec


def to_dict(spec: ExperimentSpec) -> dict:
    return {
        "name": spec.name,
        "kind": spec.kind,
        "shape": {"R": spec.R, "a": spec.a},
        "spectral": {"basis_size": spec.basis_size, "use_table_beta": spec.use_table_beta},
        "superposition": {
            "renormalize": spec.renormalize,
            "terms": [
                {"parity": t.parity, "n": t.n, "m": t.m, "weight": format_complex(t.weight)} for t in spec.terms
            ],
        },
        "initial": {"theta0": list(spec.theta0), "phi0": spec.phi0},
        "integration": {
            "t_end": spec.t_end,
            "rel_tol": spec.rel_tol,
            "abs_tol": spec.abs_tol,
            "sample_dt": spec.sample_dt,
        },
        "lyapunov": {"checkpoints": list(spec.checkpoints), "reference_table": spec.reference_table},
        "states": {"alpha_override": spec.alpha_override, "convergence_bases": list(spec.convergence_bases)},
        "output": {"dir": spec.out_dir},
    }


def serialize(spec: ExperimentSpec) -> str:
    return yaml.safe_dump(to_dict(spec), sort_keys=False, default_flow_style=None)


def config_hash(spec: ExperimentSpec) -> str:
    """Hash of the run definition; the output directory does not take part."""
    return hashlib.sha256(serialize(replace(spec, out_dir=None)).encode()).hexdigest()


def loads(text: str) -> ExperimentSpec:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return parse(data or {})


def load(path) -> ExperimentSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def preset_names() -> list[str]:
    files = resources.files("torus_bohm") / "presets"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".yaml"))


def load_preset(name: str) -> ExperimentSpec:
    path = resources.files("torus_bohm") / "presets" / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return loads(path.read_text())
