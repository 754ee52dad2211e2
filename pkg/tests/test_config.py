import math

import pytest
import yaml
from hypothesis import given, settings, strategies as st

from torus_bohm import config
from torus_bohm.config import ConfigError, ExperimentSpec, TermSpec


def test_presets_present():
    names = config.preset_names()
    for name in ["states", "table2", "table3"] + [f"fig{i}" for i in range(1, 8)]:
        assert name in names


@pytest.mark.parametrize("name", config.preset_names())
def test_preset_round_trip(name):
    spec = config.load_preset(name)
    text = config.serialize(spec)
    again = config.loads(text)
    assert again == spec
    assert config.serialize(again) == text


def test_caption_weights():
    spec = config.load_preset("fig1")
    assert spec.kind == "both" and spec.t_end == 30.0 and spec.theta0 == (0.0,)
    assert spec.terms[0] == TermSpec("+", 3, 2, complex(math.sqrt(2 / 3)))
    assert spec.terms[1].weight == pytest.approx(1j * math.sqrt(1 / 3))
    fig5 = config.load_preset("fig5")
    assert fig5.theta0 == pytest.approx((1.424 * math.pi, 1.429 * math.pi))
    assert sum(abs(t.weight) ** 2 for t in fig5.terms) == pytest.approx(1.0, abs=1e-15)
    fig3 = config.load_preset("fig3")
    assert fig3.renormalize
    assert sum(abs(t.weight) ** 2 for t in fig3.terms) == pytest.approx(11.8 / 12)
    t2 = config.load_preset("table2")
    assert len(t2.theta0) == 12 and t2.theta0[5] == pytest.approx(5 * math.pi / 6)
    assert t2.checkpoints == (9.0, 10.0) and t2.reference_table == "table2"


def test_defaults():
    spec = config.loads("superposition: {terms: [{parity: '+', n: 1, m: 0, weight: 1}]}")
    d = ExperimentSpec()
    assert spec.R == d.R and spec.t_end == d.t_end and spec.basis_size == 32
    assert spec.output_dir().as_posix() == "out/run"


@pytest.mark.parametrize(
    "expr,value",
    [("sqrt(2/3)", math.sqrt(2 / 3)), ("1j*sqrt(1/3)", 1j * math.sqrt(1 / 3)), ("1.424*pi", 1.424 * math.pi),
     ("-i*2", -2j), (0.5, 0.5), ("2**3", 8), ("exp(0)", 1)],
)
def test_evaluate(expr, value):
    assert config.evaluate(expr) == pytest.approx(value)


@pytest.mark.parametrize("expr", ["__import__('os')", "foo", "1/0", "sqrt(1, 2)", "[1]", True, None, "1 +"])
def test_evaluate_rejects(expr):
    with pytest.raises(ConfigError):
        config.evaluate(expr)


@pytest.mark.parametrize(
    "text",
    [
        "kind: sphere",
        "bogus: 1",
        "shape: [1, 2]",
        "superposition: {terms: [{parity: '+', n: 1}]}",
        "superposition: {terms: [{parity: 'x', n: 1, m: 0, weight: 1}]}",
        "lyapunov: {checkpoints: [10, 9]}",
        "lyapunov: {reference_table: table9}",
        "shape: {R: 1j}",
        "[unclosed",
        "initial: {theta0: [abc]}",
    ],
)
def test_bad_configs(text):
    with pytest.raises(ConfigError):
        config.loads(text)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        config.load(tmp_path / "nope.yaml")


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        config.load_preset("fig99")


def test_hash_ignores_output_dir():
    spec = config.load_preset("fig1")
    from dataclasses import replace

    assert config.config_hash(spec) == config.config_hash(replace(spec, out_dir="elsewhere"))
    assert config.config_hash(spec) != config.config_hash(spec.with_tolerance(1e-12))


weights = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
terms = st.lists(
    st.builds(TermSpec, st.sampled_from(["+", "-"]), st.integers(1, 5), st.integers(0, 4), weights),
    min_size=1,
    max_size=4,
)


@settings(max_examples=50, deadline=None)
@given(
    terms,
    st.lists(st.floats(0, 6.3, allow_nan=False), min_size=0, max_size=5),
    st.floats(1e-14, 1e-3),
    st.sampled_from(["torus", "flat", "both"]),
)
def test_round_trip_property(terms, theta0, tol, kind):
    spec = ExperimentSpec(kind=kind, terms=tuple(terms), theta0=tuple(theta0), rel_tol=tol, abs_tol=tol)
    text = config.serialize(spec)
    assert config.loads(text) == spec
    assert config.serialize(config.loads(text)) == text
    assert isinstance(yaml.safe_load(text), dict)


@pytest.mark.parametrize("weight", [complex(-0.0, 0.0), complex(1.0, -0.0), complex(-0.0, -0.0)])
def test_signed_zero_weights_are_a_fixed_point(weight):
    text = config.serialize(ExperimentSpec(terms=(TermSpec("+", 1, 0, weight),)))
    assert config.serialize(config.loads(text)) == text
