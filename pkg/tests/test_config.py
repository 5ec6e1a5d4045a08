import json
import math
from pathlib import Path

import numpy as np
import pytest

import cylattice
from cylattice import ChungYaoLattice, compile_expression, load_config, parse_config
from cylattice.config import compile_matrix, compile_vector
from cylattice.errors import ConfigError

CONFIG_DIR = Path(cylattice.__file__).parent / "configs"


def test_expression_basics():
    assert compile_expression("1+2*3")(0.0) == pytest.approx(7.0)
    assert compile_expression("(1+2)*3")(0.0) == pytest.approx(9.0)
    assert compile_expression("t^2")(0.5) == pytest.approx(0.25)
    assert compile_expression("2*t - 1/t")(0.5) == pytest.approx(1.0 - 2.0)
    assert compile_expression("exp(t)")(1.0) == pytest.approx(math.e)
    assert compile_expression(3)(0.1) == pytest.approx(3.0)


def test_expression_unary_minus_binds_below_power():
    assert compile_expression("-t^2")(0.5) == pytest.approx(-0.25)
    assert compile_expression("(-t)^2")(0.5) == pytest.approx(0.25)


def test_expression_power_right_associative():
    assert compile_expression("2^3^2")(0.0) == pytest.approx(512.0)


def test_expression_rejects_garbage():
    for bad in ("t +", "2 **", "foo(t)", "t $ 2", "sin(t)", "(t"):
        with pytest.raises(ConfigError):
            compile_expression(bad)


def test_matrix_and_vector_compilation():
    mat = compile_matrix([["t^2", "0"], ["0", "-(t^2)*(1+t)"]])(0.5)
    assert mat == pytest.approx(np.array([[0.25, 0.0], [0.0, -0.375]]))
    vec = compile_vector(["t", "2*t"])(0.25)
    assert vec == pytest.approx(np.array([0.25, 0.5]))
    with pytest.raises(ConfigError):
        compile_matrix([["t", "t"], ["t"]])


def test_parse_config_validation_errors():
    with pytest.raises(ConfigError):
        parse_config({"family": {"type": "hyperplanes", "items": []}})  # no dimension
    with pytest.raises(ConfigError):
        parse_config({"dimension": 2, "family": {"type": "mystery"}})
    with pytest.raises(ConfigError):
        parse_config({"dimension": 2,
                      "family": {"type": "hyperplanes", "items": [
                          {"normal": [1, 0], "offset": 0}]}})  # too few planes
    with pytest.raises(ConfigError):
        parse_config({
            "dimension": 2,
            "family": {"type": "hyperplanes", "items": [
                {"normal": [1, 0], "offset": 0},
                {"normal": [0, 1], "offset": 0}]},
            "function": {"name": "not_a_function"},
        })


def test_s_range_parsing():
    base_family = {"type": "hyperplanes", "items": [
        {"normal": [1, 0], "offset": 0},
        {"normal": [0, 1], "offset": 0}]}
    cfg = parse_config({"dimension": 2, "family": base_family,
                        "s": {"min": 2, "max": 256, "spacing": "geometric"}})
    assert cfg.s_values == (2, 4, 8, 16, 32, 64, 128, 256)
    cfg = parse_config({"dimension": 2, "family": base_family,
                        "s": {"values": [3, 9, 27]}})
    assert cfg.s_values == (3, 9, 27)
    cfg = parse_config({"dimension": 2, "family": base_family,
                        "s": {"min": 1, "max": 5, "spacing": "linear", "step": 2}})
    assert cfg.s_values == (1, 3, 5)
    with pytest.raises(ConfigError):
        parse_config({"dimension": 2, "family": base_family,
                      "s": {"min": 5, "max": 2}})


def test_bundled_configs_load_and_build():
    cfg = load_config(CONFIG_DIR / "unit_triangle.json")
    lattice = ChungYaoLattice(cfg.family())
    assert len(lattice.vertices) == 3

    cfg = load_config(CONFIG_DIR / "affine_triangle.json")
    seq = cfg.sequence()
    lattice = ChungYaoLattice(seq.family(4))
    t = 0.25
    u = 1 + t
    expected = sorted(map(tuple, np.round(
        [[t, t], [t * t + t, t], [t, -t * t * u + t]], 12)))
    got = sorted(map(tuple, np.round(lattice.vertex_array(), 12)))
    assert np.allclose(got, expected)


def test_points2d_sequence_matches_direct_construction():
    cfg = load_config(CONFIG_DIR / "degenerate_eps1.json")
    seq = cfg.sequence()
    from cylattice import degenerate_triangle_points, triangle_family_from_points
    for s in (2, 10):
        direct = triangle_family_from_points(degenerate_triangle_points(1.0 / s, 1.0))
        via_config = seq.family(s)
        assert np.allclose(
            sorted(map(tuple, ChungYaoLattice(direct).vertex_array().round(12))),
            sorted(map(tuple, ChungYaoLattice(via_config).vertex_array().round(12))))


def test_random_family_config_is_reproducible():
    cfg = load_config(CONFIG_DIR / "random_n3_d4.json")
    f1 = cfg.family()
    f2 = load_config(CONFIG_DIR / "random_n3_d4.json").family()
    assert np.allclose(f1.normal_matrix(), f2.normal_matrix())
    assert f1.count == 4 and f1.dimension == 3


def test_load_config_errors(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError):
        load_config(missing)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
