"""Tests for spec-string parsing"""

import numpy as np
import pytest

from hydrowave.core.errors import ExpressionSyntaxError, InvalidParameter, UnknownName
from hydrowave.services.specs import (
    parse_axis,
    parse_catalog_spec,
    parse_density_spec,
    parse_domain,
    parse_init_spec,
    parse_pair,
    parse_pressure_spec,
    parse_speed_spec,
    split_top_level,
)
from hydrowave.services.speedlaw import SpeedKind, eval_speed


def test_split_respects_parentheses():
    assert split_top_level("A=1/sqrt(s),B=f(s, 2),C=0") == ["A=1/sqrt(s)", "B=f(s, 2)", "C=0"]
    assert split_top_level("") == []


class TestDensitySpecs:
    def test_case2_family(self):
        density = parse_density_spec("case2:k0=1,theta1=s^2")
        assert density.value(1.0, 1.0) == pytest.approx(4.0)
        assert density.describe()["theta2"] == "0"

    def test_catalog(self):
        assert parse_catalog_spec("catalog:t2,k0=2") == ("t2", {"k0": 2.0})
        assert parse_density_spec("catalog:t2,k0=1").value(1.0, 1.0) == pytest.approx(2.0 / 3.0)

    def test_single_variable_and_trivial(self):
        assert parse_density_spec("u:s^4").value(2.0, 7.0) == pytest.approx(16.0)
        assert parse_density_spec("v:exp(s)").value(7.0, 0.0) == pytest.approx(1.0)
        assert parse_density_spec("trivial:c3=1").value(2.0, 3.0) == pytest.approx(6.0)

    def test_separable(self):
        density = parse_density_spec("separable:case=const,a2=0.0625,mu=1,g0=0,dg0=0.5,ref=0")
        assert density.value(0.0, 2.0) == pytest.approx(2.0 * np.sinh(0.5), rel=1e-8)

    def test_errors(self):
        with pytest.raises(UnknownName):
            parse_density_spec("case9:k0=1")
        with pytest.raises(InvalidParameter):
            parse_density_spec("case2:k0=1,k1=2")
        with pytest.raises(InvalidParameter):
            parse_density_spec("case2:k0=one")
        with pytest.raises(InvalidParameter):
            parse_density_spec("case2")
        with pytest.raises(ExpressionSyntaxError):
            parse_density_spec("case2:k0=1,theta1=s^")
        with pytest.raises(UnknownName):
            parse_density_spec("separable:case=7,mu=1")


class TestSpeedSpecs:
    def test_cases(self):
        assert parse_speed_spec("case1:v0=1,v1=0.5").c0 == pytest.approx(0.5)
        assert parse_speed_spec("case2:k0=2").k0 == 2.0
        assert parse_speed_spec("case3:k1=0.5").kind == SpeedKind.CASE3

    def test_general_and_custom(self):
        general = parse_speed_spec("general:A=1/sqrt(s),B=1/sqrt(s)")
        assert general.kind == SpeedKind.GENERAL
        assert str(general.C) == "0"
        assert eval_speed(parse_speed_spec("custom-v:1/s^4"), 5.0, 2.0) == pytest.approx(1.0 / 16.0)

    def test_errors(self):
        with pytest.raises(InvalidParameter):
            parse_speed_spec("general:A=1")
        with pytest.raises(UnknownName):
            parse_speed_spec("case4:k=1")


def test_pressure_specs():
    assert parse_pressure_spec("vonkarman:k0=2").pressure(1.0) == pytest.approx(-4.0)
    case2 = parse_pressure_spec("case2:k0=1,p0=1")
    assert case2.pressure(1.0) == pytest.approx(1.0 / 3.0 + 1.0)
    assert case2.sound_speed2(2.0) == pytest.approx(1.0 / 16.0)
    assert parse_pressure_spec("expr:-1/s").dp(2.0) == pytest.approx(0.25)
    with pytest.raises(UnknownName):
        parse_pressure_spec("tait:k0=1")


def test_domain():
    rect = parse_domain("u=1:2,v=0.5:3")
    assert (rect.u_lo, rect.u_hi, rect.v_lo, rect.v_hi) == (1.0, 2.0, 0.5, 3.0)
    for text in ("u=2:1,v=0:1", "u=1:2", "u=1:2,v=0:1,w=0:1", "u=a:2,v=0:1", "u=1,v=0:1"):
        with pytest.raises(InvalidParameter):
            parse_domain(text)


def test_axis_and_pair():
    np.testing.assert_allclose(parse_axis("0:1:5"), [0.0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_allclose(parse_axis("2.5"), [2.5])
    assert parse_pair("1.5,-2") == (1.5, -2.0)
    for bad in ("0:1", "0:1:x", "0:1:0"):
        with pytest.raises(InvalidParameter):
            parse_axis(bad)
    with pytest.raises(InvalidParameter):
        parse_pair("1,2,3")


def test_init_spec():
    field = parse_init_spec("sine:u0=0.5,v0=1.5,amp=0.1,x1=2", 8)
    assert field.n == 8
    assert field.h == pytest.approx(0.25)
    assert field.u[0] == pytest.approx(0.5)
    assert field.v[0] == pytest.approx(1.6)
    assert field.u[2] == pytest.approx(0.6)
    with pytest.raises(UnknownName):
        parse_init_spec("square:amp=1", 8)
    with pytest.raises(InvalidParameter):
        parse_init_spec("sine:x0=1,x1=1", 8)


def test_constant_init_spec():
    field = parse_init_spec("constant:u0=0.3,v0=1.2,x0=-1,x1=1", 10)
    assert field.n == 10
    assert field.h == pytest.approx(0.2)
    assert field.x0 == -1.0
    np.testing.assert_array_equal(field.u, 0.3)
    np.testing.assert_array_equal(field.v, 1.2)
    with pytest.raises(InvalidParameter):
        parse_init_spec("constant:u0=0.3,amp=0.1", 10)
