"""Tests for speed laws, characteristic coordinates and constraint data"""

import pytest

from hydrowave.core.errors import DomainError, InvalidParameter, SingularPoint
from hydrowave.services.exprlang import parse_expr
from hydrowave.services.solutions import family_case1, family_case2
from hydrowave.services.speedlaw import (
    SpeedKind,
    case1,
    case2,
    case3,
    constant,
    constraint_residuals,
    custom_v,
    dalembert_constraint,
    derive_constraint,
    eval_eta_sigma,
    eval_speed,
    general_abc,
    sample_grid,
    semilinear_residual,
    solve_eta_general,
)

SAMPLE = sample_grid((1.0, 2.0), (1.0, 2.0), 5)


def test_case_speeds():
    assert eval_speed(case1(c0=1.0, v0=1.0), 1.0, 1.0) == pytest.approx(0.25)
    assert eval_speed(case2(2.0), 5.0, 2.0) == pytest.approx(0.25)
    assert eval_speed(case3(2.0), 0.5, 9.0) == pytest.approx(1.0)


def test_case1_accepts_v1():
    s = case1(v0=1.0, v1=0.5)
    assert s.c0 == pytest.approx(0.5)
    assert s.v1 == pytest.approx(0.5)
    assert s.kind == SpeedKind.CASE1


@pytest.mark.parametrize(
    "build",
    [
        lambda: case1(c0=0.0, v0=1.0),
        lambda: case1(v0=1.0, v1=1.0),
        lambda: case1(v0=1.0),
        lambda: case1(c0=1.0, v0=1.0, v1=3.0),
        lambda: case2(0.0),
        lambda: case3(0.0),
        lambda: constant(-1.0),
    ],
)
def test_invalid_parameters(build):
    with pytest.raises(InvalidParameter):
        build()


def test_singular_manifolds():
    with pytest.raises(SingularPoint):
        eval_speed(case1(c0=1.0, v0=1.0), 1.0, -1.0)
    with pytest.raises(SingularPoint):
        eval_speed(case1(c0=1.0, v0=1.0), 1.0, 0.0)
    with pytest.raises(SingularPoint):
        eval_speed(case1(c0=1.0, v0=1.0), 0.0, 1.0)
    with pytest.raises(SingularPoint):
        eval_speed(case2(1.0), 1.0, 0.0)
    with pytest.raises(SingularPoint):
        eval_speed(case3(1.0), 0.0, 1.0)


def test_custom_speeds():
    s = custom_v(parse_expr("1/s^4"))
    assert eval_speed(s, 3.0, 2.0) == pytest.approx(eval_speed(case2(1.0), 3.0, 2.0))
    with pytest.raises(DomainError):
        eval_speed(custom_v(parse_expr("-1")), 1.0, 1.0)


def test_swapped_case_speeds_are_reciprocal():
    k1 = 1.7
    for u, v in [(1.0, 2.0), (0.3, 1.1)]:
        assert eval_speed(case2(1.0 / k1**2), u, v) * eval_speed(case3(k1), v, u) == pytest.approx(1.0)


def test_characteristic_coordinates():
    assert eval_eta_sigma(case2(2.0), 1.0, 4.0) == pytest.approx((1.5, 0.5))
    assert eval_eta_sigma(case1(c0=1.0, v0=1.0), 2.0, 1.0) == pytest.approx((4.0, 1.0))
    assert eval_eta_sigma(case3(1.0), 0.5, 1.0) == pytest.approx((3.0, -1.0))
    with pytest.raises(InvalidParameter):
        eval_eta_sigma(general_abc(parse_expr("1"), parse_expr("1")), 1.0, 1.0)


def test_general_label_and_case1_identity():
    A = B = parse_expr("1/sqrt(s)")
    assert solve_eta_general(A, B, 1.0, 1.0) == pytest.approx(2.0 / 3.0, rel=1e-12)
    # the same speed as case1(c0=1/2, v0=1): labels differ by the factor v1/v0
    eta_case1, _ = eval_eta_sigma(case1(c0=0.5, v0=1.0), 1.0, 1.0)
    assert eta_case1 * 0.5 / 1.0 == pytest.approx(2.0 / 3.0)
    assert solve_eta_general(A, B, 1.7, 0.0) == 1.7


@pytest.mark.parametrize("u, v", [(1.0, 1.0), (1.5, 1.3), (2.0, 0.4)])
def test_general_speed_matches_case1(u, v):
    general = general_abc(parse_expr("1/sqrt(s)"), parse_expr("1/sqrt(s)"))
    assert eval_speed(general, u, v) == pytest.approx(eval_speed(case1(c0=0.5, v0=1.0), u, v), rel=1e-9)


@pytest.mark.parametrize(
    "speed",
    [
        case1(c0=1.0, v0=1.0),
        case1(c0=-0.5, v0=2.0),
        case2(1.0),
        case2(-3.0),
        case3(0.8),
        general_abc(parse_expr("1/sqrt(s)"), parse_expr("1/sqrt(s)")),
    ],
)
def test_derived_constraints_are_compatible(speed):
    r1, r2, r3 = constraint_residuals(speed, derive_constraint(speed), SAMPLE)
    assert r1 < 1e-8
    assert r2 < 1e-7
    assert r3 < 1e-7


def test_constraint_with_free_function():
    speed = case2(1.0)
    r1, r2, r3 = constraint_residuals(speed, derive_constraint(speed, parse_expr("sin(s)")), SAMPLE)
    assert max(r1, r2, r3) < 1e-7


def test_perturbed_constraint_fails():
    speed = case2(1.0)
    _, r2, _ = constraint_residuals(speed, derive_constraint(speed).perturbed(0.1), SAMPLE)
    assert r2 == pytest.approx(0.2, rel=1e-6)


def test_custom_speed_constraint_rejects_free_function():
    with pytest.raises(InvalidParameter):
        derive_constraint(custom_v(parse_expr("1/s^4")), parse_expr("s"))


def test_dalembert_constraint():
    r1, r2, r3 = constraint_residuals(constant(4.0), dalembert_constraint(2.0), SAMPLE)
    assert (r1, r2, r3) == pytest.approx((0.0, 0.0, 0.0), abs=1e-9)


def test_semilinear_constraint_carries_theta1():
    speed = case2(1.0)
    points = [(u, v) for u, v, _ in SAMPLE]
    density = family_case2(1.0, parse_expr("s^2"), parse_expr("exp(s)"))
    matched = derive_constraint(speed, parse_expr("-4*s"))
    assert semilinear_residual(speed, matched, density, points) < 1e-10
    assert semilinear_residual(speed, derive_constraint(speed), density, points) > 0.1


def test_semilinear_constraint_case1_theta2_only():
    speed = case1(c0=1.0, v0=1.0)
    points = [(u, v) for u, v, _ in SAMPLE]
    density = family_case1(1.0, 1.0, parse_expr("0"), parse_expr("s^3 + 1"))
    assert semilinear_residual(speed, derive_constraint(speed), density, points) < 1e-10


def test_sample_grid_shape():
    assert len(sample_grid((0.0, 1.0), (0.0, 1.0), 4)) == 4 * 4 * 3
