"""Tests for the exact solution families and the separable tower"""

import math

import pytest

from hydrowave.core.errors import DomainError, InvalidParameter
from hydrowave.services.density import density_of_u
from hydrowave.services.exprlang import parse_expr
from hydrowave.services.grid import Rectangle
from hydrowave.services.solutions import (
    family_case1,
    family_case2,
    family_case3,
    family_separable,
    nutku_tower,
    separability_residual,
    trivial_density,
    wave_residual,
    wave_residuals,
)
from hydrowave.services.speedlaw import case1, case2, case3, constant, eval_speed

UNIT = Rectangle(1.0, 2.0, 1.0, 2.0).points(8)


@pytest.mark.parametrize(
    "theta1, theta2",
    [("s^2", "0"), ("sin(s)", "exp(s)"), ("s^3 - 2*s", "cosh(s/3)"), ("ln(s)", "1/(s + 2)")],
)
def test_case2_family_solves_wave_equation(theta1, theta2):
    density = family_case2(1.0, parse_expr(theta1), parse_expr(theta2))
    assert wave_residual(density, case2(1.0), UNIT) < 1e-10


@pytest.mark.parametrize("c0, v0", [(1.0, 1.0), (0.5, 1.0), (-0.5, 2.0)])
def test_case1_family_solves_wave_equation(c0, v0):
    density = family_case1(c0, v0, parse_expr("sin(s)"), parse_expr("s^3 + 1"))
    assert wave_residual(density, case1(c0=c0, v0=v0), UNIT) < 1e-10


@pytest.mark.parametrize("k1", [1.0, 0.7, -2.0])
def test_case3_family_solves_wave_equation(k1):
    density = family_case3(k1, parse_expr("exp(s/2)"), parse_expr("s^2"))
    assert wave_residual(density, case3(k1), UNIT) < 1e-10


GRID = Rectangle(1.0, 2.0, 1.0, 2.0).points(30)

THETA_PAIRS = [
    ("s^3 - 2*s", "s^2 + 1"),
    ("exp(s)", "exp(-s/2)"),
    ("sin(s)", "cos(2*s)"),
    ("s*exp(s)", "sin(s) + s^2"),
    ("3", "-2"),
]


@pytest.mark.parametrize("theta1, theta2", THETA_PAIRS)
@pytest.mark.parametrize(
    "build, speed",
    [
        (lambda t1, t2: family_case1(1.0, 1.0, t1, t2), case1(c0=1.0, v0=1.0)),
        (lambda t1, t2: family_case2(1.0, t1, t2), case2(1.0)),
        (lambda t1, t2: family_case3(2.0, t1, t2), case3(2.0)),
    ],
    ids=["case1", "case2", "case3"],
)
def test_families_on_full_grid(build, speed, theta1, theta2):
    density = build(parse_expr(theta1), parse_expr(theta2))
    assert wave_residual(density, speed, GRID) <= 1e-8


def test_case2_value():
    # v (u + 1/v)^2 = v u^2 + 2u + 1/v
    density = family_case2(1.0, parse_expr("s^2"), parse_expr("0"))
    assert density.value(1.5, 2.0) == pytest.approx(2.0 * 2.25 + 3.0 + 0.5)


def test_wrong_speed_is_detected():
    density = family_case2(1.0, parse_expr("s^2"), parse_expr("0"))
    # f_vv - 4/v^4 f_uu = -6/v^3, normalized 6/5 at v = 1
    assert wave_residual(density, case2(2.0), UNIT) == pytest.approx(1.2)
    residuals = wave_residuals(density, case2(2.0), UNIT)
    assert len(residuals) == len(UNIT)
    assert max(residuals) == pytest.approx(1.2)


def test_case3_is_case2_with_variables_swapped():
    k1 = 1.3
    theta1, theta2 = parse_expr("s^2"), parse_expr("exp(s)")
    swapped = family_case3(k1, theta1, theta2)
    direct = family_case2(1.0 / k1**2, theta1, theta2)
    for u, v in Rectangle(0.5, 3.0, 0.5, 3.0).random_points(100, seed=3):
        speed = eval_speed(case2(1.0 / k1**2), u, v) * eval_speed(case3(k1), v, u)
        assert abs(speed - 1.0) <= 1e-14
        assert swapped.value(v, u) == pytest.approx(direct.value(u, v), rel=1e-12)


def test_trivial_density_solves_every_equation():
    h = trivial_density(1.0, -2.0, 3.0, 4.0)
    assert h.value(2.0, 1.0) == pytest.approx(2.0 - 2.0 + 6.0 + 4.0)
    for speed in (case1(c0=1.0, v0=1.0), case2(2.0), case3(0.5)):
        assert wave_residual(h, speed, UNIT) == 0.0


def test_case1_positivity_region():
    density = family_case1(1.0, 1.0, parse_expr("s"), parse_expr("0"))
    with pytest.raises(InvalidParameter):
        family_case1(0.0, 1.0, parse_expr("s"), parse_expr("0"))
    with pytest.raises(DomainError):
        density.value(-1.0, 1.0)


class TestSeparable:
    def test_closed_form_against_constant_speed(self):
        # G'' = G/16 with G(0) = 0, G'(0) = 1/2 gives G = 2 sinh(v/4)
        density = family_separable(constant(0.0625), 1.0, g0=0.0, dg0=0.5, ref=0.0, c1=1.0, c2=0.0)
        assert density.value(0.0, 2.0) == pytest.approx(2.0 * math.sinh(0.5), rel=1e-8)
        assert density.value(1.0, 2.0) == pytest.approx(math.e * 2.0 * math.sinh(0.5), rel=1e-8)
        assert density.numeric

    @pytest.mark.parametrize("mu", [1.0, -2.0])
    def test_solves_case2_equation(self, mu):
        density = family_separable(case2(1.0), mu, g0=1.0, dg0=0.0, ref=1.0)
        assert wave_residual(density, case2(1.0), UNIT) < 1e-6

    def test_solves_case3_equation(self):
        density = family_separable(case3(1.0), 0.5, g0=1.0, dg0=1.0, ref=1.0)
        assert wave_residual(density, case3(1.0), UNIT) < 1e-6

    def test_rejects_two_variable_speeds(self):
        with pytest.raises(InvalidParameter):
            family_separable(case1(c0=1.0, v0=1.0), 1.0)
        with pytest.raises(InvalidParameter):
            family_separable(case2(1.0), 0.0)


class TestTower:
    def test_flat_weights_give_polynomials(self):
        one = parse_expr("1")
        H1, H2, H3 = nutku_tower(one, one, one, one, 3)
        assert H1.value(1.0, 2.0) == pytest.approx(2.5, rel=1e-8)
        assert H2.value(1.0, 2.0) == pytest.approx(41.0 / 24.0, rel=1e-8)
        assert H3.params["k"] == 3

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_flat_weights_match_closed_form(self, k):
        # F_i = u^(2i)/(2i)!, G_j = v^(2j)/(2j)!
        one = parse_expr("1")
        tower = nutku_tower(one, one, one, one, 5, rtol=1e-13, atol=1e-15)
        for u, v in [(1.0, 2.0), (0.5, 1.5), (2.0, 0.3)]:
            expected = sum(
                u ** (2 * i) * v ** (2 * (k - i)) / (math.factorial(2 * i) * math.factorial(2 * (k - i)))
                for i in range(k + 1)
            )
            assert tower[k - 1].value(u, v) == pytest.approx(expected, rel=1e-9)

    def test_case1_weights_first_member(self):
        alpha, beta = parse_expr("s^2"), parse_expr("(s+1)^2*s^2")
        H1 = nutku_tower(alpha, beta, parse_expr("s"), parse_expr("1"), 1, corner=(1.0, 1.0))[0]
        c = 1.5 - 2.0 * math.log(2.0)
        d = 0.5 - math.log(2.0)

        def G1(v):
            return (
                -math.log(v)
                - math.log(v + 1.0)
                - 2.0 * (v * math.log(v) - v)
                + 2.0 * ((v + 1.0) * math.log(v + 1.0) - (v + 1.0))
                + c * v
                + d
            )

        for u, v in Rectangle(1.0, 2.0, 1.0, 2.0).points(4):
            expected = u * G1(v) + u * math.log(u) - u + 1.0
            assert H1.value(u, v) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_case1_weights_solve_case1_equation(self):
        alpha, beta = parse_expr("s^2"), parse_expr("(s+1)^2*s^2")
        tower = nutku_tower(
            alpha, beta, parse_expr("s"), parse_expr("1"), 5, corner=(1.0, 1.0), rtol=1e-13, atol=1e-15
        )
        points = Rectangle(1.0, 2.0, 1.0, 2.0).points(5)
        for member in tower:
            assert separability_residual(member, alpha, beta, points) <= 1e-6
            assert wave_residual(member, case1(c0=1.0, v0=1.0), points) <= 1e-8

    def test_weight_vanishing_at_corner(self):
        alpha, beta = parse_expr("s^2"), parse_expr("(s+1)^2*s^2")
        with pytest.raises(DomainError):
            nutku_tower(alpha, beta, parse_expr("s"), parse_expr("1"), 2)
        one = parse_expr("1")
        with pytest.raises(DomainError):
            nutku_tower(parse_expr("0"), one, one, one, 2, corner=(1.0, 1.0))

    def test_members_are_separable(self, grid_points):
        alpha, beta = parse_expr("1 + s^2"), parse_expr("exp(s)")
        tower = nutku_tower(alpha, beta, parse_expr("s"), parse_expr("1"), 3, corner=(1.0, 1.0))
        for member in tower:
            assert separability_residual(member, alpha, beta, grid_points) < 1e-5
            for u, v in grid_points:
                jet = member.jet(u, v)
                assert beta(v) * jet.S == pytest.approx(alpha(u) * jet.R, rel=1e-9, abs=1e-12)

    def test_non_separable_density_fails(self, grid_points):
        one = parse_expr("1")
        assert separability_residual(density_of_u(parse_expr("s^4")), one, one, grid_points) > 0.5

    def test_invalid_tower(self):
        one = parse_expr("1")
        with pytest.raises(InvalidParameter):
            nutku_tower(one, one, one, one, 0)
        with pytest.raises(InvalidParameter):
            nutku_tower(one, one, parse_expr("s^2"), one, 2)
