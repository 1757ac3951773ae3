"""Tests for finite-difference evolution and its agreement with hodograph solutions"""

import numpy as np
import pytest

from hydrowave.core.errors import HyperbolicityLoss, InvalidParameter, MaskedCells
from hydrowave.services.calculus import convergence_order
from hydrowave.services.catalog import catalog
from hydrowave.services.density import density_of_u, density_of_v
from hydrowave.services.evolve import evolve, functional_monitor, step_lax_friedrichs, step_lax_wendroff
from hydrowave.services.exprlang import parse_expr
from hydrowave.services.field import StateField
from hydrowave.services.grid import Rectangle
from hydrowave.services.hodograph import HodographMap, solve_field
from hydrowave.services.pressure import case2_pressure, expression_pressure
from hydrowave.services.solutions import family_case2
from hydrowave.services.specs import parse_init_spec


@pytest.fixture
def pressure():
    return case2_pressure(1.0)


@pytest.fixture
def sine():
    return parse_init_spec("sine:u0=0.5,v0=1.5,amp=0.1", 64)


@pytest.mark.parametrize("scheme", ["lxf", "lw"])
def test_conserved_quantities(sine, pressure, scheme):
    monitors = {"u": density_of_u(parse_expr("s")), "v": density_of_v(parse_expr("s"))}
    result = evolve(sine, pressure, scheme, 0.5, 0.3, monitors)
    assert result.field.time == 0.3
    assert result.steps > 0
    assert result.drift("u") < 1e-12
    assert result.drift("v") < 1e-12
    assert result.times[0] == 0.0
    assert result.times[-1] == 0.3


def test_sampling_interval(sine, pressure):
    monitors = {"v": density_of_v(parse_expr("s"))}
    result = evolve(sine, pressure, "lw", 0.5, 0.3, monitors, sample_every=1000)
    assert result.times == [0.0, 0.3]
    assert len(result.monitors["v"]) == 2


@pytest.mark.parametrize("stepper", [step_lax_friedrichs, step_lax_wendroff])
def test_constant_state_is_steady(pressure, stepper):
    state = StateField.periodic(0.0, 1.0, 16, 0.3, 1.2)
    after = stepper(state, pressure, 0.9)
    np.testing.assert_allclose(after.u, 0.3, rtol=1e-14)
    np.testing.assert_allclose(after.v, 1.2, rtol=1e-14)
    # dt = cfl * h / c_max with c_max = 1/v^2
    assert after.time == pytest.approx(0.9 * (1.0 / 16.0) * 1.2**2)


def test_time_step_respects_cap(sine, pressure):
    assert step_lax_wendroff(sine, pressure, 0.5, dt_max=1e-4).time == pytest.approx(1e-4)


def test_hyperbolicity_loss(sine):
    with pytest.raises(HyperbolicityLoss):
        evolve(sine, expression_pressure("s"), "lw", 0.5, 0.1)


@pytest.mark.parametrize(
    "kwargs",
    [{"scheme": "upwind"}, {"cfl": 1.5}, {"cfl": 0.0}, {"t_end": -1.0}, {"sample_every": 0}],
)
def test_invalid_arguments(sine, pressure, kwargs):
    with pytest.raises(InvalidParameter):
        evolve(sine, pressure, **{"scheme": "lw", "cfl": 0.5, "t_end": 0.1, **kwargs})


def test_masked_cells_are_rejected(pressure):
    flags = ["ok"] * 7 + ["masked"]
    state = StateField.from_grid(np.linspace(0.0, 0.7, 8), np.full(8, 0.3), np.full(8, 1.2), flags=flags)
    with pytest.raises(MaskedCells):
        step_lax_friedrichs(state, pressure, 0.5)
    with pytest.raises(MaskedCells):
        functional_monitor(state, density_of_v(parse_expr("s")))


def test_functional_monitor():
    state = StateField.periodic(0.0, 2.0, 10, 1.0, 3.0)
    assert functional_monitor(state, density_of_v(parse_expr("s^2"))) == pytest.approx(18.0)


class TestAgainstHodograph:
    """Evolve a hodograph slice and compare with the hodograph solution later on"""

    T0 = 6.0
    T1 = 6.2
    LENGTH = 4.0

    @pytest.fixture
    def hodograph(self):
        density = family_case2(1.0, parse_expr("s^2"), parse_expr("0"))
        return HodographMap(density, Rectangle(0.5, 4.0, 0.5, 4.0))

    def _error(self, hodograph, scheme, cells=400):
        xs = np.linspace(2.0, 2.0 + self.LENGTH, cells + 1)
        start = solve_field(hodograph, xs, self.T0, (1.633, 1.225))
        assert start.all_ok()
        result = evolve(start, case2_pressure(1.0), scheme, 0.5, self.T1)
        window = result.field.window(3.4, 4.6)
        # seed the reference inside the window, away from the periodic seam
        j = int(np.argmax(window))
        reference = solve_field(hodograph, xs[j:], self.T1, (result.field.u[j], result.field.v[j]))
        mask = window[j:]
        return max(
            float(np.max(np.abs(result.field.u[j:][mask] - reference.u[mask]))),
            float(np.max(np.abs(result.field.v[j:][mask] - reference.v[mask]))),
        )

    def test_lax_wendroff_matches(self, hodograph):
        assert self._error(hodograph, "lw") < 1e-3

    def test_lax_friedrichs_is_less_accurate(self, hodograph):
        lw = self._error(hodograph, "lw")
        lxf = self._error(hodograph, "lxf")
        assert lxf < 1e-2
        assert lw < lxf

    @pytest.mark.parametrize("scheme, order", [("lxf", 1.0), ("lw", 2.0)])
    def test_convergence_order(self, hodograph, scheme, order):
        cells = [100, 200, 400]
        errors = [self._error(hodograph, scheme, n) for n in cells]
        fitted = convergence_order([self.LENGTH / n for n in cells], errors)
        assert fitted == pytest.approx(order, abs=0.3)


class TestConservedFunctionals:
    """Drift of integrals of conserved and non-conserved densities under refinement"""

    CELLS = [100, 200, 400]

    def _drifts(self, scheme, density):
        drifts = []
        for n in self.CELLS:
            initial = parse_init_spec("sine:u0=0.5,v0=1.5,amp=0.1", n)
            result = evolve(initial, case2_pressure(1.0), scheme, 0.5, 0.3, {"h": density})
            drifts.append(result.drift("h"))
        return drifts

    @pytest.mark.parametrize("scheme", ["lxf", "lw"])
    def test_hamiltonian_drift_vanishes(self, scheme):
        drifts = self._drifts(scheme, catalog("t2", {"k0": 1.0}))
        assert drifts[0] > drifts[1] > drifts[2]
        assert convergence_order([1.0 / n for n in self.CELLS], drifts) > 0.7

    @pytest.mark.parametrize("scheme", ["lxf", "lw"])
    def test_commuting_density_drift_shrinks(self, scheme):
        drifts = self._drifts(scheme, family_case2(1.0, parse_expr("s^3"), parse_expr("0")))
        assert drifts[2] < 0.6 * drifts[0]

    @pytest.mark.parametrize("scheme", ["lxf", "lw"])
    def test_non_conserved_density_keeps_drifting(self, scheme):
        drifts = self._drifts(scheme, density_of_u(parse_expr("s^4")))
        assert min(drifts) > 1e-3
        assert drifts[2] > 0.5 * drifts[0]
