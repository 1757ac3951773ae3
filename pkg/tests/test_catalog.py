"""Tests for the densities catalog"""

import pytest

from hydrowave.core.errors import InvalidParameter, UnknownName
from hydrowave.services.catalog import associated_speed, catalog, list_entries, validate_entry
from hydrowave.services.solutions import wave_residual
from hydrowave.services.speedlaw import SpeedKind


def test_list_entries():
    assert list_entries() == ["o1-gas", "o2-elastic", "product-case1", "product-case2", "t1", "t2"]


def test_quadratic_value():
    assert catalog("t2", {"k0": 1.0}).value(1.0, 1.0) == pytest.approx(2.0 / 3.0)


@pytest.mark.parametrize("name", ["t1", "t2", "product-case1", "o1-gas", "o2-elastic"])
def test_entries_satisfy_published_speed(name):
    result = validate_entry(name, n=8)
    assert result.passed
    assert not result.discrepancy
    assert result.printed_speed == result.effective_speed


@pytest.mark.parametrize("k1", [1.0, -0.5])
def test_product_case2_discrepancy_is_reported(k1):
    result = validate_entry("product-case2", {"k0": 1.5, "k1": k1}, n=8)
    assert result.discrepancy
    assert result.passed
    assert result.printed_speed.startswith("case2")
    assert result.effective_speed.startswith("case3")


def test_associated_speed_is_effective(unit_rect):
    speed = associated_speed("product-case2", {"k0": 2.0, "k1": 1.0})
    assert speed.kind == SpeedKind.CASE3
    density = catalog("product-case2", {"k0": 2.0, "k1": 1.0})
    assert wave_residual(density, speed, unit_rect.points(6)) < 1e-8


def test_case1_entry_accepts_v1():
    by_c0 = catalog("t1", {"c0": 1.0, "v0": 1.0})
    by_v1 = catalog("t1", {"v0": 1.0, "v1": 0.0})
    assert by_v1.value(1.5, 1.5) == pytest.approx(by_c0.value(1.5, 1.5))
    assert by_v1.describe()["c0"] == 1.0


def test_unknown_entry():
    with pytest.raises(UnknownName) as excinfo:
        catalog("t9")
    assert isinstance(excinfo.value, KeyError)
    assert "t9" in str(excinfo.value)


@pytest.mark.parametrize(
    "name, params",
    [
        ("t2", {"q": 1.0}),
        ("t1", {"c0": 0.0}),
        ("t1", {"c0": 1.0, "v0": 1.0, "v1": 3.0}),
        ("product-case2", {"k1": 0.0}),
        ("product-case1", {"sep_k": -10.0}),
    ],
)
def test_invalid_parameters(name, params):
    with pytest.raises(InvalidParameter):
        catalog(name, params)
