"""Shared fixtures"""

import pytest
from fastapi.testclient import TestClient

from hydrowave.main import app
from hydrowave.services.exprlang import parse_expr
from hydrowave.services.grid import Rectangle


@pytest.fixture
def unit_rect() -> Rectangle:
    return Rectangle(1.0, 2.0, 1.0, 2.0)


@pytest.fixture
def grid_points(unit_rect):
    return unit_rect.points(7)


@pytest.fixture
def expr():
    return parse_expr


@pytest.fixture
def client():
    return TestClient(app)
