"""Tests for the HTTP API"""

import pytest
from httpx import ASGITransport, AsyncClient

from hydrowave.main import app


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy", "service": "Hydrowave"}


def test_status(client):
    data = client.get("/status").json()
    assert data["status"] == "running"
    assert data["config"]["wave_tolerance"] == 1e-8
    assert data["config"]["default_grid"] == 30


def test_verify(client):
    payload = {"case": 2, "k0": 1.0, "theta1": "s^2", "theta2": "0", "grid": 5, "include_rows": True}
    response = client.post("/api/v1/analysis/verify", json=payload)
    assert response.status_code == 200
    data = response.json()
    assert data["report"]["verdict"] == "pass"
    assert data["report"]["provenance"]["theta1"] == "s^2"
    assert len(data["rows"]) == 25
    assert data["rows"][0]["u"] == 1.0


def test_verify_rows_are_optional(client):
    response = client.post("/api/v1/analysis/verify", json={"case": 3, "k1": 1.0, "theta1": "s", "grid": 3})
    assert response.json()["rows"] == []


def test_verify_syntax_error(client):
    response = client.post("/api/v1/analysis/verify", json={"case": 2, "k0": 1.0, "theta1": "s^2 +"})
    assert response.status_code == 400
    data = response.json()
    assert data["success"] is False
    assert data["error_code"] == "SYNTAX_ERROR"
    assert "byte offset 5" in data["error"]


def test_verify_request_validation(client):
    assert client.post("/api/v1/analysis/verify", json={"case": 5}).status_code == 422
    assert client.post("/api/v1/analysis/verify", json={"case": 2, "grid": 1}).status_code == 422


def test_commute(client):
    payload = {"h": "u:s^4", "f": "v:s^4", "grid": 3}
    data = client.post("/api/v1/analysis/commute", json=payload).json()
    assert data["report"]["verdict"] == "fail"
    assert "flows do not commute" in data["report"]["notes"]


def test_constraint_check(client):
    response = client.post("/api/v1/analysis/constraint-check", json={"speed": "case3:k1=0.8", "grid": 4})
    assert response.status_code == 200
    data = response.json()
    assert set(data["residuals"]) == {"r1", "r2", "r3"}
    assert data["report"]["verdict"] == "pass"


def test_unknown_speed_kind(client):
    response = client.post("/api/v1/analysis/constraint-check", json={"speed": "case7:k=1"})
    assert response.status_code == 400
    assert response.json()["error_code"] == "UNKNOWN_NAME"


def test_hodograph_solve(client):
    payload = {"pressure": "case2:k0=1", "theta1": "s^2", "t": 6, "x": "2.5:3.5:6", "seed": "1.826,1.095"}
    response = client.post("/api/v1/hodograph/solve", json=payload)
    assert response.status_code == 200
    data = response.json()
    assert data["flags"] == ["ok"] * 6
    assert data["x"][0] == 2.5
    assert data["u"][0] == pytest.approx((10.0 / 3.0) ** 0.5, rel=1e-9)
    assert data["report"]["metrics"]["cells"] == 6


def test_hodograph_catastrophe_cells_are_null(client):
    payload = {
        "pressure": "case2:k0=1", "theta1": "s^3", "t": 12, "x": "0:0.4:41",
        "seed": "0.889,2.25", "domain": "u=0.3:2,v=1:6",
    }
    data = client.post("/api/v1/hodograph/solve", json=payload).json()
    flagged = [j for j, flag in enumerate(data["flags"]) if flag != "ok"]
    assert flagged
    assert all(data["u"][j] is None for j in flagged)
    assert data["report"]["verdict"] == "fail"
    assert any("catastrophe" in note for note in data["report"]["notes"])


@pytest.mark.asyncio
async def test_health_async():
    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as ac:
        response = await ac.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"
