"""Tests for the HTTP service."""

import math

import httpx
import pytest
from fastapi.testclient import TestClient

from app.main import app

SEMICIRCLE = {"kind": "semicircle", "center": 0.0, "radius": 2.0}


@pytest.fixture
def client():
    with TestClient(app) as test_client:
        yield test_client


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}
    assert client.get("/").json()["service"] == "hcizlab"


def test_exact_endpoint(client):
    response = client.post("/exact", json={"a": {"values": [1, 0]}, "b": {"values": [1, 0]}})
    assert response.status_code == 200
    assert response.json()["log_abs"] == pytest.approx(math.log((math.e**2 - 1) / 2), abs=1e-12)


def test_transform_endpoint(client):
    response = client.post("/transform", json={"measure": SEMICIRCLE, "beta": 2, "t": [0.5, 2.0]})
    assert response.status_code == 200
    rows = response.json()
    assert rows[0]["f_beta"] == pytest.approx(0.125, abs=1e-9)
    assert rows[1]["branch"] == "upper"


def test_bounds_endpoint(client):
    body = {"a": {"values": [0.5, 0.25, 0, 0]}, "b": {"values": [1, 0.5, 0.2, 0]}}
    data = client.post("/bounds", json=body).json()
    assert data["lower"]["log_abs"] - 1e-9 <= data["exact"]["log_abs"] <= data["upper"]["log_abs"] + 1e-9
    assert data["m"] == 2


def test_domain_errors_map_to_422(client):
    response = client.post("/exact", json={"a": {"values": [1, 0]}, "b": {"values": [1, 0, 0]}})
    assert response.status_code == 422
    assert response.json()["error"] == "domain_error"

    response = client.post("/transform", json={"measure": {"kind": "uniform", "a": 1, "b": 0}, "t": [0.1]})
    assert response.status_code == 422


def test_precision_errors_map_to_409(client, settings_env):
    settings_env(max_precision_bits=60)
    body = {"a": {"values": [1, 0, 0]}, "b": {"values": [1, 0, 0]}, "precision_bits": 53}
    response = client.post("/exact", json=body)
    assert response.status_code == 409
    assert response.json()["exit_code"] == 3


def test_request_validation(client):
    response = client.post("/mc", json={"a": {"values": [1, 0]}, "b": {"values": [1, 0]}, "samples": 1})
    assert response.status_code == 422


async def test_measure_endpoint_async():
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://test") as async_client:
        response = await async_client.post("/measure", json={"measure": SEMICIRCLE, "sample": 3})
    assert response.status_code == 200
    data = response.json()
    assert data["spectrum"]["values"][1] == 0.0
    assert data["mean"] == 0.0
