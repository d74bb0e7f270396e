import pytest
from fastapi.testclient import TestClient
from pydantic import ValidationError

from exactwkb.schemas import BorelRequest, VerifyRequest, parse_complex
from exactwkb.service import app, finite_json


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_parse_complex_forms():
    assert parse_complex("1.5,-2") == 1.5 - 2j
    assert parse_complex([0, 1]) == 1j
    assert parse_complex(3) == 3 + 0j
    with pytest.raises(ValueError):
        parse_complex("1,2,3")
    with pytest.raises(ValueError):
        parse_complex(True)


def test_models_reject_unknown_keys():
    with pytest.raises(ValidationError):
        BorelRequest(potential="x/2", x=1, colour="red")
    assert VerifyRequest(suite="eigen").suite == "eigen-ho"
    with pytest.raises(ValidationError):
        VerifyRequest(suite="nope")


def test_complex_serialised_as_pair():
    req = BorelRequest(potential="x/2", x="1,0.5")
    assert req.model_dump(mode="json")["x"] == [1.0, 0.5]


def test_finite_json():
    assert finite_json({"a": [float("nan"), 1.0]}) == {"a": [None, 1.0]}


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok" and "ode_rtol" in body["constants"]


def test_stokes_endpoint(client):
    r = client.post("/stokes", json={"potential": "x^2/2", "energy": 0.5})
    assert r.status_code == 200
    body = r.json()
    assert body["n_sectors"] == 4
    assert any(ln["terminus"][0] == "tp" for ln in body["graph"]["lines"])
    r = client.post("/stokes", json={"potential": "x/2"})
    assert r.json()["n_sectors"] == 3


def test_parse_error_maps_to_exit_2(client):
    r = client.post("/stokes", json={"potential": "x^^2"})
    assert r.status_code == 400
    body = r.json()
    assert body["kind"] == "ParseError" and body["exit_code"] == 2 and "position 2" in body["error"]


def test_validation_error_maps_to_exit_2(client):
    r = client.post("/coeffs", json={"potential": "x/2"})
    assert r.status_code == 400 and r.json()["exit_code"] == 2


def test_pole_on_ray_maps_to_exit_3(client):
    r = client.post("/borel", json={"potential": "x/2", "x": 1.0, "rays": [0.0]})
    assert r.status_code == 422
    body = r.json()
    assert body["exit_code"] == 3 and "pole-on-ray" in body["error"]


def test_borel_pole_map_and_ray_independence(client):
    r = client.post("/borel", json={"potential": "x/2", "x": 1.0, "rays": [2.8, -2.9],
                                    "lambdas": [10.0], "oracle": True})
    body = r.json()
    assert abs(abs(complex(*body["nearest_pole"]["pole"])) - 2.0 / 3.0) < 0.02
    assert all(s["rays_consistent"] for s in body["sums"])
    assert all(s["oracle_gap"] < 1e-9 for s in body["sums"])


def test_eigen_endpoint(client):
    r = client.post("/eigen", json={"potential": "x^2/2", "count": 2, "bracket": [0, 3]})
    E = [row["E"][0] for row in r.json()["wronskian"]]
    assert E == pytest.approx([0.5, 1.5], abs=1e-9)
