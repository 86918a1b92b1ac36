import pytest
from fastapi.testclient import TestClient

from transgress.service.app import app
from transgress.verifier.scenarios import list_scenarios


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_list_scenarios(client):
    r = client.get("/scenarios")
    assert r.status_code == 200
    assert [s["name"] for s in r.json()] == list_scenarios()


def test_run_default(client):
    r = client.post("/scenarios/cstar_closure/run", json={"seed": 4})
    assert r.status_code == 200
    body = r.json()
    assert body["passed"] and body["exit_code"] == 0 and body["seed"] == 4
    assert body["artifact_data"] is None


def test_run_with_config_and_artifacts(client):
    cfg = {"scenarios": {"weighted_limits": {"n_phases": 4}}}
    r = client.post("/scenarios/weighted_limits/run", json={"config": cfg, "include_artifacts": True})
    assert r.status_code == 200
    data = r.json()["artifact_data"]
    assert list(data) == ["limit_points.csv"] and data["limit_points.csv"].startswith("param_re,")


def test_run_residual_failure_is_reported(client):
    r = client.post("/scenarios/poincare_lelong/run", json={"tol_scale": 1e-15})
    assert r.status_code == 200
    assert r.json()["exit_code"] == 1


def test_unknown_scenario(client):
    assert client.post("/scenarios/nope/run", json={}).status_code == 404


@pytest.mark.parametrize(
    "body",
    [
        {"config": {"bogus": 1}},
        {"tol_scale": 0},
        {"seeds": 3},
        {"config": {"scenarios": {"poincare_lelong": {"section": "zb"}}}},
    ],
)
def test_bad_requests(client, body):
    assert client.post("/scenarios/poincare_lelong/run", json=body).status_code == 422
