import pytest
from fastapi.testclient import TestClient

from ehmi_mobo.acquisition import AcquisitionConfig
from ehmi_mobo.optimizer import SessionConfig
from ehmi_mobo.service import ServiceConfig, create_app

FAST_DEFAULTS = SessionConfig(
    acquisition=AcquisitionConfig(n_candidates=24, n_mc_samples=12, seed=1)
)


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(store_dir=str(tmp_path / "store"), defaults=FAST_DEFAULTS)
    app = create_app(config)
    with TestClient(app) as c:
        yield c


def rating_payload(iteration=None, **overrides):
    payload = {
        "trust_items": [4, 3],
        "predictability_items": [4, 4, 2, 2],
        "mental_demand": 6,
        "safety_items": [2, 1, 2, 2],
        "usefulness": 5,
        "satisfaction": 5,
        "visual_appeal": 4,
        "time_to_cross_s": 11.0,
    }
    if iteration is not None:
        payload["iteration"] = iteration
    payload.update(overrides)
    return payload


def perfect_payload(iteration=None):
    return rating_payload(
        iteration=iteration,
        trust_items=[5, 5],
        predictability_items=[5, 5, 1, 1],
        mental_demand=1,
        safety_items=[3, 3, 3, 3],
        usefulness=7,
        satisfaction=7,
        visual_appeal=7,
        time_to_cross_s=9.0,
    )


def test_create_session_returns_first_sobol_design(client):
    response = client.post("/sessions", json={})
    assert response.status_code == 201
    body = response.json()
    assert body["iteration"] == 0
    assert body["phase"] == "sampling"
    assert body["design"]["params"] == [0.5] * 9
    rendering = body["design"]["rendering"]
    assert rendering["blink_hz"] == 2.0
    assert rendering["rect"]["center_u"] == 0.5


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_unknown_session_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/rating", json=rating_payload()).status_code == 404


def test_rating_flow_next_design_and_state(client):
    sid = client.post("/sessions", json={}).json()["session_id"]
    response = client.post(f"/sessions/{sid}/rating", json=rating_payload())
    assert response.status_code == 200
    body = response.json()
    assert body["iteration"] == 1
    assert not body["finished"]
    assert body["design"]["params"] != [0.5] * 9
    snapshot = client.get(f"/sessions/{sid}").json()
    assert snapshot["iteration"] == 1
    assert snapshot["design"] == body["design"]


def test_invalid_payload_422(client):
    sid = client.post("/sessions", json={}).json()["session_id"]
    bad = rating_payload(mental_demand=0)
    assert client.post(f"/sessions/{sid}/rating", json=bad).status_code == 422
    missing = rating_payload()
    del missing["trust_items"]
    assert client.post(f"/sessions/{sid}/rating", json=missing).status_code == 422
    # state unchanged
    assert client.get(f"/sessions/{sid}").json()["iteration"] == 0


def test_idempotency_key_rejects_duplicates(client):
    sid = client.post("/sessions", json={}).json()["session_id"]
    ok = client.post(f"/sessions/{sid}/rating", json=rating_payload(iteration=1))
    assert ok.status_code == 200
    duplicate = client.post(f"/sessions/{sid}/rating", json=rating_payload(iteration=1))
    assert duplicate.status_code == 409
    assert client.get(f"/sessions/{sid}").json()["iteration"] == 1


def test_perfect_rating_finishes_early(client):
    sid = client.post("/sessions", json={}).json()["session_id"]
    response = client.post(f"/sessions/{sid}/rating", json=perfect_payload())
    body = response.json()
    assert body["finished"] and body["stopped_early"]
    after = client.post(f"/sessions/{sid}/rating", json=rating_payload())
    assert after.status_code == 409


def test_twenty_ratings_finish_a_default_session(client):
    sid = client.post("/sessions", json={"n_candidates": 16, "n_mc_samples": 8}).json()[
        "session_id"
    ]
    finished = []
    for i in range(1, 21):
        body = client.post(
            f"/sessions/{sid}/rating", json=rating_payload(iteration=i)
        ).json()
        finished.append(body["finished"])
    assert finished[:-1] == [False] * 19
    assert finished[-1] is True
    assert client.get(f"/sessions/{sid}").json()["phase"] == "finished"


def test_pareto_endpoint(client):
    sid = client.post("/sessions", json={}).json()["session_id"]
    assert client.get(f"/sessions/{sid}/pareto").json()["points"] == []
    client.post(f"/sessions/{sid}/rating", json=rating_payload())
    client.post(f"/sessions/{sid}/rating", json=rating_payload(visual_appeal=6))
    body = client.get(f"/sessions/{sid}/pareto").json()
    assert body["hypervolume"] > 0
    assert len(body["points"]) >= 1
    assert body["reference_point"] == [-1.1] * 7
    for point in body["points"]:
        assert len(point["objectives"]) == 7
        assert len(point["params"]) == 9


def test_export_and_restart_byte_identical(tmp_path):
    store = str(tmp_path / "store")
    config = ServiceConfig(store_dir=store, defaults=FAST_DEFAULTS)
    with TestClient(create_app(config)) as client:
        sid = client.post("/sessions", json={}).json()["session_id"]
        for i in range(1, 4):
            client.post(f"/sessions/{sid}/rating", json=rating_payload(iteration=i))
        export_before = client.get(f"/sessions/{sid}/export").content

    # simulated crash: a brand-new app over the same store
    with TestClient(create_app(ServiceConfig(store_dir=store, defaults=FAST_DEFAULTS))) as client:
        export_after = client.get(f"/sessions/{sid}/export").content
        assert export_after == export_before
        # the replayed session keeps accepting ratings
        response = client.post(
            f"/sessions/{sid}/rating", json=rating_payload(iteration=4)
        )
        assert response.status_code == 200
        assert client.get(f"/sessions/{sid}").json()["iteration"] == 4


def test_session_config_overrides(client):
    body = client.post(
        "/sessions", json={"n_sobol": 2, "n_optimization": 1, "seed": 5}
    ).json()
    assert body["total_iterations"] == 3
    assert body["n_sobol"] == 2
    bad = client.post("/sessions", json={"n_sobol": 0})
    assert bad.status_code == 422


def test_expired_session_is_gone(tmp_path):
    config = ServiceConfig(
        store_dir=str(tmp_path / "store"), defaults=FAST_DEFAULTS, expiry_s=0.0001
    )
    with TestClient(create_app(config)) as client:
        sid = client.post("/sessions", json={}).json()["session_id"]
        import time

        time.sleep(0.01)
        assert client.get(f"/sessions/{sid}").status_code == 404
