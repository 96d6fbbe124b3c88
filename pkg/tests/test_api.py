"""HTTP facade: routes, payload mapping, and error translation."""

import pytest
from fastapi.testclient import TestClient

from quadisrk import __version__, model_to_dict
from quadisrk.api import create_app

from conftest import random_stable_model


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def model_payload():
    return model_to_dict(random_stable_model(6, seed=10))


class TestHealth:
    def test_health(self, client):
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "version": __version__}


class TestValidate:
    def test_valid_model(self, client, model_payload):
        resp = client.post("/validate", json={"model": model_payload})
        assert resp.status_code == 200
        body = resp.json()
        assert body["valid"] is True
        assert body["stable"] is True
        assert body["n"] == 6
        assert body["spectral_abscissa"] < 0
        assert len(body["poles"]) == 6

    def test_unstable_model(self, client):
        payload = {
            "n": 1,
            "E": [[1.0]],
            "A": [[1.0]],
            "B": [1.0],
            "C": [1.0],
        }
        resp = client.post("/validate", json={"model": payload})
        assert resp.status_code == 200
        body = resp.json()
        assert body["valid"] is False
        assert any("NOT asymptotically stable" in msg for msg in body["messages"])

    def test_rejected_model_reports_reason(self, client):
        payload = {
            "n": 2,
            "E": [[1.0, 0.0], [0.0, 0.0]],  # singular E
            "A": [[-1.0, 0.0], [0.0, -1.0]],
            "B": [1.0, 1.0],
            "C": [1.0, 1.0],
        }
        resp = client.post("/validate", json={"model": payload})
        assert resp.status_code == 200
        body = resp.json()
        assert body["valid"] is False
        assert any("rejected" in msg for msg in body["messages"])


class TestReduce:
    def test_isrk_with_model(self, client, model_payload):
        resp = client.post(
            "/reduce",
            json={"method": "isrk", "r": 2, "model": model_payload},
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["rom"]["r"] == 2
        assert body["trace"]["status"] == "converged"
        assert body["h2_rel"] is not None and body["h2_rel"] < 1.0

    def test_quad_isrk_with_model(self, client, model_payload):
        resp = client.post(
            "/reduce",
            json={
                "method": "quad-isrk",
                "r": 2,
                "model": model_payload,
                "quadrature": {"omega_min": 1e-2, "omega_max": 1e2, "half_count": 60},
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["rom"]["r"] == 2
        assert body["oracle_queries"] > 0

    def test_quad_isrk_from_samples(self, client, model_payload):
        # First export samples, then reduce from those samples alone.
        export = client.post(
            "/sample-export",
            json={
                "model": model_payload,
                "r": 2,
                "quadrature": {"omega_min": 1e-2, "omega_max": 1e2, "half_count": 60},
            },
        )
        assert export.status_code == 200
        samples = export.json()["samples"]
        resp = client.post(
            "/reduce",
            json={
                "method": "quad-isrk",
                "r": 2,
                "samples": samples,
                "quadrature": {"omega_min": 1e-2, "omega_max": 1e2, "half_count": 60},
            },
        )
        assert resp.status_code == 200
        assert resp.json()["rom"]["r"] == 2
        # no model available, so no error readings
        assert resp.json()["h2_rel"] is None

    def test_intrusive_method_needs_model(self, client):
        resp = client.post("/reduce", json={"method": "isrk", "r": 2})
        assert resp.status_code == 422
        body = resp.json()
        assert body["error"] == "InvalidSpec"

    def test_numerical_failure_maps_to_422_with_class(self, client, model_payload):
        # Samples that cannot serve the requested quadrature nodes.
        resp = client.post(
            "/reduce",
            json={
                "method": "quad-isrk",
                "r": 1,
                "samples": [
                    {"s_re": 0.0, "s_im": 1.0, "H_re": 0.5, "H_im": -0.5},
                    {"s_re": 0.0, "s_im": -1.0, "H_re": 0.5, "H_im": 0.5},
                ],
                "quadrature": {"omega_min": 1e-1, "omega_max": 1e1, "half_count": 5},
            },
        )
        assert resp.status_code == 422
        assert resp.json()["error"] == "MissingSample"

    def test_unstable_model_maps_to_422(self, client):
        payload = {"n": 1, "E": [[1.0]], "A": [[1.0]], "B": [1.0], "C": [1.0]}
        resp = client.post(
            "/reduce", json={"method": "isrk", "r": 1, "model": payload}
        )
        assert resp.status_code == 422
        assert resp.json()["error"] == "UnstableSystem"


class TestSweep:
    def test_sweep_rows(self, client):
        resp = client.post(
            "/sweep",
            json={
                "kind": "rc-ladder",
                "n": 6,
                "seed": 2,
                "r_list": [1, 2],
                "quadrature": {"half_count": 40},
            },
        )
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert len(rows) == 6
        assert {row["method"] for row in rows} == {"irka", "isrk", "quad-isrk"}


class TestSampleExport:
    def test_excludes_cache_hits(self, client, model_payload):
        resp = client.post(
            "/sample-export",
            json={
                "model": model_payload,
                "r": 2,
                "quadrature": {"omega_min": 1e-2, "omega_max": 1e2, "half_count": 60},
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["backend_queries"] == len(body["samples"])
        points = {(s["s_re"], s["s_im"]) for s in body["samples"]}
        assert len(points) == len(body["samples"])
