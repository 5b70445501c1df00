"""HTTP API tests over the in-process test client."""

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from ceapost.server import create_app

from conftest import TINY_COSTS, TINY_EFFECTS


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def make_tiny_session(client, **overrides):
    body = {
        "effects": TINY_EFFECTS,
        "costs": TINY_COSTS,
        "labels": ["Status quo", "New"],
        "ref": 2,
        "kmax": 30.0,
        "grid_points": 7,
    }
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


def make_four_arm_session(client, n_sim=40, seed=0, **overrides):
    rng = np.random.default_rng(seed)
    body = {
        "effects": rng.random((n_sim, 4)).tolist(),
        "costs": (rng.random((n_sim, 4)) * 100).tolist(),
        "ref": 4,
        "kmax": 500.0,
        "grid_points": 21,
    }
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 201, resp.text
    return resp.json()


class TestSessions:
    def test_create_returns_digest(self, client):
        out = make_tiny_session(client)
        assert out["n_sim"] == 3
        assert out["ref"] == 2
        assert out["comparisons"] == [1]
        assert out["icer"] == [15.0]
        assert out["kstar"] == [15.0]
        assert out["revision"] == 1
        assert out["advisories"]  # tiny sample triggers the advisory

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope").status_code == 404

    def test_summary_at_k(self, client):
        sid = make_tiny_session(client)["id"]
        out = client.get(f"/sessions/{sid}/summary", params={"k": 20}).json()
        assert out["revision"] == 1
        assert out["k"] == 20
        assert out["summary"]["optimal_label"] == "New"
        assert out["summary"]["evpi"] == pytest.approx(5 / 3)
        assert "Cost-effectiveness analysis summary" in out["text"]

    def test_summary_out_of_range_422(self, client):
        sid = make_tiny_session(client)["id"]
        resp = client.get(f"/sessions/{sid}/summary", params={"k": 99})
        assert resp.status_code == 422

    def test_sim_table(self, client):
        sid = make_tiny_session(client)["id"]
        out = client.get(f"/sessions/{sid}/simtable", params={"k": 20}).json()
        assert out["columns"] == ["U1", "U2", "U*", "IB2_1", "OL", "VI"]
        assert out["rows"][2] == [10, 5, 10, -5, 5, -5]


class TestPatch:
    def test_patch_comparisons_changes_plots(self, client):
        sid = make_four_arm_session(client)["id"]
        before = client.get(f"/sessions/{sid}/plots/ceplane").json()
        assert len(before["spec"]["series"]) == 3
        out = client.patch(f"/sessions/{sid}", json={"comparisons": [1, 3]}).json()
        assert out["revision"] == 2
        assert out["comparisons"] == [1, 3]
        after = client.get(f"/sessions/{sid}/plots/ceplane").json()
        assert after["revision"] == 2
        assert len(after["spec"]["series"]) == 2

    def test_patch_ref_in_comparisons_422(self, client):
        sid = make_four_arm_session(client)["id"]
        resp = client.patch(f"/sessions/{sid}", json={"ref": 1, "comparisons": [1, 3]})
        assert resp.status_code == 422
        detail = resp.json()["detail"]
        assert any("comparisons" in d["loc"] for d in detail)

    def test_patch_kmax(self, client):
        sid = make_tiny_session(client)["id"]
        out = client.patch(f"/sessions/{sid}", json={"kmax": 60.0}).json()
        assert out["kmax"] == 60.0
        assert out["grid_points"] == 7
        assert out["icer"] == [15.0]

    def test_idempotent_patch_same_payload_hash(self, client):
        sid = make_four_arm_session(client)["id"]
        first = client.patch(f"/sessions/{sid}", json={"comparisons": [1, 3]}).json()
        second = client.patch(f"/sessions/{sid}", json={"comparisons": [1, 3]}).json()
        assert second["revision"] > first["revision"]
        assert second["digest_hash"] == first["digest_hash"]

    def test_if_match_conflict_409(self, client):
        sid = make_tiny_session(client)["id"]
        ok = client.patch(f"/sessions/{sid}", json={"kmax": 40.0},
                          headers={"If-Match": "1"})
        assert ok.status_code == 200
        stale = client.patch(f"/sessions/{sid}", json={"kmax": 50.0},
                             headers={"If-Match": "1"})
        assert stale.status_code == 409

    def test_validation_failure_keeps_state(self, client):
        sid = make_tiny_session(client)["id"]
        bad = client.patch(f"/sessions/{sid}", json={"ref": 9})
        assert bad.status_code == 422
        out = client.get(f"/sessions/{sid}").json()
        assert out["revision"] == 1
        assert out["ref"] == 2

    def test_session_isolation_interleaved(self, client):
        a = make_four_arm_session(client, seed=1)["id"]
        b = make_four_arm_session(client, seed=2)["id"]
        client.patch(f"/sessions/{a}", json={"comparisons": [1]})
        client.patch(f"/sessions/{b}", json={"kmax": 900.0})
        client.patch(f"/sessions/{a}", json={"kmax": 700.0})
        client.patch(f"/sessions/{b}", json={"comparisons": [2, 3]})
        sa = client.get(f"/sessions/{a}").json()
        sb = client.get(f"/sessions/{b}").json()
        assert sa["comparisons"] == [1] and sa["kmax"] == 700.0
        assert sb["comparisons"] == [2, 3] and sb["kmax"] == 900.0


class TestExtensions:
    def test_shares_enable_mixed_overlay(self, client):
        sid = make_four_arm_session(client)["id"]
        out = client.post(f"/sessions/{sid}/extensions",
                          json={"shares": [0.4, 0.3, 0.2, 0.1]}).json()
        assert "mixed" in out["extensions"]
        plot = client.get(f"/sessions/{sid}/plots/evi").json()
        labels = [s["label"] for s in plot["spec"]["series"]]
        assert any("mixed" in lab for lab in labels)

    def test_riskav_enables_eib_overlay(self, client):
        sid = make_tiny_session(client)["id"]
        client.post(f"/sessions/{sid}/extensions",
                    json={"riskav": [0.0, 0.005, 0.020, 0.035]})
        plot = client.get(f"/sessions/{sid}/plots/eib").json()
        assert len(plot["spec"]["series"]) == 4

    def test_multice_changes_ceac(self, client):
        sid = make_four_arm_session(client)["id"]
        client.post(f"/sessions/{sid}/extensions", json={"multice": True})
        plot = client.get(f"/sessions/{sid}/plots/ceac").json()
        assert len(plot["spec"]["series"]) == 4  # every included arm

    def test_exactly_one_extension_key(self, client):
        sid = make_tiny_session(client)["id"]
        resp = client.post(f"/sessions/{sid}/extensions",
                           json={"shares": [0.5, 0.5], "multice": True})
        assert resp.status_code == 422

    def test_bad_shares_422(self, client):
        sid = make_tiny_session(client)["id"]
        resp = client.post(f"/sessions/{sid}/extensions",
                           json={"shares": [0.9, 0.3]})
        assert resp.status_code == 422

    def test_patch_recomputes_extensions(self, client):
        sid = make_four_arm_session(client)["id"]
        client.post(f"/sessions/{sid}/extensions", json={"multice": True})
        out = client.patch(f"/sessions/{sid}", json={"comparisons": [1, 2]}).json()
        assert "multice" in out["extensions"]
        plot = client.get(f"/sessions/{sid}/plots/ceac").json()
        assert len(plot["spec"]["series"]) == 3  # ref plus two comparators


class TestArchiveAndReport:
    def test_archive_download(self, client):
        out = make_tiny_session(client)
        sid = out["id"]
        resp = client.get(f"/sessions/{sid}/archive").json()
        archive = resp["archive"]
        assert archive["version"] == 1
        assert archive["config"]["ref"] == 2
        assert archive["statistics"]["kstar"] == [15.0]
        assert archive["content_hash"] == out["digest_hash"]

    def test_report_download(self, client):
        sid = make_tiny_session(client)["id"]
        resp = client.get(f"/sessions/{sid}/report",
                          params={"k": 20, "plots": "ceplane,eib"}).json()
        assert "## Summary" in resp["markdown"]
        assert set(resp["figures"]) == {"fig_ceplane.svg", "fig_eib.svg"}
        assert resp["figures"]["fig_ceplane.svg"].startswith("<?xml")


class TestPlots:
    def test_ceaf_without_multice_422(self, client):
        sid = make_tiny_session(client)["id"]
        resp = client.get(f"/sessions/{sid}/plots/ceaf")
        assert resp.status_code == 422

    def test_unknown_kind_404(self, client):
        sid = make_tiny_session(client)["id"]
        assert client.get(f"/sessions/{sid}/plots/nope").status_code == 404

    def test_plot_kinds_available(self, client):
        sid = make_four_arm_session(client)["id"]
        for kind in ("ceplane", "ceac", "eib", "evi", "ceef", "ib-density",
                     "contour", "contour2", "grid"):
            resp = client.get(f"/sessions/{sid}/plots/{kind}", params={"k": 250})
            assert resp.status_code == 200, (kind, resp.text)
            assert resp.json()["spec"]["kind"] == kind


class TestEvppiJobs:
    def _session_with_params(self, client, n=400):
        rng = np.random.default_rng(5)
        phi = rng.uniform(-1, 1, n)
        noise = rng.normal(0, 1, n)
        body = {
            "effects": np.column_stack([np.zeros(n), phi]).tolist(),
            "costs": np.column_stack([np.zeros(n), 2 * phi]).tolist(),
            "ref": 2,
            "kmax": 4.0,
            "grid_points": 21,
            "parameters": {
                "names": ["phi", "noise"],
                "mat": np.column_stack([phi, noise]).tolist(),
            },
        }
        resp = client.post("/sessions", json=body)
        assert resp.status_code == 201
        return resp.json()["id"]

    def _wait(self, client, job_id, timeout=30.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            out = client.get(f"/jobs/{job_id}").json()
            if out["status"] != "running":
                return out
            time.sleep(0.05)
        raise AssertionError("job did not finish in time")

    def test_job_flow(self, client):
        sid = self._session_with_params(client)
        resp = client.post(f"/sessions/{sid}/evppi",
                           json={"params": ["phi"], "k": 3.5})
        assert resp.status_code == 202
        job = self._wait(client, resp.json()["job_id"])
        assert job["status"] == "done", job
        result = job["result"]
        assert result["method"] == "binned"
        assert len(result["evppi"]) == 21
        ranking = {r["param"]: r["proportion"] for r in result["info_rank"]}
        assert ranking["phi"] > 0.5
        assert ranking["noise"] < 0.2

    def test_evppi_without_params_422(self, client):
        sid = make_tiny_session(client)["id"]
        resp = client.post(f"/sessions/{sid}/evppi", json={"params": ["x"]})
        assert resp.status_code == 422

    def test_unknown_param_422(self, client):
        sid = self._session_with_params(client)
        resp = client.post(f"/sessions/{sid}/evppi", json={"params": ["zz"]})
        assert resp.status_code == 422

    def test_unknown_job_404(self, client):
        assert client.get("/jobs/nope").status_code == 404
