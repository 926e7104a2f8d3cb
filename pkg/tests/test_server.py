"""HTTP server: endpoints, revision protocol, async mutations, static UI."""

import http.client
import json
import threading

import pytest

from solspace.baseline import baseline_from_point
from solspace.boxes import mu
from solspace.problem import problem_from_dict, problem_to_dict
from solspace.runio import BaselineRecord, BoxRecord, persist_run
from solspace.server import ApiError, RunServer, RunSession, make_server
from solspace.solver import SolverParams, solve_box, validate_box


@pytest.fixture(scope="module")
def artifacts(toy2d, tmp_path_factory):
    run_dir = tmp_path_factory.mktemp("server") / "run"
    params = SolverParams(seed=3)
    box, trace = solve_box(toy2d, toy2d.x_baseline, params)
    record = BoxRecord(box=box, mu=mu(box, toy2d),
                       purity=validate_box(toy2d, box, 500, seed=4),
                       seed=3, params=params)
    baseline = BaselineRecord.from_result(
        baseline_from_point(toy2d, toy2d.x_baseline), seed=3)
    persist_run(run_dir, toy2d, baseline=baseline, box=record, trace=trace)
    return toy2d, run_dir, record, trace


def _start(server):
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread


@pytest.fixture()
def server(artifacts, tmp_path):
    problem, run_dir, _, _ = artifacts
    # an empty static root keeps the placeholder page deterministic even
    # after a UI bundle lands in ./frontend/dist
    srv = make_server("127.0.0.1", 0, problem, run_dir, static_root=tmp_path / "nostatic")
    thread = _start(srv)
    yield srv
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


def _req(srv, method, path, body=None, raw_body=None):
    port = srv.server_address[1]
    conn = http.client.HTTPConnection("127.0.0.1", port, timeout=30)
    data = raw_body if raw_body is not None else (
        json.dumps(body).encode("utf-8") if body is not None else None)
    headers = {"Content-Type": "application/json"} if data else {}
    conn.request(method, path, body=data, headers=headers)
    resp = conn.getresponse()
    payload_raw = resp.read()
    ctype = resp.getheader("Content-Type") or ""
    conn.close()
    if ctype.startswith("application/json"):
        return resp.status, json.loads(payload_raw)
    return resp.status, payload_raw


def test_get_problem(server, toy2d):
    status, payload = _req(server, "GET", "/api/problem")
    assert status == 200
    assert payload["revision"] == 0
    names = [v["name"] for v in payload["problem"]["variables"]]
    assert names == list(toy2d.dv_names)


def test_get_box(server, artifacts):
    _, _, record, _ = artifacts
    status, payload = _req(server, "GET", "/api/box")
    assert status == 200
    assert payload["status"] == "idle"
    assert payload["last_error"] is None
    assert payload["revision"] == 0
    assert payload["intervals"] == record.box.to_jsonable()
    assert payload["mu"] == record.mu
    assert payload["params"]["n_samples"] == 100


def test_get_trace(server, artifacts):
    _, _, _, trace = artifacts
    status, payload = _req(server, "GET", "/api/trace")
    assert status == 200
    assert payload["trace"] == trace.to_jsonable()


def test_get_baseline(server, toy2d):
    status, payload = _req(server, "GET", "/api/baseline")
    assert status == 200
    assert tuple(payload["baseline"]["x_baseline"]) == toy2d.x_baseline


def test_baseline_404_when_absent(artifacts, tmp_path):
    problem, _, record, trace = artifacts
    bare = tmp_path / "bare"
    persist_run(bare, problem, box=record, trace=trace)
    srv = make_server("127.0.0.1", 0, problem, bare, static_root=tmp_path / "ns")
    thread = _start(srv)
    try:
        status, payload = _req(srv, "GET", "/api/baseline")
        assert status == 404
        assert payload["code"] == "no_baseline"
    finally:
        srv.shutdown()
        srv.server_close()
        thread.join(timeout=5)


def test_get_section(server):
    status, payload = _req(server, "GET", "/api/section?i=0&j=1&n=40&span=box")
    assert status == 200
    assert payload["revision"] == 0
    assert len(payload["points"]) == 40
    assert payload["span"] == "box"
    (xlo, xhi), (ylo, yhi) = payload["box_rect"]
    for p in payload["points"]:
        assert xlo <= p["x"][0] <= xhi
        assert ylo <= p["x"][1] <= yhi


@pytest.mark.parametrize(
    "query",
    ["i=0", "i=0&j=0", "i=0&j=7", "i=0&j=1&n=-1", "i=0&j=1&span=galaxy", "i=zero&j=1"],
)
def test_section_query_validation(server, query):
    status, payload = _req(server, "GET", f"/api/section?{query}")
    assert status == 400
    assert payload["code"] == "malformed_body"


def test_unknown_endpoints(server):
    status, payload = _req(server, "GET", "/api/nope")
    assert status == 404 and payload["code"] == "not_found"
    status, payload = _req(server, "POST", "/api/nope", body={})
    assert status == 404 and payload["code"] == "not_found"


def test_tradeoff_lifecycle(server):
    status, payload = _req(server, "POST", "/api/tradeoff",
                           body={"dv": "x1", "lower": 0.0, "upper": 0.2, "revision": 0})
    assert status == 202
    assert payload["status"] == "solving"
    server.session.wait_idle(30)
    status, box = _req(server, "GET", "/api/box")
    assert status == 200
    assert box["revision"] == 1
    assert box["status"] == "idle"
    assert box["last_error"] is None
    assert box["intervals"][0] == [0.0, 0.2]
    assert box["intervals"][1][1] >= 0.75

    # a second mutation computed against the stale revision is refused
    status, payload = _req(server, "POST", "/api/tradeoff",
                           body={"dv": "x1", "lower": 0.0, "upper": 0.1, "revision": 0})
    assert status == 409
    assert payload["code"] == "stale_revision"


def test_busy_session_refuses_second_mutation(server):
    server.session.begin_tradeoff("x1", 0.0, 0.4, None)
    with pytest.raises(ApiError) as exc:
        server.session.begin_tradeoff("x1", 0.0, 0.3, None)
    assert exc.value.status == 409
    assert exc.value.code == "busy"
    server.session.wait_idle(30)


@pytest.mark.parametrize(
    "body, code",
    [
        ({"dv": "zz", "lower": 0.0, "upper": 0.1}, "unknown_dv"),
        ({"dv": "x1", "lower": 0.3, "upper": 0.1}, "bad_interval"),
        ({"dv": "x1", "lower": -2.0, "upper": 0.1}, "not_nested"),
    ],
)
def test_tradeoff_semantic_errors(server, body, code):
    status, payload = _req(server, "POST", "/api/tradeoff", body=body)
    assert status == 422
    assert payload["code"] == code
    assert server.session.revision == 0  # nothing committed


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(raw_body=b"{nope"),
        dict(raw_body=b"[1, 2]"),
        dict(body={"dv": 5, "lower": 0.0, "upper": 0.1}),
        dict(body={"dv": "x1", "lower": True, "upper": 0.1}),
        dict(body={"dv": "x1", "lower": 0.0}),
    ],
)
def test_tradeoff_malformed_bodies(server, kwargs):
    status, payload = _req(server, "POST", "/api/tradeoff", **kwargs)
    assert status == 400
    assert payload["code"] == "malformed_body"


def test_solve_endpoint(server):
    status, payload = _req(server, "POST", "/api/solve", body={"seed": 9})
    assert status == 202 and payload["status"] == "solving"
    server.session.wait_idle(30)
    status, box = _req(server, "GET", "/api/box")
    assert box["revision"] == 1
    assert box["seed"] == 9
    assert box["last_error"] is None


def test_solve_rejects_bool_seed(server):
    status, payload = _req(server, "POST", "/api/solve", body={"seed": True})
    assert status == 400
    assert payload["code"] == "malformed_body"


def test_solve_without_seed_design(server, artifacts, toy2d):
    _, _, record, trace = artifacts
    data = problem_to_dict(toy2d)
    data.pop("x_baseline")
    no_seed = problem_from_dict(data)
    server.session = RunSession(no_seed, record, trace)
    status, payload = _req(server, "POST", "/api/solve", body={})
    assert status == 422
    assert payload["code"] == "no_seed_design"


def test_failed_solve_reports_last_error(server, artifacts, toy2d):
    _, _, record, trace = artifacts
    # (0.9, 0.9) violates the cap, so the solve worker fails after acceptance
    server.session = RunSession(toy2d, record, trace, seed_point=(0.9, 0.9))
    status, _ = _req(server, "POST", "/api/solve", body={})
    assert status == 202
    server.session.wait_idle(30)
    status, box = _req(server, "GET", "/api/box")
    assert box["revision"] == 0  # nothing committed
    assert box["status"] == "idle"
    assert box["last_error"]["code"] == "SeedInfeasibleError"


def test_placeholder_index(server):
    status, body = _req(server, "GET", "/")
    assert status == 200
    assert b"solspace" in body
    assert b"/api/box" in body


def test_static_bundle_and_traversal_guard(artifacts, tmp_path):
    problem, run_dir, _, _ = artifacts
    root = tmp_path / "dist"
    root.mkdir()
    (root / "index.html").write_text("<html>ui</html>")
    (root / "app.js").write_text("console.log(1)")
    (tmp_path / "secret.txt").write_text("nope")
    srv = make_server("127.0.0.1", 0, problem, run_dir, static_root=root)
    thread = _start(srv)
    try:
        status, body = _req(srv, "GET", "/")
        assert status == 200 and body == b"<html>ui</html>"
        status, body = _req(srv, "GET", "/app.js")
        assert status == 200 and body == b"console.log(1)"
        status, payload = _req(srv, "GET", "/../secret.txt")
        assert status == 404
        status, payload = _req(srv, "GET", "/missing.js")
        assert status == 404
    finally:
        srv.shutdown()
        srv.server_close()
        thread.join(timeout=5)


def test_run_server_type(server):
    assert isinstance(server, RunServer)
