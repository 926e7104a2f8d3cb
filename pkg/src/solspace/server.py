"""JSON-over-HTTP API for one loaded run.

Read endpoints serve consistent snapshots under a session lock; mutations
(tradeoff, fresh solve) run on a single worker thread with queue depth one, so
a second mutation while one is in flight gets 409 busy. Clients do optimistic
concurrency: every response carries the session revision, and a mutation body
may name the revision it was computed against (mismatch gets 409 stale).

Mutations update the in-memory session only; run-directory files are written
by the CLI, not by this server.
"""

from __future__ import annotations

import json
import threading
from dataclasses import replace
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .boxes import mu
from .errors import SolspaceError
from .problem import Problem, problem_to_dict
from .runio import BaselineRecord, BoxRecord, load_baseline_record, trace_from_jsonable
from .sections import SPANS, make_section
from .solver import SolverTrace, restrict_and_resolve, solve_box, validate_box

PURITY_SAMPLES = 2000


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class RunSession:
    """Problem plus mutable box/trace state behind a lock and revision counter."""

    def __init__(
        self,
        problem: Problem,
        box_record: BoxRecord,
        trace: SolverTrace,
        baseline: Optional[BaselineRecord] = None,
        seed_point: Optional[tuple[float, ...]] = None,
    ):
        self.problem = problem
        self.baseline = baseline
        self.seed_point = seed_point if seed_point is not None else problem.x_baseline
        self._box_record = box_record
        self._trace = trace
        self._revision = 0
        self._status = "idle"
        self._last_error: Optional[dict] = None
        self._lock = threading.Lock()

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> tuple[BoxRecord, SolverTrace, int, str, Optional[dict]]:
        with self._lock:
            return self._box_record, self._trace, self._revision, self._status, self._last_error

    @property
    def revision(self) -> int:
        with self._lock:
            return self._revision

    # -- mutations ---------------------------------------------------------

    def begin_tradeoff(self, dv: str, lower: float, upper: float,
                       expected_revision: Optional[int]) -> int:
        with self._lock:
            self._check_mutable(expected_revision)
            try:
                idx = self.problem.variable_index(dv)
            except (KeyError, ValueError):
                raise ApiError(422, "unknown_dv", f"no design variable named {dv!r}")
            if not (lower <= upper):
                raise ApiError(422, "bad_interval",
                               f"lower {lower} exceeds upper {upper}")
            blo, bhi = self._box_record.box.intervals[idx]
            if lower < blo or upper > bhi:
                raise ApiError(
                    422, "not_nested",
                    f"interval [{lower}, {upper}] is not nested in the current "
                    f"{dv} interval [{blo}, {bhi}]",
                )
            base = self._box_record
            params = replace(base.params, seed=base.seed)
            self._status = "solving"
            self._last_error = None
            started_at = self._revision

        def work():
            box, trace = restrict_and_resolve(
                self.problem, base.box, dv, (lower, upper), params
            )
            purity = validate_box(self.problem, box, PURITY_SAMPLES, seed=params.seed + 1)
            return BoxRecord(box=box, mu=mu(box, self.problem), purity=purity,
                             seed=params.seed, params=params), trace

        self._spawn(work)
        return started_at

    def begin_solve(self, seed: Optional[int], expected_revision: Optional[int]) -> int:
        with self._lock:
            self._check_mutable(expected_revision)
            if self.seed_point is None:
                raise ApiError(422, "no_seed_design",
                               "session has no baseline design to seed a solve from")
            base = self._box_record
            params = replace(base.params, seed=base.seed if seed is None else seed)
            self._status = "solving"
            self._last_error = None
            started_at = self._revision

        def work():
            box, trace = solve_box(self.problem, self.seed_point, params)
            purity = validate_box(self.problem, box, PURITY_SAMPLES, seed=params.seed + 1)
            return BoxRecord(box=box, mu=mu(box, self.problem), purity=purity,
                             seed=params.seed, params=params), trace

        self._spawn(work)
        return started_at

    def _check_mutable(self, expected_revision: Optional[int]) -> None:
        if self._status == "solving":
            raise ApiError(409, "busy", "a mutation is already in flight")
        if expected_revision is not None and expected_revision != self._revision:
            raise ApiError(
                409, "stale_revision",
                f"request was computed against revision {expected_revision}, "
                f"session is at {self._revision}",
            )

    def _spawn(self, work) -> None:
        def run():
            try:
                record, trace = work()
            except SolspaceError as exc:
                with self._lock:
                    self._status = "idle"
                    self._last_error = {"code": type(exc).__name__, "message": str(exc)}
                return
            with self._lock:
                self._box_record = record
                self._trace = trace
                self._revision += 1
                self._status = "idle"

        threading.Thread(target=run, daemon=True).start()

    def wait_idle(self, timeout: float = 60.0) -> None:
        """Test helper: block until no mutation is in flight."""
        import time

        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._lock:
                if self._status == "idle":
                    return
            time.sleep(0.01)
        raise TimeoutError("mutation did not finish in time")


_PLACEHOLDER_INDEX = """<!doctype html>
<html><head><title>solspace</title></head>
<body><h1>solspace API</h1>
<p>No UI bundle found. JSON endpoints:</p>
<ul>
<li>GET /api/problem, /api/box, /api/trace, /api/baseline</li>
<li>GET /api/section?i=&amp;j=&amp;n=&amp;span=</li>
<li>POST /api/tradeoff {dv, lower, upper, revision?}</li>
<li>POST /api/solve {seed?, revision?}</li>
</ul></body></html>
"""

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".json": "application/json",
    ".png": "image/png",
    ".map": "application/json",
}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "solspace"

    # The session and static root hang off the server object.

    def log_message(self, format, *args):
        pass

    # -- plumbing ----------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, err: ApiError) -> None:
        self._send_json(err.status, {"code": err.code, "message": err.message})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            obj = json.loads(raw) if raw else {}
        except ValueError:
            raise ApiError(400, "malformed_body", "request body is not valid JSON")
        if not isinstance(obj, dict):
            raise ApiError(400, "malformed_body", "request body must be a JSON object")
        return obj

    @property
    def session(self) -> RunSession:
        return self.server.session

    # -- routes ------------------------------------------------------------

    def do_GET(self):
        try:
            url = urlparse(self.path)
            if url.path.startswith("/api/"):
                self._api_get(url)
            else:
                self._static(url.path)
        except ApiError as err:
            self._send_error_json(err)
        except BrokenPipeError:
            pass

    def do_POST(self):
        try:
            url = urlparse(self.path)
            if url.path == "/api/tradeoff":
                self._post_tradeoff()
            elif url.path == "/api/solve":
                self._post_solve()
            else:
                raise ApiError(404, "not_found", f"no POST endpoint {url.path}")
        except ApiError as err:
            self._send_error_json(err)
        except BrokenPipeError:
            pass

    def _api_get(self, url) -> None:
        record, trace, revision, status, last_error = self.session.snapshot()
        if url.path == "/api/problem":
            self._send_json(200, {
                "revision": revision,
                "problem": problem_to_dict(self.session.problem),
            })
        elif url.path == "/api/box":
            payload = record.to_jsonable()
            payload.update(revision=revision, status=status, last_error=last_error)
            self._send_json(200, payload)
        elif url.path == "/api/trace":
            self._send_json(200, {"revision": revision, "trace": trace.to_jsonable()})
        elif url.path == "/api/baseline":
            if self.session.baseline is None:
                raise ApiError(404, "no_baseline", "run has no baseline.json")
            self._send_json(200, {
                "revision": revision,
                "baseline": self.session.baseline.to_jsonable(),
            })
        elif url.path == "/api/section":
            self._get_section(url, record, revision)
        else:
            raise ApiError(404, "not_found", f"no GET endpoint {url.path}")

    def _get_section(self, url, record: BoxRecord, revision: int) -> None:
        problem = self.session.problem
        query = parse_qs(url.query)

        def q_int(name, default=None):
            if name not in query:
                if default is None:
                    raise ApiError(400, "malformed_body", f"missing query parameter {name}")
                return default
            try:
                return int(query[name][0])
            except ValueError:
                raise ApiError(400, "malformed_body", f"{name} must be an integer")

        i = q_int("i")
        j = q_int("j")
        n = q_int("n", 1000)
        span = query.get("span", ["design_space"])[0]
        if span not in SPANS:
            raise ApiError(400, "malformed_body", f"span must be one of {SPANS}")
        d = problem.dimension
        if i == j or not (0 <= i < d) or not (0 <= j < d) or n < 0:
            raise ApiError(400, "malformed_body",
                           f"need two distinct dims below {d} and n >= 0")
        # Classification runs outside the lock; the revision in the payload is
        # the one the box snapshot came from, so clients can spot staleness.
        section = make_section(problem, record.box, (i, j), n=n,
                               seed=record.seed, span=span)
        payload = section.to_jsonable()
        payload["revision"] = revision
        self._send_json(200, payload)

    def _post_tradeoff(self) -> None:
        body = self._read_body()
        for key in ("dv", "lower", "upper"):
            if key not in body:
                raise ApiError(400, "malformed_body", f"missing key {key!r}")
        if not isinstance(body["dv"], str):
            raise ApiError(400, "malformed_body", "dv must be a string")
        lower, upper = body["lower"], body["upper"]
        if isinstance(lower, bool) or isinstance(upper, bool) or \
                not isinstance(lower, (int, float)) or not isinstance(upper, (int, float)):
            raise ApiError(400, "malformed_body", "lower and upper must be numbers")
        expected = self._optional_revision(body)
        revision = self.session.begin_tradeoff(body["dv"], float(lower), float(upper), expected)
        self._send_json(202, {"revision": revision, "status": "solving"})

    def _post_solve(self) -> None:
        body = self._read_body()
        seed = body.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
            raise ApiError(400, "malformed_body", "seed must be an integer")
        expected = self._optional_revision(body)
        revision = self.session.begin_solve(seed, expected)
        self._send_json(202, {"revision": revision, "status": "solving"})

    @staticmethod
    def _optional_revision(body: dict) -> Optional[int]:
        revision = body.get("revision")
        if revision is not None and (isinstance(revision, bool) or not isinstance(revision, int)):
            raise ApiError(400, "malformed_body", "revision must be an integer")
        return revision

    # -- static UI ---------------------------------------------------------

    def _static(self, path: str) -> None:
        root: Optional[Path] = self.server.static_root
        if path in ("", "/"):
            path = "/index.html"
        if root is not None:
            target = (root / path.lstrip("/")).resolve()
            if target.is_file() and target.is_relative_to(root.resolve()):
                body = target.read_bytes()
                ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
                self.send_response(200)
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
        if path == "/index.html":
            body = _PLACEHOLDER_INDEX.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "text/html; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        self._send_json(404, {"code": "not_found", "message": f"no file {path}"})


class RunServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, addr, session: RunSession, static_root: Optional[Path] = None):
        super().__init__(addr, _Handler)
        self.session = session
        self.static_root = static_root


def find_static_root() -> Optional[Path]:
    """UI bundle search order: $SOLSPACE_UI, then ./frontend/dist."""
    import os

    env = os.environ.get("SOLSPACE_UI")
    candidates = [Path(env)] if env else []
    candidates.append(Path("frontend") / "dist")
    for cand in candidates:
        if (cand / "index.html").is_file():
            return cand
    return None


def session_from_run_dir(problem: Problem, run_dir: Path) -> RunSession:
    run_dir = Path(run_dir)
    record = BoxRecord.from_jsonable(json.loads((run_dir / "box.json").read_text()))
    trace_path = run_dir / "trace.json"
    trace = (trace_from_jsonable(json.loads(trace_path.read_text()))
             if trace_path.is_file() else SolverTrace())
    baseline = None
    if (run_dir / "baseline.json").is_file():
        baseline = load_baseline_record(run_dir / "baseline.json")
    seed_point = baseline.x_baseline if baseline is not None else problem.x_baseline
    return RunSession(problem, record, trace, baseline=baseline, seed_point=seed_point)


def make_server(host: str, port: int, problem: Problem, run_dir,
                static_root: Optional[Path] = None) -> RunServer:
    session = session_from_run_dir(problem, Path(run_dir))
    if static_root is None:
        static_root = find_static_root()
    return RunServer((host, port), session, static_root)


def serve_run(host: str, port: int, problem: Problem, run_dir) -> None:
    server = make_server(host, port, problem, run_dir)
    host_shown, port_shown = server.server_address[:2]
    ui = server.static_root or "builtin placeholder"
    print(f"serving {run_dir} on http://{host_shown}:{port_shown}/ (ui: {ui})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
