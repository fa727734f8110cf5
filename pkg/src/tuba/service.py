"""Minimal HTTP/JSON facade over the core operations.

Routes (JSON bodies, CORS enabled):

* ``POST /models``                 upload a model file, returns ``{"id": ...}``
* ``GET  /models/{id}``            canonical model document
* ``POST /models/{id}/cluster``    ``{target, metric, linkage, weights?, subset?, dist?, format?}``
* ``POST /models/{id}/cut``        ``{dendrogram?, tolerance? | k?, ...cluster settings when re-clustering}``
* ``POST /models/{id}/decide``     ``{dist, partition?, rule, mode?, weights?, subset?}``

Model ids are content hashes, so uploads are idempotent. Every response body
is exactly the corresponding CLI output (same serialization path) plus a
trailing newline. Computation is pure; the model store is the only shared
state and is lock-guarded.
"""

from __future__ import annotations

import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from tuba import canonical, workflows
from tuba.clustering import parse_dendrogram
from tuba.decisions import Mode, Rule
from tuba.errors import ModelFormatError, TubaError
from tuba.metrics import Kind, Linkage, MetricKind
from tuba.model import UtilityModel
from tuba.modelfile import parse_dist, parse_model, parse_partition, serialize_model


class ModelStore:
    """In-memory model registry keyed by content hash.

    With a ``state_dir``, uploads are also snapshotted as ``{id}.json`` and
    reloaded on startup. Reads are unrestricted; uploads are atomic.
    """

    def __init__(self, state_dir: str | None = None):
        self._models: dict[str, UtilityModel] = {}
        self._lock = threading.Lock()
        self._state_dir = Path(state_dir) if state_dir else None
        if self._state_dir:
            self._state_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(self._state_dir.glob("*.json")):
                self._models[path.stem] = parse_model(path.read_text("utf-8"))

    def put(self, model: UtilityModel) -> str:
        doc = serialize_model(model)
        model_id = hashlib.sha256(doc.encode("utf-8")).hexdigest()[:12]
        with self._lock:
            self._models[model_id] = model
            if self._state_dir:
                tmp = self._state_dir / f".{model_id}.tmp"
                tmp.write_text(doc + "\n", "utf-8")
                tmp.replace(self._state_dir / f"{model_id}.json")
        return model_id

    def get(self, model_id: str) -> UtilityModel | None:
        with self._lock:
            return self._models.get(model_id)


class _HTTPError(Exception):
    def __init__(self, status: int, message: str, **extra):
        self.status = status
        self.payload = {"error": _STATUS_NAMES.get(status, "error"),
                        "message": message, **extra}
        super().__init__(message)


_STATUS_NAMES = {
    400: "bad_request",
    404: "not_found",
    415: "unsupported_media_type",
    422: "unprocessable",
    405: "method_not_allowed",
}


def _enum(enum_cls, raw, field: str):
    try:
        return enum_cls(raw)
    except (ValueError, TypeError):
        allowed = [e.value for e in enum_cls]
        raise _HTTPError(400, f"{field} must be one of {allowed}, got {raw!r}")


def _subset(body: dict) -> tuple[tuple[str, ...] | None, tuple[str, ...] | None]:
    subset = body.get("subset")
    if subset is None:
        return None, None
    if not isinstance(subset, dict):
        raise _HTTPError(400, "subset must be an object")
    unknown = set(subset) - {"actions", "hypotheses"}
    if unknown:
        raise _HTTPError(400, f"unknown subset keys {sorted(unknown)}")

    def ids(key):
        value = subset.get(key)
        if value is None:
            return None
        if (not isinstance(value, list)
                or not all(isinstance(x, str) for x in value)):
            raise _HTTPError(400, f"subset.{key} must be a list of strings")
        return tuple(value)

    return ids("actions"), ids("hypotheses")


def _weights(body: dict):
    weights = body.get("weights")
    if weights is None:
        return None
    if (not isinstance(weights, list)
            or not all(isinstance(w, (int, float)) and not isinstance(w, bool)
                       for w in weights)):
        raise _HTTPError(400, "weights must be a list of numbers")
    return tuple(float(w) for w in weights)


def _dist(body: dict, field: str = "dist"):
    raw = body.get(field)
    if raw is None:
        return None
    return parse_dist(raw)


class TubaRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "tuba"

    # Quiet by default; the test suite and CLI notice say enough.
    def log_message(self, fmt, *args):
        pass

    @property
    def store(self) -> ModelStore:
        return self.server.store  # type: ignore[attr-defined]

    @property
    def ui_dir(self) -> Path | None:
        return self.server.ui_dir  # type: ignore[attr-defined]

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _respond(self, status: int, body: bytes,
                 content_type: str = "application/json") -> None:
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _respond_json(self, status: int, doc: str) -> None:
        self._respond(status, (doc + "\n").encode("utf-8"))

    def _fail(self, err: _HTTPError) -> None:
        self._respond_json(err.status, canonical.dumps(err.payload))

    def _json_body(self) -> dict:
        ctype = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        if ctype != "application/json":
            raise _HTTPError(415, "requests must be application/json")
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise _HTTPError(400, f"malformed JSON body: {exc}") from None
        if not isinstance(body, dict):
            raise _HTTPError(400, "request body must be a JSON object")
        return body

    def _model_or_404(self, model_id: str) -> UtilityModel:
        model = self.store.get(model_id)
        if model is None:
            raise _HTTPError(404, f"unknown model id {model_id!r}")
        return model

    # -- routes ------------------------------------------------------------

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        try:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if len(parts) == 2 and parts[0] == "models":
                model = self._model_or_404(parts[1])
                self._respond_json(200, workflows.model_output(model))
                return
            if self.ui_dir and self._serve_static(parts):
                return
            raise _HTTPError(404, f"no route for GET {self.path}")
        except _HTTPError as err:
            self._fail(err)

    def _serve_static(self, parts: list[str]) -> bool:
        rel = "/".join(parts) or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())):
            return False
        if not target.is_file():
            return False
        types = {".html": "text/html; charset=utf-8",
                 ".js": "text/javascript; charset=utf-8",
                 ".css": "text/css; charset=utf-8",
                 ".json": "application/json",
                 ".svg": "image/svg+xml"}
        ctype = types.get(target.suffix, "application/octet-stream")
        self._respond(200, target.read_bytes(), ctype)
        return True

    def do_POST(self):
        try:
            body = self._json_body()
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if parts == ["models"]:
                self._post_model(body)
            elif len(parts) == 3 and parts[0] == "models":
                model = self._model_or_404(parts[1])
                handler = {"cluster": self._post_cluster,
                           "cut": self._post_cut,
                           "decide": self._post_decide}.get(parts[2])
                if handler is None:
                    raise _HTTPError(404, f"no route for POST {self.path}")
                handler(model, body)
            else:
                raise _HTTPError(404, f"no route for POST {self.path}")
        except _HTTPError as err:
            self._fail(err)
        except ModelFormatError as exc:
            payload = {"error": "bad_request", "message": str(exc)}
            if exc.violations:
                payload["violations"] = exc.violations
            self._respond_json(400, canonical.dumps(payload))
        except (TubaError, ValueError) as exc:
            self._respond_json(422, canonical.dumps(
                {"error": type(exc).__name__, "message": str(exc)}))

    def _post_model(self, body: dict):
        model = parse_model(body)
        model_id = self.store.put(model)
        self._respond_json(200, canonical.dumps({"id": model_id}))

    def _cluster_settings(self, model, body: dict):
        target = _enum(Kind, body.get("target"), "target")
        metric = _enum(MetricKind, body.get("metric"), "metric")
        linkage = _enum(Linkage, body.get("linkage"), "linkage")
        actions, hypotheses = _subset(body)
        return workflows.cluster(
            model, target, metric, linkage, weights=_weights(body),
            actions=actions, hypotheses=hypotheses, dist=_dist(body))

    def _post_cluster(self, model, body: dict):
        allowed = {"target", "metric", "linkage", "weights", "subset",
                   "dist", "format"}
        unknown = set(body) - allowed
        if unknown:
            raise _HTTPError(400, f"unknown keys {sorted(unknown)}")
        fmt = body.get("format", "json")
        if fmt not in ("json", "text", "svg"):
            raise _HTTPError(400, f"format must be json, text, or svg, got {fmt!r}")
        dendrogram = self._cluster_settings(model, body)
        self._respond_json(200, workflows.dendrogram_output(dendrogram, fmt))

    def _post_cut(self, model, body: dict):
        allowed = {"dendrogram", "tolerance", "k", "target", "metric",
                   "linkage", "weights", "subset", "dist"}
        unknown = set(body) - allowed
        if unknown:
            raise _HTTPError(400, f"unknown keys {sorted(unknown)}")
        if ("tolerance" in body) == ("k" in body):
            raise _HTTPError(400, "pass exactly one of tolerance or k")
        if body.get("dendrogram") is not None:
            dendrogram = parse_dendrogram(body["dendrogram"])
        else:
            dendrogram = self._cluster_settings(model, body)
        actions, hypotheses = _subset(body)
        matrix = workflows.build_matrix(model, _weights(body), actions,
                                        hypotheses)
        axis = (matrix.hypotheses if dendrogram.kind is Kind.HYPOTHESES
                else matrix.actions)
        if set(dendrogram.leaves) != set(axis):
            raise _HTTPError(422, "dendrogram leaves do not match the "
                                  "projected model axis")
        tolerance = body.get("tolerance")
        k = body.get("k")
        if tolerance is not None and (isinstance(tolerance, bool)
                                      or not isinstance(tolerance, (int, float))):
            raise _HTTPError(400, "tolerance must be a number")
        if k is not None and (isinstance(k, bool) or not isinstance(k, int)):
            raise _HTTPError(400, "k must be an integer")
        partition = workflows.cut(
            dendrogram, matrix,
            tolerance=float(tolerance) if tolerance is not None else None,
            k=k)
        self._respond_json(200, workflows.partition_output(partition))

    def _post_decide(self, model, body: dict):
        allowed = {"dist", "partition", "rule", "mode", "weights", "subset"}
        unknown = set(body) - allowed
        if unknown:
            raise _HTTPError(400, f"unknown keys {sorted(unknown)}")
        if body.get("dist") is None:
            raise _HTTPError(400, "dist is required")
        dist = parse_dist(body["dist"])
        partition = (parse_partition(body["partition"])
                     if body.get("partition") is not None else None)
        rule = _enum(Rule, body.get("rule", "eu"), "rule")
        mode = _enum(Mode, body.get("mode", "conditional"), "mode")
        actions, hypotheses = _subset(body)
        matrix = workflows.build_matrix(model, _weights(body), actions,
                                        hypotheses)
        report = workflows.decide(matrix, dist, partition, rule, mode)
        self._respond_json(200, workflows.report_output(report))


def make_server(host: str, port: int, state_dir: str | None = None,
                ui_dir: str | None = None) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), TubaRequestHandler)
    server.daemon_threads = True
    server.store = ModelStore(state_dir)  # type: ignore[attr-defined]
    server.ui_dir = Path(ui_dir) if ui_dir else None  # type: ignore[attr-defined]
    return server


def serve_forever(host: str, port: int, state_dir: str | None = None,
                  ui_dir: str | None = None) -> None:
    make_server(host, port, state_dir, ui_dir).serve_forever()
