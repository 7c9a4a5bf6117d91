"""Read-only HTTP facade over a completed run directory.

Serves the precomputed JSON artifacts listed in the run manifest; nothing
is computed on demand and no endpoint mutates anything, so responses are
byte-stable.  Routes:

    GET /healthz                     -> {"status": "ok"}
    GET /runs/{id}/trends/daily      -> trends_daily.json
    GET /runs/{id}/sentiment         -> sentiment.json
    GET /runs/{id}/geo/calls         -> geo_calls.json
    GET /runs/{id}/topics            -> topics.json

Unknown runs or resources get 404; a checksum mismatch between the file
and the manifest gets 500.
"""

from __future__ import annotations

import hashlib
import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .errors import ValidationError

ROUTES = {
    "trends/daily": "trends_daily.json",
    "sentiment": "sentiment.json",
    "geo/calls": "geo_calls.json",
    "topics": "topics.json",
}


class RunArtifact:
    """A run directory with its manifest (run id, file checksums)."""

    def __init__(self, run_dir: str | Path):
        self.run_dir = Path(run_dir)
        manifest_path = self.run_dir / "manifest.json"
        if not manifest_path.is_file():
            raise ValidationError(f"no manifest.json under {self.run_dir}")
        with open(manifest_path, encoding="utf-8") as fh:
            self.manifest = json.load(fh)
        self.run_id = self.manifest["run_id"]
        self.checksums: dict[str, str] = self.manifest.get("files", {})

    def read_resource(self, resource: str) -> bytes | None:
        """Bytes of a routed artifact, or None when it is not served.

        Raises ``IOError`` on checksum mismatch so the handler can map it
        to a 500.
        """
        filename = ROUTES.get(resource)
        if filename is None or filename not in self.checksums:
            return None
        path = self.run_dir / filename
        if not path.is_file():
            return None
        data = path.read_bytes()
        if hashlib.sha256(data).hexdigest() != self.checksums[filename]:
            raise IOError(f"checksum mismatch for {filename}")
        return data


class _Handler(BaseHTTPRequestHandler):
    artifact: RunArtifact  # set on the server class

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, payload: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send(status, json.dumps({"error": message}).encode("utf-8"))

    def do_GET(self):
        artifact = self.server.artifact  # type: ignore[attr-defined]
        path = self.path.split("?", 1)[0].strip("/")
        if path == "healthz":
            self._send(200, b'{"status": "ok"}')
            return
        parts = path.split("/", 2)
        if len(parts) < 3 or parts[0] != "runs":
            self._send_error_json(404, "unknown path")
            return
        run_id, resource = parts[1], parts[2]
        if run_id != artifact.run_id:
            self._send_error_json(404, f"unknown run {run_id!r}")
            return
        try:
            data = artifact.read_resource(resource)
        except IOError as e:
            self._send_error_json(500, str(e))
            return
        if data is None:
            self._send_error_json(404, f"unknown resource {resource!r}")
            return
        self._send(200, data)

    def do_POST(self):
        self._send_error_json(405, "read-only facade")

    do_PUT = do_DELETE = do_PATCH = do_POST


def create_server(run_dir: str | Path, port: int = 8080) -> ThreadingHTTPServer:
    """Bind a server for the run directory; ``port=0`` picks a free port."""
    artifact = RunArtifact(run_dir)
    server = ThreadingHTTPServer(("127.0.0.1", port), _Handler)
    server.artifact = artifact  # type: ignore[attr-defined]
    return server


def serve(run_dir: str | Path, port: int = 8080) -> None:
    """Serve until interrupted."""
    server = create_server(run_dir, port)
    host, bound_port = server.server_address[:2]
    print(f"serving run {server.artifact.run_id} on http://{host}:{bound_port}")  # type: ignore[attr-defined]
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
