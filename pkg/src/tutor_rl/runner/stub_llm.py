"""A tiny canned-response server speaking the tutor wire protocol.

Lets integration tests (and curious users) exercise the HTTP backend without
any model running: POST /api/generate returns a canned action reply,
optionally interleaved with malformed text to stress the fallback chain.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

MODES = ("canned", "flaky", "malformed")
MALFORMED_TEXT = "Hmm, let me think about this for a while longer."


class StubLlmServer:
    """Threaded stub; start() returns the base URL to point a backend at."""

    def __init__(self, port: int = 0, mode: str = "canned", action: int = 0,
                 latency: float = 0.0):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.mode = mode
        self.action = action
        self.latency = latency
        self.request_count = 0
        self._server = ThreadingHTTPServer(("127.0.0.1", port), self._handler())
        self._thread: threading.Thread | None = None

    def _handler(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                if self.path != "/api/generate":
                    self.send_error(404)
                    return
                length = int(self.headers.get("Content-Length", "0"))
                try:
                    body = json.loads(self.rfile.read(length) or b"{}")
                except json.JSONDecodeError:
                    self.send_error(400)
                    return
                stub.request_count += 1
                if stub.latency > 0:
                    time.sleep(stub.latency)
                reply = {
                    "model": body.get("model", "stub"),
                    "response": stub._response_text(),
                    "done": True,
                    "total_duration": int(stub.latency * 1e9),
                }
                payload = json.dumps(reply).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        return Handler

    def _response_text(self) -> str:
        if self.mode == "malformed":
            return MALFORMED_TEXT
        if self.mode == "flaky" and self.request_count % 2 == 1:
            return MALFORMED_TEXT  # every odd request misbehaves
        return f"The best move here is clear. <action>{self.action}</action>"

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> str:
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self.base_url

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.stop()


def serve_forever(port: int, mode: str, action: int, latency: float) -> None:
    server = StubLlmServer(port=port, mode=mode, action=action, latency=latency)
    url = server.start()
    print(f"stub LLM listening on {url} (mode={mode}, action={action})")
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()
