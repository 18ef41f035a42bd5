import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


class StubAdvisor:
    """Tiny policy_http.v1 endpoint with scriptable behavior."""

    def __init__(self):
        self.requests: list[dict] = []
        self.responder = lambda prompt: "You should fold."
        self.fail_with: int | None = None
        self.raw_body: str | None = None

        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 - stdlib naming
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                stub.requests.append(body)
                if stub.fail_with is not None:
                    self.send_response(stub.fail_with)
                    self.end_headers()
                    return
                if stub.raw_body is not None:
                    payload = stub.raw_body.encode()
                else:
                    text = stub.responder(body.get("prompt", ""))
                    payload = json.dumps({"text": text}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self) -> str:
        host, port = self.server.server_address
        return f"http://{host}:{port}/"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_advisor():
    stub = StubAdvisor()
    yield stub
    stub.close()
