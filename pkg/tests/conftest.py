import threading

import pytest

from armordb.config import ServerConfig
from armordb.protocol import CommandRequest, decode_response, encode
from armordb.server import ArmorServer, Service


@pytest.fixture
def service():
    return Service()


@pytest.fixture
def live_server():
    server = ArmorServer(ServerConfig(listen_port=0), {})
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)


class WireClient:
    """Minimal line client for tests: one connection, FIFO round-trips."""

    def __init__(self, server, client="tester", ref="map"):
        import socket

        host, port = server.server_address[:2]
        self.client = client
        self.ref = ref
        self.sock = socket.create_connection((host, port), timeout=30)
        self.rfile = self.sock.makefile("r", encoding="utf-8", newline="\n")
        self.wfile = self.sock.makefile("w", encoding="utf-8", newline="\n")

    def send_raw(self, line: str) -> str:
        self.wfile.write(line + "\n")
        self.wfile.flush()
        reply = self.rfile.readline()
        assert reply, "server closed the connection"
        return reply.rstrip("\n")

    def request(self, command, primary="", secondary="", args=(), ref=None):
        req = CommandRequest(
            client_name=self.client,
            reference_name=ref or self.ref,
            command=command,
            primary_spec=primary,
            secondary_spec=secondary,
            args=tuple(args),
        )
        return decode_response(self.send_raw(encode(req)))

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass


@pytest.fixture
def wire(live_server):
    clients = []

    def connect(client="tester", ref="map"):
        c = WireClient(live_server, client=client, ref=ref)
        clients.append(c)
        return c

    yield connect
    for c in clients:
        c.close()
