import json
import signal
import socket
import subprocess
import sys
import threading
import time

import pytest

from armordb import ofn
from armordb.config import ConfigError, ServerConfig
from armordb.protocol import CommandRequest, decode_response, encode
from armordb.server import ArmorServer, Service, preload_references


class TestWireBasics:
    def test_create_add_query(self, wire):
        client = wire(client="nodeA")
        assert client.request("CREATE").success
        assert client.request("ADD", "CLASS", "", ["Sphere"]).success
        assert client.request(
            "ADD", "OBJECTPROP", "INDIVIDUAL", ["hasNorth", "LivingRoom", "Corridor"]
        ).success
        response = client.request("QUERY", "OBJECTPROP", "IND", ["hasNorth", "LivingRoom"])
        assert response.queried_names == ("ex:Corridor",)
        assert response.consistent

    def test_malformed_line_keeps_connection_open(self, wire):
        client = wire()
        reply = decode_response(client.send_raw("this is not json"))
        assert reply.error_code == 100
        assert client.request("CREATE").success  # same connection still works

    def test_unknown_command_code(self, wire):
        client = wire()
        line = json.dumps({
            "client_name": "t", "reference_name": "map", "command": "FROB",
            "primary_spec": "", "secondary_spec": "", "args": [],
        })
        reply = decode_response(client.send_raw(line))
        assert reply.error_code == 101

    def test_per_connection_fifo(self, wire):
        client = wire()
        client.request("CREATE")
        # pipeline a tagged burst and check responses arrive in order
        requests = [
            encode(CommandRequest("t", "map", "ADD", "CLASS", "", (f"Tag{i}",)))
            for i in range(40)
        ]
        client.wfile.write("\n".join(requests) + "\n")
        client.wfile.flush()
        revisions = []
        for _ in requests:
            reply = decode_response(client.rfile.readline().rstrip("\n"))
            assert reply.success
            revisions.append(reply.revision)
        assert revisions == sorted(revisions) == list(range(1, 41))

    def test_hierarchy_queries_over_wire(self, wire):
        client = wire()
        client.request("CREATE")
        for sub, sup in (("Dog", "Mammal"), ("Mammal", "Animal"), ("Cat", "Mammal")):
            assert client.request("ADD", "CLASS", "CLASS", [sub, sup]).success
        assert client.request("ADD", "EQUIV", "CLASS", ["Doggo", "Dog"]).success
        sup = client.request("QUERY", "CLASS", "CLASS", ["Dog", "sup"])
        assert sup.queried_names == ("ex:Mammal",)
        sub = client.request("QUERY", "CLASS", "CLASS", ["Mammal", "sub"])
        assert sub.queried_names == ("ex:Cat", "ex:Dog", "ex:Doggo")
        equiv = client.request("QUERY", "CLASS", "CLASS", ["Dog", "equiv"])
        assert equiv.queried_names == ("ex:Doggo",)
        unknown = client.request("QUERY", "CLASS", "CLASS", ["Ghost", "sup"])
        assert unknown.error_code == 204

    def test_two_connections_same_client_share_lease(self, wire):
        first = wire(client="clientA")
        second = wire(client="clientA")
        first.request("CREATE")
        assert first.request("MOUNT").success
        assert second.request("ADD", "CLASS", "", ["FromTwin"]).success
        assert first.request("ADD", "CLASS", "", ["FromOriginal"]).success

    def test_undecodable_bytes_get_error_response(self, live_server):
        host, port = live_server.server_address[:2]
        with socket.create_connection((host, port), timeout=10) as sock:
            sock.sendall(b"\xff\xfe\x00garbage\n")
            reply = sock.makefile("r", encoding="utf-8").readline()
        response = decode_response(reply.rstrip("\n"))
        assert response.error_code == 100

    def test_oversized_line_rejected(self, live_server):
        host, port = live_server.server_address[:2]
        with socket.create_connection((host, port), timeout=10) as sock:
            sock.sendall(b"x" * (1 << 20) + b"yy\n")
            reply = sock.makefile("r", encoding="utf-8").readline()
        assert decode_response(reply.rstrip("\n")).error_code == 100


class TestLoadSave:
    def test_load_save_round_trip(self, wire, tmp_path):
        doc = tmp_path / "map.ofn"
        doc.write_text(
            "Prefix(ex:=<http://example.org/armordb#>)\n"
            "Ontology(\n"
            "SubClassOf(ex:Dog ex:Animal)\n"
            "ClassAssertion(ex:Dog ex:rex)\n"
            ")\n",
            encoding="utf-8",
        )
        client = wire()
        client.request("CREATE")
        assert client.request("LOAD", "FILE", "", [str(doc)]).success
        response = client.request("QUERY", "CLASS", "IND", ["rex"])
        assert response.queried_names == ("ex:Animal", "ex:Dog")

        out = tmp_path / "saved.ofn"
        assert client.request("SAVE", "FILE", "", [str(out)]).success
        saved = ofn.parse(out.read_text(encoding="utf-8"))
        assert set(saved.axioms) == set(ofn.parse(doc.read_text(encoding="utf-8")).axioms)

    def test_load_missing_file(self, wire):
        client = wire()
        client.request("CREATE")
        response = client.request("LOAD", "FILE", "", ["/no/such/file.ofn"])
        assert response.error_code == 301

    def test_load_parse_error_code(self, wire, tmp_path):
        bad = tmp_path / "bad.ofn"
        bad.write_text("Ontology( SubClassOf(ex:A )", encoding="utf-8")
        client = wire()
        client.request("CREATE")
        response = client.request("LOAD", "FILE", "", [str(bad)])
        assert response.error_code == 300
        assert "line" in response.error_description

    def test_load_replaces_previous_content(self, wire, tmp_path):
        doc = tmp_path / "tiny.ofn"
        doc.write_text("Ontology( Declaration(Class(ex:Fresh)) )", encoding="utf-8")
        client = wire()
        client.request("CREATE")
        client.request("ADD", "CLASS", "", ["Stale"])
        client.request("LOAD", "FILE", "", [str(doc)])
        dump = client.request("DUMP").error_description
        assert "ex:Fresh" in dump and "ex:Stale" not in dump

    def test_dump_matches_save(self, wire, tmp_path):
        client = wire()
        client.request("CREATE")
        client.request("ADD", "CLASS", "", ["Sphere"])
        dump = client.request("DUMP").error_description
        out = tmp_path / "dump.ofn"
        client.request("SAVE", "FILE", "", [str(out)])
        assert out.read_text(encoding="utf-8") == dump

    def test_save_io_error(self, wire):
        client = wire()
        client.request("CREATE")
        response = client.request("SAVE", "FILE", "", ["/no/such/dir/out.ofn"])
        assert response.error_code == 301


class TestPreload:
    def test_preload_available_at_startup(self, tmp_path):
        doc = tmp_path / "map.ofn"
        doc.write_text("Ontology( ClassAssertion(ex:Dog ex:rex) )", encoding="utf-8")
        config = ServerConfig(listen_port=0, preload=[("map", str(doc))])
        service = Service(config)
        preload_references(service, config)
        response = service.dispatch(
            CommandRequest("t", "map", "QUERY", "IND", "CLASS", ("Dog",))
        )
        assert response.queried_names == ("ex:rex",)

    def test_preload_missing_file_is_config_error(self, tmp_path):
        config = ServerConfig(listen_port=0, preload=[("map", str(tmp_path / "gone.ofn"))])
        service = Service(config)
        with pytest.raises(ConfigError):
            preload_references(service, config)


class TestExitCodes:
    def test_config_error_exits_1(self, tmp_path):
        conf = tmp_path / "bad.conf"
        conf.write_text("reasoner = pellet\n", encoding="utf-8")
        proc = subprocess.run(
            [sys.executable, "-m", "armordb.server", "--config", str(conf)],
            capture_output=True, text=True, timeout=30,
        )
        assert proc.returncode == 1
        assert "builtin-el" in proc.stderr

    def test_bind_failure_exits_2(self):
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            proc = subprocess.run(
                [sys.executable, "-m", "armordb.server", "--port", str(port)],
                capture_output=True, text=True, timeout=30,
            )
            assert proc.returncode == 2
        finally:
            blocker.close()

    def test_clean_shutdown_exits_0(self, tmp_path):
        proc = subprocess.Popen(
            [sys.executable, "-m", "armordb.server", "--port", "0"],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        )
        time.sleep(1.0)
        proc.send_signal(signal.SIGTERM)
        proc.wait(timeout=30)
        assert proc.returncode == 0


class TestShutdown:
    def test_inflight_requests_complete(self):
        server = ArmorServer(ServerConfig(listen_port=0), {})
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        host, port = server.server_address[:2]
        sock = socket.create_connection((host, port), timeout=10)
        rfile = sock.makefile("r", encoding="utf-8")
        sock.sendall((encode(CommandRequest("t", "map", "CREATE")) + "\n").encode())
        reply = decode_response(rfile.readline().rstrip("\n"))
        assert reply.success

        # shutdown stops the accept loop; the open connection still answers
        shutdown_thread = threading.Thread(target=server.shutdown)
        shutdown_thread.start()
        time.sleep(0.05)
        sock.sendall((encode(CommandRequest("t", "map", "DUMP")) + "\n").encode())
        reply = decode_response(rfile.readline().rstrip("\n"))
        assert reply.success
        sock.close()
        shutdown_thread.join(timeout=5)
        server.server_close()
        thread.join(timeout=5)
        assert not thread.is_alive()


class TestErrorCodesOverWire:
    def test_reserved_name_add_is_103(self, wire):
        client = wire()
        client.request("CREATE")
        response = client.request("ADD", "CLASS", "", ["owl:Thing"])
        assert response.error_code == 103
        assert "reserved" in response.error_description

    def test_bad_entity_name_is_100(self, wire):
        client = wire()
        client.request("CREATE")
        response = client.request("ADD", "CLASS", "", ["9bad name"])
        assert response.error_code == 100

    def test_unknown_flag_is_100(self, wire):
        client = wire()
        client.request("CREATE")
        response = client.request("CONFIG", "FLAG", "", ["shiny", "true"])
        assert response.error_code == 100

    def test_enabling_continuous_update_refreshes_stale_snapshot(self, wire):
        client = wire()
        client.request("CREATE")
        client.request("CONFIG", "FLAG", "", ["continuous_reasoner_update", "false"])
        client.request("ADD", "DISJOINT", "CLASS", ["A", "B"])
        client.request("ADD", "INDIVIDUAL", "CLASS", ["a", "A"])
        stale = client.request("ADD", "INDIVIDUAL", "CLASS", ["a", "B"])
        assert stale.consistent is True
        refreshed = client.request(
            "CONFIG", "FLAG", "", ["continuous_reasoner_update", "true"]
        )
        assert refreshed.consistent is False
