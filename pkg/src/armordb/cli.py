"""Command-line client: one-shot commands, script replay with expectation
directives, and porcelain output for golden transcripts.

Commands use the human text form (``ADD CLASS Sphere``); the client name
and target reference come from flags. Script files (.armorscript) hold one
command per line plus optional directives:

    #expect code=201
    #expect names=ex:Corridor,ex:Kitchen

Each directive checks the immediately preceding response. Exit codes:
0 all responses succeeded (or matched an expectation), 1 unexpected
response failure, 3 connection failure, 4 expectation failure, 5 usage
error.
"""

from __future__ import annotations

import argparse
import socket
import sys

from .errors import ArmorError
from .protocol import (
    CommandRequest,
    CommandResponse,
    decode_response,
    encode,
    error_registry,
    parse_command_text,
)

EXIT_OK = 0
EXIT_FAILED_RESPONSE = 1
EXIT_CONNECT = 3
EXIT_EXPECTATION = 4
EXIT_USAGE = 5


class Connection:
    def __init__(self, host: str, port: int):
        self.sock = socket.create_connection((host, port), timeout=30)
        self.rfile = self.sock.makefile("r", encoding="utf-8", newline="\n")
        self.wfile = self.sock.makefile("w", encoding="utf-8", newline="\n")

    def roundtrip(self, request: CommandRequest) -> tuple:
        line = encode(request)
        self.wfile.write(line + "\n")
        self.wfile.flush()
        reply = self.rfile.readline()
        if not reply:
            raise ConnectionError("server closed the connection")
        return reply.rstrip("\n"), decode_response(reply.rstrip("\n"))

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass


def _human(response: CommandResponse) -> str:
    if response.success:
        parts = [
            "ok",
            f"consistent={'true' if response.consistent else 'false'}",
            f"applied={'true' if response.applied else 'false'}",
            f"revision={response.revision}",
        ]
        if response.queried_names:
            parts.append("names=" + ",".join(response.queried_names))
        if response.error_description:
            return " ".join(parts) + "\n" + response.error_description
        return " ".join(parts)
    meaning = error_registry().get(response.error_code, "?")
    return (
        f"error {response.error_code} {meaning}: {response.error_description} "
        f"(consistent={'true' if response.consistent else 'false'})"
    )


def _check_expect(directive: str, response: CommandResponse | None) -> str | None:
    """None when the expectation holds, else a failure message."""
    if response is None:
        return "expectation before any response"
    body = directive[len("#expect"):].strip()
    key, sep, value = body.partition("=")
    if not sep:
        return f"malformed directive {directive!r}"
    key = key.strip()
    value = value.strip()
    if key == "code":
        try:
            wanted = int(value)
        except ValueError:
            return f"malformed code in {directive!r}"
        if response.error_code != wanted:
            return f"expected code={wanted}, got {response.error_code}"
        return None
    if key == "names":
        wanted = tuple(v for v in value.split(",") if v) if value else ()
        if tuple(response.queried_names) != wanted:
            got = ",".join(response.queried_names)
            return f"expected names={value}, got {got or '(none)'}"
        return None
    return f"unknown expectation key {key!r} in {directive!r}"


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="armordb-cli",
        description="Client for the armordb knowledge service.",
    )
    parser.add_argument("--client", default="cli", help="client name (lease identity)")
    parser.add_argument("--ref", default="default", help="target reference name")
    parser.add_argument("--addr", default="127.0.0.1:8421", help="server host:port")
    parser.add_argument("--script", help="script file to replay (.armorscript)")
    parser.add_argument(
        "--porcelain", action="store_true",
        help="print raw wire response lines (bit-exact, replayable)",
    )
    parser.add_argument("command", nargs="?", help="one command in text form")
    options = parser.parse_args(argv)

    if options.command and options.script:
        print("give either a command or --script, not both", file=sys.stderr)
        return EXIT_USAGE
    host, _, port_text = options.addr.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"bad --addr {options.addr!r}, need host:port", file=sys.stderr)
        return EXIT_USAGE

    if options.command is not None:
        lines = [options.command]
    elif options.script:
        try:
            with open(options.script, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            print(f"cannot read script: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        lines = sys.stdin.read().splitlines()

    try:
        conn = Connection(host, int(port_text))
    except OSError as exc:
        print(f"cannot connect to {options.addr}: {exc}", file=sys.stderr)
        return EXIT_CONNECT

    last_response: CommandResponse | None = None
    last_expected = True
    any_unexpected_failure = False
    try:
        for raw in lines:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#expect"):
                problem = _check_expect(line, last_response)
                if problem is not None:
                    print(f"expectation failed: {problem}", file=sys.stderr)
                    return EXIT_EXPECTATION
                last_expected = True
                continue
            if line.startswith("#"):
                continue
            if last_response is not None and not last_expected and not last_response.success:
                any_unexpected_failure = True
            try:
                command, primary, secondary, args = parse_command_text(line)
            except ArmorError as exc:
                print(f"bad command {line!r}: {exc.message}", file=sys.stderr)
                return EXIT_USAGE
            request = CommandRequest(
                client_name=options.client,
                reference_name=options.ref,
                command=command,
                primary_spec=primary,
                secondary_spec=secondary,
                args=tuple(args),
            )
            try:
                wire, last_response = conn.roundtrip(request)
            except (OSError, ConnectionError) as exc:
                print(f"connection lost: {exc}", file=sys.stderr)
                return EXIT_CONNECT
            last_expected = False
            print(wire if options.porcelain else _human(last_response))
        if last_response is not None and not last_expected and not last_response.success:
            any_unexpected_failure = True
    finally:
        conn.close()
    return EXIT_FAILED_RESPONSE if any_unexpected_failure else EXIT_OK


def main() -> None:
    sys.exit(run())
