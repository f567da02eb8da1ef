"""The network service: connection handling, request dispatch, and the
injected-procedure executor.

Each connection is processed sequentially (read line, decode, dispatch,
respond, strictly FIFO); concurrency across connections is coordinated
only inside the reference map. A malformed or failing request becomes an
error response, never a dropped connection.
"""

from __future__ import annotations

import argparse
import signal
import socketserver
import sys
import threading

from . import ofn
from .config import ConfigError, ServerConfig, load_config
from .errors import (
    ArmorError,
    FileIOError,
    InternalError,
    MalformedRequestError,
    ProcedureFailedError,
    ReferenceBusyError,
    UnknownProcedureError,
)
from .model import ADD, REMOVE, BatchError
from .procedures import (
    BUILTIN_NAMES,
    ProcedureParseError,
    build_abstract_class_axiom,
    load_procedures,
    substitute,
)
from .protocol import (
    CommandRequest,
    CommandResponse,
    build_change_axiom,
    build_query,
    decode,
    encode,
    parse_entity,
)
from .registry import RefFlags, ReferenceMap

MAX_LINE = 1 << 20  # one request line tops out at 1 MiB


class Service:
    """Protocol-level service: dispatches validated requests against the
    reference map. Usable directly (no sockets) for tests and tools."""

    def __init__(self, config: ServerConfig | None = None, procedures: dict | None = None):
        self.config = config or ServerConfig()
        self.refs = ReferenceMap(
            default_flags=RefFlags(
                buffered_manipulation=self.config.buffered_manipulation,
                continuous_reasoner_update=self.config.continuous_reasoner_update,
            ),
            mandatory_mount=self.config.mandatory_mount,
        )
        self.procedures = procedures or {}

    # -- line level --

    def handle_line(self, line: str) -> str:
        try:
            request = decode(line)
        except ArmorError as exc:
            return self.error_line(exc)
        return encode(self.dispatch(request))

    @staticmethod
    def error_line(exc: ArmorError) -> str:
        return encode(CommandResponse(
            success=False, error_code=exc.code, error_description=exc.message
        ))

    # -- request level --

    def dispatch(self, request: CommandRequest) -> CommandResponse:
        try:
            return self._dispatch(request)
        except BatchError as exc:
            # surface the underlying axiom error with its own wire code
            cause = exc.cause if isinstance(exc.cause, ArmorError) else InternalError(str(exc))
            return self._error_response(request, cause)
        except ArmorError as exc:
            return self._error_response(request, exc)
        except Exception as exc:  # containment: never take the server down
            return self._error_response(request, InternalError(f"{type(exc).__name__}: {exc}"))

    def _error_response(self, request: CommandRequest, exc: ArmorError) -> CommandResponse:
        consistent, revision = self._ref_state(request.reference_name)
        return CommandResponse(
            success=False,
            consistent=consistent,
            error_code=exc.code,
            error_description=exc.message,
            applied=False,
            revision=revision,
        )

    def _ref_state(self, name: str):
        try:
            ref = self.refs.get(name)
        except ArmorError:
            return True, 0
        _, inference = ref.published
        return inference.consistent, ref.store.revision

    def _dispatch(self, request: CommandRequest) -> CommandResponse:
        command = request.command
        client = request.client_name
        refname = request.reference_name

        if command == "CREATE":
            self.refs.create_ref(refname)
            return CommandResponse(applied=True)
        if command == "DROP":
            self.refs.drop_ref(client, refname)
            return CommandResponse(applied=True)
        if command == "MOUNT":
            self.refs.mount(client, refname)
            return self._ok(refname)
        if command == "UNMOUNT":
            self.refs.unmount(client, refname)
            return self._ok(refname)

        if command in ("ADD", "REMOVE"):
            axiom = build_change_axiom(request)
            op = ADD if command == "ADD" else REMOVE
            result = self.refs.manipulate(client, refname, [(op, axiom)])
            return self._result_response(result)
        if command == "REPLACE":
            role, subject, new, old = (parse_entity(a) for a in request.args)
            result = self.refs.replace_value(client, refname, role, subject, new, old)
            return self._result_response(result)
        if command == "QUERY":
            descriptor = build_query(request)
            names = self.refs.query(refname, descriptor)
            consistent, revision = self._ref_state(refname)
            return CommandResponse(
                consistent=consistent,
                queried_names=tuple(names),
                revision=revision,
            )
        if command == "REASON":
            return self._result_response(self.refs.reason(refname))
        if command == "APPLY":
            return self._result_response(self.refs.apply_buffer(client, refname))
        if command == "CONFIG":
            flag, value = request.args
            if value not in ("true", "false"):
                raise MalformedRequestError(
                    f"flag value must be 'true' or 'false', got {value!r}"
                )
            self.refs.set_flag(client, refname, flag, value == "true")
            return self._ok(refname)
        if command == "LOAD":
            return self._load(client, refname, request.args[0])
        if command == "SAVE":
            return self._save(refname, request.args[0])
        if command == "DUMP":
            text = self._serialized(refname)
            consistent, revision = self._ref_state(refname)
            return CommandResponse(
                consistent=consistent, error_description=text, revision=revision
            )
        if command == "PROC":
            return self.run_procedure(client, refname, request.args[0], request.args[1:])
        raise InternalError(f"unhandled command {command}")

    def _ok(self, refname: str) -> CommandResponse:
        consistent, revision = self._ref_state(refname)
        return CommandResponse(consistent=consistent, applied=True, revision=revision)

    def _result_response(self, result) -> CommandResponse:
        return CommandResponse(
            consistent=result.consistent,
            applied=result.applied,
            revision=result.revision,
        )

    # -- files --

    def _load(self, client, refname, path) -> CommandResponse:
        self.refs.get(refname)  # surface UnknownReference before file errors
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise FileIOError(str(exc)) from None
        model = ofn.parse(text)
        result = self.refs.replace_axioms(client, refname, model.axioms, model.prefixes)
        return self._result_response(result)

    def _serialized(self, refname: str) -> str:
        axioms, prefixes = self.refs.snapshot_for_save(refname)
        return ofn.serialize(ofn.document_for_axioms(axioms, prefixes))

    def _save(self, refname, path) -> CommandResponse:
        text = self._serialized(refname)
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise FileIOError(str(exc)) from None
        return self._ok(refname)

    # -- procedures --

    def run_procedure(self, client, refname, name, args) -> CommandResponse:
        """Execute a registered or built-in procedure under a temporary
        mount; step-level atomicity, no rollback."""
        ref = self.refs.get(refname)
        if name not in self.procedures and name not in BUILTIN_NAMES:
            raise UnknownProcedureError(f"unknown procedure {name!r}")

        acquired = False
        with ref.lock:
            if ref.lease is None:
                self.refs.mount(client, refname)
                acquired = True
            elif ref.lease != client:
                raise ReferenceBusyError(
                    f"reference {refname!r} is mounted by {ref.lease!r}"
                )
        try:
            if name == "abstract-class":
                return self._run_abstract_class(client, refname, args)
            return self._run_macro(client, refname, self.procedures[name], args)
        finally:
            if acquired:
                self.refs.unmount(client, refname)

    def _run_macro(self, client, refname, proc, args) -> CommandResponse:
        if len(args) != len(proc.params):
            raise ProcedureFailedError(
                f"procedure {proc.name!r} takes {len(proc.params)} args, got {len(args)}"
            )
        queried = []
        last = CommandResponse()
        for index, (command, primary, secondary, template) in enumerate(proc.body, start=1):
            step = CommandRequest(
                client_name=client,
                reference_name=refname,
                command=command,
                primary_spec=primary,
                secondary_spec=secondary,
                args=substitute(template, proc.params, args),
            )
            # each step behaves exactly like the equivalent client request
            response = self.dispatch(step)
            if not response.success:
                raise ProcedureFailedError(
                    f"step {index} failed with code {response.error_code}: "
                    f"{response.error_description}"
                )
            queried.extend(response.queried_names)
            last = response
        return CommandResponse(
            consistent=last.consistent,
            queried_names=tuple(sorted(set(queried))),
            applied=last.applied,
            revision=last.revision,
        )

    def _run_abstract_class(self, client, refname, args) -> CommandResponse:
        if len(args) != 2:
            raise ProcedureFailedError("abstract-class takes: individual, new class name")
        individual = parse_entity(args[0])
        new_class = parse_entity(args[1])
        axioms, _ = self.refs.snapshot_for_save(refname)
        _, inference = self.refs.get(refname).published
        axiom = build_abstract_class_axiom(axioms, inference, individual, new_class)
        self.refs.manipulate(client, refname, [(ADD, axiom)])
        result = self.refs.reason(refname)
        return self._result_response(result)


# --------------------------------------------------------------------------
# TCP layer

class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        service = self.server.service  # type: ignore[attr-defined]
        while True:
            try:
                raw = self.rfile.readline(MAX_LINE + 1)
            except (ConnectionError, OSError):
                break
            if not raw:
                break
            if len(raw) > MAX_LINE:
                out = service.error_line(MalformedRequestError("request line too long"))
            else:
                try:
                    out = service.handle_line(raw.decode("utf-8"))
                except UnicodeDecodeError:
                    out = service.error_line(MalformedRequestError("request is not valid UTF-8"))
            try:
                self.wfile.write(out.encode("utf-8") + b"\n")
            except (ConnectionError, OSError):
                break


class ArmorServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, config: ServerConfig, procedures: dict):
        self.service = Service(config, procedures)
        super().__init__((config.listen_address, config.listen_port), _Handler)


def preload_references(service: Service, config: ServerConfig):
    for name, path in config.preload:
        service.refs.create_ref(name)
        try:
            with open(path, encoding="utf-8") as fh:
                model = ofn.parse(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot preload {name!r}: {exc}") from None
        except ArmorError as exc:
            raise ConfigError(f"cannot preload {name!r}: {exc}") from None
        service.refs.replace_axioms("server", name, model.axioms, model.prefixes)


def serve(config: ServerConfig, ready_event: threading.Event | None = None):
    """Run until shutdown (SIGINT/SIGTERM); in-flight requests complete."""
    procedures = {}
    if config.procedures_file:
        try:
            procedures = load_procedures(config.procedures_file)
        except (OSError, ProcedureParseError) as exc:
            raise ConfigError(f"procedures file: {exc}") from None
    server = ArmorServer(config, procedures)
    preload_references(server.service, config)

    def stop(signum, frame):
        threading.Thread(target=server.shutdown, daemon=True).start()

    for sig in (signal.SIGINT, signal.SIGTERM):
        try:
            signal.signal(sig, stop)
        except ValueError:
            pass  # not the main thread (embedded use)
    if ready_event is not None:
        ready_event.set()
    with server:
        server.serve_forever()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="armordb-server",
        description="Multi-ontology knowledge service over a line-oriented protocol.",
    )
    parser.add_argument("--config", help="path to a key = value configuration file")
    parser.add_argument("--addr", help="listen address, overrides the config file")
    parser.add_argument("--port", type=int, help="listen port, overrides the config file")
    options = parser.parse_args(argv)
    try:
        config = load_config(options.config)
        if options.addr:
            config.listen_address = options.addr
        if options.port is not None:
            config.listen_port = options.port
        config.validate()
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        serve(config)
    except OSError as exc:
        print(f"cannot bind {config.listen_address}:{config.listen_port}: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
