"""Competition wire protocol: remote-agent client and server scaffold.

The runner queries each agent once per step.  Remote agents expose
``POST /act`` (observation in, action out) and ``GET /ping``; the optional
``POST /init`` / ``POST /episode_end`` lifecycle calls may be ignored by
agents.  Any late, unreachable, or malformed response is substituted with
Stop -- and the (0, 0) message in the radio mode -- so a broken agent can
never abort a match.
"""

from __future__ import annotations

import http.client
import json
import logging
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlparse

from .engine import Action, Mode, STOP
from .observe import Observation, WireFormatError, decode_observation, encode_observation

logger = logging.getLogger("pommer.protocol")

PROTOCOL_VERSION = "1"
PROTO_HEADER = "X-Pommer-Proto"
DEFAULT_TIMEOUT = 0.1

SUBSTITUTED_MESSAGE = (0, 0)


@dataclass
class EndpointStats:
    requests: int = 0
    timeouts: int = 0
    errors: int = 0

    @property
    def substitutions(self) -> int:
        return self.timeouts + self.errors


@dataclass
class ActOutcome:
    action: Action
    substituted: bool = False
    reason: str | None = None


class AgentEndpoint:
    """A pluggable per-seat decision source: in-process or remote HTTP."""

    def __init__(self, behavior=None, url: str | None = None, timeout: float = DEFAULT_TIMEOUT):
        if (behavior is None) == (url is None):
            raise ValueError("exactly one of behavior/url must be given")
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.behavior = behavior
        self.url = url.rstrip("/") if url else None
        self.timeout = timeout
        self.stats = EndpointStats()
        self._conn: http.client.HTTPConnection | None = None

    @staticmethod
    def in_process(behavior, timeout: float = DEFAULT_TIMEOUT) -> "AgentEndpoint":
        return AgentEndpoint(behavior=behavior, timeout=timeout)

    @staticmethod
    def remote(url: str, timeout: float = DEFAULT_TIMEOUT) -> "AgentEndpoint":
        return AgentEndpoint(url=url, timeout=timeout)

    @property
    def is_remote(self) -> bool:
        return self.url is not None

    # -- low-level HTTP (runs inside a worker thread) --

    def _connection(self) -> http.client.HTTPConnection:
        if self._conn is None:
            parsed = urlparse(self.url)
            self._conn = http.client.HTTPConnection(
                parsed.hostname, parsed.port or 80, timeout=self.timeout
            )
        return self._conn

    def _drop_connection(self) -> None:
        conn, self._conn = self._conn, None
        if conn is not None:
            try:
                conn.close()
            except OSError:
                pass

    def _post(self, path: str, body: bytes, timeout: float | None = None) -> bytes:
        conn = self._connection()
        if timeout is not None:
            conn.timeout = timeout
        conn.request(
            "POST",
            path,
            body=body,
            headers={"Content-Type": "application/json", PROTO_HEADER: PROTOCOL_VERSION},
        )
        response = conn.getresponse()
        payload = response.read()
        if response.status != 200:
            raise RemoteHTTPError(f"status {response.status}")
        return payload


class RemoteHTTPError(RuntimeError):
    pass


def _parse_act_response(payload: bytes, mode: Mode) -> Action:
    try:
        raw = json.loads(payload)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise WireFormatError("body", f"not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise WireFormatError("body", "response must be an object")
    move = raw.get("action")
    if not isinstance(move, int) or isinstance(move, bool) or not 0 <= move <= 5:
        raise WireFormatError("action", f"expected an integer in [0, 5], got {move!r}")
    message = None
    if mode is Mode.TEAM_RADIO:
        msg = raw.get("message")
        if (
            not isinstance(msg, list)
            or len(msg) != 2
            or not all(isinstance(w, int) and not isinstance(w, bool) and 1 <= w <= 8 for w in msg)
        ):
            raise WireFormatError("message", f"expected two integers in [1, 8], got {msg!r}")
        message = (msg[0], msg[1])
    elif "message" in raw and raw["message"] is not None:
        raise WireFormatError("message", "message is only allowed in the radio mode")
    return Action(move, message)


def _substituted(mode: Mode) -> Action:
    return Action(STOP, SUBSTITUTED_MESSAGE if mode is Mode.TEAM_RADIO else None)


def request_act(
    endpoint: AgentEndpoint, obs: Observation, mode: Mode, step: int | None = None
) -> ActOutcome:
    """Query one endpoint for one action; always returns a legal Action."""
    endpoint.stats.requests += 1
    if not endpoint.is_remote:
        try:
            action = endpoint.behavior.act(obs)
            if not isinstance(action, Action):
                action = Action(int(action))
            return ActOutcome(action)
        except Exception as exc:  # behavior bug: substitute, never abort
            endpoint.stats.errors += 1
            logger.warning("in-process agent failed at step %s: %s", step, exc)
            return ActOutcome(_substituted(mode), True, f"behavior error: {exc}")

    box: list = [None]  # payload bytes or exception

    def worker():
        try:
            box[0] = endpoint._post("/act", encode_observation(obs))
        except Exception as exc:
            box[0] = exc

    thread = threading.Thread(target=worker, daemon=True)
    start = time.monotonic()
    thread.start()
    thread.join(endpoint.timeout)
    elapsed = time.monotonic() - start

    if thread.is_alive() or box[0] is None:
        endpoint.stats.timeouts += 1
        endpoint._drop_connection()
        reason = f"timeout after {elapsed * 1000:.0f}ms"
        logger.warning("substituting %s at step %s: %s", endpoint.url, step, reason)
        return ActOutcome(_substituted(mode), True, reason)
    if isinstance(box[0], Exception):
        exc = box[0]
        if isinstance(exc, (TimeoutError, OSError)) and not isinstance(exc, RemoteHTTPError):
            endpoint.stats.timeouts += 1
        else:
            endpoint.stats.errors += 1
        endpoint._drop_connection()
        reason = f"{type(exc).__name__}: {exc}"
        logger.warning("substituting %s at step %s: %s", endpoint.url, step, reason)
        return ActOutcome(_substituted(mode), True, reason)
    try:
        return ActOutcome(_parse_act_response(box[0], mode))
    except WireFormatError as exc:
        endpoint.stats.errors += 1
        reason = f"malformed response: {exc}"
        logger.warning("substituting %s at step %s: %s", endpoint.url, step, reason)
        return ActOutcome(_substituted(mode), True, reason)


def request_all(
    endpoints,
    observations,
    mode: Mode,
    step: int | None = None,
) -> list[ActOutcome | None]:
    """Fan out up to four act requests concurrently and join on a deadline.

    ``observations[i] is None`` (a dead seat) skips that endpoint.  The
    wall-clock cost is bounded by the slowest live response or its timeout,
    not the sum.  Result order matches seat order.
    """
    if len(endpoints) != len(observations):
        raise ValueError("endpoints and observations must align")
    outcomes: list[ActOutcome | None] = [None] * len(endpoints)
    threads: list[tuple[int, threading.Thread]] = []
    for i, (ep, obs) in enumerate(zip(endpoints, observations)):
        if obs is None:
            continue
        if ep.is_remote:
            def run(i=i, ep=ep, obs=obs):
                outcomes[i] = request_act(ep, obs, mode, step)

            t = threading.Thread(target=run, daemon=True)
            t.start()
            threads.append((i, t))
        else:
            outcomes[i] = request_act(ep, obs, mode, step)
    for i, t in threads:
        # request_act enforces its own deadline; the join slack only covers
        # scheduling noise, so a hung socket still cannot stall the step.
        t.join(endpoints[i].timeout + 1.0)
        if t.is_alive():
            outcomes[i] = ActOutcome(_substituted(mode), True, "join deadline overrun")
            endpoints[i].stats.timeouts += 1
    return outcomes


def notify_init(endpoint: AgentEndpoint, info: dict) -> bool:
    """Best-effort episode start notification; agents may ignore it."""
    if not endpoint.is_remote:
        if hasattr(endpoint.behavior, "reset"):
            endpoint.behavior.reset(seed=info["rng_seed"], agent_id=info["agent_id"])
        return True
    try:
        endpoint._post("/init", json.dumps(info).encode(), timeout=max(endpoint.timeout, 1.0))
        return True
    except Exception as exc:
        endpoint._drop_connection()
        logger.info("init ignored by %s: %s", endpoint.url, exc)
        return False


def notify_episode_end(endpoint: AgentEndpoint, result: dict) -> bool:
    if not endpoint.is_remote:
        return True
    try:
        endpoint._post("/episode_end", json.dumps(result).encode(), timeout=max(endpoint.timeout, 1.0))
        return True
    except Exception:
        endpoint._drop_connection()
        return False


# ---------------------------------------------------------------------------
# Server scaffold


class ServerHandle:
    def __init__(self, server: ThreadingHTTPServer, thread: threading.Thread):
        self._server = server
        self._thread = thread
        self.host, self.port = server.server_address[:2]

    @property
    def url(self) -> str:
        return f"http://{self.host}:{self.port}"

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "ServerHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def serve_agent(behavior, host: str = "127.0.0.1", port: int = 0) -> ServerHandle:
    """Expose ``behavior`` over the wire protocol; returns a running handle.

    Bind failures raise at startup.  Malformed requests get a 4xx with an
    error body and the server stays alive.
    """
    lock = threading.Lock()

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):
            pass

        def _reply(self, status: int, body: bytes, content_type: str = "application/json"):
            self.send_response(status)
            self.send_header(PROTO_HEADER, PROTOCOL_VERSION)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _error(self, status: int, message: str):
            self._reply(status, json.dumps({"error": message}).encode())

        def _read_body(self) -> bytes:
            length = int(self.headers.get("Content-Length", 0))
            return self.rfile.read(length)

        def do_GET(self):
            if self.path == "/ping":
                self._reply(200, f"pommer-proto {PROTOCOL_VERSION}".encode(), "text/plain")
            else:
                self._error(404, f"unknown path {self.path}")

        def do_POST(self):
            try:
                body = self._read_body()
            except (OSError, ValueError) as exc:
                self._error(400, f"unreadable body: {exc}")
                return
            if self.path == "/act":
                try:
                    obs = decode_observation(body)
                except WireFormatError as exc:
                    self._error(400, str(exc))
                    return
                try:
                    with lock:
                        action = behavior.act(obs)
                except Exception as exc:
                    self._error(500, f"policy failure: {exc}")
                    return
                payload: dict = {"action": action.move}
                if action.message is not None:
                    payload["message"] = list(action.message)
                self._reply(200, json.dumps(payload).encode())
            elif self.path == "/init":
                try:
                    info = json.loads(body)
                    if hasattr(behavior, "reset"):
                        with lock:
                            behavior.reset(
                                seed=int(info["rng_seed"]),
                                agent_id=int(info.get("agent_id", 0)),
                            )
                    self._reply(200, b'{"ok":true}')
                except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                    self._error(400, f"bad init payload: {exc}")
            elif self.path == "/episode_end":
                self._reply(200, b'{"ok":true}')
            else:
                self._error(404, f"unknown path {self.path}")

    class Server(ThreadingHTTPServer):
        daemon_threads = True

        def handle_error(self, request, client_address):
            # clients that time out hang up mid-response; that is expected
            import sys

            exc = sys.exc_info()[1]
            if isinstance(exc, (BrokenPipeError, ConnectionResetError)):
                return
            super().handle_error(request, client_address)

    server = Server((host, port), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True, name="pommer-agent-server")
    thread.start()
    return ServerHandle(server, thread)
