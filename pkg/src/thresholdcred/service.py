"""Issuing authority daemon and the client-side threshold gather.

Each authority is stateless per request and exposes three HTTP endpoints:

``GET /params-digest``
    ``{"params_digest": hex}``
``GET /vk``
    JSON envelope holding this authority's verification key share
``POST /issue``
    body ``{"envelope": b64(request), "params_digest": hex}``; answers a JSON
    envelope holding the blinded partial, or ``{"error": reason}`` with
    reason one of ``malformed-request``, ``params-mismatch``,
    ``proof-invalid``, ``predicate-mismatch``, ``rate-limited``.

:func:`gather` fans one request out to every configured authority and
returns as soon as ``t`` partials have been unblinded and checked.
"""

from __future__ import annotations

import asyncio
import base64
import collections
import contextlib
import json
import logging
import math
import os
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import httpx

from . import wire
from .group import Params, encode_g1
from .scheme import (
    AttributeVector,
    BlindSignRequest,
    IssuanceRejected,
    SecretKeyShare,
    VerificationKeyShare,
    blind_sign,
    unblind,
    verify_partial,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_BIND_FAILURE = 3

ENV_LISTEN = "THRESHOLDCRED_LISTEN"
ENV_SHARE = "THRESHOLDCRED_SHARE"

_STATUS = {
    "malformed-request": 400,
    "params-mismatch": 409,
    "predicate-mismatch": 422,
    "proof-invalid": 422,
    "rate-limited": 429,
}


class ConfigError(Exception):
    pass


class ThresholdUnreachable(Exception):
    """Fewer than ``t`` valid partials arrived before the deadline."""

    reason = "threshold-unreachable"

    def __init__(self, threshold: int, received: int, failures: dict):
        self.threshold = threshold
        self.received = received
        self.failures = dict(failures)
        detail = ", ".join(f"{i}: {why}" for i, why in sorted(self.failures.items()))
        super().__init__(f"threshold-unreachable: {received}/{threshold} partials ({detail})")


# -- authority -------------------------------------------------------------------------


class Authority:
    """One issuer: a key share plus the request-handling logic, transport free."""

    def __init__(self, params: Params, sk: SecretKeyShare):
        if len(sk.y) != params.q:
            raise ValueError("key share does not match params")
        self.params = params
        self.sk = sk
        self.index = sk.index
        self.vk = sk.verification_key(params)
        self._vk_bytes = wire.encode(self.vk)

    @property
    def params_digest(self) -> bytes:
        return self.params.digest

    def vk_bytes(self) -> bytes:
        return self._vk_bytes

    def issue(self, request_bytes: bytes, params_digest: bytes | None = None) -> bytes:
        """Answer one envelope-encoded request with an envelope-encoded partial."""
        if params_digest is not None and params_digest != self.params.digest:
            raise IssuanceRejected("params-mismatch", "request made under different params")
        try:
            request = wire.decode(wire.Kind.REQUEST, request_bytes)
        except wire.WireError as exc:
            raise IssuanceRejected("malformed-request", f"{exc.code}: {exc}") from None
        return wire.encode(blind_sign(self.params, self.sk, request))


class _RateLimiter:
    def __init__(self, per_minute: int | None):
        self.per_minute = per_minute
        self._hits = collections.defaultdict(collections.deque)
        self._lock = threading.Lock()

    def allow(self, source: str) -> bool:
        if not self.per_minute:
            return True
        now = time.monotonic()
        with self._lock:
            hits = self._hits[source]
            while hits and now - hits[0] > 60.0:
                hits.popleft()
            if len(hits) >= self.per_minute:
                return False
            hits.append(now)
            return True


def _handler_for(authority: Authority, limiter: _RateLimiter):
    class Handler(BaseHTTPRequestHandler):
        server_version = "thresholdcred-authority/1"

        def log_message(self, fmt, *args):
            log.debug("%s %s", self.address_string(), fmt % args)

        def _send(self, status: int, body: dict):
            data = json.dumps(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _reject(self, reason: str, detail: str = ""):
            log.info("authority %d rejected a request: %s", authority.index, reason)
            self._send(_STATUS.get(reason, 400), {"error": reason, "detail": detail})

        def do_GET(self):
            if self.path == "/params-digest":
                self._send(200, {"params_digest": authority.params_digest.hex()})
            elif self.path == "/vk":
                self._send(200, json.loads(wire.to_json(authority.vk)))
            else:
                self._send(404, {"error": "not-found"})

        def do_POST(self):
            if self.path != "/issue":
                self._send(404, {"error": "not-found"})
                return
            if not limiter.allow(self.client_address[0]):
                self._reject("rate-limited")
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length))
                envelope = wire.envelope_from_json(body)
                digest = body.get("params_digest")
                digest = bytes.fromhex(digest) if digest is not None else None
            except (ValueError, AttributeError, wire.WireError) as exc:
                self._reject("malformed-request", str(exc))
                return
            try:
                partial = authority.issue(envelope, digest)
            except IssuanceRejected as exc:
                self._reject(exc.reason, str(exc))
                return
            self._send(200, {"kind": "partial", "envelope": base64.b64encode(partial).decode()})

    return Handler


def make_server(authority: Authority, host: str = "127.0.0.1", port: int = 0, max_requests_per_minute: int | None = None) -> ThreadingHTTPServer:
    """Bind (but do not start) an HTTP server for ``authority``; raises ``OSError`` on bind failure."""
    server = ThreadingHTTPServer((host, port), _handler_for(authority, _RateLimiter(max_requests_per_minute)))
    server.daemon_threads = True
    return server


@dataclass
class AuthorityConfig:
    listen: str
    index: int
    share_path: str
    params_path: str
    params_digest: str | None = None
    max_requests_per_minute: int | None = None

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"listen address must be host:port, got {self.listen!r}")
        return host, int(port)

    @classmethod
    def load(cls, path: str, environ=None) -> "AuthorityConfig":
        """Read a JSON config; ``THRESHOLDCRED_LISTEN`` / ``THRESHOLDCRED_SHARE`` override it."""
        environ = os.environ if environ is None else environ
        try:
            with open(path) as f:
                raw = json.load(f)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        base = os.path.dirname(os.path.abspath(path))
        try:
            cfg = cls(
                listen=environ.get(ENV_LISTEN, raw.get("listen", "127.0.0.1:0")),
                index=int(raw["index"]),
                share_path=os.path.join(base, environ.get(ENV_SHARE, raw["share"])),
                params_path=os.path.join(base, raw["params"]),
                params_digest=raw.get("params_digest"),
                max_requests_per_minute=raw.get("max_requests_per_minute"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config {path}: {exc!r}") from None
        cfg.host_port
        return cfg

    def build_authority(self) -> Authority:
        try:
            with open(self.params_path, "rb") as f:
                params = wire.decode(wire.Kind.PARAMS, f.read())
            with open(self.share_path, "rb") as f:
                sk = wire.decode(wire.Kind.SK_SHARE, f.read())
        except (OSError, wire.WireError) as exc:
            raise ConfigError(str(exc)) from None
        if sk.index != self.index:
            raise ConfigError(f"share index {sk.index} does not match configured index {self.index}")
        if self.params_digest is not None and params.digest.hex() != self.params_digest:
            raise ConfigError("params digest does not match the configured digest")
        try:
            return Authority(params, sk)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def serve(config: AuthorityConfig, ready: threading.Event | None = None) -> int:
    """Run an authority until interrupted; returns a process exit code."""
    try:
        authority = config.build_authority()
        host, port = config.host_port
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_BAD_CONFIG
    try:
        server = make_server(authority, host, port, config.max_requests_per_minute)
    except OSError as exc:
        log.error("cannot bind %s: %s", config.listen, exc)
        return EXIT_BIND_FAILURE
    log.info("authority %d listening on %s:%d", authority.index, *server.server_address[:2])
    if ready is not None:
        ready.set()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


# -- client side -------------------------------------------------------------------------


class EndpointError(Exception):
    pass


class HttpEndpoint:
    def __init__(self, index: int, url: str):
        self.index = index
        self.url = url.rstrip("/")

    async def issue(self, client: httpx.AsyncClient, request_bytes: bytes, params_digest: bytes) -> bytes:
        resp = await client.post(
            self.url + "/issue",
            content=json.dumps({
                "envelope": base64.b64encode(request_bytes).decode(),
                "params_digest": params_digest.hex(),
            }),
            headers={"Content-Type": "application/json"},
        )
        body = resp.json()
        if resp.status_code != 200:
            raise EndpointError(body.get("error", f"http-{resp.status_code}"))
        return wire.envelope_from_json(body)

    async def vk(self, client: httpx.AsyncClient) -> VerificationKeyShare:
        resp = await client.get(self.url + "/vk")
        if resp.status_code != 200:
            raise EndpointError(f"http-{resp.status_code}")
        return wire.from_json(wire.Kind.VK_SHARE, resp.json())


class LocalEndpoint:
    """In-process authority, optionally with an injected response delay.

    ``delay=math.inf`` models an authority that never answers.
    """

    def __init__(self, authority: Authority, delay: float = 0.0):
        self.authority = authority
        self.index = authority.index
        self.delay = delay

    async def issue(self, client, request_bytes: bytes, params_digest: bytes) -> bytes:
        if math.isinf(self.delay):
            await asyncio.Event().wait()
        if self.delay:
            await asyncio.sleep(self.delay)
        try:
            return self.authority.issue(request_bytes, params_digest)
        except IssuanceRejected as exc:
            raise EndpointError(exc.reason) from None

    async def vk(self, client) -> VerificationKeyShare:
        return self.authority.vk


@dataclass
class GatherPolicy:
    endpoints: list
    threshold: int
    request_timeout: float = 5.0
    deadline: float = 10.0

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be >= 1")
        if len(self.endpoints) < self.threshold:
            raise ValueError("fewer endpoints than the threshold")
        indices = [e.index for e in self.endpoints]
        if len(set(indices)) != len(indices):
            raise ValueError("duplicate authority index among endpoints")


async def gather_async(
    policy: GatherPolicy,
    params: Params,
    request: BlindSignRequest,
    d: int,
    attrs: AttributeVector,
    vk_shares: dict | None = None,
) -> list:
    """Collect ``t`` unblinded, individually checked partial credentials.

    Requests go to every endpoint at once; the first ``t`` partials that pass
    the per-authority pairing check win and the rest are cancelled.  Each
    partial is checked against the authority's own key share and the user's
    attributes, so one misbehaving authority cannot poison aggregation.
    """
    request_bytes = wire.encode(request)
    digest = params.digest
    h_expected = encode_g1(request.h)
    vk_shares = dict(vk_shares or {})

    async def one(endpoint, client):
        async def call():
            vk = vk_shares.get(endpoint.index)
            if vk is None:
                vk = await endpoint.vk(client)
            raw = await endpoint.issue(client, request_bytes, digest)
            return vk, raw

        vk, raw = await asyncio.wait_for(call(), policy.request_timeout)
        try:
            partial = wire.decode(wire.Kind.PARTIAL, raw)
        except wire.WireError as exc:
            raise EndpointError(f"bad-partial ({exc.code})") from None
        if encode_g1(partial.h) != h_expected:
            raise EndpointError("wrong-h")
        if vk.index != endpoint.index:
            raise EndpointError("vk-index-mismatch")
        cred = unblind(partial, d)
        if not verify_partial(params, vk, attrs, cred):
            raise EndpointError("invalid-partial")
        return endpoint.index, cred

    results, failures = [], {}
    async with contextlib.AsyncExitStack() as stack:
        client = None
        if any(isinstance(e, HttpEndpoint) for e in policy.endpoints):
            client = await stack.enter_async_context(httpx.AsyncClient(timeout=policy.request_timeout))
        tasks = {asyncio.ensure_future(one(e, client)): e.index for e in policy.endpoints}
        loop = asyncio.get_running_loop()
        stop_at = loop.time() + policy.deadline
        pending = set(tasks)
        try:
            while pending and len(results) < policy.threshold:
                remaining = stop_at - loop.time()
                if remaining <= 0:
                    break
                done, pending = await asyncio.wait(pending, timeout=remaining, return_when=asyncio.FIRST_COMPLETED)
                for task in done:
                    index = tasks[task]
                    exc = task.exception()
                    if exc is None:
                        if len(results) < policy.threshold:
                            results.append(task.result())
                    elif isinstance(exc, asyncio.TimeoutError):
                        failures[index] = "timeout"
                    else:
                        failures[index] = str(exc) or type(exc).__name__
        finally:
            for task in pending:
                task.cancel()
                if len(results) < policy.threshold:
                    failures.setdefault(tasks[task], "no-answer-before-deadline")
            await asyncio.gather(*pending, return_exceptions=True)
    if len(results) < policy.threshold:
        raise ThresholdUnreachable(policy.threshold, len(results), failures)
    return results


def gather(policy, params, request, d, attrs, vk_shares=None) -> list:
    """Blocking wrapper around :func:`gather_async`."""
    return asyncio.run(gather_async(policy, params, request, d, attrs, vk_shares))
