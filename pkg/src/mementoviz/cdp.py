"""Headless-browser capture backend over the DevTools protocol.

Drives any DevTools-compatible browser (headless Chrome/Chromium/Edge)
reachable at an HTTP debugging endpoint: a tab is created per capture, the
page is navigated, given time to settle, screenshotted, and the tab is
closed. The WebSocket transport is implemented directly on stdlib sockets
(client side of RFC 6455) so no browser-driver dependency is needed.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import socket
import struct
import time
from urllib.parse import urlsplit

import requests

from .render import RenderFailure, RenderTimeout

_WS_ACCEPT_GUID = b"258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_OP_TEXT = 0x1
_OP_CLOSE = 0x8
_OP_PING = 0x9
_OP_PONG = 0xA


def handshake_accept_key(client_key: str) -> str:
    digest = hashlib.sha1(client_key.encode("ascii") + _WS_ACCEPT_GUID).digest()
    return base64.b64encode(digest).decode("ascii")


def encode_frame(opcode: int, payload: bytes, mask: bytes) -> bytes:
    """One client-to-server frame: FIN set, masked as RFC 6455 requires."""
    if len(mask) != 4:
        raise ValueError("mask must be 4 bytes")
    header = bytearray([0x80 | (opcode & 0x0F)])
    n = len(payload)
    if n < 126:
        header.append(0x80 | n)
    elif n < 1 << 16:
        header.append(0x80 | 126)
        header += struct.pack(">H", n)
    else:
        header.append(0x80 | 127)
        header += struct.pack(">Q", n)
    header += mask
    masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return bytes(header) + masked


def decode_frame_header(first: bytes) -> tuple[bool, int, bool, int, int]:
    """(fin, opcode, masked, payload_len, extra_len_bytes) from the first
    two header bytes; extended lengths must be read separately."""
    fin = bool(first[0] & 0x80)
    opcode = first[0] & 0x0F
    masked = bool(first[1] & 0x80)
    length = first[1] & 0x7F
    extra = 2 if length == 126 else 8 if length == 127 else 0
    return fin, opcode, masked, length, extra


class _WebSocket:
    """Minimal blocking WebSocket client, just enough for DevTools."""

    def __init__(self, url: str, timeout: float):
        parts = urlsplit(url)
        if parts.scheme != "ws":
            raise RenderFailure(f"unsupported WebSocket scheme in {url!r}")
        host = parts.hostname or "127.0.0.1"
        port = parts.port or 80
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._buffer = b""
        key = base64.b64encode(os.urandom(16)).decode("ascii")
        path = parts.path or "/"
        if parts.query:
            path += "?" + parts.query
        request = (
            f"GET {path} HTTP/1.1\r\n"
            f"Host: {host}:{port}\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\n"
            "Sec-WebSocket-Version: 13\r\n\r\n"
        )
        self._sock.sendall(request.encode("ascii"))
        status_line, headers = self._read_http_response()
        parts_status = status_line.split(b" ")
        if len(parts_status) < 2 or parts_status[1] != b"101":
            raise RenderFailure(f"WebSocket upgrade refused: {status_line!r}")
        accept = headers.get("sec-websocket-accept", "")
        if accept != handshake_accept_key(key):
            raise RenderFailure("WebSocket handshake accept key mismatch")

    def _read_http_response(self) -> tuple[bytes, dict[str, str]]:
        while b"\r\n\r\n" not in self._buffer:
            chunk = self._sock.recv(4096)
            if not chunk:
                raise RenderFailure("connection closed during WebSocket handshake")
            self._buffer += chunk
        head, self._buffer = self._buffer.split(b"\r\n\r\n", 1)
        lines = head.split(b"\r\n")
        headers: dict[str, str] = {}
        for line in lines[1:]:
            name, _, value = line.partition(b":")
            headers[name.decode("latin-1").strip().lower()] = value.decode("latin-1").strip()
        return lines[0], headers

    def _read_exact(self, n: int) -> bytes:
        while len(self._buffer) < n:
            chunk = self._sock.recv(65536)
            if not chunk:
                raise RenderFailure("connection closed mid-frame")
            self._buffer += chunk
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def send_text(self, text: str) -> None:
        self._sock.sendall(encode_frame(_OP_TEXT, text.encode("utf-8"), os.urandom(4)))

    def recv_text(self) -> str:
        message = b""
        while True:
            first = self._read_exact(2)
            fin, opcode, masked, length, extra = decode_frame_header(first)
            if extra:
                raw = self._read_exact(extra)
                length = struct.unpack(">H" if extra == 2 else ">Q", raw)[0]
            if masked:  # server frames must be unmasked
                raise RenderFailure("received masked frame from server")
            payload = self._read_exact(length)
            if opcode == _OP_PING:
                self._sock.sendall(encode_frame(_OP_PONG, payload, os.urandom(4)))
                continue
            if opcode == _OP_PONG:
                continue
            if opcode == _OP_CLOSE:
                raise RenderFailure("WebSocket closed by server")
            message += payload
            if fin:
                return message.decode("utf-8")

    def close(self) -> None:
        try:
            self._sock.sendall(encode_frame(_OP_CLOSE, b"", os.urandom(4)))
        except OSError:
            pass
        self._sock.close()


class CdpRenderBackend:
    """Capture backend speaking the DevTools protocol.

    endpoint is the browser's HTTP debugging address, e.g.
    ``http://127.0.0.1:9222``. Each capture opens its own tab so concurrent
    captures do not interfere.
    """

    def __init__(self, endpoint: str):
        self.endpoint = endpoint.rstrip("/")
        self._next_id = 0

    def capture(
        self, uri: str, viewport: tuple[int, int], settle_wait: float, timeout: float
    ) -> bytes:
        deadline = time.monotonic() + timeout
        target = self._new_target()
        try:
            ws = _WebSocket(target["webSocketDebuggerUrl"], timeout=max(timeout, 1.0))
        except OSError as exc:
            self._close_target(target["id"])
            raise RenderFailure(f"cannot connect to browser tab: {exc}") from exc
        try:
            self._command(ws, "Emulation.setDeviceMetricsOverride", {
                "width": viewport[0], "height": viewport[1],
                "deviceScaleFactor": 1, "mobile": False,
            }, deadline)
            self._command(ws, "Page.enable", {}, deadline)
            self._command(ws, "Page.navigate", {"url": uri}, deadline)
            self._await_load(ws, deadline)
            self._settle(settle_wait, deadline)
            result = self._command(ws, "Page.captureScreenshot", {"format": "png"}, deadline)
            return base64.b64decode(result["data"])
        finally:
            ws.close()
            self._close_target(target["id"])

    def _new_target(self) -> dict:
        try:
            # Newer browsers require PUT for /json/new; fall back to GET.
            response = requests.put(f"{self.endpoint}/json/new", timeout=10)
            if response.status_code == 405:
                response = requests.get(f"{self.endpoint}/json/new", timeout=10)
            response.raise_for_status()
            return response.json()
        except (requests.RequestException, ValueError) as exc:
            raise RenderFailure(f"cannot create browser tab at {self.endpoint}: {exc}") from exc

    def _close_target(self, target_id: str) -> None:
        try:
            requests.get(f"{self.endpoint}/json/close/{target_id}", timeout=10)
        except requests.RequestException:
            pass

    def _command(self, ws: _WebSocket, method: str, params: dict, deadline: float) -> dict:
        self._next_id += 1
        command_id = self._next_id
        ws.send_text(json.dumps({"id": command_id, "method": method, "params": params}))
        while True:
            self._check_deadline(deadline, method)
            message = json.loads(ws.recv_text())
            if message.get("id") == command_id:
                if "error" in message:
                    raise RenderFailure(f"{method} failed: {message['error']}")
                return message.get("result", {})

    def _await_load(self, ws: _WebSocket, deadline: float) -> None:
        ws._sock.settimeout(1.0)
        try:
            while time.monotonic() < deadline:
                try:
                    message = json.loads(ws.recv_text())
                except (RenderFailure, OSError, TimeoutError):
                    return  # rely on the settle wait when load events stall
                if message.get("method") == "Page.loadEventFired":
                    return
        finally:
            ws._sock.settimeout(max(deadline - time.monotonic(), 1.0))

    @staticmethod
    def _settle(settle_wait: float, deadline: float) -> None:
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise RenderTimeout("page did not settle before the capture timeout")
        time.sleep(min(settle_wait, remaining))

    @staticmethod
    def _check_deadline(deadline: float, method: str) -> None:
        if time.monotonic() > deadline:
            raise RenderTimeout(f"timed out waiting for {method}")
