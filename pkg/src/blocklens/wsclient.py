"""Minimal RFC 6455 websocket client (text frames only).

No websocket package is available in this environment, and the ledger
endpoint speaks a plain request/response JSON protocol, so this sticks to
the subset needed: client handshake, masked text frames out, text/ping/
close frames in. No extensions, no fragmented outgoing messages.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import socket
import ssl
import struct
from urllib.parse import urlparse

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WebsocketError(ConnectionError):
    pass


class WebsocketClient:
    def __init__(self, url: str, timeout: float = 30.0):
        parsed = urlparse(url)
        if parsed.scheme not in ("ws", "wss"):
            raise WebsocketError(f"unsupported scheme {parsed.scheme!r}")
        self.url = url
        self.host = parsed.hostname or "localhost"
        self.port = parsed.port or (443 if parsed.scheme == "wss" else 80)
        self.path = parsed.path or "/"
        if parsed.query:
            self.path += "?" + parsed.query
        self.timeout = timeout
        self._sock: socket.socket | None = None
        self._tls = parsed.scheme == "wss"
        self._buffer = b""

    # -- connection ---------------------------------------------------------

    def connect(self) -> None:
        raw = socket.create_connection((self.host, self.port), timeout=self.timeout)
        if self._tls:
            raw = ssl.create_default_context().wrap_socket(raw, server_hostname=self.host)
        key = base64.b64encode(os.urandom(16)).decode()
        request = (
            f"GET {self.path} HTTP/1.1\r\n"
            f"Host: {self.host}:{self.port}\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\n"
            "Sec-WebSocket-Version: 13\r\n"
            "\r\n"
        )
        raw.sendall(request.encode())
        response = self._read_handshake(raw)
        status = response.split(b"\r\n", 1)[0]
        if b"101" not in status:
            raw.close()
            raise WebsocketError(f"handshake rejected: {status.decode(errors='replace')}")
        accept = _header_value(response, b"sec-websocket-accept")
        want = base64.b64encode(hashlib.sha1((key + _GUID).encode()).digest())
        if accept != want:
            raw.close()
            raise WebsocketError("handshake accept key mismatch")
        self._sock = raw
        self._buffer = b""

    @staticmethod
    def _read_handshake(sock: socket.socket) -> bytes:
        data = b""
        while b"\r\n\r\n" not in data:
            part = sock.recv(4096)
            if not part:
                raise WebsocketError("connection closed during handshake")
            data += part
        return data.split(b"\r\n\r\n", 1)[0]

    @property
    def connected(self) -> bool:
        return self._sock is not None

    def close(self) -> None:
        if self._sock is None:
            return
        try:
            self._send_frame(OP_CLOSE, b"")
            self._sock.close()
        except OSError:
            pass
        self._sock = None

    # -- framing ------------------------------------------------------------

    def _send_frame(self, opcode: int, payload: bytes) -> None:
        if self._sock is None:
            raise WebsocketError("not connected")
        header = bytes([0x80 | opcode])
        length = len(payload)
        if length < 126:
            header += bytes([0x80 | length])
        elif length < 1 << 16:
            header += bytes([0x80 | 126]) + struct.pack(">H", length)
        else:
            header += bytes([0x80 | 127]) + struct.pack(">Q", length)
        mask = os.urandom(4)
        masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        self._sock.sendall(header + mask + masked)

    def _read_exact(self, n: int) -> bytes:
        while len(self._buffer) < n:
            part = self._sock.recv(65536)
            if not part:
                raise WebsocketError("connection closed mid-frame")
            self._buffer += part
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def _recv_frame(self) -> tuple[int, bool, bytes]:
        first, second = self._read_exact(2)
        fin = bool(first & 0x80)
        opcode = first & 0x0F
        masked = bool(second & 0x80)
        length = second & 0x7F
        if length == 126:
            (length,) = struct.unpack(">H", self._read_exact(2))
        elif length == 127:
            (length,) = struct.unpack(">Q", self._read_exact(8))
        mask = self._read_exact(4) if masked else b""
        payload = self._read_exact(length)
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        return opcode, fin, payload

    def _recv_message(self) -> bytes:
        message = b""
        started = False
        while True:
            opcode, fin, payload = self._recv_frame()
            if opcode == OP_PING:
                self._send_frame(OP_PONG, payload)
                continue
            if opcode == OP_PONG:
                continue
            if opcode == OP_CLOSE:
                self.close()
                raise WebsocketError("server closed the connection")
            if opcode == OP_TEXT or (opcode == OP_CONT and started):
                started = True
                message += payload
                if fin:
                    return message
                continue
            raise WebsocketError(f"unexpected frame opcode {opcode}")

    # -- request/response ---------------------------------------------------

    def request(self, payload: dict) -> dict:
        """Send one JSON message and wait for one JSON reply."""
        if self._sock is None:
            self.connect()
        self._send_frame(OP_TEXT, json.dumps(payload, separators=(",", ":")).encode())
        return json.loads(self._recv_message())


def _header_value(raw: bytes, name: bytes) -> bytes | None:
    for line in raw.split(b"\r\n")[1:]:
        if b":" not in line:
            continue
        key, value = line.split(b":", 1)
        if key.strip().lower() == name:
            return value.strip()
    return None
