"""The capture backend itself needs a browser; these cover the wire-level
pieces that are pure functions: WebSocket handshake keys and framing."""

import struct

import pytest

from mementoviz.cdp import decode_frame_header, encode_frame, handshake_accept_key


class TestHandshake:
    def test_rfc6455_worked_example(self):
        # key/accept pair published in the protocol specification
        assert (
            handshake_accept_key("dGhlIHNhbXBsZSBub25jZQ==")
            == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo="
        )


def unmask(frame: bytes, header_len: int) -> bytes:
    mask = frame[header_len : header_len + 4]
    payload = frame[header_len + 4 :]
    return bytes(b ^ mask[i % 4] for i, b in enumerate(payload))


class TestFraming:
    def test_short_text_frame(self):
        frame = encode_frame(0x1, b"hello", mask=b"\x01\x02\x03\x04")
        fin, opcode, masked, length, extra = decode_frame_header(frame[:2])
        assert fin and opcode == 0x1 and masked
        assert length == 5 and extra == 0
        assert unmask(frame, 2) == b"hello"

    def test_sixteen_bit_length(self):
        payload = b"x" * 300
        frame = encode_frame(0x1, payload, mask=b"\x00\x00\x00\x00")
        fin, opcode, masked, length, extra = decode_frame_header(frame[:2])
        assert length == 126 and extra == 2
        assert struct.unpack(">H", frame[2:4])[0] == 300
        assert unmask(frame, 4) == payload

    def test_sixty_four_bit_length(self):
        payload = b"y" * 70000
        frame = encode_frame(0x2, payload, mask=b"\xff\x00\xff\x00")
        _, opcode, _, length, extra = decode_frame_header(frame[:2])
        assert opcode == 0x2 and length == 127 and extra == 8
        assert struct.unpack(">Q", frame[2:10])[0] == 70000
        assert unmask(frame, 10) == payload

    def test_masking_is_applied(self):
        frame = encode_frame(0x1, b"aaaa", mask=b"\x01\x01\x01\x01")
        assert frame[6:] == bytes(b ^ 1 for b in b"aaaa")

    def test_mask_must_be_four_bytes(self):
        with pytest.raises(ValueError):
            encode_frame(0x1, b"", mask=b"\x00")
