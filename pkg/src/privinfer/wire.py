"""Byte framing for the three protocol messages.

Layout: ``kind:u8 | version:u8 | length:u32 little-endian | payload``.

* QUERY: the syndrome, bit-packed little-endian (-1 -> 1), ceil(bits/8) bytes
* ANSWER: ``t`` IEEE-754 float64 little-endian values
* RESULT: one float64 little-endian value
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Union

import numpy as np

from .exceptions import (
    PayloadLengthError,
    TruncatedMessageError,
    UnknownKindError,
    UnsupportedVersionError,
)
from .gf2 import SignVector

__all__ = ["Kind", "WireMessage", "encode", "decode", "VERSION", "HEADER"]

VERSION = 1
HEADER = struct.Struct("<BBI")


class Kind(IntEnum):
    QUERY = 1
    ANSWER = 2
    RESULT = 3


Payload = Union[SignVector, tuple, float]


@dataclass(frozen=True)
class WireMessage:
    kind: Kind
    payload: Payload
    version: int = VERSION

    @classmethod
    def query(cls, q: SignVector) -> "WireMessage":
        return cls(Kind.QUERY, q)

    @classmethod
    def answer(cls, answers) -> "WireMessage":
        return cls(Kind.ANSWER, tuple(float(a) for a in answers))

    @classmethod
    def result(cls, value: float) -> "WireMessage":
        return cls(Kind.RESULT, float(value))


def encode(msg: WireMessage) -> bytes:
    kind = Kind(msg.kind)
    if msg.version != VERSION:
        raise UnsupportedVersionError(f"cannot encode version {msg.version}")
    if kind is Kind.QUERY:
        if not isinstance(msg.payload, SignVector):
            raise TypeError("QUERY payload must be a SignVector")
        body = msg.payload.to_bytes()
    elif kind is Kind.ANSWER:
        body = np.asarray(msg.payload, dtype="<f8").tobytes()
    else:
        body = struct.pack("<d", float(msg.payload))
    return HEADER.pack(int(kind), msg.version, len(body)) + body


def decode(data: bytes, query_bits: Optional[int] = None) -> WireMessage:
    """Parse one message.

    ``query_bits`` is the syndrome length ``n - t``, which the byte framing
    cannot carry. Without it a QUERY decodes to ``8 * len(payload)`` signs.
    """
    data = bytes(data)
    if len(data) < HEADER.size:
        raise TruncatedMessageError(f"need {HEADER.size} header bytes, got {len(data)}")
    kind_raw, version, length = HEADER.unpack_from(data)
    try:
        kind = Kind(kind_raw)
    except ValueError:
        raise UnknownKindError(f"unknown message kind {kind_raw}") from None
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}")
    body = data[HEADER.size:]
    if len(body) < length:
        raise TruncatedMessageError(f"payload declares {length} bytes, {len(body)} present")
    if len(body) > length:
        raise PayloadLengthError(f"{len(body) - length} trailing bytes after payload")

    if kind is Kind.QUERY:
        bits = 8 * length if query_bits is None else query_bits
        if (bits + 7) // 8 != length:
            raise PayloadLengthError(f"{bits} query bits need {(bits + 7) // 8} bytes, got {length}")
        value = int.from_bytes(body, "little")
        if value >> bits:
            raise PayloadLengthError("padding bits beyond the query length are set")
        return WireMessage(kind, SignVector(bits, value), version)
    if kind is Kind.ANSWER:
        if length % 8:
            raise PayloadLengthError(f"ANSWER payload of {length} bytes is not a float64 array")
        return WireMessage(kind, tuple(np.frombuffer(body, dtype="<f8").tolist()), version)
    if length != 8:
        raise PayloadLengthError(f"RESULT payload must be 8 bytes, got {length}")
    return WireMessage(kind, struct.unpack("<d", body)[0], version)
