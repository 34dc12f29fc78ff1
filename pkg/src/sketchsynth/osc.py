"""OSC 1.0 wire codec: messages and bundles, core type tags only.

The codec is the single serialisation point for all inter-process
traffic (latent updates, transport commands). It implements the OSC 1.0
core types {i, f, s, b} big-endian with 4-byte alignment, and rejects
anything else: an unknown type tag is an error, not a skip, so that a
misconfigured peer fails loudly instead of silently dropping arguments.

Python argument mapping is by type: int -> 'i' (int32), float -> 'f'
(float32), str -> 's', bytes -> 'b'. Decoding maps back the same way,
so `decode_packet(encode_packet(p)) == p` holds structurally for every
packet whose floats are exactly representable in 32 bits.

All functions are pure and stateless; safe to call from any thread.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Union

#: characters OSC 1.0 reserves for address patterns; plain addresses may
#: not contain them (and '#' additionally collides with "#bundle").
RESERVED_ADDRESS_CHARS = frozenset(' #*,?[]{}')

BUNDLE_HEADER = b"#bundle\x00"

#: timetag meaning "immediately"
TIMETAG_IMMEDIATE = 1

_INT32_MIN = -(1 << 31)
_INT32_MAX = (1 << 31) - 1
_MASK_U64 = (1 << 64) - 1


class OscError(ValueError):
    """Base class for every codec failure."""


class InvalidAddress(OscError):
    """Encode-side: address missing '/' or containing a reserved character."""


class BlobTooLarge(OscError):
    """Blob length does not fit in a signed 32-bit integer."""


class InvalidArgument(OscError):
    """Encode-side: unsupported argument type or out-of-range value."""


class TruncatedPacket(OscError):
    """Decode-side: ran out of bytes before the structure was complete."""


class MisalignedLength(OscError):
    """Decode-side: packet length is not a positive multiple of 4."""


class UnknownTypeTag(OscError):
    """Decode-side: type tag outside the supported set {i, f, s, b}."""


class MalformedAddress(OscError):
    """Decode-side: decoded address violates the address invariants."""


class MalformedPacket(OscError):
    """Decode-side: structurally invalid in some other way (trailing
    bytes, negative blob size, undecodable string, bad bundle header)."""


@dataclass(frozen=True)
class OscMessage:
    """One OSC message: address plus ordered arguments."""

    address: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class OscBundle:
    """One OSC bundle: NTP-style timetag plus nested packets."""

    timetag: int = TIMETAG_IMMEDIATE
    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


OscPacket = Union[OscMessage, OscBundle]


def validate_address(address: str) -> None:
    """Raise InvalidAddress unless `address` is a legal OSC address."""
    if not address or not address.startswith("/"):
        raise InvalidAddress(f"OSC address must begin with '/': {address!r}")
    bad = RESERVED_ADDRESS_CHARS.intersection(address)
    if bad:
        raise InvalidAddress(
            f"OSC address contains reserved character(s) {sorted(bad)}: {address!r}"
        )
    if "\x00" in address:
        raise InvalidAddress(f"OSC address contains NUL: {address!r}")


def _pad4(data: bytes) -> bytes:
    rem = len(data) % 4
    return data if rem == 0 else data + b"\x00" * (4 - rem)


def _encode_string(s: str) -> bytes:
    if "\x00" in s:
        raise InvalidArgument(f"OSC string contains interior NUL: {s!r}")
    return _pad4(s.encode("utf-8") + b"\x00")


def encode_message(msg: OscMessage) -> bytes:
    """Encode one message to its big-endian, 4-byte-aligned wire form.

    Layout: padded address, padded type-tag string (always present, even
    for zero arguments), then each argument in order.
    """
    validate_address(msg.address)
    tags = [","]
    payload: list[bytes] = []
    for arg in msg.args:
        if isinstance(arg, bool):
            raise InvalidArgument("bool is not an OSC 1.0 core type")
        if isinstance(arg, int):
            if not _INT32_MIN <= arg <= _INT32_MAX:
                raise InvalidArgument(f"int32 out of range: {arg}")
            tags.append("i")
            payload.append(struct.pack(">i", arg))
        elif isinstance(arg, float):
            tags.append("f")
            payload.append(struct.pack(">f", arg))
        elif isinstance(arg, str):
            tags.append("s")
            payload.append(_encode_string(arg))
        elif isinstance(arg, (bytes, bytearray)):
            if len(arg) > _INT32_MAX:
                raise BlobTooLarge(f"blob of {len(arg)} bytes exceeds int32")
            blob = bytes(arg)
            tags.append("b")
            payload.append(struct.pack(">i", len(blob)) + _pad4(blob))
        else:
            raise InvalidArgument(f"unsupported OSC argument type: {type(arg).__name__}")
    return _encode_string(msg.address) + _encode_string("".join(tags)) + b"".join(payload)


def encode_bundle(bundle: OscBundle) -> bytes:
    """Encode a bundle: "#bundle\\0", 8-byte timetag, size-prefixed elements."""
    if not 0 <= bundle.timetag <= _MASK_U64:
        raise InvalidArgument(f"timetag out of 64-bit range: {bundle.timetag}")
    parts = [BUNDLE_HEADER, struct.pack(">Q", bundle.timetag)]
    for element in bundle.elements:
        encoded = encode_packet(element)
        parts.append(struct.pack(">i", len(encoded)))
        parts.append(encoded)
    return b"".join(parts)


def encode_packet(packet: OscPacket) -> bytes:
    """Encode a message or bundle. Output length is a multiple of 4."""
    if isinstance(packet, OscMessage):
        return encode_message(packet)
    if isinstance(packet, OscBundle):
        return encode_bundle(packet)
    raise InvalidArgument(f"not an OSC packet: {type(packet).__name__}")


# --- decoding -----------------------------------------------------------

class _Reader:
    """Bounds-checked cursor over one packet's bytes; never reads past the end."""

    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def remaining(self) -> int:
        return len(self.data) - self.pos

    def take(self, n: int) -> bytes:
        if n < 0 or self.remaining() < n:
            raise TruncatedPacket(
                f"needed {n} bytes at offset {self.pos}, have {self.remaining()}"
            )
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def take_string(self) -> str:
        end = self.data.find(b"\x00", self.pos)
        if end < 0:
            raise TruncatedPacket("unterminated OSC string")
        raw = self.data[self.pos:end]
        padded = (end + 1 - self.pos + 3) // 4 * 4
        self.take(padded)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedPacket(f"undecodable OSC string: {raw!r}") from exc


def decode_packet(data: bytes) -> OscPacket:
    """Decode one datagram's bytes into a message or bundle.

    Strict: the packet must consume the byte sequence exactly, lengths
    must be multiples of 4, and only core type tags are accepted. Every
    failure raises an OscError subclass; arbitrary input never raises
    anything else.
    """
    if len(data) < 4:
        raise TruncatedPacket(f"packet of {len(data)} bytes is shorter than any OSC packet")
    if len(data) % 4 != 0:
        raise MisalignedLength(f"packet length {len(data)} is not a multiple of 4")
    reader = _Reader(bytes(data))
    packet = _decode_any(reader)
    if reader.remaining():
        raise MalformedPacket(f"{reader.remaining()} trailing bytes after packet")
    return packet


def _decode_any(reader: _Reader) -> OscPacket:
    if reader.data[reader.pos:reader.pos + len(BUNDLE_HEADER)] == BUNDLE_HEADER:
        return _decode_bundle(reader)
    return _decode_message(reader)


def _decode_bundle(reader: _Reader) -> OscBundle:
    reader.take(len(BUNDLE_HEADER))
    (timetag,) = struct.unpack(">Q", reader.take(8))
    elements = []
    while reader.remaining():
        (size,) = struct.unpack(">i", reader.take(4))
        if size <= 0:
            raise MalformedPacket(f"bundle element size {size} is not positive")
        if size % 4 != 0:
            raise MisalignedLength(f"bundle element size {size} is not a multiple of 4")
        sub = _Reader(reader.take(size))
        element = _decode_any(sub)
        if sub.remaining():
            raise MalformedPacket("bundle element shorter than its size prefix")
        elements.append(element)
    return OscBundle(timetag=timetag, elements=tuple(elements))


def _decode_message(reader: _Reader) -> OscMessage:
    address = reader.take_string()
    try:
        validate_address(address)
    except InvalidAddress as exc:
        raise MalformedAddress(str(exc)) from exc
    if reader.remaining() == 0:
        raise TruncatedPacket("message has no type-tag string")
    tags = reader.take_string()
    if not tags.startswith(","):
        raise UnknownTypeTag(f"type-tag string must begin with ',': {tags!r}")
    args: list = []
    for tag in tags[1:]:
        if tag == "i":
            args.append(struct.unpack(">i", reader.take(4))[0])
        elif tag == "f":
            args.append(struct.unpack(">f", reader.take(4))[0])
        elif tag == "s":
            args.append(reader.take_string())
        elif tag == "b":
            (size,) = struct.unpack(">i", reader.take(4))
            if size < 0:
                raise MalformedPacket(f"negative blob size {size}")
            blob = reader.take(size)
            reader.take((-size) % 4)
            args.append(blob)
        else:
            raise UnknownTypeTag(f"unsupported type tag {tag!r}")
    return OscMessage(address=address, args=tuple(args))
