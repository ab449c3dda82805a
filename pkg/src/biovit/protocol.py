"""ThinkGear-style serial packet codec for the single-electrode headset.

Frame layout::

    0xAA 0xAA | PLENGTH (0..169) | PAYLOAD (PLENGTH bytes) | CHKSUM

The checksum is the bitwise inverse of the low 8 bits of the payload sum.
The payload is a sequence of rows ``[0x55]* CODE [VLENGTH] VALUE``: codes
below 0x80 carry one value byte, codes at or above 0x80 carry an explicit
length byte.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

SYNC = 0xAA
EXCODE = 0x55
MAX_PAYLOAD = 169
MAX_FRAME = MAX_PAYLOAD + 4

CODE_POOR_SIGNAL = 0x02
CODE_ATTENTION = 0x04
CODE_MEDITATION = 0x05
CODE_RAW_WAVE = 0x80

KNOWN_CODES = {CODE_POOR_SIGNAL, CODE_ATTENTION, CODE_MEDITATION, CODE_RAW_WAVE}


@dataclass(frozen=True)
class DeviceSpec:
    """Headset constants. Only the filter band is configurable."""

    baud_rate: int = 57600
    raw_sample_rate: int = 512
    esense_rate: int = 1
    adc_bits: int = 12
    hardware_filter: tuple[float, float] = (3.0, 100.0)
    max_packet_loss: float = 0.05

    def __post_init__(self):
        if (self.baud_rate, self.raw_sample_rate, self.esense_rate, self.adc_bits) != (
            57600,
            512,
            1,
            12,
        ):
            raise ValueError("device constants are fixed: 57600 baud, 512 Hz, 1 Hz, 12 bits")
        lo, hi = self.hardware_filter
        if not (0 < lo < hi <= self.raw_sample_rate / 2):
            raise ValueError(f"invalid hardware filter band {self.hardware_filter}")
        if not 0 <= self.max_packet_loss <= 1:
            raise ValueError("max_packet_loss must be a fraction")


DEVICE = DeviceSpec()


@dataclass(frozen=True)
class DataPacket:
    poor_signal: Optional[int] = None
    attention: Optional[int] = None
    meditation: Optional[int] = None
    raw_samples: tuple[int, ...] = ()
    # not carried on the wire, assigned by the decoder
    timestamp_offset: float = field(default=0.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "raw_samples", tuple(int(v) for v in self.raw_samples))
        if self.poor_signal is not None and not 0 <= self.poor_signal <= 200:
            raise ValueError(f"poor_signal out of range: {self.poor_signal}")
        for name in ("attention", "meditation"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= 100:
                raise ValueError(f"{name} out of range: {v}")
        for v in self.raw_samples:
            if not -(2**15) <= v < 2**15:
                raise ValueError(f"raw sample out of 16-bit range: {v}")

    @property
    def has_attention(self) -> bool:
        return self.attention is not None


class FrameErrorKind(enum.Enum):
    BAD_SYNC = "BadSync"
    LENGTH_OUT_OF_RANGE = "LengthOutOfRange"
    CHECKSUM_MISMATCH = "ChecksumMismatch"
    UNKNOWN_ROW_CODE = "UnknownRowCode"
    MALFORMED_ROW = "MalformedRow"
    TRUNCATED = "Truncated"


@dataclass(frozen=True)
class FrameError:
    kind: FrameErrorKind
    byte_offset: int


class PacketTooLarge(ValueError):
    pass


def checksum(payload: bytes) -> int:
    return ~sum(payload) & 0xFF


def encode_payload(packet: DataPacket) -> bytes:
    out = bytearray()
    if packet.poor_signal is not None:
        out += bytes((CODE_POOR_SIGNAL, packet.poor_signal))
    if packet.attention is not None:
        out += bytes((CODE_ATTENTION, packet.attention))
    if packet.meditation is not None:
        out += bytes((CODE_MEDITATION, packet.meditation))
    for v in packet.raw_samples:
        out += bytes((CODE_RAW_WAVE, 2)) + (v & 0xFFFF).to_bytes(2, "big")
    return bytes(out)


def encode_packet(packet: DataPacket) -> bytes:
    """Serialise one packet into a complete frame."""
    payload = encode_payload(packet)
    if len(payload) > MAX_PAYLOAD:
        raise PacketTooLarge(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    return bytes((SYNC, SYNC, len(payload))) + payload + bytes((checksum(payload),))


class _RowError(Exception):
    def __init__(self, kind: FrameErrorKind, offset: int):
        self.kind = kind
        self.offset = offset


def _parse_payload(payload: bytes, base: int):
    """Parse rows into packet fields; return (fields, unknown-code offsets)."""
    poor = att = med = None
    raw: list[int] = []
    unknown: list[int] = []
    i, n = 0, len(payload)
    while i < n:
        row_start = i
        while i < n and payload[i] == EXCODE:
            i += 1
        if i >= n:
            raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
        excode_level = i - row_start
        code = payload[i]
        i += 1
        if code >= 0x80:
            if i >= n:
                raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
            vlen = payload[i]
            i += 1
        else:
            vlen = 1
        if i + vlen > n:
            raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
        value = payload[i : i + vlen]
        i += vlen
        if excode_level or code not in KNOWN_CODES:
            unknown.append(base + row_start)
            continue
        if code == CODE_RAW_WAVE:
            if vlen != 2:
                raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
            raw.append(int.from_bytes(value, "big", signed=True))
        elif code == CODE_POOR_SIGNAL:
            if value[0] > 200:
                raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
            poor = value[0]
        elif code == CODE_ATTENTION:
            if value[0] > 100:
                raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
            att = value[0]
        else:
            if value[0] > 100:
                raise _RowError(FrameErrorKind.MALFORMED_ROW, base + row_start)
            med = value[0]
    return (poor, att, med, tuple(raw)), unknown


class StreamDecoder:
    """Incremental frame decoder.

    Holds at most one frame's worth of unconsumed bytes between calls to
    :meth:`feed`. Call :meth:`close` at end of input to flag a trailing
    partial frame.
    """

    def __init__(self):
        self._buf = bytearray()
        self._base = 0  # absolute offset of _buf[0]
        self._junk_start: Optional[int] = None
        self._quiet_until = 0
        self._attention_frames = 0
        self.packets: list[DataPacket] = []
        self.errors: list[FrameError] = []

    def _junk(self, offset: int):
        if self._junk_start is None and offset >= self._quiet_until:
            self._junk_start = offset

    def _flush_junk(self):
        if self._junk_start is not None:
            self.errors.append(FrameError(FrameErrorKind.BAD_SYNC, self._junk_start))
            self._junk_start = None

    def feed(self, data: bytes) -> None:
        self._buf += data
        buf = self._buf
        i = 0
        n = len(buf)
        while i < n:
            if buf[i] != SYNC:
                self._junk(self._base + i)
                i += 1
                continue
            if i + 1 >= n:
                break
            if buf[i + 1] != SYNC:
                self._junk(self._base + i)
                i += 1
                continue
            # sync pair; extra 0xAA bytes are tolerated as padding
            j = i + 2
            while j < n and buf[j] == SYNC:
                j += 1
            if j >= n:
                i = max(i, j - 2)
                break
            start = self._base + i
            plen = buf[j]
            if plen > MAX_PAYLOAD:
                self._flush_junk()
                self.errors.append(FrameError(FrameErrorKind.LENGTH_OUT_OF_RANGE, start))
                self._quiet_until = self._base + j + 1
                i = j + 1
                continue
            end = j + 1 + plen + 1
            if end > n:
                break
            self._flush_junk()
            payload = bytes(buf[j + 1 : j + 1 + plen])
            if checksum(payload) != buf[end - 1]:
                self.errors.append(FrameError(FrameErrorKind.CHECKSUM_MISMATCH, start))
                # rescan inside the rejected frame without reporting it as junk
                self._quiet_until = self._base + end
                i += 2
                continue
            try:
                (poor, att, med, raw), unknown = _parse_payload(payload, self._base + j + 1)
            except _RowError as exc:
                self.errors.append(FrameError(exc.kind, exc.offset))
                self._quiet_until = self._base + end
                i = end
                continue
            for off in unknown:
                self.errors.append(FrameError(FrameErrorKind.UNKNOWN_ROW_CODE, off))
            stamp = float(self._attention_frames) / DEVICE.esense_rate
            if att is not None:
                self._attention_frames += 1
            self.packets.append(DataPacket(poor, att, med, raw, timestamp_offset=stamp))
            self._quiet_until = self._base + end
            i = end
        del buf[:i]
        self._base += i

    def close(self) -> tuple[list[DataPacket], list[FrameError]]:
        if self._buf:
            if self._buf[0] == SYNC and (len(self._buf) == 1 or self._buf[1] == SYNC):
                self._flush_junk()
                self.errors.append(FrameError(FrameErrorKind.TRUNCATED, self._base))
            else:
                self._junk(self._base)
                self._flush_junk()
            self._base += len(self._buf)
            self._buf.clear()
        self._flush_junk()
        return self.packets, self.errors


def decode_stream(data: bytes | Iterable[bytes]) -> tuple[list[DataPacket], list[FrameError]]:
    """Decode a byte buffer (or an iterable of chunks) into packets and errors.

    Never raises on corrupt input; malformed spans are reported in the error
    list and scanning resumes at the next sync pair.
    """
    dec = StreamDecoder()
    if isinstance(data, (bytes, bytearray, memoryview)):
        dec.feed(bytes(data))
    else:
        for chunk in data:
            dec.feed(chunk)
    return dec.close()
