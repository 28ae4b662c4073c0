"""Wire codecs and per-robot dispatch for the two command links.

All velocities on the wire are robot-local (vx forward, vy left, vtheta ccw).

UDP link, one datagram per command:
    <vx>,<vy>,<vtheta>,<kick>,<dribble>\\n
    velocities fixed 3 decimals, powers as integers.

Serial link (XBee AT mode, 115200 8N1), fixed 18-byte frame:
    [0] 0xFF start
    [1] robot id (0..15)
    [2:14] vx, vy, vtheta as IEEE-754 single, little-endian
    [14] kick power, [15] dribble power
    [16] checksum: XOR of bytes 1..15
    [17] 0x00 end
The stream decoder resynchronizes on 0xFF and never emits a frame whose
checksum or framing fails.
"""

from __future__ import annotations

import math
import socket
import struct
from dataclasses import dataclass, field

from .motion import RobotCommand

FRAME_START = 0xFF
FRAME_END = 0x00
FRAME_SIZE = 18

DEFAULT_SEND_TIMEOUT = 0.002  # s; a slow link must not stall the tick


class DecodeError(ValueError):
    pass


def encode_udp_csv(cmd: RobotCommand) -> bytes:
    text = f"{cmd.vx:.3f},{cmd.vy:.3f},{cmd.vtheta:.3f},{cmd.kick_power},{cmd.dribble_power}\n"
    return text.encode("ascii")


def decode_udp_csv(packet: bytes | str) -> RobotCommand:
    text = packet.decode("ascii", errors="replace") if isinstance(packet, bytes) else packet
    fields = text.strip().split(",")
    if len(fields) != 5:
        raise DecodeError(f"expected 5 comma-separated fields, got {len(fields)}")
    try:
        vx, vy, vtheta = (float(v) for v in fields[:3])
        kick, dribble = (int(round(float(v))) for v in fields[3:])
    except ValueError as exc:
        raise DecodeError(f"non-numeric field in {text.strip()!r}") from exc
    if not all(math.isfinite(v) for v in (vx, vy, vtheta)):
        raise DecodeError("non-finite velocity on the wire")
    kick = min(max(kick, 0), 100)
    dribble = min(max(dribble, 0), 100)
    return RobotCommand(vx, vy, vtheta, kick, dribble)


def _checksum(payload: bytes) -> int:
    c = 0
    for b in payload:
        c ^= b
    return c


def encode_serial_frame(robot_id: int, cmd: RobotCommand) -> bytes:
    if not 0 <= robot_id <= 15:
        raise ValueError(f"robot id {robot_id} out of range 0..15")
    payload = bytes([robot_id]) + struct.pack("<fff", cmd.vx, cmd.vy, cmd.vtheta) \
        + bytes([cmd.kick_power, cmd.dribble_power])
    return bytes([FRAME_START]) + payload + bytes([_checksum(payload), FRAME_END])


def decode_serial_frame(frame: bytes) -> tuple[int, RobotCommand]:
    """Decode exactly one frame; for streams use SerialDecoder."""
    if len(frame) != FRAME_SIZE:
        raise DecodeError(f"frame must be {FRAME_SIZE} bytes, got {len(frame)}")
    if frame[0] != FRAME_START or frame[-1] != FRAME_END:
        raise DecodeError("bad framing bytes")
    payload = frame[1:16]
    if _checksum(payload) != frame[16]:
        raise DecodeError("checksum mismatch")
    robot_id = payload[0]
    vx, vy, vtheta = struct.unpack("<fff", payload[1:13])
    return robot_id, RobotCommand(vx, vy, vtheta, payload[13], payload[14])


class SerialDecoder:
    """Incremental frame extractor with resync on the 0xFF start byte.

    Feed arbitrary chunks; complete valid frames come out, candidates that
    fail the checksum or framing are skipped one byte at a time (counted in
    frames_dropped), and a trailing partial frame waits for more bytes.
    """

    def __init__(self):
        self._buf = bytearray()
        self.frames_dropped = 0

    def feed(self, data: bytes) -> list[tuple[int, RobotCommand]]:
        self._buf.extend(data)
        frames = []
        while True:
            start = self._buf.find(FRAME_START)
            if start < 0:
                self._buf.clear()
                break
            if start > 0:
                del self._buf[:start]
            if len(self._buf) < FRAME_SIZE:
                break  # truncated: wait for more bytes
            try:
                frames.append(decode_serial_frame(bytes(self._buf[:FRAME_SIZE])))
                del self._buf[:FRAME_SIZE]
            except DecodeError:
                self.frames_dropped += 1
                del self._buf[0]  # skip this start byte and rescan
        return frames


@dataclass(frozen=True)
class RobotEndpoint:
    robot_id: int
    transport: str  # udp | serial
    address: tuple[str, int] | str  # (host, port) for udp, device path for serial

    def __post_init__(self):
        if self.transport not in ("udp", "serial"):
            raise ValueError(f"unknown transport {self.transport!r}")


def parse_endpoint(robot_id: int, text: str) -> RobotEndpoint:
    """Endpoint table syntax: `192.168.1.10:10030` or `serial:/dev/ttyUSB0`."""
    text = text.strip()
    if text.startswith("serial:"):
        return RobotEndpoint(robot_id, "serial", text[len("serial:"):])
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"bad endpoint address {text!r}")
    return RobotEndpoint(robot_id, "udp", (host, int(port)))


@dataclass
class SendReport:
    sent: list[int] = field(default_factory=list)
    errors: dict[int, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


class RadioDispatcher:
    """Encodes each robot's command per its endpoint and transmits it.

    Failures are isolated per robot: one unreachable endpoint degrades to an
    error entry in the report, everyone else still gets their packet.
    """

    def __init__(self, endpoints: list[RobotEndpoint], send_timeout: float = DEFAULT_SEND_TIMEOUT):
        by_id: dict[int, RobotEndpoint] = {}
        for ep in endpoints:
            if ep.robot_id in by_id:
                raise ValueError(f"duplicate endpoint for robot {ep.robot_id}")
            by_id[ep.robot_id] = ep
        self._endpoints = by_id
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.settimeout(send_timeout)
        self._serial_handles: dict[str, object] = {}

    def dispatch(self, commands: dict[int, RobotCommand]) -> SendReport:
        report = SendReport()
        for robot_id, cmd in sorted(commands.items()):
            ep = self._endpoints.get(robot_id)
            if ep is None:
                report.errors[robot_id] = "no endpoint configured"
                continue
            try:
                if ep.transport == "udp":
                    self._sock.sendto(encode_udp_csv(cmd), ep.address)
                else:
                    self._serial_write(ep.address, encode_serial_frame(robot_id, cmd))
                report.sent.append(robot_id)
            except OSError as exc:
                report.errors[robot_id] = str(exc)
        return report

    def _serial_write(self, device: str, frame: bytes):
        handle = self._serial_handles.get(device)
        if handle is None:
            handle = open(device, "ab", buffering=0)
            self._serial_handles[device] = handle
        handle.write(frame)

    def close(self):
        self._sock.close()
        for handle in self._serial_handles.values():
            handle.close()
        self._serial_handles.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
