"""Binary layouts shared by the radio payloads and the daily store.

A station answers a poll with a fixed 59-byte sample payload; the
collector extends it with delivery metadata (path RSSI, hop count,
status flags) and one padding byte into a 64-byte record. Everything is
little-endian and packed.

Sample payload                      Stored record (64 B)
  u32  trigger sequence               bytes 0..58: sample payload
  u32  UTC timestamp, seconds         i16  path RSSI, dBm x 10
  u8   station id                     u8   delivery hop count
  12 x i32 readings, milli-units      u8   status flags
       (ankle, abdomen, head) x       u8   padding (zero)
       (t_a mC, t_g mC, wind mV, RH m%)
  u16  UVI x 100

Missing rounds still produce a record: readings carry the all-bits-one
sentinel and the MISSING flag is set, so delivered + missing always
equals stations x rounds.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

SAMPLE_STRUCT = struct.Struct("<IIB12iH")
RECORD_STRUCT = struct.Struct("<IIB12iHhBBx")
SAMPLE_WIRE_SIZE = SAMPLE_STRUCT.size   # 59
RECORD_SIZE = RECORD_STRUCT.size        # 64

# Status flags.
FLAG_MISSING = 0x01        # no usable data for this round
FLAG_NO_DATA = 0x02        # station answered but had no buffered sample
FLAG_STALE = 0x04          # station answered with an older trigger sequence
FLAG_TRUNCATED = 0x08      # polling round ran out of time
FLAG_UNREACHABLE = 0x10    # station absent from the routing tree
FLAG_WIND_UNCALIBRATED = 0x20  # wind volts recorded against a placeholder curve
FLAG_OUTDOOR = 0x40        # station sits outside the greenhouse

# All-bits-one sentinels for missing integer fields.
_SENTINEL_I32 = -1
_SENTINEL_U16 = 0xFFFF
_SENTINEL_I16 = -1
_SENTINEL_U8 = 0xFF

#: Reading order within each height block.
QUANTITIES = ("air_temp", "globe_temp", "wind_volts", "relative_humidity")


@dataclass(frozen=True)
class MeasurementRecord:
    """One station's result for one polling round, delivered or not."""

    sequence: int
    timestamp: int
    station_id: int
    readings: tuple[float, ...]  # 12 values, ankle/abdomen/head x 4 quantities
    uvi: float
    rssi_db: float
    hops: int
    flags: int

    @property
    def missing(self) -> bool:
        return bool(self.flags & FLAG_MISSING)

    def reading(self, height_index: int, quantity: str) -> float:
        return self.readings[height_index * 4 + QUANTITIES.index(quantity)]


def _milli(value: float) -> int:
    return int(round(value * 1000.0))


def encode_sample(sequence: int, timestamp: int, station_id: int,
                  readings: tuple[float, ...], uvi: float) -> bytes:
    """Pack one sample into its 59-byte radio payload."""
    if len(readings) != 12:
        raise FormatError(f"expected 12 readings, got {len(readings)}")
    return SAMPLE_STRUCT.pack(sequence, timestamp, station_id,
                              *(_milli(v) for v in readings),
                              int(round(uvi * 100.0)))


def decode_sample(payload: bytes):
    """Unpack a radio payload into (sequence, timestamp, station, readings, uvi)."""
    if len(payload) != SAMPLE_WIRE_SIZE:
        raise FormatError(f"sample payload must be {SAMPLE_WIRE_SIZE} bytes, got {len(payload)}")
    fields = SAMPLE_STRUCT.unpack(payload)
    seq, ts, sid = fields[0], fields[1], fields[2]
    readings = tuple(v / 1000.0 for v in fields[3:15])
    return seq, ts, sid, readings, fields[15] / 100.0


def delivered_record(payload: bytes, rssi_db: float, hops: int,
                     flags: int = 0) -> MeasurementRecord:
    """Wrap a delivered sample payload with its delivery metadata."""
    seq, ts, sid, readings, uvi = decode_sample(payload)
    return MeasurementRecord(seq, ts, sid, readings, uvi, rssi_db, hops, flags)


def missing_record(sequence: int, timestamp: int, station_id: int,
                   flags: int) -> MeasurementRecord:
    """Sentinel-filled record for a round that produced no data."""
    return MeasurementRecord(
        sequence, timestamp, station_id,
        readings=(_SENTINEL_I32 / 1000.0,) * 12,
        uvi=_SENTINEL_U16 / 100.0,
        rssi_db=_SENTINEL_I16 / 10.0,
        hops=_SENTINEL_U8,
        flags=flags | FLAG_MISSING,
    )


def encode_record(rec: MeasurementRecord) -> bytes:
    return RECORD_STRUCT.pack(
        rec.sequence, rec.timestamp, rec.station_id,
        *(_milli(v) for v in rec.readings),
        int(round(rec.uvi * 100.0)) & 0xFFFF,
        int(round(rec.rssi_db * 10.0)),
        rec.hops & 0xFF, rec.flags & 0xFF,
    )


def decode_record(raw: bytes) -> MeasurementRecord:
    if len(raw) != RECORD_SIZE:
        raise FormatError(f"record must be {RECORD_SIZE} bytes, got {len(raw)}")
    f = RECORD_STRUCT.unpack(raw)
    return MeasurementRecord(
        sequence=f[0], timestamp=f[1], station_id=f[2],
        readings=tuple(v / 1000.0 for v in f[3:15]),
        uvi=f[15] / 100.0,
        rssi_db=f[16] / 10.0,
        hops=f[17], flags=f[18],
    )


#: numpy view of a record file, for bulk analysis reads.
RECORD_DTYPE = np.dtype([
    ("sequence", "<u4"), ("timestamp", "<u4"), ("station", "u1"),
    ("readings", "<i4", (12,)), ("uvi", "<u2"), ("rssi", "<i2"),
    ("hops", "u1"), ("flags", "u1"), ("pad", "u1"),
])
assert RECORD_DTYPE.itemsize == RECORD_SIZE
