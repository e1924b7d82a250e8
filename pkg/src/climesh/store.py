"""Daily on-disk store of measurement records and link-quality logs.

Layout, one directory per UTC day under the store root:

    data/YYYY-MM-DD/station01.rec ... stationNN.rec   fixed 64-byte records
    data/YYYY-MM-DD/linklog.csv                       one line per poll attempt
    data/YYYY-MM-DD/manifest.json                     counts, sizes, sha256

Record files are append-only while a day is open; the manifest is
written when the day closes (midnight rollover or end of run) and marks
the day as closed. Checksums let the backup exporter detect tampering
on read-back.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import climate, records, station
from .errors import NotReadyError, StorageError

LINKLOG_HEADER = ("time_s", "sequence", "station", "attempt", "outcome",
                  "hops", "worst_rssi_dbm", "path")

CSV_EXPORT_HEADER = ("datetime_utc", "station", "height", "t_a_c", "t_g_c",
                     "v_a_volts", "v_a_ms", "rh_percent", "p_a_kpa",
                     "t_r_c", "regime", "uvi", "rssi_dbm", "hops", "missing")

_HEIGHT_NAMES = ("ankle", "abdomen", "head")


def utc_date(timestamp: int) -> str:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).strftime("%Y-%m-%d")


def _station_filename(station_id: int) -> str:
    return f"station{station_id:02d}.rec"


class DailyStore:
    """Single-writer append store with midnight rollover."""

    def __init__(self, root: Path | str, station_ids: Sequence[int]):
        self.root = Path(root)
        self.station_ids = tuple(sorted(station_ids))
        self.current_date: Optional[str] = None
        self._files: dict[int, io.BufferedWriter] = {}
        self._linklog: Optional[io.TextIOWrapper] = None
        self._counts: dict[int, int] = {}
        self._missing: dict[int, int] = {}
        self.root.mkdir(parents=True, exist_ok=True)

    # -- day lifecycle -------------------------------------------------------

    def day_dir(self, date: str) -> Path:
        return self.root / date

    def rollover(self, date: str):
        """Close the open day (if any) and open directories for a new one."""
        if self.current_date == date:
            return
        self.close_day()
        day = self.day_dir(date)
        if (day / "manifest.json").exists():
            raise StorageError(f"day {date} is already closed; refusing to reopen")
        day.mkdir(parents=True, exist_ok=True)
        for sid in self.station_ids:
            self._files[sid] = open(day / _station_filename(sid), "ab")
        self._linklog = open(day / "linklog.csv", "a", newline="")
        csv.writer(self._linklog).writerow(LINKLOG_HEADER)
        self._counts = {sid: 0 for sid in self.station_ids}
        self._missing = {sid: 0 for sid in self.station_ids}
        self.current_date = date

    def persist(self, batch: Iterable[records.MeasurementRecord]):
        """Append records, rolling the day over when their date changes."""
        for rec in batch:
            date = utc_date(rec.timestamp)
            if date != self.current_date:
                self.rollover(date)
            handle = self._files.get(rec.station_id)
            if handle is None:
                raise StorageError(f"store has no file for station {rec.station_id}")
            handle.write(records.encode_record(rec))
            self._counts[rec.station_id] += 1
            if rec.missing:
                self._missing[rec.station_id] += 1

    def append_linklog(self, rows: Iterable[Sequence]):
        if self._linklog is None:
            raise StorageError("no open day to log into")
        writer = csv.writer(self._linklog)
        for row in rows:
            writer.writerow(row)

    def close_day(self):
        """Flush, checksum and write the manifest for the open day."""
        if self.current_date is None:
            return
        for handle in self._files.values():
            handle.close()
        if self._linklog is not None:
            self._linklog.close()
        day = self.day_dir(self.current_date)
        manifest = {
            "date": self.current_date,
            "record_size": records.RECORD_SIZE,
            "stations": list(self.station_ids),
            "delivered": sum(self._counts.values()) - sum(self._missing.values()),
            "missing": sum(self._missing.values()),
            "files": {},
        }
        for sid in self.station_ids:
            path = day / _station_filename(sid)
            manifest["files"][path.name] = {
                "bytes": path.stat().st_size,
                "records": self._counts[sid],
                "sha256": _sha256(path),
            }
        log = day / "linklog.csv"
        manifest["files"]["linklog.csv"] = {"bytes": log.stat().st_size,
                                            "sha256": _sha256(log)}
        with open(day / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
            fh.write("\n")
        self._files.clear()
        self._linklog = None
        self.current_date = None

    def close(self):
        self.close_day()


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# -- reading back ------------------------------------------------------------

def closed_days(root: Path | str) -> list[str]:
    """Dates under the store root that have a manifest (i.e. are closed)."""
    root = Path(root)
    if not root.is_dir():
        raise StorageError(f"store root {root} does not exist")
    return sorted(p.name for p in root.iterdir()
                  if p.is_dir() and (p / "manifest.json").exists())


def load_manifest(day_dir: Path | str) -> dict:
    path = Path(day_dir) / "manifest.json"
    if not path.exists():
        raise NotReadyError(f"day {Path(day_dir).name} is still open (no manifest)")
    with open(path) as fh:
        return json.load(fh)


def verify_day(day_dir: Path | str) -> dict:
    """Check every file of a closed day against its manifest checksums."""
    day_dir = Path(day_dir)
    manifest = load_manifest(day_dir)
    for name, meta in manifest["files"].items():
        path = day_dir / name
        if not path.exists():
            raise StorageError(f"{path} listed in manifest but missing on disk")
        if path.stat().st_size != meta["bytes"]:
            raise StorageError(f"{path} size {path.stat().st_size} != manifest {meta['bytes']}")
        if _sha256(path) != meta["sha256"]:
            raise StorageError(f"checksum mismatch for {path}")
        if "records" in meta and meta["bytes"] != meta["records"] * records.RECORD_SIZE:
            raise StorageError(f"{path} byte count inconsistent with record count")
    return manifest


def export_backup_manifest(root: Path | str, date: str) -> dict:
    """Verified manifest for a closed day, ready for an external transport."""
    day_dir = Path(root) / date
    if not day_dir.is_dir():
        raise StorageError(f"no day directory {day_dir}")
    return verify_day(day_dir)


def read_station_day(day_dir: Path | str, station_id: int) -> np.ndarray:
    """All records of one station for one day as a structured array."""
    path = Path(day_dir) / _station_filename(station_id)
    if not path.exists():
        raise StorageError(f"no record file {path}")
    return np.fromfile(path, dtype=records.RECORD_DTYPE)


def read_day(day_dir: Path | str, station_ids: Sequence[int]) -> dict[int, np.ndarray]:
    return {sid: read_station_day(day_dir, sid) for sid in station_ids}


# -- human-readable export ---------------------------------------------------

def export_day_csv(day_dir: Path | str, out_path: Path | str,
                   wind: Optional[station.WindCalibration] = None):
    """Write the per-height CSV view of one closed day.

    Each record expands to three rows (ankle, abdomen, head) carrying
    the stored readings plus the derived quantities: calibrated wind
    speed, vapour pressure and mean radiant temperature with its
    convection regime. With the placeholder wind curve the radiant
    temperature falls back to the natural-convection equation and the
    regime column notes it.
    """
    day_dir = Path(day_dir)
    manifest = load_manifest(day_dir)
    wind = wind or station.WindCalibration()
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_EXPORT_HEADER)
        for sid in manifest["stations"]:
            for rec in read_station_day(day_dir, sid):
                _write_record_rows(writer, rec, wind)


def _write_record_rows(writer, rec: np.ndarray, wind: station.WindCalibration):
    sid = int(rec["station"])
    ts = int(rec["timestamp"])
    stamp = datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")
    flags = int(rec["flags"])
    missing = bool(flags & records.FLAG_MISSING)
    uncal = bool(flags & records.FLAG_WIND_UNCALIBRATED) or not wind.calibrated
    hops = int(rec["hops"])
    rssi = int(rec["rssi"]) / 10.0
    for h, name in enumerate(_HEIGHT_NAMES):
        if missing:
            writer.writerow([stamp, sid, name, "", "", "", "", "", "", "", "",
                             "", "", "", 1])
            continue
        t_a = int(rec["readings"][h * 4 + 0]) / 1000.0
        t_g = int(rec["readings"][h * 4 + 1]) / 1000.0
        volts = int(rec["readings"][h * 4 + 2]) / 1000.0
        rh = int(rec["readings"][h * 4 + 3]) / 1000.0
        speed, _ = wind.volts_to_speed(volts)
        p_a = climate.partial_vapour_pressure(t_a, min(100.0, max(0.0, rh)))
        if uncal:
            t_r, _ = climate.mean_radiant_temperature(
                climate.RawReadings(t_a, t_g, 0.0, min(100.0, max(0.0, rh))))
            regime = "natural-fallback"
        else:
            t_r, regime = climate.mean_radiant_temperature(
                climate.RawReadings(t_a, t_g, speed, min(100.0, max(0.0, rh))))
        uvi = int(rec["uvi"]) / 100.0 if name == "head" else ""
        writer.writerow([stamp, sid, name, t_a, t_g, volts,
                         speed if not uncal else "",
                         rh, round(p_a, 4), round(t_r, 3), regime, uvi,
                         rssi, hops, 0])
