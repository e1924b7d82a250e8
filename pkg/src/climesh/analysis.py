"""Heterogeneity analysis over stored measurement days.

Works purely from the bytes of a closed store: records are decoded back
into per-timestamp snapshots of the indoor grid, the basic parameters
are derived (vapour pressure from the Magnus form, mean radiant
temperature from the globe equations), and every timestamp is
classified vertically and horizontally per parameter. Because the
stock wind channel is uncalibrated, mean radiant temperature falls
back to the natural-convection equation; the report records that as
the regime mode, and the radiant envelope view brackets the truth with
forced-convection curves over a velocity grid instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import climate, records, store
from .climate import BasicParameters
from .errors import NoDataError, NotReadyError
from .heterogeneity import (HORIZONTAL, VERTICAL, HEIGHT_ORDER, HeightLevel,
                            HomogeneityVerdict, ParameterKind, Snapshot,
                            assess_horizontal, assess_vertical,
                            intervals_from_flags)
from .station import WindCalibration

DEFAULT_KINDS = (ParameterKind.AIR_TEMP, ParameterKind.MEAN_RADIANT_TEMP)

REPORT_HEADER = ("timestamp", "datetime_utc", "parameter", "axis", "mean",
                 "limit", "limit_applicable", "homogeneous", "offenders", "missing")
INTERVALS_HEADER = ("date", "parameter", "axis", "start", "end",
                    "start_utc", "end_utc", "duration_s")


def resolve_store_root(path: Path | str) -> Path:
    """Accept either a run directory or its data/ subdirectory."""
    path = Path(path)
    if (path / "data").is_dir():
        return path / "data"
    return path


def _stamp(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


def _column(rec: np.void, wind: Optional[WindCalibration]) -> dict[HeightLevel, BasicParameters]:
    """BasicParameters per height from one delivered record."""
    column = {}
    calibrated = wind is not None and wind.calibrated \
        and not (int(rec["flags"]) & records.FLAG_WIND_UNCALIBRATED)
    for h, level in enumerate(HEIGHT_ORDER):
        t_a = int(rec["readings"][h * 4 + 0]) / 1000.0
        t_g = int(rec["readings"][h * 4 + 1]) / 1000.0
        volts = int(rec["readings"][h * 4 + 2]) / 1000.0
        rh = min(100.0, max(0.0, int(rec["readings"][h * 4 + 3]) / 1000.0))
        if calibrated:
            speed, _ = wind.volts_to_speed(volts)
            t_r, _ = climate.mean_radiant_temperature(
                climate.RawReadings(t_a, t_g, speed, rh))
        else:
            speed = 0.0
            t_r = climate.natural_radiant_temperature(t_g, t_a)
        column[level] = BasicParameters(
            air_temp=t_a,
            mean_radiant_temp=t_r,
            air_velocity=speed,
            vapour_pressure=climate.partial_vapour_pressure(t_a, rh),
        )
    return column


def day_snapshots(day_dir: Path | str, wind: Optional[WindCalibration] = None
                  ) -> list[Snapshot]:
    """Decode one closed day into indoor-grid snapshots, one per round.

    Missing records keep their station present-but-None so the
    classifier can exclude it explicitly; outdoor stations never enter
    the snapshots.
    """
    manifest = store.load_manifest(day_dir)
    frames = store.read_day(day_dir, manifest["stations"])

    indoor: dict[int, np.ndarray] = {}
    for sid, arr in frames.items():
        if arr.size and not (int(arr["flags"][0]) & records.FLAG_OUTDOOR):
            indoor[sid] = arr
        elif arr.size == 0:
            indoor[sid] = arr

    lengths = {arr.shape[0] for arr in indoor.values()}
    if len(lengths) > 1:
        raise NotReadyError(f"uneven record counts in {day_dir}: {sorted(lengths)}")
    n_rounds = lengths.pop() if lengths else 0

    snapshots = []
    sids = sorted(indoor)
    for i in range(n_rounds):
        ts = int(next(iter(indoor.values()))["timestamp"][i])
        stations = {}
        for sid in sids:
            rec = indoor[sid][i]
            stations[sid] = None if int(rec["flags"]) & records.FLAG_MISSING \
                else _column(rec, wind)
        snapshots.append(Snapshot(timestamp=ts, stations=stations))
    return snapshots


@dataclass
class AnalysisReport:
    """Verdicts, per-day heterogeneity intervals and summary counters."""

    days: list[str]
    kinds: list[ParameterKind]
    rows: list[tuple] = field(default_factory=list)
    intervals: dict[tuple[str, str, str], list[tuple[int, int]]] = field(default_factory=dict)
    radiant_regime: str = "natural-fallback"

    def intervals_for(self, date: str, kind: ParameterKind, axis: str) -> list[tuple[int, int]]:
        return self.intervals.get((date, kind.value, axis), [])

    def summary(self) -> dict:
        per_day = {}
        for (date, kind, axis), spans in sorted(self.intervals.items()):
            entry = per_day.setdefault(date, {})
            entry[f"{kind}/{axis}"] = [
                {"start": s, "end": e, "duration_s": e - s} for s, e in spans]
        return {
            "days": self.days,
            "parameters": [k.value for k in self.kinds],
            "radiant_regime": self.radiant_regime,
            "heterogeneity_intervals": per_day,
        }

    def write(self, out_dir: Path | str):
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "report.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(REPORT_HEADER)
            writer.writerows(self.rows)
        with open(out_dir / "intervals.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(INTERVALS_HEADER)
            for (date, kind, axis), spans in sorted(self.intervals.items()):
                for s, e in spans:
                    writer.writerow([date, kind, axis, s, e, _stamp(s), _stamp(e), e - s])
        with open(out_dir / "analysis_summary.json", "w") as fh:
            json.dump(self.summary(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def _verdict_row(ts: int, verdict: HomogeneityVerdict) -> tuple:
    offenders = ";".join(f"{label}:{value:.3f}" for label, value in verdict.offenders)
    homogeneous = "" if verdict.homogeneous is None else int(verdict.homogeneous)
    limit = "" if verdict.limit is None else round(verdict.limit, 4)
    return (ts, _stamp(ts), verdict.parameter.value, verdict.axis,
            round(verdict.mean, 4), limit, int(verdict.limit_applicable),
            homogeneous, offenders, ";".join(verdict.missing))


def analyze(store_root: Path | str,
            kinds: Sequence[ParameterKind] = DEFAULT_KINDS,
            wind: Optional[WindCalibration] = None,
            debounce_s: float = 0.0,
            out_dir: Optional[Path | str] = None) -> AnalysisReport:
    """Classify every stored timestamp of every closed day.

    Produces one verdict row per timestamp x parameter x axis and the
    per-day heterogeneous intervals. Raises NotReadyError when the
    store has no closed day yet.
    """
    root = resolve_store_root(store_root)
    days = store.closed_days(root)
    if not days:
        raise NotReadyError(f"no closed days under {root}")

    wind = wind or WindCalibration()
    report = AnalysisReport(days=days, kinds=list(kinds),
                            radiant_regime="selected" if wind.calibrated
                            else "natural-fallback")
    for date in days:
        snapshots = day_snapshots(root / date, wind)
        timestamps = [s.timestamp for s in snapshots]
        flags: dict[tuple[str, str], list[bool]] = {}
        for snap in snapshots:
            for kind in kinds:
                for axis, assess in ((VERTICAL, assess_vertical),
                                     (HORIZONTAL, assess_horizontal)):
                    try:
                        verdict = assess(snap, kind)
                        bad = verdict.heterogeneous
                        report.rows.append(_verdict_row(snap.timestamp, verdict))
                    except NoDataError:
                        bad = False
                        report.rows.append((snap.timestamp, _stamp(snap.timestamp),
                                            kind.value, axis, "", "", 0, "", "", "all"))
                    flags.setdefault((kind.value, axis), []).append(bad)
        for (kind_name, axis), flag_list in flags.items():
            report.intervals[(date, kind_name, axis)] = intervals_from_flags(
                timestamps, flag_list, debounce_s)

    if out_dir is not None:
        report.write(out_dir)
    return report


# -- radiant envelope ---------------------------------------------------------

ENVELOPE_VELOCITIES = tuple(round(0.1 * i, 1) for i in range(1, 11))

ENVELOPE_HEADER = ("timestamp", "datetime_utc", "t_a_c", "t_g_c", "natural_c") + tuple(
    f"forced_{v:.1f}ms_c" for v in ENVELOPE_VELOCITIES)


def radiant_envelope(store_root: Path | str, station_id: int, date: str
                     ) -> list[tuple]:
    """Natural and forced mean radiant temperature curves for one station-day.

    The wind channel is uncalibrated in the stock setup, so instead of
    a single radiant trace the station's abdomen-bar readings produce
    the natural-convection curve plus forced-convection curves over a
    0.1..1.0 m/s velocity grid; the true value lies inside that
    envelope. Rows cover the delivered records only.
    """
    root = resolve_store_root(store_root)
    day_dir = root / date
    manifest = store.load_manifest(day_dir)
    if station_id not in manifest["stations"]:
        raise NoDataError(f"station {station_id} not in store for {date}")
    arr = store.read_station_day(day_dir, station_id)
    rows = []
    for rec in arr:
        if int(rec["flags"]) & records.FLAG_MISSING:
            continue
        ts = int(rec["timestamp"])
        t_a = int(rec["readings"][4 + 0]) / 1000.0   # abdomen bar
        t_g = int(rec["readings"][4 + 1]) / 1000.0
        natural = climate.natural_radiant_temperature(t_g, t_a)
        forced = tuple(round(climate.forced_radiant_temperature(t_g, t_a, v), 3)
                       for v in ENVELOPE_VELOCITIES)
        rows.append((ts, _stamp(ts), t_a, t_g, round(natural, 3)) + forced)
    if not rows:
        raise NoDataError(f"station {station_id} delivered nothing on {date}")
    return rows


def write_envelope_csv(rows: list[tuple], out_path: Path | str):
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ENVELOPE_HEADER)
        writer.writerows(rows)
