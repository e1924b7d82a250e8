"""Homogeneous/heterogeneous classification of a workspace per ISO 7726.

A space is homogeneous in one basic parameter when every probe stays
within the standard's deviation band around the mean. Vertically the
comparison runs over the three measurement planes (ankle, abdomen,
head, weighted 1-2-1); horizontally over the per-station weighted
means. Each parameter is judged independently: a greenhouse can be
heterogeneous in air temperature and homogeneous in mean radiant
temperature at the same instant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .climate import BasicParameters
from .errors import DomainError, NoDataError

VERTICAL = "vertical"
HORIZONTAL = "horizontal"


class HeightLevel(enum.Enum):
    """The three ISO 7726 measurement heights for a standing subject."""

    ANKLE = "ankle"
    ABDOMEN = "abdomen"
    HEAD = "head"

    @property
    def height_m(self) -> float:
        return _HEIGHTS_M[self]

    @property
    def weight(self) -> int:
        return _WEIGHTS[self]


_HEIGHTS_M = {HeightLevel.ANKLE: 0.23, HeightLevel.ABDOMEN: 0.93, HeightLevel.HEAD: 1.56}
_WEIGHTS = {HeightLevel.ANKLE: 1, HeightLevel.ABDOMEN: 2, HeightLevel.HEAD: 1}

HEIGHT_ORDER = (HeightLevel.ANKLE, HeightLevel.ABDOMEN, HeightLevel.HEAD)


class ParameterKind(enum.Enum):
    """The four basic parameters the deviation limits apply to."""

    AIR_TEMP = "air_temp"
    MEAN_RADIANT_TEMP = "mean_radiant_temp"
    AIR_VELOCITY = "air_velocity"
    VAPOUR_PRESSURE = "vapour_pressure"

    def value_of(self, p: BasicParameters) -> float:
        return getattr(p, self.value)


# Validity window of the temperature deviation limits, C (open interval).
_TEMP_VALIDITY = (0.0, 50.0)


def weighted_vertical_mean(ankle: float, abdomen: float, head: float) -> float:
    """Three-height mean with the 1-2-1 ankle/abdomen/head weighting."""
    if not all(math.isfinite(v) for v in (ankle, abdomen, head)):
        raise DomainError("weighted mean needs finite inputs")
    return (ankle + 2.0 * abdomen + head) / 4.0


def homogeneity_limit(kind: ParameterKind, mean: float) -> float:
    """Maximum admissible deviation (+/-) around the mean for one parameter.

    Air temperature: 2.0 C and mean radiant temperature: 10.0 C, both
    valid only for means strictly inside 0..50 C; air velocity:
    0.3 + 0.15 * mean (m/s); vapour pressure: 0.45 kPa.

    Raises DomainError when a temperature mean falls outside the
    validity window; callers must surface that, not treat it as a pass.
    """
    if kind is ParameterKind.AIR_TEMP or kind is ParameterKind.MEAN_RADIANT_TEMP:
        lo, hi = _TEMP_VALIDITY
        if not lo < mean < hi:
            raise DomainError(
                f"{kind.value} deviation limit only defined for means in "
                f"({lo}, {hi}) C, got {mean}"
            )
        return 2.0 if kind is ParameterKind.AIR_TEMP else 10.0
    if kind is ParameterKind.AIR_VELOCITY:
        return 0.3 + 0.15 * mean
    return 0.45


# One timestamped reading grid: station id -> height -> BasicParameters.
# A station may be absent/None (nothing delivered) or have missing heights.
StationColumn = Mapping[HeightLevel, BasicParameters]


@dataclass(frozen=True)
class Snapshot:
    """Simultaneous readings of the indoor station grid at one instant."""

    timestamp: int
    stations: Mapping[int, Optional[StationColumn]]

    def present(self) -> dict[int, StationColumn]:
        return {sid: col for sid, col in sorted(self.stations.items()) if col}


@dataclass(frozen=True)
class HomogeneityVerdict:
    """Outcome of one deviation-band check.

    ``homogeneous`` is True/False when the limit applies and None when
    the mean is outside the limit's validity window ("limit not
    applicable"): that case is surfaced, never silently passed.
    """

    parameter: ParameterKind
    axis: str
    mean: float
    limit: Optional[float]
    offenders: tuple[tuple[str, float], ...]
    homogeneous: Optional[bool]
    limit_applicable: bool = True
    missing: tuple[str, ...] = ()

    @property
    def heterogeneous(self) -> bool:
        return self.homogeneous is False


def _verdict(kind, axis, mean, samples, missing):
    """Compare labelled samples against mean +/- limit."""
    try:
        limit = homogeneity_limit(kind, mean)
    except DomainError:
        return HomogeneityVerdict(kind, axis, mean, None, (), None,
                                  limit_applicable=False, missing=tuple(missing))
    offenders = tuple((label, value) for label, value in samples
                      if abs(value - mean) > limit)
    return HomogeneityVerdict(kind, axis, mean, limit, offenders,
                              homogeneous=not offenders, missing=tuple(missing))


def assess_vertical(snapshot: Snapshot, kind: ParameterKind) -> HomogeneityVerdict:
    """Vertical check: plane means vs the weighted overall mean.

    Each plane mean averages the stations that reported that height;
    the overall mean combines the three plane means with weights 1-2-1.
    """
    present = snapshot.present()
    if not present:
        raise NoDataError(f"snapshot at {snapshot.timestamp} has no stations")

    plane_means: dict[HeightLevel, float] = {}
    missing = [f"MS-{sid}" for sid, col in sorted(snapshot.stations.items()) if not col]
    for level in HEIGHT_ORDER:
        values = [kind.value_of(col[level]) for col in present.values() if level in col]
        if values:
            plane_means[level] = sum(values) / len(values)
        else:
            missing.append(f"plane:{level.value}")
    if not plane_means:
        raise NoDataError(f"snapshot at {snapshot.timestamp} has no usable planes")

    wsum = sum(level.weight * m for level, m in plane_means.items())
    wtot = sum(level.weight for level in plane_means)
    overall = wsum / wtot
    samples = [(level.value, plane_means[level]) for level in HEIGHT_ORDER if level in plane_means]
    return _verdict(kind, VERTICAL, overall, samples, missing)


def assess_horizontal(snapshot: Snapshot, kind: ParameterKind) -> HomogeneityVerdict:
    """Horizontal check: per-station weighted means vs their plain average.

    Stations missing any of the three heights are excluded and recorded
    in the verdict.
    """
    present = snapshot.present()
    if not present:
        raise NoDataError(f"snapshot at {snapshot.timestamp} has no stations")

    missing = [f"MS-{sid}" for sid, col in sorted(snapshot.stations.items()) if not col]
    samples = []
    for sid, col in present.items():
        if all(level in col for level in HEIGHT_ORDER):
            value = weighted_vertical_mean(*(kind.value_of(col[level]) for level in HEIGHT_ORDER))
            samples.append((f"MS-{sid}", value))
        else:
            missing.append(f"MS-{sid}")
    if not samples:
        raise NoDataError(f"snapshot at {snapshot.timestamp} has no complete stations")

    overall = sum(v for _, v in samples) / len(samples)
    return _verdict(kind, HORIZONTAL, overall, samples, missing)


def intervals_from_flags(timestamps: Sequence[int], heterogeneous: Sequence[bool],
                         debounce_s: float = 0.0) -> list[tuple[int, int]]:
    """Maximal runs of heterogeneous timestamps as (start, end) pairs.

    Consecutive flagged samples always belong to one run. A homogeneous
    stretch splits runs unless it is no longer than ``debounce_s``
    seconds; the default 0 keeps every run exact.
    """
    intervals: list[tuple[int, int]] = []
    run_start = run_end = None
    gap_open = False
    for ts, bad in zip(timestamps, heterogeneous):
        if not bad:
            gap_open = run_start is not None
            continue
        if run_start is None:
            run_start = run_end = ts
        elif gap_open and ts - run_end > debounce_s:
            intervals.append((run_start, run_end))
            run_start = run_end = ts
        else:
            run_end = ts
        gap_open = False
    if run_start is not None:
        intervals.append((run_start, run_end))
    return intervals


def heterogeneity_intervals(series: Iterable[Snapshot], kind: ParameterKind,
                            axis: str, debounce_s: float = 0.0) -> list[tuple[int, int]]:
    """Heterogeneous (start, end) intervals over a time-ordered snapshot series."""
    assess = assess_vertical if axis == VERTICAL else assess_horizontal
    timestamps: list[int] = []
    flags: list[bool] = []
    for snap in series:
        timestamps.append(snap.timestamp)
        try:
            flags.append(assess(snap, kind).heterogeneous)
        except NoDataError:
            flags.append(False)
    if any(b - a < 0 for a, b in zip(timestamps, timestamps[1:])):
        raise DomainError("snapshot series must be time-ordered")
    return intervals_from_flags(timestamps, flags, debounce_s)
