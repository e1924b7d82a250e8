"""Central control station: synchronized triggers and the polling round.

Every trigger period the collector floods a sample-now packet down the
routing tree so all stations measure at the same instant, waits a
settle delay for the ADCs, then polls the stations one by one in
ascending id order. A lost exchange is retried up to the configured
count within the same round; whatever is still missing when the round
ends is recorded as a missing-flagged record, so delivered plus missing
always equals stations times rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import radio, records
from .errors import ConfigError
from .field import ClimateField
from .radio import COLLECTOR_ID, RadioEnvironment, RoutingTree
from .station import PollPacket, Station, TriggerPacket


@dataclass(frozen=True)
class PollSchedule:
    """Timing of one trigger/poll cycle."""

    trigger_period_s: float = 20.0
    settle_delay_s: float = 5.0
    retries: int = 3
    poll_slot_s: float = 0.5

    def __post_init__(self):
        if self.settle_delay_s >= self.trigger_period_s:
            raise ConfigError("settle delay must be shorter than the trigger period")
        if self.retries < 0 or self.poll_slot_s <= 0 or self.trigger_period_s <= 0:
            raise ConfigError("invalid schedule timings")


@dataclass
class PollOutcome:
    """Result of polling one station for one round."""

    record: records.MeasurementRecord
    attempts: int
    log_rows: list


class Collector:
    """Sequential collector state machine over a radio environment."""

    def __init__(self, schedule: PollSchedule, env: RadioEnvironment,
                 stations: dict[int, Station]):
        self.schedule = schedule
        self.env = env
        self.stations = stations
        self.tracker = radio.LinkRateTracker()
        self._quality: dict[tuple[int, int], tuple[float, float]] = {}

    def _link_pq(self, a: int, b: int, t: float) -> tuple[float, float]:
        """(delivery probability, rssi) cached for the current round.

        Link quality drifts on crop-growth timescales, so one lookup at
        the trigger instant stands for the whole 20 s round.
        """
        key = (a, b) if a < b else (b, a)
        hit = self._quality.get(key)
        if hit is None:
            link = self.env.link(*key)
            _, p = radio.link_quality(link, t)
            hit = self._quality[key] = (p, link.rssi_dbm(t))
        return hit

    def _bernoulli(self, p: float, rng: np.random.Generator) -> bool:
        # mirror radio.deliver: certain outcomes consume no draw
        if p >= 1.0:
            return True
        if p <= 0.0:
            return False
        return float(rng.random()) < p

    # -- trigger --------------------------------------------------------------

    def broadcast_trigger(self, tree: RoutingTree, sequence: int, timestamp: int,
                          field: ClimateField, rng: np.random.Generator,
                          sensor_rng_for) -> list[int]:
        """Flood the trigger down the tree; reached stations sample.

        Returns the station ids that actually received the trigger.
        Trigger transmissions ride the same lossy links as everything
        else unless the radio is configured with reliable triggers.
        """
        self._quality.clear()
        trigger = TriggerPacket(sequence=sequence, timestamp=timestamp)
        reached = {COLLECTOR_ID}
        reliable = self.env.params.reliable_trigger
        for parent, child in tree.flood_edges():
            if parent not in reached:
                continue
            if reliable or self._bernoulli(self._link_pq(parent, child, timestamp)[0], rng):
                reached.add(child)
        reached_stations = sorted(reached - {COLLECTOR_ID})
        for sid in reached_stations:
            self.stations[sid].on_trigger(trigger, field, sensor_rng_for(sid, sequence))
        return reached_stations

    # -- polling --------------------------------------------------------------

    def run_polling_round(self, tree: RoutingTree, sequence: int, trigger_time: int,
                          rng: np.random.Generator) -> tuple[list[records.MeasurementRecord], list, float]:
        """Poll every station once, with retries, inside one trigger period.

        Returns (records in station order, link-log rows, round end time).
        Attempts that would overrun the period are abandoned and the
        affected stations recorded as missing/truncated: the next
        trigger must never wait for a slow round.
        """
        t0 = trigger_time + self.schedule.settle_delay_s
        deadline = trigger_time + self.schedule.trigger_period_s
        cursor = t0
        out: list[records.MeasurementRecord] = []
        log_rows: list = []
        for sid in sorted(self.stations):
            outcome, cursor = self._poll_station(tree, sid, sequence, trigger_time,
                                                 cursor, deadline, rng)
            out.append(outcome.record)
            log_rows.extend(outcome.log_rows)
        return out, log_rows, cursor

    def _poll_station(self, tree: RoutingTree, sid: int, sequence: int,
                      trigger_time: int, cursor: float, deadline: float,
                      rng: np.random.Generator) -> tuple[PollOutcome, float]:
        base_flags = 0
        if not self.stations[sid].wind.calibrated:
            base_flags |= records.FLAG_WIND_UNCALIBRATED
        if not self.stations[sid].site.indoor:
            base_flags |= records.FLAG_OUTDOOR

        if sid not in tree:
            rec = records.missing_record(sequence, trigger_time, sid,
                                         base_flags | records.FLAG_UNREACHABLE)
            return PollOutcome(rec, 0, [self._log(cursor, sequence, sid, 0,
                                                  "unreachable", 0, None, "")]), cursor

        path_up = tree.path_up(sid)                      # station ... collector
        path_down = list(reversed(path_up))              # collector ... station
        attempts = 0
        log_rows = []
        rec = None
        while attempts <= self.schedule.retries:
            if cursor + self.schedule.poll_slot_s > deadline:
                rec = records.missing_record(sequence, trigger_time, sid,
                                             base_flags | records.FLAG_TRUNCATED)
                log_rows.append(self._log(cursor, sequence, sid, attempts,
                                          "truncated", 0, None, ""))
                break
            attempts += 1
            outcome, rssi, hops_done = self._attempt(tree, sid, sequence, path_down,
                                                     path_up, cursor, rng)
            log_rows.append(self._log(cursor, sequence, sid, attempts, outcome,
                                      hops_done, rssi, ">".join(map(str, path_up))))
            cursor += self.schedule.poll_slot_s
            if outcome == "ok":
                payload = self.stations[sid].on_poll(PollPacket(sequence, sid)).payload
                rec = records.delivered_record(payload, rssi, len(path_up) - 1,
                                               base_flags)
                break
            if outcome == "stale":
                rec = records.missing_record(sequence, trigger_time, sid,
                                             base_flags | records.FLAG_STALE)
                break
            if outcome == "no-data":
                rec = records.missing_record(sequence, trigger_time, sid,
                                             base_flags | records.FLAG_NO_DATA)
                break
            # lost somewhere on the path: retry if the budget allows
        if rec is None:
            rec = records.missing_record(sequence, trigger_time, sid, base_flags)
        return PollOutcome(rec, attempts, log_rows), cursor

    def _attempt(self, tree: RoutingTree, sid: int, sequence: int,
                 path_down: list[int], path_up: list[int], t: float,
                 rng: np.random.Generator):
        """One poll exchange: request downstream, response upstream."""
        worst_rssi = None
        hops_done = 0
        # poll request, collector -> station
        for a, b in zip(path_down, path_down[1:]):
            p, rssi = self._link_pq(a, b, t)
            ok = self._bernoulli(p, rng)
            self.tracker.record(a, b, ok)
            worst_rssi = _min_rssi(worst_rssi, rssi)
            hops_done += 1
            if not ok:
                return "lost-down", worst_rssi, hops_done
        response = self.stations[sid].on_poll(PollPacket(sequence, sid))
        # response, station -> collector (no-data replies travel too)
        for a, b in zip(path_up, path_up[1:]):
            p, rssi = self._link_pq(a, b, t)
            ok = self._bernoulli(p, rng)
            self.tracker.record(a, b, ok)
            worst_rssi = _min_rssi(worst_rssi, rssi)
            hops_done += 1
            if not ok:
                return "lost-up", worst_rssi, hops_done
        if response.kind == "no-data":
            return "no-data", worst_rssi, hops_done
        if response.sequence != sequence:
            return "stale", worst_rssi, hops_done
        return "ok", worst_rssi, hops_done

    @staticmethod
    def _log(t, sequence, sid, attempt, outcome, hops, rssi, path):
        return [f"{t:.1f}", sequence, sid, attempt, outcome, hops,
                "" if rssi is None else f"{rssi:.1f}", path]


def _min_rssi(current: Optional[float], new: float) -> float:
    return new if current is None else min(current, new)
