"""Deterministic discrete-event execution of a scenario.

The scheduler owns a single heap of timed events; ties resolve by a
fixed kind rank (rollover < trigger < settle-done < poll < retry <
reconfigure-check) and then by station id, so a run is a pure function
of (scenario, seed). Poll and retry attempts execute sequentially
inside their round, strictly inside the trigger period that started
them, and appear with their own virtual times in the link log.

Every random draw comes from substreams of the scenario seed: field
noise, per-(station, trigger) sensor noise, and one radio stream
consumed in event order.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import radio
from .collector import Collector
from .errors import ConfigError
from .field import ClimateField
from .radio import COLLECTOR_ID, RadioEnvironment, compute_routing_tree
from .rng import DOMAIN_RADIO, sensor_stream, substream
from .scenario import Scenario
from .station import Station
from .store import DailyStore, utc_date

# Event kinds in tie-break order: a midnight rollover must precede the
# first trigger of the new day when both fall on the same instant.
RANK_ROLLOVER = 0
RANK_TRIGGER = 1
RANK_SETTLE_DONE = 2
RANK_POLL = 3
RANK_RETRY = 4
RANK_RECONFIGURE = 5


@dataclass
class RunSummary:
    """Aggregates reported by a finished run."""

    scenario: str
    seed: int
    days: list
    reconfigurations: list
    unreachable_intervals: list
    totals: dict

    def to_json(self) -> str:
        doc = {
            "scenario": self.scenario,
            "seed": self.seed,
            "days": self.days,
            "reconfigurations": self.reconfigurations,
            "unreachable_intervals": self.unreachable_intervals,
            "totals": self.totals,
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"


class SimulationEngine:
    """One run of one scenario into one output directory."""

    def __init__(self, scenario: Scenario, out_root: Path | str):
        self.scenario = scenario
        self.out_root = Path(out_root)
        self.epoch = scenario.epoch

        geometry = scenario.geometry
        growth = radio.PlantGrowth(
            scenario.growth.start_height_m, scenario.growth.full_height_m,
            scenario.growth.growth_days, season_start_s=self.epoch)
        self.env = RadioEnvironment(geometry, scenario.radio, growth,
                                    relocated_antennas=scenario.relocated_antennas)
        self.stations = {
            site.station_id: Station(site, wind=scenario.wind)
            for site in geometry.sites
        }
        self.collector = Collector(scenario.schedule, self.env, self.stations)
        self.collector.tracker = radio.LinkRateTracker(
            window=scenario.reconfig.window,
            min_samples=scenario.reconfig.min_samples)
        self.radio_rng = substream(scenario.seed, DOMAIN_RADIO)
        self.store = DailyStore(self.out_root / "data", sorted(self.stations))

        self.tree = compute_routing_tree(self.env, self.epoch, version=1)
        self.sequence = 0
        self._fields = [ClimateField(geometry, scenario.day_profile(d), scenario.seed)
                        for d in range(scenario.n_days)]
        self._day_counts: list[dict] = []
        self._reconfigurations: list[dict] = []
        self._unreachable_open: dict[int, int] = {}
        self._unreachable_closed: list[dict] = []
        self._counter = itertools.count()

    # -- bookkeeping -----------------------------------------------------------

    def _sensor_rng(self, station_id: int, sequence: int):
        return sensor_stream(self.scenario.seed, station_id, sequence)

    def _station_e2e(self, t: float) -> dict[int, float]:
        """Model end-to-end delivery probability per station on the tree."""
        out = {}
        for sid in sorted(self.stations):
            if sid not in self.tree:
                out[sid] = 0.0
                continue
            p = 1.0
            path = self.tree.path_up(sid)
            for a, b in zip(path, path[1:]):
                p *= self.env.probability(a, b, t)
            out[sid] = p
        return out

    def _track_unreachable(self, t: float):
        now_unreachable = set(self.tree.unreachable)
        for sid in sorted(now_unreachable - set(self._unreachable_open)):
            self._unreachable_open[sid] = int(t)
        for sid in sorted(set(self._unreachable_open) - now_unreachable):
            self._unreachable_closed.append(
                {"station": sid, "start": self._unreachable_open.pop(sid), "end": int(t)})

    # -- event handlers ----------------------------------------------------------

    def _handle_rollover(self, t: float, day_index: int):
        self.store.rollover(utc_date(int(t)))
        self._day_counts.append({
            "date": utc_date(int(t)),
            "kind": self.scenario.day_kinds[day_index],
            "delivered": {sid: 0 for sid in sorted(self.stations)},
            "missing": {sid: 0 for sid in sorted(self.stations)},
        })

    def _handle_trigger(self, t: float, day_index: int):
        self.sequence += 1
        self.collector.broadcast_trigger(
            self.tree, self.sequence, int(t), self._fields[day_index],
            self.radio_rng, self._sensor_rng)

    def _handle_settle_done(self, t: float, trigger_time: int):
        recs, log_rows, round_end = self.collector.run_polling_round(
            self.tree, self.sequence, trigger_time, self.radio_rng)
        self.store.persist(recs)
        self.store.append_linklog(log_rows)
        counts = self._day_counts[-1]
        for rec in recs:
            bucket = "missing" if rec.missing else "delivered"
            counts[bucket][rec.station_id] += 1
        return round_end

    def _handle_reconfigure_check(self, t: float):
        policy = self.scenario.reconfig
        hit = self.collector.tracker.degraded(self.tree.active_links(), policy.threshold)
        if hit is None:
            return
        (a, b), rate = hit
        pre = self._station_e2e(t)
        candidate = compute_routing_tree(self.env, t, version=self.tree.version + 1)
        self.collector.tracker.reset()
        if candidate.parent == self.tree.parent:
            return
        old_version = self.tree.version
        self.tree = candidate
        post = self._station_e2e(t)
        self._track_unreachable(t)
        self._reconfigurations.append({
            "time": int(t),
            "old_version": old_version,
            "new_version": candidate.version,
            "degraded_link": [a, b],
            "observed_rate": round(rate, 4),
            "e2e_before": {sid: round(p, 6) for sid, p in pre.items()},
            "e2e_after": {sid: round(p, 6) for sid, p in post.items()},
        })

    # -- main loop ---------------------------------------------------------------

    def run(self) -> RunSummary:
        sc = self.scenario
        period = sc.schedule.trigger_period_s
        self.out_root.mkdir(parents=True, exist_ok=True)
        self._track_unreachable(self.epoch)

        heap: list = []

        def push(time_s, rank, payload):
            heapq.heappush(heap, (time_s, rank, next(self._counter), payload))

        for day in range(sc.n_days):
            day_start = self.epoch + day * 86400
            push(day_start, RANK_ROLLOVER, ("rollover", day))
            for k in range(sc.rounds_per_day):
                push(day_start + k * period, RANK_TRIGGER, ("trigger", day))

        while heap:
            t, rank, _, payload = heapq.heappop(heap)
            kind = payload[0]
            if kind == "rollover":
                self._handle_rollover(t, payload[1])
            elif kind == "trigger":
                self._handle_trigger(t, payload[1])
                push(t + sc.schedule.settle_delay_s, RANK_SETTLE_DONE,
                     ("settle-done", int(t)))
            elif kind == "settle-done":
                round_end = self._handle_settle_done(t, payload[1])
                push(round_end, RANK_RECONFIGURE, ("reconfigure-check",))
            elif kind == "reconfigure-check":
                self._handle_reconfigure_check(t)
            else:  # pragma: no cover - defensive
                raise ConfigError(f"unknown event kind {kind}")

        end_t = self.epoch + sc.n_days * 86400
        for sid in sorted(self._unreachable_open):
            self._unreachable_closed.append(
                {"station": sid, "start": self._unreachable_open[sid], "end": int(end_t)})
        self._unreachable_open.clear()
        self.store.close()

        totals = {
            "rounds_per_day": sc.rounds_per_day,
            "delivered": sum(sum(d["delivered"].values()) for d in self._day_counts),
            "missing": sum(sum(d["missing"].values()) for d in self._day_counts),
            "reconfigurations": len(self._reconfigurations),
            "final_tree_version": self.tree.version,
        }
        summary = RunSummary(
            scenario=sc.name, seed=sc.seed, days=self._day_counts,
            reconfigurations=self._reconfigurations,
            unreachable_intervals=self._unreachable_closed, totals=totals)
        with open(self.out_root / "run_summary.json", "w") as fh:
            fh.write(summary.to_json())
        return summary


def run_scenario(scenario: Scenario, out_root: Path | str) -> RunSummary:
    """Convenience wrapper: build the engine and execute the whole run."""
    return SimulationEngine(scenario, out_root).run()
