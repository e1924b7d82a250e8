"""Lossy point-to-point radio model and logical tree routing.

Physically the network is an all-to-all 2.4 GHz mesh of low-power
transceivers. Each link has a log-distance base path loss plus a
foliage term that grows with the crop (alpha * plant height * crossed
row length), and the resulting margin maps through a clamped logistic
onto a delivery probability. Logically, packets follow a routing tree
rooted at the collector; the tree is the maximum-bottleneck (widest
path) tree, so every station gets the route whose weakest link is as
strong as possible. When active links degrade the tree is recomputed,
which is how the network survives a growing crop.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigError, RoutingError
from .field import GreenhouseGeometry

#: Node id of the central collector on the radio network.
COLLECTOR_ID = 0

TRIGGER_BROADCAST = "trigger-broadcast"
POLL = "poll"
DATA = "data"
NO_DATA = "no-data"


@dataclass(frozen=True)
class DeliveryMap:
    """Monotone margin-to-probability map: a logistic rescaled to hit
    exactly 0 at the floor margin and 1 at the ceiling margin."""

    midpoint_db: float = 10.0
    slope_db: float = 3.0
    floor_db: float = 0.0
    ceiling_db: float = 20.0

    def __post_init__(self):
        if self.floor_db >= self.ceiling_db or self.slope_db <= 0:
            raise ConfigError("delivery map needs floor < ceiling and positive slope")

    def _logistic(self, margin_db: float) -> float:
        return 1.0 / (1.0 + math.exp(-(margin_db - self.midpoint_db) / self.slope_db))

    def probability(self, margin_db: float) -> float:
        if margin_db <= self.floor_db:
            return 0.0
        if margin_db >= self.ceiling_db:
            return 1.0
        lo = self._logistic(self.floor_db)
        hi = self._logistic(self.ceiling_db)
        return (self._logistic(margin_db) - lo) / (hi - lo)


@dataclass(frozen=True)
class PlantGrowth:
    """Linear crop height over the season; saturates at full height."""

    start_height_m: float = 0.0
    full_height_m: float = 2.1
    growth_days: float = 120.0
    season_start_s: float = 0.0    # UTC seconds of transplant day

    def height(self, t_s: float) -> float:
        if self.growth_days <= 0:
            return self.full_height_m
        frac = min(1.0, max(0.0, ((t_s - self.season_start_s) / 86400.0) / self.growth_days))
        return self.start_height_m + (self.full_height_m - self.start_height_m) * frac


@dataclass(frozen=True)
class RadioParams:
    """Radio front-end and propagation constants shared by all links."""

    tx_power_dbm: float = 0.0
    sensitivity_dbm: float = -92.0
    reference_loss_db: float = 40.0    # loss at 1 m, 2.4 GHz free space
    path_loss_exponent: float = 2.7
    foliage_db_per_m2: float = 0.33    # dB per metre of height per metre crossed
    row_crossing_fraction: float = 0.8
    delivery_map: DeliveryMap = field(default_factory=DeliveryMap)
    fixed_link_probability: Optional[float] = None
    reliable_trigger: bool = False

    @property
    def budget_db(self) -> float:
        return self.tx_power_dbm - self.sensitivity_dbm


@dataclass(frozen=True)
class LinkModel:
    """One point-to-point link between two nodes of the mesh."""

    node_a: int
    node_b: int
    distance_m: float
    crossing_m: float              # vegetation-crossing length, m
    params: RadioParams
    growth: PlantGrowth
    foliage_exempt: bool = False

    def base_loss_db(self) -> float:
        d = max(self.distance_m, 1.0)
        return self.params.reference_loss_db + 10.0 * self.params.path_loss_exponent * math.log10(d)

    def foliage_loss_db(self, t_s: float) -> float:
        if self.foliage_exempt:
            return 0.0
        return self.params.foliage_db_per_m2 * self.growth.height(t_s) * self.crossing_m

    def margin_db(self, t_s: float) -> float:
        return self.params.budget_db - self.base_loss_db() - self.foliage_loss_db(t_s)

    def rssi_dbm(self, t_s: float) -> float:
        return self.params.tx_power_dbm - self.base_loss_db() - self.foliage_loss_db(t_s)


def link_quality(link: LinkModel, t_s: float) -> tuple[float, float]:
    """(margin dB, delivery probability) of a link at one instant."""
    margin = link.margin_db(t_s)
    if link.params.fixed_link_probability is not None:
        return margin, link.params.fixed_link_probability
    return margin, link.params.delivery_map.probability(margin)


def deliver(link: LinkModel, t_s: float, rng: np.random.Generator) -> bool:
    """Bernoulli realisation of one transmission attempt on a link."""
    _, p = link_quality(link, t_s)
    if p >= 1.0:
        return True
    if p <= 0.0:
        return False
    return float(rng.random()) < p


class RadioEnvironment:
    """All pairwise links between the collector and the stations."""

    def __init__(self, geometry: GreenhouseGeometry, params: RadioParams,
                 growth: PlantGrowth, relocated_antennas: Iterable[int] = ()):
        self.geometry = geometry
        self.params = params
        self.growth = growth
        self.relocated = frozenset(relocated_antennas)
        self._positions: dict[int, tuple[float, float]] = {
            COLLECTOR_ID: geometry.collector_xy}
        for site in geometry.sites:
            self._positions[site.station_id] = (site.x, site.y)
        self._links: dict[tuple[int, int], LinkModel] = {}

    @property
    def node_ids(self) -> list[int]:
        return sorted(self._positions)

    @property
    def station_ids(self) -> list[int]:
        return sorted(n for n in self._positions if n != COLLECTOR_ID)

    def link(self, a: int, b: int) -> LinkModel:
        key = (min(a, b), max(a, b))
        model = self._links.get(key)
        if model is None:
            xa, ya = self._positions[key[0]]
            xb, yb = self._positions[key[1]]
            d = math.hypot(xa - xb, ya - yb)
            model = LinkModel(
                key[0], key[1], distance_m=d,
                crossing_m=d * self.params.row_crossing_fraction,
                params=self.params, growth=self.growth,
                foliage_exempt=bool(self.relocated & set(key)),
            )
            self._links[key] = model
        return model

    def probability(self, a: int, b: int, t_s: float) -> float:
        return link_quality(self.link(a, b), t_s)[1]


@dataclass(frozen=True)
class RoutingTree:
    """Next-hop map toward the collector, plus per-station path quality."""

    parent: dict[int, int]             # station -> parent node
    version: int
    unreachable: tuple[int, ...]
    bottleneck: dict[int, float]       # widest-path value per station

    def __contains__(self, station_id: int) -> bool:
        return station_id in self.parent

    def path_up(self, station_id: int) -> list[int]:
        """Node sequence station -> ... -> collector."""
        if station_id not in self.parent:
            raise RoutingError(f"station {station_id} unreachable in tree v{self.version}")
        path = [station_id]
        while path[-1] != COLLECTOR_ID:
            path.append(self.parent[path[-1]])
            if len(path) > len(self.parent) + 2:
                raise RoutingError("routing loop detected")  # defensive; tree is acyclic
        return path

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for child, par in sorted(self.parent.items()):
            out.setdefault(par, []).append(child)
        return out

    def flood_edges(self) -> list[tuple[int, int]]:
        """Downstream (parent, child) transmissions in breadth-first order."""
        kids = self.children()
        edges = []
        frontier = deque([COLLECTOR_ID])
        while frontier:
            node = frontier.popleft()
            for child in kids.get(node, ()):
                edges.append((node, child))
                frontier.append(child)
        return edges

    def active_links(self) -> list[tuple[int, int]]:
        return sorted((min(c, p), max(c, p)) for c, p in self.parent.items())


@dataclass
class Packet:
    """A routed unit on the mesh; the hop path must stay acyclic."""

    kind: str
    source: int
    destination: int
    sequence: int
    payload: bytes = b""
    hop_path: tuple[int, ...] = ()


def compute_routing_tree(env: RadioEnvironment, t_s: float,
                         version: int = 1) -> RoutingTree:
    """Maximum-bottleneck tree rooted at the collector.

    Widest-path search: every station's route maximises the minimum
    link delivery probability on its way to the collector. Ties prefer
    the lowest node id, making the tree deterministic. Stations with no
    positive-probability path are reported unreachable rather than
    failing the whole tree.
    """
    nodes = env.node_ids
    width = {COLLECTOR_ID: math.inf}
    parent: dict[int, int] = {}
    done: set[int] = set()
    heap: list[tuple[float, int]] = [(-math.inf, COLLECTOR_ID)]
    while heap:
        neg_w, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in nodes:
            if v == u or v in done:
                continue
            p = env.probability(u, v, t_s)
            if p <= 0.0:
                continue
            w = min(width[u], p)
            if w > width.get(v, 0.0):
                width[v] = w
                parent[v] = u
                heapq.heappush(heap, (-w, v))
            elif w == width.get(v, 0.0) and u < parent.get(v, math.inf):
                parent[v] = u
    unreachable = tuple(n for n in nodes if n != COLLECTOR_ID and n not in parent)
    bottleneck = {n: width[n] for n in parent}
    return RoutingTree(parent=parent, version=version,
                       unreachable=unreachable, bottleneck=bottleneck)


def route(packet: Packet, tree: RoutingTree) -> list[tuple[int, int]]:
    """Ordered transmissions for a packet on the tree.

    Upstream packets climb the parent chain, downstream packets follow
    the reverse chain, and trigger broadcasts flood the whole tree with
    each node forwarding to its children exactly once.
    """
    if packet.kind == TRIGGER_BROADCAST:
        return tree.flood_edges()
    if packet.destination == COLLECTOR_ID:
        path = tree.path_up(packet.source)
    elif packet.source == COLLECTOR_ID:
        path = list(reversed(tree.path_up(packet.destination)))
    else:
        raise RoutingError("station-to-station unicast is not part of the protocol")
    return list(zip(path, path[1:]))


class LinkRateTracker:
    """Sliding-window delivery rates observed on each undirected link."""

    def __init__(self, window: int = 100, min_samples: int = 20):
        self.window = window
        self.min_samples = min_samples
        self._outcomes: dict[tuple[int, int], deque] = {}

    def record(self, a: int, b: int, delivered: bool):
        key = (min(a, b), max(a, b))
        dq = self._outcomes.get(key)
        if dq is None:
            dq = self._outcomes[key] = deque(maxlen=self.window)
        dq.append(1 if delivered else 0)

    def rate(self, a: int, b: int) -> Optional[float]:
        dq = self._outcomes.get((min(a, b), max(a, b)))
        if not dq or len(dq) < self.min_samples:
            return None
        return sum(dq) / len(dq)

    def degraded(self, links: Iterable[tuple[int, int]], threshold: float):
        """First active link whose observed rate fell below the threshold."""
        for a, b in links:
            r = self.rate(a, b)
            if r is not None and r < threshold:
                return (a, b), r
        return None

    def reset(self):
        self._outcomes.clear()
