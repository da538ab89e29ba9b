"""Bipartite spare-sharing topology, run-time state, generators and codec.

Units and spares are both indexed from 0. A :class:`SpareNetwork` is the
immutable topology; a :class:`SystemState` is the mutable view a repair run
works on, where consumed spares disappear together with their edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

from .rng import SplitMix64

INFINITY = math.inf
"""Degree of an empty node set. Compares greater than every finite degree."""

UNIT = "u"
SPARE = "s"


class NetworkError(ValueError):
    """Invalid topology, index, or network text."""


class Node(NamedTuple):
    side: str
    index: int

    def __str__(self) -> str:
        return f"{self.side}{self.index}"


def unit(i: int) -> Node:
    return Node(UNIT, i)


def spare(j: int) -> Node:
    return Node(SPARE, j)


@dataclass(frozen=True)
class SpareNetwork:
    n_units: int
    n_spares: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n_units < 1:
            raise NetworkError(f"n_units must be >= 1, got {self.n_units}")
        if self.n_spares < 0:
            raise NetworkError(f"n_spares must be >= 0, got {self.n_spares}")
        for u, s in self.edges:
            if not (0 <= u < self.n_units and 0 <= s < self.n_spares):
                raise NetworkError(
                    f"edge ({u}, {s}) out of range for "
                    f"{self.n_units} units x {self.n_spares} spares"
                )

    @cached_property
    def unit_adj(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n_units)]
        for u, s in self.edges:
            adj[u].add(s)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def spare_adj(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n_spares)]
        for u, s in self.edges:
            adj[s].add(u)
        return tuple(frozenset(a) for a in adj)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def unit_degrees(self) -> list[int]:
        return [len(a) for a in self.unit_adj]

    def spare_degrees(self) -> list[int]:
        return [len(a) for a in self.spare_adj]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def free_cells(self) -> int:
        return self.n_units * self.n_spares - len(self.edges)

    def is_complete(self) -> bool:
        return self.free_cells() == 0

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> SpareNetwork:
        return make_network(self.n_units, self.n_spares, [*self.edges, *extra])

    def fresh_state(self) -> SystemState:
        return SystemState(self)


def make_network(
    n_units: int, n_spares: int, edges: Iterable[tuple[int, int]]
) -> SpareNetwork:
    """Build a validated network; duplicate pairs collapse into one edge."""
    pairs = []
    for e in edges:
        u, s = (int(x) for x in e)
        if not (0 <= u < n_units and 0 <= s < n_spares):
            raise NetworkError(
                f"edge ({u}, {s}) out of range for {n_units} units x {n_spares} spares"
            )
        pairs.append((u, s))
    return SpareNetwork(n_units, n_spares, frozenset(pairs))


def reference_network() -> SpareNetwork:
    """The four-unit, three-spare running example (u1..u4, s1..s3 shifted to 0-based)."""
    return make_network(4, 3, [(0, 0), (1, 0), (1, 1), (2, 1), (3, 1), (3, 2)])


@dataclass
class SystemState:
    """Live view of a network during a repair run.

    Since spares are only ever removed as a whole, the live edges are exactly
    the topology edges whose spare has not been consumed.
    """

    topology: SpareNetwork
    consumed_spares: set[int] = field(default_factory=set)
    fault_counts: list[int] = field(default_factory=list)
    _unit_live: list[set[int]] = field(init=False, repr=False)
    _spare_live: list[set[int]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        net = self.topology
        if not self.fault_counts:
            self.fault_counts = [0] * net.n_units
        self._unit_live = [
            {s for s in adj if s not in self.consumed_spares} for adj in net.unit_adj
        ]
        self._spare_live = [
            set() if s in self.consumed_spares else set(adj)
            for s, adj in enumerate(net.spare_adj)
        ]

    @property
    def live_edges(self) -> set[tuple[int, int]]:
        return {(u, s) for u, adj in enumerate(self._unit_live) for s in adj}

    def copy(self) -> SystemState:
        return SystemState(
            self.topology, set(self.consumed_spares), list(self.fault_counts)
        )

    def unit_degree(self, u: int) -> int:
        return len(self._unit_live[u])

    def spare_degree(self, s: int) -> int:
        return len(self._spare_live[s])

    def live_spares_of(self, u: int) -> set[int]:
        return self._unit_live[u]

    def live_units_of(self, s: int) -> set[int]:
        return self._spare_live[s]

    def consume(self, u: int, s: int) -> None:
        if s not in self._unit_live[u]:
            raise NetworkError(f"spare s{s} is not a live neighbor of unit u{u}")
        for v in self._spare_live[s]:
            self._unit_live[v].discard(s)
        self._spare_live[s] = set()
        self.consumed_spares.add(s)
        self.fault_counts[u] += 1

    def _check(self, node: Node) -> None:
        limit = self.topology.n_units if node.side == UNIT else self.topology.n_spares
        if node.side not in (UNIT, SPARE) or not 0 <= node.index < limit:
            raise NetworkError(f"node {node} out of range")


def neighbors(state: SystemState, node: Node) -> set[Node]:
    """Live neighborhood of a unit or spare."""
    state._check(node)
    if node.side == UNIT:
        return {spare(s) for s in state.live_spares_of(node.index)}
    return {unit(u) for u in state.live_units_of(node.index)}


def degree(state: SystemState, node: Node) -> int:
    state._check(node)
    if node.side == UNIT:
        return state.unit_degree(node.index)
    return state.spare_degree(node.index)


def min_deg(state: SystemState, nodes: Iterable[Node]) -> int | float:
    """Minimum live degree over a same-side node set; INFINITY when empty."""
    nodes = list(nodes)
    if len({n.side for n in nodes}) > 1:
        raise NetworkError("min_deg requires nodes from one side of the bipartition")
    return min((degree(state, n) for n in nodes), default=INFINITY)


def essentiality(
    state: SystemState, s: int, excluded_unit: int | None = None
) -> int | float:
    """Smallest live unit degree in a spare's neighborhood.

    Low values mark a spare some weak unit depends on.
    """
    if s in state.consumed_spares:
        raise NetworkError(f"spare s{s} is already consumed")
    return min(
        (state.unit_degree(u) for u in state.live_units_of(s) if u != excluded_unit),
        default=INFINITY,
    )


def spare_side_min_degree(state: SystemState, u: int) -> int | float:
    """MinDeg over the live spares a unit can reach (INFINITY if none)."""
    return min((state.spare_degree(s) for s in state.live_spares_of(u)), default=INFINITY)


# -- generators -------------------------------------------------------------


def generate_random(n_units: int, n_spares: int, n_edges: int, seed: int) -> SpareNetwork:
    """Uniformly sample ``n_edges`` distinct cells of the unit x spare grid.

    Partial Fisher-Yates over cell indices ``u * n_spares + s`` driven by a
    SplitMix64 stream, so the draw is reproducible across platforms.
    """
    grid = n_units * n_spares
    if not 0 <= n_edges <= grid:
        raise NetworkError(f"cannot place {n_edges} edges in a {n_units}x{n_spares} grid")
    rng = SplitMix64(seed)
    cells = list(range(grid))
    for i in range(n_edges):
        j = i + rng.randbelow(grid - i)
        cells[i], cells[j] = cells[j], cells[i]
    return make_network(n_units, n_spares, (divmod(c, n_spares) for c in cells[:n_edges]))


def generate_balanced_ring(n_units: int, n_spares: int, n_edges: int) -> SpareNetwork:
    """High-order ring: edge k joins unit k mod U to spare k mod S.

    A repeated pair advances cyclically to the unit's next free spare.
    Both sides end up with degrees differing by at most one.
    """
    if not 0 <= n_edges <= n_units * n_spares:
        raise NetworkError(f"cannot place {n_edges} edges in a {n_units}x{n_spares} grid")
    edges: set[tuple[int, int]] = set()
    for k in range(n_edges):
        u, s = k % n_units, k % n_spares
        while (u, s) in edges:
            s = (s + 1) % n_spares
        edges.add((u, s))
    return make_network(n_units, n_spares, edges)


def complete_network(n_units: int, n_spares: int) -> SpareNetwork:
    return make_network(
        n_units, n_spares, ((u, s) for u in range(n_units) for s in range(n_spares))
    )


# -- codec ------------------------------------------------------------------


def serialize_network(net: SpareNetwork) -> str:
    lines = [f"units {net.n_units}", f"spares {net.n_spares}"]
    lines += [f"edge {u} {s}" for u, s in net.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_network(text: str) -> SpareNetwork:
    """Parse the line-oriented network format.

    Grammar: ``#`` comments, one ``units <n>``, one ``spares <n>``, then any
    number of ``edge <u> <s>`` lines. Errors name the 1-based line number.
    """
    n_units = n_spares = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(" ")
        try:
            values = [int(p) for p in parts[1:]]
            if any(p != str(v) for p, v in zip(parts[1:], values)) or any(v < 0 for v in values):
                raise ValueError
        except ValueError:
            raise NetworkError(f"line {lineno}: malformed line {line!r}") from None
        key = parts[0]
        if key in ("units", "spares") and len(values) == 1:
            if key == "units":
                if n_units is not None or edges:
                    raise NetworkError(f"line {lineno}: unexpected 'units' line")
                n_units = values[0]
            else:
                if n_spares is not None or edges:
                    raise NetworkError(f"line {lineno}: unexpected 'spares' line")
                n_spares = values[0]
        elif key == "edge" and len(values) == 2:
            if n_units is None or n_spares is None:
                raise NetworkError(f"line {lineno}: edge before units/spares header")
            u, s = values
            if u >= n_units or s >= n_spares:
                raise NetworkError(f"line {lineno}: edge ({u}, {s}) out of range")
            edges.append((u, s))
        else:
            raise NetworkError(f"line {lineno}: malformed line {line!r}")
    if n_units is None or n_spares is None:
        raise NetworkError("missing 'units' or 'spares' line")
    try:
        return make_network(n_units, n_spares, edges)
    except NetworkError as exc:
        raise NetworkError(f"invalid network: {exc}") from None
