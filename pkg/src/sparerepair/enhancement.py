"""Topology enhancement: add a few edges between weak units and exploitable spares."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .network import (
    NetworkError,
    SpareNetwork,
    SystemState,
    essentiality,
    generate_random,
    make_network,
    spare_side_min_degree,
)
from .rng import SplitMix64, derive_seed


class EnhancementStrategy(enum.Enum):
    RANDOM_RANDOM = "rand-rand"
    SPARE_ONLY = "spare-only"
    UNIT_ONLY = "unit-only"
    FULL = "full"


@dataclass(frozen=True)
class EdgeSuggestion:
    unit: int
    spare: int
    unit_rank_trace: tuple[int, ...] = ()
    spare_rank_trace: tuple[int, ...] = ()


def rank_spares(state: SystemState) -> list[int]:
    """Most exploitable first: high essentiality, then low popularity, then index."""
    live = [s for s in range(state.topology.n_spares) if s not in state.consumed_spares]
    return sorted(live, key=lambda s: (-essentiality(state, s), state.spare_degree(s), s))


def rank_units(state: SystemState) -> list[int]:
    """Most vulnerable first: low degree, then high MinDeg of reachable spares, then index."""
    return sorted(
        range(state.topology.n_units),
        key=lambda u: (state.unit_degree(u), -spare_side_min_degree(state, u), u),
    )


def suggest_edge(
    net: SpareNetwork, strategy: EnhancementStrategy, rng: SplitMix64 | None = None
) -> EdgeSuggestion:
    if net.is_complete():
        raise NetworkError("network is complete; no edge can be added")
    state = net.fresh_state()
    units = rank_units(state)
    spares = rank_spares(state)
    free_units = [u for u in units if len(net.unit_adj[u]) < net.n_spares]

    if strategy is EnhancementStrategy.FULL:
        for u in free_units:
            for s in spares:
                if (u, s) not in net.edges:
                    return EdgeSuggestion(u, s, tuple(units), tuple(spares))

    if rng is None:
        raise ValueError(f"strategy {strategy.value} needs a random stream")

    if strategy is EnhancementStrategy.UNIT_ONLY:
        u = free_units[0]
        open_spares = [s for s in range(net.n_spares) if (u, s) not in net.edges]
        return EdgeSuggestion(u, rng.choice(open_spares), tuple(units), ())

    if strategy is EnhancementStrategy.SPARE_ONLY:
        s = next(s for s in spares if len(net.spare_adj[s]) < net.n_units)
        open_units = [u for u in range(net.n_units) if (u, s) not in net.edges]
        return EdgeSuggestion(rng.choice(open_units), s, (), tuple(spares))

    cells = [
        (u, s) for u in range(net.n_units) for s in range(net.n_spares)
        if (u, s) not in net.edges
    ]
    u, s = rng.choice(cells)
    return EdgeSuggestion(u, s)


def enhance(
    net: SpareNetwork, k: int, strategy: EnhancementStrategy, seed: int = 0
) -> SpareNetwork:
    """Add ``k`` edges one at a time, re-ranking after each addition."""
    if k < 0 or k > net.free_cells():
        raise NetworkError(f"cannot add {k} edges; {net.free_cells()} free cells")
    rng = SplitMix64(seed)
    for _ in range(k):
        sug = suggest_edge(net, strategy, rng)
        net = make_network(net.n_units, net.n_spares, [*net.edges, (sug.unit, sug.spare)])
    return net


def build_spectrum(
    n_units: int, n_spares: int, m_random: int, m_selected: int, seed: int
) -> SpareNetwork:
    """``m_random`` uniformly placed edges followed by ``m_selected`` FULL-strategy edges."""
    if m_random + m_selected > n_units * n_spares:
        raise NetworkError(
            f"{m_random}+{m_selected} edges exceed the {n_units}x{n_spares} grid"
        )
    base = generate_random(n_units, n_spares, m_random, seed)
    return enhance(base, m_selected, EnhancementStrategy.FULL, derive_seed(seed, 1))
