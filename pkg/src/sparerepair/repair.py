"""Immediate spare replacement runs and the offline repairability test."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .network import SpareNetwork, SystemState
from .policies import (
    Decision,
    ImmediateReplacementFailure,
    Policy,
    ScriptedPolicy,
    select_spare,
)
from .rng import SplitMix64, derive_seed

# child-stream keys under a trial seed
FAULT_STREAM = 0
TIE_STREAM = 1


@dataclass
class RunOutcome:
    survived: bool
    failed_at_step: int | None = None
    decisions: list[Decision] = field(default_factory=list)
    ties_seen: int = 0

    @property
    def survival_time(self) -> int:
        """Number of faults repaired before the first failure."""
        return len(self.decisions)


def apply_repair(state: SystemState, u: int, s: int) -> SystemState:
    """Consume spare ``s`` for unit ``u``; the spare leaves with all its edges."""
    state.consume(u, s)
    return state


def fault_sequence(net: SpareNetwork, length: int, seed: int) -> list[int]:
    """Uniform slot sequence drawn from the fault stream of ``seed``."""
    rng = SplitMix64(derive_seed(seed, FAULT_STREAM))
    return [rng.randbelow(net.n_units) for _ in range(length)]


def run_sequence(
    net: SpareNetwork,
    seq: Sequence[int],
    policy: Policy | ScriptedPolicy,
    seed: int = 0,
) -> RunOutcome:
    """Apply faults in order, stopping at the first immediate replacement failure."""
    for u in seq:
        if not 0 <= u < net.n_units:
            raise ValueError(f"fault at unit {u} out of range for {net.n_units} units")
    state = net.fresh_state()
    rng = SplitMix64(derive_seed(seed, TIE_STREAM))
    out = RunOutcome(survived=True)
    for step, u in enumerate(seq, start=1):
        try:
            d = select_spare(state, u, policy, rng)
        except ImmediateReplacementFailure:
            out.survived = False
            out.failed_at_step = step
            break
        apply_repair(state, u, d.chosen_spare)
        out.decisions.append(d)
        out.ties_seen += d.tie_after_primary
    return out


def format_trace(seq: Sequence[int], outcome: RunOutcome) -> list[str]:
    lines = [
        f"step {k}: fault u{d.faulty_unit} -> spare s{d.chosen_spare}"
        for k, d in enumerate(outcome.decisions, start=1)
    ]
    if not outcome.survived:
        k = outcome.failed_at_step
        lines.append(f"step {k}: fault u{seq[k - 1]} -> FAIL")
    return lines


def _tally(net: SpareNetwork, fault_counts) -> list[int]:
    if isinstance(fault_counts, Mapping):
        counts = [0] * net.n_units
        for u, c in fault_counts.items():
            counts[u] = c
    else:
        counts = list(fault_counts)
    if len(counts) != net.n_units or any(c < 0 for c in counts):
        raise ValueError("fault tallies must be non-negative, one per unit")
    return counts


def max_assignment(net: SpareNetwork, fault_counts) -> int:
    """Size of a maximum assignment of fault occurrences to distinct spares.

    Augmenting paths over the occurrence-expanded graph: unit ``u`` appears
    ``fault_counts[u]`` times, each copy adjacent to the original spares of ``u``.
    """
    counts = _tally(net, fault_counts)
    adj = [sorted(a) for a in net.unit_adj]
    occurrences = [u for u, c in enumerate(counts) for _ in range(c)]
    owner: list[int | None] = [None] * net.n_spares

    def augment(i: int, seen: list[bool]) -> bool:
        for s in adj[occurrences[i]]:
            if not seen[s]:
                seen[s] = True
                if owner[s] is None or augment(owner[s], seen):
                    owner[s] = i
                    return True
        return False

    return sum(augment(i, [False] * net.n_spares) for i in range(len(occurrences)))


def is_globally_repairable(net: SpareNetwork, fault_counts) -> bool:
    """True iff every fault occurrence can hold its own adjacent spare at once."""
    counts = _tally(net, fault_counts)
    total = sum(counts)
    if total > net.n_spares:
        return False
    return max_assignment(net, counts) == total
