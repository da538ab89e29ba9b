"""Online spare-selection rules for a single fault.

PE keeps the least essential candidate, PP the least popular one; the
combined rules apply one criterion and break its ties with the other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .network import SystemState, essentiality
from .rng import SplitMix64


class PolicyKind(enum.Enum):
    RANDOM = "random"
    PE = "pe"
    PP = "pp"
    PE_PP = "pe+pp"
    PP_PE = "pp+pe"


class TieBreak(enum.Enum):
    SEEDED_RANDOM = "seeded"
    LOWEST_INDEX = "lowest"


# ranking stages per policy; "pe" maximizes essentiality, "pp" minimizes d(s)
STAGES: dict[PolicyKind, tuple[str, ...]] = {
    PolicyKind.RANDOM: (),
    PolicyKind.PE: ("pe",),
    PolicyKind.PP: ("pp",),
    PolicyKind.PE_PP: ("pe", "pp"),
    PolicyKind.PP_PE: ("pp", "pe"),
}


class ImmediateReplacementFailure(Exception):
    """A faulty unit has no live spare left."""

    def __init__(self, unit: int) -> None:
        super().__init__(f"no live spare for unit u{unit}")
        self.unit = unit


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind = PolicyKind.PE_PP
    tiebreak: TieBreak = TieBreak.SEEDED_RANDOM
    # leave the faulty unit itself out of MinDeg(adj(s)) when ranking by PE
    exclude_faulty: bool = False

    @property
    def deterministic(self) -> bool:
        return self.tiebreak is TieBreak.LOWEST_INDEX

    @property
    def name(self) -> str:
        return self.kind.value

    @classmethod
    def parse(cls, name: str, tiebreak: str = "seeded", exclude_faulty: bool = False) -> Policy:
        try:
            return cls(PolicyKind(name.lower()), TieBreak(tiebreak.lower()), exclude_faulty)
        except ValueError:
            raise ValueError(
                f"unknown policy {name!r} or tie-break {tiebreak!r}; "
                f"policies: {', '.join(k.value for k in PolicyKind)}; tie-breaks: seeded, lowest"
            ) from None


@dataclass
class ScriptedPolicy:
    """Replays an explicit list of spare choices, one per fault."""

    choices: list[int]
    _cursor: int = field(default=0, repr=False)

    deterministic = True
    name = "scripted"

    def next_choice(self) -> int:
        s = self.choices[self._cursor]
        self._cursor += 1
        return s


@dataclass(frozen=True)
class Decision:
    faulty_unit: int
    chosen_spare: int
    candidates: tuple[int, ...]
    tie_after_primary: bool = False
    tie_after_secondary: bool = False


def candidate_spares(state: SystemState, u: int) -> list[int]:
    if not 0 <= u < state.topology.n_units:
        raise ValueError(f"unit u{u} out of range")
    return sorted(state.live_spares_of(u))


def _stage_scores(state: SystemState, u: int, stage: str, cands: list[int], exclude: bool):
    if stage == "pp":
        return [state.spare_degree(s) for s in cands]
    skip = u if exclude else None
    # negated so every stage keeps its minimum
    return [-essentiality(state, s, skip) for s in cands]


def select_spare(
    state: SystemState,
    u: int,
    policy: Policy | ScriptedPolicy,
    rng: SplitMix64 | None = None,
) -> Decision:
    """Pick the spare that replaces faulty unit ``u``.

    Degrees are read from the live state before anything is removed for this
    fault. Raises :class:`ImmediateReplacementFailure` if ``u`` has no live spare.
    """
    cands = candidate_spares(state, u)
    if not cands:
        raise ImmediateReplacementFailure(u)

    if isinstance(policy, ScriptedPolicy):
        s = policy.next_choice()
        if s not in cands:
            raise ValueError(f"scripted spare s{s} is not a candidate for u{u}: {cands}")
        return Decision(u, s, tuple(cands))

    survivors = cands
    ties: list[bool] = []
    for stage in STAGES[policy.kind]:
        scores = _stage_scores(state, u, stage, survivors, policy.exclude_faulty)
        best = min(scores)
        survivors = [s for s, sc in zip(survivors, scores) if sc == best]
        ties.append(len(survivors) > 1)
        if len(survivors) == 1:
            break

    if len(survivors) == 1 or policy.tiebreak is TieBreak.LOWEST_INDEX:
        chosen = survivors[0]
    else:
        if rng is None:
            raise ValueError("seeded tie-breaking needs a random stream")
        chosen = survivors[rng.randbelow(len(survivors))]

    return Decision(
        u,
        chosen,
        tuple(cands),
        tie_after_primary=len(ties) > 0 and ties[0],
        tie_after_secondary=len(ties) > 1 and ties[1],
    )
