"""Repairability curves: Monte Carlo, exact enumeration, offline optimum, worst case."""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import INFINITY, SpareNetwork, SystemState, min_deg, unit
from .policies import ImmediateReplacementFailure, Policy, select_spare
from .repair import fault_sequence, run_sequence
from .rng import derive_seed

DEFAULT_BUDGET = 10**7
Z95 = 1.96


class EnumerationBudgetExceeded(RuntimeError):
    def __init__(self, what: str, required: int | None, budget: int) -> None:
        need = f"needs {required}" if required is not None else "exceeded"
        super().__init__(f"{what}: {need} > budget {budget}")
        self.required = required
        self.budget = budget


class Estimator(enum.Enum):
    MC_POLICY = "mc_policy"
    EXACT_POLICY = "exact_policy"
    EXACT_OFFLINE = "exact_offline"


@dataclass(frozen=True)
class CurvePoint:
    f: int
    repairability: float
    ci_half_width: float
    trials: int


@dataclass
class Curve:
    points: list[CurvePoint]
    estimator: Estimator
    n_spares: int | None = None
    # MC only: histogram of survival times 0..f_max, decisions taken, primary-stage ties
    survival_counts: tuple[int, ...] | None = None
    decisions: int = 0
    ties: int = 0

    @property
    def f_max(self) -> int:
        return self.points[-1].f

    def values(self) -> list[float]:
        return [p.repairability for p in self.points]

    def __getitem__(self, f: int) -> float:
        if f > self.f_max:
            if self.n_spares is not None and f > self.n_spares:
                return 0.0
            raise IndexError(f"f={f} beyond curve f_max={self.f_max}")
        return self.points[f].repairability

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["f", "repairability", "ci95", "trials", "estimator"])
        for p in self.points:
            w.writerow([p.f, f"{p.repairability:.8f}", f"{p.ci_half_width:.8f}",
                        p.trials, self.estimator.value])
        return buf.getvalue()


def read_curve_csv(text: str) -> Curve:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty curve CSV")
    points = [
        CurvePoint(int(r["f"]), float(r["repairability"]), float(r["ci95"]), int(r["trials"]))
        for r in rows
    ]
    return Curve(points, Estimator(rows[0]["estimator"]))


def binomial_half_width(p: float, n: int) -> float:
    return Z95 * math.sqrt(p * (1.0 - p) / n) if n > 0 else 0.0


# -- Monte Carlo ------------------------------------------------------------


def _chunks(n: int, k: int) -> list[tuple[int, int]]:
    k = max(1, min(k, n))
    bounds = [n * i // k for i in range(k + 1)]
    return list(zip(bounds[:-1], bounds[1:]))


def _reference_trials(net, policy, seed, start, stop, f_max):
    out = np.empty(stop - start, dtype=np.int32)
    decisions = ties = 0
    for t in range(start, stop):
        ts = derive_seed(seed, t)
        run = run_sequence(net, fault_sequence(net, f_max, ts), policy, ts)
        out[t - start] = run.survival_time
        decisions += len(run.decisions)
        ties += run.ties_seen
    return out, decisions, ties


def survival_times(
    net: SpareNetwork,
    policy: Policy,
    f_max: int,
    trials: int,
    seed: int,
    workers: int = 1,
    engine: str = "fast",
) -> tuple[np.ndarray, int, int]:
    """Per-trial survival times; trial ``t`` uses the streams of ``derive_seed(seed, t)``."""
    if engine == "fast":
        from ._kernel import run_trials as runner
    elif engine == "reference":
        runner = _reference_trials
    else:
        raise ValueError(f"unknown engine {engine!r}")
    parts = _chunks(trials, workers)
    if len(parts) == 1:
        results = [runner(net, policy, seed, *parts[0], f_max)]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            results = list(pool.map(lambda r: runner(net, policy, seed, r[0], r[1], f_max), parts))
    times = np.concatenate([r[0] for r in results])
    return times, sum(int(r[1]) for r in results), sum(int(r[2]) for r in results)


def estimate_curve_mc(
    net: SpareNetwork,
    policy: Policy,
    f_max: int,
    trials: int,
    seed: int,
    workers: int = 1,
    engine: str = "fast",
) -> Curve:
    """Fraction of sampled fault trajectories still repaired after ``f`` faults.

    Each trial draws ``f_max`` uniform slots and records how many faults it
    survives; ``repairability(f)`` is the share of trials surviving ``f``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    times, decisions, ties = survival_times(net, policy, f_max, trials, seed, workers, engine)
    hist = np.bincount(times, minlength=f_max + 1)
    at_least = np.cumsum(hist[::-1])[::-1]
    points = []
    for f in range(f_max + 1):
        p = int(at_least[f]) / trials
        points.append(CurvePoint(f, p, binomial_half_width(p, trials), trials))
    return Curve(
        points, Estimator.MC_POLICY, net.n_spares,
        survival_counts=tuple(int(x) for x in hist), decisions=decisions, ties=ties,
    )


# -- exact enumeration ------------------------------------------------------


def _require_deterministic(policy) -> None:
    if not getattr(policy, "deterministic", False):
        raise ValueError("exact evaluation needs a deterministic (lowest-index) policy")


def exact_curve_policy(
    net: SpareNetwork, policy: Policy, f_max: int, budget: int = DEFAULT_BUDGET
) -> Curve:
    """Exact policy repairability over all ``n_units**f`` sequences, ``f <= f_max``.

    Depth-first over fault choices with shared prefixes. Under a deterministic
    policy the state is fully described by the consumed spare set, so subtrees
    are memoized on it.
    """
    _require_deterministic(policy)
    n = net.n_units
    memo: dict[frozenset[int], list[int]] = {}

    def survivors(consumed: frozenset[int]) -> list[int]:
        # counts[j] = surviving length-j continuations from this state
        hit = memo.get(consumed)
        if hit is not None:
            return hit
        if len(memo) >= budget:
            raise EnumerationBudgetExceeded("exact policy enumeration", n**f_max, budget)
        r = f_max - len(consumed)
        counts = [1] + [0] * r
        if r > 0:
            state = SystemState(net, set(consumed))
            for u in range(n):
                try:
                    d = select_spare(state, u, policy)
                except ImmediateReplacementFailure:
                    continue
                sub = survivors(consumed | {d.chosen_spare})
                for j, c in enumerate(sub):
                    counts[j + 1] += c
        memo[consumed] = counts
        return counts

    counts = survivors(frozenset())
    counts += [0] * (f_max + 1 - len(counts))
    points = [CurvePoint(f, c / n**f, 0.0, n**f) for f, c in enumerate(counts)]
    return Curve(points, Estimator.EXACT_POLICY, net.n_spares)


def offline_repairable_counts(net: SpareNetwork, f_max: int) -> list[int]:
    """Ordered sequences of each length ``0..f_max`` an offline assignment can repair.

    Walks fault multisets in non-decreasing unit order. A child multiset adds
    one occurrence and extends the parent's matching by a single augmenting
    path; an infeasible multiset prunes its subtree since every superset is
    infeasible too. Each feasible multiset is weighted by its number of
    orderings (multinomial coefficient).
    """
    n = net.n_units
    adj = [sorted(a) for a in net.unit_adj]
    totals = [0] * (f_max + 1)
    totals[0] = 1
    occ_unit: list[int] = []

    def augment(i: int, owner: list[int], seen: list[bool]) -> bool:
        for s in adj[occ_unit[i]]:
            if not seen[s]:
                seen[s] = True
                if owner[s] < 0 or augment(owner[s], owner, seen):
                    owner[s] = i
                    return True
        return False

    def walk(first: int, counts: list[int], weight: int, owner: list[int]) -> None:
        f = len(occ_unit)
        if f == f_max:
            return
        for v in range(first, n):
            occ_unit.append(v)
            trial = owner.copy()
            if augment(f, trial, [False] * net.n_spares):
                counts[v] += 1
                w = weight * (f + 1) // counts[v]
                totals[f + 1] += w
                walk(v, counts, w, trial)
                counts[v] -= 1
            occ_unit.pop()

    walk(0, [0] * n, 1, [-1] * net.n_spares)
    return totals


def exact_curve_offline(net: SpareNetwork, f_max: int, budget: int = DEFAULT_BUDGET) -> Curve:
    """Offline-optimal repairability: one feasibility test per fault multiset."""
    n = net.n_units
    need = sum(math.comb(f + n - 1, f) for f in range(min(f_max, net.n_spares) + 1))
    if need > budget:
        raise EnumerationBudgetExceeded("offline multiset enumeration", need, budget)
    counts = offline_repairable_counts(net, f_max)
    points = [CurvePoint(f, c / n**f, 0.0, n**f) for f, c in enumerate(counts)]
    return Curve(points, Estimator.EXACT_OFFLINE, net.n_spares)


def adversarial_survival(
    net: SpareNetwork,
    policy: Policy,
    prefix: Sequence[int] = (),
    budget: int = DEFAULT_BUDGET,
) -> int:
    """Largest ``k`` such that every length-``k`` sequence starting with ``prefix`` survives.

    With an empty prefix this is the policy's guaranteed survival against an
    adversary choosing every fault.
    """
    _require_deterministic(policy)
    state = net.fresh_state()
    for k, u in enumerate(prefix, start=1):
        try:
            d = select_spare(state, u, policy)
        except ImmediateReplacementFailure:
            return k - 1
        state.consume(u, d.chosen_spare)
    memo: dict[frozenset[int], int] = {}

    def worst(consumed: frozenset[int]) -> int:
        hit = memo.get(consumed)
        if hit is not None:
            return hit
        if len(memo) >= budget:
            raise EnumerationBudgetExceeded("adversarial search", None, budget)
        s_state = SystemState(net, set(consumed))
        best = INFINITY
        for u in range(net.n_units):
            try:
                d = select_spare(s_state, u, policy)
            except ImmediateReplacementFailure:
                best = 0
                break
            best = min(best, 1 + worst(consumed | {d.chosen_spare}))
        memo[consumed] = int(best)
        return int(best)

    return len(prefix) + worst(frozenset(state.consumed_spares))


def structural_points(net: SpareNetwork) -> tuple[int, int]:
    """(100%-point, 0-point): guaranteed survival under any policy, and guaranteed failure."""
    state = net.fresh_state()
    hundred = min_deg(state, [unit(u) for u in range(net.n_units)])
    return int(hundred), net.n_spares + 1


def _resolve_range(curve: Curve, f_range) -> tuple[int, int]:
    if f_range is None:
        hi = curve.n_spares if curve.n_spares is not None else curve.f_max
        lo, hi = 1, min(hi, curve.f_max)
    else:
        lo, hi = f_range
    if hi < lo:
        raise ValueError(f"empty f range {lo}..{hi}")
    if lo < 0 or hi > curve.f_max:
        raise ValueError(f"f range {lo}..{hi} outside curve 0..{curve.f_max}")
    return lo, hi


def mean_repairability(curve: Curve, f_range: tuple[int, int] | None = None) -> float:
    """Arithmetic mean of repairability over ``f_range`` (inclusive; default 1..n_spares)."""
    lo, hi = _resolve_range(curve, f_range)
    return sum(curve.points[f].repairability for f in range(lo, hi + 1)) / (hi - lo + 1)


def mean_repairability_variance(curve: Curve, f_range: tuple[int, int] | None = None) -> float:
    """Sampling variance of :func:`mean_repairability` for an MC curve.

    Per trial the mean over ``lo..hi`` of the survival indicators is
    ``(clip(T, lo-1, hi) - (lo-1)) / (hi-lo+1)``, so the variance follows from
    the survival-time histogram.
    """
    if curve.survival_counts is None:
        return 0.0
    lo, hi = _resolve_range(curve, f_range)
    hist = np.asarray(curve.survival_counts, dtype=float)
    t = np.arange(len(hist))
    x = (np.clip(t, lo - 1, hi) - (lo - 1)) / (hi - lo + 1)
    n = hist.sum()
    m = (hist * x).sum() / n
    var = (hist * (x - m) ** 2).sum() / n
    return float(var / n)
