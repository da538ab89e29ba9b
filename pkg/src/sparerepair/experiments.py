"""Ensemble experiment presets and their CSV artifacts.

Every preset evaluates a set of conditions on ``n_networks`` seeded random
networks and writes::

    <out>/curves/<condition>/<network_id>.csv
    <out>/mean_<condition>.csv
    <out>/summary.csv

Seeds are derived from the master seed per (purpose, network, ...) and all
conditions of one network share the Monte Carlo seed (common random numbers).
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .enhancement import EnhancementStrategy, build_spectrum, enhance
from .evaluation import (
    Z95,
    Curve,
    CurvePoint,
    Estimator,
    estimate_curve_mc,
    mean_repairability,
    mean_repairability_variance,
)
from .network import SpareNetwork, generate_balanced_ring, generate_random
from .policies import Policy, PolicyKind, TieBreak
from .rng import derive_seed

# seed purposes
NETWORK_SEED = 1
ENHANCE_SEED = 2
MC_SEED = 3


class Preset(enum.Enum):
    ALGO_COMPARE = "algo-compare"
    ENHANCE_COMPARE = "enhance-compare"
    SPECTRUM = "spectrum"
    SCALING = "scaling"


@dataclass
class ExperimentConfig:
    preset: Preset
    n_networks: int = 100
    trials: int = 10_000
    master_seed: int = 0
    workers: int = 1
    n_units: int = 15
    n_spares: int = 10
    n_edges: int | None = None  # preset default when None
    extra_edges: int = 5
    # SCALING: (units, spares, initial edges, extra edges) per size
    sizes: tuple[tuple[int, int, int, int], ...] = (
        (15, 10, 20, 5),
        (30, 20, 40, 10),
        (60, 40, 80, 20),
    )

    def __post_init__(self) -> None:
        if isinstance(self.preset, str):
            self.preset = Preset(self.preset)
        if self.n_edges is None:
            self.n_edges = {
                Preset.ALGO_COMPARE: 40,
                Preset.ENHANCE_COMPARE: 20,
                Preset.SPECTRUM: 45,
                Preset.SCALING: 0,
            }[self.preset]

    def validate(self) -> None:
        for name in ("n_networks", "trials", "workers", "n_units", "n_spares"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        grid = self.n_units * self.n_spares
        if self.preset is Preset.ALGO_COMPARE and not 0 <= self.n_edges <= grid:
            raise ValueError(f"{self.n_edges} edges do not fit a {self.n_units}x{self.n_spares} grid")
        if self.preset is Preset.ENHANCE_COMPARE and (
            self.extra_edges < 0 or self.n_edges + self.extra_edges > grid
        ):
            raise ValueError("initial plus extra edges exceed the grid")
        if self.preset is Preset.SPECTRUM and not 1 <= self.n_edges <= grid:
            raise ValueError(f"{self.n_edges} edges do not fit a {self.n_units}x{self.n_spares} grid")
        if self.preset is Preset.SCALING:
            if not self.sizes:
                raise ValueError("scaling needs at least one size")
            for u, s, e, k in self.sizes:
                if min(u, s) < 1 or e < 0 or k < 0 or e + k > u * s:
                    raise ValueError(f"invalid scaling size {(u, s, e, k)}")


@dataclass
class Condition:
    name: str
    build: Callable[[int], SpareNetwork]  # network index -> network
    policy: Policy
    baseline: str


@dataclass
class ConditionResult:
    name: str
    baseline: str
    curves: list[Curve]
    mean_curve: Curve
    mean: float
    ci95: float
    between_sd: float
    f_range: tuple[int, int]
    decisions: int
    ties: int

    @property
    def tie_fraction(self) -> float:
        return self.ties / self.decisions if self.decisions else 0.0


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    conditions: dict[str, ConditionResult] = field(default_factory=dict)

    def improvement(self, name: str) -> float:
        """Relative gain of a condition's mean repairability over its baseline."""
        c = self.conditions[name]
        base = self.conditions[c.baseline].mean
        return c.mean / base - 1.0 if base > 0 else math.inf

    def files(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for name, c in self.conditions.items():
            for i, curve in enumerate(c.curves):
                out[f"curves/{name}/{i:04d}.csv"] = curve.to_csv()
            out[f"mean_{name}.csv"] = c.mean_curve.to_csv()
        out["summary.csv"] = self.summary_csv()
        return out

    def summary_csv(self) -> str:
        cfg = self.config
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([
            "condition", "baseline", "mean_repairability", "ci95", "between_network_sd",
            "improvement_pct", "ratio_to_baseline", "f_lo", "f_hi", "tie_fraction",
            "preset", "n_networks", "trials", "master_seed",
        ])
        for name, c in self.conditions.items():
            base = self.conditions[c.baseline].mean
            ratio = c.mean / base if base > 0 else math.inf
            w.writerow([
                name, c.baseline, f"{c.mean:.8f}", f"{c.ci95:.8f}", f"{c.between_sd:.8f}",
                f"{100 * (ratio - 1):.4f}", f"{ratio:.6f}", c.f_range[0], c.f_range[1],
                f"{c.tie_fraction:.6f}", cfg.preset.value, cfg.n_networks, cfg.trials,
                cfg.master_seed,
            ])
        return buf.getvalue()

    def write(self, out_dir: str | Path) -> Path:
        root = Path(out_dir)
        for rel, text in self.files().items():
            path = root / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        return root


def _net_seed(cfg: ExperimentConfig, i: int, *extra: int) -> int:
    return derive_seed(cfg.master_seed, NETWORK_SEED, i, *extra)


def _enh_seed(cfg: ExperimentConfig, i: int, *extra: int) -> int:
    return derive_seed(cfg.master_seed, ENHANCE_SEED, i, *extra)


def build_conditions(cfg: ExperimentConfig) -> list[tuple[Condition, int]]:
    """Conditions of a preset, each with its Monte Carlo horizon f_max."""
    U, S, E = cfg.n_units, cfg.n_spares, cfg.n_edges
    randomized = Policy(PolicyKind.RANDOM, TieBreak.SEEDED_RANDOM)

    if cfg.preset is Preset.ALGO_COMPARE:
        return [
            (Condition(kind.value, lambda i: generate_random(U, S, E, _net_seed(cfg, i)),
                       Policy(kind, TieBreak.SEEDED_RANDOM), "random"), S)
            for kind in PolicyKind
        ]

    if cfg.preset is Preset.ENHANCE_COMPARE:
        def original(i):
            return generate_random(U, S, E, _net_seed(cfg, i))

        def enhanced(strategy, j):
            return lambda i: enhance(original(i), cfg.extra_edges, strategy, _enh_seed(cfg, i, j))

        conds = [(Condition("original", original, randomized, "original"), S)]
        for j, strategy in enumerate(EnhancementStrategy):
            conds.append((Condition(strategy.value, enhanced(strategy, j), randomized, "original"), S))
        return conds

    if cfg.preset is Preset.SPECTRUM:
        def spectrum(m_random):
            return lambda i: build_spectrum(U, S, m_random, E - m_random, _net_seed(cfg, i))

        # 45 edges: 45+0, 35+10, 30+15, 0+45
        splits = (E, round(E * 7 / 9), round(E * 2 / 3), 0)
        labels = [(f"random{E}", E)]
        labels += [(f"rand{m}+sel{E - m}", m) for m in splits[1:3]]
        labels += [(f"sel{E}", 0)]
        conds = [(Condition(name, spectrum(m), randomized, labels[0][0]), S) for name, m in labels]
        ring = generate_balanced_ring(U, S, E)
        conds.append((Condition(f"ring{E}", lambda i: ring, randomized, labels[0][0]), S))
        return conds

    conds = []
    for j, (u, s, e, k) in enumerate(cfg.sizes):
        tag = f"{u}x{s}"

        def original(i, u=u, s=s, e=e, j=j):
            return generate_random(u, s, e, _net_seed(cfg, i, j))

        def enhanced(i, k=k, j=j, original=original):
            return enhance(original(i), k, EnhancementStrategy.FULL, _enh_seed(cfg, i, j))

        conds.append((Condition(f"{tag}-original", original, randomized, f"{tag}-original"), s))
        conds.append((Condition(f"{tag}-full", enhanced, randomized, f"{tag}-original"), s))
    return conds


def _aggregate(name: str, baseline: str, curves: list[Curve], f_max: int, trials: int) -> ConditionResult:
    n = len(curves)
    points = []
    for f in range(f_max + 1):
        ps = [c.points[f].repairability for c in curves]
        var = sum(p * (1 - p) for p in ps) / trials
        points.append(CurvePoint(f, sum(ps) / n, Z95 * math.sqrt(var) / n, n * trials))
    mean_curve = Curve(points, Estimator.MC_POLICY, f_max)
    f_range = (1, f_max)
    means = [mean_repairability(c, f_range) for c in curves]
    mean = sum(means) / n
    ci = Z95 * math.sqrt(sum(mean_repairability_variance(c, f_range) for c in curves)) / n
    sd = math.sqrt(sum((m - mean) ** 2 for m in means) / (n - 1)) if n > 1 else 0.0
    return ConditionResult(
        name, baseline, curves, mean_curve, mean, ci, sd, f_range,
        sum(c.decisions for c in curves), sum(c.ties for c in curves),
    )


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> ExperimentResult:
    """Evaluate every condition on every network; output depends only on the config."""
    cfg.validate()
    conds = build_conditions(cfg)
    jobs = [(ci, i) for ci in range(len(conds)) for i in range(cfg.n_networks)]

    def run(job):
        ci, i = job
        cond, f_max = conds[ci]
        net = cond.build(i)
        seed = derive_seed(cfg.master_seed, MC_SEED, i)
        return estimate_curve_mc(net, cond.policy, f_max, cfg.trials, seed)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            curves = list(pool.map(run, jobs))
    else:
        curves = [run(j) for j in jobs]

    result = ExperimentResult(cfg)
    for ci, (cond, f_max) in enumerate(conds):
        mine = curves[ci * cfg.n_networks:(ci + 1) * cfg.n_networks]
        result.conditions[cond.name] = _aggregate(cond.name, cond.baseline, mine, f_max, cfg.trials)
    if out_dir is not None:
        result.write(out_dir)
    return result
