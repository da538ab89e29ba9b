"""Command-line entry point: gen | eval | trace | enhance | oracle | experiment."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .enhancement import EnhancementStrategy, enhance
from .evaluation import (
    EnumerationBudgetExceeded,
    estimate_curve_mc,
    exact_curve_offline,
    exact_curve_policy,
    mean_repairability,
    structural_points,
)
from .experiments import ExperimentConfig, Preset, run_experiment
from .network import (
    NetworkError,
    generate_balanced_ring,
    generate_random,
    parse_network,
    serialize_network,
)
from .policies import Policy, PolicyKind
from .repair import fault_sequence, format_trace, run_sequence


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load(path: str):
    return parse_network(Path(path).read_text(encoding="utf-8"))


def _policy(args) -> Policy:
    return Policy.parse(args.policy, args.tiebreak, args.exclude_faulty)


def _add_policy_flags(p: argparse.ArgumentParser, default_tiebreak: str = "seeded") -> None:
    p.add_argument("--policy", default="pe+pp", choices=[k.value for k in PolicyKind])
    p.add_argument("--tiebreak", default=default_tiebreak, choices=["seeded", "lowest"])
    p.add_argument("--exclude-faulty", action="store_true",
                   help="leave the faulty unit out of PE's essentiality")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparerepair",
        description="Repairability of locally shared spare networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a network file")
    p.add_argument("--units", type=int, required=True)
    p.add_argument("--spares", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ring", action="store_true", help="balanced ring instead of random")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("eval", help="repairability curve of a network under a policy")
    p.add_argument("--net", required=True)
    _add_policy_flags(p)
    p.add_argument("--fmax", type=int, default=None, help="default: number of spares")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--exact", action="store_true",
                   help="enumerate all sequences (requires --tiebreak lowest)")
    p.add_argument("--csv", default=None)

    p = sub.add_parser("trace", help="replay one fault sequence step by step")
    p.add_argument("--net", required=True)
    _add_policy_flags(p)
    p.add_argument("--faults", default=None, help="comma-separated unit indices")
    p.add_argument("--length", type=int, default=None, help="draw a random sequence of this length")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("enhance", help="add extra edges to a network")
    p.add_argument("--net", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--strategy", default="full", choices=[s.value for s in EnhancementStrategy])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("oracle", help="exact offline-optimal repairability curve")
    p.add_argument("--net", required=True)
    p.add_argument("--fmax", type=int, default=None)
    p.add_argument("--csv", default=None)

    p = sub.add_parser("experiment", help="run an ensemble preset")
    p.add_argument("--preset", required=True, choices=[x.value for x in Preset])
    p.add_argument("--networks", type=int, default=100)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    return parser


def _cmd_gen(args) -> None:
    if args.ring:
        net = generate_balanced_ring(args.units, args.spares, args.edges)
    else:
        net = generate_random(args.units, args.spares, args.edges, args.seed)
    _emit(serialize_network(net), args.output)


def _cmd_eval(args) -> None:
    net = _load(args.net)
    f_max = net.n_spares if args.fmax is None else args.fmax
    policy = _policy(args)
    if args.exact:
        curve = exact_curve_policy(net, policy, f_max)
    else:
        curve = estimate_curve_mc(net, policy, f_max, args.trials, args.seed, args.workers)
    hundred, zero = structural_points(net)
    print(
        f"# {policy.name}: 100%-point={hundred} 0-point={zero} "
        f"mean(1..{min(f_max, net.n_spares)})={mean_repairability(curve):.6f}",
        file=sys.stderr,
    )
    _emit(curve.to_csv(), args.csv)


def _cmd_trace(args) -> None:
    net = _load(args.net)
    if args.faults is not None:
        seq = [int(x) for x in args.faults.split(",") if x.strip()]
    elif args.length is not None:
        seq = fault_sequence(net, args.length, args.seed)
    else:
        raise ValueError("trace needs --faults or --length")
    outcome = run_sequence(net, seq, _policy(args), args.seed)
    for line in format_trace(seq, outcome):
        print(line)


def _cmd_enhance(args) -> None:
    net = _load(args.net)
    _emit(serialize_network(enhance(net, args.k, EnhancementStrategy(args.strategy), args.seed)),
          args.output)


def _cmd_oracle(args) -> None:
    net = _load(args.net)
    f_max = net.n_spares if args.fmax is None else args.fmax
    _emit(exact_curve_offline(net, f_max).to_csv(), args.csv)


def _cmd_experiment(args) -> None:
    cfg = ExperimentConfig(
        Preset(args.preset), n_networks=args.networks, trials=args.trials,
        master_seed=args.seed, workers=args.workers,
    )
    result = run_experiment(cfg, args.out)
    sys.stdout.write(result.summary_csv())


COMMANDS = {
    "gen": _cmd_gen,
    "eval": _cmd_eval,
    "trace": _cmd_trace,
    "enhance": _cmd_enhance,
    "oracle": _cmd_oracle,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (NetworkError, ValueError, OSError, EnumerationBudgetExceeded) as exc:
        print(f"sparerepair {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
