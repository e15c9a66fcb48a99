"""Command-line entry point: ``randra sample|check|enumerate|experiment``.

Exit codes: 0 success (``check``: associative), 3 ``check`` found a
non-associative structure, 2 usage, parse or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import flexible_atoms, is_associative
from .core import CycleFormatError, format_atom_set, format_cycle, parse_structure, serialize_structure
from .enumeration import catalog_text, census
from .experiment import ConfigError, ExperimentConfig, write_experiment
from .quasirandom import DEFAULT_DELTA, DEFAULT_EPSILON, algebra_quasirandomness
from .sampler import MASK64, SamplerConfig, sample

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONASSOCIATIVE = 3


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= p <= 1.0:
        raise argparse.ArgumentTypeError(f"p must lie in [0, 1], got {text}")
    return p


def _seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= seed <= MASK64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="randra", description="Random symmetric integral relation algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one structure and print it as .cyc")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--p", type=_probability, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--format", choices=("cycles", "bits"), default="cycles")

    p = sub.add_parser("check", help="analyse a .cyc file")
    p.add_argument("path")
    p.add_argument("--json", action="store_true", help="print a JSON report instead of text")
    p.add_argument("--p", type=_probability, default=None,
                   help="target density for the quasirandom verdict (default: the file's cycle density)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)

    p = sub.add_parser("enumerate", help="census of all structures for small n")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--catalog", metavar="PATH", help="write one canonical .cyc block per associative class")

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--per-trial", metavar="PATH", help="also write one CSV row per trial")
    return parser


def cmd_sample(args) -> int:
    s = sample(SamplerConfig(args.n, args.p, args.seed))
    sys.stdout.write(serialize_structure(s, form=args.format))
    return EXIT_OK


def check_report(s, p=None, epsilon=DEFAULT_EPSILON, delta=DEFAULT_DELTA) -> dict:
    report = is_associative(s)
    flex = flexible_atoms(s, associative=report.associative)
    out = {
        "n": s.n,
        "mandatory_cycles": [list(c) for c in s.mandatory_cycles()],
        "associative": report.associative,
        "violation": None,
        "paper_condition": report.paper_condition_holds,
        "extended_condition": report.extended_condition_holds,
        "full_identity_condition": report.full_identity_condition_holds,
        "flexible_atoms": flex.atoms(),
        "flexible_count": flex.count,
        "representability": flex.representable_flag,
        "quasirandom": None,
    }
    v = report.first_violation
    if v is not None:
        out["violation"] = {"atoms": [v.u, v.v, v.w], "left": _mask_atoms(v.left, s.n), "right": _mask_atoms(v.right, s.n),
                            "text": v.describe(s.n)}
    if s.n >= 3:
        target = len(s) / s.size if p is None else p
        verdict = algebra_quasirandomness(s, target, epsilon, delta)
        out["quasirandom"] = {"p": target, **verdict.to_dict()}
    return out


def _mask_atoms(mask: int, n: int) -> list:
    return ["1'" if a == n else a for a in range(n + 1) if mask >> a & 1]


def _format_check(s, rep: dict) -> str:
    n = s.n
    cyc = " ".join(format_cycle(c, n) for c in s.mandatory_cycles()) or "(none)"
    lines = [f"n = {n}, {len(s)} of {s.size} cycles mandatory: {cyc}"]
    if rep["associative"]:
        lines.append("associative: true")
    else:
        v = rep["violation"]
        lines.append(f"associative: false, violation at {v['text']}")
    lines.append(f"witness condition (diversity atoms only): {str(rep['paper_condition']).lower()}")
    lines.append(f"extended witness condition (witness may be 1'): {str(rep['extended_condition']).lower()}")
    lines.append(f"full-identity witness condition (1' anywhere): {str(rep['full_identity_condition']).lower()}")
    mask = sum(1 << a for a in rep["flexible_atoms"])
    lines.append(f"flexible atoms: {format_atom_set(mask, n)} (count {rep['flexible_count']})")
    lines.append(f"representability: {rep['representability']}")
    q = rep["quasirandom"]
    if q is not None:
        lines.append(
            f"quasirandom (p={q['p']:.4g}, eps={q['epsilon']}, delta={q['delta']}): "
            f"{str(q['algebra_quasirandom']).lower()} (failing fraction {q['failing_fraction']:.4g})"
        )
    return "\n".join(lines) + "\n"


def cmd_check(args) -> int:
    try:
        text = Path(args.path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"randra check: cannot read {args.path}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        s = parse_structure(text)
    except CycleFormatError as exc:
        print(f"randra check: {args.path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rep = check_report(s, args.p, args.epsilon, args.delta)
    if args.json:
        sys.stdout.write(json.dumps(rep, indent=2) + "\n")
    else:
        sys.stdout.write(_format_check(s, rep))
    return EXIT_OK if rep["associative"] else EXIT_NONASSOCIATIVE


def cmd_enumerate(args) -> int:
    c = census(args.n)
    if args.catalog:
        Path(args.catalog).write_text(catalog_text(c), encoding="utf-8")
    sys.stdout.write(c.to_json() + "\n")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    write_experiment(cfg, workers=args.workers, per_trial_path=args.per_trial)
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "check": cmd_check, "enumerate": cmd_enumerate, "experiment": cmd_experiment}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"randra {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"randra {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
