"""Acceptance gate: one test per criterion, each at its stated tolerance.

Every test records a single PASS/FAIL line (shown in the terminal summary
under "acceptance criteria") before asserting, so a failing clause is still
reported with its measured numbers.
"""

import json
import math
import time

import numpy as np

from conftest import ACCEPTANCE_LINES, S1_WORDS
from oracles import element_associative
from randra.analysis import (
    critical_p,
    expected_flexible_count,
    failure_bound,
    flexible_atoms,
    is_associative,
    witness_condition,
)
from randra.cli import main
from randra.core import CycleStructure, cycle_count, parse_structure, serialize_structure
from randra.enumeration import census
from randra.experiment import CSV_HEADERS, ExperimentConfig, run_experiment, write_experiment
from randra.kernels import associative_batch, flexible_count_batch, ints_to_bits, witness_batch
from randra.quasirandom import atom_graph
from randra.sampler import bits_to_structures, sample, sample_bits, SamplerConfig, trial_seeds


def record(number, title, clauses):
    """``clauses`` maps a clause description to ``(ok, detail)``."""
    ok = all(c[0] for c in clauses.values())
    parts = [f"{'ok' if c_ok else 'FAILED'}: {name} ({detail})" for name, (c_ok, detail) in clauses.items()]
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} {title} | " + "; ".join(parts)
    ACCEPTANCE_LINES[number] = line
    print(line)
    failed = [name for name, (c_ok, _) in clauses.items() if not c_ok]
    assert not failed, f"criterion {number} failed clauses: {failed}"


def s_from_words(n, words):
    s = CycleStructure.empty(n)
    return s.with_cycles([tuple(sorted(ord(ch) - ord("a") for ch in w)) for w in words])


def test_criterion_1_named_examples():
    s1 = s_from_words(3, S1_WORDS)
    s2 = s_from_words(3, ["abb", "acc", "bcc"])
    t0 = time.perf_counter()
    reps = 200
    for _ in range(reps):
        a1, a2 = is_associative(s1), is_associative(s2)
        f1, f2 = flexible_atoms(s1), flexible_atoms(s2)
    per_call = (time.perf_counter() - t0) / reps
    record(1, "named n=3 examples", {
        "S1 associative": (a1.associative, a1.associative),
        "S2 associative": (a2.associative, a2.associative),
        "S1 flexible set == {a}": (f1.atoms() == [0], f1.atoms()),
        "S2 has no flexible atom": (f2.atoms() == [], f2.atoms()),
        "< 1 ms per structure": (per_call / 2 < 1e-3, f"{per_call / 2 * 1e3:.3f} ms"),
    })


def test_criterion_2_exhaustive_census():
    t0 = time.perf_counter()
    n = 3
    total = 1 << cycle_count(n)
    fast = associative_batch(ints_to_bits(range(total), n), n)
    scalar = [is_associative(CycleStructure(n, b)).associative for b in range(total)]
    oracle = [element_associative(n, b) for b in range(total)]
    c = census(n)
    elapsed = time.perf_counter() - t0
    disagree = sum(a != o for a, o in zip(scalar, oracle)) + int((fast != np.array(oracle)).sum())
    record(2, "exhaustive n=3 census", {
        "1024 structures": (c.total_structures == total == 1024, c.total_structures),
        "agrees with 16-element oracle": (disagree == 0, f"{disagree} disagreements"),
        "65 associative classes": (c.associative_classes == 65, c.associative_classes),
        "< 5 s": (elapsed < 5, f"{elapsed:.2f} s"),
    })


def test_criterion_3_witness_relationships():
    t0 = time.perf_counter()
    literal_bad = {}
    extended_bad = {}
    pools = {3: ints_to_bits(range(1 << cycle_count(3)), 3)}
    for n in (4, 5, 6):
        pools[n] = sample_bits(n, 0.5, trial_seeds(123, 0, 100_000))
    for n, bits in pools.items():
        assoc = associative_batch(bits, n)
        literal = witness_batch(bits, n, include_identity=False)
        extended = witness_batch(bits, n, include_identity=True)
        literal_bad[n] = int((literal & ~assoc).sum())
        extended_bad[n] = int((extended != assoc).sum())
    elapsed = time.perf_counter() - t0
    s2 = s_from_words(3, ["abb", "acc", "bcc"])
    s2_ok = is_associative(s2).associative and not witness_condition(s2, include_identity=False)
    record(3, "witness-condition relationships", {
        "diversity-only => associative": (sum(literal_bad.values()) == 0, f"counterexamples {literal_bad}"),
        "identity-extended <=> associative": (sum(extended_bad.values()) == 0, f"discrepancies {extended_bad}"),
        "S2 associative but fails diversity-only": (s2_ok, s2_ok),
        "< 60 s": (elapsed < 60, f"{elapsed:.1f} s"),
    })


def test_criterion_4_failure_trend(tmp_path):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(kind="associativity", n_values=(4, 8, 12, 16, 20), trials=10_000, seed=1,
                           output_path=str(tmp_path / "a.csv"), p=0.5)
    rows, _ = run_experiment(cfg)
    elapsed = time.perf_counter() - t0
    header = CSV_HEADERS["associativity"]
    table = [dict(zip(header, r)) for r in rows]
    rates = [float(r["empirical_fail_rate"]) for r in table]
    sigma = [math.sqrt(max(q * (1 - q), 1e-300) / cfg.trials) for q in rates]
    rises = [
        (int(a["n"]), int(b["n"]))
        for a, b, qa, qb, sa, sb in zip(table, table[1:], rates, rates[1:], sigma, sigma[1:])
        if qb - qa > 2 * math.hypot(sa, sb)
    ]
    bound_ok = True
    bound_notes = []
    for r, q in zip(table, rates):
        union = float(r["union_bound"])
        union_ref, asym_ref = failure_bound(int(r["n"]), 0.5)
        bound_ok &= union == union_ref and float(r["asymptotic_bound"]) == asym_ref
        if union < 1:
            bound_ok &= q <= union
            bound_notes.append(f"n={r['n']} {q} <= {union:.3g}")
    if not bound_notes:
        bound_notes.append("union bound >= 1 at every n, so the clause is vacuous")
    trend = ", ".join(f"n={r['n']}: {q:.4f}" for r, q in zip(table, rates))
    record(4, "non-associativity trend at p=0.5", {
        "non-increasing within 2 sigma": (not rises, f"{trend}; rises at {rises}"),
        "rate <= union bound where bound < 1": (bound_ok, "; ".join(bound_notes)),
        "< 2 min": (elapsed < 120, f"{elapsed:.1f} s"),
    })


def test_criterion_5_flexible_expectation():
    t0 = time.perf_counter()
    worst = max(abs(expected_flexible_count(n, critical_p(n)) - 1.0) for n in range(1, 51))
    mc = {}
    for n in (3, 4, 5):
        counts = flexible_count_batch(sample_bits(n, critical_p(n), trial_seeds(5, 0, 10_000)), n)
        mean = float(counts.mean())
        se = float(counts.std(ddof=1) / math.sqrt(counts.size))
        mc[n] = (mean, se, abs(mean - 1.0) <= 3 * se)
    elapsed = time.perf_counter() - t0
    record(5, "flexible-atom expectation at critical p", {
        "exact identity within 1e-12 for n <= 50": (worst <= 1e-12, f"max error {worst:.2e}"),
        "Monte Carlo within 3 standard errors": (
            all(v[2] for v in mc.values()),
            ", ".join(f"n={n}: {m:.4f} +- {s:.4f}" for n, (m, s, _) in mc.items()),
        ),
        "< 1 min": (elapsed < 60, f"{elapsed:.1f} s"),
    })


def test_criterion_6_sampler_marginals(tmp_path):
    trials = 100_000
    worst = {}
    outside = {}
    for n, p in ((3, 0.5), (8, 0.1), (8, 0.9)):
        freq = sample_bits(n, p, trial_seeds(0, 0, trials)).mean(axis=0)
        z = np.abs(freq - p) / math.sqrt(p * (1 - p) / trials)
        worst[(n, p)] = round(float(z.max()), 2)
        outside[(n, p)] = int((z > 3).sum())
    same_structures = all(
        serialize_structure(sample(SamplerConfig(9, 0.37, s))) == serialize_structure(sample(SamplerConfig(9, 0.37, s)))
        for s in range(20)
    )
    cfg = ExperimentConfig(kind="associativity", n_values=(3, 5), trials=2500, seed=77,
                           output_path=str(tmp_path / "c.csv"), p=0.5)
    first = write_experiment(cfg, workers=1, per_trial_path=tmp_path / "t1.csv")
    again = write_experiment(cfg, workers=1)
    pooled = write_experiment(cfg, workers=2, per_trial_path=tmp_path / "t2.csv")
    same_csv = first == again == pooled and (tmp_path / "t1.csv").read_bytes() == (tmp_path / "t2.csv").read_bytes()
    record(6, "sampler marginals and determinism", {
        "every cycle within 3 sigma": (
            not any(outside.values()),
            f"max |z| {worst}, cycles outside {outside}",
        ),
        "identical seeds give identical structures": (same_structures, same_structures),
        "CSVs identical across runs and worker counts": (same_csv, same_csv),
    })


def _coverage_holds(s):
    counted = 0
    for a in range(s.n):
        g = atom_graph(s, a)
        counted += len(g.edges) + len(g.loops)
    three = sum(1 for c in s.mandatory_cycles() if len(set(c)) == 3)
    two = sum(1 for c in s.mandatory_cycles() if len(set(c)) == 2)
    return counted == 3 * three + two


def test_criterion_7_quasirandom():
    from randra.quasirandom import algebra_quasirandomness

    t0 = time.perf_counter()
    small = all(_coverage_holds(CycleStructure(3, b)) for b in range(1 << cycle_count(3)))
    big = bits_to_structures(20, sample_bits(20, 0.5, trial_seeds(3, 0, 100)))
    medium = all(_coverage_holds(s) for s in big)
    verdicts = []
    densities = []
    for seed in (7, 8, 9):
        s = sample(SamplerConfig(64, 0.5, seed))
        v = algebra_quasirandomness(s, 0.5, 0.1, 0.1)
        verdicts.append((v.algebra_quasirandom, v.failing_fraction))
        densities += [st.edge_density for st in v.per_atom_stats]
    elapsed = time.perf_counter() - t0
    lo, hi = min(densities), max(densities)
    record(7, "quasirandomness", {
        "coverage identity on all n=3 structures": (small, small),
        "coverage identity on 100 n=20 samples": (medium, medium),
        "n=64 samples judged quasirandom": (
            all(q for q, _ in verdicts),
            "failing fractions " + ", ".join(f"{f:.2f}" for _, f in verdicts),
        ),
        "every edge density in 0.5 +- 0.1": (0.4 <= lo and hi <= 0.6, f"range [{lo:.3f}, {hi:.3f}]"),
        "< 30 s": (elapsed < 30, f"{elapsed:.1f} s"),
    })


def _main(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, _ = capsys.readouterr()
    return code, out


def test_criterion_8_cli_contract(tmp_path, capsys, golden_dir):
    s1_path = tmp_path / "s1.cyc"
    s1_path.write_text(serialize_structure(s_from_words(3, S1_WORDS)), encoding="utf-8")
    s3_path = tmp_path / "s3.cyc"
    s3_path.write_text(serialize_structure(s_from_words(3, ["aaa", "abc"])), encoding="utf-8")
    bad_path = tmp_path / "bad.cyc"
    bad_path.write_text("n 3\n0 1 9\n", encoding="utf-8")
    codes = {
        "S1": _main(["check", str(s1_path)], capsys)[0],
        "S3": _main(["check", str(s3_path)], capsys)[0],
        "parse error": _main(["check", str(bad_path)], capsys)[0],
        "bad p": _main(["sample", "--n", "3", "--p", "2", "--seed", "0"], capsys)[0],
    }
    codes_ok = codes == {"S1": 0, "S3": 3, "parse error": 2, "bad p": 2}

    round_trip = True
    for seed in range(30):
        s = sample(SamplerConfig(1 + seed % 7, 0.4, seed))
        for form in ("cycles", "bits"):
            round_trip &= parse_structure(serialize_structure(s, form=form)) == s
    code, out = _main(["sample", "--n", "3", "--p", "0.5", "--seed", "42"], capsys)
    golden_sample = code == 0 and out == (golden_dir / "sample_n3_p0.5_seed42.cyc").read_text(encoding="utf-8")

    headers_ok = True
    for kind in CSV_HEADERS:
        cfg = {"kind": kind, "n_values": [3], "p": 0.5, "trials": 4, "seed": 1,
               "output_path": str(tmp_path / f"{kind}.csv")}
        (tmp_path / f"{kind}.json").write_text(json.dumps(cfg), encoding="utf-8")
        code, _ = _main(["experiment", str(tmp_path / f"{kind}.json")], capsys)
        first = (tmp_path / f"{kind}.csv").read_text(encoding="utf-8").splitlines(keepends=True)[0]
        headers_ok &= code == 0 and first == (golden_dir / f"header_{kind}.csv").read_text(encoding="utf-8")

    record(8, "command-line contract", {
        "exit codes 0/2/3": (codes_ok, codes),
        ".cyc round trip": (round_trip, round_trip),
        "sample golden file": (golden_sample, golden_sample),
        "CSV headers match golden files": (headers_ok, headers_ok),
    })
