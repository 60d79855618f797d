"""Built-in scenario bundles for ``wergodic suite``."""

from __future__ import annotations

import itertools
import sys
import time
from pathlib import Path

import numpy as np

from .cli import EXIT_FAIL, EXIT_PASS, emit_results, run_many, versions
from .errors import ConfigError
from .groups import (coset_containment_witness, cyclic, difference_subgroup, dihedral,
                     direct_product, quaternion, symmetric)
from .measures import from_weights
from .reporting import dumps
from .spectral import dual_table, fourier_eigen_mismatch

ALT = {"periodic": [-1, 1]}  # a_n = (-1)^n

SUITE_SCENARIOS = [
    {"name": "z6-uniform-12", "group": {"cyclic": 6}, "measure": {"uniform": [1, 2]},
     "checks": ["classify", "spectrum", "dual", "kt", "kawada_ito", "power_limit",
                "theorem_2_2", "theorem_2_13"]},
    {"name": "z6-uniform-12-periodic-10", "group": {"cyclic": 6}, "measure": {"uniform": [1, 2]},
     "weight": {"periodic": [1, 0]}, "checks": ["theorem_2_2", "theorem_2_13"]},
    {"name": "z2-delta1", "group": {"cyclic": 2}, "measure": {"dirac": 1},
     "checks": ["classify", "spectrum", "kt", "kawada_ito", "smoothing", "cesaro",
                "theorem_2_2"]},
    {"name": "z2-delta1-alternating", "group": {"cyclic": 2}, "measure": {"dirac": 1},
     "weight": ALT, "checks": ["theorem_2_13"]},
    {"name": "z2-quarter-alternating", "group": {"cyclic": 2},
     "measure": {"weights": [0.25, 0.75]}, "weight": ALT,
     "checks": ["kt", "power_limit", "theorem_2_2", "theorem_2_13", "abs_pairing"]},
    {"name": "z3-delta1-character", "group": {"cyclic": 3}, "measure": {"dirac": 1},
     "weight": {"character": 1 / 3}, "checks": ["spectrum", "theorem_2_13"]},
    {"name": "z4-delta1", "group": {"cyclic": 4}, "measure": {"dirac": 1},
     "checks": ["dual", "kt", "smoothing", "kawada_ito"]},
    {"name": "z4-delta1-delta3", "group": {"cyclic": 4}, "measure": {"uniform": [1, 3]},
     "checks": ["classify", "dual", "kawada_ito", "smoothing"]},
    {"name": "z2xz4-random", "group": {"product": [{"cyclic": 2}, {"cyclic": 4}]},
     "measure": {"weights": [0.05, 0.1, 0.2, 0.05, 0.15, 0.1, 0.3, 0.05]},
     "checks": ["classify", "dual", "kt", "kawada_ito", "power_limit", "theorem_2_2"]},
    {"name": "s3-transposition-3cycle", "group": {"symmetric": 3},
     "measure": {"uniform": [1, 3]},
     "checks": ["classify", "spectrum", "kt", "kawada_ito", "power_limit"]},
    {"name": "d4-rotation-reflection", "group": {"dihedral": 4}, "measure": {"uniform": [0, 1, 4]},
     "checks": ["classify", "kt", "kawada_ito", "power_limit", "theorem_2_2"]},
    {"name": "q8-generators", "group": {"quaternion": True}, "measure": {"uniform": [0, 2, 4]},
     "checks": ["classify", "kt", "kawada_ito", "power_limit"]},
    {"name": "z-lazy-walk", "group": {"z": True}, "measure": {"z": {0: 0.5, 1: 0.5}},
     "window": [-8, 8],
     "checks": [{"theorem_2_2": {"horizon": 4096, "tolerance": 1e-2}}, "z_decay",
                "abs_pairing", "classify"]},
    {"name": "z-symmetric-walk", "group": {"z": True}, "measure": {"z": {-1: 0.5, 1: 0.5}},
     "window": [-8, 8],
     "checks": [{"z_decay": {"horizon": 16384}}, "abs_pairing", "classify"]},
]

EXHAUSTIVE_FAMILIES = (
    [cyclic(n) for n in range(1, 11)]
    + [dihedral(n) for n in (3, 4, 5)]
    + [symmetric(3), quaternion()]
    + [direct_product(cyclic(2), cyclic(2)), direct_product(cyclic(2), cyclic(4)),
       direct_product(cyclic(2), cyclic(2), cyclic(2)), direct_product(cyclic(3), cyclic(3)),
       direct_product(cyclic(2), cyclic(3)), direct_product(cyclic(2), cyclic(5))]
)


def exhaustive_aperiodicity(groups=EXHAUSTIVE_FAMILIES) -> list[dict]:
    """Compare the difference-subgroup test with the coset search on every nonempty support."""
    rows = []
    for G in groups:
        disagreements = []
        count = aperiodic = 0
        for r in range(1, G.order + 1):
            for S in itertools.combinations(range(G.order), r):
                fast = difference_subgroup(G, S).is_whole
                oracle = coset_containment_witness(G, S) is None
                count += 1
                aperiodic += fast
                if fast != oracle:
                    disagreements.append(list(S))
        rows.append({"group": G.label, "order": G.order, "supports": count,
                     "strictly_aperiodic": aperiodic, "disagreements": disagreements})
    return rows


def random_duality(seed: int = 0, trials: int = 100) -> list[dict]:
    """Duality identities and eigenvalue matching on random measures with random supports."""
    rng = np.random.default_rng(seed)
    rows = []
    for G in (cyclic(6), cyclic(8), direct_product(cyclic(2), cyclic(4))):
        failures = []
        worst = 0.0
        for t in range(trials):
            mask = rng.random(G.order) < rng.uniform(0.2, 0.9)
            if not mask.any():
                mask[rng.integers(G.order)] = True
            w = rng.random(G.order) * mask
            mu = from_weights(G, w / w.sum())
            checks = dual_table(mu, tol=1e-9).identity_checks(mu)
            mismatch = fourier_eigen_mismatch(mu)
            worst = max(worst, mismatch)
            if not all(checks.values()) or mismatch > 1e-8:
                failures.append(t)
        rows.append({"group": G.label, "trials": trials, "failures": failures,
                     "worst_eigen_mismatch": worst})
    return rows


def run_suite(tag: str, overrides: dict, args, stdout) -> int:
    t0 = time.perf_counter()
    if tag == "paper-checks":
        results = run_many(SUITE_SCENARIOS, overrides, args.jobs, args.format == "csv")
        summary = {"suite": tag,
                   "scenarios": [{"name": r.name, "passed": r.code == EXIT_PASS, "exit": r.code}
                                 for r in results]}
        code = max(r.code for r in results)
        summary["overall_pass"] = code == EXIT_PASS
        summary["versions"] = versions()
        if args.out:
            emit_results(results, SUITE_SCENARIOS, args.format, args.out, stdout)
            Path(args.out, "summary.json").write_text(dumps(summary))
        else:
            for r in results:
                for m in r.messages:
                    print(m, file=sys.stderr)
        stdout.write(dumps(summary))
    elif tag == "prop-3-3-exhaustive":
        rows = exhaustive_aperiodicity()
        code = EXIT_FAIL if any(r["disagreements"] for r in rows) else EXIT_PASS
        summary = {"suite": tag, "groups": rows, "overall_pass": code == EXIT_PASS}
        _emit_summary(summary, args, stdout)
    elif tag == "duality-random":
        rows = random_duality(args.seed)
        code = EXIT_FAIL if any(r["failures"] for r in rows) else EXIT_PASS
        summary = {"suite": tag, "seed": args.seed, "groups": rows,
                   "overall_pass": code == EXIT_PASS}
        _emit_summary(summary, args, stdout)
    else:
        raise ConfigError(f"suite: unknown tag {tag!r} "
                          "(expected paper-checks, prop-3-3-exhaustive or duality-random)")
    print(f"suite {tag}: exit {code} in {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return code


def _emit_summary(summary, args, stdout):
    text = dumps(summary)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        Path(args.out, "summary.json").write_text(text)
    stdout.write(text)
