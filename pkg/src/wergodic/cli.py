"""Scenario runner.

    wergodic check scenarios.yaml [--horizon N] [--tol X] [--window=A..B]
                                  [--format json|csv] [--out DIR] [--jobs K]
    wergodic suite paper-checks | prop-3-3-exhaustive | duality-random [--seed S]

Exit codes: 0 every check passed, 1 some check failed, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np
import yaml

from . import ergodic, reporting
from .errors import (CesaroNotConverged, ConfigError, EigensolverFailure, Inconclusive,
                     NotAbelian, OracleDisagreement, SupportOverflow, WergodicError)
from .groups import build_group
from .measures import FiniteMeasure, IntMeasure, classify, make_measure
from .spectral import dual_table, fourier_eigen_mismatch, kt_report, spectrum
from .weights import make_weight

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

NUMERICAL_ERRORS = (EigensolverFailure, SupportOverflow, CesaroNotConverged, OracleDisagreement,
                    np.linalg.LinAlgError)

# default (horizon, tolerance) per check
CHECK_DEFAULTS = {
    "classify": (None, None),
    "spectrum": (None, None),
    "dual": (None, 1e-9),
    "kt": (256, 1e-9),
    "cesaro": (1000, 1e-3),
    "theorem_2_2": (10**4, 1e-3),
    "kawada_ito": (256, 1e-9),
    "power_limit": (256, 1e-9),
    "smoothing": (256, 1e-9),
    "theorem_2_13": (10**4, 1e-3),
    "z_decay": (4096, 1e-2),
    "abs_pairing": (4096, 1e-2),
}
FINITE_ONLY = {"spectrum", "dual", "kt", "kawada_ito", "power_limit", "smoothing", "theorem_2_13"}
Z_ONLY = {"z_decay"}
SCENARIO_FIELDS = {"name", "group", "measure", "weight", "horizon", "tolerance", "window",
                   "checks", "emit"}


@dataclass(frozen=True)
class Scenario:
    name: str
    group: object  # FiniteGroup or None for Z
    measure: object
    weight: object
    checks: tuple  # (name, horizon | None, tol | None)
    window: tuple | None
    emit: dict
    echo: dict


def parse_window(text) -> tuple[int, int]:
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ConfigError("window: expected [lo, hi]")
        lo, hi = text
    else:
        m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", str(text))
        if not m:
            raise ConfigError(f"window: expected A..B, got {text!r}")
        lo, hi = m.groups()
    try:
        lo, hi = int(lo), int(hi)
    except (TypeError, ValueError):
        raise ConfigError(f"window: bounds must be integers, got {text!r}") from None
    if lo > hi:
        raise ConfigError(f"window: lower bound {lo} exceeds upper bound {hi}")
    return lo, hi


def _positive_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{where}: expected an integer >= 1, got {value!r}")
    return value


def _positive_float(value, where):
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a positive number, got {value!r}") from None
    if isinstance(value, bool) or not x > 0 or not np.isfinite(x):
        raise ConfigError(f"{where}: expected a positive number, got {value!r}")
    return x


def build_scenario(cfg, overrides: dict | None = None, index: int = 0) -> Scenario:
    """Validate one scenario mapping; raises :class:`ConfigError` naming the bad field."""
    overrides = overrides or {}
    if not isinstance(cfg, dict):
        raise ConfigError(f"scenarios[{index}]: expected a mapping")
    unknown = sorted(set(cfg) - SCENARIO_FIELDS)
    if unknown:
        raise ConfigError(f"{unknown[0]}: unknown scenario field")
    name = str(cfg.get("name", f"scenario-{index}"))
    for key in ("group", "measure", "checks"):
        if key not in cfg:
            raise ConfigError(f"{key}: required field missing in scenario {name!r}")

    gspec = cfg["group"]
    is_z = isinstance(gspec, dict) and set(gspec) == {"z"}
    if is_z:
        if gspec["z"] is not True:
            raise ConfigError("group.z: expected true")
        group = None
    else:
        try:
            group = build_group(gspec)
        except (ValueError, TypeError, WergodicError) as exc:
            raise ConfigError(f"group: {exc}") from None
    try:
        measure = make_measure(group, cfg["measure"])
    except (ValueError, TypeError, IndexError, KeyError, WergodicError) as exc:
        raise ConfigError(f"measure: {exc}") from None
    if is_z != isinstance(measure, IntMeasure):
        raise ConfigError("measure: measure kind does not match the group kind")
    try:
        weight = make_weight(cfg.get("weight"))
    except (ValueError, TypeError, KeyError, WergodicError) as exc:
        raise ConfigError(f"weight: {exc}") from None

    horizon = cfg.get("horizon")
    if horizon is not None:
        _positive_int(horizon, "horizon")
    tol = cfg.get("tolerance")
    if tol is not None:
        tol = _positive_float(tol, "tolerance")
    horizon = overrides.get("horizon") or horizon
    tol = overrides.get("tol") or tol

    window = None
    if cfg.get("window") is not None:
        if not is_z:
            raise ConfigError("window: only meaningful for measures on Z")
        window = parse_window(cfg["window"])
    if overrides.get("window") is not None and is_z:
        window = overrides["window"]

    raw_checks = cfg["checks"]
    if not isinstance(raw_checks, list) or not raw_checks:
        raise ConfigError("checks: expected a nonempty list")
    checks = []
    for i, entry in enumerate(raw_checks):
        where = f"checks[{i}]"
        c_h = c_t = None
        if isinstance(entry, dict):
            if len(entry) != 1:
                raise ConfigError(f"{where}: expected a check name or a single-key mapping")
            (cname, opts), = entry.items()
            opts = opts or {}
            if not isinstance(opts, dict) or set(opts) - {"horizon", "tolerance"}:
                raise ConfigError(f"{where}: options are horizon and tolerance")
            if "horizon" in opts:
                c_h = _positive_int(opts["horizon"], f"{where}.horizon")
            if "tolerance" in opts:
                c_t = _positive_float(opts["tolerance"], f"{where}.tolerance")
        else:
            cname = entry
        if cname not in CHECK_DEFAULTS:
            raise ConfigError(f"{where}: unknown check {cname!r}")
        if is_z and cname in FINITE_ONLY:
            raise ConfigError(f"{where}: {cname} needs a finite group")
        if not is_z and cname in Z_ONLY:
            raise ConfigError(f"{where}: {cname} needs a measure on Z")
        if cname == "dual" and not group.is_abelian:
            raise ConfigError(f"{where}: dual needs an abelian group")
        d_h, d_t = CHECK_DEFAULTS[cname]
        h = overrides.get("horizon") or c_h or horizon or d_h
        t = overrides.get("tol") or c_t or tol or d_t
        checks.append((cname, h, t))

    emit = cfg.get("emit") or {}
    if not isinstance(emit, dict) or set(emit) - {"json", "csv"}:
        raise ConfigError("emit: expected a mapping with json and/or csv paths")
    echo = {k: cfg[k] for k in ("name", "group", "measure", "weight", "horizon", "tolerance",
                                "window", "checks") if k in cfg}
    echo["name"] = name
    if any(v is not None for v in overrides.values()):
        echo["overrides"] = {k: (list(v) if isinstance(v, tuple) else v)
                             for k, v in sorted(overrides.items()) if v is not None}
    return Scenario(name, group, measure, weight, tuple(checks), window, dict(emit), echo)


def load_config(path) -> list:
    """Scenario mappings from a YAML file (one scenario, or a list under ``scenarios``)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: YAML parse error: {exc}") from None
    if isinstance(doc, dict) and "scenarios" in doc:
        if set(doc) != {"scenarios"} or not isinstance(doc["scenarios"], list):
            raise ConfigError("scenarios: expected a list and no sibling keys")
        return doc["scenarios"]
    if isinstance(doc, dict):
        return [doc]
    raise ConfigError("config: expected a scenario mapping or a scenarios list")


def _run_check(sc: Scenario, cname: str, horizon, tol):
    """Returns ``(passed, observational, payload)``."""
    mu, w = sc.measure, sc.weight
    win = sc.window or ergodic.DEFAULT_WINDOW
    if cname == "classify":
        return True, False, classify(mu)
    if cname == "spectrum":
        return True, False, spectrum(mu)
    if cname == "dual":
        d = dual_table(mu, tol=tol)
        checks = d.identity_checks(mu)
        mismatch = fourier_eigen_mismatch(mu)
        ok = all(checks.values()) and mismatch <= 1e-8
        return ok, False, {"table": d, "identities": checks, "eigen_mismatch": mismatch}
    if cname == "kt":
        k = kt_report(mu, n_max=horizon, tol=tol)
        return k.agree, False, k
    if cname == "cesaro":
        traj = ergodic.weighted_cesaro(mu, w, horizon)
        allowance = max(tol, 10 * traj.sup_abs_weight / horizon)
        lim = ergodic.detect_limit(traj, allowance, window=sc.window)
        return lim.verdict != "diverged", False, {"trajectory": traj, "limit": lim,
                                                  "allowance": allowance}
    if cname == "theorem_2_2":
        v = ergodic.theorem_2_2_check(mu, w, n_max=horizon, tol=tol, window=win)
    elif cname == "kawada_ito":
        v = ergodic.kawada_ito_check(mu, n_max=horizon, tol=tol)
    elif cname in ("power_limit", "smoothing"):
        v = ergodic.power_limit_check(mu, n_max=horizon, tol=tol, smoothing=cname == "smoothing")
    elif cname == "theorem_2_13":
        v = ergodic.theorem_2_13_check(mu, w, n_max=horizon, tol=tol)
    elif cname == "z_decay":
        v = ergodic.z_decay_report(mu, n_max=horizon, window=win, tol=tol)
    elif cname == "abs_pairing":
        v = ergodic.abs_pairing_check(mu, n_max=horizon, tol=tol)
    else:  # pragma: no cover - validated earlier
        raise ConfigError(f"checks: unknown check {cname!r}")
    return v.ok, v.observational, v


def versions() -> dict:
    out = {}
    for dist in ("artifact", "numpy", "scipy", "scikit-learn"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    code: int
    json_text: str
    csv_text: str | None
    elapsed: float
    messages: tuple = ()


def run_scenario(sc: Scenario, want_csv: bool = False, csv_horizon: int = 1000) -> ScenarioResult:
    """Run every requested check; numerical failures mark the scenario with exit 3."""
    t0 = time.perf_counter()
    results = []
    code = EXIT_PASS
    messages = []
    for cname, horizon, tol in sc.checks:
        entry = {"check": cname, "horizon": horizon, "tolerance": tol}
        try:
            passed, observational, payload = _run_check(sc, cname, horizon, tol)
            entry.update(passed=bool(passed), observational=bool(observational), payload=payload)
            if not passed:
                code = max(code, EXIT_FAIL)
        except NUMERICAL_ERRORS as exc:
            entry.update(passed=False, observational=False,
                         error={"type": type(exc).__name__, "message": str(exc)})
            messages.append(f"{sc.name}/{cname}: numerical failure: {exc}")
            code = EXIT_NUMERICAL
        except (WergodicError, NotAbelian, Inconclusive, ValueError) as exc:
            entry.update(passed=False, observational=False,
                         error={"type": type(exc).__name__, "message": str(exc)})
            messages.append(f"{sc.name}/{cname}: {type(exc).__name__}: {exc}")
            code = max(code, EXIT_FAIL)
        results.append(entry)
    report = {"scenario": sc.name, "config": sc.echo, "checks": results,
              "overall_pass": code == EXIT_PASS, "versions": versions()}
    csv_text = None
    if want_csv or "csv" in sc.emit:
        n = next((h for c, h, _ in sc.checks if c == "cesaro"), None) or csv_horizon
        traj = ergodic.weighted_cesaro(sc.measure, sc.weight, n)
        csv_text = reporting.trajectory_csv(traj, sc.window or (
            ergodic.DEFAULT_WINDOW if isinstance(sc.measure, IntMeasure) else None))
    return ScenarioResult(sc.name, code, reporting.dumps(report), csv_text,
                          time.perf_counter() - t0, tuple(messages))


def _worker(args):
    cfg, overrides, index, want_csv = args
    return run_scenario(build_scenario(cfg, overrides, index), want_csv)


def run_many(configs, overrides=None, jobs: int = 1, want_csv: bool = False):
    """Validate all scenarios first (so config errors abort before any work), then run them.
    Results keep the input order whatever the number of workers."""
    for i, cfg in enumerate(configs):
        build_scenario(cfg, overrides, i)
    tasks = [(cfg, overrides, i, want_csv) for i, cfg in enumerate(configs)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_worker, tasks))
    return [_worker(t) for t in tasks]


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name) or "scenario"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def emit_results(results, configs, fmt: str, out: str | None, stdout) -> int:
    base = Path(out) if out else None
    chunks = []
    for res, cfg in zip(results, configs):
        for m in res.messages:
            print(m, file=sys.stderr)
        print(f"{res.name}: exit {res.code} in {res.elapsed:.3f} s", file=sys.stderr)
        text = res.json_text if fmt == "json" else res.csv_text
        if base is not None:
            _write(base / f"{_safe_name(res.name)}.{fmt}", text)
        else:
            chunks.append((res.name, text))
        emit = (cfg.get("emit") or {}) if isinstance(cfg, dict) else {}
        for kind, target in emit.items():
            p = Path(target)
            if base is not None and not p.is_absolute():
                p = base / p
            _write(p, res.json_text if kind == "json" else res.csv_text)
    if chunks:
        if fmt == "json" and len(chunks) > 1:
            stdout.write("[\n" + ",\n".join(t.rstrip("\n") for _, t in chunks) + "\n]\n")
        elif fmt == "json":
            stdout.write(chunks[0][1])
        else:
            for name, text in chunks:
                if len(chunks) > 1:
                    stdout.write(f"# scenario: {name}\n")
                stdout.write(text)
    return max((r.code for r in results), default=EXIT_PASS)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wergodic",
                                description="Weighted mean ergodic checks for convolution powers.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--horizon", type=int, help="override n_max for every check")
        sp.add_argument("--tol", type=float, help="override the tolerance for every check")
        sp.add_argument("--window", help="window A..B for measures on Z (use --window=-8..8)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="directory for report files")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized trials")

    c = sub.add_parser("check", help="run the scenarios in a YAML file")
    c.add_argument("file")
    common(c)
    s = sub.add_parser("suite", help="run a built-in suite")
    s.add_argument("tag")
    common(s)
    return p


def _overrides(args) -> dict:
    if args.horizon is not None and args.horizon < 1:
        raise ConfigError("--horizon: expected an integer >= 1")
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol: expected a positive number")
    if args.jobs < 1:
        raise ConfigError("--jobs: expected an integer >= 1")
    return {"horizon": args.horizon, "tol": args.tol,
            "window": parse_window(args.window) if args.window else None}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        overrides = _overrides(args)
        if args.command == "check":
            configs = load_config(args.file)
            results = run_many(configs, overrides, args.jobs, args.format == "csv")
            return emit_results(results, configs, args.format, args.out, stdout)
        from .suites import run_suite
        return run_suite(args.tag, overrides, args, stdout)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry_point():  # pragma: no cover
    sys.exit(main())
