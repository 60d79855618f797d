"""Weighted Cesaro trajectories, limit detection and theorem-level verdicts.

Every ``*_check`` function returns a :class:`TheoremVerdict`. When a
hypothesis fails the verdict does not pass, but it is flagged
``observational`` and still carries the empirical behaviour.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CesaroNotConverged, GroupMismatch, NotPowerBounded, OracleDisagreement
from .groups import FiniteGroup, coset_containment_witness
from .measures import (SUPPORT_CAP, FiniteMeasure, GroupFunction, IntMeasure, act_on_function,
                       classify, convolve, dirac, haar, haar_on_subgroup, sup_distance)
from .errors import SupportOverflow
from .spectral import (ergodic_projection, geometric_checkpoints, kt_report, power_boundedness,
                       regular_matrix, spectrum)
from .weights import ConstantWeight, WeightSequence, goodness_probe, mean_weight, weight_limit

IDEMPOTENCE_TOL = 1e-8
PROJECTION_TOL = 1e-7
DEFAULT_WINDOW = (-8, 8)


def default_checkpoints(n_max: int) -> list[int]:
    """Powers of two up to ``n_max``, the three final indices and a midway pair.

    The midway pair ``(n_max//2 - 1, n_max//2)`` lets divergence detection tell
    a persistent oscillation from one that decays like ``1/n``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    pts = set(geometric_checkpoints(n_max))
    pts.update(k for k in (n_max - 2, n_max - 1, n_max) if k >= 1)
    if n_max >= 8:
        pts.update((n_max // 2 - 1, n_max // 2))
    return sorted(pts)


@dataclass(frozen=True, eq=False)
class CesaroTrajectory:
    """Checkpointed ``m_n = (1/n) sum_{i<=n} a_i mu^i`` (``kind="cesaro"``), raw powers
    ``mu^n`` (``kind="powers"``) or doubling averages at ``n = 2^k`` (``kind="doubling"``)."""

    measure: object
    weight: WeightSequence | None
    checkpoints: tuple
    values: tuple
    kind: str = "cesaro"
    sup_abs_weight: float = 1.0
    twist: complex = 1.0

    @property
    def last(self):
        return self.values[-1]

    def rows(self, window: tuple[int, int] | None = None):
        """``(n, index, re, im)`` rows for CSV output."""
        out = []
        for n, m in zip(self.checkpoints, self.values):
            if isinstance(m, IntMeasure):
                lo, hi = window if window is not None else (m.offset, m.stop - 1)
                idx = range(lo, hi + 1)
                vals = m.window(lo, hi) if hi >= lo else []
            else:
                idx = range(m.group.order)
                vals = m.coeffs
            out.extend((n, i, float(v.real), float(v.imag)) for i, v in zip(idx, vals))
        return out


def _check_power_bounded(mu):
    if mu.is_probability():
        return
    if isinstance(mu, IntMeasure):
        if mu.tv_norm() > 1 + 1e-12:
            raise NotPowerBounded("measures on Z are accepted only with tv_norm <= 1")
    else:
        pb = power_boundedness(mu)
        if not pb.bounded:
            raise NotPowerBounded(pb.reason)
    warnings.warn("trajectory of a power-bounded measure that is not a probability measure",
                  stacklevel=3)


def weighted_cesaro(mu, w: WeightSequence | None = None, n_max: int = 1000,
                    checkpoints=None) -> CesaroTrajectory:
    """Accumulate ``S_n = S_(n-1) + a_n mu^n`` and store ``S_n / n`` at checkpoints."""
    w = w if w is not None else ConstantWeight(1.0)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _check_power_bounded(mu)
    checkpoints = sorted(set(checkpoints)) if checkpoints is not None else default_checkpoints(n_max)
    if checkpoints[0] < 1 or checkpoints[-1] > n_max:
        raise ValueError("checkpoints must lie in 1..n_max")
    wanted = set(checkpoints)
    a = w.values(np.arange(1, n_max + 1))
    running_sup = np.maximum.accumulate(np.abs(a))
    probability = mu.is_probability()
    values = []
    if isinstance(mu, IntMeasure):
        lo = min(mu.offset, n_max * mu.offset)
        hi = max(mu.stop - 1, n_max * (mu.stop - 1))
        if hi - lo + 1 > SUPPORT_CAP:
            raise SupportOverflow(f"trajectory window {hi - lo + 1} exceeds cap {SUPPORT_CAP}")
        S = np.zeros(hi - lo + 1, dtype=complex)
        p, off = mu.values.copy(), mu.offset
        for n in range(1, n_max + 1):
            S[off - lo:off - lo + p.size] += a[n - 1] * p
            if n in wanted:
                values.append(IntMeasure(lo, S / n))
            if n < n_max:
                p = np.convolve(p, mu.values)
                off += mu.offset
    else:
        M = regular_matrix(mu).matrix
        S = np.zeros(mu.group.order, dtype=complex)
        p = mu.coeffs.copy()
        for n in range(1, n_max + 1):
            S += a[n - 1] * p
            if n in wanted:
                values.append(FiniteMeasure(mu.group, S / n))
            p = M @ p
    if probability:
        for n, m in zip(checkpoints, values):
            assert m.tv_norm() <= running_sup[n - 1] * (1 + 1e-9) + 1e-12, "Cesaro bound violated"
    return CesaroTrajectory(mu, w, tuple(checkpoints), tuple(values), "cesaro",
                            float(running_sup[-1]))


def power_trajectory(mu, n_max: int = 256, checkpoints=None) -> CesaroTrajectory:
    """Raw powers ``mu^n`` at checkpoints (default: powers of two plus the last three)."""
    checkpoints = sorted(set(checkpoints)) if checkpoints is not None else default_checkpoints(n_max)
    wanted = set(checkpoints)
    values = []
    p = mu
    for n in range(1, checkpoints[-1] + 1):
        if n > 1:
            p = convolve(p, mu)
        if n in wanted:
            values.append(p)
    return CesaroTrajectory(mu, None, tuple(checkpoints), tuple(values), "powers")


def doubling_trajectory(mu: FiniteMeasure, xi: complex = 1.0, max_doublings: int = 48,
                        patience: int = 4, method: str = "smoothed") -> CesaroTrajectory:
    """Checkpoints at ``n = 2^k`` whose limit is the Cesaro limit of ``xi^i mu^i``.

    ``method="cesaro"`` runs the exact recurrence
    ``C_2n = (C_n + (xi mu)^n * C_n) / 2``; its error decays only like ``1/n``.
    ``method="smoothed"`` squares ``nu = (delta_e + xi mu) / 2`` instead. For a
    power-bounded operator the powers of ``nu`` converge geometrically to the
    same limit, since ``(1 + z) / 2`` is unimodular only at ``z = 1``.

    Rounding along unimodular directions grows like ``2^k eps``, so the run
    stops ``patience`` doublings after the checkpoint residual (once below
    1e-6) stops improving and the trajectory is truncated where the last two gaps are smallest.
    """
    if not isinstance(mu, FiniteMeasure):
        raise GroupMismatch("doubling trajectories need a finite group")
    if method not in ("smoothed", "cesaro"):
        raise ValueError(f"unknown doubling method {method!r}")
    base = mu * complex(xi)
    if method == "smoothed":
        base = (mu.identity() + base) / 2
    C, P = base, base
    checkpoints, values, residuals = [1], [C], []
    n = 1
    best, stale = math.inf, 0
    for _ in range(max_doublings):
        P_next = convolve(P, P)
        C_next = P_next if method == "smoothed" else (C + convolve(P, C)) / 2
        P = P_next
        n *= 2
        r = float(np.max(np.abs(C_next.coeffs - C.coeffs)))
        C = C_next
        checkpoints.append(n)
        values.append(C)
        residuals.append(r)
        if r < best:
            best, stale = r, 0
        elif best < 1e-6:  # only count stalls once the transient is over
            stale += 1
        if stale >= patience:
            break
    # end at the pair of consecutive gaps with the smallest maximum
    pair = np.maximum(residuals[:-1], residuals[1:]) if len(residuals) > 1 else np.array(residuals)
    keep = int(np.argmin(pair)) + (3 if len(residuals) > 1 else 2)
    return CesaroTrajectory(mu, None, tuple(checkpoints[:keep]), tuple(values[:keep]),
                            f"doubling-{method}", 1.0, complex(xi))


@dataclass(frozen=True, eq=False)
class LimitReport:
    verdict: str  # converged | diverged | undecided
    limit: object = None
    rate_trace: tuple = ()
    witness: tuple | None = None
    residual: float = float("nan")
    target: object = None
    target_source: str = ""
    sup_distance: float = float("nan")
    checkpoint: int = 0
    idempotence_residual: float = float("nan")
    projection_distance: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"


def detect_limit(traj: CesaroTrajectory, tol: float, target=None, target_source: str = "",
                 window: tuple[int, int] | None = None) -> LimitReport:
    """Classify the tail of a trajectory.

    Converged: the last two checkpoint gaps are at most ``tol`` and
    nonincreasing (a final gap below ``tol / 1000`` counts as rounding noise).
    Diverged: the last value returns to the one two checkpoints back (or to
    any earlier checkpoint) while the final gap exceeds ``10 * tol``, and the
    gap has not shrunk below 3/4 of the gap at the latest earlier pair of
    consecutive checkpoints (if there is one). Otherwise undecided.
    """
    v = traj.values
    if len(v) < 3:
        raise ValueError("limit detection needs at least three checkpoints")
    if isinstance(v[-1], IntMeasure) and window is None:
        window = DEFAULT_WINDOW
    gaps = tuple(sup_distance(v[i], v[i + 1], window) for i in range(len(v) - 1))
    d1, d2 = gaps[-2], gaps[-1]
    tdist = float("nan") if target is None else sup_distance(v[-1], target, window)
    common = dict(rate_trace=gaps, target=target, target_source=target_source,
                  sup_distance=tdist, checkpoint=traj.checkpoints[-1])
    if (d2 <= d1 or d2 <= 1e-3 * tol) and max(d1, d2) <= tol:
        return LimitReport("converged", limit=v[-1], residual=d2, **common)
    cps = traj.checkpoints
    earlier = [i for i in range(len(cps) - 3) if cps[i + 1] == cps[i] + 1]
    persistent = not earlier or d2 >= 0.75 * gaps[earlier[-1]]
    if d2 > 10 * tol and persistent:
        if sup_distance(v[-3], v[-1], window) <= tol:
            return LimitReport("diverged", witness=(v[-1], v[-2]), residual=d2, **common)
        for earlier in v[:-2]:
            if sup_distance(earlier, v[-1], window) <= tol:
                return LimitReport("diverged", witness=(v[-1], v[-2]), residual=d2, **common)
    return LimitReport("undecided", residual=d2, **common)


@dataclass(frozen=True)
class Hypothesis:
    name: str
    holds: bool
    witness: str = ""


@dataclass(frozen=True)
class TheoremVerdict:
    theorem: str
    hypotheses: tuple
    conclusion_checked: bool
    passed: bool
    observational: bool = False
    diagnostics: dict = field(default_factory=dict)
    parts: tuple = ()

    def __post_init__(self):
        if self.passed:
            assert all(h.holds for h in self.hypotheses), "pass requires every hypothesis"
            assert self.conclusion_checked, "pass requires a checked conclusion"

    @property
    def hypotheses_hold(self) -> bool:
        return all(h.holds for h in self.hypotheses)

    @property
    def ok(self) -> bool:
        """Pass, or an observational run whose hypotheses do not apply."""
        return self.passed or self.observational


def _verdict(theorem, hypotheses, conclusion_ok, diagnostics, parts=()):
    hold = all(h.holds for h in hypotheses)
    if not hold:
        diagnostics = {**diagnostics, "label": "unconditional observation"}
    return TheoremVerdict(theorem, tuple(hypotheses), conclusion_checked=True,
                          passed=bool(hold and conclusion_ok), observational=not hold,
                          diagnostics=diagnostics, parts=tuple(parts))


def _aperiodicity_hypotheses(cls):
    hyps = [Hypothesis("strictly_aperiodic (difference subgroup)", cls.strictly_aperiodic,
                       f"difference subgroup {_describe(cls.difference_generated)}")]
    if cls.oracle_checked:
        hyps.append(Hypothesis("strictly_aperiodic (coset search)", cls.witness is None,
                               "no proper coset contains the support" if cls.witness is None
                               else f"support inside coset {cls.witness.coset()}"))
    return hyps


def _describe(H):
    if hasattr(H, "d"):
        return f"{H.d}Z"
    return f"of order {len(H)}"


def theorem_2_2_check(mu, w: WeightSequence | None = None, n_max: int = 10**4, tol: float = 1e-3,
                      window: tuple[int, int] = DEFAULT_WINDOW) -> TheoremVerdict:
    """Weighted Cesaro limit of a strictly aperiodic measure.

    Compact case: target ``mean_weight * haar([supp mu])``; integers with a
    non-compact generated subgroup: target 0 on ``window``. Passes when the
    sup-distance at ``n_max`` is within ``max(tol, 10 sup|a_i| / n_max)``.
    """
    w = w if w is not None else ConstantWeight(1.0)
    cls = classify(mu)
    good = goodness_probe(w)
    hyps = [Hypothesis("probability", cls.probability),
            *_aperiodicity_hypotheses(cls),
            Hypothesis("good weight", good.verdict == "certified", good.verdict)]
    traj = weighted_cesaro(mu, w, n_max)
    a = mean_weight(w) if w.certified else weight_limit(w, 1.0).value
    if isinstance(mu, IntMeasure):
        compact = cls.generated.is_compact
        target = a * IntMeasure(0, [1.0]) if compact else IntMeasure(0, [])
        source = "compact case: a * haar([supp mu])" if compact else "non-compact [supp mu]: 0"
        dist = sup_distance(traj.last, target, window)
    else:
        compact = True
        target = a * haar_on_subgroup(cls.generated)
        source = "compact case: a * haar([supp mu])"
        dist = sup_distance(traj.last, target)
    hyps.append(Hypothesis("compactness case", True,
                           "compact: finite group" if not isinstance(mu, IntMeasure) else
                           f"[supp mu] = {cls.generated.d}Z, "
                           + ("compact" if compact else "non-compact")))
    allowance = max(tol, 10 * traj.sup_abs_weight / n_max)
    diag = {"mean_weight": a, "target_source": source, "sup_distance": dist,
            "allowance": allowance, "compact": compact, "n_max": n_max,
            "generated_is_whole": bool(cls.generated.is_whole),
            "empirical_limit": traj.last}
    return _verdict("theorem_2_2", hyps, dist <= allowance, diag)


def kawada_ito_check(mu: FiniteMeasure, n_max: int = 256, tol: float = 1e-9) -> TheoremVerdict:
    """Cesaro averages to Haar under adaptedness; raw powers to Haar when also strictly
    aperiodic. A part whose hypotheses fail is reported as an observation."""
    if not isinstance(mu, FiniteMeasure):
        raise GroupMismatch("Kawada-Ito check needs a finite group")
    cls = classify(mu)
    m_G = haar(mu.group)
    base = [Hypothesis("probability", cls.probability)]
    traj = weighted_cesaro(mu, ConstantWeight(1.0), n_max)
    d_ces = sup_distance(traj.last, m_G)
    allowance = max(tol, 10.0 / n_max)
    ces = _verdict("kawada_ito.cesaro", base + [Hypothesis("adapted", cls.adapted)],
                   d_ces <= allowance,
                   {"sup_distance": d_ces, "allowance": allowance,
                    "checkpoint_distances": [sup_distance(v, m_G) for v in traj.values],
                    "checkpoints": list(traj.checkpoints)})
    pw = power_trajectory(mu, n_max)
    d_pow = sup_distance(pw.last, m_G)
    powers = _verdict("kawada_ito.powers",
                      base + [Hypothesis("adapted", cls.adapted), *_aperiodicity_hypotheses(cls)],
                      d_pow <= tol, {"sup_distance": d_pow, "tol": tol, "n_max": n_max})
    if not powers.hypotheses_hold:
        powers = TheoremVerdict(powers.theorem, powers.hypotheses, conclusion_checked=False,
                                passed=False, observational=True,
                                diagnostics={**powers.diagnostics, "skipped": True,
                                             "unconditional observation": d_pow})
    parts = (ces, powers)
    ok = all(p.ok for p in parts)
    return TheoremVerdict("kawada_ito", tuple(base), conclusion_checked=True,
                          passed=bool(cls.probability and ok),
                          observational=not cls.probability,
                          diagnostics={"adapted": cls.adapted,
                                       "strictly_aperiodic": cls.strictly_aperiodic},
                          parts=parts)


def power_limit_check(mu: FiniteMeasure, n_max: int = 256, tol: float = 1e-9,
                      smoothing: bool = False) -> TheoremVerdict:
    """Powers converge to an idempotent when the unitary spectrum sits inside ``{1}``.

    With ``smoothing`` the measure is replaced by ``(delta_e + mu) / 2``, whose
    spectral gate always holds; its power limit must equal the Cesaro limit
    measure of ``mu``.
    """
    pb = power_boundedness(mu)
    if not pb.bounded:
        raise NotPowerBounded(pb.reason)
    nu = (mu.identity() + mu) / 2 if smoothing else mu
    kt = kt_report(nu, n_max=n_max, tol=tol)
    rep = detect_limit(power_trajectory(nu, n_max), tol)
    diag = {"gate": kt.spectral_predicate, "kt_agree": kt.agree, "d_last": float(kt.d[-1]),
            "verdict": rep.verdict, "smoothing": smoothing,
            "unitary_eigenvalues": list(kt.unitary_eigenvalues)}
    ok = kt.spectral_predicate and rep.converged
    if rep.verdict == "diverged":
        diag["oscillation_witness"] = [rep.witness[0], rep.witness[1]]
    if rep.converged:
        theta = rep.limit
        idem = (convolve(theta, theta) - theta).tv_norm()
        proj = ergodic_projection(nu, 1.0).projection
        pdist = float(np.max(np.abs(regular_matrix(theta).matrix - proj)))
        diag.update(limit=theta, idempotence_residual=idem, projection_distance=pdist)
        ok = ok and idem <= IDEMPOTENCE_TOL and pdist <= PROJECTION_TOL
        if smoothing:
            cesaro = limit_measure(mu, 1.0)
            cdist = sup_distance(theta, cesaro.limit)
            diag["cesaro_limit_distance"] = cdist
            ok = ok and cdist <= PROJECTION_TOL
    hyps = [Hypothesis("power_bounded", True, pb.reason)]
    return _verdict("power_limit_smoothed" if smoothing else "power_limit", hyps, ok, diag)


def limit_measure(mu, xi: complex = 1.0, n_max: int | None = None, tol: float = IDEMPOTENCE_TOL,
                  window: tuple[int, int] = DEFAULT_WINDOW) -> LimitReport:
    """Detected limit of ``(1/n) sum xi^i mu^i``.

    On finite groups the limit comes from the smoothed doubling trajectory; it
    must be idempotent within ``tol`` and its convolution matrix must match the
    algebraic ergodic projection within ``10 * tol``. On the integers a
    sequential trajectory to ``n_max`` (default 4096) is examined on ``window``.
    """
    if abs(abs(xi) - 1) > 1e-9:
        raise ValueError("xi must have modulus 1")
    if isinstance(mu, IntMeasure):
        from .weights import CharacterWeight
        turns = (np.angle(xi) / (2 * np.pi)) % 1.0
        traj = weighted_cesaro(mu, CharacterWeight(turns), n_max or 4096)
        rep = detect_limit(traj, tol, window=window)
        if not rep.converged:
            raise CesaroNotConverged(f"Cesaro averages on Z undecided at residual {rep.residual:.3g}",
                                     residual=rep.residual)
        return rep
    pb = power_boundedness(mu)
    if not pb.bounded:
        raise NotPowerBounded(pb.reason)
    traj = doubling_trajectory(mu, xi, max_doublings=int(math.log2(n_max)) if n_max else 48)
    rep = detect_limit(traj, tol)
    if not rep.converged:
        raise CesaroNotConverged(f"Cesaro doubling {rep.verdict} with residual {rep.residual:.3g}",
                                 residual=rep.residual)
    theta = rep.limit
    idem = (convolve(theta, theta) - theta).tv_norm()
    proj = ergodic_projection(mu, xi).projection
    pdist = float(np.max(np.abs(regular_matrix(theta).matrix - proj)))
    if idem > tol or pdist > 10 * tol:
        raise OracleDisagreement(f"limit measure fails its laws: idempotence {idem:.3g}, "
                                 f"projection distance {pdist:.3g}")
    return LimitReport("converged", limit=theta, rate_trace=rep.rate_trace, residual=rep.residual,
                       target_source="limit measure of xi*mu", checkpoint=rep.checkpoint,
                       idempotence_residual=idem, projection_distance=pdist)


def theorem_2_13_check(mu: FiniteMeasure, w: WeightSequence | None = None, n_max: int = 10**4,
                       tol: float = 1e-3) -> TheoremVerdict:
    """Weighted limit as a combination of twisted limit measures over the unitary point spectrum.

    Two candidates are built: ``L_literal = sum a(xi) theta^xi`` and
    ``L_conjugate = sum a(xi) theta^conj(xi)``. Under the convolution convention
    used here the Cesaro limit of ``xi^i mu^i`` projects onto the eigenspace at
    ``conj(xi)``, so ``L_conjugate`` is the one that must match; whether the
    literal pairing also matches is always reported.
    """
    w = w if w is not None else ConstantWeight(1.0)
    if mu.tv_norm() > 1 + 1e-12:
        raise ValueError("theorem 2.13 check needs tv_norm(mu) <= 1")
    good = goodness_probe(w)
    hyps = [Hypothesis("tv_norm <= 1", True, f"{mu.tv_norm():.17g}"),
            Hypothesis("good weight", good.verdict == "certified", good.verdict)]
    xis = spectrum(mu).unitary_eigenvalues
    L_lit = mu * 0
    L_conj = mu * 0
    terms = []
    for xi in xis:
        a = weight_limit(w, xi).value
        terms.append({"xi": xi, "a": a})
        if a == 0:
            continue
        L_lit = L_lit + a * limit_measure(mu, xi).limit
        L_conj = L_conj + a * limit_measure(mu, complex(np.conj(xi))).limit
    traj = weighted_cesaro(mu, w, n_max)
    emp = traj.last
    allowance = max(tol, 10 * traj.sup_abs_weight / n_max)
    d_conj = sup_distance(L_conj, emp)
    d_lit = sup_distance(L_lit, emp)
    diag = {"unitary_point_spectrum": list(xis), "terms": terms, "empirical_limit": emp,
            "conjugate_pairing_limit": L_conj, "literal_pairing_limit": L_lit,
            "conjugate_distance": d_conj, "literal_distance": d_lit, "allowance": allowance,
            "literal_pairing_matches": bool(d_lit <= allowance),
            "pairing_mismatch_flagged": bool(d_lit > allowance)}
    return _verdict("theorem_2_13", hyps, d_conj <= allowance, diag)


def uniform_convergence_gap(mu_seq, mu_limit: FiniteMeasure, f: GroupFunction) -> np.ndarray:
    """``sup_g |(mu_n * f)(g) - (mu * f)(g)|`` for each supplied measure."""
    ref = act_on_function(mu_limit, f).values
    return np.array([float(np.max(np.abs(act_on_function(m, f).values - ref))) for m in mu_seq])


def function_pairing(F, h) -> complex:
    """Integral of ``F * h``: normalized Haar on a finite group, counting measure on Z."""
    if isinstance(F, IntMeasure):
        if F.values.size == 0 or h.values.size == 0:
            return 0j
        lo, hi = max(F.offset, h.offset), min(F.stop, h.stop) - 1
        return complex(np.dot(F.window(lo, hi), h.window(lo, hi))) if lo <= hi else 0j
    return complex(np.mean(F.values * h.values))


@dataclass(frozen=True)
class ScalarTrajectory:
    checkpoints: tuple
    values: np.ndarray


def abs_pairing_average(mu, f, h, n_max: int = 1024, checkpoints=None) -> ScalarTrajectory:
    """Cesaro averages of ``|<mu^i * f, h>|`` over ``i = 1..n``."""
    checkpoints = sorted(set(checkpoints)) if checkpoints is not None else default_checkpoints(n_max)
    wanted = set(checkpoints)
    total = 0.0
    out = []
    F = f
    for i in range(1, checkpoints[-1] + 1):
        F = act_on_function(mu, F)
        total += abs(function_pairing(F, h))
        if i in wanted:
            out.append(total / i)
    return ScalarTrajectory(tuple(checkpoints), np.array(out))


def abs_pairing_check(mu, f=None, h=None, n_max: int = 4096, tol: float = 1e-2) -> TheoremVerdict:
    """Averages of ``|<mu^i * f, h>|`` vanish when the operator has no unitary eigenvalues.

    On the integers that holds for every probability measure with at least two
    support points. Passes when the final average is within ``max(tol, 3/sqrt(n_max))``.
    """
    if isinstance(mu, IntMeasure):
        f = f if f is not None else IntMeasure.indicator([0])
        h = h if h is not None else IntMeasure.indicator([0])
        hyp = Hypothesis("no unitary eigenvalues (|supp| >= 2 on Z)", len(mu.support) >= 2,
                         f"support size {len(mu.support)}")
    else:
        f = f if f is not None else GroupFunction(mu.group, np.ones(mu.group.order))
        h = h if h is not None else GroupFunction(mu.group, np.ones(mu.group.order))
        hyp = Hypothesis("no unitary eigenvalues", not spectrum(mu).unitary,
                         "finite group: constants are always fixed")
    traj = abs_pairing_average(mu, f, h, n_max)
    allowance = max(tol, 3 / math.sqrt(n_max))
    last = float(traj.values[-1])
    diag = {"final_average": last, "allowance": allowance, "trajectory": traj.values.tolist(),
            "checkpoints": list(traj.checkpoints)}
    return _verdict("abs_pairing", [Hypothesis("probability", mu.is_probability()), hyp],
                    last <= allowance, diag)


def z_decay_report(mu: IntMeasure, n_max: int = 4096, window: tuple[int, int] = DEFAULT_WINDOW,
                   tol: float = 1e-2, f: IntMeasure | None = None,
                   h: IntMeasure | None = None) -> TheoremVerdict:
    """Decay of ``mu^n`` on the integers when the difference subgroup is non-compact.

    Checks window sup at ``n_max``, monotone decay of ``||mu^n||_2`` along the
    checkpoints, and the weak pairing ``<mu^n * f, h>``; reports log-log decay
    exponents of the global sup and the l2 norm.
    """
    if not isinstance(mu, IntMeasure):
        raise GroupMismatch("z_decay_report needs a measure on Z")
    cls = classify(mu)
    hyps = [Hypothesis("probability", cls.probability),
            Hypothesis("difference subgroup non-compact", not cls.difference_generated.is_compact,
                       f"{cls.difference_generated.d}Z")]
    f = f if f is not None else IntMeasure.indicator([0])
    h = h if h is not None else IntMeasure.indicator([0])
    checkpoints = default_checkpoints(n_max)
    traj = power_trajectory(mu, n_max, checkpoints)
    lo, hi = window
    wsup = np.array([float(np.max(np.abs(p.window(lo, hi)))) for p in traj.values])
    gsup = np.array([float(np.max(np.abs(p.values))) for p in traj.values])
    l2 = np.array([p.l2_norm() for p in traj.values])
    pair = np.array([abs(function_pairing(act_on_function(p, f), h)) for p in traj.values])
    n = np.array(checkpoints, dtype=float)
    sel = n >= 16
    exps = {}
    for name, series in (("global_sup", gsup), ("l2_norm", l2)):
        ok = sel & (series > 0)
        exps[name] = (float(np.polyfit(np.log(n[ok]), np.log(series[ok]), 1)[0])
                      if ok.sum() >= 2 else float("nan"))
    l2_decreasing = bool(np.all(np.diff(l2) <= 1e-15) and l2[-1] < l2[0])
    conclusion = bool(wsup[-1] <= tol and l2_decreasing and pair[-1] <= tol)
    diag = {"checkpoints": checkpoints, "window_sup": wsup.tolist(), "global_sup": gsup.tolist(),
            "l2_norm": l2.tolist(), "pairing": pair.tolist(), "l2_decreasing": l2_decreasing,
            "decay_exponents": exps, "expected_global_sup_exponent": -0.5}
    return _verdict("z_decay", hyps, conclusion, diag)
