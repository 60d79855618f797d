import cmath
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ABELIAN_GROUPS, SMALL_GROUPS, probability_weights
from wergodic.ergodic import (CesaroTrajectory, TheoremVerdict, Hypothesis, abs_pairing_average,
                              abs_pairing_check, detect_limit, doubling_trajectory,
                              kawada_ito_check, limit_measure, power_limit_check,
                              power_trajectory, theorem_2_13_check, theorem_2_2_check,
                              uniform_convergence_gap, weighted_cesaro, z_decay_report)
from wergodic.errors import GroupMismatch, NotPowerBounded
from wergodic.groups import cyclic, direct_product, symmetric
from wergodic.measures import (GroupFunction, IntMeasure, convolve, dirac, from_weights, haar,
                               power, sup_distance, uniform_on_set)
from wergodic.spectral import dual_table, ergodic_projection, regular_matrix
from wergodic.weights import CharacterWeight, ConstantWeight, PeriodicWeight, RotationWeight

OMEGA = cmath.exp(2j * np.pi / 3)
ALT = PeriodicWeight((-1, 1))  # a_n = (-1)^n

Z2, Z3, Z4, Z6 = cyclic(2), cyclic(3), cyclic(4), cyclic(6)


def brute_cesaro(mu, weights, n):
    """Direct sum over explicit powers (independent of the trajectory code)."""
    acc = mu * 0
    p = mu.identity()
    for i in range(1, n + 1):
        p = convolve(p, mu)
        acc = acc + weights(i) * p
    return acc / n


# --- weighted_cesaro ------------------------------------------------------

def test_z2_delta1_cesaro_rate():
    traj = weighted_cesaro(dirac(Z2, 1), n_max=1000)
    for n, m in zip(traj.checkpoints, traj.values):
        assert sup_distance(m, haar(Z2)) <= 1 / (2 * n) + 1e-15


def test_z2_delta1_alternating():
    traj = weighted_cesaro(dirac(Z2, 1), ALT, n_max=1000)
    assert np.allclose(traj.last.coeffs, [0.5, -0.5], atol=1e-12)


def test_n_max_one_is_first_term():
    mu = from_weights(Z3, [0.2, 0.3, 0.5])
    traj = weighted_cesaro(mu, CharacterWeight(0.25), n_max=1)
    assert traj.checkpoints == (1,)
    assert np.allclose(traj.last.coeffs, 1j * mu.coeffs)


@pytest.mark.parametrize("w", [ConstantWeight(1), ALT, CharacterWeight(0.3), RotationWeight()],
                         ids=repr)
def test_matches_brute_force(w):
    mu = from_weights(symmetric(3), [0.1, 0.2, 0.1, 0.3, 0.2, 0.1])
    traj = weighted_cesaro(mu, w, n_max=37, checkpoints=[5, 37])
    for n, m in zip(traj.checkpoints, traj.values):
        ref = brute_cesaro(mu, lambda i: complex(w.values(np.array([i]))[0]), n)
        assert m.allclose(ref, atol=1e-12)


def test_z_trajectory_matches_binomial():
    mu = IntMeasure.from_dict({0: 0.5, 1: 0.5})
    traj = weighted_cesaro(mu, n_max=20)
    ref = sum(np.array([comb(i, j) for j in range(21)]) / 2 ** i for i in range(1, 21)) / 20
    assert np.allclose(traj.last.window(0, 20), ref, atol=1e-14)


def test_rejects_bad_horizon_and_unbounded():
    with pytest.raises(ValueError):
        weighted_cesaro(dirac(Z2, 1), n_max=0)
    with pytest.raises(NotPowerBounded):
        weighted_cesaro(from_weights(Z2, [1.0, 1.0]), n_max=4)


@settings(max_examples=30)
@given(st.sampled_from(SMALL_GROUPS[:13]), st.data())
def test_norm_bound_property(G, data):
    mu = from_weights(G, data.draw(probability_weights(G.order)))
    w = data.draw(st.sampled_from([ConstantWeight(2), ALT, CharacterWeight(0.1), RotationWeight()]))
    traj = weighted_cesaro(mu, w, n_max=64)
    for m in traj.values:
        assert m.tv_norm() <= w.bound * (1 + 1e-9)


# --- detect_limit ---------------------------------------------------------

def test_detect_converged_quarter_three_quarters():
    rep = detect_limit(power_trajectory(from_weights(Z2, [0.25, 0.75]), 256), 1e-9)
    assert rep.converged and np.allclose(rep.limit.coeffs, [0.5, 0.5], atol=1e-12)


def test_detect_diverged_parity():
    rep = detect_limit(power_trajectory(dirac(Z2, 1), 256), 1e-9)
    assert rep.verdict == "diverged"
    a, b = rep.witness
    assert {tuple(a.coeffs.real), tuple(b.coeffs.real)} == {(1.0, 0.0), (0.0, 1.0)}


def test_detect_undecided_when_truncated():
    traj = weighted_cesaro(dirac(Z2, 1), n_max=64)
    rep = detect_limit(traj, 1e-12)
    assert rep.verdict == "undecided" and rep.residual > 0


def test_detect_needs_three_points():
    with pytest.raises(ValueError):
        detect_limit(weighted_cesaro(dirac(Z2, 1), n_max=2), 1e-3)


# --- theorem 2.2 ----------------------------------------------------------

def test_theorem_2_2_z6():
    v = theorem_2_2_check(uniform_on_set(Z6, [1, 2]), n_max=10 ** 4)
    assert v.passed and v.diagnostics["sup_distance"] < 1e-3


def test_theorem_2_2_alternating_mean_zero():
    v = theorem_2_2_check(from_weights(Z2, [0.25, 0.75]), ALT, n_max=10 ** 4)
    assert v.passed and v.diagnostics["mean_weight"] == 0
    assert v.diagnostics["sup_distance"] < 1e-3
    # closed form: the geometric sums give (1/n) sum (-1)^i (1/2 + (-1/2)^i (1/2)(-1)...) = O(1/n)
    emp = v.diagnostics["empirical_limit"]
    assert np.max(np.abs(emp.coeffs)) < 1e-3


def test_theorem_2_2_periodic_weight_half_haar():
    v = theorem_2_2_check(uniform_on_set(Z6, [1, 2]), PeriodicWeight((1, 0)), n_max=10 ** 4)
    assert v.passed
    assert sup_distance(v.diagnostics["empirical_limit"], 0.5 * haar(Z6)) < 1e-3


def test_theorem_2_2_on_z():
    v = theorem_2_2_check(IntMeasure.from_dict({0: 0.5, 1: 0.5}), n_max=2 ** 12, tol=1e-2)
    assert v.passed and not v.diagnostics["compact"]


def test_theorem_2_2_hypothesis_failure_is_observational():
    v = theorem_2_2_check(dirac(Z2, 1), n_max=1000)
    assert not v.passed and v.observational and v.ok
    assert v.diagnostics["label"] == "unconditional observation"


def test_verdict_pass_requires_hypotheses():
    with pytest.raises(AssertionError):
        TheoremVerdict("x", (Hypothesis("h", False),), True, True)
    with pytest.raises(AssertionError):
        TheoremVerdict("x", (Hypothesis("h", True),), False, True)


# --- Kawada-Ito -----------------------------------------------------------

def test_kawada_ito_z2_delta1():
    v = kawada_ito_check(dirac(Z2, 1))
    ces, pw = v.parts
    assert v.passed and ces.passed
    assert pw.diagnostics["skipped"] and pw.observational and not pw.conclusion_checked


def test_kawada_ito_z4_symmetric_pair():
    v = kawada_ito_check(uniform_on_set(Z4, [1, 3]))
    assert v.parts[0].passed


def test_kawada_ito_s3():
    # {(12),(123)} sits in the coset (12)·{e, (12)(123)}, so powers alternate between
    # two cosets; only the Cesaro part reaches the uniform measure.
    v = kawada_ito_check(uniform_on_set(symmetric(3), [1, 3]), n_max=128)
    assert v.passed and v.parts[0].passed and v.parts[1].diagnostics["skipped"]
    v = kawada_ito_check(uniform_on_set(symmetric(3), [0, 1, 3]), n_max=128)
    assert v.parts[1].passed and v.parts[1].diagnostics["sup_distance"] < 1e-6


def test_kawada_ito_rejects_z():
    with pytest.raises(GroupMismatch):
        kawada_ito_check(IntMeasure.from_dict({1: 1.0}))


# --- power limits ---------------------------------------------------------

def test_power_limit_quarter():
    v = power_limit_check(from_weights(Z2, [0.25, 0.75]))
    assert v.passed and v.diagnostics["gate"]
    assert v.diagnostics["idempotence_residual"] < 1e-12


def test_power_limit_parity_fails_with_witness():
    v = power_limit_check(dirac(Z2, 1))
    assert not v.passed and not v.diagnostics["gate"]
    assert "oscillation_witness" in v.diagnostics


def test_smoothing_parity_is_haar():
    v = power_limit_check(dirac(Z2, 1), smoothing=True)
    assert v.passed
    nu = (dirac(Z2, 0) + dirac(Z2, 1)) / 2
    for n in (1, 2, 7):
        assert power(nu, n).allclose(haar(Z2))


def test_smoothing_z4():
    v = power_limit_check(dirac(Z4, 1), smoothing=True)
    assert v.passed and sup_distance(v.diagnostics["limit"], haar(Z4)) < 1e-9


# --- limit measures -------------------------------------------------------

@pytest.mark.parametrize("xi, expected", [
    (1, [0.5, 0.5]), (-1, [0.5, -0.5])])
def test_limit_measure_z2(xi, expected):
    rep = limit_measure(dirac(Z2, 1), xi)
    assert np.allclose(rep.limit.coeffs, expected, atol=1e-12)
    assert convolve(rep.limit, rep.limit).allclose(rep.limit, atol=1e-12)


def test_limit_measure_z3_omega():
    rep = limit_measure(dirac(Z3, 1), OMEGA)
    # oracle: exact period-3 block average of omega^i delta_{i mod 3}
    block = sum(OMEGA ** i * dirac(Z3, i % 3).coeffs for i in range(1, 4)) / 3
    assert np.allclose(rep.limit.coeffs, block, atol=1e-12)
    assert np.allclose(rep.limit.coeffs, np.array([1, OMEGA, OMEGA ** 2]) / 3, atol=1e-12)


def test_limit_measure_rejects_off_circle():
    with pytest.raises(ValueError):
        limit_measure(dirac(Z2, 1), 0.5)


def test_doubling_methods_agree():
    mu = uniform_on_set(Z6, [1, 3])
    a = doubling_trajectory(mu, 1.0, method="smoothed").last
    b = doubling_trajectory(mu, 1.0, method="cesaro").last
    assert sup_distance(a, b) < 1e-7


@settings(max_examples=25)
@given(st.sampled_from(SMALL_GROUPS[:13]), st.data())
def test_limit_laws_property(G, data):
    S = data.draw(st.lists(st.integers(0, G.order - 1), min_size=1, max_size=3, unique=True))
    mu = from_weights(G, data.draw(probability_weights(G.order, support=S)))
    rep = limit_measure(mu, 1.0)
    theta = rep.limit
    assert (convolve(theta, theta) - theta).tv_norm() <= 1e-8
    assert np.max(np.abs(regular_matrix(theta).matrix
                         - ergodic_projection(mu, 1.0).projection)) <= 1e-7
    # consistency with the plain Cesaro trajectory
    traj = weighted_cesaro(mu, n_max=4096)
    assert sup_distance(traj.last, theta) <= 10 * 1.0 / 4096 * G.order


@settings(max_examples=25)
@given(st.sampled_from(ABELIAN_GROUPS), st.data())
def test_fourier_of_limit_is_indicator(G, data):
    S = data.draw(st.lists(st.integers(0, G.order - 1), min_size=1, max_size=3, unique=True))
    mu = from_weights(G, data.draw(probability_weights(G.order, support=S)))
    theta = limit_measure(mu, 1.0).limit
    table = dual_table(mu)
    theta_hat = dual_table(theta).transform
    indicator = np.zeros(G.order)
    indicator[list(table.F_set)] = 1
    assert np.allclose(theta_hat, indicator, atol=1e-8)


def test_twisted_limits_sum_to_identity_on_unitary_part():
    # the twisted limits over the unitary point spectrum of delta_1 on Z_4 sum to delta_e
    mu = dirac(Z4, 1)
    total = sum((limit_measure(mu, 1j ** k).limit for k in range(4)), mu * 0)
    assert total.allclose(dirac(Z4, 0), atol=1e-10)


# --- theorem 2.13 ---------------------------------------------------------

def test_theorem_2_13_alternating():
    v = theorem_2_13_check(dirac(Z2, 1), ALT)
    d = v.diagnostics
    assert v.passed and d["literal_pairing_matches"]
    assert np.allclose(d["empirical_limit"].coeffs, [0.5, -0.5], atol=1e-3)


def test_theorem_2_13_z3_flags_literal_pairing():
    v = theorem_2_13_check(dirac(Z3, 1), CharacterWeight(1 / 3))
    d = v.diagnostics
    expected = np.array([1, OMEGA, OMEGA ** 2]) / 3
    assert v.passed and np.allclose(d["empirical_limit"].coeffs, expected, atol=1e-3)
    assert d["pairing_mismatch_flagged"]
    assert np.allclose(d["literal_pairing_limit"].coeffs, np.conj(expected), atol=1e-9)


def test_theorem_2_13_constant_weight():
    mu = uniform_on_set(Z4, [1, 3])
    v = theorem_2_13_check(mu, ConstantWeight(1))
    d = v.diagnostics
    theta = limit_measure(mu, 1.0).limit
    assert v.passed and d["conjugate_pairing_limit"].allclose(theta, atol=1e-9)
    assert d["literal_pairing_limit"].allclose(theta, atol=1e-9)


# --- uniform convergence --------------------------------------------------

def test_uniform_gap_examples():
    mu = uniform_on_set(Z6, [1, 2])
    traj = weighted_cesaro(mu, n_max=1024)
    f = GroupFunction(Z6, np.arange(6.0))
    gaps = uniform_convergence_gap(traj.values, haar(Z6), f)
    assert gaps[-1] < gaps[0] and gaps[-1] < 1e-2
    assert np.all(uniform_convergence_gap([haar(Z6)] * 3, haar(Z6), f) == 0)
    seq = [dirac(Z2, n % 2) for n in range(1, 9)]
    osc = uniform_convergence_gap(seq, haar(Z2), GroupFunction(Z2, np.array([1.0, 0.0])))
    assert np.allclose(osc, 0.5)
    direct = uniform_convergence_gap(seq[1:], seq[0], GroupFunction(Z2, np.array([1.0, 0.0])))
    assert np.allclose(direct, [1, 0, 1, 0, 1, 0, 1])
    with pytest.raises(GroupMismatch):
        uniform_convergence_gap([haar(Z3)], haar(Z2), GroupFunction(Z2, np.ones(2)))


# --- |<mu^i f, h>| averages ------------------------------------------------

def test_abs_pairing_symmetric_walk_binomial():
    mu = IntMeasure.from_dict({-1: 0.5, 1: 0.5})
    one = IntMeasure.indicator([0])
    n = 512
    traj = abs_pairing_average(mu, one, one, n_max=n, checkpoints=[n])
    exact = sum(comb(i, i // 2) / 2 ** i for i in range(2, n + 1, 2)) / n
    assert traj.values[-1] == pytest.approx(exact, abs=1e-12)
    assert exact <= 3 / np.sqrt(n)
    assert abs_pairing_check(mu).passed


def test_abs_pairing_finite_contrast():
    v = abs_pairing_check(from_weights(Z2, [0.25, 0.75]), n_max=256)
    assert v.diagnostics["final_average"] == pytest.approx(1.0)
    assert not v.passed and v.observational


def test_abs_pairing_orthogonal_function_decays():
    G = symmetric(3)
    mu = uniform_on_set(G, [0, 1, 3])
    f = GroupFunction(G, np.array([1.0, -1, 2, 0, -3, 1]))
    traj = abs_pairing_average(mu, f, f, n_max=64)
    assert traj.values[-1] * 64 < 2 * traj.values[0] * 1  # summable terms: n * average stays bounded


# --- decay on Z -----------------------------------------------------------

def test_z_decay_symmetric_walk():
    mu = IntMeasure.from_dict({-1: 0.5, 1: 0.5})
    p100 = power(mu, 100)
    assert p100.at(0) == pytest.approx(comb(100, 50) / 2 ** 100, abs=1e-15)
    assert abs(p100.at(0) - 0.0796) <= 0.0005
    v = z_decay_report(mu, n_max=16384)
    assert v.passed and v.diagnostics["decay_exponents"]["global_sup"] == pytest.approx(-0.5, abs=0.05)


def test_z_decay_lazy_walk():
    mu = IntMeasure.from_dict({0: 0.5, 1: 0.5})
    p = power(mu, 256)
    assert float(np.max(p.values.real)) == pytest.approx(comb(256, 128) / 2 ** 256, abs=1e-15)
    assert np.max(p.values.real) < 0.05
    v = z_decay_report(mu, n_max=4096)
    assert v.passed and v.diagnostics["l2_decreasing"]


def test_z_decay_point_mass_translates():
    mu = IntMeasure.from_dict({1: 1.0})
    for n in range(6, 12):
        assert np.all(power(mu, n).window(-5, 5) == 0)
    v = z_decay_report(mu, n_max=64, window=(-5, 5))
    assert not v.passed and v.observational  # l2 norm stays 1


def test_z_decay_rejects_finite():
    with pytest.raises(GroupMismatch):
        z_decay_report(dirac(Z2, 1))


@settings(max_examples=15)
@given(st.dictionaries(st.integers(-3, 3), st.floats(0.05, 1), min_size=2, max_size=4),
       st.sampled_from([ConstantWeight(1), ALT, CharacterWeight(0.2), RotationWeight()]))
def test_z_weighted_window_vanishes(masses, w):
    total = sum(masses.values())
    mu = IntMeasure.from_dict({k: v / total for k, v in masses.items()})
    traj = weighted_cesaro(mu, w, n_max=4096)
    assert np.max(np.abs(traj.last.window(-8, 8))) < 0.05
