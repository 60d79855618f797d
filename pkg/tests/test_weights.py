import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wergodic.errors import CustomOutOfRange, Inconclusive
from wergodic.weights import (CharacterWeight, ConstantWeight, CustomWeight, PeriodicWeight,
                              RotationWeight, default_samples, goodness_probe, make_weight,
                              mean_weight, weight_at, weight_limit)

N16 = 2 ** 16


def numerical_cesaro(w, xi, n=N16):
    """Direct (1/n) sum a_i xi^i with xi^i from reduced angles (oracle)."""
    k = np.arange(1, n + 1)
    t = cmath.phase(xi) / (2 * np.pi)
    return complex(np.sum(w.values(k) * np.exp(2j * np.pi * ((k * t) % 1.0))) / n)


def geometric_bound(z, n):
    """Sup over n of |(1/n) sum_{i<=n} z^i| for |z| = 1, z != 1."""
    return 2 / (n * abs(1 - z))


def components(w):
    """(amplitude, frequency) pairs with a_n = sum amplitude * freq^n."""
    if isinstance(w, ConstantWeight):
        return [(w.c, 1.0)]
    if isinstance(w, CharacterWeight):
        return [(1.0, w.xi0)]
    if isinstance(w, RotationWeight):
        return [(amp, c.xi0) for amp, c in w.characters()]
    p = len(w.pattern)
    roots = [cmath.exp(2j * np.pi * j / p) for j in range(p)]
    # discrete Fourier coefficients of the pattern, indexed from n = 1
    return [(sum(a * r ** -(m + 1) for m, a in enumerate(w.pattern)) / p, r) for r in roots]


BUILTINS = [ConstantWeight(1.0), ConstantWeight(0.5 - 0.5j), CharacterWeight(1 / 3),
            CharacterWeight(0.5), CharacterWeight(0.1234567), PeriodicWeight((1, 0)),
            PeriodicWeight((1, 2j, -1)), RotationWeight(),
            RotationWeight(coeffs={1: .5, -1: .5, 2: .25}, omega=0.1)]


def test_weight_at_examples():
    assert weight_at(CharacterWeight(0.25), 2) == pytest.approx(-1)
    assert weight_at(PeriodicWeight((1, 0)), 3) == 1
    theta = RotationWeight().theta
    assert weight_at(RotationWeight(), 1) == pytest.approx(cmath.exp(2j * np.pi * theta))
    with pytest.raises(ValueError):
        weight_at(ConstantWeight(1), 0)
    with pytest.raises(CustomOutOfRange):
        weight_at(CustomWeight(np.ones(4)), 5)


def test_limit_examples():
    assert weight_limit(ConstantWeight(1), 1).value == 1
    assert weight_limit(ConstantWeight(1), -1).value == 0
    xi0 = cmath.exp(2j * np.pi * 0.3)
    w = CharacterWeight(0.3)
    assert weight_limit(w, 1 / xi0).value == 1
    assert weight_limit(w, xi0).value == 0
    p = PeriodicWeight((1, 0))
    assert weight_limit(p, 1).value == pytest.approx(0.5)
    assert weight_limit(p, -1).value == pytest.approx(-0.5)
    assert weight_limit(p, 1j).value == 0
    assert weight_limit(p, 1).mode == "exact"
    with pytest.raises(ValueError):
        weight_limit(p, 2)


def test_mean_weight_examples():
    assert mean_weight(ConstantWeight(2 + 1j)) == 2 + 1j
    assert mean_weight(CharacterWeight(0.5)) == 0
    assert mean_weight(PeriodicWeight((1, 0))) == pytest.approx(0.5)


def test_goodness_probe():
    assert goodness_probe(CharacterWeight(0.2)).verdict == "certified"
    assert goodness_probe(RotationWeight()).verdict == "certified"
    rng = np.random.default_rng(7)
    table = rng.choice([-1.0, 1.0], size=2 ** 12)
    rep = goodness_probe(CustomWeight(table))
    assert rep.verdict == "inconclusive" and len(rep.residuals) == rep.samples


def test_custom_weight_numerical_limit():
    n = np.arange(1, 2 ** 20 + 1)
    w = CustomWeight((-1.0) ** n)
    lim = weight_limit(w, -1)
    assert lim.mode == "numerical" and lim.value == pytest.approx(1, abs=1e-6)
    assert not w.certified
    with pytest.raises(Inconclusive):
        CustomWeight(np.random.default_rng(1).choice([-1.0, 1.0], 2 ** 12)).limit(1.0, tol=1e-6)
    with pytest.raises(ValueError):
        CustomWeight(np.ones(3) * 2, declared_bound=1)


@pytest.mark.parametrize("w", BUILTINS, ids=repr)
def test_limits_bounded_by_weight_bound(w):
    for xi in default_samples():
        assert abs(weight_limit(w, xi).value) <= w.bound + 1e-12


@pytest.mark.parametrize("w", [w for w in BUILTINS if not isinstance(w, RotationWeight)
                               and not (isinstance(w, CharacterWeight) and w.turns == 0.1234567)],
                         ids=repr)
def test_cesaro_at_2_16_rational_frequencies(w):
    """Literal 10 * bound / 2^16 agreement at the roots of unity of order <= 12."""
    for xi in default_samples(n_random=0):
        assert abs(numerical_cesaro(w, xi) - weight_limit(w, xi).value) <= 10 * w.bound / N16


@pytest.mark.parametrize("w", BUILTINS, ids=repr)
def test_cesaro_at_2_16_geometric_bound(w):
    """All sample points: each frequency component contributes its geometric-sum remainder."""
    for xi in default_samples():
        allowance = 1e-9
        for amp, freq in components(w):
            z = freq * xi
            if abs(z - 1) > 1e-10:
                allowance += abs(amp) * geometric_bound(z, N16)
        assert abs(numerical_cesaro(w, xi) - weight_limit(w, xi).value) <= allowance


@pytest.mark.parametrize("w", BUILTINS, ids=repr)
def test_finitely_many_nonzero_limits(w):
    nonzero = sum(abs(weight_limit(w, xi).value) > 0 for xi in default_samples())
    assert nonzero <= len(components(w))


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1), st.data())
def test_rotation_is_linear_combination_of_characters(theta, omega, data):
    coeffs = {k: complex(data.draw(st.floats(-1, 1)), data.draw(st.floats(-1, 1)))
              for k in data.draw(st.sets(st.integers(-3, 3), min_size=1, max_size=4))}
    w = RotationWeight(theta, coeffs, omega)
    n = np.arange(1, 50)
    combo = sum(amp * c.values(n) for amp, c in w.characters())
    assert np.allclose(w.values(n), combo, atol=1e-12)
    for xi in default_samples(n_random=4):
        expected = sum(amp * weight_limit(c, xi).value for amp, c in w.characters())
        assert weight_limit(w, xi).value == pytest.approx(expected)


@given(st.lists(st.complex_numbers(max_magnitude=3), min_size=1, max_size=6), st.data())
def test_periodic_values_bounded(pattern, data):
    w = PeriodicWeight(tuple(pattern))
    n = np.arange(1, 40)
    assert np.all(np.abs(w.values(n)) <= w.bound + 1e-12)
    p = len(pattern)
    j = data.draw(st.integers(0, p - 1))
    xi = cmath.exp(2j * np.pi * j / p)
    block = np.arange(1, 100 * p + 1)
    direct = np.sum(w.values(block) * xi ** block) / block.size
    assert weight_limit(w, xi).value == pytest.approx(direct, abs=1e-9)


def test_make_weight_specs():
    assert make_weight(None) == ConstantWeight(1.0)
    assert make_weight({"constant": [1, 2]}).c == 1 + 2j
    assert make_weight({"character": 0.25}).turns == 0.25
    assert make_weight({"periodic": [[1, 0], 0]}).pattern == (1, 0)
    r = make_weight({"rotation": {"theta": 0.3, "coeffs": {1: 1, -1: [0, 1]}}})
    assert r.coeffs == {1: 1, -1: 1j}
    assert make_weight({"custom": {"table": [1, -1], "bound": 2}}).bound == 2
    for bad in ({"periodic": 3}, {"rotation": {}}, {"spline": 1}, [1, 2],
                {"constant": [1, 2, 3]}, {"constant": "x"}):
        with pytest.raises(ValueError):
            make_weight(bad)
