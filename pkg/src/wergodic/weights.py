"""Bounded weight sequences and their Cesaro circle limits.

``a(xi) = lim (1/n) sum_{i=1..n} a_i xi^i``. Built-in kinds have closed-form
limits for every ``xi``; custom tables only ever get numerical estimates.

Rotation weights ``a_n = sum_k c_k exp(2 pi i k (omega + n theta))`` take
``theta`` as a double, which cannot tell rational from irrational. Their
limits come from the expansion into character weights, which is valid for
every ``theta``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CustomOutOfRange, Inconclusive

MATCH_TOL = 1e-10


def _turns(t: float) -> complex:
    return cmath.exp(2j * np.pi * t)


class WeightSequence:
    """Base class. ``a_n`` is defined for ``n >= 1``."""

    kind = "abstract"
    certified = True

    @property
    def bound(self) -> float:
        raise NotImplementedError

    def values(self, n) -> np.ndarray:
        """``a_n`` for an integer array ``n``."""
        raise NotImplementedError

    def __call__(self, n: int) -> complex:
        if n < 1:
            raise ValueError("weights are indexed from n = 1")
        return complex(self.values(np.array([n]))[0])

    def limit(self, xi: complex) -> "WeightLimit":
        raise NotImplementedError


@dataclass(frozen=True)
class WeightLimit:
    xi: complex
    value: complex
    mode: str  # "exact" or "numerical"
    derivation: str = ""
    residual: float = 0.0


@dataclass(frozen=True)
class ConstantWeight(WeightSequence):
    c: complex = 1.0
    kind = "constant"

    @property
    def bound(self):
        return abs(self.c)

    def values(self, n):
        return np.full(np.shape(n), complex(self.c))

    def limit(self, xi):
        hit = abs(xi - 1) <= MATCH_TOL
        return WeightLimit(xi, complex(self.c) if hit else 0j, "exact",
                           "constant: c at xi = 1, geometric Cesaro sum vanishes elsewhere")


@dataclass(frozen=True)
class CharacterWeight(WeightSequence):
    """``a_n = xi0^n`` with ``xi0 = exp(2 pi i turns)``."""

    turns: float = 0.0
    kind = "character"

    @property
    def xi0(self) -> complex:
        return _turns(self.turns)

    @property
    def bound(self):
        return 1.0

    def values(self, n):
        return np.exp(2j * np.pi * ((self.turns * np.asarray(n)) % 1.0))

    def limit(self, xi):
        hit = abs(xi * self.xi0 - 1) <= MATCH_TOL
        return WeightLimit(xi, 1 + 0j if hit else 0j, "exact",
                           "character: 1 when xi * xi0 = 1, else 0")


@dataclass(frozen=True)
class PeriodicWeight(WeightSequence):
    """``a_n = pattern[(n - 1) % p]``."""

    pattern: tuple = (1.0,)
    kind = "periodic"

    def __post_init__(self):
        if len(self.pattern) == 0:
            raise ValueError("periodic weight needs a nonempty pattern")
        object.__setattr__(self, "pattern", tuple(complex(a) for a in self.pattern))

    @property
    def bound(self):
        return max(abs(a) for a in self.pattern)

    def values(self, n):
        pat = np.array(self.pattern)
        return pat[(np.asarray(n) - 1) % len(pat)]

    def limit(self, xi):
        p = len(self.pattern)
        if abs(xi ** p - 1) > MATCH_TOL:
            return WeightLimit(xi, 0j, "exact", "periodic: xi^p != 1, block sums cancel")
        value = sum(a * xi ** j for j, a in enumerate(self.pattern, start=1)) / p
        return WeightLimit(xi, complex(value), "exact", "periodic: one-period block average")


@dataclass(frozen=True)
class RotationWeight(WeightSequence):
    """``a_n = sum_k c_k exp(2 pi i k (omega + n theta))`` for a finite set of ``k``."""

    theta: float = (5 ** 0.5 - 1) / 2
    coeffs: dict = field(default_factory=lambda: {1: 1.0})
    omega: float = 0.0
    kind = "rotation"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", {int(k): complex(c) for k, c in self.coeffs.items()})

    def __hash__(self):
        return hash((self.theta, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0])),
                     self.omega))

    @property
    def bound(self):
        return sum(abs(c) for c in self.coeffs.values())

    def characters(self) -> list[tuple[complex, CharacterWeight]]:
        """The expansion ``a_n = sum amplitude * xi0^n``."""
        return [(c * _turns(k * self.omega), CharacterWeight((k * self.theta) % 1.0))
                for k, c in sorted(self.coeffs.items())]

    def values(self, n):
        n = np.asarray(n)
        out = np.zeros(n.shape, dtype=complex)
        for k, c in self.coeffs.items():
            out += c * np.exp(2j * np.pi * ((k * (self.omega + n * self.theta)) % 1.0))
        return out

    def limit(self, xi):
        value = sum(amp * w.limit(xi).value for amp, w in self.characters())
        return WeightLimit(xi, complex(value), "exact",
                           "rotation: sum of character-weight limits")


@dataclass(frozen=True, eq=False)
class CustomWeight(WeightSequence):
    """A finite table ``a_1..a_L`` with a declared bound. Never certified."""

    table: np.ndarray = field(default_factory=lambda: np.ones(1))
    declared_bound: float | None = None
    kind = "custom"
    certified = False

    def __post_init__(self):
        t = np.array(self.table, dtype=complex).ravel()
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        b = float(np.abs(t).max()) if self.declared_bound is None else float(self.declared_bound)
        if np.abs(t).max() > b + 1e-12:
            raise ValueError("table entries exceed the declared bound")
        object.__setattr__(self, "declared_bound", b)

    @property
    def bound(self):
        return self.declared_bound

    def values(self, n):
        n = np.asarray(n)
        if n.size and (n.min() < 1 or n.max() > self.table.size):
            raise CustomOutOfRange(f"custom weight defined for n in 1..{self.table.size}")
        return self.table[n - 1]

    def cesaro(self, xi: complex, checkpoints: Sequence[int]) -> np.ndarray:
        n = np.arange(1, self.table.size + 1)
        partial = np.cumsum(self.table * xi ** n) / n
        return partial[np.asarray(checkpoints) - 1]

    def limit(self, xi, tol: float = 1e-4):
        checkpoints = custom_checkpoints(self.table.size)
        if len(checkpoints) < 2:
            raise Inconclusive("table too short for a Cesaro estimate", residual=np.inf)
        avgs = self.cesaro(xi, checkpoints)
        residual = float(np.max(np.abs(np.diff(avgs[-3:]))))
        if residual > tol:
            raise Inconclusive(f"Cesaro averages still moving by {residual:.3g}", residual=residual)
        return WeightLimit(xi, complex(avgs[-1]), "numerical",
                           f"Cesaro at n = {checkpoints[-1]}", residual)


def custom_checkpoints(length: int) -> list[int]:
    pts = [1 << k for k in range(10, 21) if (1 << k) <= length]
    if not pts and length >= 1:
        pts = [k for k in (length // 4, length // 2, length) if k >= 1]
    return pts


def weight_at(w: WeightSequence, n: int) -> complex:
    return w(n)


def weight_limit(w: WeightSequence, xi: complex, tol: float = 1e-4) -> WeightLimit:
    if abs(abs(xi) - 1) > 1e-9:
        raise ValueError("xi must lie on the unit circle")
    if isinstance(w, CustomWeight):
        return w.limit(xi, tol=tol)
    return w.limit(xi)


def mean_weight(w: WeightSequence) -> complex:
    return weight_limit(w, 1.0).value


def default_samples(seed: int = 0, max_order: int = 12, n_random: int = 16) -> np.ndarray:
    """All roots of unity of order at most ``max_order`` plus pseudorandom circle points."""
    fracs = sorted({(j / q) % 1.0 for q in range(1, max_order + 1) for j in range(q)})
    rng = np.random.default_rng(seed)
    pts = [_turns(t) for t in fracs] + [_turns(t) for t in rng.random(n_random)]
    return np.array(pts)


@dataclass(frozen=True)
class GoodnessReport:
    verdict: str  # certified | numerically_consistent | inconclusive
    residuals: tuple = ()
    samples: int = 0


def goodness_probe(w: WeightSequence, xi_samples=None, tol: float = 1e-4) -> GoodnessReport:
    """Certify built-in kinds; probe custom tables numerically at each sample."""
    if xi_samples is None:
        xi_samples = default_samples()
    xi_samples = list(xi_samples)
    if w.certified:
        return GoodnessReport("certified", (), len(xi_samples))
    residuals = []
    verdict = "numerically_consistent"
    for xi in xi_samples:
        try:
            residuals.append(weight_limit(w, xi, tol=tol).residual)
        except Inconclusive as exc:
            residuals.append(exc.residual)
            verdict = "inconclusive"
    return GoodnessReport(verdict, tuple(residuals), len(xi_samples))


def make_weight(spec) -> WeightSequence:
    """Build a weight from a config-style mapping.

    ``{"constant": [re, im]}``, ``{"character": turns}``, ``{"periodic": [[re, im], ...]}``,
    ``{"rotation": {"theta": t, "omega": w, "coeffs": {k: [re, im]}}}``,
    ``{"custom": [...]}`` or ``{"custom": {"table": [...], "bound": b}}``.
    """
    if spec is None:
        return ConstantWeight(1.0)
    if isinstance(spec, WeightSequence):
        return spec
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"weight spec must be a single-key mapping, got {spec!r}")
    (kind, arg), = spec.items()
    if kind == "constant":
        return ConstantWeight(_complex(arg))
    if kind == "character":
        return CharacterWeight(float(arg))
    if kind == "periodic":
        if not isinstance(arg, (list, tuple)) or not arg:
            raise ValueError("periodic: expected a nonempty list of values")
        return PeriodicWeight(tuple(_complex(a) for a in arg))
    if kind == "rotation":
        if not isinstance(arg, dict) or "theta" not in arg:
            raise ValueError("rotation: expected a mapping with theta")
        coeffs = {int(k): _complex(v) for k, v in (arg.get("coeffs") or {1: 1.0}).items()}
        return RotationWeight(float(arg["theta"]), coeffs, float(arg.get("omega", 0.0)))
    if kind == "custom":
        if isinstance(arg, dict):
            return CustomWeight(np.array([_complex(v) for v in arg["table"]]), arg.get("bound"))
        return CustomWeight(np.array([_complex(v) for v in arg]))
    raise ValueError(f"unknown weight kind {kind!r}")


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex values are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float, complex)) and not isinstance(v, bool):
        return complex(v)
    raise ValueError(f"expected a number or [re, im] pair, got {v!r}")
