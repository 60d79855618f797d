"""Complex measures on finite groups and finitely supported measures on the integers.

Two containers share one vocabulary (``convolve``, ``power``, ``involution``,
``tv_norm``, ``support``):

* :class:`FiniteMeasure` holds one coefficient per element of a
  :class:`~wergodic.groups.FiniteGroup`;
* :class:`IntMeasure` holds a dense window of coefficients starting at an
  integer offset. Finitely supported *functions* on the integers use the same
  container.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (EmptySupport, GroupMismatch, IndexOutOfRange, OracleDisagreement,
                     SupportOverflow)
from .groups import (SUBGROUP_ENUMERATION_CAP, CosetWitness, FiniteGroup, Subgroup, ZSubgroup,
                     coset_containment_witness, difference_subgroup, generated_subgroup,
                     z_difference_subgroup, z_subgroup)

SUPPORT_TOL = 1e-12
PROBABILITY_TOL = 1e-12
SUPPORT_CAP = 10**6


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    group: FiniteGroup
    coeffs: np.ndarray

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.group.order,):
            raise IndexOutOfRange(f"expected {self.group.order} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("measure coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    def __repr__(self):
        return f"FiniteMeasure({self.group.label}, {np.round(self.coeffs, 6).tolist()})"

    def __getitem__(self, g):
        return self.coeffs[g]

    def _check(self, other):
        if not isinstance(other, FiniteMeasure) or other.group is not self.group:
            raise GroupMismatch("measures live on different groups")

    def __add__(self, other):
        self._check(other)
        return FiniteMeasure(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return FiniteMeasure(self.group, self.coeffs - other.coeffs)

    def __mul__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return FiniteMeasure(self.group, self.coeffs * c)

    __rmul__ = __mul__

    def __neg__(self):
        return FiniteMeasure(self.group, -self.coeffs)

    def __truediv__(self, c):
        return FiniteMeasure(self.group, self.coeffs / c)

    def tv_norm(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def total_mass(self) -> complex:
        return complex(self.coeffs.sum())

    def support(self, tol: float = SUPPORT_TOL) -> tuple[int, ...]:
        return tuple(int(g) for g in np.flatnonzero(np.abs(self.coeffs) > tol))

    def is_probability(self, tol: float = PROBABILITY_TOL) -> bool:
        c = self.coeffs
        return bool(np.all(np.abs(c.imag) <= tol) and np.all(c.real >= -tol)
                    and abs(c.real.sum() - 1.0) <= tol)

    def convolve(self, other):
        return convolve(self, other)

    def involution(self):
        return involution(self)

    def identity(self):
        return dirac(self.group, self.group.identity)

    def allclose(self, other, atol=1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= atol)


@dataclass(frozen=True, eq=False)
class IntMeasure:
    """A finitely supported complex measure on the integers.

    Stored as ``values[k]`` = mass at ``offset + k``; leading and trailing
    exact zeros are trimmed, so the zero measure has an empty window.
    """

    offset: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).ravel()
        if v.size > SUPPORT_CAP:
            raise SupportOverflow(f"window of {v.size} points exceeds cap {SUPPORT_CAP}")
        if not np.all(np.isfinite(v)):
            raise ValueError("measure coefficients must be finite")
        nz = np.flatnonzero(v != 0)
        offset = int(self.offset)
        if nz.size == 0:
            v = v[:0]
            offset = 0
        else:
            offset += int(nz[0])
            v = v[nz[0]:nz[-1] + 1]
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "offset", offset)

    @classmethod
    def from_dict(cls, masses: dict) -> "IntMeasure":
        masses = {int(k): complex(v) for k, v in masses.items()}
        if not masses:
            return cls(0, [])
        lo, hi = min(masses), max(masses)
        if hi - lo + 1 > SUPPORT_CAP:
            raise SupportOverflow(f"window of {hi - lo + 1} points exceeds cap {SUPPORT_CAP}")
        v = np.zeros(hi - lo + 1, dtype=complex)
        for k, c in masses.items():
            v[k - lo] += c
        return cls(lo, v)

    @classmethod
    def indicator(cls, points: Iterable[int]) -> "IntMeasure":
        return cls.from_dict({int(p): 1.0 for p in points})

    def __repr__(self):
        return f"IntMeasure({dict(zip(self.support, np.round(self.coeffs, 6).tolist()))})"

    @property
    def stop(self) -> int:
        return self.offset + self.values.size

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(self.offset + k) for k in np.flatnonzero(self.values != 0))

    @property
    def coeffs(self) -> np.ndarray:
        return self.values[self.values != 0]

    def at(self, j: int) -> complex:
        k = j - self.offset
        return complex(self.values[k]) if 0 <= k < self.values.size else 0j

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients at ``lo..hi`` inclusive."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        a, b = max(lo, self.offset), min(hi, self.stop - 1)
        if a <= b:
            out[a - lo:b - lo + 1] = self.values[a - self.offset:b - self.offset + 1]
        return out

    def _aligned(self, other):
        if not isinstance(other, IntMeasure):
            raise GroupMismatch("cannot combine a measure on Z with a finite-group measure")
        if self.values.size == 0:
            return other.offset, np.zeros_like(other.values), other.values
        if other.values.size == 0:
            return self.offset, self.values, np.zeros_like(self.values)
        lo = min(self.offset, other.offset)
        hi = max(self.stop, other.stop) - 1
        return lo, self.window(lo, hi), other.window(lo, hi)

    def __add__(self, other):
        lo, a, b = self._aligned(other)
        return IntMeasure(lo, a + b)

    def __sub__(self, other):
        lo, a, b = self._aligned(other)
        return IntMeasure(lo, a - b)

    def __mul__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        return IntMeasure(self.offset, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return IntMeasure(self.offset, -self.values)

    def __truediv__(self, c):
        return IntMeasure(self.offset, self.values / c)

    def tv_norm(self) -> float:
        return float(np.abs(self.values).sum())

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def total_mass(self) -> complex:
        return complex(self.values.sum())

    def support_above(self, tol: float = SUPPORT_TOL) -> tuple[int, ...]:
        return tuple(int(self.offset + k) for k in np.flatnonzero(np.abs(self.values) > tol))

    def is_probability(self, tol: float = PROBABILITY_TOL) -> bool:
        c = self.values
        return bool(c.size and np.all(np.abs(c.imag) <= tol) and np.all(c.real >= -tol)
                    and abs(c.real.sum() - 1.0) <= tol)

    def convolve(self, other):
        return convolve(self, other)

    def involution(self):
        return involution(self)

    def identity(self):
        return IntMeasure(0, [1.0])


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A complex function on a finite group."""

    group: FiniteGroup
    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.shape != (self.group.order,):
            raise IndexOutOfRange(f"expected {self.group.order} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", v)

    def translate(self, g: int) -> "GroupFunction":
        """``f_g(s) = f(g^-1 s)``."""
        G = self.group
        return GroupFunction(G, self.values[G.table[G.inverses[g]]])

    def norm(self, p=2) -> float:
        return float(np.linalg.norm(self.values, ord=p))


# constructors

def dirac(group: FiniteGroup, g) -> FiniteMeasure:
    g = group.element(g)
    c = np.zeros(group.order, dtype=complex)
    c[g] = 1.0
    return FiniteMeasure(group, c)


def haar_on_subgroup(H: Subgroup) -> FiniteMeasure:
    """Normalized counting measure on ``H``, viewed as a measure on the parent group."""
    c = np.zeros(H.parent.order, dtype=complex)
    c[list(H.elements)] = 1.0 / len(H)
    return FiniteMeasure(H.parent, c)


def haar(group: FiniteGroup) -> FiniteMeasure:
    return FiniteMeasure(group, np.full(group.order, 1.0 / group.order, dtype=complex))


def uniform_on_set(group: FiniteGroup, S) -> FiniteMeasure:
    S = group.elements(S)
    if not S:
        raise EmptySupport("uniform measure on an empty set")
    c = np.zeros(group.order, dtype=complex)
    c[list(S)] = 1.0 / len(S)
    return FiniteMeasure(group, c)


def from_weights(group: FiniteGroup, weights) -> FiniteMeasure:
    w = np.asarray(weights)
    if w.ndim == 2 and w.shape[1] == 2 and not np.iscomplexobj(w):
        w = w[:, 0] + 1j * w[:, 1]
    if w.shape != (group.order,):
        raise IndexOutOfRange(f"expected {group.order} weights, got shape {w.shape}")
    return FiniteMeasure(group, w)


def make_measure(group: FiniteGroup | None, spec) -> FiniteMeasure | IntMeasure:
    """Build a measure from a config-style mapping.

    ``{"dirac": g}``, ``{"haar": [generators]}``, ``{"uniform": [elements]}``,
    ``{"weights": [w, ...]}`` (reals or ``[re, im]`` pairs) on a finite group;
    ``{"z": {offset: weight}}`` on the integers (``group`` is ``None``).
    """
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"measure spec must be a single-key mapping, got {spec!r}")
    (kind, arg), = spec.items()
    if kind == "z":
        if not isinstance(arg, dict):
            raise ValueError("z measure must map offsets to weights")
        return IntMeasure.from_dict({int(k): _complex(v) for k, v in arg.items()})
    if group is None:
        raise ValueError(f"measure kind {kind!r} needs a finite group")
    if kind == "dirac":
        return dirac(group, arg)
    if kind == "haar":
        return haar_on_subgroup(generated_subgroup(group, group.elements(arg or [])))
    if kind == "uniform":
        return uniform_on_set(group, arg)
    if kind == "weights":
        return from_weights(group, [_complex(v) for v in arg])
    raise ValueError(f"unknown measure kind {kind!r}")


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex values are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


# algebra

def convolve(mu, nu):
    """``(mu * nu)(g) = sum over ab = g of mu(a) nu(b)``."""
    if isinstance(mu, IntMeasure) and isinstance(nu, IntMeasure):
        if mu.values.size == 0 or nu.values.size == 0:
            return IntMeasure(0, [])
        size = mu.values.size + nu.values.size - 1
        if size > SUPPORT_CAP:
            raise SupportOverflow(f"convolution window {size} exceeds cap {SUPPORT_CAP}")
        out = IntMeasure(mu.offset + nu.offset, np.convolve(mu.values, nu.values))
    elif isinstance(mu, FiniteMeasure) and isinstance(nu, FiniteMeasure):
        mu._check(nu)
        t = mu.group.table
        acc = np.zeros(mu.group.order, dtype=complex)
        for a in np.flatnonzero(mu.coeffs):
            acc[t[a]] += mu.coeffs[a] * nu.coeffs
        out = FiniteMeasure(mu.group, acc)
    else:
        raise GroupMismatch("cannot convolve measures on different groups")
    bound = mu.tv_norm() * nu.tv_norm()
    assert out.tv_norm() <= bound * (1 + 1e-12) + 1e-300
    return out


def power(mu, n: int):
    """``mu^n`` by repeated squaring; ``mu^0`` is the unit mass at the identity."""
    if n < 0:
        raise ValueError("power needs n >= 0")
    result = mu.identity()
    base = mu
    while n:
        if n & 1:
            result = convolve(result, base)
        n >>= 1
        if n:
            base = convolve(base, base)
    return result


class PowerCache:
    """Sequential convolution powers with geometric checkpoints kept for reuse.

    ``cache[n]`` steps forward from the latest power; a request behind the
    cursor restarts from the nearest stored checkpoint.
    """

    def __init__(self, mu):
        self.mu = mu
        self._n = 0
        self._current = mu.identity()
        self._stored = {0: self._current}

    def __getitem__(self, n: int):
        if n < 0:
            raise ValueError("power needs n >= 0")
        if n < self._n:
            start = max(k for k in self._stored if k <= n)
            self._n, self._current = start, self._stored[start]
        while self._n < n:
            self._current = convolve(self._current, self.mu)
            self._n += 1
            if self._n & (self._n - 1) == 0:
                self._stored[self._n] = self._current
        return self._current

    def __iter__(self):
        """Yield ``mu^1, mu^2, ...`` indefinitely."""
        n = 0
        while True:
            n += 1
            yield self[n]


def involution(mu):
    """``mu~(g) = conj(mu(g^-1))``."""
    if isinstance(mu, IntMeasure):
        return IntMeasure(-(mu.stop - 1), np.conj(mu.values[::-1]))
    return FiniteMeasure(mu.group, np.conj(mu.coeffs[mu.group.inverses]))


def tv_norm(mu) -> float:
    return mu.tv_norm()


def support(mu, tol: float = SUPPORT_TOL) -> tuple[int, ...]:
    if tol < 0:
        raise ValueError("support tolerance must be nonnegative")
    if isinstance(mu, IntMeasure):
        return mu.support_above(tol)
    return mu.support(tol)


def sup_distance(a, b, window: tuple[int, int] | None = None) -> float:
    """Sup of coordinate differences; on the integers, over ``window`` (inclusive)."""
    if isinstance(a, IntMeasure) or isinstance(b, IntMeasure):
        if window is None:
            d = a - b
            return float(np.max(np.abs(d.values), initial=0.0))
        lo, hi = window
        return float(np.max(np.abs(_window_of(a, lo, hi) - _window_of(b, lo, hi)), initial=0.0))
    return float(np.max(np.abs(_coeffs_of(a) - _coeffs_of(b)), initial=0.0))


def _window_of(m, lo, hi):
    if isinstance(m, IntMeasure):
        return m.window(lo, hi)
    if m == 0:
        return np.zeros(hi - lo + 1)
    raise GroupMismatch("window comparison needs measures on Z")


def _coeffs_of(m):
    return m.coeffs if isinstance(m, FiniteMeasure) else m


# functions

def act_on_function(mu, f):
    """``(mu * f)(g) = sum_h mu(h) f(h^-1 g)``.

    On the integers ``f`` is an :class:`IntMeasure` and this is ordinary
    sequence convolution.
    """
    if isinstance(mu, IntMeasure):
        if not isinstance(f, IntMeasure):
            raise GroupMismatch("functions on Z are IntMeasure containers")
        out = convolve(mu, f)
        for p in (1, 2, np.inf):
            lhs = np.linalg.norm(out.values, ord=p) if out.values.size else 0.0
            rhs = mu.tv_norm() * (np.linalg.norm(f.values, ord=p) if f.values.size else 0.0)
            assert lhs <= rhs * (1 + 1e-12) + 1e-300
        return out
    if not isinstance(f, GroupFunction) or f.group is not mu.group:
        raise GroupMismatch("function and measure live on different groups")
    G = mu.group
    acc = np.zeros(G.order, dtype=complex)
    for h in np.flatnonzero(mu.coeffs):
        acc += mu.coeffs[h] * f.values[G.table[G.inverses[h]]]
    out = GroupFunction(G, acc)
    for p in (1, 2, np.inf):
        assert out.norm(p) <= mu.tv_norm() * f.norm(p) * (1 + 1e-12) + 1e-300
    return out


def pairing(mu, f) -> complex:
    """``<mu, f> = sum_g f(g) mu(g)`` (bilinear, no conjugation)."""
    if isinstance(mu, IntMeasure):
        if not isinstance(f, IntMeasure):
            raise GroupMismatch("functions on Z are IntMeasure containers")
        if mu.values.size == 0 or f.values.size == 0:
            return 0j
        lo, hi = max(mu.offset, f.offset), min(mu.stop, f.stop) - 1
        if lo > hi:
            return 0j
        return complex(np.dot(mu.window(lo, hi), f.window(lo, hi)))
    values = f.values if isinstance(f, GroupFunction) else np.asarray(f)
    if isinstance(f, GroupFunction) and f.group is not mu.group:
        raise GroupMismatch("function and measure live on different groups")
    return complex(np.dot(mu.coeffs, values))


# classification

@dataclass(frozen=True)
class MeasureClass:
    probability: bool
    adapted: bool
    strictly_aperiodic: bool
    idempotent: bool
    power_bounded: bool
    support: tuple
    generated: Subgroup | ZSubgroup
    difference_generated: Subgroup | ZSubgroup
    witness: CosetWitness | None = None
    oracle_checked: bool = False
    power_certificate: str = ""


def classify(mu, tol: float = SUPPORT_TOL, oracle_cap: int = SUBGROUP_ENUMERATION_CAP) -> MeasureClass:
    """Support-based predicates of a nonzero measure.

    Strict aperiodicity is decided by the difference subgroup and, on finite
    groups up to ``oracle_cap`` elements, re-decided by brute-force coset
    search; a mismatch raises :class:`OracleDisagreement`.
    """
    supp = support(mu, tol)
    if not supp:
        raise EmptySupport("cannot classify the zero measure")
    probability = mu.is_probability()
    idempotent = (convolve(mu, mu) - mu).tv_norm() <= max(tol, 1e-12)
    witness = None
    oracle_checked = False
    if isinstance(mu, IntMeasure):
        generated = z_subgroup(supp)
        diff = z_difference_subgroup(supp)
        adapted = generated.is_whole
        strictly = diff.is_whole
    else:
        G = mu.group
        generated = generated_subgroup(G, supp)
        diff = difference_subgroup(G, supp)
        adapted = generated.is_whole
        strictly = diff.is_whole
        if G.order <= oracle_cap:
            witness = coset_containment_witness(G, supp, cap=oracle_cap)
            oracle_checked = True
            if (witness is None) != strictly:
                raise OracleDisagreement(
                    f"difference criterion says strictly_aperiodic={strictly} but coset "
                    f"search found witness={witness}")
    if strictly:
        assert adapted, "strict aperiodicity must imply adaptedness"
    if probability:
        bounded, cert = True, "tv_norm(mu^n) = 1 for every n"
    elif isinstance(mu, IntMeasure):
        bounded, cert = _int_power_bounded(mu)
    else:
        from .spectral import power_boundedness
        pb = power_boundedness(mu)
        bounded, cert = pb.bounded, pb.reason
    return MeasureClass(probability=probability, adapted=adapted, strictly_aperiodic=strictly,
                        idempotent=bool(idempotent), power_bounded=bounded, support=supp,
                        generated=generated, difference_generated=diff, witness=witness,
                        oracle_checked=oracle_checked, power_certificate=cert)


def _int_power_bounded(mu: IntMeasure):
    if mu.tv_norm() <= 1 + PROBABILITY_TOL:
        return True, "tv_norm <= 1 (contraction)"
    t = np.linspace(0, 1, 4097)
    k = np.arange(mu.offset, mu.stop)
    fourier = np.exp(2j * np.pi * np.outer(t, k)) @ mu.values
    if np.max(np.abs(fourier)) > 1 + 1e-9:
        return False, "Fourier transform exceeds modulus 1 on the circle"
    return False, "undetermined: tv_norm > 1 with Fourier modulus <= 1"
