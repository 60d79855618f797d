"""Finite groups as Cayley tables, subgroup closure, and subgroups of the integers.

Elements are dense indices ``0..N-1``. Element ordering per family:

* cyclic ``n``: residues ``0..n-1``;
* dihedral ``n``: affine maps ``x -> k + (-1)**f * x`` of ``Z_n``, index ``f*n + k``;
* symmetric ``n``: permutations in lexicographic one-line notation, composed
  as ``(s*t)(x) = s(t(x))``;
* direct product: lexicographic pairs, index ``i*|H| + j``.
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySupport, IndexOutOfRange, SizeLimit, TableInvalid

DEFAULT_MAX_ORDER = 5040
SUBGROUP_ENUMERATION_CAP = 120
FULL_ASSOCIATIVITY_CHECK = 64


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A validated finite group.

    ``table[a, b]`` is the index of the product ``a*b``. ``labels`` are
    display names for the elements (residues, permutations, pairs...);
    ``factors`` holds the cyclic orders when the group was built as a product
    of cyclic groups, which is what the character table needs.
    """

    table: np.ndarray
    identity: int
    inverses: np.ndarray
    label: str = "G"
    labels: tuple = ()
    factors: tuple | None = None

    @property
    def order(self) -> int:
        return int(self.table.shape[0])

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.label}, order={self.order})"

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def element(self, x) -> int:
        """Resolve an index or a display label to an element index."""
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            x = int(x)
            if not 0 <= x < self.order:
                raise IndexOutOfRange(f"element {x} outside 0..{self.order - 1}")
            return x
        key = _freeze(x)
        try:
            return self.labels.index(key)
        except ValueError:
            raise IndexOutOfRange(f"no element labelled {x!r} in {self.label}") from None

    def elements(self, xs: Iterable) -> tuple[int, ...]:
        return tuple(sorted({self.element(x) for x in xs}))


def _freeze(x):
    if isinstance(x, (list, tuple)):
        return tuple(_freeze(v) for v in x)
    return x


def validate_table(table, max_order: int = DEFAULT_MAX_ORDER):
    """Check group axioms on a Cayley table; return ``(table, identity, inverses)``."""
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise TableInvalid(f"Cayley table must be a nonempty square array, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(np.equal(np.mod(t, 1), 0)):
            raise TableInvalid("Cayley table entries must be integers")
    t = t.astype(np.int64)
    n = t.shape[0]
    if n > max_order:
        raise SizeLimit(f"group order {n} exceeds cap {max_order}")
    if t.min() < 0 or t.max() >= n:
        raise TableInvalid("Cayley table entries must lie in 0..N-1")
    ref = np.arange(n)
    if not (np.all(np.sort(t, axis=1) == ref) and np.all(np.sort(t, axis=0) == ref[:, None])):
        raise TableInvalid("Cayley table is not a Latin square")
    ids = [e for e in range(n) if np.array_equal(t[e], ref) and np.array_equal(t[:, e], ref)]
    if not ids:
        raise TableInvalid("Cayley table has no two-sided identity")
    e = ids[0]
    if n <= FULL_ASSOCIATIVITY_CHECK:
        lhs = t[t]  # lhs[a, b, c] = (a*b)*c
        rhs = t[ref[:, None, None], t[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise TableInvalid("Cayley table is not associative")
    else:
        rng = np.random.default_rng(n)
        a, b, c = rng.integers(0, n, size=(3, 20000))
        if not np.array_equal(t[t[a, b], c], t[a, t[b, c]]):
            raise TableInvalid("Cayley table is not associative (sampled)")
    inverses = np.argmax(t == e, axis=1)
    if not np.all(t[inverses, ref] == e):
        raise TableInvalid("left and right inverses differ")
    return t, e, inverses


def from_table(table, label: str = "table", labels: Sequence | None = None,
               factors: tuple | None = None, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    t, e, inverses = validate_table(table, max_order=max_order)
    t.setflags(write=False)
    inverses.setflags(write=False)
    n = t.shape[0]
    labels = tuple(_freeze(x) for x in labels) if labels is not None else tuple(range(n))
    if len(labels) != n:
        raise TableInvalid("labels must have one entry per element")
    return FiniteGroup(table=t, identity=int(e), inverses=inverses, label=label,
                       labels=labels, factors=factors)


def cyclic(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise ValueError("cyclic group needs n >= 1")
    if n > max_order:
        raise SizeLimit(f"group order {n} exceeds cap {max_order}")
    r = np.arange(n)
    return from_table((r[:, None] + r[None, :]) % n, label=f"Z{n}", factors=(n,),
                      max_order=max_order)


def dihedral(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    if n < 1:
        raise ValueError("dihedral group needs n >= 1")
    if 2 * n > max_order:
        raise SizeLimit(f"group order {2 * n} exceeds cap {max_order}")
    elems = [(f, k) for f in (0, 1) for k in range(n)]
    table = np.empty((2 * n, 2 * n), dtype=np.int64)
    for a, (f1, k1) in enumerate(elems):
        for b, (f2, k2) in enumerate(elems):
            k = (k1 + (-1) ** f1 * k2) % n
            table[a, b] = ((f1 + f2) % 2) * n + k
    labels = [("s" if f else "r", k) for f, k in elems]
    return from_table(table, label=f"D{n}", labels=labels, max_order=max_order)


def symmetric(n: int, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if n < 1:
        raise ValueError("symmetric group needs n >= 1")
    if n > 5:
        raise SizeLimit("symmetric groups are limited to n <= 5")
    perms = list(itertools.permutations(range(n)))
    if len(perms) > max_order:
        raise SizeLimit(f"group order {len(perms)} exceeds cap {max_order}")
    index = {p: i for i, p in enumerate(perms)}
    table = np.array([[index[tuple(s[t[x]] for x in range(n))] for t in perms] for s in perms],
                     dtype=np.int64)
    return from_table(table, label=f"S{n}", labels=perms, max_order=max_order)


def direct_product(*groups: FiniteGroup, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if not groups:
        raise ValueError("direct product needs at least one factor")
    if math.prod(g.order for g in groups) > max_order:
        raise SizeLimit(f"group order {math.prod(g.order for g in groups)} exceeds cap {max_order}")
    result = groups[0]
    for other in groups[1:]:
        result = _pair_product(result, other, max_order)
    return result


def _pair_product(g: FiniteGroup, h: FiniteGroup, max_order: int) -> FiniteGroup:
    ng, nh = g.order, h.order
    i = np.arange(ng * nh)
    a, b = i // nh, i % nh
    table = g.table[a[:, None], a[None, :]] * nh + h.table[b[:, None], b[None, :]]
    labels = [(x, y) for x in g.labels for y in h.labels]
    factors = g.factors + h.factors if g.factors is not None and h.factors is not None else None
    return from_table(table, label=f"{g.label}x{h.label}", labels=labels, factors=factors,
                      max_order=max_order)


def quaternion() -> FiniteGroup:
    """The quaternion group Q8, elements ordered 1, -1, i, -i, j, -j, k, -k."""
    # unit products: (unit_a, unit_b) -> (sign, unit) with units 0=1, 1=i, 2=j, 3=k
    prod = {(0, u): (1, u) for u in range(4)}
    prod.update({(u, 0): (1, u) for u in range(4)})
    prod.update({(u, u): (-1, 0) for u in range(1, 4)})
    for a, b, c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        prod[(a, b)] = (1, c)
        prod[(b, a)] = (-1, c)
    elems = [(s, u) for u in range(4) for s in (1, -1)]
    index = {x: i for i, x in enumerate(elems)}
    table = np.empty((8, 8), dtype=np.int64)
    for x, (sa, ua) in enumerate(elems):
        for y, (sb, ub) in enumerate(elems):
            s, u = prod[(ua, ub)]
            table[x, y] = index[(sa * sb * s, u)]
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    return from_table(table, label="Q8", labels=names)


def build_group(spec, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    """Build a group from a config-style spec.

    Accepted forms: ``{"cyclic": n}``, ``{"dihedral": n}``, ``{"symmetric": n}``,
    ``{"product": [spec, ...]}``, ``{"table": [[...], ...]}``, ``{"quaternion": true}``
    or an existing :class:`FiniteGroup`.
    """
    if isinstance(spec, FiniteGroup):
        return spec
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"group spec must be a single-key mapping, got {spec!r}")
    (kind, arg), = spec.items()
    if kind == "cyclic":
        return cyclic(int(arg), max_order=max_order)
    if kind == "dihedral":
        return dihedral(int(arg), max_order=max_order)
    if kind == "symmetric":
        return symmetric(int(arg), max_order=max_order)
    if kind == "product":
        parts = [build_group(s, max_order=max_order) for s in arg]
        return direct_product(*parts, max_order=max_order)
    if kind == "table":
        return from_table(arg, max_order=max_order)
    if kind == "quaternion":
        return quaternion()
    raise ValueError(f"unknown group family {kind!r}")


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: tuple

    def __post_init__(self):
        assert self.parent.identity in self.elements
        assert self.parent.order % len(self.elements) == 0, "Lagrange violated"

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    def __iter__(self):
        return iter(self.elements)

    @property
    def _set(self):
        return frozenset(self.elements)

    @property
    def is_proper(self) -> bool:
        return len(self.elements) < self.parent.order

    @property
    def is_whole(self) -> bool:
        return len(self.elements) == self.parent.order

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        return m


@dataclass(frozen=True)
class CosetWitness:
    representative: int
    subgroup: Subgroup

    def coset(self) -> tuple[int, ...]:
        t = self.subgroup.parent.table
        return tuple(sorted(int(t[self.representative, h]) for h in self.subgroup.elements))


@dataclass(frozen=True)
class ZSubgroup:
    """The subgroup ``d*Z`` of the integers; ``d == 0`` is the trivial subgroup."""

    d: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be nonnegative")

    @property
    def is_compact(self) -> bool:
        return self.d == 0

    @property
    def is_whole(self) -> bool:
        return self.d == 1

    def __contains__(self, x) -> bool:
        return x == 0 if self.d == 0 else x % self.d == 0


def _closure(group: FiniteGroup, gens) -> np.ndarray:
    members = np.zeros(group.order, dtype=bool)
    members[group.identity] = True
    gens = np.asarray(sorted(set(gens)), dtype=np.int64)
    if gens.size == 0:
        return members
    frontier = np.array([group.identity])
    while frontier.size:
        cand = np.unique(group.table[np.ix_(frontier, gens)].ravel())
        cand = cand[~members[cand]]
        members[cand] = True
        frontier = cand
    return members


def _check_subset(group: FiniteGroup, S) -> tuple[int, ...]:
    out = set()
    for s in S:
        s = int(s)
        if not 0 <= s < group.order:
            raise IndexOutOfRange(f"element {s} outside 0..{group.order - 1}")
        out.add(s)
    return tuple(sorted(out))


def generated_subgroup(group: FiniteGroup, S: Iterable[int]) -> Subgroup:
    """Least subgroup containing ``S`` (closure under products; finite so inverses come free)."""
    S = _check_subset(group, S)
    members = _closure(group, S)
    return Subgroup(group, tuple(int(x) for x in np.flatnonzero(members)))


def difference_subgroup(group: FiniteGroup, S: Iterable[int]) -> Subgroup:
    """The subgroup generated by ``{s^-1 t : s, t in S}``."""
    S = _check_subset(group, S)
    if not S:
        raise EmptySupport("difference subgroup of an empty set")
    idx = np.asarray(S)
    diffs = np.unique(group.table[np.ix_(group.inverses[idx], idx)].ravel())
    result = generated_subgroup(group, diffs)
    s0 = group.inverses[S[0]]
    based = generated_subgroup(group, group.table[s0, idx])
    assert based == result, "difference subgroup depends on the base point"
    return result


_SUBGROUP_CACHE: "weakref.WeakKeyDictionary[FiniteGroup, tuple]" = weakref.WeakKeyDictionary()


def all_subgroups(group: FiniteGroup, cap: int = SUBGROUP_ENUMERATION_CAP) -> tuple[Subgroup, ...]:
    """Every subgroup, sorted by size then by element tuple. Memoized per group."""
    if group.order > cap:
        raise SizeLimit(f"subgroup enumeration capped at order {cap}, group has {group.order}")
    cached = _SUBGROUP_CACHE.get(group)
    if cached is not None:
        return cached
    found: dict[bytes, tuple] = {}
    queue = []

    def add(mask, gens):
        key = np.packbits(mask).tobytes()
        if key not in found:
            found[key] = (mask, gens)
            queue.append((mask, gens))

    add(_closure(group, ()), ())
    for g in range(group.order):
        add(_closure(group, (g,)), (g,))
    while queue:
        mask, gens = queue.pop()
        for g in np.flatnonzero(~mask):
            new_gens = gens + (int(g),)
            add(_closure(group, new_gens), new_gens)
    subs = [Subgroup(group, tuple(int(x) for x in np.flatnonzero(m))) for m, _ in found.values()]
    subs.sort(key=lambda h: (len(h), h.elements))
    result = tuple(subs)
    _SUBGROUP_CACHE[group] = result
    return result


def coset_containment_witness(group: FiniteGroup, S: Iterable[int],
                              cap: int = SUBGROUP_ENUMERATION_CAP) -> CosetWitness | None:
    """Brute-force search for a proper subgroup ``H`` and ``g`` with ``S`` inside ``gH``.

    Subgroups are tried by increasing size; the representative returned is the
    smallest index in the containing coset.
    """
    S = _check_subset(group, S)
    if not S:
        raise EmptySupport("coset witness of an empty set")
    idx = np.asarray(S)
    shifted = group.table[group.inverses[S[0]], idx]
    for H in all_subgroups(group, cap=cap):
        if not H.is_proper:
            continue
        if H.mask()[shifted].all():
            coset = group.table[S[0], list(H.elements)]
            return CosetWitness(int(coset.min()), H)
    return None


def z_subgroup(S: Iterable[int]) -> ZSubgroup:
    S = [int(s) for s in S]
    if not S:
        raise EmptySupport("subgroup of Z generated by an empty set")
    return ZSubgroup(math.gcd(*(abs(s) for s in S)))


def z_difference_subgroup(S: Iterable[int]) -> ZSubgroup:
    S = sorted({int(s) for s in S})
    if not S:
        raise EmptySupport("difference subgroup of an empty set")
    return z_subgroup([s - S[0] for s in S])
