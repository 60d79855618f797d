"""Convolution operators as explicit matrices, their spectra and projections.

The left convolution operator of ``mu`` acts on functions by
``(mu * f)(g) = sum_h mu(h) f(h^-1 g)``. As a matrix, ``M[g, s] = mu(g s^-1)``.
The same matrix represents the operator on every ``l^p`` space of a finite
group, so a single spectrum serves all of them.

Conjugation convention: a character ``chi`` is an eigenvector of ``M`` with
eigenvalue ``mu_hat(conj chi)``, and the Cesaro limit of
``(1/n) sum (xi M)^i`` is the spectral projection of ``M`` at ``conj(xi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles
from scipy.optimize import linear_sum_assignment

from .errors import (CesaroNotConverged, EigensolverFailure, NotAbelian, NotPowerBounded,
                     OracleDisagreement, SizeLimit)
from .groups import FiniteGroup, Subgroup, difference_subgroup, generated_subgroup
from .measures import FiniteMeasure, GroupFunction, PROBABILITY_TOL, convolve

DENSE_EIGEN_CAP = 1024
TOL_UNIT = 1e-8
CLUSTER_TOL = 1e-6
PROJECTION_AGREEMENT = 1e-7


@dataclass(frozen=True, eq=False)
class RegularMatrix:
    group: FiniteGroup
    matrix: np.ndarray

    def apply(self, f: GroupFunction) -> GroupFunction:
        return GroupFunction(self.group, self.matrix @ f.values)


def regular_matrix(mu: FiniteMeasure) -> RegularMatrix:
    G = mu.group
    M = mu.coeffs[G.table[:, G.inverses]]
    M.setflags(write=False)
    return RegularMatrix(G, M)


def unit_tolerance(M: np.ndarray) -> float:
    n = M.shape[0]
    return max(TOL_UNIT, 10 * n * np.finfo(float).eps * float(np.abs(M).sum(axis=0).max()))


def _rank_tol(M: np.ndarray) -> float:
    return 1e-8 * max(1.0, float(np.linalg.norm(M, 2)))


def null_space(A: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``A``."""
    if A.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


@dataclass(frozen=True)
class UnitaryEigen:
    value: complex
    multiplicity: int
    basis: np.ndarray = field(repr=False)
    semisimple: bool

    @property
    def geometric_multiplicity(self) -> int:
        return int(self.basis.shape[1])


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    unitary: tuple
    tol_unit: float
    clusters: tuple = field(repr=False, default=())

    @property
    def unitary_eigenvalues(self) -> tuple[complex, ...]:
        return tuple(u.value for u in self.unitary)

    def only_trivial_unitary(self) -> bool:
        return all(abs(u.value - 1) <= self.tol_unit for u in self.unitary)


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    d = np.abs(values[:, None] - values[None, :])
    for i, j in zip(*np.nonzero(np.triu(d <= tol, 1))):
        parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(ix) for ix in groups.values()]


def sort_complex(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return z[np.lexsort((z.imag, z.real))]


def spectrum(mu: FiniteMeasure, tol_unit: float | None = None, cluster_tol: float = CLUSTER_TOL,
             max_order: int = DENSE_EIGEN_CAP) -> SpectralReport:
    """All eigenvalues of the convolution matrix plus the unitary part of the spectrum.

    Eigenvalues closer than ``cluster_tol`` are merged (a defective block splits
    into a ring of radius ~sqrt(eps) under rounding); the cluster mean stands
    for the eigenvalue. A cluster is unitary when its mean lies within
    ``tol_unit`` of the circle.
    """
    if mu.group.order > max_order:
        raise SizeLimit(f"dense eigensolver capped at order {max_order}")
    M = regular_matrix(mu).matrix
    try:
        eig = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(eig)):
        raise EigensolverFailure("eigensolver returned non-finite values")
    if tol_unit is None:
        tol_unit = unit_tolerance(M)
    rank_tol = _rank_tol(M)
    clusters = []
    unitary = []
    N = M.shape[0]
    I = np.eye(N)
    for ix in _cluster(eig, cluster_tol):
        centre = complex(eig[ix].mean())
        clusters.append((centre, int(ix.size)))
        if abs(abs(centre) - 1) <= tol_unit:
            A = M - centre * I
            basis = null_space(A, rank_tol)
            r1 = N - basis.shape[1]
            r2 = int(np.linalg.matrix_rank(A @ A, tol=rank_tol))
            unitary.append(UnitaryEigen(centre, int(ix.size), basis, r1 == r2))
    unitary.sort(key=lambda u: (u.value.real, u.value.imag))
    return SpectralReport(eigenvalues=sort_complex(eig), spectral_radius=float(np.abs(eig).max()),
                          unitary=tuple(unitary), tol_unit=tol_unit, clusters=tuple(clusters))


def translation_eigenspace(mu: FiniteMeasure, xi: complex, tol: float = 1e-8) -> np.ndarray:
    """Solutions of ``f(g^-1 s) = xi f(s)`` for every ``g`` in the support."""
    G = mu.group
    eye = np.eye(G.order)
    blocks = [eye[G.table[G.inverses[g]]] - xi * eye for g in mu.support()]
    return null_space(np.vstack(blocks), tol)


def unitary_eigenspace_check(mu: FiniteMeasure, xi: complex, angle_tol: float = 1e-7) -> bool:
    """Kernel of ``M - xi I`` versus the translation-equation solution space."""
    if abs(abs(xi) - 1) > 1e-9:
        raise ValueError("xi must have modulus 1")
    M = regular_matrix(mu).matrix
    kernel = null_space(M - xi * np.eye(M.shape[0]), _rank_tol(M))
    translations = translation_eigenspace(mu, xi)
    if kernel.shape[1] != translations.shape[1]:
        return False
    if kernel.shape[1] == 0:
        return True
    return bool(np.max(subspace_angles(kernel, translations)) < angle_tol)


@dataclass(frozen=True)
class PowerBoundedness:
    bounded: bool
    reason: str
    spectral_radius: float
    defective: tuple = ()
    empirical_sup: float = float("nan")


def power_boundedness(mu: FiniteMeasure, tol: float = 1e-9, trace_len: int = 64) -> PowerBoundedness:
    """Finite-dimensional criterion: radius at most 1 and unitary eigenvalues semisimple."""
    rep = spectrum(mu)
    radius = max((abs(c) for c, _ in rep.clusters), default=0.0)
    p = mu.identity()
    sup = 1.0
    for _ in range(trace_len):
        p = convolve(p, mu)
        sup = max(sup, p.tv_norm())
    defective = tuple(u.value for u in rep.unitary if not u.semisimple)
    if mu.is_probability():
        return PowerBoundedness(True, "probability measure: tv_norm(mu^n) = 1", radius, (), sup)
    if radius > 1 + max(tol, rep.tol_unit):
        return PowerBoundedness(False, f"spectral radius {radius:.6g} exceeds 1", radius, (), sup)
    if defective:
        return PowerBoundedness(False, "unitary eigenvalue with a nontrivial Jordan block",
                                radius, defective, sup)
    return PowerBoundedness(True, "spectral radius <= 1 and unitary eigenvalues semisimple",
                            radius, (), sup)


def _require_power_bounded(mu: FiniteMeasure):
    if mu.tv_norm() <= 1 + PROBABILITY_TOL:
        return
    pb = power_boundedness(mu)
    if not pb.bounded:
        raise NotPowerBounded(pb.reason)


@dataclass(frozen=True)
class EigenprojData:
    """Cesaro limit of ``(1/n) sum (xi M)^i``: projection onto ``ker(M - conj(xi) I)``."""

    xi: complex
    eigenvalue: complex
    projection: np.ndarray = field(repr=False)
    iterative: np.ndarray | None = field(default=None, repr=False)
    residual: float = float("nan")
    discrepancy: float = float("nan")
    rank: int = 0

    def limit_measure(self, group: FiniteGroup) -> FiniteMeasure:
        """The measure whose convolution matrix is this projection (column at the identity)."""
        return FiniteMeasure(group, self.projection[:, group.identity])


def algebraic_projection(M: np.ndarray, eigenvalue: complex) -> np.ndarray:
    """Spectral projection onto ``ker(M - eigenvalue)`` along ``ran(M - eigenvalue)``."""
    N = M.shape[0]
    A = M - eigenvalue * np.eye(N)
    tol = _rank_tol(M)
    K = null_space(A, tol)
    if K.shape[1] == 0:
        return np.zeros((N, N), dtype=complex)
    L = null_space(A.conj().T, tol)
    if L.shape[1] != K.shape[1]:
        raise NotPowerBounded("left and right eigenspaces differ in dimension (defective)")
    core = L.conj().T @ K
    if np.linalg.cond(core) > 1e12:
        raise NotPowerBounded("eigenvalue is not semisimple; no ergodic projection")
    return K @ np.linalg.solve(core, L.conj().T)


def cesaro_doubling(T: np.ndarray, stall_tol: float = 1e-13, max_doublings: int = 60,
                    patience: int = 4):
    """Cesaro averages ``(1/n) sum_{i=1..n} T^i`` at ``n = 2^k`` by the exact doubling
    recurrence ``C_2n = (C_n + T^n C_n) / 2``. Returns ``(average, residual, n)``.

    Squaring amplifies rounding along unimodular eigenvalues by about ``2^k eps``
    while the Cesaro error falls like ``1/2^k``, so the iteration stops once the
    checkpoint residual (once below 1e-6) has not improved for ``patience``
    doublings and returns
    the best checkpoint.
    """
    C = T.copy()
    P = T.copy()
    best = (np.inf, C, 1)
    n = 1
    stale = 0
    for _ in range(max_doublings):
        nxt = (C + P @ C) / 2
        P = P @ P
        n *= 2
        residual = float(np.max(np.abs(nxt - C)))
        C = nxt
        if residual < best[0]:
            best = (residual, C, n)
            stale = 0
        elif best[0] < 1e-6:  # transient residuals may rise before they fall
            stale += 1
        if residual <= stall_tol or stale >= patience:
            break
    residual, C, n = best
    return C, residual, n


def ergodic_projection(mu: FiniteMeasure, xi: complex = 1.0, mode: str = "both",
                       agreement: float = PROJECTION_AGREEMENT,
                       converge_tol: float = PROJECTION_AGREEMENT) -> EigenprojData:
    """Limit of ``(1/n) sum (xi lambda(mu))^i``, computed algebraically and by Cesaro doubling.

    ``mode`` is ``"algebraic"``, ``"iterative"`` or ``"both"``; with ``"both"`` a
    disagreement above ``agreement`` raises :class:`OracleDisagreement`.
    """
    if abs(abs(xi) - 1) > 1e-9:
        raise ValueError("xi must have modulus 1")
    _require_power_bounded(mu)
    M = regular_matrix(mu).matrix
    eigenvalue = complex(np.conj(xi))
    proj = it = None
    residual = discrepancy = float("nan")
    if mode in ("algebraic", "both"):
        proj = algebraic_projection(M, eigenvalue)
    if mode in ("iterative", "both"):
        it, residual, _ = cesaro_doubling(xi * M)
        if residual > converge_tol:
            raise CesaroNotConverged(f"Cesaro doubling stalled at residual {residual:.3g}",
                                     residual=residual)
    if proj is None:
        proj = it
    if it is not None and mode == "both":
        discrepancy = float(np.max(np.abs(proj - it)))
        if discrepancy > agreement:
            raise OracleDisagreement(
                f"algebraic and Cesaro projections differ by {discrepancy:.3g}")
    rank = int(round(np.trace(proj).real))
    return EigenprojData(xi=complex(xi), eigenvalue=eigenvalue, projection=proj, iterative=it,
                         residual=residual, discrepancy=discrepancy, rank=rank)


@dataclass(frozen=True)
class KTReport:
    checkpoints: tuple
    d: np.ndarray
    spectral_predicate: bool
    decayed: bool
    agree: bool
    unitary_eigenvalues: tuple = ()


def geometric_checkpoints(n_max: int) -> list[int]:
    pts = [1 << k for k in range(int(math.log2(n_max)) + 1) if (1 << k) <= n_max]
    if pts[-1] != n_max:
        pts.append(n_max)
    return pts


def kt_report(mu: FiniteMeasure, n_max: int = 256, tol: float = 1e-9) -> KTReport:
    """``d_n = ||mu^(n+1) - mu^n||_1`` against the unitary spectrum being inside ``{1}``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _require_power_bounded(mu)
    rep = spectrum(mu)
    checkpoints = geometric_checkpoints(n_max)
    wanted = set(checkpoints)
    d = []
    p = mu
    for n in range(1, n_max + 1):
        nxt = convolve(p, mu)
        if n in wanted:
            d.append((nxt - p).tv_norm())
        p = nxt
    d = np.array(d)
    predicate = rep.only_trivial_unitary()
    decayed = bool(d[-1] <= tol)
    return KTReport(tuple(checkpoints), d, predicate, decayed, predicate == decayed,
                    rep.unitary_eigenvalues)


# finite abelian duality

@dataclass(frozen=True, eq=False)
class DualTable:
    """Characters of a product of cyclic groups and the transform of one measure.

    Characters are indexed like elements: ``chi_k(g) = exp(2 pi i sum_j k_j g_j / n_j)``.
    """

    group: FiniteGroup
    phases: np.ndarray = field(repr=False)  # integer numerators modulo ``modulus``
    modulus: int
    characters: np.ndarray = field(repr=False)
    transform: np.ndarray
    F_set: tuple
    E_set: tuple
    tol: float

    def annihilator(self, H: Subgroup) -> tuple[int, ...]:
        return annihilator(H, self.phases)

    def conjugate(self, k: int) -> int:
        """Index of the conjugate character."""
        coords = np.unravel_index(k, self.group.factors)
        neg = tuple((-c) % n for c, n in zip(coords, self.group.factors))
        return int(np.ravel_multi_index(neg, self.group.factors))

    def identity_checks(self, mu: FiniteMeasure) -> dict:
        supp = mu.support()
        return {
            "F_equals_annihilator_of_generated":
                self.F_set == self.annihilator(generated_subgroup(self.group, supp)),
            "E_equals_annihilator_of_difference":
                self.E_set == self.annihilator(difference_subgroup(self.group, supp)),
        }


def character_phases(group: FiniteGroup) -> tuple[np.ndarray, int]:
    if not group.is_abelian:
        raise NotAbelian(f"{group.label} is not abelian")
    if group.factors is None:
        raise NotAbelian(f"{group.label} carries no cyclic factorization")
    L = math.lcm(*group.factors)
    coords = np.array(np.unravel_index(np.arange(group.order), group.factors))  # (r, N)
    scale = np.array([L // n for n in group.factors])[:, None]
    phases = ((coords * scale).T @ coords) % L  # phases[k, g]
    return phases, L


def annihilator(H: Subgroup, phases: np.ndarray | None = None) -> tuple[int, ...]:
    """Characters equal to 1 on every element of ``H`` (exact integer test)."""
    if phases is None:
        phases, _ = character_phases(H.parent)
    return tuple(int(k) for k in np.flatnonzero(np.all(phases[:, list(H.elements)] == 0, axis=1)))


def dual_table(mu: FiniteMeasure, tol: float = 1e-9) -> DualTable:
    G = mu.group
    phases, L = character_phases(G)
    chars = np.exp(2j * np.pi * phases / L)
    transform = chars @ mu.coeffs
    F = tuple(int(k) for k in np.flatnonzero(np.abs(transform - 1) <= tol))
    E = tuple(int(k) for k in np.flatnonzero(np.abs(np.abs(transform) - 1) <= tol))
    return DualTable(group=G, phases=phases, modulus=L, characters=chars, transform=transform,
                     F_set=F, E_set=E, tol=tol)


def fourier_eigen_mismatch(mu: FiniteMeasure) -> float:
    """Largest gap in an optimal matching of eigenvalues to transform values."""
    eig = np.linalg.eigvals(regular_matrix(mu).matrix)
    fhat = dual_table(mu).transform
    cost = np.abs(eig[:, None] - fhat[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
