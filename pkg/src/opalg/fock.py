"""Truncated Fock spaces, Weyl operators and coherent states.

Quadratures follow Q = (a + a^*)/sqrt(2), P = -i (a - a^*)/sqrt(2), so that
[Q, P] = i on the untruncated space and the single-mode symplectic matrix is
[[0, 1], [-1, 0]]. Phase-space points are ordered (q1, p1, q2, p2, ...).

With this convention W_x = exp(i (q P - p Q)) is the displacement D(alpha)
with alpha = -(q + i p)/sqrt(2), hence |<0|W_x|0>|^2 = exp(-(q^2 + p^2)/2).

The CCR has no finite-dimensional representation, so the Weyl relations hold
only approximately at a cutoff d. Relation checks are made on the subspace
spanned by the lower half of the Fock states, where truncation effects decay
quickly with d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .errors import DimensionError, OpalgError
from .linalg import dag, expm_hermitian, opnorm

SINGLE_MODE_FORM = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True, eq=False)
class FockMode:
    """Fock space truncated at ``cutoff`` photons per mode (exclusive)."""

    cutoff: int
    modes: int = 1

    def __post_init__(self):
        if self.cutoff < 2:
            raise DimensionError("cutoff must be at least 2")
        if self.modes < 1:
            raise DimensionError("need at least one mode")

    @property
    def dim(self) -> int:
        return self.cutoff**self.modes

    @cached_property
    def lower(self) -> np.ndarray:
        """Single-mode annihilation operator, a|k> = sqrt(k)|k-1>."""
        return np.diag(np.sqrt(np.arange(1, self.cutoff, dtype=float)), 1).astype(complex)

    @cached_property
    def Q(self) -> np.ndarray:
        a = self.lower
        return (a + dag(a)) / np.sqrt(2)

    @cached_property
    def P(self) -> np.ndarray:
        a = self.lower
        return (a - dag(a)) / (1j * np.sqrt(2))

    @cached_property
    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.cutoff, dtype=float)).astype(complex)

    def embed(self, op: np.ndarray, k: int) -> np.ndarray:
        """Single-mode operator acting on mode ``k`` of the multimode space."""
        eye = np.eye(self.cutoff)
        return reduce(np.kron, [op if j == k else eye for j in range(self.modes)])

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    @cached_property
    def shielded(self) -> np.ndarray:
        """Indices of Fock states with every occupation below cutoff // 2."""
        occ = np.indices((self.cutoff,) * self.modes).reshape(self.modes, -1)
        return np.flatnonzero(np.all(occ < self.cutoff // 2, axis=0))

    def single(self) -> "FockMode":
        return self if self.modes == 1 else FockMode(self.cutoff)


@dataclass(frozen=True, eq=False)
class SymplecticForm:
    """beta(x, y) = x^T B y on R^(2n)."""

    modes: int
    B: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.shape != (2 * self.modes, 2 * self.modes):
            raise DimensionError("B must be 2n x 2n")
        if np.any(B != -B.T):
            raise OpalgError("B must be antisymmetric")
        if abs(np.linalg.det(B)) == 0:
            raise OpalgError("B must be nondegenerate")
        object.__setattr__(self, "B", B)

    @classmethod
    def standard(cls, modes: int = 1) -> "SymplecticForm":
        return cls(modes, np.kron(np.eye(modes), SINGLE_MODE_FORM))

    def __call__(self, x, y) -> float:
        # antisymmetrized so that beta(x, y) == -beta(y, x) holds bit-exactly
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return 0.5 * (float(x @ self.B @ y) - float(y @ self.B @ x))


def as_point(x, modes: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != 2 * modes:
        raise DimensionError(f"phase-space point needs {2 * modes} coordinates, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("phase-space point has non-finite coordinates")
    return x


def weyl(x, mode: FockMode) -> np.ndarray:
    """W_x = exp(i sum_k (q_k P_k - p_k Q_k)) on the truncated space.

    Computed by Hermitian eigendecomposition, so the result is unitary to
    rounding error at any cutoff.
    """
    x = as_point(x, mode.modes)
    if not np.any(x):
        return np.eye(mode.dim, dtype=complex)
    gen = sum(
        x[2 * k] * mode.embed(mode.P, k) - x[2 * k + 1] * mode.embed(mode.Q, k)
        for k in range(mode.modes)
    )
    return expm_hermitian(gen, 1j)


def weyl_power(x, mode: FockMode, copies: int) -> np.ndarray:
    """W_x tensored ``copies`` times (single-mode x)."""
    w = weyl(x, mode.single())
    return reduce(np.kron, [w] * copies)


def coherent(alpha, mode: FockMode) -> np.ndarray:
    """W_alpha applied to the vacuum."""
    return weyl(alpha, mode)[:, 0].copy()


def weyl_relation_residual(x, y, mode: FockMode) -> float:
    """||(W_x W_y - exp(-i beta(x,y)/2) W_{x+y}) restricted to the shielded subspace||."""
    beta = SymplecticForm.standard(mode.modes)
    x, y = as_point(x, mode.modes), as_point(y, mode.modes)
    diff = weyl(x, mode) @ weyl(y, mode) - np.exp(-0.5j * beta(x, y)) * weyl(x + y, mode)
    return opnorm(diff[:, mode.shielded])


def weyl_exchange_residual(x, y, mode: FockMode) -> float:
    """||(W_x W_y - exp(-i beta(x,y)) W_y W_x) restricted to the shielded subspace||."""
    beta = SymplecticForm.standard(mode.modes)
    x, y = as_point(x, mode.modes), as_point(y, mode.modes)
    wx, wy = weyl(x, mode), weyl(y, mode)
    diff = wx @ wy - np.exp(-1j * beta(x, y)) * wy @ wx
    return opnorm(diff[:, mode.shielded])


def irreducibility_probe(mode: FockMode, A, grid, tol: float = 1e-8, kappa: float | None = None) -> bool:
    """Diagnostic: does ``A`` commute with the sampled Weyl operators, and is it scalar?

    Returns True only when max ||[W_x, A]|| over ``grid`` is at most ``tol``
    and ||A - (tr A / d) I|| <= tol * kappa. ``kappa`` defaults to the Hilbert
    space dimension. A False answer either means A fails to commute (the
    usual case for non-scalar A) or that a commuting A is not scalar, which
    would contradict irreducibility.
    """
    grid = list(grid)
    if not grid:
        raise OpalgError("grid must be nonempty")
    A = np.asarray(A, dtype=complex)
    if A.shape != (mode.dim, mode.dim):
        raise DimensionError("operator does not match the Fock space")
    kappa = float(mode.dim) if kappa is None else kappa
    comm = max(opnorm(weyl(x, mode) @ A - A @ weyl(x, mode)) for x in grid)
    if comm > tol:
        return False
    scalar_dev = opnorm(A - np.trace(A) / mode.dim * np.eye(mode.dim))
    return scalar_dev <= tol * kappa


def phase_grid(points: int = 5, spacing: float = 0.5) -> list[np.ndarray]:
    """Square single-mode grid centred at the origin, ``points`` per axis."""
    half = (points - 1) / 2
    axis = (np.arange(points) - half) * spacing
    return [np.array([q, p]) for q in axis for p in axis]
