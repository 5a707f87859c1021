"""Matrix *-algebras, functionals, states and worlds.

Every linear functional on an algebra of n x n matrices is encoded by a
pairing matrix ``L`` through ``f(a) = tr(L a)``. A state is a functional that
has passed the positivity and normalization checks of :func:`is_state`; it
carries the certificates computed during that check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionError, NotAProjectionError, NotAStateError, OpalgError
from .linalg import (
    as_matrix,
    dag,
    hermitian_part,
    numerical_rank,
    null_space,
    orthonormal_columns,
    vec_stack,
)

DEFAULT_TOL = 1e-9

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def is_positive(a, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``a`` is Hermitian and its spectrum is >= -tol."""
    a = as_matrix(a)
    if np.max(np.abs(a - dag(a)), initial=0.0) > tol:
        return False
    return bool(np.linalg.eigvalsh(hermitian_part(a)).min() >= -tol)


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """A unital *-subalgebra of M_n given by a basis of its span.

    The basis is stored as an array of shape ``(len, n, n)``. Construction
    checks linear independence, that the identity lies in the span and that
    the span is closed under adjoints and products. Pass ``validate=False``
    only for bases known to be closed (the module-level constructors do).
    """

    ambient_dim: int
    basis: np.ndarray
    tol: float = DEFAULT_TOL
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        n = self.ambient_dim
        if b.ndim != 3 or b.shape[1:] != (n, n):
            raise DimensionError(f"basis must have shape (k, {n}, {n}), got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        if not self.validate:
            return
        if numerical_rank(self._vecs, self.tol) != len(b):
            raise OpalgError("basis is linearly dependent")
        if self.span_residual(np.eye(n)) > self.tol:
            raise OpalgError("identity is not in the span")
        for i in range(len(b)):
            if self.span_residual(dag(b[i])) > self.tol:
                raise OpalgError(f"span not closed under adjoint (basis {i})")
        prods = (b[:, None] @ b[None, :]).reshape(-1, n * n).T
        res = prods - self._onb @ (dag(self._onb) @ prods)
        if np.max(np.abs(res), initial=0.0) > self.tol * max(1.0, np.max(np.abs(prods))):
            raise OpalgError("span not closed under multiplication")

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        """Dimension of the span."""
        return len(self.basis)

    @cached_property
    def _vecs(self) -> np.ndarray:
        return self.basis.reshape(len(self.basis), -1).T

    @cached_property
    def _onb(self) -> np.ndarray:
        return orthonormal_columns(self._vecs, 1e-13)

    @cached_property
    def _pinv(self) -> np.ndarray:
        return np.linalg.pinv(self._vecs)

    @cached_property
    def is_orthonormal(self) -> bool:
        g = dag(self._vecs) @ self._vecs
        return bool(np.allclose(g, np.eye(len(self)), atol=1e-12))

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim**2

    def coords(self, a) -> np.ndarray:
        """Coefficients of the least-squares expansion of ``a`` in the basis."""
        return self._pinv @ np.asarray(a, dtype=complex).reshape(-1)

    def span_residual(self, a) -> float:
        v = np.asarray(a, dtype=complex).reshape(-1)
        return float(np.max(np.abs(v - self._onb @ (dag(self._onb) @ v)), initial=0.0))

    def element(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.basis, axes=1)

    @cached_property
    def unit_coords(self) -> np.ndarray:
        return self.coords(np.eye(self.ambient_dim))

    @cached_property
    def structure(self) -> np.ndarray:
        """``C[i, k, j]`` with ``b_i b_j = sum_k C[i, k, j] b_k``."""
        n = self.ambient_dim
        prods = (self.basis[:, None] @ self.basis[None, :]).reshape(len(self), len(self), n * n)
        return np.tensordot(self._pinv, prods, axes=([1], [2])).transpose(1, 0, 2)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.standard_normal(len(self)) + 1j * rng.standard_normal(len(self))
        return self.element(c)


def _units(n: int, blocks: Sequence[tuple[int, int]]) -> np.ndarray:
    mats = []
    for start, size in blocks:
        for k in range(start, start + size):
            for l in range(start, start + size):
                e = np.zeros((n, n), dtype=complex)
                e[k, l] = 1.0
                mats.append(e)
    return np.array(mats)


@lru_cache(maxsize=32)
def full_matrix_algebra(n: int) -> StarAlgebra:
    """M_n with the matrix units E_kl in row-major order."""
    return StarAlgebra(n, _units(n, [(0, n)]), validate=False)


def diagonal_algebra(n: int) -> StarAlgebra:
    return StarAlgebra(n, _units(n, [(k, 1) for k in range(n)]), validate=False)


def block_algebra(sizes: Sequence[int]) -> StarAlgebra:
    """Block-diagonal algebra M_{s1} + M_{s2} + ... embedded in M_{sum(s)}."""
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
    n = int(sum(sizes))
    return StarAlgebra(n, _units(n, list(zip(starts, sizes))), validate=False)


def generate_algebra(generators, tol: float = DEFAULT_TOL) -> StarAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    Repeatedly adjoins adjoints and pairwise products of an orthonormal basis
    of the current span until the span dimension stops growing. The
    returned basis is Hilbert-Schmidt orthonormal.
    """
    gens = [as_matrix(g, "generator") for g in generators]
    if not gens:
        raise DimensionError("need at least one generator")
    n = gens[0].shape[0]
    if any(g.shape != (n, n) for g in gens):
        raise DimensionError("generators have different dimensions")
    q = orthonormal_columns(vec_stack([np.eye(n)] + gens + [dag(g) for g in gens]), tol)
    for _ in range(n * n):
        mats = q.T.reshape(-1, n, n)
        prods = (mats[:, None] @ mats[None, :]).reshape(-1, n * n).T
        adjs = np.conj(np.transpose(mats, (0, 2, 1))).reshape(-1, n * n).T
        grown = orthonormal_columns(np.hstack([q, prods, adjs]), tol)
        if grown.shape[1] == q.shape[1]:
            break
        q = grown
    return StarAlgebra(n, q.T.reshape(-1, n, n), tol=max(tol, 1e-9))


def center(A: StarAlgebra, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Hilbert-Schmidt orthonormal basis of the center of ``A``."""
    b = A.basis
    # comm[k, j] = [b_k, b_j]
    comm = b[:, None] @ b[None, :] - b[None, :] @ b[:, None]
    m = comm.reshape(len(A), -1).T
    coeffs = null_space(m, tol)
    if coeffs.shape[1] == 0:
        return []
    z = vec_stack([A.element(c) for c in coeffs.T])
    q = orthonormal_columns(z, tol)
    return [q[:, k].reshape(A.ambient_dim, A.ambient_dim) for k in range(q.shape[1])]


@dataclass(frozen=True, eq=False)
class Functional:
    """Linear functional a -> tr(pairing @ a) on n x n matrices."""

    ambient_dim: int
    pairing: np.ndarray

    def __post_init__(self):
        p = as_matrix(self.pairing, "pairing")
        if p.shape[0] != self.ambient_dim:
            raise DimensionError(f"pairing is {p.shape}, ambient_dim {self.ambient_dim}")
        p.setflags(write=False)
        object.__setattr__(self, "pairing", p)

    @classmethod
    def from_pairing(cls, pairing) -> "Functional":
        p = as_matrix(pairing, "pairing")
        return cls(p.shape[0], p)

    def __call__(self, a) -> complex:
        return evaluate(self, a)

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(self.ambient_dim, self.pairing + other.pairing)

    def __sub__(self, other: "Functional") -> "Functional":
        return Functional(self.ambient_dim, self.pairing - other.pairing)

    def __mul__(self, c: complex) -> "Functional":
        return Functional(self.ambient_dim, c * self.pairing)

    __rmul__ = __mul__


def evaluate(f: Functional, a) -> complex:
    """tr(L a)."""
    a = np.asarray(a, dtype=complex)
    if a.shape != f.pairing.shape:
        raise DimensionError(f"cannot evaluate {f.pairing.shape} functional on {a.shape}")
    return complex(np.sum(f.pairing.T * a))


@dataclass(frozen=True, eq=False)
class State:
    """A functional certified positive and normalized on ``algebra``."""

    base: Functional
    algebra: StarAlgebra = field(repr=False)
    positivity_certificate: float
    normalization_residual: float

    @property
    def pairing(self) -> np.ndarray:
        return self.base.pairing

    @property
    def dim(self) -> int:
        return self.base.ambient_dim

    def __call__(self, a) -> complex:
        return evaluate(self.base, a)


def state_gram(f: Functional, A: StarAlgebra) -> np.ndarray:
    """G[i, j] = f(b_i^* b_j) over the basis of ``A``."""
    bl = np.einsum("jpq,qr->jpr", A.basis, f.pairing)
    return np.einsum("ipq,jpq->ij", A.basis.conj(), bl)


def is_state(f: Functional, A: StarAlgebra | None = None, tol: float = DEFAULT_TOL) -> State:
    """Certify ``f`` as a state on ``A`` (default: the full matrix algebra).

    Raises:
        NotAStateError: naming the failed condition and the violation size.
    """
    if A is None:
        A = full_matrix_algebra(f.ambient_dim)
    if A.ambient_dim != f.ambient_dim:
        raise DimensionError("functional and algebra dimensions differ")
    if A.is_full and A.is_orthonormal:
        # For an orthonormal basis of M_n the Gram matrix is unitarily
        # similar to 1 (x) L^T, so the pairing itself carries the spectrum.
        g = f.pairing
    else:
        g = state_gram(f, A)
    herm_defect = float(np.max(np.abs(g - dag(g)), initial=0.0))
    min_eig = float(np.linalg.eigvalsh(hermitian_part(g)).min())
    if herm_defect > tol:
        raise NotAStateError("positivity", herm_defect)
    if min_eig < -tol:
        raise NotAStateError("positivity", -min_eig)
    norm_res = abs(evaluate(f, np.eye(f.ambient_dim)) - 1.0)
    if norm_res > tol:
        raise NotAStateError("normalization", norm_res)
    return State(f, A, min_eig, norm_res)


def density_state(rho, A: StarAlgebra | None = None, tol: float = DEFAULT_TOL) -> State:
    return is_state(Functional.from_pairing(rho), A, tol)


def vector_state(x, tol: float = DEFAULT_TOL) -> State:
    """The vector state T -> <T x, x>."""
    x = np.asarray(x, dtype=complex).reshape(-1)
    norm = np.linalg.norm(x)
    if abs(norm - 1.0) > tol:
        raise NotAStateError("normalization", abs(norm - 1.0))
    return is_state(Functional.from_pairing(np.outer(x, x.conj())), tol=tol)


def mixture(states: Sequence[State], weights: Sequence[float], tol: float = DEFAULT_TOL) -> State:
    """Finite convex combination of states on a common algebra."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(states) or np.any(w < 0) or abs(w.sum() - 1.0) > tol:
        raise OpalgError("weights must be a probability vector matching the states")
    pairing = sum(wi * s.pairing for wi, s in zip(w, states))
    return is_state(Functional.from_pairing(pairing), states[0].algebra, tol)


def is_pure(s: State, tol: float = DEFAULT_TOL) -> bool:
    """Rank-one test on the pairing; defined for states on the full M_n only."""
    if not s.algebra.is_full:
        raise OpalgError("purity is only implemented for states on the full matrix algebra")
    w = np.sort(np.abs(np.linalg.eigvalsh(hermitian_part(s.pairing))))[::-1]
    return len(w) < 2 or w[1] <= tol * w[0]


def four_state_decomposition(f: Functional, tol: float = 1e-12) -> list[tuple[complex, State]]:
    """Write ``f`` as t1 s1 - t2 s2 + i t3 s3 - i t4 s4 with states s_k.

    The pairing is split into Hermitian real and imaginary parts, each of
    which is split spectrally into positive and negative parts. Parts with
    vanishing trace are dropped, so fewer than four terms may be returned.
    """
    lam = f.pairing
    scale = float(np.max(np.abs(lam), initial=0.0))
    if scale == 0.0:
        return []
    re = hermitian_part(lam)
    im = (lam - dag(lam)) / 2j
    out = []
    for part, (c_pos, c_neg) in ((re, (1, -1)), (im, (1j, -1j))):
        w, v = np.linalg.eigh(part)
        for sign, coef in ((1, c_pos), (-1, c_neg)):
            ww = np.clip(sign * w, 0.0, None)
            t = float(ww.sum())
            if t <= tol * scale:
                continue
            rho = (v * (ww / t)) @ dag(v)
            out.append((complex(coef * t), density_state(rho, tol=1e-9)))
    return out


def reconstruct(terms: Sequence[tuple[complex, State]], n: int) -> Functional:
    pairing = np.zeros((n, n), dtype=complex)
    for c, s in terms:
        pairing = pairing + c * s.pairing
    return Functional(n, pairing)


def projection_additivity_check(s: State, projections, tol: float = DEFAULT_TOL) -> float:
    """|s(sum e_i) - sum s(e_i)| for mutually orthogonal projections e_i."""
    es = [as_matrix(e, "projection") for e in projections]
    for i, e in enumerate(es):
        if e.shape[0] != s.dim:
            raise NotAProjectionError(i, "wrong dimension")
        if np.max(np.abs(e - dag(e))) > tol:
            raise NotAProjectionError(i, "not self-adjoint")
        if np.max(np.abs(e @ e - e)) > tol:
            raise NotAProjectionError(i, "not idempotent")
    for i in range(len(es)):
        for j in range(i + 1, len(es)):
            if np.max(np.abs(es[i] @ es[j])) > tol:
                raise NotAProjectionError(j, f"not orthogonal to projection {i}")
    join = sum(es) if es else np.zeros((s.dim, s.dim))
    return float(abs(s(join) - sum(s(e) for e in es)))


@dataclass(frozen=True, eq=False)
class World:
    """An orthonormal basis, stored as the columns of a unitary matrix."""

    dim: int
    basis_matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        u = as_matrix(self.basis_matrix, "basis_matrix")
        if u.shape[0] != self.dim:
            raise DimensionError("basis_matrix does not match dim")
        if np.max(np.abs(dag(u) @ u - np.eye(self.dim))) > self.tol:
            raise OpalgError("basis_matrix is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "basis_matrix", u)

    @classmethod
    def standard(cls, n: int) -> "World":
        return cls(n, np.eye(n, dtype=complex))

    @classmethod
    def fourier(cls, n: int) -> "World":
        k = np.arange(n)
        return cls(n, np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n))

    @classmethod
    def rotated(cls, theta: float) -> "World":
        c, s = np.cos(theta), np.sin(theta)
        return cls(2, np.array([[c, -s], [s, c]], dtype=complex))

    def same_as(self, other: "World", tol: float = DEFAULT_TOL) -> bool:
        """Equality up to a phase on each basis vector."""
        if other.dim != self.dim:
            return False
        overlaps = np.abs(np.sum(self.basis_matrix.conj() * other.basis_matrix, axis=0))
        return bool(np.all(np.abs(overlaps - 1.0) <= tol))


def born_matrix(W: World, W2: World) -> np.ndarray:
    """Transition probabilities |<e_j, e'_k>|^2 between two worlds."""
    if W.dim != W2.dim:
        raise DimensionError("worlds have different dimensions")
    return np.abs(dag(W.basis_matrix) @ W2.basis_matrix) ** 2


def bloch_point(s: State) -> np.ndarray:
    """(tr LX, tr LY, tr LZ) for a state on M_2."""
    if s.dim != 2:
        raise DimensionError("Bloch coordinates need a qubit state")
    return np.array([evaluate(s.base, p).real for p in (PAULI_X, PAULI_Y, PAULI_Z)])
