"""Small dense linear-algebra helpers used by every module."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite square complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionError(f"{name} has non-finite entries")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + dag(a)) / 2


def opnorm(a: np.ndarray) -> float:
    """Spectral norm; 0 for empty arrays."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values; uses the spectrum directly for Hermitian input."""
    if a.shape[0] == a.shape[1] and np.allclose(a, dag(a), rtol=0, atol=1e-13):
        return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian_part(a)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def herm_func(a: np.ndarray, func, floor: float | None = None) -> np.ndarray:
    """Apply ``func`` to the spectrum of the Hermitian part of ``a``.

    Eigenvalues below ``floor`` are set to zero before ``func`` is applied.
    """
    w, v = np.linalg.eigh(hermitian_part(a))
    if floor is not None:
        w = np.where(w < floor, 0.0, w)
    return (v * func(w)) @ dag(v)


def psd_sqrt(a: np.ndarray) -> np.ndarray:
    """Square root of a PSD matrix.

    Eigenvalues within ``n * eps * max`` of zero are treated as exact zeros;
    their square roots would otherwise inject O(sqrt(eps)) noise.
    """
    w = np.linalg.eigvalsh(hermitian_part(a))
    top = max(float(np.max(np.abs(w))), 0.0) if w.size else 0.0
    floor = a.shape[0] * np.finfo(float).eps * top
    return herm_func(a, lambda x: np.sqrt(np.clip(x, 0.0, None)), floor=floor)


def expm_hermitian(h: np.ndarray, scale: complex = 1j) -> np.ndarray:
    """exp(scale * h) for Hermitian h via eigendecomposition."""
    w, v = np.linalg.eigh(hermitian_part(h))
    return (v * np.exp(scale * w)) @ dag(v)


def vec_stack(mats) -> np.ndarray:
    """Columns are the row-major vectorizations of ``mats``."""
    mats = list(mats)
    if not mats:
        return np.zeros((0, 0), dtype=complex)
    return np.stack([np.asarray(m, dtype=complex).reshape(-1) for m in mats], axis=1)


def orthonormal_columns(m: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of the column span, relative rank threshold ``tol``."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    r = int(np.sum(s > tol * s[0]))
    return u[:, :r]


def null_space(m: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of ker(m), relative threshold ``tol``."""
    n = m.shape[1]
    if m.size == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    top = s[0] if s.size else 0.0
    r = int(np.sum(s > tol * top)) if top > 0 else 0
    return dag(vh[r:])


def numerical_rank(m: np.ndarray, tol: float) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive.

    Ties go to the lowest index (``argmax`` semantics).
    """
    v = np.array(v, dtype=complex)
    for j in range(v.shape[1]):
        k = int(np.argmax(np.round(np.abs(v[:, j]), 12)))
        if abs(v[k, j]) > 0:
            v[:, j] *= abs(v[k, j]) / v[k, j]
    return v


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ dag(g)
    return rho / np.trace(rho).real


def random_matrix(n: int, rng: np.random.Generator, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
