"""Kraus channels, fidelity and covariant 1 -> 2 cloners on truncated Fock spaces.

A singular output component assigns zero to every compact operator. At a
cutoff every operator is compact, so the singular parts of a cloner are
modelled as trace that leaves the cutoff space: a completely positive,
trace-deficient map that contributes nothing to any fidelity expectation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Mapping, Sequence

import numpy as np

from ._parallel import pmap
from .errors import DimensionError, OpalgError
from .fock import FockMode, coherent, weyl, weyl_power
from .linalg import dag, hermitian_part, psd_sqrt, random_unitary, trace_norm

DEFAULT_TOL = 1e-9

NORMAL = frozenset({1, 2})
SUBSETS = (frozenset(), frozenset({1}), frozenset({2}), NORMAL)


@dataclass(frozen=True, eq=False)
class Channel:
    """Completely positive map rho -> sum_i K_i rho K_i^*.

    ``trace_character`` is c when sum K_i^* K_i = c I, otherwise None
    (non-uniform trace loss).
    """

    kraus: np.ndarray
    tol: float = field(default=DEFAULT_TOL, repr=False)
    trace_character: float | None = field(init=False, default=None)

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or len(k) == 0:
            raise DimensionError("kraus must be a nonempty stack of out x in matrices")
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)
        s = self.kraus_sum()
        top = float(np.linalg.eigvalsh(hermitian_part(s)).max())
        if top > 1 + self.tol:
            raise OpalgError(f"channel increases trace (max eigenvalue {top:.6g})")
        c = float(np.trace(s).real) / self.in_dim
        uniform = np.max(np.abs(s - c * np.eye(self.in_dim))) <= self.tol
        object.__setattr__(self, "trace_character", c if uniform else None)

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def is_trace_preserving(self) -> bool:
        return self.trace_character is not None and abs(self.trace_character - 1) <= self.tol

    def kraus_sum(self) -> np.ndarray:
        return np.tensordot(self.kraus.conj(), self.kraus, axes=([0, 1], [0, 1]))

    def __call__(self, rho) -> np.ndarray:
        return apply_schrodinger(self, rho)

    def scaled(self, c: float) -> "Channel":
        return Channel(np.sqrt(c) * self.kraus, self.tol)

    def compressed(self, rel_tol: float = 1e-12) -> "Channel":
        """Equivalent channel with a minimal Kraus family."""
        v = self.kraus.reshape(len(self.kraus), -1)
        lam, u = np.linalg.eigh(v @ dag(v))
        order = np.argsort(-lam)
        lam, u = lam[order], u[:, order]
        r = max(1, int(np.sum(lam > rel_tol * lam[0])))
        k = (dag(u[:, :r]) @ v).reshape(r, self.out_dim, self.in_dim)
        return Channel(k, self.tol)


def apply_schrodinger(ch: Channel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ch.in_dim, ch.in_dim):
        raise DimensionError(f"state is {rho.shape}, channel input is {ch.in_dim}")
    kr = ch.kraus @ rho
    return np.tensordot(kr, ch.kraus.conj(), axes=([0, 2], [0, 2]))


def apply_heisenberg(ch: Channel, O) -> np.ndarray:
    O = np.asarray(O, dtype=complex)
    if O.shape != (ch.out_dim, ch.out_dim):
        raise DimensionError(f"observable is {O.shape}, channel output is {ch.out_dim}")
    ok = O @ ch.kraus
    return np.tensordot(ch.kraus.conj(), ok, axes=([0, 1], [0, 1]))


def _check_density(rho, name: str, tol: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"{name} must be square")
    if np.max(np.abs(rho - dag(rho))) > tol:
        raise OpalgError(f"{name} is not Hermitian")
    if np.linalg.eigvalsh(hermitian_part(rho)).min() < -tol:
        raise OpalgError(f"{name} is not positive semidefinite")
    if abs(np.trace(rho).real - 1) > tol:
        raise OpalgError(f"{name} does not have unit trace")
    return hermitian_part(rho)


def fidelity(rho1, rho2, tol: float = DEFAULT_TOL) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2.

    Evaluated as the squared trace norm of sqrt(rho1) sqrt(rho2), which has
    the same singular values but avoids square roots of rounding noise.
    """
    r1 = _check_density(rho1, "rho1", tol)
    r2 = _check_density(rho2, "rho2", tol)
    if r1.shape != r2.shape:
        raise DimensionError("states have different dimensions")
    f = trace_norm(psd_sqrt(r1) @ psd_sqrt(r2)) ** 2
    return float(min(max(f, 0.0), 1.0))


def joint_fidelity(ch: Channel, alpha, mode: FockMode) -> float:
    """<alpha, alpha| Phi(|alpha><alpha|) |alpha, alpha>."""
    d = mode.cutoff
    if ch.in_dim != d or ch.out_dim != d * d:
        raise DimensionError(f"cloner must map dimension {d} to {d * d}")
    v = coherent(alpha, mode.single())
    out = apply_schrodinger(ch, np.outer(v, v.conj()))
    w = np.kron(v, v)
    return float(np.real(w.conj() @ out @ w))


def shift_cloner(ch: Channel, x, mode: FockMode) -> Channel:
    """rho -> (W_x (x) W_x)^* Phi(W_x rho W_x^*) (W_x (x) W_x)."""
    d = mode.cutoff
    if ch.in_dim != d or ch.out_dim != d * d:
        raise DimensionError(f"cloner must map dimension {d} to {d * d}")
    w_in = weyl(x, mode.single())
    w_out = weyl_power(x, mode, 2)
    return Channel(dag(w_out) @ ch.kraus @ w_in, ch.tol)


def covariantize(ch: Channel, grid, mode: FockMode) -> Channel:
    """Uniform mixture of the shifted cloners over ``grid``."""
    grid = list(grid)
    if not grid:
        raise OpalgError("grid must be nonempty")
    shifted = pmap(lambda x: shift_cloner(ch, x, mode).kraus, grid)
    return Channel(np.concatenate(shifted) / np.sqrt(len(grid)), ch.tol).compressed()


def channel_distance(ch1: Channel, ch2: Channel, test_states) -> float:
    """Max trace-norm distance between outputs on ``test_states``."""
    return max(trace_norm(ch1(r) - ch2(r)) for r in test_states)


def covariance_residual(ch: Channel, grid, test_states, mode: FockMode) -> float:
    """max over x in grid and rho in test_states of ||Phi^x(rho) - Phi(rho)||_1."""
    test_states = list(test_states)
    base = [ch(r) for r in test_states]

    def worst(x):
        sh = shift_cloner(ch, x, mode)
        return max(trace_norm(sh(r) - b) for r, b in zip(test_states, base))

    return max(pmap(worst, list(grid)), default=0.0)


# -- reference channels ---------------------------------------------------


def identity_channel(d: int) -> Channel:
    return Channel(np.eye(d, dtype=complex)[None])


def unitary_channel(u) -> Channel:
    return Channel(np.asarray(u, dtype=complex)[None])


def random_channel(in_dim: int, out_dim: int, n_kraus: int, rng: np.random.Generator) -> Channel:
    """Trace-preserving channel from a Haar-random isometry."""
    if n_kraus * out_dim < in_dim:
        raise DimensionError("need n_kraus * out_dim >= in_dim for an isometry")
    big = random_unitary(n_kraus * out_dim, rng)[:, :in_dim]
    return Channel(big.reshape(n_kraus, out_dim, in_dim))


def fixed_output_channel(sigma, in_dim: int) -> Channel:
    """rho -> tr(rho) sigma."""
    sigma = np.asarray(sigma, dtype=complex)
    w, v = np.linalg.eigh(hermitian_part(sigma))
    keep = w > 1e-14 * max(w.max(), 0)
    k = [np.sqrt(wi) * np.outer(vi, e) for wi, vi in zip(w[keep], v[:, keep].T) for e in np.eye(in_dim)]
    return Channel(np.array(k))


def ancilla_channel(sigma, second: bool = True) -> Channel:
    """rho -> rho (x) sigma (or sigma (x) rho when ``second`` is False)."""
    sigma = np.asarray(sigma, dtype=complex)
    d = sigma.shape[0]
    w, v = np.linalg.eigh(hermitian_part(sigma))
    keep = w > 1e-14 * max(w.max(), 0)
    eye = np.eye(d)
    ks = []
    for wi, vi in zip(w[keep], v[:, keep].T):
        col = np.sqrt(wi) * vi[:, None]
        ks.append(np.kron(eye, col) if second else np.kron(col, eye))
    return Channel(np.array(ks))


def symmetric_splitter_cloner(mode: FockMode) -> Channel:
    """Vacuum-ancilla balanced beam splitter, |n> -> (a1^* + a2^*)^n |00> / sqrt(2^n n!).

    Photon number is conserved, so the image of the d-dimensional input stays
    inside the d^2-dimensional output cutoff and the map is an exact isometry.
    Coherent inputs go to |alpha/sqrt2> (x) |alpha/sqrt2>.
    """
    d = mode.cutoff
    iso = np.zeros((d * d, d), dtype=complex)
    for n in range(d):
        for k in range(n + 1):
            iso[k * d + (n - k), n] = np.sqrt(comb(n, k) / 2.0**n)
    return Channel(iso[None])


# -- decomposition into normal and singular parts -------------------------


@dataclass(frozen=True, eq=False)
class ClonerDecomposition:
    """Weights c_N over subsets N of {1, 2} with the normal cloner for N = {1, 2}.

    Components with N != {1, 2} are singular on at least one clone. Their
    output lies outside the cutoff space and is kept only as leaked trace.
    """

    weights: Mapping[frozenset, float]
    normal: Channel
    components: Mapping[frozenset, Channel] = field(default_factory=dict)

    def __post_init__(self):
        w = {frozenset(k): float(v) for k, v in self.weights.items()}
        for key in w:
            if key not in SUBSETS:
                raise OpalgError(f"weight key {set(key)} is not a subset of {{1, 2}}")
        if any(v < 0 for v in w.values()):
            raise OpalgError("weights must be nonnegative")
        object.__setattr__(self, "weights", w)
        if not self.normal.is_trace_preserving:
            raise OpalgError("the normal component must be trace preserving")

    @property
    def total(self) -> float:
        return sum(self.weights.values())

    def is_normalized(self, tol: float = DEFAULT_TOL) -> bool:
        return abs(self.total - 1.0) <= tol

    @property
    def leaked(self) -> float:
        return sum(v for k, v in self.weights.items() if k != NORMAL)

    def with_normal_weight(self, c12: float) -> "ClonerDecomposition":
        """Set c_{12}; the remainder is spread over the other subsets in proportion."""
        others = {k: v for k, v in self.weights.items() if k != NORMAL}
        mass = sum(others.values())
        if mass > 0:
            rest = {k: (1 - c12) * v / mass for k, v in others.items()}
        else:
            rest = {frozenset(): 1 - c12}
        return ClonerDecomposition({**rest, NORMAL: c12}, self.normal, self.components)

    def assembled(self) -> Channel:
        """c_{12} Psi^{12} on the cutoff space; all other parts leak."""
        return self.normal.scaled(self.weights.get(NORMAL, 0.0))


@dataclass(frozen=True)
class FidelityScan:
    rows: tuple[tuple[float, float], ...]
    normal_fidelity: float
    grid_fidelities: tuple[float, ...]
    affine_deviation: float
    argmax: float

    @property
    def flatness(self) -> float:
        """Spread of the normal cloner's fidelity across the alpha grid."""
        return max(self.grid_fidelities) - min(self.grid_fidelities)


def worst_case_fidelity(ch: Channel, alpha_grid, mode: FockMode) -> tuple[float, list[float]]:
    vals = pmap(lambda a: joint_fidelity(ch, a, mode), list(alpha_grid))
    return min(vals), vals


def decomposed_fidelity_scan(
    dec: ClonerDecomposition, alpha_grid, mode: FockMode, steps: int = 11, tol: float = DEFAULT_TOL
) -> FidelityScan:
    """Worst-case joint fidelity as the normal weight c_{12} runs over [0, 1]."""
    if not dec.is_normalized(tol):
        raise OpalgError(f"decomposition weights sum to {dec.total}, not 1")
    alpha_grid = list(alpha_grid)
    f_normal, per_point = worst_case_fidelity(dec.normal, alpha_grid, mode)
    rows = []
    for c in np.linspace(0.0, 1.0, steps):
        f, _ = worst_case_fidelity(dec.with_normal_weight(float(c)).assembled(), alpha_grid, mode)
        rows.append((float(c), float(f)))
    dev = max(abs(f - c * f_normal) for c, f in rows)
    best = max(rows, key=lambda r: (r[1], r[0]))[0]
    return FidelityScan(tuple(rows), f_normal, tuple(per_point), dev, best)


def coherent_test_states(mode: FockMode, points: Sequence) -> list[np.ndarray]:
    out = []
    for a in points:
        v = coherent(a, mode.single())
        out.append(np.outer(v, v.conj()))
    return out
