"""GNS representations of states on matrix *-algebras.

The GNS space of a state rho on A is A modulo the left ideal
{a : rho(a^* a) = 0}, with inner product <a, b> = rho(b^* a). Here A is given
by a basis b_1..b_L, so the construction reduces to linear algebra on the
L x L Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import block_diag

from .algebra import DEFAULT_TOL, Functional, StarAlgebra, State, is_state, state_gram
from .errors import (
    DimensionError,
    HomomorphismError,
    InequivalentRepresentations,
    OpalgError,
    ToleranceError,
)
from .linalg import dag, fix_phase, hermitian_part, numerical_rank, null_space, opnorm, orthonormal_columns, vec_stack


def gram_matrix(A: StarAlgebra, rho: State) -> np.ndarray:
    """G[i, j] = rho(b_j^* b_i), i.e. the GNS inner product <b_i, b_j>."""
    if A.ambient_dim != rho.dim:
        raise DimensionError("state and algebra dimensions differ")
    return state_gram(rho.base, A).T


@dataclass(frozen=True, eq=False)
class GnsRepresentation:
    """Cyclic representation (pi, H, x) recovering a state.

    ``quotient_map`` sends algebra coordinates to coordinates in an
    orthonormal basis of the quotient space. ``rep_matrices[i]`` is pi(b_i).
    """

    source: StarAlgebra
    state: State
    quotient_dim: int
    gram: np.ndarray
    quotient_map: np.ndarray
    rep_matrices: np.ndarray
    cyclic_vector: np.ndarray

    def pi(self, a) -> np.ndarray:
        return np.tensordot(self.source.coords(a), self.rep_matrices, axes=1)

    def vector_expectation(self, a) -> complex:
        x = self.cyclic_vector
        return complex(x.conj() @ self.pi(a) @ x)

    def basis_expectations(self) -> np.ndarray:
        x = self.cyclic_vector
        return np.einsum("p,ipq,q->i", x.conj(), self.rep_matrices, x)

    def homomorphism_residuals(self) -> tuple[float, float]:
        """Max violations of pi(b_i b_j) = pi(b_i) pi(b_j) and pi(b_i^*) = pi(b_i)^*."""
        r = self.rep_matrices
        prod_lhs = np.tensordot(self.source.structure, r, axes=([1], [0]))
        prod_rhs = r[:, None] @ r[None, :]
        prod = float(np.max(np.abs(prod_lhs - prod_rhs), initial=0.0))
        adj = 0.0
        for i, b in enumerate(self.source.basis):
            adj = max(adj, opnorm(self.pi(dag(b)) - dag(r[i])))
        return prod, adj

    def cyclic_rank(self, tol: float = DEFAULT_TOL) -> int:
        orbit = np.einsum("ipq,q->pi", self.rep_matrices, self.cyclic_vector)
        return numerical_rank(orbit, tol)

    def conjugate(self, v) -> "GnsRepresentation":
        """The unitarily equivalent representation v pi(.) v^*, cyclic vector v x."""
        v = np.asarray(v, dtype=complex)
        reps = np.einsum("pq,iqr,rs->ips", v, self.rep_matrices, dag(v))
        return GnsRepresentation(
            self.source, self.state, self.quotient_dim, self.gram,
            v @ self.quotient_map, reps, v @ self.cyclic_vector,
        )


def gns_construct(A: StarAlgebra, rho: State, tol: float = DEFAULT_TOL) -> GnsRepresentation:
    """Build the GNS representation of ``rho`` restricted to ``A``.

    The quotient basis comes from the eigenvectors of the Gram metric with
    eigenvalue above ``tol * max``, scaled by 1/sqrt(eigenvalue).
    """
    rho = is_state(rho.base, A, tol)
    g = gram_matrix(A, rho)
    metric = hermitian_part(g.T)  # <sum c_i b_i, sum d_j b_j> = d^H metric c
    w, v = np.linalg.eigh(metric)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    keep = w > tol * w[0]
    w, v = w[keep], fix_phase(v[:, keep])
    q = np.sqrt(w)[:, None] * dag(v)
    u = v / np.sqrt(w)[None, :]
    reps = q @ A.structure @ u
    rep = GnsRepresentation(A, rho, len(w), g, q, reps, q @ A.unit_coords)
    bound = max(1e-6, 1e3 * tol)
    recon = float(np.max(np.abs(rep.basis_expectations() - np.array([rho(b) for b in A.basis]))))
    prod, adj = rep.homomorphism_residuals()
    if max(recon, prod, adj) > bound:
        raise ToleranceError(f"GNS residuals too large: recon {recon:.2e}, product {prod:.2e}, adjoint {adj:.2e}")
    return rep


def verify_reconstruction(rep: GnsRepresentation, samples, tol: float = DEFAULT_TOL) -> float:
    """max |rho(a) - <pi(a) x, x>| over ``samples``.

    Raises:
        OpalgError: if a sample does not lie in the algebra.
    """
    worst = 0.0
    for k, a in enumerate(samples):
        a = np.asarray(a, dtype=complex)
        if rep.source.span_residual(a) > tol * max(1.0, float(np.max(np.abs(a)))):
            raise OpalgError(f"sample {k} lies outside the algebra")
        worst = max(worst, abs(rep.state(a) - rep.vector_expectation(a)))
    return worst


@dataclass(frozen=True)
class Intertwiner:
    unitary: np.ndarray
    unitarity_residual: float
    intertwining_residual: float
    cyclic_residual: float


def intertwiner(rep1: GnsRepresentation, rep2: GnsRepresentation, tol: float = DEFAULT_TOL) -> Intertwiner:
    """Unitary U with U pi1(a) = pi2(a) U and U x1 = x2.

    Raises:
        InequivalentRepresentations: if the two representations recover
            different states; ``witness`` names a separating basis element.
    """
    if rep1.source is not rep2.source and not (
        rep1.source.basis.shape == rep2.source.basis.shape
        and np.allclose(rep1.source.basis, rep2.source.basis)
    ):
        raise OpalgError("representations are of different algebras")
    e1, e2 = rep1.basis_expectations(), rep2.basis_expectations()
    gaps = np.abs(e1 - e2)
    if gaps.max() > tol:
        k = int(np.argmax(gaps))
        raise InequivalentRepresentations(k, float(gaps[k]))
    if rep1.quotient_dim != rep2.quotient_dim:
        raise ToleranceError("equal states but different quotient dimensions")
    orbit1 = np.einsum("ipq,q->pi", rep1.rep_matrices, rep1.cyclic_vector)
    orbit2 = np.einsum("ipq,q->pi", rep2.rep_matrices, rep2.cyclic_vector)
    u = orbit2 @ np.linalg.pinv(orbit1)
    m = rep1.quotient_dim
    unit_res = opnorm(dag(u) @ u - np.eye(m))
    inter = max(
        opnorm(u @ p1 - p2 @ u) for p1, p2 in zip(rep1.rep_matrices, rep2.rep_matrices)
    )
    cyc = float(np.linalg.norm(u @ rep1.cyclic_vector - rep2.cyclic_vector))
    if unit_res > max(1e-6, 1e3 * tol):
        raise ToleranceError(f"orbit map is not isometric (residual {unit_res:.2e})")
    return Intertwiner(u, unit_res, inter, cyc)


@dataclass(frozen=True, eq=False)
class CentralSplit:
    """Central projection E with ker(pi) = A (1 - E), and phi = pi on A E."""

    source: StarAlgebra
    hom_images: np.ndarray
    E: np.ndarray
    ae_basis: np.ndarray      # (r, n, n), orthonormal basis of A E
    ae_images: np.ndarray     # (r, m, m), phi of each ae_basis element

    def hom(self, a) -> np.ndarray:
        return np.tensordot(self.source.coords(a), self.hom_images, axes=1)

    def phi(self, x) -> np.ndarray:
        """phi on A E; identical to pi there."""
        return self.hom(x)

    def phi_residual(self) -> float:
        """max_i ||phi(b_i E) - pi(b_i)||."""
        return max(
            opnorm(self.phi(b @ self.E) - img)
            for b, img in zip(self.source.basis, self.hom_images)
        )

    def injectivity_gap(self, tol: float = DEFAULT_TOL) -> int:
        """dim(A E) - rank(phi); zero iff phi is injective."""
        if len(self.ae_basis) == 0:
            return 0
        return len(self.ae_basis) - numerical_rank(vec_stack(self.ae_images), tol)

    def projection_residuals(self) -> dict[str, float]:
        E = self.E
        return {
            "idempotent": float(np.max(np.abs(E @ E - E))),
            "selfadjoint": float(np.max(np.abs(E - dag(E)))),
            "central": max(float(np.max(np.abs(E @ b - b @ E))) for b in self.source.basis),
        }


def check_homomorphism(A: StarAlgebra, images: np.ndarray, tol: float = DEFAULT_TOL) -> None:
    """Raise HomomorphismError unless ``images`` extend to a *-homomorphism."""
    scale = max(1.0, float(np.max(np.abs(images), initial=0.0)))
    lhs = np.tensordot(A.structure, images, axes=([1], [0]))
    rhs = images[:, None] @ images[None, :]
    res = float(np.max(np.abs(lhs - rhs), initial=0.0))
    if res > tol * scale**2:
        raise HomomorphismError("product", res)
    for i, b in enumerate(A.basis):
        adj = np.tensordot(A.coords(dag(b)), images, axes=1)
        r = float(np.max(np.abs(adj - dag(images[i])), initial=0.0))
        if r > tol * scale:
            raise HomomorphismError("adjoint", r)


def kernel_central_projection(A: StarAlgebra, hom_images, tol: float = DEFAULT_TOL) -> CentralSplit:
    """Central projection E whose complement generates the kernel of pi.

    ``hom_images[i]`` is pi(b_i). The kernel is a two-sided ideal; its unit
    P is central in A and E = 1 - P.
    """
    imgs = np.asarray(hom_images, dtype=complex)
    if imgs.ndim != 3 or len(imgs) != len(A) or imgs.shape[1] != imgs.shape[2]:
        raise DimensionError("need one square image per basis element")
    check_homomorphism(A, imgs, tol)
    n = A.ambient_dim
    kcoef = null_space(vec_stack(imgs), tol)
    kernel = [A.element(c) for c in kcoef.T]
    if kernel:
        # unit of the ideal: p in span(kernel) with p j = j for every j
        lhs = np.stack([np.concatenate([(jk @ jl).reshape(-1) for jl in kernel]) for jk in kernel], axis=1)
        rhs = np.concatenate([jl.reshape(-1) for jl in kernel])
        y = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
        P = sum(yk * jk for yk, jk in zip(y, kernel))
    else:
        P = np.zeros((n, n), dtype=complex)
    E = np.eye(n) - P
    ae = orthonormal_columns(vec_stack([b @ E for b in A.basis]), tol)
    ae_basis = ae.T.reshape(-1, n, n)
    split = CentralSplit(A, imgs, E, ae_basis, np.zeros((0,) + imgs.shape[1:], dtype=complex))
    ae_images = np.array([split.hom(x) for x in ae_basis]) if len(ae_basis) else split.ae_images
    split = CentralSplit(A, imgs, E, ae_basis, ae_images)
    if max(split.projection_residuals().values()) > max(1e-6, 1e3 * tol):
        raise ToleranceError(f"kernel unit is not a central projection: {split.projection_residuals()}")
    return split


def lambda_E(f: Functional, split: CentralSplit) -> Functional:
    """The functional T -> f(T E) on the split's algebra.

    For central E and T in A, tr(L T E) = tr(E L E T), so the compressed
    pairing E L E represents it.
    """
    if f.ambient_dim != split.source.ambient_dim:
        raise DimensionError("functional and split dimensions differ")
    E = split.E
    return Functional(f.ambient_dim, E @ f.pairing @ E)


@dataclass(frozen=True, eq=False)
class DirectSumRepresentation:
    """Finite direct sum of GNS representations over a list of states."""

    source: StarAlgebra
    blocks: tuple[GnsRepresentation, ...]
    rep_matrices: np.ndarray

    @property
    def dim(self) -> int:
        return self.rep_matrices.shape[1]

    def pi(self, a) -> np.ndarray:
        return np.tensordot(self.source.coords(a), self.rep_matrices, axes=1)


def universal_representation(A: StarAlgebra, states: Sequence[State], tol: float = DEFAULT_TOL) -> DirectSumRepresentation:
    if not states:
        raise OpalgError("need at least one state")
    blocks = tuple(gns_construct(A, s, tol) for s in states)
    mats = np.array([block_diag(*[b.rep_matrices[i] for b in blocks]) for i in range(len(A))])
    return DirectSumRepresentation(A, blocks, mats)
