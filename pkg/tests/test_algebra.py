import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import density, ginibre
from opalg.algebra import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    Functional,
    StarAlgebra,
    World,
    block_algebra,
    bloch_point,
    born_matrix,
    center,
    density_state,
    diagonal_algebra,
    evaluate,
    four_state_decomposition,
    full_matrix_algebra,
    generate_algebra,
    is_positive,
    is_pure,
    is_state,
    mixture,
    projection_additivity_check,
    reconstruct,
    state_gram,
    vector_state,
)
from opalg.errors import DimensionError, NotAProjectionError, NotAStateError, OpalgError
from opalg.linalg import random_unitary

seeds = st.integers(0, 2**32 - 1)


def brute_gram(f, A):
    L = len(A)
    return np.array([[np.trace(f.pairing @ A.basis[i].conj().T @ A.basis[j]) for j in range(L)] for i in range(L)])


# -- is_positive ---------------------------------------------------------------


def test_is_positive_examples():
    assert is_positive(np.eye(2))
    assert not is_positive(np.diag([1.0, -1.0]))
    m = np.array([[2.0, 1.0], [1.0, 1.0]])
    # eigenvalues (3 +- sqrt 5)/2 > 0
    assert min((3 + np.sqrt(5)) / 2, (3 - np.sqrt(5)) / 2) > 0
    assert is_positive(m)


def test_is_positive_rejects_non_hermitian_and_non_square():
    assert not is_positive(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(DimensionError):
        is_positive(np.ones((2, 3)))


# -- algebras ----------------------------------------------------------------


def test_generate_algebra_examples():
    assert generate_algebra([np.eye(3)]).dim == 1
    diag = generate_algebra([np.diag([1.0, 2.0])])
    assert diag.dim == 2
    for b in diag.basis:
        assert np.allclose(b, np.diag(np.diag(b)))
    assert generate_algebra([PAULI_X, PAULI_Z]).dim == 4


def test_generate_algebra_dimension_mismatch():
    with pytest.raises(DimensionError):
        generate_algebra([np.eye(2), np.eye(3)])


@given(seeds, st.integers(2, 4))
def test_generate_algebra_idempotent(seed, n):
    rng = np.random.default_rng(seed)
    gens = [np.diag(rng.normal(size=n)), np.kron(np.eye(1), np.diag(rng.normal(size=n)))]
    if n > 2:
        blk = np.zeros((n, n), dtype=complex)
        blk[:2, :2] = ginibre(rng, 2)
        gens.append(blk)
    A = generate_algebra(gens)
    assert generate_algebra(list(A.basis)).dim == A.dim


def test_star_algebra_validation():
    with pytest.raises(OpalgError):
        StarAlgebra(2, np.array([np.eye(2), np.eye(2)]))  # dependent
    with pytest.raises(OpalgError):
        StarAlgebra(2, np.array([PAULI_X]))  # no unit
    with pytest.raises(OpalgError):
        StarAlgebra(2, np.array([np.eye(2), np.array([[0, 1], [0, 0]])]))  # not *-closed


def test_center_examples():
    assert len(center(full_matrix_algebra(2))) == 1
    assert len(center(diagonal_algebra(2))) == 2
    assert len(center(block_algebra([1, 2]))) == 2


def test_center_matches_brute_force_commutant():
    A = block_algebra([1, 2, 2])
    # brute force: solve sum c_i [b_i, b_j] = 0 for all j
    L = len(A)
    rows = np.concatenate(
        [np.stack([(A.basis[i] @ b - b @ A.basis[i]).reshape(-1) for i in range(L)], axis=1) for b in A.basis]
    )
    null = L - np.linalg.matrix_rank(rows, tol=1e-9)
    Z = center(A)
    assert len(Z) == null == 3
    for z in Z:
        for b in A.basis:
            assert np.allclose(z @ b, b @ z, atol=1e-12)


# -- functionals and states --------------------------------------------------


def test_evaluate_examples():
    assert evaluate(Functional.from_pairing(np.eye(2) / 2), np.eye(2)) == pytest.approx(1)
    assert evaluate(Functional.from_pairing(np.diag([1.0, 0.0])), np.diag([3.0, 7.0])) == pytest.approx(3)
    assert abs(evaluate(Functional.from_pairing(np.eye(2) / 2), PAULI_X)) < 1e-15


def test_evaluate_dimension_mismatch():
    with pytest.raises(DimensionError):
        evaluate(Functional.from_pairing(np.eye(2)), np.eye(3))


@given(seeds)
def test_evaluate_is_linear(seed):
    rng = np.random.default_rng(seed)
    f = Functional.from_pairing(ginibre(rng, 3))
    a, b = ginibre(rng, 3), ginibre(rng, 3)
    z = complex(*rng.normal(size=2))
    assert abs(f(a + z * b) - f(a) - z * f(b)) < 1e-10


def test_is_state_examples():
    for n in (1, 2, 5):
        is_state(Functional.from_pairing(np.eye(n) / n))
    with pytest.raises(NotAStateError) as exc:
        is_state(Functional.from_pairing(np.diag([2.0, -1.0])))
    assert exc.value.condition == "positivity"
    assert exc.value.amount == pytest.approx(1.0)
    s = density_state(np.diag([0.7, 0.3]))
    assert not is_pure(s)


def test_is_state_normalization_rejection():
    with pytest.raises(NotAStateError) as exc:
        is_state(Functional.from_pairing(np.diag([0.5, 0.2])))
    assert exc.value.condition == "normalization"
    assert exc.value.amount == pytest.approx(0.3)


def test_state_gram_matches_brute_force(rng):
    A = block_algebra([1, 2])
    f = Functional.from_pairing(ginibre(rng, 3))
    assert np.allclose(state_gram(f, A), brute_gram(f, A), atol=1e-12)


def test_is_state_on_subalgebra_accepts_non_positive_pairing():
    # diag(1, 1, -1)/... is not a density matrix, but on the diagonal-block
    # algebra M_1 + M_1 + M_1 only the diagonal matters.
    lam = np.array([[0.5, 2.0, 0], [2.0, 0.5, 0], [0, 0, 0.0]])
    with pytest.raises(NotAStateError):
        is_state(Functional.from_pairing(lam))
    s = is_state(Functional.from_pairing(lam), diagonal_algebra(3))
    assert s.positivity_certificate >= -1e-12


@given(seeds, st.integers(1, 5))
def test_accepted_state_is_positive_on_squares(seed, n):
    rng = np.random.default_rng(seed)
    s = density_state(density(rng, n))
    for _ in range(5):
        a = ginibre(rng, n)
        val = s(a.conj().T @ a)
        assert val.real >= -1e-10 and abs(val.imag) <= 1e-10 * max(1, abs(val))


def test_vector_state_examples():
    s = vector_state([1, 0])
    assert np.allclose(s.pairing, np.diag([1, 0]))
    plus = np.array([1, 1]) / np.sqrt(2)
    s = vector_state(plus)
    assert np.allclose(s.pairing, np.full((2, 2), 0.5))
    assert abs(s(PAULI_Z)) < 1e-15
    with pytest.raises(NotAStateError):
        vector_state([1, 1])


@given(seeds, st.integers(1, 6))
def test_vector_state_is_pure_and_evaluates_inner_product(seed, n):
    rng = np.random.default_rng(seed)
    x = ginibre(rng, n, 1)[:, 0]
    x /= np.linalg.norm(x)
    s = vector_state(x)
    assert is_pure(s)
    T = ginibre(rng, n)
    assert abs(s(T) - np.vdot(x, T @ x)) < 1e-10


@given(seeds, st.floats(0.05, 0.95))
def test_proper_mixture_is_not_pure(seed, t):
    rng = np.random.default_rng(seed)
    u = random_unitary(3, rng)
    s1, s2 = vector_state(u[:, 0]), vector_state(u[:, 1])
    assert not is_pure(mixture([s1, s2], [t, 1 - t]))


def test_is_pure_examples():
    assert is_pure(density_state(np.diag([1.0, 0.0])))
    assert not is_pure(density_state(np.eye(2) / 2))
    assert not is_pure(density_state(np.diag([0.999, 0.001])), tol=1e-6)


def test_is_pure_needs_full_algebra():
    s = is_state(Functional.from_pairing(np.diag([1.0, 0.0])), diagonal_algebra(2))
    with pytest.raises(OpalgError):
        is_pure(s)


# -- four-state decomposition ----------------------------------------------


def test_four_state_examples():
    terms = four_state_decomposition(Functional.from_pairing(np.diag([1.0, 0.0])))
    assert len(terms) == 1 and terms[0][0] == pytest.approx(1)
    assert np.allclose(terms[0][1].pairing, np.diag([1, 0]))

    terms = four_state_decomposition(Functional.from_pairing(np.array([[0, 1], [0, 0]])))
    assert np.allclose([c for c, _ in terms], [0.5, -0.5, 0.5j, -0.5j])
    for _, s in terms:
        assert is_pure(s)

    terms = four_state_decomposition(Functional.from_pairing(-np.eye(2) / 2))
    assert len(terms) == 1 and terms[0][0] == pytest.approx(-1)
    assert np.allclose(terms[0][1].pairing, np.eye(2) / 2)


def test_four_state_zero_functional():
    assert four_state_decomposition(Functional.from_pairing(np.zeros((3, 3)))) == []


@given(seeds, st.integers(1, 8))
def test_four_state_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    f = Functional.from_pairing(ginibre(rng, n))
    terms = four_state_decomposition(f)
    assert len(terms) <= 4
    back = reconstruct(terms, n)
    assert np.max(np.abs(back.pairing - f.pairing)) <= 1e-10
    phases = [1, -1, 1j, -1j]
    for c, s in terms:
        is_state(s.base)
        # coefficient is a nonnegative multiple of one of the four phases
        assert any(abs(c / p - abs(c)) < 1e-12 for p in phases)


# -- projections -----------------------------------------------------------


def test_projection_additivity_examples():
    e1, e2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert projection_additivity_check(density_state(np.eye(2) / 2), [e1, e2]) == 0
    assert projection_additivity_check(vector_state([1, 0]), [e1]) == 0


@given(seeds)
def test_projection_additivity_random(seed):
    rng = np.random.default_rng(seed)
    s = density_state(density(rng, 4))
    u = random_unitary(4, rng)
    p1 = np.outer(u[:, 0], u[:, 0].conj())
    p2 = u[:, 1:3] @ u[:, 1:3].conj().T
    assert projection_additivity_check(s, [p1, p2]) <= 1e-12


def test_projection_errors_name_index():
    e1 = np.diag([1.0, 0.0])
    with pytest.raises(NotAProjectionError) as exc:
        projection_additivity_check(vector_state([1, 0]), [e1, np.diag([2.0, 0.0])])
    assert exc.value.index == 1
    with pytest.raises(NotAProjectionError) as exc:
        projection_additivity_check(vector_state([1, 0]), [e1, e1])
    assert exc.value.index == 1


# -- worlds ---------------------------------------------------------------


def test_born_examples():
    W = World.standard(3)
    assert np.allclose(born_matrix(W, W), np.eye(3))
    assert np.allclose(born_matrix(World.standard(2), World.rotated(np.pi / 4)), 0.5, atol=1e-15)
    assert np.allclose(born_matrix(World.standard(3), World.fourier(3)), 1 / 3, atol=1e-15)


@given(seeds, st.integers(1, 16))
def test_born_doubly_stochastic(seed, n):
    rng = np.random.default_rng(seed)
    m = born_matrix(World(n, random_unitary(n, rng)), World(n, random_unitary(n, rng)))
    assert np.max(np.abs(m.sum(axis=0) - 1)) <= 1e-10
    assert np.max(np.abs(m.sum(axis=1) - 1)) <= 1e-10


def test_world_identified_up_to_phases(rng):
    u = random_unitary(4, rng)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    assert World(4, u).same_as(World(4, u * phases))
    assert not World(4, u).same_as(World(4, u[:, ::-1]))


def test_world_rejects_non_unitary():
    with pytest.raises(OpalgError):
        World(2, np.array([[1, 1], [0, 1]]))
    with pytest.raises(DimensionError):
        born_matrix(World.standard(2), World.standard(3))


# -- Bloch ball -------------------------------------------------------------


def test_bloch_examples():
    assert np.allclose(bloch_point(density_state(np.eye(2) / 2)), 0)
    assert np.allclose(bloch_point(density_state(np.diag([1.0, 0.0]))), [0, 0, 1])
    assert np.allclose(bloch_point(density_state(np.full((2, 2), 0.5))), [1, 0, 0])


@given(seeds, st.floats(0, 1))
def test_bloch_affine_and_in_ball(seed, t):
    rng = np.random.default_rng(seed)
    s1, s2 = density_state(density(rng, 2)), density_state(density(rng, 2))
    mix = mixture([s1, s2], [t, 1 - t])
    assert np.allclose(bloch_point(mix), t * bloch_point(s1) + (1 - t) * bloch_point(s2), atol=1e-10)
    assert np.linalg.norm(bloch_point(mix)) <= 1 + 1e-10


@given(seeds)
def test_bloch_norm_one_iff_pure(seed):
    rng = np.random.default_rng(seed)
    x = ginibre(rng, 2, 1)[:, 0]
    s = vector_state(x / np.linalg.norm(x))
    assert np.linalg.norm(bloch_point(s)) == pytest.approx(1, abs=1e-10)
    # Pauli reconstruction oracle: rho = (I + r.sigma)/2
    r = bloch_point(s)
    rho = (np.eye(2) + r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z) / 2
    assert np.allclose(rho, s.pairing, atol=1e-12)
