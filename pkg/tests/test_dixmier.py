import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opalg.dixmier import (
    EigenSequence,
    LogMeanSeries,
    eigen_sequence_from_matrix,
    generalized_limit,
    geometric_grid,
    is_dixmier_bounded,
    log_mean,
    log_mean_series,
    parse_formula,
    partial_sums,
    singularity_witness,
)
from opalg.errors import DimensionError, MonotonicityError, OpalgError

EULER_GAMMA = 0.5772156649015329


def harmonic(n):
    """Euler-Maclaurin expansion of sum_{k<=n} 1/k."""
    return math.log(n) + EULER_GAMMA + 1 / (2 * n) - 1 / (12 * n**2) + 1 / (120 * n**4)


def basel(n):
    """Euler-Maclaurin expansion of sum_{k<=n} 1/k^2."""
    return math.pi**2 / 6 - 1 / n + 1 / (2 * n**2) - 1 / (6 * n**3)


def direct_sum(fn, n):
    return math.fsum(fn(k) for k in range(1, n + 1))


# -- sequences --------------------------------------------------------------


def test_formula_parser():
    f = parse_formula("1/k + log(k)*0")
    assert np.allclose(f(np.array([1.0, 2.0])), [1.0, 0.5])
    for bad in ("__import__('os')", "k.real", "lambda: 1", "foo(k)"):
        with pytest.raises(OpalgError):
            parse_formula(bad)


def test_explicit_values_with_tail():
    seq = EigenSequence.from_values([5.0, 3.0], n_max=6, tail="1/k")
    assert np.allclose(seq.block(1, 7), [5, 3, 1 / 3, 1 / 4, 1 / 5, 1 / 6])
    assert np.allclose(EigenSequence.from_values([2.0, 1.0], n_max=4).block(1, 5), [2, 1, 0, 0])


def test_monotonicity_errors_locate_index():
    with pytest.raises(MonotonicityError) as exc:
        partial_sums(EigenSequence.from_values([3.0, 2.0, 2.5, 1.0]), [4])
    assert exc.value.index == 3
    with pytest.raises(MonotonicityError) as exc:
        partial_sums(EigenSequence.from_values([1.0, -0.5]), [2])
    assert exc.value.index == 2
    with pytest.raises(MonotonicityError):
        log_mean(EigenSequence.from_formula("k", 10), 10)
    with pytest.raises(DimensionError):
        partial_sums(EigenSequence.from_values([1.0]), [2])


def test_partial_sums_match_direct_sum():
    seq = EigenSequence.from_formula("1/k", 5000)
    S = partial_sums(seq, [1, 7, 100, 5000])
    for n, v in S.items():
        exact = direct_sum(lambda k: 1 / k, n)
        assert abs(v - exact) <= math.ulp(exact)


def test_eigen_sequence_from_matrix(rng):
    u = np.linalg.qr(rng.normal(size=(5, 5)))[0]
    T = u @ np.diag([0.1, 0.5, 0.2, 0.0, 0.3]) @ u.T
    seq = eigen_sequence_from_matrix(T, tail="0*k", n_max=10)
    assert np.allclose(seq.block(1, 11), [0.5, 0.3, 0.2, 0.1, 0, 0, 0, 0, 0, 0], atol=1e-12)
    with pytest.raises(OpalgError):
        eigen_sequence_from_matrix(np.diag([1.0, -1.0]))
    with pytest.raises(OpalgError):
        eigen_sequence_from_matrix(np.array([[0, 1.0], [0, 0]]))


# -- log means --------------------------------------------------------------


def test_log_mean_examples():
    n = 10**6
    L = math.log1p(n)
    fin = EigenSequence.from_values([1.0, 1.0], n_max=n)
    assert log_mean(fin, n) == pytest.approx(2 / L, rel=1e-15)
    assert log_mean(fin, n) == pytest.approx(0.1448, abs=5e-5)
    h = log_mean(EigenSequence.from_formula("1/k", n), n)
    assert h == pytest.approx(harmonic(n) / L, rel=1e-14)
    assert h == pytest.approx(1.0418, abs=5e-5)
    b = log_mean(EigenSequence.from_formula("k**-2.0", n), n)
    assert b == pytest.approx(basel(n) / L, rel=1e-14)
    assert b == pytest.approx(0.119, abs=5e-4)


def test_geometric_grid():
    g = geometric_grid(1000)
    assert g[0] == 1 and g[-1] == 1000
    assert np.all(np.diff(g) > 0)
    assert set(g[:-1]) == {math.ceil(1.5**j) for j in range(18) if math.ceil(1.5**j) <= 1000}


def test_series_sup_dominates(rng):
    s = log_mean_series(EigenSequence.from_formula("1/k", 10**4))
    assert np.all(s.values >= 0)
    assert s.sup_estimate >= s.values.max()


def test_boundedness_examples():
    ok, sup = is_dixmier_bounded(EigenSequence.from_formula("1/k", 10**7))
    assert ok
    # sigma_n decreases towards 1, so the sup is sigma_1 = 1/log 2
    assert sup == pytest.approx(1 / math.log(2), rel=1e-15)
    ok, _ = is_dixmier_bounded(EigenSequence.from_formula("k**-0.5", 10**6))
    assert not ok
    ok, sup = is_dixmier_bounded(EigenSequence.from_values([1.0, 1.0], n_max=10**6))
    assert ok and log_mean_series(EigenSequence.from_values([1.0, 1.0], n_max=10**6)).values[-1] < 0.15


# -- generalized limit -------------------------------------------------------


def test_constant_series():
    ns = geometric_grid(10**5)
    lim = generalized_limit(LogMeanSeries(ns, np.full(len(ns), 0.7)))
    assert lim.estimate == pytest.approx(0.7, abs=1e-14)
    assert lim.spread <= 1e-14


def test_insufficient_samples():
    with pytest.raises(OpalgError):
        generalized_limit(LogMeanSeries(np.array([1, 2, 3]), np.ones(3)), depth=3)


def test_harmonic_limit():
    lim = generalized_limit(log_mean_series(EigenSequence.from_formula("1/k", 10**6)))
    assert abs(lim.estimate - 1) <= 0.05
    assert abs(lim.estimate - 1) <= lim.spread
    assert lim.dilation_shift <= lim.spread


def test_basel_estimate_decreases_with_horizon():
    seq = EigenSequence.from_formula("k**-2.0", 10**6)
    ests = [generalized_limit(log_mean_series(seq, h)).estimate for h in (10**4, 10**5, 10**6)]
    assert ests[0] > ests[1] > ests[2]
    assert ests[-1] <= 0.15


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_estimate_is_linear(a, b):
    x = log_mean_series(EigenSequence.from_formula("1/k", 10**4))
    y = log_mean_series(EigenSequence.from_formula("k**-0.5", 10**4))
    combo = LogMeanSeries(x.ns, a * x.values + b * y.values)
    ex, ey, ec = (generalized_limit(s) for s in (x, y, combo))
    bound = abs(a) * ex.spread + abs(b) * ey.spread
    assert abs(ec.estimate - (a * ex.estimate + b * ey.estimate)) <= max(bound, 1e-12)
    # the estimator is a linear map, so the identity holds to rounding
    assert abs(ec.estimate - (a * ex.estimate + b * ey.estimate)) <= 1e-10 * (1 + abs(a) + abs(b)) * 10


@st.composite
def nonincreasing_sequences(draw):
    head = sorted(draw(st.lists(st.floats(0, 10), min_size=1, max_size=30)), reverse=True)
    tail = draw(st.sampled_from([None, "0*k", "1/k", "k**-2.0", "k**-1.5"]))
    if tail is not None and tail != "0*k":
        # keep the sequence monotone across the junction
        scale = head[-1] * len(head) ** (1.0 if tail == "1/k" else 2.0 if tail == "k**-2.0" else 1.5)
        tail = f"{scale!r}*{tail}"
    return EigenSequence.from_values(head, n_max=10**5, tail=tail)


@given(nonincreasing_sequences())
def test_positivity_and_doubling(seq):
    series = log_mean_series(seq)
    lim = generalized_limit(series)
    assert lim.estimate >= -lim.spread - 1e-12
    assert lim.dilation_shift <= lim.spread + 1e-12


# -- singularity witness ----------------------------------------------------


def test_witness_examples():
    w = singularity_witness(EigenSequence.from_formula("1/k", 10**6))
    assert w.head_shifts[100] <= 0.01
    assert w.head_shifts[100] <= w.spread
    assert not w.trace_class

    fin = singularity_witness(EigenSequence.from_values([1.0, 1.0], n_max=10**6))
    assert fin.estimate <= 1e-3
    assert fin.trace_class and fin.head_insensitive

    basel = singularity_witness(EigenSequence.from_formula("k**-2.0", 10**6))
    assert basel.trace_class
    assert basel.estimate <= 0.15


def test_head_shifts_shrink_with_horizon():
    seq = EigenSequence.from_formula("1/k", 10**6)
    shifts = [singularity_witness(seq, h).sigma_head_shifts[1000] for h in (10**4, 10**5, 10**6)]
    assert shifts[0] >= shifts[1] >= shifts[2]
    assert shifts[2] < shifts[0]
