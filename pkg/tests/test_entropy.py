"""Tests for histogramming and the three entropy estimators."""

from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from volentropy import (
    DegenerateSupportError,
    DomainError,
    FiniteVarianceWarning,
    Histogram,
    build_histogram,
    entropy_report,
    renyi,
    shannon,
    tsallis,
)


def hist(probs) -> Histogram:
    """Histogram over [0, 1] with the given cell probabilities."""
    p = np.asarray(probs, dtype=float)
    counts = np.rint(p * 10_000).astype(int)
    return Histogram(edges=np.linspace(0.0, 1.0, p.size + 1), counts=counts, probs=p)


# strategy: normalized probability vectors built from a coarse positive grid,
# so sums are well-behaved and zero cells appear regularly
@st.composite
def prob_vectors(draw):
    k = draw(st.integers(2, 8))
    raw = draw(st.lists(st.integers(0, 20), min_size=k, max_size=k).filter(lambda v: sum(v) > 0))
    w = np.asarray(raw, dtype=float)
    return w / w.sum()


# ------------------------------------------------------------------ histogram

def test_symmetric_split():
    h = build_histogram(np.array([0.0, 1.0, 2.0, 3.0]), 2)
    assert h.counts.tolist() == [2, 2]
    assert h.probs.tolist() == [0.5, 0.5]
    assert_allclose(h.edges, [0.0, 1.5, 3.0])


def test_maximum_lands_in_last_cell():
    h = build_histogram(np.array([0.0, 1.0]), 2)
    assert h.counts.tolist() == [1, 1]


def test_counts_sum_to_n_and_probs_to_one():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(257)
    h = build_histogram(x, 16)
    assert h.n == 257
    assert h.counts.sum() == 257
    assert h.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_uniform_draws_fill_cells_evenly():
    rng = np.random.default_rng(123)
    h = build_histogram(rng.uniform(0.0, 1.0, 1000), 10)
    assert np.all(h.probs >= 0.06) and np.all(h.probs <= 0.14)


def test_edges_are_equidistant():
    rng = np.random.default_rng(5)
    h = build_histogram(rng.standard_normal(500), 23)
    widths = np.diff(h.edges)
    assert np.abs(widths - widths.mean()).max() < 1e-12 * widths.mean()


def test_constant_sample_has_degenerate_support():
    with pytest.raises(DegenerateSupportError):
        build_histogram(np.full(10, 0.25), 4)


def test_histogram_input_validation():
    with pytest.raises(DomainError):
        build_histogram(np.array([]), 2)
    with pytest.raises(DomainError):
        build_histogram(np.array([0.0, np.nan, 1.0]), 2)
    with pytest.raises(DomainError):
        build_histogram(np.array([0.0, 1.0]), 0)


def test_histogram_type_invariants_enforced():
    edges = np.linspace(0.0, 1.0, 4)
    with pytest.raises(DomainError, match="equidistant"):
        Histogram(edges=np.array([0.0, 0.1, 0.9, 1.0]), counts=np.array([1, 1, 1]),
                  probs=np.full(3, 1 / 3))
    with pytest.raises(DomainError, match="sum to 1"):
        Histogram(edges=edges, counts=np.array([1, 1, 1]), probs=np.array([0.2, 0.2, 0.2]))
    with pytest.raises(DomainError, match="nonnegative"):
        Histogram(edges=edges, counts=np.array([1, 1, 1]), probs=np.array([-0.5, 0.75, 0.75]))
    with pytest.raises(DomainError, match="increasing"):
        Histogram(edges=np.array([0.0, 0.5, 0.5, 1.0]), counts=np.array([1, 1, 2]),
                  probs=np.array([0.25, 0.25, 0.5]))


# -------------------------------------------------------------------- shannon

def test_shannon_certain_event_is_zero():
    assert shannon(hist([1.0, 0.0, 0.0])) == 0.0


def test_shannon_uniform_two_cells():
    assert shannon(hist([0.5, 0.5])) == pytest.approx(math.log(2), rel=1e-15)


def test_shannon_direct_summation():
    expected = -0.25 * math.log(0.25) - 0.75 * math.log(0.75)  # 0.562335...
    assert shannon(hist([0.25, 0.75])) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.562335, abs=5e-7)


# ---------------------------------------------------------------------- renyi

def test_renyi_uniform_is_log_m_at_every_order():
    for m in (2, 3, 7, 16):
        h = hist(np.full(m, 1.0 / m))
        for alpha in (0.5, 1.0, 1.3, 2.0, 5.0):
            assert renyi(h, alpha) == pytest.approx(math.log(m), rel=1e-12)


def test_renyi_near_one_uses_shannon_limit():
    h = hist([0.25, 0.75])
    assert renyi(h, 1.0 + 1e-9) == pytest.approx(0.562335, abs=1e-4)
    assert renyi(h, 1.0) == shannon(h)


def test_renyi_order_two_direct():
    # sum p^2 = 0.0625 + 0.5625 = 0.625; value = -ln 0.625 = ln 1.6
    assert renyi(hist([0.25, 0.75]), 2.0) == pytest.approx(math.log(1.6), rel=1e-14)
    assert math.log(1.6) == pytest.approx(0.470004, abs=5e-7)


def test_renyi_rejects_nonpositive_order():
    h = hist([0.5, 0.5])
    for bad in (0.0, -1.0, math.nan):
        with pytest.raises(DomainError):
            renyi(h, bad)


# -------------------------------------------------------------------- tsallis

def test_tsallis_certain_event_is_zero():
    for q in (0.0, 0.5, 1.4, 2.0):
        assert tsallis(hist([1.0, 0.0]), q) == 0.0


def test_tsallis_uniform_two_cells_q2():
    assert tsallis(hist([0.5, 0.5]), 2.0) == pytest.approx(0.5, rel=1e-15)


def test_tsallis_direct_summation():
    expected = (1.0 - (0.25 ** 1.4 + 0.75 ** 1.4)) / 0.4
    assert tsallis(hist([0.25, 0.75]), 1.4) == pytest.approx(expected, rel=1e-14)


def test_tsallis_near_one_uses_shannon_limit():
    h = hist([0.25, 0.75])
    assert tsallis(h, 1.0) == shannon(h)
    assert tsallis(h, 1.0 + 5e-9) == shannon(h)


def test_tsallis_rejects_negative_index():
    with pytest.raises(DomainError):
        tsallis(hist([0.5, 0.5]), -0.1)


def test_tsallis_uniform_closed_form():
    for m in (2, 5, 12):
        h = hist(np.full(m, 1.0 / m))
        for q in (0.5, 1.4, 2.0):
            assert tsallis(h, q) == pytest.approx((1 - m ** (1 - q)) / (q - 1), rel=1e-12)


# ------------------------------------------------------------------ invariants

@settings(max_examples=200, deadline=None)
@given(prob_vectors())
def test_entropies_nonnegative_and_bounded(p):
    h = hist(p)
    m = p.size
    s = shannon(h)
    assert 0.0 <= s <= math.log(m) + 1e-12
    for alpha in (0.5, 1.4, 2.0, 5.0):
        r = renyi(h, alpha)
        assert r >= -1e-12
        if alpha > 1:
            assert r <= s + 1e-12
    for q in (0.5, 1.4, 1.5, 2.0):
        t = tsallis(h, q)
        assert -1e-12 <= t <= (1 - m ** (1 - q)) / (q - 1) + 1e-12


@settings(max_examples=200, deadline=None)
@given(prob_vectors())
def test_renyi_nonincreasing_in_order(p):
    h = hist(p)
    vals = [renyi(h, a) for a in (0.5, 1.0, 1.4, 1.45, 1.5, 2.0, 5.0)]
    for hi, lo in zip(vals, vals[1:]):
        assert lo <= hi + 1e-12


@settings(max_examples=150, deadline=None)
@given(prob_vectors())
def test_limit_continuity_near_one(p):
    h = hist(p)
    s = shannon(h)
    for order in (1.0 - 1e-6, 1.0 + 1e-6):
        assert abs(renyi(h, order) - s) <= 1e-4
        assert abs(tsallis(h, order) - s) <= 1e-4


@pytest.mark.parametrize("m", [2, 3, 10, 100])
def test_uniform_maximizes_all_entropies(m):
    # moving epsilon = 0.01 of mass between two cells must strictly lower
    # every entropy relative to the uniform histogram
    uniform = np.full(m, 1.0 / m)
    tilted = uniform.copy()
    tilted[0] -= 0.01
    tilted[-1] += 0.01
    hu, ht = hist(uniform), hist(tilted)
    assert shannon(ht) < shannon(hu)
    for alpha in (0.5, 1.45, 2.0):
        assert renyi(ht, alpha) < renyi(hu, alpha)
    for q in (0.5, 1.45, 2.0):
        assert tsallis(ht, q) < tsallis(hu, q)


def test_shannon_doubling_adds_log2():
    for m in (1, 2, 3, 5, 8, 16):
        gain = shannon(hist(np.full(2 * m, 0.5 / m))) - shannon(hist(np.full(m, 1.0 / m)))
        assert gain == pytest.approx(math.log(2), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(prob_vectors())
def test_matches_direct_expression_evaluation(p):
    # independent one-liner evaluations of each defining expression
    h = hist(p)
    nz = p[p > 0]
    assert shannon(h) == pytest.approx(float(-(nz * np.log(nz)).sum()), abs=1e-12)
    for alpha in (0.5, 1.4, 2.0):
        direct = math.log(float((nz ** alpha).sum())) / (1.0 - alpha)
        assert renyi(h, alpha) == pytest.approx(direct, abs=1e-12)
    for q in (0.5, 1.4, 2.0):
        direct = (1.0 - float((nz ** q).sum())) / (q - 1.0)
        assert tsallis(h, q) == pytest.approx(direct, abs=1e-12)


# -------------------------------------------------------------- entropy_report

def test_report_on_single_cell_histogram_is_all_zero():
    x = np.array([0.0, 0.2, 0.7, 1.0])
    rep = entropy_report(x, m=1)
    assert rep.shannon == 0.0
    assert all(v == 0.0 for _, v in rep.renyi)
    assert all(v == 0.0 for _, v in rep.tsallis)
    assert rep.bins == 1 and rep.n_obs == 4


def test_report_default_bins_is_ceil_sqrt_n():
    rng = np.random.default_rng(9)
    rep = entropy_report(rng.standard_normal(200))
    assert rep.bins == math.ceil(math.sqrt(200))  # 15
    assert rep.n_obs == 200


def test_report_default_grids():
    rng = np.random.default_rng(10)
    rep = entropy_report(rng.standard_normal(300))
    assert [a for a, _ in rep.renyi] == [1.4, 1.45, 1.5]
    assert [q for q, _ in rep.tsallis] == [1.4, 1.45, 1.5]


def test_report_values_consistent_with_histogram():
    rng = np.random.default_rng(11)
    x = rng.standard_normal(400)
    rep = entropy_report(x, m=20, alpha_grid=(1.4, 2.0), q_grid=(1.4,))
    h = build_histogram(x, 20)
    assert rep.shannon == shannon(h)
    assert rep.renyi == ((1.4, renyi(h, 1.4)), (2.0, renyi(h, 2.0)))
    assert rep.tsallis == ((1.4, tsallis(h, 1.4)),)


def test_q_outside_finite_variance_window_warns():
    rng = np.random.default_rng(12)
    x = rng.standard_normal(100)
    with pytest.warns(FiniteVarianceWarning, match=r"5/3"):
        entropy_report(x, q_grid=(2.0,))
    with pytest.warns(FiniteVarianceWarning):
        entropy_report(x, q_grid=(0.9, 1.4))


def test_default_grid_does_not_warn():
    rng = np.random.default_rng(13)
    x = rng.standard_normal(100)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        entropy_report(x)


def test_empty_grid_rejected():
    with pytest.raises(DomainError):
        entropy_report(np.array([0.0, 1.0]), alpha_grid=())
    with pytest.raises(DomainError):
        entropy_report(np.array([0.0, 1.0]), q_grid=())


def test_report_propagates_degenerate_support():
    with pytest.raises(DegenerateSupportError):
        entropy_report(np.zeros(25))
