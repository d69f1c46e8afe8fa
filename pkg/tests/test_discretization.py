from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cpburgers.cpkernel import CpParams, compute_weights
from cpburgers.discretization import (
    SpaceGrid,
    backward_diff,
    central_diff,
    history_rhs,
    inner_product_h,
    nonlinear_term,
    norm_h,
    norm_inf,
    second_diff,
)
from cpburgers.errors import ParameterError

SIZES = (8, 64, 512)


def interior(rng, M):
    return rng.standard_normal(M - 1) * rng.uniform(0.1, 10.0)


def test_grid():
    g = SpaceGrid(8, L=2.0)
    assert g.h == 0.25 and g.n_interior == 7
    np.testing.assert_allclose(g.x, 0.25 * np.arange(1, 8))
    assert not g.x.flags.writeable
    for M, L in [(2, 1.0), (3.5, 1.0), (8, 0.0), (8, -1.0), (8, math.inf)]:
        with pytest.raises(ParameterError):
            SpaceGrid(M, L)


def test_stencils_against_loops():
    g = SpaceGrid(6, L=1.5)
    w = np.array([0.3, -1.2, 2.0, 0.7, -0.4])
    wp = [0.0, *w, 0.0]
    h = g.h
    np.testing.assert_allclose(second_diff(w, g),
                               [(wp[i + 1] - 2 * wp[i] + wp[i - 1]) / h**2 for i in range(1, 6)])
    np.testing.assert_allclose(central_diff(w), [wp[i + 1] - wp[i - 1] for i in range(1, 6)])
    np.testing.assert_allclose(backward_diff(w, g), [(wp[i] - wp[i - 1]) / h for i in range(1, 7)])
    psi = [(wp[i] * (wp[i + 1] - wp[i - 1]) + wp[i + 1]**2 - wp[i - 1]**2) / (6 * h)
           for i in range(1, 6)]
    np.testing.assert_allclose(nonlinear_term(w, g), psi)


@pytest.mark.parametrize("M", SIZES)
def test_skew_symmetry(M):
    rng = np.random.default_rng(M)
    g = SpaceGrid(M)
    for _ in range(50):
        w = interior(rng, M)
        val = inner_product_h(w * central_diff(w) + central_diff(w * w), w, g)
        assert abs(val) <= 1.0e-12 * norm_h(w, g) ** 3
        assert abs(inner_product_h(nonlinear_term(w, g), w, g)) <= 1.0e-12 * norm_h(w, g) ** 3 / g.h


@pytest.mark.parametrize("M", SIZES)
def test_summation_by_parts_and_sobolev(M):
    rng = np.random.default_rng(M + 1)
    g = SpaceGrid(M, L=rng.uniform(0.5, 3.0))
    for _ in range(50):
        w1, w2 = interior(rng, M), interior(rng, M)
        d1, d2 = backward_diff(w1, g), backward_diff(w2, g)
        lhs = inner_product_h(second_diff(w1, g), w2, g)
        rhs = -inner_product_h(d1, d2, g)
        assert abs(lhs - rhs) <= 1.0e-12 * norm_h(d1, g) * norm_h(d2, g)
        assert norm_inf(w1) <= math.sqrt(g.L) / 2 * norm_h(d1, g) * (1 + 1e-12)


def test_sobolev_is_sharp_for_a_tent():
    # the tent peaked at the midpoint attains the bound
    M = 16
    g = SpaceGrid(M)
    w = np.minimum(g.x, g.L - g.x)
    assert norm_inf(w) == pytest.approx(math.sqrt(g.L) / 2 * norm_h(backward_diff(w, g), g), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(2, 40), elements=st.floats(-1e3, 1e3)))
def test_skew_symmetry_property(w):
    g = SpaceGrid(w.size + 1)
    val = inner_product_h(nonlinear_term(w, g), w, g)
    scale = max(norm_h(w, g) ** 3 / g.h, 1e-300)
    assert abs(val) <= 1.0e-12 * scale


def test_consistency_orders():
    e2, e1 = [], []
    for M in (32, 64, 128):
        g = SpaceGrid(M)
        u = np.sin(np.pi * g.x)
        e2.append(norm_inf(second_diff(u, g) + np.pi**2 * u))
        e1.append(norm_inf(nonlinear_term(u, g) - u * np.pi * np.cos(np.pi * g.x)))
    for e in (e2, e1):
        assert abs(math.log2(e[-2] / e[-1]) - 2) < 0.05


def test_inner_product_sizes():
    g = SpaceGrid(5)
    with pytest.raises(ParameterError):
        inner_product_h(np.ones(4), np.ones(5), g)
    with pytest.raises(ParameterError):
        inner_product_h(np.ones(3), np.ones(3), g)
    with pytest.raises(ParameterError):
        second_diff(np.ones(5), g)
    assert inner_product_h(np.ones(5), np.ones(5), g) == pytest.approx(1.0)


def test_history_rhs_signs():
    w = compute_weights(CpParams(0.5), 0.1, 10)
    rng = np.random.default_rng(3)
    levels = rng.standard_normal((5, 4))
    f = rng.standard_normal(4)
    k = 5
    base = w.mu * f + sum((w.a[k - j - 1] - w.a[k - j]) * levels[j] for j in range(1, k))
    np.testing.assert_allclose(history_rhs(levels, w, k, f), base + w.a[k - 1] * levels[0])
    np.testing.assert_allclose(history_rhs(levels, w, k, f, u0_sign="literal"),
                               base - w.a[k - 1] * levels[0])
    with pytest.raises(ParameterError):
        history_rhs(levels, w, k, f, u0_sign="plus")
    with pytest.raises(ParameterError):
        history_rhs(levels, w, 6, f)
