"""Kernel values and Gram-matrix assembly."""

import numpy as np
import pytest
from scipy.linalg import cholesky

from ngpr import MATERN52, SQUARED_EXPONENTIAL, KernelSpec, build_gram, kernel_value


def test_value_at_zero_lag_is_signal_variance():
    for family in (SQUARED_EXPONENTIAL, MATERN52):
        spec = KernelSpec(family, length_scale=0.3, signal_variance=2.5)
        assert kernel_value(spec, 0.0) == 2.5


def test_se_value_at_one_length_scale():
    spec = KernelSpec(SQUARED_EXPONENTIAL, length_scale=0.1)
    assert abs(kernel_value(spec, 0.1) - np.exp(-0.5)) < 1e-12


def test_matern_decays_slower_than_se_in_the_tail():
    l = 0.1
    se = KernelSpec(SQUARED_EXPONENTIAL, length_scale=l)
    m52 = KernelSpec(MATERN52, length_scale=l)
    for r in (2.0 * l, 3.0 * l, 5.0 * l):
        assert kernel_value(m52, r) > kernel_value(se, r)


def test_kernel_value_rejects_negative_distance():
    spec = KernelSpec(SQUARED_EXPONENTIAL, length_scale=0.1)
    with pytest.raises(ValueError):
        kernel_value(spec, -0.1)


def test_values_non_increasing_in_distance():
    r = np.linspace(0.0, 3.0, 400)
    for family in (SQUARED_EXPONENTIAL, MATERN52):
        values = kernel_value(KernelSpec(family, length_scale=0.25), r)
        assert np.all(np.diff(values) <= 0)


def test_single_point_gram():
    spec = KernelSpec(SQUARED_EXPONENTIAL, length_scale=0.1, signal_variance=1.0,
                      jitter=1e-8)
    gram = build_gram(np.array([[0.4]]), None, spec)
    np.testing.assert_allclose(gram, [[1.0 * (1 + 1e-8)]])


def test_gram_symmetry_exact():
    rng = np.random.default_rng(1)
    pts = rng.uniform(0, 1, size=(15, 2))
    gram = build_gram(pts, None, KernelSpec(MATERN52, length_scale=0.4))
    assert np.array_equal(gram, gram.T)


def test_gram_with_jitter_admits_cholesky():
    rng = np.random.default_rng(2)
    # duplicated warped coordinates are legal inputs and must stay factorizable
    pts = np.repeat(rng.uniform(0, 1, size=(10, 1)), 2, axis=0)
    gram = build_gram(pts, None, KernelSpec(SQUARED_EXPONENTIAL, 0.2, jitter=1e-8))
    cholesky(gram, lower=True)


def test_empty_gram():
    spec = KernelSpec(SQUARED_EXPONENTIAL, 0.1)
    assert build_gram(np.empty((0, 1)), None, spec).shape == (0, 0)
    assert build_gram(np.empty((0, 1)), np.ones((3, 1)), spec).shape == (0, 3)


def test_cross_gram_gets_no_jitter():
    spec = KernelSpec(SQUARED_EXPONENTIAL, 0.1, jitter=1e-2)
    pts = np.array([[0.5]])
    assert build_gram(pts, pts, spec)[0, 0] == 1.0


def test_gram_invariant_under_shared_coordinate_shift():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1, size=(12, 1))
    spec = KernelSpec(MATERN52, length_scale=0.3)
    np.testing.assert_allclose(build_gram(pts, None, spec),
                               build_gram(pts + 7.25, None, spec), atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("cubic", 0.1)
    with pytest.raises(ValueError):
        KernelSpec(SQUARED_EXPONENTIAL, -0.1)
    with pytest.raises(ValueError):
        KernelSpec(SQUARED_EXPONENTIAL, 0.1, signal_variance=0.0)
    with pytest.raises(ValueError):
        KernelSpec(SQUARED_EXPONENTIAL, 0.1, jitter=-1e-9)
