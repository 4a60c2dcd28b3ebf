import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from photonic_rc.errors import DegenerateBatch
from photonic_rc.readout import (Normalizer, as_weights, calibrate, normalize, raw_output,
                                 threshold_classify)

powers = arrays(float, 16, elements=st.floats(0, 1e3))
bits = arrays(np.uint8, 16, elements=st.integers(0, 1))


def test_raw_output_basics():
    P = np.array([1.0, 2.5, 4.0])
    assert raw_output(np.zeros(3), P) == 0
    assert raw_output(np.ones(3), P) == 7.5
    assert raw_output(np.array([0, 1, 0]), P) == 2.5


def test_raw_output_batch():
    P = np.arange(6.0).reshape(2, 3)
    np.testing.assert_array_equal(raw_output([1, 0, 1], P), [2.0, 8.0])


def test_length_mismatch():
    with pytest.raises(ValueError):
        raw_output(np.ones(3), np.ones(4))


def test_as_weights_validates():
    assert as_weights([0, 1, 1]).dtype == np.uint8
    with pytest.raises(ValueError):
        as_weights([0, 2])
    with pytest.raises(ValueError):
        as_weights([0, 1], n_nodes=3)


@given(powers, bits, bits)
def test_disjoint_additivity(P, a, b):
    b = b & ~a
    assert raw_output(a, P) + raw_output(b, P) == pytest.approx(raw_output(a | b, P), rel=1e-12, abs=1e-12)


@given(powers, bits, st.integers(0, 15))
def test_adding_a_weight_never_decreases(P, w, i):
    w2 = w.copy()
    w2[i] = 1
    assert raw_output(w2, P) >= raw_output(w, P)


def test_calibrate_simple():
    n = calibrate([0.0, 2.0])
    assert (n.mu, n.sigma) == (1.0, 1.0)


def test_calibrate_population_std():
    n = calibrate([1.0, 2.0, 3.0, 4.0])
    assert n.sigma == pytest.approx(np.sqrt(1.25))


@pytest.mark.parametrize("batch", [[3.0, 3.0, 3.0], [0.0, 0.0], [0.1] * 50])
def test_constant_batch_degenerate(batch):
    with pytest.raises(DegenerateBatch):
        calibrate(batch)


def test_single_sample_rejected():
    with pytest.raises(ValueError):
        calibrate([1.0])


def test_recalibration_idempotent():
    raw = np.random.default_rng(0).random(40) * 7 + 3
    z = normalize(raw, calibrate(raw))
    n2 = calibrate(z)
    assert abs(n2.mu) < 1e-12 and abs(n2.sigma - 1) < 1e-12


def test_normalize_points():
    n = Normalizer(2.0, 0.5)
    assert normalize(2.0, n) == 0
    assert normalize(2.5, n) == 1
    assert n.invert(1.0) == 2.5


def test_affine_invariance():
    rng = np.random.default_rng(1)
    for _ in range(20):
        raw = rng.random(30) * 10
        a, b = rng.uniform(0.1, 10), rng.uniform(-5, 5)
        np.testing.assert_allclose(normalize(a * raw + b, calibrate(a * raw + b)),
                                   normalize(raw, calibrate(raw)), atol=1e-12)


def test_threshold_strict():
    assert threshold_classify(0.5, (0.0, 1.0)) == 0
    assert threshold_classify(1.2, (0.0, 1.0)) == 1
    assert threshold_classify(-0.3, (0.0, 1.0)) == 0
    np.testing.assert_array_equal(threshold_classify(np.array([-1, 0, 0.01]), (-1, 1)), [0, 0, 1])


def test_decisions_invariant_under_positive_affine_rescaling():
    rng = np.random.default_rng(2)
    raw = rng.random(50)
    targets = (rng.random(50) < 0.5).astype(float)
    tn = calibrate(targets)
    levels = normalize(np.array([0.0, 1.0]), tn)
    base = threshold_classify(normalize(raw, calibrate(raw)), levels)
    for a, b in [(3.0, 1.0), (0.01, -4.0), (100.0, 0.0)]:
        scaled = a * raw + b
        np.testing.assert_array_equal(threshold_classify(normalize(scaled, calibrate(scaled)), levels), base)
