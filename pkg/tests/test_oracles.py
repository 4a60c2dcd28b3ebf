import itertools

import numpy as np
import pytest

from photonic_rc.oracles import exhaustive_oracle, ridge_oracle
from photonic_rc.readout import calibrate, normalize, raw_output
from photonic_rc.trainer import TrainerConfig, mse, train


def problem(n=8, batch=50, seed=0):
    rng = np.random.default_rng(seed)
    return rng.random((batch, n)) + 0.05, (rng.random(batch) < 0.5).astype(float)


def loop_oracle(P, targets):
    t = normalize(targets, calibrate(targets))
    best = np.inf
    for bits in itertools.product((0, 1), repeat=P.shape[1]):
        raw = raw_output(np.array(bits), P)
        if raw.std() == 0:
            continue
        best = min(best, mse(normalize(raw, calibrate(raw)), t))
    return best


@pytest.mark.parametrize("seed", range(3))
def test_exhaustive_matches_loop(seed):
    P, y = problem(seed=seed)
    w, eps = exhaustive_oracle(P, y, chunk=37)
    assert eps == pytest.approx(loop_oracle(P, y), abs=1e-12)
    raw = raw_output(w, P)
    assert mse(normalize(raw, calibrate(raw)), normalize(y, calibrate(y))) == pytest.approx(eps, abs=1e-12)


def test_single_node_perfect_separation():
    P = np.array([[1.0], [1.0], [3.0], [3.0]])
    w, eps = exhaustive_oracle(P, [0, 0, 1, 1])
    assert w.tolist() == [1] and eps == pytest.approx(0, abs=1e-15)


def test_node_limit():
    with pytest.raises(ValueError):
        exhaustive_oracle(np.ones((4, 21)), [0, 1, 0, 1])


def test_ridge_exact_in_span():
    P, _ = problem(n=8, batch=30)
    y = P @ np.arange(8.0) + 2.0
    assert ridge_oracle(P, y, 0.0) < 1e-20


def test_ridge_monotone_in_lambda():
    P, y = problem()
    values = [ridge_oracle(P, y, lam) for lam in [0, 1e-6, 1e-3, 1e-1, 1, 10, 1e3]]
    assert np.all(np.diff(values) >= -1e-15)


@pytest.mark.parametrize("seed", range(4))
def test_three_way_ordering(seed):
    P, y = problem(seed=seed)
    t = normalize(y, calibrate(y))

    def evaluate(w, epoch):
        raw = raw_output(w, P)
        yy = normalize(raw, calibrate(raw))
        return yy, mse(yy, t)

    _, trace = train(evaluate, TrainerConfig(target_eps=1e-300, seed=seed), 8)
    ridge = ridge_oracle(P, y)
    _, best = exhaustive_oracle(P, y)
    assert ridge <= best + 1e-12
    assert best <= trace.final_eps + 1e-12


def test_exhaustive_runtime_small():
    import time

    P, y = problem(n=8, batch=50)
    t0 = time.perf_counter()
    exhaustive_oracle(P, y)
    assert time.perf_counter() - t0 < 1.0
