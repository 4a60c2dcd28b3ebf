import dataclasses

import numpy as np
import pytest

from photonic_rc.errors import ConfigError, NonConvergence
from photonic_rc.reservoir import (ReservoirParams, ReservoirState, build_internal_coupling,
                                   build_layout, check_locking, detect_powers, field_map,
                                   ring_counts, steady_state)


def test_default_ring_counts():
    assert ring_counts(131) == [1, 6, 12, 18, 24, 30, 40]
    assert sum(ring_counts(131)) == 131


@pytest.mark.parametrize("n", [1, 2, 7, 8, 19, 50, 131, 300])
def test_ring_counts_sum(n):
    assert sum(ring_counts(n)) == n


def test_single_node_at_origin():
    lay = build_layout(1)
    assert lay.n_nodes == 1 and np.allclose(lay.positions, 0)


@pytest.mark.parametrize("n", [2, 8, 131])
def test_pairwise_distances_positive(n):
    d = build_layout(n).distances()
    off = d[~np.eye(n, dtype=bool)]
    assert off.min() > 0


def test_ring_radii_span_unit_disc():
    lay = build_layout(131)
    assert np.allclose(np.unique(lay.radius), np.linspace(0, 1, 7))


def test_coupling_rows_and_diagonal():
    params = ReservoirParams(seed=3)
    c = build_internal_coupling(build_layout(131), params)
    mag = np.abs(c.entries)
    np.testing.assert_allclose(mag.sum(axis=1), 1.0, atol=1e-12)
    assert not np.diag(c.entries).any()
    assert c.spectral_radius == pytest.approx(0.15, rel=1e-9)  # kappa * row-stochastic |W|


def test_coupling_is_local():
    lay = build_layout(131)
    c = build_internal_coupling(lay, ReservoirParams())
    radius = 1.5 * lay.ring_spacing
    assert not c.entries[lay.distances() > radius].any()


def test_coupling_deterministic():
    lay = build_layout(131)
    a = build_internal_coupling(lay, ReservoirParams(seed=9)).entries
    b = build_internal_coupling(lay, ReservoirParams(seed=9)).entries
    assert np.array_equal(a, b)


@pytest.mark.parametrize("kwargs", [dict(relax_alpha=0), dict(relax_alpha=1.5), dict(tol=0),
                                    dict(coupling=-1), dict(n_nodes=0)])
def test_bad_params(kwargs):
    with pytest.raises(ConfigError):
        ReservoirParams(**kwargs)


def _single(**kw):
    params = ReservoirParams(n_nodes=1, **kw)
    return params, build_internal_coupling(build_layout(1), params)


def test_zero_injection_zero_state():
    params = ReservoirParams()
    coup = build_internal_coupling(build_layout(131), params)
    st = steady_state(np.zeros(131), params, coup)
    assert not st.x.any() and st.iterations_used == 1


def test_closed_form_single_node():
    # x (1 + x^2) = 2 has the single real root x = 1
    params, coup = _single(gain=1.0, coupling=0.0)
    st = steady_state(np.array([2.0]), params, coup)
    assert abs(st.x[0] - 1.0) <= 1e-9
    assert st.residual <= params.tol


def test_single_node_cubic_root_general():
    # oracle: numpy root of m^3 + m - g|e| for the field magnitude
    for g, e in [(1.5, 0.3), (1.5, 4.0), (2.0, 1.0)]:
        params, coup = _single(gain=g, coupling=0.0)
        st = steady_state(np.array([e * np.exp(0.7j)]), params, coup)
        roots = np.roots([1, 0, 1, -g * e])
        m = roots[np.abs(roots.imag) < 1e-12].real.max()
        assert abs(st.x[0]) == pytest.approx(m, abs=1e-9)
        assert np.angle(st.x[0]) == pytest.approx(0.7, abs=1e-9)


def test_fixed_point_residual_bound(computer):
    p = computer.params
    for d in range(4):
        st = computer.state(d)
        gap = np.max(np.abs(st.x - field_map(st.x, computer.injection(d), p, computer.coupling)))
        assert gap <= 2 * p.tol / p.relax_alpha


def test_two_starts_agree(computer):
    rng = np.random.default_rng(0)
    e = computer.injection(2)
    ref = computer.state(2).x
    for _ in range(5):
        x0 = 5 * (rng.standard_normal(131) + 1j * rng.standard_normal(131))
        x = steady_state(e, computer.params, computer.coupling, x0).x
        assert np.max(np.abs(x - ref)) <= 1e-8


def test_locking_self_check_passes(computer):
    assert computer.check_locking() <= 1e-8


def test_undamped_iteration_oscillates():
    # slope of the magnitude map at the fixed point is about -1.2: plain iteration cycles
    params, coup = _single(gain=1.0, coupling=0.0, relax_alpha=1.0, max_iters=500)
    with pytest.raises(NonConvergence):
        steady_state(np.array([3.0]), params, coup)
    damped = dataclasses.replace(params, relax_alpha=0.5)
    assert steady_state(np.array([3.0]), damped, coup).residual <= damped.tol


def test_check_locking_flags_start_dependence(monkeypatch):
    import photonic_rc.reservoir as res

    params, coup = _single()

    def fake(injection, p, c, x0=None):
        return ReservoirState(np.zeros(1, complex) if x0 is None else np.asarray(x0), 1, 0.0)

    monkeypatch.setattr(res, "steady_state", fake)
    with pytest.raises(ConfigError):
        check_locking(np.ones(1), params, coup, np.random.default_rng(0))


def test_nonconvergence_reports_residual():
    params, coup = _single(gain=1.0, coupling=0.0, max_iters=2, tol=1e-15)
    with pytest.raises(NonConvergence) as info:
        steady_state(np.array([3.0]), params, coup)
    assert info.value.iterations == 2 and info.value.residual > 0


def test_state_is_deterministic(computer):
    e = computer.injection(1)
    a = steady_state(e, computer.params, computer.coupling)
    b = steady_state(e, computer.params, computer.coupling)
    assert np.array_equal(a.x, b.x)


def test_responses_distinct(computer):
    P = computer.response_matrix()
    for a in range(4):
        for b in range(a + 1, 4):
            assert np.linalg.norm(P[a] - P[b]) / np.linalg.norm(P[a]) > 0.01


def test_decoupled_power_monotone_in_injection_scale(computer):
    params = dataclasses.replace(computer.params, coupling=0.0)
    for d in range(4):
        e = computer.injection(d)
        # monotone regime: g |e| <= 1 for every node
        base = e / (params.gain * np.abs(e).max())
        totals = [steady_state(s * base, params, computer.coupling).P.sum() for s in np.linspace(0.1, 1, 10)]
        assert np.all(np.diff(totals) > 0)


def test_kappa_zero_decouples():
    params = ReservoirParams(n_nodes=8, coupling=0.0)
    coup = build_internal_coupling(build_layout(8), params)
    e = np.linspace(0.5, 2, 8) + 0j
    full = steady_state(e, params, coup).x
    p1 = dataclasses.replace(params, n_nodes=1)
    c1 = build_internal_coupling(build_layout(1), p1)
    for i in range(8):
        assert full[i] == pytest.approx(steady_state(e[i:i + 1], p1, c1).x[0], abs=1e-9)


def test_noise_free_detection():
    st = ReservoirState(np.array([1 + 1j, 2.0, 0]), 1, 0.0)
    P = detect_powers(st, ReservoirParams(noise_sigma=0.0), np.random.default_rng(0))
    np.testing.assert_array_equal(P, np.abs(st.x) ** 2)


def test_dark_state_stays_dark():
    st = ReservoirState(np.zeros(131, complex), 1, 0.0)
    assert not detect_powers(st, ReservoirParams(noise_sigma=0.5), np.random.default_rng(0)).any()


def test_noise_level_monte_carlo():
    sigma = 1e-3
    x = np.full(100_000, 1.3 + 0.4j)
    st = ReservoirState(x, 1, 0.0)
    P = detect_powers(st, ReservoirParams(noise_sigma=sigma), np.random.default_rng(42))
    est = np.std(P / np.abs(x) ** 2 - 1)
    assert abs(est / sigma - 1) < 0.03


def test_detection_nonnegative_under_huge_noise():
    st = ReservoirState(np.ones(1000, complex), 1, 0.0)
    assert detect_powers(st, ReservoirParams(noise_sigma=2.0), np.random.default_rng(0)).min() >= 0
