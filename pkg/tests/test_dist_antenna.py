import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fadingrate.channel import complex_normal, block_rng, mc_ergodic
from fadingrate.dist_antenna import (GOLDEN_S1, SchemeParams, best_rho, combining_matrix,
                                     decode_two_slot, decoded_snr_mc, dist_cl_expected_rate,
                                     dist_cl_residual, dist_cl_s0, dist_ergodic,
                                     dist_outage_analytic, dist_outage_mc, dist_throughput,
                                     effective_gain, encode_two_slot, endpoint_crossover,
                                     endpoint_preference, equivalence_check, expanded_gain,
                                     fig2_curves, miso_quadratic_gain, rho_scan,
                                     transmit_two_slot)
from fadingrate.rates_miso import (miso_cl_expected_rate, miso_ergodic, solve_cl_boundaries)

from conftest import MILLION, mc

finite = st.floats(-3.0, 3.0)
complexes = st.builds(complex, finite, finite)
rhos = st.floats(-1.0, 1.0)


def test_params():
    p = SchemeParams(0.5, 4.0)
    assert p.delta == 0.75 and p.per_transmitter_power == 2.0
    with pytest.raises(ValueError):
        SchemeParams(1.5, 1.0)
    with pytest.raises(ValueError):
        SchemeParams(0.0, -1.0)


def test_encode_rho0_is_alamouti():
    x1, x2 = 1 + 2j, -0.5 + 1j
    tx = encode_two_slot(x1, x2, SchemeParams(0.0, 1.0))
    np.testing.assert_array_equal(tx, [[x1, -np.conj(x2)], [x2, np.conj(x1)]])


def test_encode_rho1_repeats_stream():
    x1, x2 = 1 + 2j, -0.5 + 1j
    tx = encode_two_slot(x1, x2, SchemeParams(1.0, 1.0))
    np.testing.assert_array_equal(tx[0], tx[1])
    assert tx[1, 0] == x1


def test_transmit_power_audit():
    P = 6.0
    params = SchemeParams(0.3, P)
    x = complex_normal(block_rng(21, 0), (2, 10_000)) * math.sqrt(P / 2)
    tx = encode_two_slot(x[0], x[1], params)
    power = np.abs(tx) ** 2
    for k in range(2):
        for j in range(2):
            v = power[k, j]
            assert abs(v.mean() - P / 2) <= 3 * v.std(ddof=1) / math.sqrt(v.size)


def test_decode_examples():
    params = SchemeParams(1.0, 1.0)
    block = transmit_two_slot(encode_two_slot(1.0, 1j, params), 1.0, 1.0, 1.0)
    dec = decode_two_slot(block)
    assert dec.gain == pytest.approx(4.0) and not dec.degenerate
    assert dec.gain * 5.0 / 2 == pytest.approx(2 * 5.0)  # effective SNR 2P
    h1, h2 = 0.3 - 1j, 2.0 + 0.1j
    block = transmit_two_slot(encode_two_slot(1.0, 1j, SchemeParams(0.0, 1.0)), h1, h2, 0.0)
    assert decode_two_slot(block).gain == pytest.approx(abs(h1) ** 2 + abs(h2) ** 2)


def test_decode_degenerate():
    block = transmit_two_slot(encode_two_slot(1.0, 1.0, SchemeParams(1.0, 1.0)), 1.0, -1.0, 1.0)
    dec = decode_two_slot(block)
    assert dec.degenerate and dec.gain == 0.0 and np.all(np.isnan(dec.symbols))


@given(complexes, complexes, complexes, complexes, rhos)
def test_noise_free_round_trip(x1, x2, h1, h2, rho):
    params = SchemeParams(rho, 1.0)
    dec = decode_two_slot(transmit_two_slot(encode_two_slot(x1, x2, params), h1, h2, rho))
    if dec.gain > 1e-6:
        np.testing.assert_allclose(dec.symbols, [x1, x2], atol=1e-9 / dec.gain)


@given(complexes, complexes, rhos)
def test_combining_orthogonal(h1, h2, rho):
    G = combining_matrix(h1, h2, rho)
    gram = np.conj(G.T) @ G
    h = effective_gain(h1, h2, rho)
    np.testing.assert_allclose(gram, h * np.eye(2), atol=1e-12 * max(1.0, h))


@given(complexes, complexes, rhos, st.floats(0.01, 100.0))
def test_pathwise_mi_equivalence(h1, h2, rho, P):
    scheme = math.log1p(effective_gain(h1, h2, rho) * P / 2)
    expanded = math.log1p(expanded_gain(h1, h2, rho) * P / 2)
    miso = math.log1p(float(miso_quadratic_gain(h1, h2, rho)) * P / 2)
    assert scheme == pytest.approx(miso, abs=1e-12)
    assert scheme == pytest.approx(expanded, abs=1e-12)


@given(complexes, complexes, rhos, st.floats(0.01, 100.0), st.floats(0.0, 5.0))
def test_rho_sign_symmetry_pathwise(h1, h2, rho, P, R):
    a = math.log1p(expanded_gain(h1, h2, rho) * P / 2) < R
    b = math.log1p(expanded_gain(h1, -h2, -rho) * P / 2) < R
    assert a == b


def test_decoded_snr_matches_formula():
    h1, h2, rho, P = 0.3 + 0.8j, -1.1 + 0.2j, 0.4, 5.0
    n = 400_000
    snr = decoded_snr_mc(h1, h2, rho, P, mc(n))
    # both power sums are over 2n exponential terms: ratio spread ~ 1/sqrt(n)
    assert snr == pytest.approx(expanded_gain(h1, h2, rho) * P / 2, rel=3 / math.sqrt(n))


def test_outage_analytic_examples():
    x = 2 * (math.e - 1) / 10
    assert x == pytest.approx(0.34366, abs=1e-5)
    assert dist_outage_analytic(0.0, 10.0, 1.0) == pytest.approx(1 - math.exp(-x) * (1 + x))
    assert dist_outage_analytic(0.0, 10.0, 1.0) == pytest.approx(0.0471, abs=1e-4)
    assert dist_outage_analytic(0.3, 10.0, 0.0) == 0.0
    cfg = mc()
    for rho in (1.0, -1.0):
        exact = dist_outage_analytic(rho, 10.0, 1.0)
        assert exact == pytest.approx(1 - math.exp(-x / 2))
        assert dist_outage_mc(rho, 10.0, 1.0, cfg).within(exact)
    assert dist_outage_mc(0.0, 10.0, 1.0, cfg).within(dist_outage_analytic(0.0, 10.0, 1.0))


@pytest.mark.parametrize("rho", [0.0, 0.5, 1.0, -0.7])
@pytest.mark.parametrize("P,R", [(10.0, 1.0), (1.0, 0.5)])
def test_equivalence_pathwise(rho, P, R):
    rep = equivalence_check(rho, P, R, mc(50_000))
    assert rep.mismatches == 0 and rep.difference == 0.0
    assert rep.max_gain_gap <= 1e-12 * 50


def test_equivalence_examples():
    rep = equivalence_check(0.0, 10.0, 1.0, mc(MILLION))
    exact = dist_outage_analytic(0.0, 10.0, 1.0)
    assert rep.scheme.within(exact) and rep.miso.within(exact)
    ind = equivalence_check(0.5, 10.0, 1.0, mc(200_000), miso_seed=12345)
    combined = math.hypot(ind.scheme.stderr, ind.miso.stderr)
    assert abs(ind.difference) <= 3 * combined
    assert ind.miso.seed == 12345


def test_rho_sign_symmetry_distribution():
    cfg = mc(200_000)
    for rho in (0.3, 0.8):
        a = dist_outage_mc(rho, 5.0, 1.0, cfg)
        b = dist_outage_mc(-rho, 5.0, 1.0, mc(200_000, seed=99))
        assert abs(a.mean - b.mean) <= 3 * math.hypot(a.stderr, b.stderr)


@pytest.mark.parametrize("P,R", [(10.0, 1.0), (1.0, 1.0), (10.0, 3.0)])
def test_optimum_rho_at_endpoint(P, R):
    scan = rho_scan(P, R, mc(200_000))
    best = min(e.mean for _, e in scan)
    ends = [e for rho, e in scan if rho in (0.0, 1.0)]
    assert any(e.mean - best <= 3 * e.stderr for e in ends)
    rho, _ = best_rho(P, R, mc(200_000))
    assert rho == endpoint_preference(P, R)


def test_endpoint_crossover():
    x = endpoint_crossover()
    assert math.log1p(x) == pytest.approx(x / 2, abs=1e-14)
    # exact endpoint outages coincide there: P = 2(e^R - 1)/x
    R = 1.0
    P = 2 * math.expm1(R) / x
    assert dist_outage_analytic(0.0, P, R) == pytest.approx(dist_outage_analytic(1.0, P, R),
                                                            abs=1e-12)
    assert endpoint_preference(P * 1.01, R) == 0.0
    assert endpoint_preference(P * 0.99, R) == 1.0


# -- closed forms ------------------------------------------------------------

def test_cl_examples():
    assert GOLDEN_S1 == pytest.approx(1.6180339887, abs=1e-10)
    assert dist_cl_s0(10.0) == pytest.approx(solve_cl_boundaries(2, 10.0).s0, abs=1e-9)
    assert dist_cl_s0(10.0, polish=False) == pytest.approx(solve_cl_boundaries(2, 10.0).s0,
                                                           abs=1e-9)
    assert dist_cl_expected_rate(1e-8) < 1e-7


@given(st.floats(1e-12, 1e8))
def test_cl_matches_miso(P):
    assert dist_cl_s0(P) == pytest.approx(solve_cl_boundaries(2, P).s0, rel=1e-12)
    assert max(map(abs, dist_cl_residual(P))) <= 1e-9 * max(1.0, P * dist_cl_s0(P))
    assert dist_cl_expected_rate(P) == pytest.approx(miso_cl_expected_rate(2, P), abs=1e-9)


@pytest.mark.parametrize("P", [0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e4])
def test_cubic_formula_unpolished(P):
    assert max(map(abs, dist_cl_residual(P, polish=False))) <= 1e-9


def test_ergodic_examples():
    assert dist_ergodic(2.0) == 1.0
    assert dist_ergodic(10.0) == pytest.approx(miso_ergodic(2, 10.0), abs=1e-9)
    assert mc_ergodic(2, 1, 10.0, mc(MILLION)).within(dist_ergodic(10.0))


@given(st.floats(0.01, 1e5))
def test_ergodic_matches_miso(P):
    assert dist_ergodic(P) == pytest.approx(miso_ergodic(2, P), abs=1e-9)


def test_throughput_grid():
    s = np.linspace(1e-6, 1.0, 1_000_001)
    vals = (1 + 2 * s) * np.exp(-2 * s) * np.log1p(10.0 * s)
    res = dist_throughput(10.0)
    assert res.value >= vals.max()
    assert res.value - vals.max() < 1e-11


def test_fig2_ordering_and_monotonicity():
    rows = fig2_curves([0.1, 1.0, 10.0, 100.0], restarts=8)
    for r in rows:
        assert r.throughput <= r.two_layer + 1e-4
        assert r.two_layer <= r.continuous_layer + 1e-4
        assert r.continuous_layer <= r.ergodic + 1e-4
    for name in ("throughput", "two_layer", "continuous_layer", "ergodic"):
        col = [getattr(r, name) for r in rows]
        assert all(a <= b for a, b in zip(col, col[1:]))
