"""Unit tests for potentials, tortoise coordinates, and barrier data."""

import math
import random

import numpy as np
import pytest

from qnmlattice.potentials import (BlackHoleParams, alpha_squared,
                                   critical_data, horizon_roots,
                                   inverse_tortoise,
                                   inverse_tortoise_complex, potential_W,
                                   potential_W_parts,
                                   shifted_potential_taylor,
                                   subprincipal_taylor, tortoise)

P1 = BlackHoleParams(m=1.0)


def test_params_validation():
    with pytest.raises(ValueError):
        BlackHoleParams(m=-1.0)
    with pytest.raises(ValueError):
        BlackHoleParams(m=1.0, lam=1.0 / 9.0)
    BlackHoleParams(m=1.0, lam=0.11)  # just subextremal


def test_alpha_squared_horizon_and_barrier():
    assert alpha_squared(2.0, P1) == 0.0
    assert abs(alpha_squared(3.0, P1) - 1.0 / 3.0) <= 1e-15


def test_alpha_squared_vanishes_at_computed_roots():
    p = BlackHoleParams(m=1.0, lam=0.03)
    hz = horizon_roots(p)
    for r in (hz.r0, hz.r_minus, hz.r_plus):
        assert abs(alpha_squared(r, p)) <= 1e-12


def test_horizon_roots_small_lambda_limit():
    for lam in (1e-6, 1e-4):
        hz = horizon_roots(BlackHoleParams(m=1.0, lam=lam))
        assert abs(hz.r_minus - 2.0) <= 20.0 * lam


def test_horizon_roots_extremal_degeneration():
    p = BlackHoleParams(m=1.0, lam=0.999 / 9.0)
    hz = horizon_roots(p)
    assert abs(hz.r_minus - 3.0) < 0.2
    assert abs(hz.r_plus - 3.0) < 0.2


def test_horizon_roots_vieta():
    m, lam = 1.0, 0.04
    hz = horizon_roots(BlackHoleParams(m=m, lam=lam))
    rs = (hz.r0, hz.r_minus, hz.r_plus)
    assert abs(sum(rs)) <= 1e-12 * max(abs(r) for r in rs)
    pairwise = rs[0] * rs[1] + rs[0] * rs[2] + rs[1] * rs[2]
    assert abs(pairwise - (-3.0 / lam)) <= 1e-12 * abs(3.0 / lam)
    assert abs(rs[0] * rs[1] * rs[2] - (-6.0 * m / lam)) \
        <= 1e-12 * abs(6.0 * m / lam)


def test_tortoise_residue_signs():
    hz = horizon_roots(BlackHoleParams(m=1.0, lam=0.05))
    assert hz.a0 > 0 and hz.a_minus > 0 and hz.a_plus < 0


def test_tortoise_closed_form_points():
    assert abs(tortoise(4.0, P1) - (4.0 + 2.0 * math.log(2.0))) <= 1e-14
    assert abs(tortoise(3.0, P1) - 3.0) <= 1e-14


def test_tortoise_round_trip_lambda_zero():
    for r in np.geomspace(2.0 + 1e-6, 50.0, 100):
        x = tortoise(float(r), P1)
        assert abs(inverse_tortoise(x, P1) - r) <= 1e-12 * max(1.0, r)


def test_tortoise_round_trip_lambda_positive():
    p = BlackHoleParams(m=1.0, lam=0.02)
    hz = horizon_roots(p)
    lo, hi = hz.r_minus, hz.r_plus
    for s in np.geomspace(1e-5, 0.999, 100):
        r = lo + float(s) * (hi - lo)
        x = tortoise(r, p, hz)
        assert abs(inverse_tortoise(x, p, hz) - r) <= 1e-12 * max(1.0, r)


def test_inverse_tortoise_complex_matches_real_axis():
    p = BlackHoleParams(m=1.0, lam=0.02)
    xs = np.linspace(-30.0, 30.0, 31)
    r1 = inverse_tortoise_complex(xs.astype(complex), p)
    r2 = np.array([inverse_tortoise(float(x), p) for x in xs])
    assert np.max(np.abs(r1 - r2)) <= 1e-9


def test_inverse_tortoise_complex_is_holomorphic():
    # Cauchy-Riemann via centered differences at a few interior points
    for p in (P1, BlackHoleParams(m=1.0, lam=0.02)):
        for x0 in (1.0 + 0.5j, -4.0 - 1.0j, 8.0 + 2.0j):
            eps = 1e-5
            pts = np.array([x0 + eps, x0 - eps, x0 + 1j * eps,
                            x0 - 1j * eps])
            r = inverse_tortoise_complex(pts, p)
            d_re = (r[0] - r[1]) / (2 * eps)
            d_im = (r[2] - r[3]) / (2j * eps)
            assert abs(d_re - d_im) <= 1e-6 * max(1.0, abs(d_re))


def test_potential_peak_value_and_flatness():
    for p in (P1, BlackHoleParams(m=2.0, lam=0.01)):
        cd = critical_data(p)
        assert abs(potential_W(cd.x0, 0.0, p) - cd.E0) <= 1e-12 * cd.E0
        d = 1e-4
        fd = (potential_W(cd.x0 + d, 0.0, p)
              - potential_W(cd.x0 - d, 0.0, p)) / (2 * d)
        assert abs(fd) <= 1e-8


def test_potential_decay():
    assert abs(potential_W(-60.0, 0.0, P1)) < 1e-8
    # de Sitter decay toward the cosmological horizon is slower (smaller
    # surface gravity), so probe further out
    p = BlackHoleParams(m=1.0, lam=0.02)
    assert abs(potential_W(-100.0, 0.0, p)) < 1e-8
    assert abs(potential_W(100.0, 0.0, p)) < 1e-7


def test_critical_data_values():
    cd = critical_data(P1)
    assert cd.r_crit == 3.0
    assert abs(cd.x0 - 3.0) <= 1e-14
    assert abs(cd.E0 - 1.0 / 27.0) <= 1e-16
    assert abs(cd.c0 - cd.E0 ** 2) == 0


def test_critical_data_extremal_refusal():
    with pytest.raises(ValueError):
        critical_data(BlackHoleParams(m=1.0, lam=(1.0 - 1e-9) / 9.0))


def test_curvature_identity_random_params():
    rng = random.Random(5)
    for _ in range(5):
        m = rng.uniform(0.5, 3.0)
        lam = rng.uniform(0.0, 0.9) / (9.0 * m * m)
        p = BlackHoleParams(m=m, lam=lam)
        cd = critical_data(p)
        d = 1e-2 * m
        w = [potential_W(cd.x0 + k * d, 0.0, p) for k in (-2, -1, 0, 1, 2)]
        # fourth-order central second difference
        w2 = (-w[0] + 16 * w[1] - 30 * w[2] + 16 * w[3] - w[4]) / (12 * d * d)
        assert abs(-2.0 * w2 - 4.0 * cd.E0 ** 2) <= 1e-8 * 4.0 * cd.E0 ** 2


def _poly_fit_taylor(p, deg, half_width):
    """Independent Taylor oracle: polynomial fit of the shifted potential
    on Chebyshev nodes around the barrier top."""
    cd = critical_data(p)
    k = np.arange(4 * deg + 1)
    xs = half_width * np.cos(math.pi * k / (4.0 * deg))
    vals = np.array([potential_W(cd.x0 + float(x), 0.0, p) - cd.E0
                     for x in xs], dtype=float)
    return np.polyfit(xs, vals, deg)[::-1]


def test_shifted_potential_taylor_structure():
    for p in (P1, BlackHoleParams(m=1.5, lam=0.01)):
        cd = critical_data(p)
        V = shifted_potential_taylor(p, 8)
        assert complex(V.coeffs[0]) == 0
        assert complex(V.coeffs[1]) == 0
        assert abs(complex(V.coeffs[2]) + cd.E0 ** 2) <= 1e-12 * cd.E0 ** 2


def test_shifted_potential_taylor_vs_fit_oracle():
    V = shifted_potential_taylor(P1, 6)
    fit = _poly_fit_taylor(P1, 10, 0.4)
    for j in range(2, 7):
        c = complex(V.coeffs[j])
        assert abs(c - fit[j]) <= 1e-6 * abs(c), j


def test_subprincipal_taylor_matches_values():
    p = BlackHoleParams(m=1.0, lam=0.01)
    cd = critical_data(p)
    W1 = subprincipal_taylor(p, 6)
    for x in (-0.2, 0.0, 0.15):
        _, w1 = potential_W_parts(np.array([cd.x0 + x], dtype=complex), p)
        approx = sum(complex(c) * x ** j for j, c in enumerate(W1.coeffs))
        assert abs(approx - complex(w1[0])) <= 1e-6 * abs(w1[0])


def test_scaling_covariance():
    sigma = 0.3
    m = 2.0
    p_m = BlackHoleParams(m=m, lam=sigma / (9.0 * m * m))
    p_1 = BlackHoleParams(m=1.0, lam=sigma / 9.0)
    for x in np.linspace(-5.0, 10.0, 12):
        w_m = potential_W(m * float(x), 0.0, p_m)
        w_1 = potential_W(float(x), 0.0, p_1)
        assert abs(w_m - w_1 / m ** 2) <= 1e-10 * max(abs(w_1 / m ** 2), 1e-12)


def test_barrier_monotonicity():
    # x V'(x) < 0 away from the top: W0 increases up to x0, decreases after
    cd = critical_data(P1)
    xs = cd.x0 + np.linspace(-6.0, 6.0, 25)
    w = np.array([potential_W(float(x), 0.0, P1) for x in xs])
    i0 = np.argmin(np.abs(xs - cd.x0))
    assert np.all(np.diff(w[:i0 + 1]) > 0)
    assert np.all(np.diff(w[i0:]) < 0)


def test_potential_W_h_combination():
    p = BlackHoleParams(m=1.0, lam=0.01)
    x, h = 2.0, 0.25
    w0 = potential_W(x, 0.0, p)
    full = potential_W(x, h, p)
    arr0, arr1 = potential_W_parts(np.array([x], dtype=complex), p)
    assert abs(w0 - arr0[0].real) <= 1e-12
    assert abs(full - (arr0[0] + h * h * arr1[0]).real) <= 1e-12
