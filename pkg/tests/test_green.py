import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetasurf import (cf_mean, det2, gamma0, green_pointwise, heat_integral,
                      make_surface, torus_cf_image_sum)
from zetasurf.sumtools import neville_zero

PI = math.pi
EULER = float(np.euler_gamma)
SPHERE = make_surface("sphere", R=1)
TORUS = make_surface("torus", L1=1, L2=1)
FREE_SPACE_CF = (math.log(2.0) - EULER) / (2 * PI)


# ------------------------------------------------------------------ gamma0

def test_gamma0_special_values():
    assert gamma0(4.0 * math.exp(-EULER)) == pytest.approx(0.0, abs=1e-14)
    assert gamma0(4.0) == pytest.approx(EULER / (2 * PI), abs=1e-15)
    assert gamma0(4.0 * math.exp(1.0 - EULER)) == pytest.approx(1 / (2 * PI), abs=1e-14)


def test_gamma0_rejects_nonpositive():
    with pytest.raises(ValueError):
        gamma0(0.0)


@settings(deadline=None, max_examples=50)
@given(st.floats(0.01, 50.0), st.floats(1.0001, 3.0))
def test_gamma0_strictly_increasing(m0, factor):
    assert gamma0(m0 * factor) > gamma0(m0)


# -------------------------------------------------------------------- det2

def test_det2_trivial_at_zero_shift():
    res = det2(SPHERE, 1.0, 0.0)
    assert res.log_value == 0.0
    assert res.value == 1.0


def test_det2_single_zero_mode_factor():
    # truncation keeping only lambda = 0: factor (1+1) e^{-1}
    res = det2(SPHERE, 1.0, 1.0, lam_max=1.0)
    assert math.exp(res.truncated_log) == pytest.approx(2.0 / math.e, rel=1e-15)


def test_det2_lambda_doubling_within_tail_bound():
    a = det2(SPHERE, 1.0, 1.0, lam_max=1e4)
    b = det2(SPHERE, 1.0, 1.0, lam_max=2e4)
    assert abs(a.log_value - b.log_value) <= a.tail_bound + b.tail_bound


def test_det2_in_unit_interval_and_monotone():
    logs = [det2(TORUS, 1.0, m1sq).log_value for m1sq in (0.0, 1.0, 2.0, 4.0)]
    assert logs[0] == 0.0
    assert all(l <= 0.0 for l in logs)
    assert all(a > b for a, b in zip(logs, logs[1:]))
    assert all(0.0 < math.exp(l) <= 1.0 for l in logs)


def test_det2_validation():
    with pytest.raises(ValueError):
        det2(SPHERE, 0.0, 1.0)
    with pytest.raises(ValueError):
        det2(SPHERE, 1.0, -1.0)


# ------------------------------------------------------------- finite part

def test_two_oracle_cf_agreement():
    heat_route = cf_mean(TORUS, 1.0)
    image_route = torus_cf_image_sum(1.0, 1.0, 1.0)
    assert heat_route.source == "heat_integral"
    assert image_route.source == "image_sum"
    assert heat_route.cf_mean == pytest.approx(image_route.cf_mean, abs=1e-6)


def test_cf_free_space_limit_large_torus():
    # m0 L = 10: the four nearest images still contribute 4 K0(10)/(2 pi)
    # ~ 1.1e-5; the heat route must reproduce the constant to that accuracy
    # and the image route exactly
    big = make_surface("torus", L1=5, L2=5)
    res = cf_mean(big, 4.0)
    assert res.cf_mean == pytest.approx(FREE_SPACE_CF, abs=2e-5)
    image = torus_cf_image_sum(5.0, 5.0, 2.0)
    assert res.cf_mean == pytest.approx(image.cf_mean, abs=1e-6)


def test_cf_heat_route_assembly_identity():
    # definitional: cf = I/A + (ln(2 m0) - gamma)/(2 pi)
    m0sq = 2.0
    res = cf_mean(SPHERE, m0sq)
    integral = heat_integral(SPHERE, m0sq)
    expected = integral.value / SPHERE.area + (
        math.log(2.0 * math.sqrt(m0sq)) - EULER) / (2 * PI)
    assert res.cf_mean == pytest.approx(expected, rel=1e-15)
    assert res.gamma0 == pytest.approx(gamma0(math.sqrt(m0sq)), rel=1e-15)


def test_image_sum_symmetric_in_sides():
    a = torus_cf_image_sum(1.0, 2.0, 1.0)
    b = torus_cf_image_sum(2.0, 1.0, 1.0)
    assert a.cf_mean == pytest.approx(b.cf_mean, rel=1e-14)


def test_image_sum_free_space_limit():
    res = torus_cf_image_sum(30.0, 30.0, 2.0)
    assert res.cf_mean == pytest.approx(FREE_SPACE_CF, abs=1e-12)


# --------------------------------------------------------------- pointwise

def test_torus_pointwise_equals_image_formula():
    from zetasurf.bessel import k0
    x, y = np.array([0.1, 0.2]), np.array([0.55, 0.7])
    val = green_pointwise(TORUS, 1.0, x, y)
    oracle = 0.0
    for a in range(-40, 41):
        for b in range(-40, 41):
            r = math.hypot(x[0] - y[0] + a, x[1] - y[1] + b)
            if r < 44.0:
                oracle += k0(r)
    assert val == pytest.approx(oracle / (2 * PI), rel=1e-12)


def test_pointwise_symmetry():
    x, y = np.array([0.15, 0.85]), np.array([0.4, 0.1])
    assert green_pointwise(TORUS, 1.5, x, y) == pytest.approx(
        green_pointwise(TORUS, 1.5, y, x), abs=1e-10)
    xs = np.array([0.0, 0.0, 1.0])
    ys = np.array([math.sin(0.7), 0.0, math.cos(0.7)])
    assert green_pointwise(SPHERE, 1.0, xs, ys) == pytest.approx(
        green_pointwise(SPHERE, 1.0, ys, xs), abs=1e-10)


def test_sphere_pointwise_short_distance_extrapolation():
    # C(x,y) + (1/2 pi) ln(m0 d) -> C_f as d -> 0 (Richardson over d)
    target = cf_mean(SPHERE, 1.0).cf_mean
    ds = [0.2, 0.1, 0.05]
    vals = []
    for d in ds:
        x = np.array([0.0, 0.0, 1.0])
        y = np.array([math.sin(d), 0.0, math.cos(d)])
        c = green_pointwise(SPHERE, 1.0, x, y)
        vals.append(c + math.log(d) / (2 * PI))  # m0 = 1
    extrap, _ = neville_zero([d * d for d in ds], vals)
    assert extrap == pytest.approx(target, abs=1e-3)


def test_pointwise_rejects_coincident_points():
    with pytest.raises(ValueError, match="close"):
        green_pointwise(TORUS, 1.0, np.array([0.1, 0.1]), np.array([0.1, 0.1]))
    north = np.array([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        green_pointwise(SPHERE, 1.0, north, -north)
