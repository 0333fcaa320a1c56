import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lzcool.model import (DEFAULT_SPAN_PRODUCT, SweepProtocol, evaluate_drive,
                          frame_at, static_frame)

velocities = st.floats(0.01, 20.0)
eps_values = st.floats(-80.0, 80.0)


@pytest.mark.parametrize("v, t, expected", [
    (0.5, 0.0, 0.0),
    (0.5, -160.0, -80.0),
    (0.3, 10.0, 3.0),
])
def test_evaluate_drive(v, t, expected):
    assert evaluate_drive(SweepProtocol(v), t) == pytest.approx(expected, abs=1e-14)


def test_protocol_window():
    p = SweepProtocol(0.5)
    assert p.span_product == DEFAULT_SPAN_PRODUCT
    assert p.t0 == 160.0
    assert evaluate_drive(p, -p.t0) == -80.0
    assert evaluate_drive(p, p.t0) == 80.0
    q = SweepProtocol(0.5, offset=2.0)
    assert evaluate_drive(q, -q.t0) == -78.0
    assert evaluate_drive(q, q.t0) == 82.0
    assert q.max_splitting == pytest.approx(math.hypot(1.0, 82.0))


@pytest.mark.parametrize("kwargs", [
    dict(velocity=0.0), dict(velocity=-1.0), dict(velocity=math.inf),
    dict(velocity=1.0, span_product=0.0), dict(velocity=1.0, offset=math.nan),
])
def test_protocol_rejects_invalid(kwargs):
    with pytest.raises(ValueError):
        SweepProtocol(**kwargs)


def test_frame_at_symmetric_point():
    fq = frame_at(SweepProtocol(0.7), 0.0)
    assert (fq.phi, fq.splitting, fq.f1, fq.f2) == (0.0, 1.0, 0.0, 1.0)
    assert fq.phi_dot == pytest.approx(0.7, rel=1e-15)


def test_frame_at_unit_bias():
    fq = frame_at(SweepProtocol(1.0), 1.0)
    assert fq.phi == pytest.approx(math.pi / 4, rel=1e-15)
    assert fq.splitting == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert fq.f1 == pytest.approx(1 / math.sqrt(2.0), rel=1e-15)
    assert fq.f2 == pytest.approx(1 / math.sqrt(2.0), rel=1e-15)


def test_frame_at_sweep_start():
    # 40-digit reference: sqrt(6401), atan(-80), 0.5/6401
    fq = frame_at(SweepProtocol(0.5), -160.0)
    assert fq.eps == -80.0
    assert fq.splitting == pytest.approx(80.00624975587844, rel=1e-14)
    assert fq.phi == pytest.approx(-1.5582969777755349, rel=1e-14)
    assert fq.phi_dot == pytest.approx(7.811279487580066e-05, rel=1e-14)


@given(velocities, eps_values)
def test_frame_invariants(v, eps):
    p = SweepProtocol(v)
    fq = frame_at(p, eps / v)
    assert fq.splitting >= 1.0
    assert fq.splitting * abs(fq.f1) == pytest.approx(abs(fq.eps), rel=1e-12, abs=1e-300)
    assert fq.splitting * fq.f2 == pytest.approx(1.0, rel=1e-12)
    assert fq.f1 ** 2 + fq.f2 ** 2 == pytest.approx(1.0, abs=1e-12)
    assert -math.pi / 2 < fq.phi < math.pi / 2
    assert math.sin(fq.phi) == pytest.approx(fq.f1, abs=1e-12)
    assert math.cos(fq.phi) == pytest.approx(fq.f2, abs=1e-12)


@given(velocities, eps_values)
def test_phi_dot_matches_finite_difference(v, eps):
    # central difference of atan(eps(t)) in 30-digit arithmetic, h = 1e-5
    p = SweepProtocol(v)
    t = eps / v
    h = mpmath.mpf("1e-5")
    with mpmath.workdps(30):
        tt = mpmath.mpf(t)
        fd = (mpmath.atan(v * (tt + h)) - mpmath.atan(v * (tt - h))) / (2 * h)
    assert frame_at(p, t).phi_dot == pytest.approx(float(fd), rel=1e-6)


@given(velocities, st.floats(0.0, 80.0), st.floats(0.0, 80.0))
def test_phi_dot_peaks_at_crossing(v, a, b):
    p = SweepProtocol(v)
    peak = frame_at(p, 0.0).phi_dot
    lo, hi = sorted((a, b))
    assert frame_at(p, hi / v).phi_dot <= frame_at(p, lo / v).phi_dot <= peak
    assert frame_at(p, -hi / v).phi_dot == frame_at(p, hi / v).phi_dot
    assert peak == pytest.approx(v)


def test_static_frame_has_no_inertial_term():
    fq = static_frame(3.0)
    assert fq.phi_dot == 0.0
    assert fq.splitting == pytest.approx(math.sqrt(10.0))
