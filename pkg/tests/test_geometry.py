import math

import numpy as np
import pytest
from hypothesis import assume, given

from conftest import g_hat_plus, hat_points
from hatsiegel.geometry import (
    curve_length,
    distance,
    geodesic_arc_length,
    geodesic_point,
    geodesic_samples,
    hyperbolic_distance,
    laplacian_apply,
    laplacian_equivariance_residual,
    metric_at,
    volume_change_residual,
    volume_density,
)
from hatsiegel.halfspace import HatPoint
from hatsiegel.numeric import DomainError

I_PT = HatPoint(1j, 0)
TWO_I = HatPoint(2j, 0)


def test_metric_examples():
    g = metric_at(I_PT)
    assert g.g_xx == 2 and g.g_xu == 0
    assert metric_at(TWO_I).g_xx == pytest.approx(0.5)
    p, q = HatPoint(0.1 + 2j, 0.3 + 1j), HatPoint(0.1 + 2j, -0.3 - 1j)
    assert metric_at(p).g_xx == metric_at(q).g_xx
    assert metric_at(p).g_xu == -metric_at(q).g_xu


@given(hat_points())
def test_metric_is_infinitesimal_distance(p):
    # rho(p, p + t d)^2 / t^2 -> g(d, d)
    d = np.array([0.3, -0.2, 0.5, 0.1])
    t = 1e-5 * (p.y - abs(p.v))
    q = HatPoint.from_real(p.x + t * d[0], p.y + t * d[1], p.u + t * d[2], p.v + t * d[3])
    g = metric_at(p).tensor()
    assert (distance(p, q).rho / t) ** 2 == pytest.approx(d @ g @ d, rel=1e-4)


def test_distance_examples():
    d = distance(I_PT, I_PT)
    assert (d.A, d.B, d.lam, d.mu, d.rho) == (2, 2, 1, 1, 0)
    d = distance(I_PT, TWO_I)
    assert d.A == pytest.approx(2.5) and d.B == pytest.approx(2.5)
    assert d.lam == pytest.approx(2) and d.mu == pytest.approx(2)
    assert abs(d.rho - math.sqrt(2) * math.log(2)) <= 1e-12
    assert d.log_lam == pytest.approx(math.acosh(d.A / 2), abs=1e-14)


@given(hat_points(), hat_points(), hat_points())
def test_distance_is_a_metric(a, b, c):
    assert distance(a, b).rho == pytest.approx(distance(b, a).rho, abs=1e-12)
    assert distance(a, c).rho <= distance(a, b).rho + distance(b, c).rho + 1e-9


@given(g_hat_plus(), hat_points(), hat_points())
def test_distance_invariance(g, a, b):
    assert abs(distance(g.act(a), g.act(b)).rho - distance(a, b).rho) <= 1e-9


def test_hyperbolic_distance_near_coincident():
    w = 0.3 + 1.7j
    assert hyperbolic_distance(w, w + 1e-13) == pytest.approx(1e-13 / 1.7, rel=1e-6)


def test_geodesic_examples():
    s0 = distance(I_PT, TWO_I).rho
    assert geodesic_point(I_PT, TWO_I, 0.0) == I_PT
    end = geodesic_point(I_PT, TWO_I, s0)
    assert abs(end.tau - 2j) <= 1e-12 and abs(end.z) <= 1e-12
    with pytest.raises(DomainError):
        geodesic_point(I_PT, TWO_I, 2 * s0)
    with pytest.raises(DomainError):
        geodesic_point(I_PT, I_PT, 0.0)


@given(hat_points(), hat_points())
def test_geodesic_endpoints_and_parametrisation(a, b):
    assume(distance(a, b).rho > 1e-6)
    s0 = distance(a, b).rho
    end = geodesic_point(a, b, s0)
    assert abs(end.tau - b.tau) + abs(end.z - b.z) <= 1e-9 * max(1, abs(b.tau), abs(b.z))
    for frac in (0.25, 0.5, 0.75):
        assert distance(a, geodesic_point(a, b, frac * s0)).rho == pytest.approx(frac * s0, abs=1e-6)


def test_geodesic_one_factor_stationary():
    # λ = 1 but μ ≠ 1: the w1 factor must stay put
    a = HatPoint(1j, 0)
    b = HatPoint(0.5 + 1j, -0.5)  # w1 = 1j for both
    pts = geodesic_samples(a, b, 5)
    assert all(abs(p.plus - 1j) < 1e-14 for p in pts)


def test_geodesic_arc_length_matches_distance():
    a, b = HatPoint(0.2 + 1.5j, 0.1 + 0.4j), HatPoint(-1 + 0.7j, 0.3 - 0.2j)
    assert geodesic_arc_length(a, b, panels=2000) == pytest.approx(distance(a, b).rho, abs=1e-6)


def test_straight_segment_is_longer_than_geodesic():
    a, b = HatPoint(0.0 + 1j, 0.0), HatPoint(3.0 + 1j, 0.0)

    def segment(s):
        return HatPoint(a.tau + s * (b.tau - a.tau), 0)

    assert curve_length(segment, 0, 1, panels=2000) > distance(a, b).rho


def test_volume_examples():
    assert volume_density(I_PT) == 4
    assert volume_density(HatPoint(2j, 1j)) == pytest.approx(4 / 9)


@given(g_hat_plus(), hat_points())
def test_volume_invariance(g, p):
    assert volume_change_residual(g.act, p) <= 1e-6


def test_laplacian_trivial_examples():
    p = HatPoint(0.3 + 2j, 0.2 + 0.5j)
    assert abs(laplacian_apply(lambda q: 3.0, p)) <= 1e-8
    assert abs(laplacian_apply(lambda q: q.x, p)) <= 1e-6


def test_laplacian_polynomial_oracle():
    # hand-expanded operator applied to x²u + yv²
    p = HatPoint(0.3 + 2j, 0.2 + 0.5j)
    x, y, u, v = p.x, p.y, p.u, p.v
    expected = (y * y + v * v) / 2 * (2 * u + 2 * y) + 2 * y * v * (2 * x + 2 * v)
    assert laplacian_apply(lambda q: q.x**2 * q.u + q.y * q.v**2, p) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("s", [0.5, 2.0, 3.5])
def test_laplacian_eigenfunction(s):
    # (Im w1)^s is an eigenfunction with eigenvalue s(s-1)
    p = HatPoint(-0.4 + 1.3j, 0.7 + 0.9j)

    def f(q):
        return (q.y + q.v) ** s

    assert laplacian_apply(f, p) == pytest.approx(s * (s - 1) * f(p), rel=1e-6)


@given(g_hat_plus(), hat_points())
def test_laplacian_equivariance(g, p):
    def f(q):
        return math.log(q.y * q.y - q.v * q.v) + q.u * q.y

    assert laplacian_equivariance_residual(g.act, f, p) <= 1e-4


def test_printed_operator_is_not_equivariant():
    from hatsiegel.group import compose_sl2_pair, Sl2Pair
    from hatsiegel.group import rotation

    g = compose_sl2_pair(Sl2Pair(rotation(0.4), np.array([[2.0, 0.0], [0.0, 0.5]])))
    p = HatPoint(0.1 + 1.2j, -0.2 + 0.3j)

    def f(q):
        return q.u * q.y + math.sin(q.x)

    assert laplacian_equivariance_residual(g.act, f, p) <= 1e-4
    assert laplacian_equivariance_residual(g.act, f, p, h=1e-4, form="printed") > 1e-2


def test_laplacian_bad_arguments():
    with pytest.raises(DomainError):
        laplacian_apply(lambda q: 0.0, I_PT, h=0.5)
    with pytest.raises(DomainError):
        laplacian_apply(lambda q: 0.0, I_PT, form="other")
