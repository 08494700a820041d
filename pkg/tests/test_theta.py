import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hatsiegel.halfspace import HatPoint
from hatsiegel.numeric import DomainError
from hatsiegel.polarization import integral_e, section_dimension
from hatsiegel.theta import (
    ThetaTruncation,
    jacobi_theta3,
    jacobi_theta3_product,
    principal_bridge_residual,
    principal_spec,
    quasi_periodicity_residual,
    radius_for,
    tail_bound,
    theta_series,
)

I_PT = HatPoint(1j, 0)


def brute_theta(omega, z, radius):
    total = 0j
    for n1 in range(-radius, radius + 1):
        for n2 in range(-radius, radius + 1):
            n = np.array([n1, n2])
            total += np.exp(1j * math.pi * n @ omega.matrix() @ n + 2j * math.pi * n @ z)
    return total


def test_jacobi_oracle():
    q = math.exp(-math.pi)
    assert jacobi_theta3(q) == pytest.approx(jacobi_theta3_product(q), abs=1e-15)
    val = theta_series(I_PT, np.zeros(2), 10).value
    assert abs(val - jacobi_theta3(q) ** 2) <= 1e-12
    assert val.real == pytest.approx(1.18034, abs=1e-5)
    with pytest.raises(DomainError):
        jacobi_theta3_product(1.0)


def test_series_matches_brute_force():
    om = HatPoint(0.3 + 1.1j, -0.2 + 0.4j)
    z = np.array([0.1 + 0.2j, -0.3 + 0.1j])
    assert theta_series(om, z, 8).value == pytest.approx(brute_theta(om, z, 8), abs=1e-13)


def test_symmetries():
    om = HatPoint(0.3 + 1.1j, -0.2 + 0.4j)
    z = np.array([0.1 + 0.2j, -0.3 + 0.1j])
    v = theta_series(om, z).value
    assert abs(theta_series(om, -z).value - v) <= 1e-12
    assert abs(theta_series(om, z + np.array([1, 0])).value - v) <= 1e-12


@given(st.floats(0.4, 3.0), st.floats(-0.3, 0.3), st.floats(0, 1.0))
def test_tail_bound_is_a_bound(y, vfrac, s):
    om = HatPoint(complex(0.2, y), complex(-0.1, vfrac * y))
    z = np.array([0.1 + s * 1j, 0.0])
    r = 3
    # the difference between radius r and a much larger radius is below the bound
    diff = abs(theta_series(om, z, 25).value - theta_series(om, z, r).value)
    assert diff <= tail_bound(om, z, r) * (1 + 1e-9) + 1e-14


def test_radius_selection():
    z = np.zeros(2)
    r = radius_for(I_PT, z, 1e-12)
    assert tail_bound(I_PT, z, r) <= 1e-12 < tail_bound(I_PT, z, r - 1) or r == 1
    assert theta_series(I_PT, z).accurate
    assert not theta_series(HatPoint(0.05j, 0), z, 1).accurate
    with pytest.raises(DomainError):
        ThetaTruncation(0)


def test_quasi_periodicity_examples():
    z = np.array([0.1 + 0.2j, -0.3 + 0.1j])
    assert quasi_periodicity_residual(I_PT, z, [0, 0], [0, 0]).residual == 0
    r = quasi_periodicity_residual(I_PT, z, [1, 0], [0, 1])
    assert r.conclusive and r.residual <= 1e-9


@given(st.floats(1.0, 2.5), st.floats(-0.5, 0.5), st.lists(st.integers(-2, 2), min_size=4, max_size=4),
       st.floats(-0.5, 0.5), st.floats(-0.3, 0.3))
def test_quasi_periodicity_property(y, vfrac, mk, zr, zi):
    om = HatPoint(complex(0.4, y), complex(-0.3, vfrac * y))
    r = quasi_periodicity_residual(om, np.array([zr + 1j * zi, 0.2 - 0.1j]), mk[:2], mk[2:])
    assert r.conclusive and r.residual <= 1e-8 and r.tail_bound <= 1e-12


def test_principal_spec_is_principal(rng):
    for _ in range(5):
        om = HatPoint(complex(rng.normal(), rng.uniform(1, 2)), complex(rng.normal(), rng.uniform(-0.5, 0.5)))
        spec = principal_spec(om)
        assert section_dimension(spec) == 1
        assert np.array_equal(np.abs(integral_e(spec)), np.abs(np.block([[0 * np.eye(2), np.eye(2)], [np.eye(2), 0 * np.eye(2)]])))


@pytest.mark.parametrize("alpha", [[0, 0, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [1, -2, 1, 1]])
def test_bridge_examples(alpha, rng):
    z = rng.normal(size=2) * 0.3 + 0.1j * rng.normal(size=2)
    r = principal_bridge_residual(I_PT, z, alpha)
    assert r.conclusive and r.residual <= 1e-8
    assert np.allclose(np.abs(r.twist), 1)


def test_bridge_general_point():
    om = HatPoint(0.37 + 1.3j, -0.21 + 0.45j)
    r = principal_bridge_residual(om, np.array([0.2 + 0.1j, -0.1 + 0.05j]), [1, 1, -1, 2])
    assert r.conclusive and r.residual <= 1e-8
