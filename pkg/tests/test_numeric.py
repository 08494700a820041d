import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hatsiegel.group import sample_lie_hat
from hatsiegel.numeric import (
    I4,
    J4,
    DomainError,
    NumericError,
    Tolerance,
    int_det,
    inv2,
    is_hermitian_pd,
    is_symplectic,
    mat_exp,
    pfaffian4,
    smith_normal_form,
    smith_normal_form4,
)

E_OMEGA = [[0, 0, 2, 1], [0, 0, 1, 2], [-2, -1, 0, 0], [-1, -2, 0, 0]]


def random_alt(rng, lo=-9, hi=10):
    a = rng.integers(lo, hi, (4, 4))
    return np.triu(a, 1) - np.triu(a, 1).T


def brute_pfaffian(a):
    """Sum over perfect matchings of {0,1,2,3} with the sign of the permutation."""
    total = 0
    for perm in itertools.permutations(range(4)):
        if perm[0] < perm[1] and perm[2] < perm[3] and perm[0] < perm[2]:
            inv = sum(perm[i] > perm[j] for i in range(4) for j in range(i + 1, 4))
            total += (-1) ** inv * a[perm[0]][perm[1]] * a[perm[2]][perm[3]]
    return total


def test_tolerance_rejects_nonpositive():
    with pytest.raises(DomainError):
        Tolerance(0.0, 1e-9)


def test_hermitian_pd_examples():
    assert is_hermitian_pd(np.eye(2))
    assert is_hermitian_pd([[2, 1], [1, 2]])
    assert not is_hermitian_pd([[1, 2], [2, 1]])


def test_inv2_and_singular():
    m = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert np.allclose(inv2(m) @ m, np.eye(2))
    with pytest.raises(NumericError):
        inv2(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_pfaffian_examples():
    # standard convention: Pf([[0, B], [-B^t, 0]]) = -det B
    assert pfaffian4(J4) == -1
    assert pfaffian4(E_OMEGA) == -3
    assert pfaffian4(np.zeros((4, 4))) == 0


def test_pfaffian_matches_matching_expansion(rng):
    for _ in range(50):
        a = random_alt(rng).tolist()
        assert pfaffian4(a) == brute_pfaffian(a)


def test_pfaffian_squared_is_determinant_200(rng):
    for _ in range(200):
        a = random_alt(rng)
        assert pfaffian4(a) ** 2 == int_det(a.tolist())
        assert int_det(a.tolist()) == round(np.linalg.det(a))


def test_pfaffian_rejects_bad_input():
    with pytest.raises(DomainError):
        pfaffian4(np.eye(4))
    with pytest.raises(DomainError):
        pfaffian4(np.full((4, 4), 0.5) * (1 - np.eye(4)))
    with pytest.raises(DomainError):
        pfaffian4(np.zeros((3, 3)))


def check_snf(a):
    d, u, v = smith_normal_form(a)
    u, v, a = np.array(u), np.array(v), np.array(a)
    assert np.array_equal(u @ a @ v, np.diag(d))
    assert abs(round(np.linalg.det(u))) == 1 and abs(round(np.linalg.det(v))) == 1
    assert all(x >= 0 for x in d)
    for x, y in zip(d, d[1:]):
        assert (x == 0 and y == 0) or (x != 0 and y % x == 0)
    return d


def test_snf_examples():
    assert smith_normal_form4(J4)[0] == [1, 1, 1, 1]
    assert smith_normal_form4(E_OMEGA)[0] == [1, 1, 3, 3]
    assert smith_normal_form4(np.zeros((4, 4), dtype=int))[0] == [0, 0, 0, 0]


def test_snf_properties_random(rng):
    for _ in range(100):
        a = random_alt(rng)
        d = check_snf(a.tolist())
        assert np.prod(d) == abs(int_det(a.tolist()))
        # alternating matrices have paired divisors
        assert d[0] == d[1] and d[2] == d[3]


@given(st.lists(st.integers(-20, 20), min_size=9, max_size=9))
def test_snf_general_3x3(entries):
    a = [entries[0:3], entries[3:6], entries[6:9]]
    d = check_snf(a)
    assert np.prod(d) == abs(int_det(a))


def test_mat_exp_examples(rng):
    assert np.allclose(mat_exp(np.zeros((4, 4))), I4)
    for _ in range(20):
        x = sample_lie_hat(rng).matrix()
        m = mat_exp(x)
        assert np.isrealobj(m)
        assert is_symplectic(m, Tolerance(1e-9, 1e-9))
        assert np.allclose(m @ mat_exp(-x), I4, atol=1e-9)


def test_mat_exp_rotation_oracle():
    t = 0.7
    x = np.array([[0.0, -t], [t, 0.0]])
    assert np.allclose(mat_exp(x), [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]], atol=1e-14)
    assert np.allclose(mat_exp(np.diag([1j, 2.0])), np.diag([np.exp(1j), np.exp(2.0)]))


def test_mat_exp_refuses_huge_norm():
    with pytest.raises(DomainError):
        mat_exp(np.eye(4) * 1000)
