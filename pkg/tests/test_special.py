import cmath
import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_appell.errors import DomainError, PoleError
from discrete_appell.special import (
    POCHHAMMER_PRODUCT_LIMIT,
    beta,
    binomial,
    discrete_pochhammer,
    gamma,
    log_gamma,
    pochhammer,
    rising_product,
    rising_via_gamma,
)

finite = dict(allow_nan=False, allow_infinity=False)
complex_params = st.builds(
    complex, st.floats(-6, 6, **finite), st.floats(-3, 3, **finite)
)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_log_gamma_examples():
    assert log_gamma(1) == 0
    assert abs(log_gamma(5) - math.log(24)) < 1e-14
    assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14
    assert abs(log_gamma(0.5) - 0.5723649429247001) < 1e-12


@pytest.mark.parametrize("z", [0, -1, -7, -30.0])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_log_gamma_matches_mpmath_complex():
    rng = random.Random(11)
    mpmath.mp.dps = 30
    worst = 0.0
    for _ in range(2000):
        r = 50 * math.sqrt(rng.random())
        ang = rng.uniform(-math.pi, math.pi)
        z = cmath.rect(r, ang)
        if abs(z.imag) < 0.01 and z.real < 0.5 and abs(z.real - round(z.real)) < 0.01:
            continue
        ref = mpmath.gamma(mpmath.mpc(z.real, z.imag))
        got = cmath.exp(log_gamma(z))
        worst = max(worst, float(abs(mpmath.mpc(got.real, got.imag) - ref) / abs(ref)))
    assert worst <= 1e-13


def test_log_gamma_real_axis_off_poles():
    mpmath.mp.dps = 30
    worst = 0.0
    for i in range(4001):
        x = -49.97 + i * (2 * 49.97 / 4000)
        if abs(x - round(x)) < 0.01:
            continue
        ref = mpmath.gamma(mpmath.mpf(x))
        got = cmath.exp(log_gamma(x))
        worst = max(worst, float(abs(mpmath.mpc(got.real, got.imag) - ref) / abs(ref)))
    assert worst <= 1e-13


def test_log_gamma_principal_branch():
    mpmath.mp.dps = 20
    for z in (3 + 4j, -2.5 + 0.3j, 10 - 20j, 0.1 + 40j):
        ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
        got = log_gamma(z)
        assert abs(got.real - ref.real) < 1e-12
        # branch of the imaginary part may differ from mpmath's continuous one by 2 pi
        assert -math.pi < got.imag <= math.pi
        assert abs(cmath.exp(1j * (got.imag - ref.imag)) - 1) < 1e-11


def test_beta_examples():
    assert abs(beta(1, 1) - 1) < 1e-14
    assert abs(beta(2, 3) - 1 / 12) < 1e-15
    assert abs(beta(0.5, 0.5) - math.pi) < 1e-13
    with pytest.raises(PoleError):
        beta(-1, 2)
    with pytest.raises(PoleError):
        beta(0.5, -0.5)


@given(complex_params, complex_params)
def test_beta_symmetric(v, w):
    try:
        left = beta(v, w)
    except (PoleError, OverflowError):
        return
    assert abs(left - beta(w, v)) <= 1e-13 * abs(left)


def test_pochhammer_examples():
    assert pochhammer(3.3 + 1j, 0) == 1
    assert pochhammer(1, 5) == 120
    assert abs(pochhammer(0.5, 3) - 1.875) < 1e-15
    assert pochhammer(-3, 5) == 0
    with pytest.raises(DomainError):
        pochhammer(1, -1)


def test_pochhammer_branches_agree_at_threshold():
    rng = random.Random(3)
    n = POCHHAMMER_PRODUCT_LIMIT
    for _ in range(200):
        u = complex(rng.uniform(0.1, 5), rng.uniform(-3, 3))
        assert rel(rising_via_gamma(u, n), rising_product(u, n)) <= 1e-12


def test_gamma_recurrence():
    for z in (0.3 + 0.2j, 2.5, -1.5 + 1j, 7.25 - 3j):
        assert rel(gamma(z + 1), z * gamma(z)) < 1e-13


@settings(max_examples=300)
@given(complex_params, st.integers(0, 12), st.integers(0, 12))
def test_pochhammer_split(u, k, l):
    lhs = pochhammer(u, k + l)
    rhs = pochhammer(u, k) * pochhammer(u + k, l)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs)) + 1e-300


@settings(max_examples=300)
@given(complex_params, st.integers(0, 12))
def test_pochhammer_reflection(u, k):
    lhs = pochhammer(u, k)
    rhs = (-1) ** k * pochhammer(1 - u - k, k)
    # 1 - u - k cancels, so the scale is the product of |u| + j + 1
    scale = rising_product(abs(u) + 1, k).real
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_negative_integer_pochhammer_exact():
    for k in range(11):
        for l in range(k + 1):
            value = pochhammer(-k, l)
            exact = (-1) ** l * math.factorial(k) // math.factorial(k - l)
            assert value == exact


@settings(max_examples=300)
@given(complex_params, st.integers(0, 10), st.data())
def test_pochhammer_difference_of_lengths(u, k, data):
    l = data.draw(st.integers(0, k))
    denom = pochhammer(1 - u - k, l)
    if abs(denom) < 1e-8:
        return
    lhs = pochhammer(u, k - l)
    rhs = (-1) ** l * pochhammer(u, k) / denom
    scale = rising_product(abs(u) + 1, k).real / abs(denom)
    assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), scale)


def test_discrete_pochhammer_examples():
    assert discrete_pochhammer(2.7, 0, 3) == 1
    assert discrete_pochhammer(2, 2, 2) == 0
    assert discrete_pochhammer(-2, 2, 2) == 120
    assert abs(discrete_pochhammer(-2, 2, 2, factorized=True) - 120) < 1e-12


def test_discrete_pochhammer_exact_zero_with_residue():
    # t carries rounding residue but still terminates
    t = 0.1 * 3 * 10  # 3.0000000000000004
    assert discrete_pochhammer(t, 2, 2) == 0
    assert discrete_pochhammer(t, 1, 3) != 0


@settings(max_examples=300)
@given(complex_params, st.integers(0, 6), st.integers(1, 4))
def test_discrete_pochhammer_factorized_agrees(t, m, k):
    direct = discrete_pochhammer(t, m, k)
    factored = discrete_pochhammer(t, m, k, factorized=True)
    if direct == 0:
        assert abs(factored) <= 1e-9 * (1 + abs(pochhammer(abs(t) + 1, m * k)))
        return
    assert abs(direct - factored) <= 1e-11 * abs(direct)


def test_binomial():
    assert binomial(5, 0) == 1
    assert binomial(5, 5) == 1
    assert binomial(6, 2) == 15
    with pytest.raises(DomainError):
        binomial(2, 3)
