import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_appell.errors import OperatorMismatch, PreconditionError
from discrete_appell.functions import Appell1Params, Appell2Params, eval_f1_d1, eval_f1_d2
from discrete_appell.operators import (
    BIG_THETA_T,
    BIG_THETA_T1,
    BIG_THETA_T2,
    IDENTITY,
    PARTIAL_SHAPES,
    PHI,
    THETA,
    THETA_T1_PER_STEP,
    THETA_T2_PER_STEP,
    apply_numeric,
    apply_weighted,
    compile_weight,
    delta_power,
    param,
    partial_power,
    partial_power_finite_difference,
    partial_power_sides,
    product,
    theta_t_action,
    theta_t_numeric,
)
from discrete_appell.special import rising_product
from discrete_appell.verification import (
    first_params,
    power_formula_sides,
    rel_residual,
    second_difference_equation_sides,
    second_params,
)


def terminating_first(seed, **fixed):
    p = first_params(random.Random(seed), "terminating")
    return p.replace(**fixed) if fixed else p


def test_identity_weight():
    p = terminating_first(1)
    assert compile_weight(IDENTITY, p).at(3, 4) == 1
    assert apply_weighted(p, IDENTITY).value == eval_f1_d1(p).value


def test_contiguous_weight_image():
    p = terminating_first(2)
    w = compile_weight(product(param("a") + THETA + PHI), p)
    assert w.at(2, 5) == pytest.approx(p.a + 7)
    w = compile_weight(product(THETA_T1_PER_STEP + THETA_T2_PER_STEP + param("c") - 1), p)
    assert w.at(2, 5) == pytest.approx(2 + 5 + p.c - 1)
    w = compile_weight(product(BIG_THETA_T1, BIG_THETA_T2), p)
    assert w.at(2, 3) == pytest.approx(2 * p.k1 * 3 * p.k2)
    q = second_params(random.Random(3), "terminating")
    assert compile_weight(product(BIG_THETA_T), q).at(2, 3) == pytest.approx(5 * q.k)


def test_atom_target_mismatch():
    p1 = terminating_first(4)
    p2 = second_params(random.Random(4), "terminating")
    with pytest.raises(OperatorMismatch):
        compile_weight(product(BIG_THETA_T), p1)
    with pytest.raises(OperatorMismatch):
        compile_weight(product(BIG_THETA_T1), p2)


def test_per_step_needs_nonzero_step():
    p = Appell1Params(1, 1, 1, 2, 0.5, 0.5, 0, 0, 0.2, 0.1)
    with pytest.raises(PreconditionError):
        compile_weight(product(THETA_T1_PER_STEP), p)


def test_theta_of_geometric_series():
    p = Appell1Params(1, 1, 1, 1, 0, 0, 0, 0, 0.5, 0)
    assert abs(apply_weighted(p, product(THETA)).value - 2) < 1e-12


def test_contiguous_relation_through_weights():
    for seed in range(5):
        p = terminating_first(seed)
        lhs = apply_weighted(p, product(param("a") + THETA + PHI)).value / p.a
        assert rel_residual(lhs, eval_f1_d1(p.shifted(a=1)).value) < 1e-10


def test_theta_t_numeric_trivial_cases():
    p = terminating_first(5)
    assert theta_t_numeric(p, "t1", lambda q: 7.0) == 0
    assert theta_t_numeric(p, "t1", lambda q: q.t1) == pytest.approx(p.t1)


@pytest.mark.parametrize("seed", range(6))
def test_weighted_and_numeric_atoms_agree(seed):
    p = terminating_first(seed)
    for atom in (BIG_THETA_T1, BIG_THETA_T2, THETA, PHI):
        w = apply_weighted(p, product(atom)).value
        n = apply_numeric(p, product(atom))
        assert rel_residual(w, n) < 1e-8
    q = second_params(random.Random(seed), "terminating")
    for atom in (BIG_THETA_T, THETA, PHI):
        w = apply_weighted(q, product(atom)).value
        n = apply_numeric(q, product(atom), lambda r: eval_f1_d2(r).value)
        assert rel_residual(w, n) < 1e-8


def test_theta_t1_at_t4():
    p = terminating_first(7, t1=4, k1=1)
    w = apply_weighted(p, product(BIG_THETA_T1)).value
    assert rel_residual(w, theta_t_numeric(p, "t1")) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.integers(1, 3),
       st.complex_numbers(max_magnitude=8, allow_nan=False, allow_infinity=False))
def test_theta_t_action_on_discrete_factor(n, k, t):
    # oracle from the plain product: discrete_pochhammer snaps t within 1e-12 of an
    # integer to an exact zero, while the shifted difference keeps the residue
    expected = n * k * (-1) ** (n * k) * rising_product(-t, n * k)
    got = theta_t_action(t, n, k)
    assert abs(got - expected) <= 1e-11 * max(abs(expected), 1) * (1 + abs(t)) ** (n * k)


def test_delta_power_kills_low_degree_polynomials():
    p = terminating_first(8, k1=1)
    for r in (1, 2, 3):
        poly = lambda q, r=r: sum(q.t1**j for j in range(r))  # noqa: E731
        assert abs(delta_power(p, "t1", r, poly)) < 1e-9


def test_delta_power_precondition():
    p = terminating_first(9, k1=2)
    with pytest.raises(PreconditionError):
        delta_power(p, "t1", 1)
    with pytest.raises(PreconditionError):
        delta_power(p.replace(k1=1), "t1", 0)


def test_delta_formula_examples():
    from discrete_appell.special import pochhammer

    p = terminating_first(10, k1=1)
    for r in (1, 2):
        lhs = delta_power(p, "t1", r)
        scale = pochhammer(p.a, r) * pochhammer(p.b1, r) * p.x**r / pochhammer(p.c, r)
        rhs = scale * eval_f1_d1(p.shifted(a=r, b1=r, c=r)).value
        assert rel_residual(lhs, rhs) < 1e-9


@pytest.mark.parametrize("shape", PARTIAL_SHAPES)
def test_partial_shapes(shape):
    for seed in range(3):
        p = terminating_first(seed)
        assert partial_power(p, shape, 0) == 0
        for r in (1, 2, 3):
            assert partial_power(p, shape, r) < 1e-10


@pytest.mark.parametrize("shape", PARTIAL_SHAPES)
def test_partial_shapes_finite_difference_sanity(shape):
    p = terminating_first(11)
    for r in (1, 2):
        lhs, _ = partial_power_sides(p, shape, r)
        fd = partial_power_finite_difference(p, shape, r, 1e-5)
        assert abs(fd - lhs) / (abs(lhs) + 1) < 1e-5


def test_power_formula_is_falling_factorial():
    p = terminating_first(12)
    for r in (1, 2, 3):
        assert rel_residual(*power_formula_sides(p, "x", r)) < 1e-10
    # theta^r itself only matches for r = 1
    assert rel_residual(*power_formula_sides(p, "x", 1, literal_power=True)) < 1e-10
    for r in (2, 3):
        assert rel_residual(*power_formula_sides(p, "x", r, literal_power=True)) > 1e-4


def test_second_form_equation_leading_factor():
    for seed in range(4):
        q = second_params(random.Random(seed), "terminating")
        for k in (1, 2, 3):
            qk = q.replace(k=k, t=3 * k + 1)
            assert rel_residual(*second_difference_equation_sides(qk, "x")) < 1e-10
            with_k = rel_residual(*second_difference_equation_sides(qk, "x", extra_k=True))
            if k == 1:
                assert with_k < 1e-10
            else:
                assert with_k > 1e-4


def test_weights_commute():
    p = terminating_first(13)
    a = apply_weighted(p, product(THETA + 1, PHI + param("b2"), BIG_THETA_T1)).value
    b = apply_weighted(p, product(BIG_THETA_T1, PHI + param("b2"), THETA + 1)).value
    assert a == pytest.approx(b, rel=1e-14)


def test_second_form_joint_weight():
    q = Appell2Params(1.2, 0.7, 1.1, 2.5, 6, 2, 0.2, 0.1)
    w = apply_weighted(q, product(BIG_THETA_T)).value
    n = apply_numeric(q, product(BIG_THETA_T), lambda r: eval_f1_d2(r).value)
    assert rel_residual(w, n) < 1e-10
