import cmath
import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_appell.errors import DomainError, PoleError
from discrete_appell.functions import (
    Appell1Params,
    Appell2Params,
    DegenerationProbe,
    HumbertVariant,
    KdFSpec,
    degeneration_error,
    eval_2f1,
    eval_classical_f1,
    eval_discrete_pfq,
    eval_f1_d1,
    eval_f1_d2,
    eval_f1_equal_lattice,
    eval_f1_equal_steps,
    eval_humbert,
    eval_kdf,
    kdf_reduction,
    kdf_region,
)
from discrete_appell.series import Verdict
from discrete_appell.special import pochhammer


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def cplx(rng, lo, hi):
    return complex(rng.uniform(lo, hi), rng.uniform(-1, 1))


def test_first_form_examples():
    r = eval_f1_d1(Appell1Params(1, 1, 1, 1, 0.3, 0.7, 0, 0, 0.25, 0))
    assert r.verdict == Verdict.CONVERGED
    assert abs(r.value - 4 / 3) < 1e-12
    assert eval_f1_d1(Appell1Params(1.3, 2, 0.5, 2.5, 4, 4, 1, 1, 0, 0)).value == 1
    r = eval_f1_d1(Appell1Params(1, 1, 3.7, 1, 2, 1.5, 1, 0, 0.5, 0))
    assert r.verdict == Verdict.TERMINATED
    assert r.value == 2.5


def test_second_form_examples():
    assert eval_f1_d2(Appell2Params(1.5, 2, 0.5, 3, 2, 1, 0, 0)).value == 1
    r = eval_f1_d2(Appell2Params(1, 1, 2, 1, 1, 1, 0.5, 0))
    assert r.verdict == Verdict.TERMINATED
    assert abs(r.value - 1.5) < 1e-15


def test_second_form_k0_is_classical_f1():
    rng = random.Random(2)
    for _ in range(20):
        a, b1, b2 = cplx(rng, 0.5, 3), cplx(rng, 0.5, 3), cplx(rng, 0.5, 3)
        c = complex(rng.uniform(1.5, 4), 0.3)
        x, y = cmath.rect(0.4, rng.uniform(0, 6)), cmath.rect(0.3, rng.uniform(0, 6))
        ours = eval_f1_d2(Appell2Params(a, b1, b2, c, rng.uniform(-3, 3), 0, x, y)).value
        ref = eval_classical_f1(a, b1, b2, c, x, y).value
        assert rel(ours, ref) < 1e-10


def test_classical_f1_against_mpmath():
    rng = random.Random(3)
    for _ in range(10):
        a, b1, b2 = (rng.uniform(0.5, 3) for _ in range(3))
        c = rng.uniform(1.5, 4)
        x, y = rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)
        ref = complex(mpmath.appellf1(a, b1, b2, c, x, y))
        assert rel(eval_classical_f1(a, b1, b2, c, x, y).value, ref) < 1e-12


def test_classical_examples():
    assert abs(eval_2f1(1, 2, 2, 0.5).value - 2) < 1e-12
    assert abs(eval_classical_f1(1, 1, 1, 2, 0.5, 0.5).value - 2) < 1e-12
    f1 = eval_classical_f1(1.2, 0.7, 2.1, 2.9, 0.4, 0).value
    assert rel(f1, eval_2f1(1.2, 0.7, 2.9, 0.4).value) < 1e-13


def test_classical_outside_region():
    with pytest.raises(DomainError):
        eval_classical_f1(1, 1, 1, 2, 1.2, 0.1)


def test_pole_in_c():
    with pytest.raises(PoleError):
        eval_f1_d1(Appell1Params(1, 1, 1, -2, 3, 3, 1, 1, 0.2, 0.1))


def test_domain_error_on_nonterminating_axis():
    with pytest.raises(DomainError):
        eval_f1_d1(Appell1Params(1, 1, 1, 2, 0.5, 0.5, 0, 0, 1.5, 0.1))
    # a terminating axis may sit anywhere
    r = eval_f1_d1(Appell1Params(1, 1, 1, 2, 3, 0.5, 1, 0, 5.0, 0.1))
    assert r.verdict == Verdict.CONVERGED


def test_discrete_pfq_examples():
    assert eval_discrete_pfq([1.5], [], 2.3, 1, 0).value == 1
    assert abs(eval_discrete_pfq([1, 1], [1], 0, 0, 0.5).value - 2) < 1e-12
    x = 0.3
    r = eval_discrete_pfq([1], [], 3, 1, x)
    assert r.verdict == Verdict.TERMINATED
    assert abs(r.value - (1 + 3 * x + 6 * x**2 + 6 * x**3)) < 1e-15


def test_kdf_examples():
    r = eval_kdf(KdFSpec(), 0.2, 0.1)
    assert abs(r.value - math.exp(0.3)) < 1e-14
    assert r.region == "entire"
    assert eval_kdf(KdFSpec((1.5,), (2,), (3,), (4,)), 0, 0).value == 1


def test_kdf_region_cases():
    spec = KdFSpec((1,), (1,), (1,), (1,))
    assert kdf_region(spec, 0.3, 0.3) == "inside"
    assert kdf_region(spec, 1.0, 0.3) == "boundary"
    assert kdf_region(spec, 1.2, 0.3) == "outside"
    f2_like = KdFSpec((1,), (1,), (1,), (), (1,), (1,))
    assert kdf_region(f2_like, 0.4, 0.5) == "inside"
    assert kdf_region(f2_like, 0.6, 0.5) == "outside"
    assert kdf_region(KdFSpec((1,)), 0.5, 0.4) == "inside"
    # one direction entire, the other on the ratio-one case
    assert kdf_region(KdFSpec((), (1,)), 0.2, 0.2) == "unclassified"


@pytest.mark.parametrize("k1, k2", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_unit_step_reductions(k1, k2):
    rng = random.Random(10 * k1 + k2)
    for _ in range(20):
        p = Appell1Params(
            cplx(rng, 0.5, 3), cplx(rng, 0.5, 3), cplx(rng, 0.5, 3), complex(rng.uniform(1.5, 4), 0.4),
            rng.randint(3, 7) if k1 else rng.uniform(-2, 2), rng.randint(3, 7) if k2 else rng.uniform(-2, 2),
            k1, k2, cmath.rect(0.35, rng.uniform(0, 6)), cmath.rect(0.3, rng.uniform(0, 6)),
        )
        spec, x, y = kdf_reduction(p)
        assert rel(eval_f1_d1(p).value, eval_kdf(spec, x, y).value) < 1e-12


def test_second_form_reduction():
    rng = random.Random(8)
    for _ in range(20):
        p = Appell2Params(cplx(rng, 0.5, 3), cplx(rng, 0.5, 3), cplx(rng, 0.5, 3), complex(rng.uniform(1.5, 4), 0.4),
                          rng.randint(3, 7), 1, cmath.rect(0.35, rng.uniform(0, 6)), cmath.rect(0.3, rng.uniform(0, 6)))
        spec, x, y = kdf_reduction(p)
        assert rel(eval_f1_d2(p).value, eval_kdf(spec, x, y).value) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 12), st.integers(0, 12), st.data())
def test_variable_swap_symmetry(k1, k2, t1, t2, data):
    z = st.complex_numbers(max_magnitude=0.35, allow_nan=False, allow_infinity=False)
    x, y = data.draw(z), data.draw(z)
    p = Appell1Params(1.3 + 0.2j, 0.7, 2.2 - 0.5j, 2.5 + 0.3j, t1 if k1 else 0.4, t2 if k2 else -0.6, k1, k2, x, y)
    assert eval_f1_d1(p).value == pytest.approx(eval_f1_d1(p.swapped()).value, rel=1e-13, abs=1e-13)


def test_y_zero_collapses_to_single_variable_series():
    p = Appell1Params(1.3, 0.8 + 0.2j, 2.0, 2.7, 7, 0.5, 2, 0, 0.3 - 0.1j, 0)
    single = eval_discrete_pfq([p.a, p.b1], [p.c], p.t1, p.k1, p.x).value
    assert rel(eval_f1_d1(p).value, single) < 1e-14


def test_special_case_wrappers():
    steps = eval_f1_equal_steps(1.1, 0.7, 1.9, 2.4, 7, 8, 2, 0.3, 0.2).value
    assert steps == eval_f1_d1(Appell1Params(1.1, 0.7, 1.9, 2.4, 7, 8, 2, 2, 0.3, 0.2)).value
    lattice = eval_f1_equal_lattice(1.1, 0.7, 1.9, 2.4, 9, 1, 3, 0.3, 0.2).value
    assert lattice == eval_f1_d1(Appell1Params(1.1, 0.7, 1.9, 2.4, 9, 9, 1, 3, 0.3, 0.2)).value


def brute_humbert2(b1, b2, c, x, y, n_max=60):
    total = 0
    for m in range(n_max):
        for n in range(n_max - m):
            total += pochhammer(b1, m) * pochhammer(b2, n) / pochhammer(c, m + n) * x**m * y**n / (
                math.factorial(m) * math.factorial(n))
    return total


def test_humbert_examples():
    for family in ("phi1", "phi2", "phi3"):
        for form, params in (("first", Appell1Params(1.2, 0.5, 0.8, 2.1, 3, 4, 1, 1, 0, 0)),
                             ("second", Appell2Params(1.2, 0.5, 0.8, 2.1, 3, 1, 0, 0))):
            assert eval_humbert(HumbertVariant(family, form), params).value == 1
    p = Appell1Params(1, 1, 1, 1, 0, 0, 0, 0, 0.3, 0)
    ours = eval_humbert(HumbertVariant("phi2"), p).value
    assert rel(ours, brute_humbert2(1, 1, 1, 0.3, 0)) < 1e-14


def test_classical_phi2_degeneration():
    b1, b2, c, x, y = 0.7, 1.4, 2.3, 0.3 + 0.1j, -0.2
    p = Appell1Params(5.0, b1, b2, c, 0.3, 0.3, 0, 0, x, y)
    limit = eval_humbert(HumbertVariant("phi2"), p).value
    assert rel(limit, brute_humbert2(b1, b2, c, x, y)) < 1e-13
    err = degeneration_error(DegenerationProbe(1e-6, HumbertVariant("phi2")), p)
    assert err < 1e-5


def test_degeneration_rate_example():
    p = Appell1Params(1.4 + 0.2j, 0.9, 1.6 - 0.3j, 2.6 + 0.4j, 5, 6, 1, 1, 0.2 + 0.1j, -0.15 + 0.2j)
    for family in ("phi1", "phi2", "phi3"):
        v = HumbertVariant(family)
        errs = [degeneration_error(DegenerationProbe(e, v), p) for e in (0.1, 0.05, 0.025)]
        assert all(1.6 <= errs[i] / errs[i + 1] <= 2.4 for i in range(2))


def test_degeneration_at_origin():
    for family in ("phi1", "phi2", "phi3"):
        assert degeneration_error(DegenerationProbe(0.1, HumbertVariant(family)),
                                  Appell1Params(1, 2, 3, 4, 5, 6, 1, 1, 0, 0)) == 0
        assert degeneration_error(DegenerationProbe(0.1, HumbertVariant(family, "second")),
                                  Appell2Params(1, 2, 3, 4, 5, 1, 0, 0)) == 0


def test_degeneration_probe_bounds():
    with pytest.raises(ValueError):
        DegenerationProbe(0.2, HumbertVariant("phi1"))
    with pytest.raises(ValueError):
        DegenerationProbe(0.0, HumbertVariant("phi1"))
    with pytest.raises(ValueError):
        degeneration_error(DegenerationProbe(1e-9, HumbertVariant("phi1")), Appell1Params(1, 1, 1, 2, 0, 0))
    with pytest.raises(ValueError):
        HumbertVariant("phi4")
