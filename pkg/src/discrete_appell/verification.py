"""Identity families as residual checks over random parameter draws.

Every family knows how to draw parameters for a regime and how to evaluate
both sides of its identity.  ``run_suite`` aggregates residuals
|lhs - rhs| / (|lhs| + |rhs| + 1) into a deterministic report.
"""
import cmath
import enum
import json
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, PoleError, PreconditionError, QuadratureError
from .functions import (
    Appell1Params,
    Appell2Params,
    DegenerationProbe,
    HumbertVariant,
    degeneration_error,
    eval_classical_f1,
    eval_f1_d1,
    eval_f1_d2,
    eval_f1_equal_lattice,
    eval_f1_equal_steps,
    eval_kdf,
    kdf_reduction,
)
from .integrals import IntegralForm, eval_integral
from .operators import (
    BIG_THETA_T,
    BIG_THETA_T1,
    BIG_THETA_T2,
    PHI,
    THETA,
    THETA_T1_PER_STEP,
    THETA_T2_PER_STEP,
    THETA_T_PER_STEP,
    apply_numeric,
    apply_weighted,
    delta_power,
    falling_theta_weight,
    param,
    partial_power_sides,
    product,
)
from .quadrature import QuadratureOptions
from .relations import CATALOGUES, enumerate_relation, evaluate_relation
from .series import DEFAULT_OPTIONS, CallableCoefficients, SeriesOptions, sum_double_series
from .special import binomial, discrete_pochhammer, pochhammer

REGIMES = ("terminating", "classical")

DEFAULT_TOLERANCES = {
    "algebraic": 1e-9,
    "operator": 1e-8,
    "integral": 1e-7,
    "integral_t": 1e-6,
    "infinite_sum": 1e-8,
}

# accepted band for the error ratio of a degeneration probe when epsilon halves
RATE_BAND = (1.5, 2.5)
DEGENERATION_EPSILONS = (0.1, 0.05, 0.025)


class Status(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    SKIPPED = "Skipped"


@dataclass
class Draw:
    params: object
    extras: Dict[str, object] = field(default_factory=dict)


@dataclass
class Residual:
    family: str
    draw: Draw
    lhs: complex
    rhs: complex
    rel_residual: float
    status: Status
    reason: str = ""


@dataclass(frozen=True)
class IdentityFamily:
    id: str
    description: str
    category: str
    regimes: Tuple[str, ...]
    draw: Callable[[random.Random, str], Draw]
    evaluate: Callable[[Draw, SeriesOptions], Tuple[complex, complex]]
    # rate families compare an error ratio with a band instead of a tolerance
    rate: bool = False


def rel_residual(lhs, rhs):
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1)


def allowed_residual(lhs, rhs, allowance=0.0):
    """Residual of the part of |lhs - rhs| not covered by a known reference error."""
    return max(abs(lhs - rhs) - allowance, 0.0) / (abs(lhs) + abs(rhs) + 1)


# -- parameter draws -------------------------------------------------------------


def _cplx(rng, lo, hi, im=1.0):
    return complex(rng.uniform(lo, hi), rng.uniform(-im, im))


def _point(rng, radius=0.35):
    r = radius * math.sqrt(rng.random())
    return cmath.rect(r, rng.uniform(-math.pi, math.pi))


def _c_value(rng):
    # a nonzero imaginary part keeps c - s away from the poles for every s
    return complex(rng.uniform(1.5, 4), rng.choice((-1, 1)) * rng.uniform(0.1, 1))


def _lattice(rng, regime, k=None):
    """(t, k) for one lattice slot."""
    if regime == "classical":
        return rng.uniform(-3, 3), 0
    if k is None:
        k = rng.randint(1, 3)
    if k == 0:
        return rng.uniform(-3, 3), 0
    return float(rng.randint(3 * k, 3 * k + 4)), k


def first_params(rng, regime, k1=None, k2=None, radius=0.35):
    a, b1, b2 = _cplx(rng, 0.5, 3), _cplx(rng, 0.5, 3), _cplx(rng, 0.5, 3)
    c = _c_value(rng)
    t1, k1 = _lattice(rng, regime, k1)
    t2, k2 = _lattice(rng, regime, k2)
    return Appell1Params(a, b1, b2, c, t1, t2, k1, k2, _point(rng, radius), _point(rng, radius))


def second_params(rng, regime, k=None, radius=0.35):
    a, b1, b2 = _cplx(rng, 0.5, 3), _cplx(rng, 0.5, 3), _cplx(rng, 0.5, 3)
    c = _c_value(rng)
    t, k = _lattice(rng, regime, k)
    return Appell2Params(a, b1, b2, c, t, k, _point(rng, radius), _point(rng, radius))


def _params_for(form):
    return first_params if form == "first" else second_params


def _evaluator(params):
    return eval_f1_d1 if isinstance(params, Appell1Params) else eval_f1_d2


def value(params, opts=DEFAULT_OPTIONS):
    """Function value, refusing anything but a quantitative verdict."""
    result = _evaluator(params)(params, opts)
    if not result.ok:
        raise PreconditionError(f"series verdict {result.verdict.value}", "not_quantitative")
    return result.value


def weighted(params, expr, opts, constants=None):
    result = apply_weighted(params, expr, opts, constants)
    if not result.ok:
        raise PreconditionError(f"series verdict {result.verdict.value}", "not_quantitative")
    return result.value


def _simple_draw(form, regime_k=None, **extra_ranges):
    def draw(rng, regime):
        params = _params_for(form)(rng, regime) if regime_k is None else regime_k(rng, regime)
        extras = {name: rng.choice(choices) for name, choices in extra_ranges.items()}
        return Draw(params, extras)

    return draw


# -- reductions -------------------------------------------------------------------


def _reduction_draw(k1, k2):
    def draw(rng, regime):
        return Draw(first_params(rng, "terminating" if (k1 or k2) else regime, k1, k2))

    return draw


def _reduction_kdf(draw, opts):
    spec, x, y = kdf_reduction(draw.params)
    ref = eval_kdf(spec, x, y, opts)
    return value(draw.params, opts), ref.value


def _reduction_classical(draw, opts):
    p = draw.params
    return value(p, opts), eval_classical_f1(p.a, p.b1, p.b2, p.c, p.x, p.y, opts).value


def _second_reduction_draw(k):
    def draw(rng, regime):
        return Draw(second_params(rng, "terminating" if k else regime, k))

    return draw


# -- difference equations ------------------------------------------------------------


def _step_factor(t, k):
    """(-1)^k (-t)_k, the factor produced by one lattice step."""
    return discrete_pochhammer(t, 1, k)


def _diff_eq_first(slot):
    def evaluate(draw, opts):
        p = draw.params
        joint = THETA_T1_PER_STEP + THETA_T2_PER_STEP
        if slot == 1:
            lhs = weighted(p, product(BIG_THETA_T1, joint + param("c") - 1), opts)
            shifted = p.replace(t1=p.t1 - p.k1)
            inner = weighted(shifted, product(joint + param("a"), THETA_T1_PER_STEP + param("b1")), opts, p)
            rhs = p.k1 * _step_factor(p.t1, p.k1) * p.x * inner
        else:
            lhs = weighted(p, product(BIG_THETA_T2, joint + param("c") - 1), opts)
            shifted = p.replace(t2=p.t2 - p.k2)
            inner = weighted(shifted, product(joint + param("a"), THETA_T2_PER_STEP + param("b2")), opts, p)
            rhs = p.k2 * _step_factor(p.t2, p.k2) * p.y * inner
        return lhs, rhs

    return evaluate


def _diff_eq_mixed(draw, opts):
    p = draw.params
    left_inner = weighted(
        p.replace(t2=p.t2 - p.k2), product(BIG_THETA_T1, THETA_T2_PER_STEP + param("b2")), opts, p
    )
    right_inner = weighted(
        p.replace(t1=p.t1 - p.k1), product(BIG_THETA_T2, THETA_T1_PER_STEP + param("b1")), opts, p
    )
    lhs = p.k2 * _step_factor(p.t2, p.k2) * p.y * left_inner
    rhs = p.k1 * _step_factor(p.t1, p.k1) * p.x * right_inner
    return lhs, rhs


def second_difference_equation_sides(p: Appell2Params, variable="x", opts=DEFAULT_OPTIONS, extra_k=False):
    """Both sides of the joint-lattice equation in x (or y).

    theta (Theta_t/k + c - 1) F = (-1)^k (-t)_k x rho^k (Theta_t/k + a)(b1 + theta) F.
    ``extra_k`` multiplies the right side by an extra k; the equation
    only holds that way for k = 1.
    """
    euler, b_sym, var = (THETA, "b1", p.x) if variable == "x" else (PHI, "b2", p.y)
    lhs = weighted(p, product(euler, THETA_T_PER_STEP + param("c") - 1), opts)
    shifted = p.replace(t=p.t - p.k)
    inner = weighted(shifted, product(THETA_T_PER_STEP + param("a"), euler + param(b_sym)), opts, p)
    rhs = _step_factor(p.t, p.k) * var * inner
    if extra_k:
        rhs *= p.k
    return lhs, rhs


def _second_diff_eq(variable):
    def evaluate(draw, opts):
        return second_difference_equation_sides(draw.params, variable, opts)

    return evaluate


def _second_mixed(draw, opts):
    p = draw.params
    lhs = p.y * weighted(p, product(THETA, PHI + param("b2")), opts)
    rhs = p.x * weighted(p, product(PHI, THETA + param("b1")), opts)
    return lhs, rhs


# -- difference and differential formulas --------------------------------------------


def _delta_draw(slot):
    def draw(rng, regime):
        k1, k2 = (1, None) if slot == 1 else (None, 1)
        return Draw(first_params(rng, regime, k1, k2), {"r": rng.randint(1, 3)})

    return draw


def _delta_formula(slot):
    def evaluate(draw, opts):
        p, r = draw.params, draw.extras["r"]
        lhs = delta_power(p, "t1" if slot == 1 else "t2", r, lambda q: value(q, opts))
        if slot == 1:
            scale = pochhammer(p.a, r) * pochhammer(p.b1, r) * p.x**r / pochhammer(p.c, r)
            rhs = scale * value(p.shifted(a=r, b1=r, c=r), opts)
        else:
            scale = pochhammer(p.a, r) * pochhammer(p.b2, r) * p.y**r / pochhammer(p.c, r)
            rhs = scale * value(p.shifted(a=r, b2=r, c=r), opts)
        return lhs, rhs

    return evaluate


def power_formula_sides(p, variable, r, opts=DEFAULT_OPTIONS, literal_power=False):
    """Both sides of the r-fold theta (or phi) formula.

    The right side, as stated, equals x^r d^r/dx^r F: the falling product
    theta (theta - 1) ... (theta - r + 1).  ``literal_power`` applies
    theta^r instead, which only agrees for r = 1.
    """
    expr = product(*([THETA if variable == "x" else PHI] * r)) if literal_power else falling_theta_weight(r, variable)
    lhs = weighted(p, expr, opts)
    b_name, var = ("b1", p.x) if variable == "x" else ("b2", p.y)
    if isinstance(p, Appell1Params):
        t_name, k = ("t1", p.k1) if variable == "x" else ("t2", p.k2)
    else:
        t_name, k = "t", p.k
    t = getattr(p, t_name)
    scale = discrete_pochhammer(t, r, k) * pochhammer(p.a, r) * pochhammer(getattr(p, b_name), r)
    scale *= var**r / pochhammer(p.c, r)
    shifted = p.shifted(a=r, c=r, **{b_name: r}).replace(**{t_name: t - r * k})
    return lhs, scale * value(shifted, opts)


def _power_formula(variable):
    def evaluate(draw, opts):
        return power_formula_sides(draw.params, variable, draw.extras["r"], opts)

    return evaluate


def _partial_formula(shape):
    def evaluate(draw, opts):
        return partial_power_sides(draw.params, shape, draw.extras["r"], opts)

    return evaluate


# -- summation formulas -----------------------------------------------------------------


def _finite_sum(variable):
    def evaluate(draw, opts):
        p, r = draw.params, draw.extras["r"]
        b_name, var = ("b1", p.x) if variable == "x" else ("b2", p.y)
        if isinstance(p, Appell1Params):
            t_name, k = ("t1", p.k1) if variable == "x" else ("t2", p.k2)
        else:
            t_name, k = "t", p.k
        t = getattr(p, t_name)
        lhs = value(p.shifted(**{b_name: r}), opts)
        rhs = 0j
        for s in range(r + 1):
            coef = binomial(r, s) * pochhammer(p.a, s) * discrete_pochhammer(t, s, k) * var**s / pochhammer(p.c, s)
            shifted = p.shifted(a=s, c=s, **{b_name: s}).replace(**{t_name: t - s * k})
            rhs += coef * value(shifted, opts)
        return lhs, rhs

    return evaluate


def _infinite_sum_draw(form):
    def draw(rng, regime):
        return Draw(_params_for(form)(rng, regime), {"z": _point(rng, 0.3)})

    return draw


def _infinite_sum(which):
    def evaluate(draw, opts):
        p, z = draw.params, draw.extras["z"]
        base = getattr(p, which)

        def coefficient(m, n):
            if n:
                return 0.0
            return pochhammer(base, m) / math.factorial(m) * value(p.shifted(**{which: m}), opts)

        # the outer sum goes through the engine, which decides where to stop
        outer = sum_double_series(CallableCoefficients(coefficient, y_bound=0), z, 0, opts=opts)
        if not outer.ok:
            raise PreconditionError(f"outer sum verdict {outer.verdict.value}", "not_quantitative")
        w = 1 / (1 - z)
        if which == "a":
            moved = p.replace(x=p.x * w, y=p.y * w)
        elif which == "b1":
            moved = p.replace(x=p.x * w)
        else:
            moved = p.replace(y=p.y * w)
        rhs = cmath.exp(-base * cmath.log(1 - z)) * value(moved, opts)
        return outer.value, rhs

    return evaluate


# -- recursion formulas ------------------------------------------------------------------


def _steps(p, variable):
    """(t name, (-1)^k (-t)_k, t - k) for the slot attached to x or y."""
    if isinstance(p, Appell1Params):
        t_name, k = ("t1", p.k1) if variable == "x" else ("t2", p.k2)
    else:
        t_name, k = "t", p.k
    t = getattr(p, t_name)
    return t_name, _step_factor(t, k), t - k


def recursion_sides(p, kind, s, opts=DEFAULT_OPTIONS):
    """Both sides of a shift-by-s recursion; kind is one of RECURSION_KINDS."""
    tx, dx, tx_new = _steps(p, "x")
    ty, dy, ty_new = _steps(p, "y")

    def f(q, moved_slot=None):
        if moved_slot is not None:
            q = q.replace(**moved_slot)
        return value(q, opts)

    base = value(p, opts)
    x_shift, y_shift = {tx: tx_new}, {ty: ty_new}
    if kind == "a_plus":
        lhs = value(p.shifted(a=s), opts)
        sx = sum(f(p.shifted(a=r, b1=1, c=1), x_shift) for r in range(1, s + 1))
        sy = sum(f(p.shifted(a=r, b2=1, c=1), y_shift) for r in range(1, s + 1))
        rhs = base + dx * p.b1 * p.x / p.c * sx + dy * p.b2 * p.y / p.c * sy
    elif kind == "a_minus":
        lhs = value(p.shifted(a=-s), opts)
        sx = sum(f(p.shifted(a=-r, b1=1, c=1), x_shift) for r in range(s))
        sy = sum(f(p.shifted(a=-r, b2=1, c=1), y_shift) for r in range(s))
        rhs = base - dx * p.b1 * p.x / p.c * sx - dy * p.b2 * p.y / p.c * sy
    elif kind == "b1_plus":
        lhs = value(p.shifted(b1=s), opts)
        sx = sum(f(p.shifted(a=1, b1=r, c=1), x_shift) for r in range(1, s + 1))
        rhs = base + dx * p.a * p.x / p.c * sx
    elif kind == "b1_minus":
        lhs = value(p.shifted(b1=-s), opts)
        sx = sum(f(p.shifted(a=1, b1=-r, c=1), x_shift) for r in range(s))
        rhs = base - dx * p.a * p.x / p.c * sx
    elif kind == "b2_plus":
        lhs = value(p.shifted(b2=s), opts)
        sy = sum(f(p.shifted(a=1, b2=r, c=1), y_shift) for r in range(1, s + 1))
        rhs = base + dy * p.a * p.y / p.c * sy
    elif kind == "b2_minus":
        lhs = value(p.shifted(b2=-s), opts)
        sy = sum(f(p.shifted(a=1, b2=-r, c=1), y_shift) for r in range(s))
        rhs = base - dy * p.a * p.y / p.c * sy
    elif kind == "c_minus":
        lhs = value(p.shifted(c=-s), opts)
        sx = sum(
            f(p.shifted(a=1, b1=1, c=2 - r), x_shift) / ((p.c - r) * (p.c - r + 1)) for r in range(1, s + 1)
        )
        sy = sum(
            f(p.shifted(a=1, b2=1, c=2 - r), y_shift) / ((p.c - r) * (p.c - r + 1)) for r in range(1, s + 1)
        )
        rhs = base + dx * p.a * p.b1 * p.x * sx + dy * p.a * p.b2 * p.y * sy
    else:
        raise ValueError(f"unknown recursion {kind!r}")
    return lhs, rhs


RECURSION_KINDS = ("a_plus", "a_minus", "b1_plus", "b1_minus", "b2_plus", "b2_minus", "c_minus")


def _recursion(kind):
    def evaluate(draw, opts):
        return recursion_sides(draw.params, kind, draw.extras["s"], opts)

    return evaluate


# -- relation catalogues -------------------------------------------------------------


def _catalogue(catalogue):
    def evaluate(draw, opts):
        worst = (0j, 0j)
        worst_res = -1.0
        for index in range(1, len(CATALOGUES[catalogue][2]) + 1):
            lhs, rhs = evaluate_relation(enumerate_relation(catalogue, index), draw.params, opts)
            res = rel_residual(lhs, rhs)
            if res > worst_res:
                worst, worst_res = (lhs, rhs), res
        return worst

    return evaluate


# -- degenerations ---------------------------------------------------------------------


def degeneration_ratios(variant, params, opts=DEFAULT_OPTIONS, epsilons=DEGENERATION_EPSILONS):
    errors = [degeneration_error(DegenerationProbe(eps, variant), params, opts) for eps in epsilons]
    if min(errors) == 0:
        raise PreconditionError("degeneration error vanishes identically", "exact_limit")
    return [errors[i] / errors[i + 1] for i in range(len(errors) - 1)]


def _degeneration_draw(form):
    def draw(rng, regime):
        if form == "first":
            # with k >= 2 the factor (-t)_(mk) pushes the series mass to high degree,
            # where eps = 0.1 is not yet in the first-order regime
            unit = 1 if regime == "terminating" else None
            return Draw(first_params(rng, regime, unit, unit))
        return Draw(second_params(rng, regime))

    return draw


def _degeneration(variant):
    def evaluate(draw, opts):
        ratios = degeneration_ratios(variant, draw.params, opts)
        # report the ratio furthest from the first-order value 2
        worst = max(ratios, key=lambda r: abs(r - 2))
        return worst, 2.0

    return evaluate


# -- special cases ------------------------------------------------------------------------


def _direct_equal_sum(p: Appell1Params, k):
    """Explicit double loop over the stated general term (terminating t only)."""
    mx, ny = int(round(p.t1.real)) // k, int(round(p.t2.real)) // k
    total = 0j
    for m in range(mx + 1):
        for n in range(ny + 1):
            term = pochhammer(p.a, m + n) * pochhammer(p.b1, m) * pochhammer(p.b2, n)
            term *= (-1) ** ((m + n) * k) * pochhammer(-p.t1, m * k) * pochhammer(-p.t2, n * k)
            term /= pochhammer(p.c, m + n) * math.factorial(m) * math.factorial(n)
            total += term * p.x**m * p.y**n
    return total


def _equal_steps_draw(rng, regime):
    k = rng.randint(1, 3)
    return Draw(first_params(rng, "terminating", k, k))


def _equal_steps(draw, opts):
    p = draw.params
    lhs = eval_f1_equal_steps(p.a, p.b1, p.b2, p.c, p.t1, p.t2, p.k1, p.x, p.y, opts).value
    return lhs, _direct_equal_sum(p, p.k1)


def _equal_lattice_draw(rng, regime):
    p = first_params(rng, "terminating")
    k = max(p.k1, p.k2)
    t = float(rng.randint(3 * k, 3 * k + 4))
    return Draw(p.replace(t1=t, t2=t))


def _equal_lattice(draw, opts):
    p = draw.params
    lhs = eval_f1_equal_lattice(p.a, p.b1, p.b2, p.c, p.t1, p.k1, p.k2, p.x, p.y, opts).value
    total = 0j
    for m in range(int(p.t1.real) // p.k1 + 1):
        for n in range(int(p.t2.real) // p.k2 + 1):
            term = pochhammer(p.a, m + n) * pochhammer(p.b1, m) * pochhammer(p.b2, n)
            term *= discrete_pochhammer(p.t1, m, p.k1) * discrete_pochhammer(p.t1, n, p.k2)
            term /= pochhammer(p.c, m + n) * math.factorial(m) * math.factorial(n)
            total += term * p.x**m * p.y**n
    return lhs, total


# -- operator cross-implementation ------------------------------------------------------


def operator_cross_sides(p, opts=DEFAULT_OPTIONS):
    """Worst (weighted, numeric) pair over the single atoms acting on p."""
    if isinstance(p, Appell1Params):
        atoms = (BIG_THETA_T1, BIG_THETA_T2, THETA, PHI)
    else:
        atoms = (BIG_THETA_T, THETA, PHI)
    worst, worst_res = (0j, 0j), -1.0
    for atom in atoms:
        expr = product(atom)
        a = weighted(p, expr, opts)
        b = apply_numeric(p, expr, lambda q: value(q, opts))
        if rel_residual(a, b) > worst_res:
            worst, worst_res = (a, b), rel_residual(a, b)
    return worst


def _operator_cross(draw, opts):
    return operator_cross_sides(draw.params, opts)


# -- integrals ------------------------------------------------------------------------------

VERIFY_QUADRATURE = QuadratureOptions(target_tol=1e-8)
T_FORM_QUADRATURE = QuadratureOptions(panels=12, points_per_panel=12, laguerre_points=60, target_tol=1e-7)


def _integral_draw(form, kind):
    def draw(rng, regime):
        p = _params_for(form)(rng, regime)
        if kind == "euler":
            p = p.replace(c=p.a + _cplx(rng, 0.5, 3))
        elif kind == "simplex":
            p = p.replace(c=p.b1 + p.b2 + _cplx(rng, 0.5, 3))
        return Draw(p)

    return draw


def _integral(form, kind):
    def evaluate(draw, opts):
        p = draw.params
        result = eval_integral(IntegralForm(kind, form), p, VERIFY_QUADRATURE)
        return result.value, value(p, opts)

    return evaluate


def _off_axis_point(rng):
    # (-u)^k x sweeps a ray through x for k = 1, 2; keeping arg x away from both
    # real half-axes keeps the integrand's singular point off the path
    angle = rng.uniform(math.pi / 4, 3 * math.pi / 4) * rng.choice((-1, 1))
    return cmath.rect(rng.uniform(0.1, 0.3), angle)


def _laplace_t_draw(form):
    def draw(rng, regime):
        a = _cplx(rng, 0.5, 2, 0.5)
        c = a + _cplx(rng, 0.7, 2, 0.5)
        b1, b2 = _cplx(rng, 0.5, 2, 0.5), _cplx(rng, 0.5, 2, 0.5)
        x, y = _off_axis_point(rng), _off_axis_point(rng)
        t_weight = -rng.uniform(0.6, 2.4)
        if form == "first":
            k1 = rng.randint(1, 2)
            k2 = rng.randint(1, 2)
            t2 = float(rng.randint(3 * k2, 3 * k2 + 4))
            p = Appell1Params(a, b1, b2, c, t_weight, t2, k1, k2, x, y)
        else:
            p = Appell2Params(a, b1, b2, c, t_weight, 1, x, y)
        return Draw(p, {"t_other": -rng.uniform(0.6, 2.4)})

    return draw


def asymptotic_reference(p: Appell2Params, opts=DEFAULT_OPTIONS):
    """Optimally truncated series and its smallest term, which bounds its error."""
    result = eval_f1_d2(p, opts)
    if result.verdict.value != "DivergenceSuspected":
        return result.value, 0.0
    return result.value, result.tail_estimate


def laplace_t_mutual_sides(p, t_other, q=T_FORM_QUADRATURE, opts=DEFAULT_OPTIONS):
    """Worst (lhs, rhs) pair among the checks open to the Gamma(-t)-weighted forms.

    Their series is divergent for k >= 1, so it is never used as a reference.
    First form: T1 at p against T2 at the swapped parameters (separate code
    paths), and T1 against T2 at equal parameters in the k = 0 limit.
    Second form: the k = 0 limit against the series.
    """
    pairs = []
    if isinstance(p, Appell1Params):
        t1 = eval_integral(IntegralForm("laplace_t1"), p, q).value
        t2 = eval_integral(IntegralForm("laplace_t2"), p.swapped(), q).value
        pairs.append((t1, t2))
        flat = p.replace(k1=0, k2=0, t2=t_other)
        pairs.append(
            (
                eval_integral(IntegralForm("laplace_t1"), flat, q).value,
                eval_integral(IntegralForm("laplace_t2"), flat, q).value,
            )
        )
    else:
        flat = p.replace(k=0)
        pairs.append((eval_integral(IntegralForm("laplace_t", "second"), flat, q).value, value(flat, opts)))
    return max(pairs, key=lambda pr: rel_residual(*pr))


def _laplace_t(draw, opts):
    return laplace_t_mutual_sides(draw.params, draw.extras["t_other"], opts=opts)


# -- the family table ---------------------------------------------------------------------

BOTH = ("terminating", "classical")
TERM = ("terminating",)

PARTIAL_SHAPE_NAMES = ("b1_x", "b2_y", "a_x", "a_y", "c_x", "c_y")

CATALOGUE_FAMILY_NAMES = {
    "ContiguousDiff8": ("catalogue_contiguous_differential", BOTH),
    "RecursionDiff28": ("catalogue_recursion_differential", BOTH),
    "ContiguousDelta8": ("catalogue_contiguous_lattice", TERM),
    "RecursionDelta28": ("catalogue_recursion_lattice", TERM),
    "F2Mirror_ContiguousDiff8": ("second_catalogue_contiguous_differential", BOTH),
    "F2Mirror_RecursionDiff28": ("second_catalogue_recursion_differential", BOTH),
    "F2Mirror_ContiguousDelta8": ("second_catalogue_contiguous_joint", TERM),
    "F2Mirror_RecursionDelta22": ("second_catalogue_recursion_joint", TERM),
}


def _build_families():
    fams: List[IdentityFamily] = []

    def add(id, description, category, regimes, draw, evaluate, rate=False):
        fams.append(IdentityFamily(id, description, category, regimes, draw, evaluate, rate))

    add("reduction_classical_f1", "k1 = k2 = 0 gives the classical F1", "algebraic", BOTH,
        _reduction_draw(0, 0), _reduction_classical)
    add("reduction_kdf_x_step", "k1 = 1, k2 = 0 as a Kampe de Feriet series", "algebraic", TERM,
        _reduction_draw(1, 0), _reduction_kdf)
    add("reduction_kdf_y_step", "k1 = 0, k2 = 1 as a Kampe de Feriet series", "algebraic", TERM,
        _reduction_draw(0, 1), _reduction_kdf)
    add("reduction_kdf_both_steps", "k1 = k2 = 1 as a Kampe de Feriet series", "algebraic", TERM,
        _reduction_draw(1, 1), _reduction_kdf)
    add("second_reduction_classical_f1", "second form with k = 0 gives F1", "algebraic", BOTH,
        _second_reduction_draw(0), lambda d, o: (value(d.params, o), _classical_of(d.params, o)))
    add("second_reduction_kdf", "second form with k = 1 as a Kampe de Feriet series", "algebraic", TERM,
        _second_reduction_draw(1), _reduction_kdf)

    add("difference_equation_t1", "Theta_t1 equation", "algebraic", TERM,
        _simple_draw("first"), _diff_eq_first(1))
    add("difference_equation_t2", "Theta_t2 equation", "algebraic", TERM,
        _simple_draw("first"), _diff_eq_first(2))
    add("difference_equation_mixed", "mixed Theta_t1 / Theta_t2 equation", "algebraic", TERM,
        _simple_draw("first"), _diff_eq_mixed)
    add("second_difference_equation_x", "theta / Theta_t equation of the second form", "algebraic", TERM,
        _simple_draw("second"), _second_diff_eq("x"))
    add("second_difference_equation_y", "phi / Theta_t equation of the second form", "algebraic", TERM,
        _simple_draw("second"), _second_diff_eq("y"))
    add("second_differential_equation_mixed", "y theta (b2 + phi) F = x phi (b1 + theta) F", "algebraic", BOTH,
        _simple_draw("second"), _second_mixed)

    add("delta_formula_t1", "r-fold forward difference in t1 (k1 = 1)", "algebraic", TERM,
        _delta_draw(1), _delta_formula(1))
    add("delta_formula_t2", "r-fold forward difference in t2 (k2 = 1)", "algebraic", TERM,
        _delta_draw(2), _delta_formula(2))

    for form, prefix in (("first", ""), ("second", "second_")):
        add(prefix + "theta_power", "x^r d^r/dx^r formula", "algebraic", BOTH,
            _simple_draw(form, r=(1, 2, 3)), _power_formula("x"))
        add(prefix + "phi_power", "y^r d^r/dy^r formula", "algebraic", BOTH,
            _simple_draw(form, r=(1, 2, 3)), _power_formula("y"))
        for shape in PARTIAL_SHAPE_NAMES:
            add(f"{prefix}partial_{shape}", f"r-fold derivative formula, shape {shape}", "algebraic", BOTH,
                _simple_draw(form, r=(1, 2, 3)), _partial_formula(shape))
        add(prefix + "finite_sum_b1", "binomial sum for b1 + r", "algebraic", BOTH,
            _simple_draw(form, r=(1, 2, 3)), _finite_sum("x"))
        add(prefix + "finite_sum_b2", "binomial sum for b2 + r", "algebraic", BOTH,
            _simple_draw(form, r=(1, 2, 3)), _finite_sum("y"))
        for which in ("a", "b1", "b2"):
            add(f"{prefix}infinite_sum_{which}", f"generating sum over {which} + r", "infinite_sum", BOTH,
                _infinite_sum_draw(form), _infinite_sum(which))
        for kind in RECURSION_KINDS:
            add(f"{prefix}recursion_{kind}", f"recursion in {kind.replace('_', ' ')} by s", "algebraic", BOTH,
                _simple_draw(form, s=(1, 2, 3)), _recursion(kind))

    for catalogue, (fid, regimes) in CATALOGUE_FAMILY_NAMES.items():
        form = "first" if CATALOGUES[catalogue][0] == "first" else "second"
        add(fid, f"relation list {catalogue}", "algebraic", regimes, _simple_draw(form), _catalogue(catalogue))

    for form in ("first", "second"):
        for family in ("phi1", "phi2", "phi3"):
            prefix = "" if form == "first" else "second_"
            add(f"{prefix}degeneration_{family}", f"{family} limit, first-order rate", "rate", BOTH,
                _degeneration_draw(form), _degeneration(HumbertVariant(family, form)), rate=True)

    add("special_equal_steps", "k1 = k2 = k against the explicit double sum", "algebraic", TERM,
        _equal_steps_draw, _equal_steps)
    add("special_equal_lattice", "t1 = t2 = t against the explicit double sum", "algebraic", TERM,
        _equal_lattice_draw, _equal_lattice)

    add("operator_cross_first", "weighted series vs shifts and Cauchy derivatives", "operator", TERM,
        _simple_draw("first"), _operator_cross)
    add("operator_cross_second", "weighted series vs shifts and Cauchy derivatives", "operator", TERM,
        _simple_draw("second"), _operator_cross)

    integral_regimes = {"euler": BOTH, "simplex": BOTH, "laplace_a": TERM, "laplace_b1": TERM, "laplace_b2": TERM}
    for form, prefix in (("first", ""), ("second", "second_")):
        for kind, regimes in integral_regimes.items():
            add(f"{prefix}integral_{kind}", f"{kind} integral against the series", "integral", regimes,
                _integral_draw(form, kind), _integral(form, kind))
        add(f"{prefix}integral_laplace_t", "Gamma(-t)-weighted forms, mutual consistency", "integral_t", BOTH,
            _laplace_t_draw(form), _laplace_t)
    return {f.id: f for f in fams}


def _classical_of(p, opts):
    return eval_classical_f1(p.a, p.b1, p.b2, p.c, p.x, p.y, opts).value


FAMILIES: Dict[str, IdentityFamily] = _build_families()

# alternate identifiers accepted wherever a family id is
_BASE_ALIASES = {
    "Reduction3_3": ["reduction_classical_f1"],
    "Reduction3_4": ["reduction_kdf_x_step"],
    "Reduction3_5": ["reduction_kdf_y_step"],
    "Reduction3_6": ["reduction_kdf_both_steps"],
    "Reduction7_1": ["second_reduction_classical_f1", "second_reduction_kdf"],
    "DiffEq1_15": ["difference_equation_t1"],
    "DiffEq1_16": ["difference_equation_t2"],
    "DiffEq3rd": ["difference_equation_mixed"],
    "DiffEq7_6": ["second_difference_equation_x"],
    "DiffEq7_7": ["second_difference_equation_y"],
    "DiffEq7_8": ["second_differential_equation_mixed"],
    "DeltaFormula4_1": ["delta_formula_t1"],
    "DeltaFormula4_2": ["delta_formula_t2"],
    "ThetaPower": ["theta_power"],
    "PhiPower": ["phi_power"],
    "PartialShapes": [f"partial_{s}" for s in PARTIAL_SHAPE_NAMES],
    "FiniteSum5_1": ["finite_sum_b1"],
    "FiniteSum5_2": ["finite_sum_b2"],
    "InfSum56": ["infinite_sum_a"],
    "InfSumB1": ["infinite_sum_b1"],
    "InfSumB2": ["infinite_sum_b2"],
    "Recursion6_aPlus": ["recursion_a_plus"],
    "Recursion6_aMinus": ["recursion_a_minus"],
    "Recursion6_b1Plus": ["recursion_b1_plus"],
    "Recursion6_b1Minus": ["recursion_b1_minus"],
    "Recursion6_cMinus": ["recursion_c_minus"],
    "Recursion6_b2": ["recursion_b2_plus", "recursion_b2_minus"],
    "Degeneration_phi1": ["degeneration_phi1", "second_degeneration_phi1"],
    "Degeneration_phi2": ["degeneration_phi2", "second_degeneration_phi2"],
    "Degeneration_phi3": ["degeneration_phi3", "second_degeneration_phi3"],
    "Sec8SpecialCases": ["special_equal_steps", "special_equal_lattice"],
}
for _i, _shape in enumerate(PARTIAL_SHAPE_NAMES):
    _BASE_ALIASES[f"PartialShapes4_{14 + _i}"] = [f"partial_{_shape}"]
_BASE_ALIASES["PartialShapes4_13"] = ["partial_c_y"]
for _name, (_fid, _) in CATALOGUE_FAMILY_NAMES.items():
    _BASE_ALIASES[_name] = [_fid]


def _build_aliases():
    aliases = dict(_BASE_ALIASES)
    for name, ids in _BASE_ALIASES.items():
        if name.startswith("F2Mirror_"):
            continue
        mirrored = ["second_" + i for i in ids if "second_" + i in FAMILIES]
        if mirrored and f"F2Mirror_{name}" not in aliases:
            aliases[f"F2Mirror_{name}"] = mirrored
    return aliases


ALIASES = _build_aliases()


def resolve_families(names: Sequence[str]) -> List[str]:
    """Family ids for a list of ids or aliases, in order, without duplicates."""
    out: List[str] = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        if name in FAMILIES:
            ids = [name]
        elif name in ALIASES:
            ids = ALIASES[name]
        else:
            raise KeyError(name)
        for i in ids:
            if i not in out:
                out.append(i)
    return out


def default_families(regime):
    return [fid for fid, f in FAMILIES.items() if regime in f.regimes]


# -- running checks ------------------------------------------------------------------------


def family_tolerance(family: IdentityFamily, tolerances=None):
    table = dict(DEFAULT_TOLERANCES)
    if tolerances:
        table.update(tolerances)
    if family.id in table:
        return table[family.id]
    return table.get(family.category, table["algebraic"])


_SKIP_ERRORS = (PreconditionError, PoleError, DomainError, QuadratureError)


def _skip_reason(err):
    return getattr(err, "reason", None) or type(err).__name__


def check_identity(family: IdentityFamily, draw: Draw, opts=DEFAULT_OPTIONS, tolerance=None) -> Residual:
    if tolerance is None:
        tolerance = family_tolerance(family)
    try:
        lhs, rhs = family.evaluate(draw, opts)
    except _SKIP_ERRORS as err:
        return Residual(family.id, draw, 0j, 0j, 0.0, Status.SKIPPED, _skip_reason(err))
    lhs, rhs = complex(lhs), complex(rhs)
    res = rel_residual(lhs, rhs)
    if family.rate:
        ok = RATE_BAND[0] <= lhs.real <= RATE_BAND[1]
    else:
        ok = res <= tolerance
    if not math.isfinite(res):
        ok = False
    return Residual(family.id, draw, lhs, rhs, res, Status.PASS if ok else Status.FAIL)


def draw_rng(seed, family_id, index):
    # string seeds hash through sha512, so this is stable across processes
    return random.Random(f"{seed}:{family_id}:{index}")


@dataclass(frozen=True)
class DrawPolicy:
    regime: str = "terminating"
    count: int = 50
    seed: int = 42

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if self.count < 0:
            raise ValueError("count must be nonnegative")

    def draws(self, family: IdentityFamily):
        for i in range(self.count):
            yield family.draw(draw_rng(self.seed, family.id, i), self.regime)


def family_residuals(family_id, policy: DrawPolicy, opts=DEFAULT_OPTIONS, tolerances=None):
    family = FAMILIES[family_id]
    tol = family_tolerance(family, tolerances)
    if policy.regime not in family.regimes:
        reason = f"regime {policy.regime} not supported"
        return [Residual(family.id, Draw(None), 0j, 0j, 0.0, Status.SKIPPED, reason) for _ in range(policy.count)]
    return [check_identity(family, d, opts, tol) for d in policy.draws(family)]


@dataclass
class FamilySummary:
    id: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    worst_residual: float = 0.0

    @property
    def ok(self):
        # a family that never produced an accepted draw cannot be said to pass
        return self.failed == 0 and (self.passed > 0 or self.skipped == 0)

    def to_dict(self):
        return {
            "id": self.id,
            "pass": self.passed,
            "fail": self.failed,
            "skip": self.skipped,
            "worst_residual": self.worst_residual,
        }

    @staticmethod
    def from_dict(d):
        return FamilySummary(d["id"], d["pass"], d["fail"], d["skip"], d["worst_residual"])


@dataclass
class Report:
    suite: str
    seed: int
    families: List[FamilySummary]
    wall_ms: float = 0.0

    @property
    def ok(self):
        return all(f.ok for f in self.families)

    def to_dict(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "families": [f.to_dict() for f in self.families],
            "wall_ms": self.wall_ms,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def from_dict(d):
        return Report(d["suite"], d["seed"], [FamilySummary.from_dict(f) for f in d["families"]], d["wall_ms"])

    @staticmethod
    def from_json(text):
        return Report.from_dict(json.loads(text))

    def same_results(self, other):
        """Equality up to wall time."""
        return (self.suite, self.seed, self.families) == (other.suite, other.seed, other.families)


def summarize(family_id, residuals) -> FamilySummary:
    summary = FamilySummary(family_id)
    for r in residuals:
        if r.status == Status.PASS:
            summary.passed += 1
        elif r.status == Status.FAIL:
            summary.failed += 1
        else:
            summary.skipped += 1
        if r.status != Status.SKIPPED:
            summary.worst_residual = max(summary.worst_residual, r.rel_residual)
    return summary


def run_suite(policy: DrawPolicy, families: Optional[Sequence[str]] = None, opts=DEFAULT_OPTIONS,
              tolerances=None, progress=None) -> Report:
    """Run every family over the policy's draws.  ``families=None`` means all for the regime."""
    start = time.perf_counter()
    ids = default_families(policy.regime) if families is None else resolve_families(families)
    summaries = []
    for fid in ids:
        summaries.append(summarize(fid, family_residuals(fid, policy, opts, tolerances)))
        if progress is not None:
            progress(summaries[-1])
    wall = (time.perf_counter() - start) * 1000
    return Report(f"{policy.regime}-{policy.count}", policy.seed, summaries, round(wall, 1))
