"""Difference and differential operators acting on the discrete Appell forms.

Every operator here is diagonal on the monomials x^m y^n once the lattice
factors are taken along: theta -> m, phi -> n, Theta_t1 -> m k1,
Theta_t2 -> n k2 and the joint Theta_t -> (m + n) k.  Products of affine
forms in these atoms therefore compile to a :class:`TermWeight`.

The same operators are also applied numerically (shifts in t, Cauchy
derivatives in x and y) so the two implementations can audit each other.
"""
import cmath
import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import OperatorMismatch, PreconditionError
from .functions import (
    Appell1Params,
    Appell2Params,
    appell1_coefficients,
    appell2_coefficients,
    eval_f1_d1,
    eval_f1_d2,
)
from .series import DEFAULT_OPTIONS, TermWeight, sum_double_series
from .special import binomial, discrete_pochhammer, pochhammer

PARAM_NAMES = ("a", "b1", "b2", "c")


class Atom(str, enum.Enum):
    IDENTITY = "1"
    THETA_X = "theta"
    PHI_Y = "phi"
    BIG_THETA_T1 = "Theta_t1"
    BIG_THETA_T2 = "Theta_t2"
    BIG_THETA_T = "Theta_t"


# which lattice step divides a "per-step" atom such as Theta_t1 / k1
_STEP_OF = {Atom.BIG_THETA_T1: "k1", Atom.BIG_THETA_T2: "k2", Atom.BIG_THETA_T: "k"}
_SLOT_OF = {Atom.BIG_THETA_T1: "t1", Atom.BIG_THETA_T2: "t2", Atom.BIG_THETA_T: "t"}


@dataclass(frozen=True)
class Affine:
    """Linear form  sum coefficient * symbol.

    Symbols are the constant "1", the parameter names a, b1, b2, c
    (resolved against the base parameters when compiled) and operator
    atoms.  An atom may be marked per-step, meaning Theta_t1 / k1 and so on.
    """

    terms: Tuple[Tuple[str, bool, complex], ...] = ()

    @staticmethod
    def of(*items):
        """Build from (symbol, coefficient) or (symbol, per_step, coefficient) items."""
        acc = {}
        for item in items:
            if len(item) == 2:
                symbol, coef = item
                per_step = False
            else:
                symbol, per_step, coef = item
            symbol = symbol.value if isinstance(symbol, Atom) else str(symbol)
            key = (symbol, bool(per_step))
            acc[key] = acc.get(key, 0) + complex(coef)
        terms = tuple(sorted((s, p, c) for (s, p), c in acc.items() if c != 0))
        return Affine(terms)

    @staticmethod
    def constant(value):
        return Affine.of(("1", value))

    def __add__(self, other):
        other = _as_affine(other)
        return Affine.of(*[(s, p, c) for s, p, c in self.terms + other.terms])

    __radd__ = __add__

    def __neg__(self):
        return Affine(tuple((s, p, -c) for s, p, c in self.terms))

    def __sub__(self, other):
        return self + (-_as_affine(other))

    def __rsub__(self, other):
        return _as_affine(other) + (-self)

    def scaled(self, factor):
        return Affine.of(*[(s, p, c * factor) for s, p, c in self.terms])

    def atoms(self):
        return {s for s, _, _ in self.terms if s not in PARAM_NAMES and s != "1"}

    def __str__(self):
        parts = []
        for s, p, c in self.terms:
            name = s if s != "1" else ""
            if p:
                name = f"{s}/k"
            coef = c.real if c.imag == 0 else c
            if name and coef == 1:
                parts.append(name)
            elif name:
                parts.append(f"{coef:g}*{name}" if isinstance(coef, float) else f"{coef}*{name}")
            else:
                parts.append(f"{coef:g}" if isinstance(coef, float) else str(coef))
        return "(" + " + ".join(parts or ["0"]) + ")"


def _as_affine(value):
    if isinstance(value, Affine):
        return value
    if isinstance(value, (int, float, complex)):
        return Affine.constant(value)
    raise TypeError(f"cannot use {value!r} in an affine form")


@dataclass(frozen=True)
class OperatorExpr:
    """Product of affine factors; the empty product is the identity."""

    factors: Tuple[Affine, ...] = ()

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            return OperatorExpr(self.factors + other.factors)
        return OperatorExpr(self.factors + (_as_affine(other),))

    def __rmul__(self, other):
        return OperatorExpr((_as_affine(other),) + self.factors)

    def atoms(self):
        out = set()
        for f in self.factors:
            out |= f.atoms()
        return out

    def __str__(self):
        return "".join(str(f) for f in self.factors) or "1"


IDENTITY = OperatorExpr()
THETA = Affine.of((Atom.THETA_X, 1))
PHI = Affine.of((Atom.PHI_Y, 1))
BIG_THETA_T1 = Affine.of((Atom.BIG_THETA_T1, 1))
BIG_THETA_T2 = Affine.of((Atom.BIG_THETA_T2, 1))
BIG_THETA_T = Affine.of((Atom.BIG_THETA_T, 1))
THETA_T1_PER_STEP = Affine.of((Atom.BIG_THETA_T1, True, 1))
THETA_T2_PER_STEP = Affine.of((Atom.BIG_THETA_T2, True, 1))
THETA_T_PER_STEP = Affine.of((Atom.BIG_THETA_T, True, 1))


def param(name):
    """Affine form holding one of the symbolic parameters a, b1, b2, c."""
    if name not in PARAM_NAMES:
        raise ValueError(f"unknown parameter symbol {name!r}")
    return Affine.of((name, 1))


def product(*factors):
    return OperatorExpr(tuple(_as_affine(f) for f in factors))


_ALLOWED = {
    Appell1Params: {"theta", "phi", "Theta_t1", "Theta_t2"},
    Appell2Params: {"theta", "phi", "Theta_t"},
}


def _check_target(expr, params):
    allowed = _ALLOWED.get(type(params))
    if allowed is None:
        raise OperatorMismatch(f"operators do not act on {type(params).__name__}")
    bad = expr.atoms() - allowed
    if bad:
        raise OperatorMismatch(f"atoms {sorted(bad)} do not act on {type(params).__name__}")


def _step(params, atom):
    return getattr(params, _STEP_OF[atom])


def _atom_image(atom, per_step, params):
    """(beta, gamma) with atom acting as beta*m + gamma*n."""
    if atom == Atom.THETA_X:
        return 1, 0
    if atom == Atom.PHI_Y:
        return 0, 1
    k = _step(params, atom)
    if per_step:
        if k == 0:
            raise PreconditionError(
                f"{atom.value}/{_STEP_OF[atom]} is undefined for {_STEP_OF[atom]} = 0", "zero_step"
            )
        k = 1
    if atom == Atom.BIG_THETA_T1:
        return k, 0
    if atom == Atom.BIG_THETA_T2:
        return 0, k
    return k, k


def resolve_constant(symbol, params):
    if symbol == "1":
        return 1.0
    return getattr(params, symbol)


def compile_weight(expr: OperatorExpr, params) -> TermWeight:
    """Term weight of an operator product acting on the family of ``params``.

    Parameter symbols inside the factors take their values from ``params``.
    """
    _check_target(expr, params)
    weight = TermWeight()
    for f in expr.factors:
        alpha = beta = gamma = 0j
        for symbol, per_step, coef in f.terms:
            if symbol == "1" or symbol in PARAM_NAMES:
                alpha += coef * resolve_constant(symbol, params)
                continue
            b, g = _atom_image(Atom(symbol), per_step, params)
            beta += coef * b
            gamma += coef * g
        weight = weight * TermWeight.affine(alpha, beta, gamma)
    return weight


def coefficients_for(params, use_a=True, use_b2=True):
    if isinstance(params, Appell1Params):
        return appell1_coefficients(params, use_a, use_b2)
    if isinstance(params, Appell2Params):
        return appell2_coefficients(params, use_a, use_b2)
    raise TypeError(f"no coefficient oracle for {type(params).__name__}")


def plain_evaluator(params, opts=DEFAULT_OPTIONS):
    if isinstance(params, Appell1Params):
        return eval_f1_d1(params, opts)
    return eval_f1_d2(params, opts)


def apply_weighted(params, expr: OperatorExpr, opts=DEFAULT_OPTIONS, constants=None):
    """Series value of ``expr`` applied to the function at ``params``.

    ``constants`` supplies the values of the symbols a, b1, b2, c when
    they should differ from ``params`` (relations evaluated at shifted
    parameters keep the symbols of the unshifted ones).
    """
    if not expr.factors:
        return plain_evaluator(params, opts)
    weight = compile_weight(expr, constants if constants is not None else params)
    if constants is not None:
        _check_target(expr, params)
    coeff = coefficients_for(params)
    plain_evaluator(params, opts)  # region and pole checks
    return sum_double_series(coeff, params.x, params.y, weight, opts)


# -- numeric realizations ------------------------------------------------------


def cauchy_derivative(fn, z, radius=None, points=32):
    """d fn / dz at z from the trapezoidal rule on a circle."""
    z = complex(z)
    if radius is None:
        radius = 0.1 * max(abs(z), 0.5)
    nodes = np.exp(2j * np.pi * np.arange(points) / points)
    values = np.array([fn(z + radius * w) for w in nodes])
    return complex(np.mean(values / nodes) / radius)


def central_difference(fn, z, order=1, step=1e-5):
    """Central finite difference of order 1 or 2 along the real direction."""
    if order == 1:
        return (fn(z + step) - fn(z - step)) / (2 * step)
    if order == 2:
        return (fn(z + step) - 2 * fn(z) + fn(z - step)) / (step * step)
    raise ValueError("central_difference supports order 1 and 2")


def theta_t_numeric(params, slot, evaluator=None):
    """Theta_t f = t (f(t) - f(t - 1)) from two evaluations."""
    if evaluator is None:
        evaluator = lambda p: plain_evaluator(p).value  # noqa: E731
    t = getattr(params, slot)
    shifted = params.replace(**{slot: t - 1})
    return t * (evaluator(params) - evaluator(shifted))


def delta_power(params, slot, r, evaluator=None):
    """r-fold forward difference in the lattice variable of ``slot``.

    Only defined for unit steps, where the closed formula is known.
    """
    step_name = {"t1": "k1", "t2": "k2"}.get(slot)
    if step_name is None:
        raise PreconditionError(f"delta_power acts on t1 or t2, not {slot!r}", "slot")
    if getattr(params, step_name) != 1:
        raise PreconditionError(f"delta_power needs {step_name} = 1", "unit_step")
    if r < 1:
        raise PreconditionError("delta_power needs r >= 1", "order")
    if evaluator is None:
        evaluator = lambda p: plain_evaluator(p).value  # noqa: E731
    t = getattr(params, slot)
    total = 0j
    for j in range(r + 1):
        sign = -1 if (r - j) % 2 else 1
        total += sign * binomial(r, j) * evaluator(params.replace(**{slot: t + j}))
    return total


def apply_numeric(params, expr: OperatorExpr, evaluator=None, constants=None):
    """Apply ``expr`` by t-shifts and Cauchy derivatives instead of weights."""
    _check_target(expr, params)
    if evaluator is None:
        evaluator = lambda p: plain_evaluator(p).value  # noqa: E731
    base = constants if constants is not None else params
    factors = expr.factors
    memo = {}

    def inner(i, p):
        key = (i, p)
        if key in memo:
            return memo[key]
        if i == len(factors):
            out = evaluator(p)
        else:
            out = 0j
            g = lambda q: inner(i + 1, q)  # noqa: E731
            for symbol, per_step, coef in factors[i].terms:
                if symbol == "1" or symbol in PARAM_NAMES:
                    out += coef * resolve_constant(symbol, base) * g(p)
                    continue
                out += coef * _atom_numeric(Atom(symbol), per_step, g, p)
        memo[key] = out
        return out

    return inner(0, params)


def _atom_numeric(atom, per_step, g, p):
    if atom == Atom.THETA_X:
        return p.x * cauchy_derivative(lambda z: g(p.replace(x=z)), p.x)
    if atom == Atom.PHI_Y:
        return p.y * cauchy_derivative(lambda z: g(p.replace(y=z)), p.y)
    slot = _SLOT_OF[atom]
    value = theta_t_numeric(p, slot, g)
    if per_step:
        k = _step(p, atom)
        if k == 0:
            raise PreconditionError(f"{atom.value}/k undefined for k = 0", "zero_step")
        value /= k
    return value


# -- termwise r-fold derivatives -------------------------------------------------

PARTIAL_SHAPES = ("b1_x", "b2_y", "a_x", "a_y", "c_x", "c_y")


def _shape_data(params, shape, r):
    """Weight, evaluation point, prefactor exponent and the right-hand side pieces."""
    x, y = params.x, params.y
    if shape == "b1_x":
        weight = _rising_weight(params.b1, r, 1, 0)
        point = (x, y)
        var, power = x, params.b1 - 1
        rhs_params = params.shifted(b1=r)
        rhs_scale = pochhammer(params.b1, r)
    elif shape == "b2_y":
        weight = _rising_weight(params.b2, r, 0, 1)
        point = (x, y)
        var, power = y, params.b2 - 1
        rhs_params = params.shifted(b2=r)
        rhs_scale = pochhammer(params.b2, r)
    elif shape == "a_x":
        weight = _rising_weight(params.a, r, 1, 1)
        point = (x, x * y)
        var, power = x, params.a - 1
        rhs_params = params.shifted(a=r)
        rhs_scale = pochhammer(params.a, r)
    elif shape == "a_y":
        weight = _rising_weight(params.a, r, 1, 1)
        point = (x * y, y)
        var, power = y, params.a - 1
        rhs_params = params.shifted(a=r)
        rhs_scale = pochhammer(params.a, r)
    elif shape == "c_x":
        weight = _rising_weight(params.c - r, r, 1, 1)
        point = (x, x * y)
        var, power = x, params.c - r - 1
        rhs_params = params.shifted(c=-r)
        rhs_scale = (-1) ** r * pochhammer(1 - params.c, r)
    elif shape == "c_y":
        weight = _rising_weight(params.c - r, r, 1, 1)
        point = (x * y, y)
        var, power = y, params.c - r - 1
        rhs_params = params.shifted(c=-r)
        rhs_scale = (-1) ** r * pochhammer(1 - params.c, r)
    else:
        raise ValueError(f"unknown derivative shape {shape!r}")
    return weight, point, var, power, rhs_params, rhs_scale


def _rising_weight(start, r, beta, gamma):
    w = TermWeight()
    for j in range(r):
        w = w * TermWeight.affine(start + j, beta, gamma)
    return w


def partial_power_sides(params, shape, r, opts=DEFAULT_OPTIONS):
    """(lhs, rhs) of an r-fold derivative formula.

    The left side differentiates the monomials exactly:
    d^r/dz^r z^(s + r - 1) = (s)_r z^(s - 1), applied term by term.
    """
    if r < 0:
        raise PreconditionError("derivative order must be nonnegative", "order")
    weight, (px, py), var, power, rhs_params, rhs_scale = _shape_data(params, shape, r)
    if var == 0:
        raise PreconditionError("derivative formulas need a nonzero variable", "zero_variable")
    at_point = params.replace(x=px, y=py)
    plain_evaluator(at_point, opts)
    lhs_series = sum_double_series(coefficients_for(at_point), px, py, weight, opts).value
    prefactor = cmath.exp(power * cmath.log(var))
    lhs = prefactor * lhs_series
    rhs = prefactor * rhs_scale * plain_evaluator(rhs_params.replace(x=px, y=py), opts).value
    return lhs, rhs


def partial_power(params, shape, r, opts=DEFAULT_OPTIONS):
    """Residual |lhs - rhs| / (|rhs| + 1) of an r-fold derivative formula."""
    lhs, rhs = partial_power_sides(params, shape, r, opts)
    return abs(lhs - rhs) / (abs(rhs) + 1)


def partial_power_finite_difference(params, shape, r, step=1e-5):
    """Left side of a derivative formula by central differences (r = 1 or 2)."""
    _, _, var, _, _, _ = _shape_data(params, shape, r)
    along_x = shape.endswith("_x")
    if shape in ("b1_x", "b2_y"):
        exponent_base = params.b1 if shape == "b1_x" else params.b2
        exponent = exponent_base + r - 1
    elif shape.startswith("a"):
        exponent = params.a + r - 1
    else:
        exponent = params.c - 1

    def fn(z):
        if shape in ("b1_x", "b2_y"):
            p = params.replace(x=z) if along_x else params.replace(y=z)
        elif along_x:
            p = params.replace(x=z, y=z * params.y)
        else:
            p = params.replace(x=z * params.x, y=z)
        return cmath.exp(exponent * cmath.log(z)) * plain_evaluator(p).value

    return central_difference(fn, var, r, step)


def falling_theta_weight(r, variable="x"):
    """theta (theta - 1) ... (theta - r + 1), i.e. x^r d^r/dx^r."""
    base = THETA if variable == "x" else PHI
    return OperatorExpr(tuple(base - j for j in range(r)))


def power_weight(r, variable="x"):
    base = THETA if variable == "x" else PHI
    return OperatorExpr(tuple(base for _ in range(r)))


def theta_t_action(t, n, k):
    """Theta_t applied to (-1)^(n k) (-t)_(n k), evaluated numerically."""
    return t * (discrete_pochhammer(t, n, k) - discrete_pochhammer(t - 1, n, k))


__all__ = [
    "Atom",
    "Affine",
    "OperatorExpr",
    "IDENTITY",
    "THETA",
    "PHI",
    "BIG_THETA_T1",
    "BIG_THETA_T2",
    "BIG_THETA_T",
    "THETA_T1_PER_STEP",
    "THETA_T2_PER_STEP",
    "THETA_T_PER_STEP",
    "param",
    "product",
    "compile_weight",
    "apply_weighted",
    "apply_numeric",
    "theta_t_numeric",
    "delta_power",
    "partial_power",
    "partial_power_sides",
    "partial_power_finite_difference",
    "cauchy_derivative",
    "central_difference",
    "falling_theta_weight",
    "power_weight",
    "theta_t_action",
    "PARTIAL_SHAPES",
]
