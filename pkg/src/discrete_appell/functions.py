"""Named series families built on the diagonal summation engine.

The two discrete Appell forms share one coefficient builder.  In the
first form each variable carries its own lattice factor
(-1)^(m k1) (-t1)_(m k1) and (-1)^(n k2) (-t2)_(n k2); in the second form
a single factor (-1)^((m+n) k) (-t)_((m+n) k) rides on the joint index.
The Humbert variants reuse the same builder with factors switched off.
"""
import dataclasses
import functools
import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError, PoleError
from .series import (
    DEFAULT_OPTIONS,
    EvalResult,
    JOINT_TRIVIAL,
    TRIVIAL,
    SeparableCoefficients,
    Sequence1D,
    Structure,
    Verdict,
    analyse,
    sum_double_series,
)
from .special import INTEGER_SNAP, is_nonpositive_integer

# smallest degeneration parameter accepted; (1/eps)_n eps^n loses digits below it
MIN_EPSILON = 1e-8
MAX_EPSILON = 0.1


def _c(z):
    return complex(z)


@dataclass(frozen=True)
class Appell1Params:
    """Arguments of the first discrete form (separate lattice variables)."""

    a: complex
    b1: complex
    b2: complex
    c: complex
    t1: complex = 0j
    t2: complex = 0j
    k1: int = 0
    k2: int = 0
    x: complex = 0j
    y: complex = 0j

    def __post_init__(self):
        for name in ("a", "b1", "b2", "c", "t1", "t2", "x", "y"):
            object.__setattr__(self, name, _c(getattr(self, name)))
        for name in ("k1", "k2"):
            k = int(getattr(self, name))
            if k < 0:
                raise ValueError(f"{name} must be nonnegative")
            object.__setattr__(self, name, k)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def shifted(self, **deltas):
        """Copy with parameters moved by the given amounts, e.g. shifted(a=1)."""
        return dataclasses.replace(self, **{k: getattr(self, k) + v for k, v in deltas.items()})

    def swapped(self):
        """Exchange the roles of the two variables."""
        return Appell1Params(
            self.a, self.b2, self.b1, self.c, self.t2, self.t1, self.k2, self.k1, self.y, self.x
        )


@dataclass(frozen=True)
class Appell2Params:
    """Arguments of the second discrete form (one joint lattice variable)."""

    a: complex
    b1: complex
    b2: complex
    c: complex
    t: complex = 0j
    k: int = 0
    x: complex = 0j
    y: complex = 0j

    def __post_init__(self):
        for name in ("a", "b1", "b2", "c", "t", "x", "y"):
            object.__setattr__(self, name, _c(getattr(self, name)))
        k = int(self.k)
        if k < 0:
            raise ValueError("k must be nonnegative")
        object.__setattr__(self, "k", k)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def shifted(self, **deltas):
        return dataclasses.replace(self, **{k: getattr(self, k) + v for k, v in deltas.items()})

    def swapped(self):
        return Appell2Params(self.a, self.b2, self.b1, self.c, self.t, self.k, self.y, self.x)


def _tuple(values):
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class KdFSpec:
    """Parameter groups of a Kampe de Feriet double series.

    upper_joint / lower_joint are indexed by m + n, upper_x / lower_x by m
    and upper_y / lower_y by n.
    """

    upper_joint: Tuple[complex, ...] = ()
    upper_x: Tuple[complex, ...] = ()
    upper_y: Tuple[complex, ...] = ()
    lower_joint: Tuple[complex, ...] = ()
    lower_x: Tuple[complex, ...] = ()
    lower_y: Tuple[complex, ...] = ()

    def __post_init__(self):
        for f in dataclasses.fields(self):
            object.__setattr__(self, f.name, _tuple(getattr(self, f.name)))
        for l in self.lower_joint + self.lower_x + self.lower_y:
            if is_nonpositive_integer(l, INTEGER_SNAP):
                raise PoleError(f"lower parameter {l} is a nonpositive integer")


@dataclass(frozen=True)
class HumbertVariant:
    family: str  # "phi1", "phi2" or "phi3"
    form: str = "first"  # "first" or "second"

    def __post_init__(self):
        if self.family not in ("phi1", "phi2", "phi3"):
            raise ValueError(f"unknown Humbert family {self.family!r}")
        if self.form not in ("first", "second"):
            raise ValueError(f"unknown form {self.form!r}")


@dataclass(frozen=True)
class DegenerationProbe:
    epsilon: float
    variant: HumbertVariant

    def __post_init__(self):
        if not (0 < self.epsilon <= MAX_EPSILON):
            raise ValueError("epsilon must lie in (0, 0.1]")


# -- coefficient builders ------------------------------------------------------


def appell1_coefficients(p: Appell1Params, use_a=True, use_b2=True):
    joint = Sequence1D(upper=(p.a,) if use_a else (), lower=(p.c,), factorial=False)
    x_part = Sequence1D(upper=(p.b1,), discrete=((p.t1, p.k1),))
    y_part = Sequence1D(upper=(p.b2,) if use_b2 else (), discrete=((p.t2, p.k2),))
    return SeparableCoefficients(joint, x_part, y_part)


def appell2_coefficients(p: Appell2Params, use_a=True, use_b2=True):
    joint = Sequence1D(
        upper=(p.a,) if use_a else (), lower=(p.c,), discrete=((p.t, p.k),), factorial=False
    )
    x_part = Sequence1D(upper=(p.b1,))
    y_part = Sequence1D(upper=(p.b2,) if use_b2 else ())
    return SeparableCoefficients(joint, x_part, y_part)


def kdf_coefficients(spec: KdFSpec):
    joint = Sequence1D(upper=spec.upper_joint, lower=spec.lower_joint, factorial=False)
    x_part = Sequence1D(upper=spec.upper_x, lower=spec.lower_x)
    y_part = Sequence1D(upper=spec.upper_y, lower=spec.lower_y)
    return SeparableCoefficients(joint, x_part, y_part)


def _check_region(coeff, x, y):
    # a variable of modulus >= 1 is only allowed on an axis that terminates
    _, _, sx, sy = analyse(coeff, x, y)
    if sx != Structure.EXHAUSTED and abs(x) >= 1:
        raise DomainError(f"|x| = {abs(x):g} >= 1 on a non-terminating axis")
    if sy != Structure.EXHAUSTED and abs(y) >= 1:
        raise DomainError(f"|y| = {abs(y):g} >= 1 on a non-terminating axis")


def _check_c(c):
    if is_nonpositive_integer(c, INTEGER_SNAP):
        raise PoleError(f"c = {c} is a nonpositive integer")


# -- discrete Appell forms -------------------------------------------------------


@functools.lru_cache(maxsize=8192)
def _eval_f1_d1(p, opts, use_a, use_b2):
    _check_c(p.c)
    coeff = appell1_coefficients(p, use_a, use_b2)
    _check_region(coeff, p.x, p.y)
    return sum_double_series(coeff, p.x, p.y, opts=opts)


@functools.lru_cache(maxsize=8192)
def _eval_f1_d2(p, opts, use_a, use_b2):
    _check_c(p.c)
    coeff = appell2_coefficients(p, use_a, use_b2)
    _check_region(coeff, p.x, p.y)
    return sum_double_series(coeff, p.x, p.y, opts=opts)


def eval_f1_d1(p: Appell1Params, opts=DEFAULT_OPTIONS) -> EvalResult:
    """First discrete Appell form."""
    return _eval_f1_d1(p, opts, True, True)


def eval_f1_d2(p: Appell2Params, opts=DEFAULT_OPTIONS) -> EvalResult:
    """Second discrete Appell form."""
    return _eval_f1_d2(p, opts, True, True)


def eval_f1_equal_steps(a, b1, b2, c, t1, t2, k, x, y, opts=DEFAULT_OPTIONS):
    """First form with k1 = k2 = k."""
    return eval_f1_d1(Appell1Params(a, b1, b2, c, t1, t2, k, k, x, y), opts)


def eval_f1_equal_lattice(a, b1, b2, c, t, k1, k2, x, y, opts=DEFAULT_OPTIONS):
    """First form with t1 = t2 = t."""
    return eval_f1_d1(Appell1Params(a, b1, b2, c, t, t, k1, k2, x, y), opts)


_HUMBERT_FLAGS = {"phi1": (True, False), "phi2": (False, True), "phi3": (False, False)}


def eval_humbert(variant: HumbertVariant, params, opts=DEFAULT_OPTIONS) -> EvalResult:
    """Discrete Humbert function; phi1 drops b2, phi2 drops a, phi3 drops both."""
    use_a, use_b2 = _HUMBERT_FLAGS[variant.family]
    if variant.form == "first":
        if not isinstance(params, Appell1Params):
            raise TypeError("first-form Humbert functions take Appell1Params")
        return _eval_f1_d1(params, opts, use_a, use_b2)
    if not isinstance(params, Appell2Params):
        raise TypeError("second-form Humbert functions take Appell2Params")
    return _eval_f1_d2(params, opts, use_a, use_b2)


def degeneration_substitution(variant: HumbertVariant, params, epsilon):
    """Parameters of the parent Appell function that tend to the variant as epsilon -> 0."""
    inv = 1.0 / epsilon
    if variant.family == "phi1":
        return params.replace(b2=inv, y=epsilon * params.y)
    if variant.family == "phi2":
        return params.replace(a=inv, x=epsilon * params.x, y=epsilon * params.y)
    return params.replace(a=inv, b2=inv, x=epsilon * params.x, y=epsilon * epsilon * params.y)


def degeneration_error(probe: DegenerationProbe, params, opts=DEFAULT_OPTIONS) -> float:
    """|parent function at the substituted point - Humbert variant|."""
    if probe.epsilon < MIN_EPSILON:
        raise ValueError(f"epsilon below {MIN_EPSILON:g} loses all digits")
    evaluator = eval_f1_d1 if probe.variant.form == "first" else eval_f1_d2
    parent = evaluator(degeneration_substitution(probe.variant, params, probe.epsilon), opts)
    limit = eval_humbert(probe.variant, params, opts)
    return abs(parent.value - limit.value)


# -- single-variable and Kampe de Feriet series ------------------------------------


def eval_discrete_pfq(upper, lower, t, k, z, opts=DEFAULT_OPTIONS) -> EvalResult:
    """Discrete generalized hypergeometric series in one variable."""
    seq = Sequence1D(upper=_tuple(upper), lower=_tuple(lower), discrete=((complex(t), int(k)),))
    coeff = SeparableCoefficients(JOINT_TRIVIAL, seq, TRIVIAL)
    _check_region(coeff, complex(z), 0j)
    return sum_double_series(coeff, z, 0, opts=opts)


def kdf_region(spec: KdFSpec, x, y):
    """Classify (x, y) against the two convergence cases of the double series.

    Returns "entire", "inside", "boundary", "outside" or "unclassified".
    """
    k1, l1, l1p = len(spec.upper_joint), len(spec.upper_x), len(spec.upper_y)
    k2, l2, l2p = len(spec.lower_joint), len(spec.lower_x), len(spec.lower_y)
    # the factorials m! and n! count as one lower parameter in each direction
    if k1 + l1 < k2 + l2 + 1 and k1 + l1p < k2 + l2p + 1:
        return "entire"
    if k1 + l1 == k2 + l2 + 1 and k1 + l1p == k2 + l2p + 1:
        ax, ay = abs(complex(x)), abs(complex(y))
        if k1 > k2:
            power = 1.0 / (k1 - k2)
            level = ax ** power + ay ** power
        else:
            level = max(ax, ay)
        if level < 1:
            return "inside"
        return "boundary" if level == 1 else "outside"
    return "unclassified"


def eval_kdf(spec: KdFSpec, x, y, opts=DEFAULT_OPTIONS) -> EvalResult:
    """Kampe de Feriet series; the region classification is kept in ``region``."""
    region = kdf_region(spec, x, y)
    result = sum_double_series(kdf_coefficients(spec), x, y, opts=opts)
    return dataclasses.replace(result, region=region)


def kdf_reduction(p):
    """Kampe de Feriet form (spec, x, y) of a discrete Appell function with unit steps.

    Valid when every step parameter is 0 or 1.
    """
    if isinstance(p, Appell1Params):
        if p.k1 not in (0, 1) or p.k2 not in (0, 1):
            raise ValueError("reduction needs k1, k2 in {0, 1}")
        upper_x = (p.b1, -p.t1) if p.k1 else (p.b1,)
        upper_y = (p.b2, -p.t2) if p.k2 else (p.b2,)
        x = -p.x if p.k1 else p.x
        y = -p.y if p.k2 else p.y
        return KdFSpec((p.a,), upper_x, upper_y, (p.c,)), x, y
    if p.k not in (0, 1):
        raise ValueError("reduction needs k in {0, 1}")
    if p.k == 0:
        return KdFSpec((p.a,), (p.b1,), (p.b2,), (p.c,)), p.x, p.y
    return KdFSpec((p.a, -p.t), (p.b1,), (p.b2,), (p.c,)), -p.x, -p.y


# -- classical reference functions ------------------------------------------------


def eval_2f1(a, b, c, z, opts=DEFAULT_OPTIONS) -> EvalResult:
    """Gauss series by a plain term recurrence."""
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    _check_c(c)
    terminating = is_nonpositive_integer(a, INTEGER_SNAP) or is_nonpositive_integer(b, INTEGER_SNAP)
    if abs(z) >= 1 and not terminating:
        raise DomainError("2F1 series needs |z| < 1")
    term = 1 + 0j
    total = 1 + 0j
    small = 0
    n = 0
    while n < opts.max_diagonal:
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        n += 1
        if term == 0:
            return EvalResult(total, n, n - 1, 0.0, Verdict.TERMINATED)
        total += term
        if abs(term) * opts.consecutive_small <= opts.rel_tol * abs(total) + opts.abs_tol:
            small += 1
            if small >= opts.consecutive_small:
                return EvalResult(total, n + 1, n, abs(term) * opts.consecutive_small, Verdict.CONVERGED)
        else:
            small = 0
    return EvalResult(total, n + 1, n, abs(term) * opts.consecutive_small, Verdict.MAX_TERMS_REACHED)


def eval_classical_f1(a, b1, b2, c, x, y, opts=DEFAULT_OPTIONS) -> EvalResult:
    """Appell F1 as sum_m (a)_m (b1)_m / ((c)_m m!) x^m 2F1(a+m, b2; c+m; y).

    Deliberately independent of the diagonal engine so that it can serve
    as a reference for it.
    """
    a, b1, b2, c, x, y = (complex(v) for v in (a, b1, b2, c, x, y))
    _check_c(c)
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError("F1 needs |x| < 1 and |y| < 1")
    total = 0j
    outer = 1 + 0j
    count = 0
    small = 0
    m = 0
    inner_opts = dataclasses.replace(opts, rel_tol=min(opts.rel_tol, 1e-15))
    while m < opts.max_diagonal:
        inner = eval_2f1(a + m, b2, c + m, y, inner_opts)
        count += inner.terms_summed
        piece = outer * inner.value
        total += piece
        if outer == 0:
            return EvalResult(total, count, m, 0.0, Verdict.CONVERGED)
        if abs(piece) * opts.consecutive_small <= opts.rel_tol * abs(total) + opts.abs_tol:
            small += 1
            if small >= opts.consecutive_small:
                return EvalResult(total, count, m, abs(piece) * opts.consecutive_small, Verdict.CONVERGED)
        else:
            small = 0
        outer *= (a + m) * (b1 + m) / ((c + m) * (m + 1)) * x
        m += 1
    return EvalResult(total, count, m, math.inf, Verdict.MAX_TERMS_REACHED)


def eval_classical_f2(a, b1, b2, c1, c2, x, y, opts=DEFAULT_OPTIONS) -> EvalResult:
    if abs(x) + abs(y) >= 1:
        raise DomainError("F2 needs |x| + |y| < 1")
    spec = KdFSpec((a,), (b1,), (b2,), (), (c1,), (c2,))
    return sum_double_series(kdf_coefficients(spec), x, y, opts=opts)


def eval_classical_f3(a1, a2, b1, b2, c, x, y, opts=DEFAULT_OPTIONS) -> EvalResult:
    if abs(x) >= 1 or abs(y) >= 1:
        raise DomainError("F3 needs |x| < 1 and |y| < 1")
    spec = KdFSpec((), (a1, b1), (a2, b2), (c,))
    return sum_double_series(kdf_coefficients(spec), x, y, opts=opts)


def eval_classical_f4(a, b, c1, c2, x, y, opts=DEFAULT_OPTIONS) -> EvalResult:
    if math.sqrt(abs(x)) + math.sqrt(abs(y)) >= 1:
        raise DomainError("F4 needs sqrt|x| + sqrt|y| < 1")
    spec = KdFSpec((a, b), (), (), (), (c1,), (c2,))
    return sum_double_series(kdf_coefficients(spec), x, y, opts=opts)
