"""Integral representations of the two discrete Appell forms, by quadrature.

Euler-type forms integrate over [0, 1] or the unit simplex, Laplace-type
forms over [0, inf).  The inner functions are evaluated at all quadrature
nodes at once; on the accepted regimes they are polynomials (terminating
t) or have closed forms (k = 0).

The Laplace forms whose weight is u^(-t-1) push the inner argument to
(-u)^k x, far outside the unit disk.  There the inner function is
continued analytically through its own Euler integral, which needs
Re a > 0, Re(c - a) > 0 and x, y off the real axis.
"""
import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError, QuadratureError
from .functions import Appell1Params, Appell2Params, KdFSpec, kdf_coefficients, kdf_region
from .quadrature import DEFAULT_QUADRATURE, QuadratureOptions, beta_weighted_nodes, half_line_nodes
from .series import EvalResult, Sequence1D, Verdict, evaluate_on_points
from .special import beta, is_nonpositive_integer, reciprocal_gamma

FIRST_FORM_KINDS = ("euler", "simplex", "laplace_a", "laplace_b1", "laplace_b2", "laplace_t1", "laplace_t2")
SECOND_FORM_KINDS = ("euler", "simplex", "laplace_a", "laplace_b1", "laplace_b2", "laplace_t")


@dataclass(frozen=True)
class IntegralForm:
    kind: str
    form: str = "first"

    def __post_init__(self):
        kinds = {"first": FIRST_FORM_KINDS, "second": SECOND_FORM_KINDS}.get(self.form)
        if kinds is None:
            raise ValueError(f"unknown form {self.form!r}")
        if self.kind not in kinds:
            raise ValueError(f"no {self.kind!r} representation for the {self.form} form")

    def __str__(self):
        return f"{self.kind}[{self.form}]"


ALL_FORMS = tuple(IntegralForm(k, "first") for k in FIRST_FORM_KINDS) + tuple(
    IntegralForm(k, "second") for k in SECOND_FORM_KINDS
)


def _require(condition, message, reason):
    if not condition:
        raise PreconditionError(message, reason)


def _positive_real_part(value, name):
    _require(complex(value).real > 0, f"Re({name}) must be positive", f"re_{name}_positive")


def _lattice_list(t, k):
    """The k parameters (-t + i) / k that factor (-t)_(m k)."""
    return tuple((-complex(t) + i) / k for i in range(k))


def _lattice_scale(k):
    return (-k) ** k


# -- inner functions on node arrays ------------------------------------------------


def discrete_1f0_on_nodes(b, t, k, Z):
    """sum (b)_m (-1)^(m k) (-t)_(m k) Z^m / m! at every entry of Z."""
    Z = np.asarray(Z, dtype=complex)
    if k == 0:
        return np.exp(-complex(b) * np.log1p(-Z))
    seq = Sequence1D(upper=(complex(b),), discrete=((complex(t), int(k)),))
    bound = seq.bound()
    if bound is None:
        raise PreconditionError("inner series is formal for non-terminating t", "formal_integrand")
    coef = seq.values(bound + 1)
    acc = np.full(Z.shape, coef[bound], dtype=complex)
    for m in range(bound - 1, -1, -1):
        acc = acc * Z + coef[m]
    return acc


def kdf_on_nodes(spec: KdFSpec, X, Y):
    """Kampe de Feriet series at many points, refusing points outside its region."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    coeff = kdf_coefficients(spec)
    bx, by, bj = coeff.bounds()
    terminating = bj is not None or (bx is not None and by is not None)
    if not terminating:
        rx = float(np.abs(X).max(initial=0.0))
        ry = float(np.abs(Y).max(initial=0.0))
        region = kdf_region(spec, rx, ry)
        _require(region in ("entire", "inside"), f"integrand series is {region} on the nodes", "integrand_region")
    return evaluate_on_points(coeff, X, Y)


def _euler_continuation(a, c, factors, q: QuadratureOptions, panels):
    """Gamma(c)/(Gamma(a)Gamma(c-a)) int s^(a-1)(1-s)^(c-a-1) prod f(s) ds, per outer node.

    ``factors`` maps the inner nodes s (a column vector) to an array of
    shape (outer, inner).
    """
    s, W = beta_weighted_nodes(a, c - a, panels, q.points_per_panel, q.grading_levels)
    values = factors(s[None, :])
    return (values @ W) / beta(a, c - a)


# -- single evaluation ----------------------------------------------------------------


def _first_form(kind, p: Appell1Params, q: QuadratureOptions):
    a, b1, b2, c = p.a, p.b1, p.b2, p.c
    t1, t2, k1, k2, x, y = p.t1, p.t2, p.k1, p.k2, p.x, p.y
    pts, levels = q.points_per_panel, q.grading_levels
    if kind == "euler":
        _positive_real_part(a, "a")
        _positive_real_part(c - a, "c-a")
        u, W = beta_weighted_nodes(a, c - a, q.panels, pts, levels)
        f = discrete_1f0_on_nodes(b1, t1, k1, u * x) * discrete_1f0_on_nodes(b2, t2, k2, u * y)
        return (W @ f) / beta(a, c - a), u.size
    if kind == "simplex":
        _positive_real_part(b1, "b1")
        _positive_real_part(b2, "b2")
        _positive_real_part(c - b1 - b2, "c-b1-b2")
        spec = KdFSpec((a,), _lattice_list(t1, k1), _lattice_list(t2, k2))
        return _simplex(spec, b1, b2, c, _lattice_scale(k1) * x, _lattice_scale(k2) * y, q)
    if kind == "laplace_a":
        _positive_real_part(a, "a")
        spec = KdFSpec((), (b1,) + _lattice_list(t1, k1), (b2,) + _lattice_list(t2, k2), (c,))
        u, W = half_line_nodes(a, q)
        f = kdf_on_nodes(spec, _lattice_scale(k1) * u * x, _lattice_scale(k2) * u * y)
        return (W @ f) * reciprocal_gamma(a), u.size
    if kind == "laplace_b1":
        _positive_real_part(b1, "b1")
        spec = KdFSpec((a,), _lattice_list(t1, k1), (b2,) + _lattice_list(t2, k2), (c,))
        u, W = half_line_nodes(b1, q)
        Y = np.full(u.shape, _lattice_scale(k2) * y, dtype=complex)
        f = kdf_on_nodes(spec, _lattice_scale(k1) * u * x, Y)
        return (W @ f) * reciprocal_gamma(b1), u.size
    if kind == "laplace_b2":
        _positive_real_part(b2, "b2")
        spec = KdFSpec((a,), (b1,) + _lattice_list(t1, k1), _lattice_list(t2, k2), (c,))
        v, W = half_line_nodes(b2, q)
        X = np.full(v.shape, _lattice_scale(k1) * x, dtype=complex)
        f = kdf_on_nodes(spec, X, _lattice_scale(k2) * v * y)
        return (W @ f) * reciprocal_gamma(b2), v.size
    if kind in ("laplace_t1", "laplace_t2"):
        _positive_real_part(a, "a")
        _positive_real_part(c - a, "c-a")
        if kind == "laplace_t1":
            _gamma_weight_checks(t1, "t1")
            _require(k1 == 0 or x.imag != 0, "x must be off the real axis", "x_off_axis")
            u, W = half_line_nodes(-t1, q)
            X = (-u) ** k1 * x

            def factors(s):
                return np.exp(-b1 * np.log1p(-s * X[:, None])) * discrete_1f0_on_nodes(b2, t2, k2, s * y)

            scale = reciprocal_gamma(-t1)
        else:
            _gamma_weight_checks(t2, "t2")
            _require(k2 == 0 or y.imag != 0, "y must be off the real axis", "y_off_axis")
            u, W = half_line_nodes(-t2, q)
            Y = (-u) ** k2 * y

            def factors(s):
                return discrete_1f0_on_nodes(b1, t1, k1, s * x) * np.exp(-b2 * np.log1p(-s * Y[:, None]))

            scale = reciprocal_gamma(-t2)
        inner = _euler_continuation(a, c, factors, q, q.panels)
        return (W @ inner) * scale, u.size * q.panels * pts
    raise ValueError(kind)


def _second_form(kind, p: Appell2Params, q: QuadratureOptions):
    a, b1, b2, c, t, k, x, y = p.a, p.b1, p.b2, p.c, p.t, p.k, p.x, p.y
    pts, levels = q.points_per_panel, q.grading_levels
    scale = _lattice_scale(k)
    lattice = _lattice_list(t, k)
    if kind == "euler":
        _positive_real_part(a, "a")
        _positive_real_part(c - a, "c-a")
        u, W = beta_weighted_nodes(a, c - a, q.panels, pts, levels)
        if k == 0:
            f = np.exp(-b1 * np.log1p(-u * x) - b2 * np.log1p(-u * y))
        else:
            f = kdf_on_nodes(KdFSpec(lattice, (b1,), (b2,)), scale * u * x, scale * u * y)
        return (W @ f) / beta(a, c - a), u.size
    if kind == "simplex":
        _positive_real_part(b1, "b1")
        _positive_real_part(b2, "b2")
        _positive_real_part(c - b1 - b2, "c-b1-b2")
        spec = KdFSpec((a,) + lattice)
        return _simplex(spec, b1, b2, c, scale * x, scale * y, q)
    if kind == "laplace_a":
        _positive_real_part(a, "a")
        spec = KdFSpec(lattice, (b1,), (b2,), (c,))
        u, W = half_line_nodes(a, q)
        f = kdf_on_nodes(spec, scale * u * x, scale * u * y)
        return (W @ f) * reciprocal_gamma(a), u.size
    if kind == "laplace_b1":
        _positive_real_part(b1, "b1")
        spec = KdFSpec((a,) + lattice, (), (b2,), (c,))
        u, W = half_line_nodes(b1, q)
        Y = np.full(u.shape, scale * y, dtype=complex)
        f = kdf_on_nodes(spec, scale * u * x, Y)
        return (W @ f) * reciprocal_gamma(b1), u.size
    if kind == "laplace_b2":
        _positive_real_part(b2, "b2")
        spec = KdFSpec((a,) + lattice, (b1,), (), (c,))
        v, W = half_line_nodes(b2, q)
        X = np.full(v.shape, scale * x, dtype=complex)
        f = kdf_on_nodes(spec, X, scale * v * y)
        return (W @ f) * reciprocal_gamma(b2), v.size
    if kind == "laplace_t":
        _gamma_weight_checks(t, "t")
        _positive_real_part(a, "a")
        _positive_real_part(c - a, "c-a")
        if k:
            _require(x.imag != 0 and y.imag != 0, "x and y must be off the real axis", "xy_off_axis")
        u, W = half_line_nodes(-t, q)
        X = (-u) ** k * x
        Y = (-u) ** k * y

        def factors(s):
            return np.exp(-b1 * np.log1p(-s * X[:, None]) - b2 * np.log1p(-s * Y[:, None]))

        inner = _euler_continuation(a, c, factors, q, q.panels)
        return (W @ inner) * reciprocal_gamma(-t), u.size * q.panels * pts
    raise ValueError(kind)


def _gamma_weight_checks(t, name):
    t = complex(t)
    _require((-t).real > 0, f"Re(-{name}) must be positive", f"re_minus_{name}_positive")
    _require(not is_nonpositive_integer(-t, 1e-12), f"{name} must not be an integer", f"{name}_noninteger")


def _simplex(spec, b1, b2, c, X, Y, q: QuadratureOptions):
    """Integral over u, v >= 0, u + v <= 1 with u = xi (1 - eta), v = xi eta."""
    panels, pts, levels = q.for_simplex()
    # xi^(b1+b2-1) (1-xi)^(c-b1-b2-1) from u^(b1-1) v^(b2-1) (1-u-v)^(...) times the Jacobian xi
    xi, Wxi = beta_weighted_nodes(b1 + b2, c - b1 - b2, panels, pts, levels)
    eta, Weta = beta_weighted_nodes(b2, b1, panels, pts, levels)
    U = np.outer(xi, 1 - eta)
    V = np.outer(xi, eta)
    lone_joint = len(spec.upper_joint) == 1 and not (
        spec.upper_x or spec.upper_y or spec.lower_joint or spec.lower_x or spec.lower_y
    )
    if lone_joint:
        # binomial theorem: (1 - X u - Y v)^(-a)
        f = np.exp(-spec.upper_joint[0] * np.log1p(-(X * U + Y * V)))
    else:
        f = kdf_on_nodes(spec, X * U, Y * V)
    value = Wxi @ f @ Weta
    norm = beta(b1 + b2, c - b1 - b2) * beta(b2, b1)
    return value / norm, U.size


def _evaluate_once(form: IntegralForm, params, q):
    if form.form == "first":
        if not isinstance(params, Appell1Params):
            raise TypeError("the first-form integrals take Appell1Params")
        return _first_form(form.kind, params, q)
    if not isinstance(params, Appell2Params):
        raise TypeError("the second-form integrals take Appell2Params")
    return _second_form(form.kind, params, q)


def eval_integral(form: IntegralForm, params, q: QuadratureOptions = DEFAULT_QUADRATURE) -> EvalResult:
    """Quadrature value of one integral representation.

    The tail estimate is the change under one refinement of the rule; a
    second refinement is tried before giving up with QuadratureError.
    """
    coarse, _ = _evaluate_once(form, params, q)
    fine_q = q.refined()
    fine, nodes = _evaluate_once(form, params, fine_q)
    estimate = abs(fine - coarse)
    if estimate > q.target_tol * (abs(fine) + 1):
        finer, nodes = _evaluate_once(form, params, fine_q.refined())
        estimate = abs(finer - fine)
        fine = finer
        if estimate > q.target_tol * (abs(fine) + 1):
            raise QuadratureError(f"{form} refinement stalls at {estimate:.2e}")
    return EvalResult(complex(fine), int(nodes), 0, float(estimate), Verdict.CONVERGED)


def crosscheck_integral(form_a, form_b, params, q=DEFAULT_QUADRATURE, params_b=None):
    """|A - B| / (|A| + |B| + 1) for two representations, optionally at different parameters."""
    va = eval_integral(form_a, params, q).value
    vb = eval_integral(form_b, params if params_b is None else params_b, q).value
    return abs(va - vb) / (abs(va) + abs(vb) + 1)


def with_target(q: QuadratureOptions, tol):
    return dataclasses.replace(q, target_tol=tol)
