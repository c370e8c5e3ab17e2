"""Double power series summation by diagonals.

Coefficients are supplied by objects exposing ``terms(ms, ns, x, y)``
together with termination bounds and a growth classification.  The
separable case A[m, n] = J[m + n] U[m] V[n] covers every family in the
package and is handled by :class:`SeparableCoefficients`.

Three regimes fall out of the structure of the coefficients:

* every direction exhausted -> a finite sum, verdict ``Terminated``;
* every open direction has factorial decay or a finite radius -> ordinary
  convergence test on the diagonal magnitudes;
* some open direction has uncancelled factorial growth -> a formal series.
  It is summed up to its smallest diagonal and always reported as
  ``DivergenceSuspected``.
"""
import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError, PoleError, PochhammerOverflow
from .special import INTEGER_SNAP, is_nonpositive_integer, nonnegative_integer_value


class Verdict(str, enum.Enum):
    CONVERGED = "Converged"
    TERMINATED = "Terminated"
    DIVERGENCE_SUSPECTED = "DivergenceSuspected"
    MAX_TERMS_REACHED = "MaxTermsReached"


@dataclass(frozen=True)
class SeriesOptions:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    max_diagonal: int = 2000
    consecutive_small: int = 3
    divergence_ratio: float = 1.5
    divergence_window: int = 8

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")
        if self.max_diagonal < 1:
            raise ValueError("max_diagonal must be at least 1")
        if self.consecutive_small < 1:
            raise ValueError("consecutive_small must be at least 1")
        if not self.divergence_ratio > 1:
            raise ValueError("divergence_ratio must exceed 1")
        if self.divergence_window < 1:
            raise ValueError("divergence_window must be at least 1")


DEFAULT_OPTIONS = SeriesOptions()


@dataclass(frozen=True)
class EvalResult:
    value: complex
    terms_summed: int
    last_diagonal: int
    tail_estimate: float
    verdict: Verdict
    region: Optional[str] = None

    @property
    def ok(self):
        return self.verdict in (Verdict.CONVERGED, Verdict.TERMINATED)


@dataclass(frozen=True)
class TermWeight:
    """Product of affine factors (alpha + beta*m + gamma*n)."""

    factors: Tuple[Tuple[complex, complex, complex], ...] = ()

    @staticmethod
    def unit():
        return TermWeight()

    @staticmethod
    def affine(alpha, beta=0, gamma=0):
        return TermWeight(((complex(alpha), complex(beta), complex(gamma)),))

    def __mul__(self, other):
        return TermWeight(tuple(sorted(self.factors + other.factors, key=_factor_key)))

    def scaled(self, s):
        return self * TermWeight.affine(s)

    def evaluate(self, ms, ns):
        out = np.ones(np.shape(ms), dtype=complex)
        for alpha, beta, gamma in self.factors:
            out = out * (alpha + beta * ms + gamma * ns)
        return out

    def at(self, m, n):
        acc = 1 + 0j
        for alpha, beta, gamma in self.factors:
            acc *= alpha + beta * m + gamma * n
        return acc


def _factor_key(f):
    return tuple((v.real, v.imag) for v in f)


UNIT_WEIGHT = TermWeight()


@dataclass(frozen=True)
class Growth:
    """Structural behaviour of one summation direction.

    ``excess`` is the net factorial power of the coefficient ratio (upper
    count plus discrete steps minus lower count minus one for the
    factorial); ``scale`` is the limiting modulus of the ratio divided by
    index**excess, so a zero-excess direction converges for |z| * scale < 1.
    """

    excess: int
    scale: float


@dataclass(frozen=True)
class Sequence1D:
    """Single-index hypergeometric coefficient.

    value[j] = prod (u)_j prod (-1)^(j k)(-t)_(j k) / (prod (l)_j [j!])
    """

    upper: Tuple[complex, ...] = ()
    lower: Tuple[complex, ...] = ()
    discrete: Tuple[Tuple[complex, int], ...] = ()
    factorial: bool = True

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(complex(u) for u in self.upper))
        object.__setattr__(self, "lower", tuple(complex(l) for l in self.lower))
        object.__setattr__(
            self, "discrete", tuple((complex(t), int(k)) for t, k in self.discrete if int(k) != 0)
        )
        for l in self.lower:
            if is_nonpositive_integer(l, INTEGER_SNAP):
                raise PoleError(f"lower parameter {l} is a nonpositive integer")
        for _, k in self.discrete:
            if k < 0:
                raise ValueError("discrete step k must be nonnegative")

    def bound(self):
        """Largest index with a possibly nonzero value, or None if unbounded."""
        best = None
        for u in self.upper:
            if is_nonpositive_integer(u, INTEGER_SNAP):
                b = -int(round(u.real))
                best = b if best is None else min(best, b)
        for t, k in self.discrete:
            top = nonnegative_integer_value(t)
            if top is not None:
                b = top // k
                best = b if best is None else min(best, b)
        return best

    def growth(self):
        excess = len(self.upper) - len(self.lower) - (1 if self.factorial else 0)
        scale = 1.0
        for _, k in self.discrete:
            excess += k
            scale *= float(k) ** k
        return Growth(excess, scale)

    def ratios(self, count):
        """value[j + 1] / value[j] for j = 0 .. count - 1."""
        j = np.arange(count, dtype=float)
        r = np.ones(count, dtype=complex)
        for u in self.upper:
            r = r * (u + j)
        for t, k in self.discrete:
            for i in range(k):
                r = r * (t - (j * k + i))
        for l in self.lower:
            r = r / (l + j)
        if self.factorial:
            r = r / (j + 1.0)
        b = self.bound()
        if b is not None and b < count:
            r[b:] = 0.0
        return r

    def values(self, count):
        """value[0 .. count - 1]."""
        out = np.empty(count, dtype=complex)
        if count == 0:
            return out
        out[0] = 1.0
        if count > 1:
            with np.errstate(over="ignore", invalid="ignore"):
                out[1:] = np.cumprod(self.ratios(count - 1))
        return out

    def value(self, j):
        return complex(self.values(j + 1)[j])


TRIVIAL = Sequence1D(factorial=True)
JOINT_TRIVIAL = Sequence1D(factorial=False)


def _powers(z, count):
    out = np.empty(count, dtype=complex)
    if count == 0:
        return out
    out[0] = 1.0
    if count > 1:
        with np.errstate(over="ignore", invalid="ignore"):
            out[1:] = np.cumprod(np.full(count - 1, complex(z)))
    return out


class SeparableCoefficients:
    """A[m, n] = joint[m + n] * xpart[m] * ypart[n]."""

    def __init__(self, joint=JOINT_TRIVIAL, x_part=TRIVIAL, y_part=TRIVIAL):
        self.joint = joint
        self.x_part = x_part
        self.y_part = y_part
        self._size = 0
        self._cache_key = None
        self._arrays = None

    def bounds(self):
        return self.x_part.bound(), self.y_part.bound(), self.joint.bound()

    def growth(self):
        gj = self.joint.growth()
        gx = self.x_part.growth()
        gy = self.y_part.growth()
        return (
            Growth(gj.excess + gx.excess, gj.scale * gx.scale),
            Growth(gj.excess + gy.excess, gj.scale * gy.scale),
        )

    def _ensure(self, size, x, y):
        key = (complex(x), complex(y))
        if self._arrays is not None and self._cache_key == key and self._size >= size:
            return self._arrays
        size = max(size, 2 * self._size if self._cache_key == key else 0, 16)
        J = self.joint.values(size)
        U = self.x_part.values(size)
        V = self.y_part.values(size)
        XP = _powers(x, size)
        YP = _powers(y, size)
        self._arrays = (J, U, V, XP, YP)
        self._size = size
        self._cache_key = key
        return self._arrays

    def terms(self, ms, ns, x, y):
        ms = np.asarray(ms, dtype=int)
        ns = np.asarray(ns, dtype=int)
        top = int(max(ms.max(initial=0), ns.max(initial=0), (ms + ns).max(initial=0))) + 1
        J, U, V, XP, YP = self._ensure(top, x, y)
        with np.errstate(over="ignore", invalid="ignore"):
            return J[ms + ns] * U[ms] * V[ns] * XP[ms] * YP[ns]

    def coefficient(self, m, n):
        return complex(self.terms([m], [n], 1.0, 1.0)[0])


class CallableCoefficients:
    """Wrap a scalar oracle coeff(m, n) -> A[m, n]."""

    def __init__(self, fn: Callable[[int, int], complex], x_bound=None, y_bound=None, growth=None):
        self.fn = fn
        self.x_bound = x_bound
        self.y_bound = y_bound
        self._growth = growth

    def bounds(self):
        return self.x_bound, self.y_bound, None

    def growth(self):
        return self._growth

    def terms(self, ms, ns, x, y):
        x, y = complex(x), complex(y)
        out = np.empty(len(ms), dtype=complex)
        for i, (m, n) in enumerate(zip(ms, ns)):
            m, n = int(m), int(n)
            out[i] = complex(self.fn(m, n)) * (x ** m if m else 1.0) * (y ** n if n else 1.0)
        return out


class CompensatedSum:
    """Running Kahan-Babuska (Neumaier) sum, component-wise for complex."""

    __slots__ = ("re", "im", "c_re", "c_im")

    def __init__(self):
        self.re = self.im = self.c_re = self.c_im = 0.0

    @staticmethod
    def _step(total, comp, v):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        return t, comp

    def add(self, z):
        z = complex(z)
        self.re, self.c_re = self._step(self.re, self.c_re, z.real)
        self.im, self.c_im = self._step(self.im, self.c_im, z.imag)

    @property
    def value(self):
        return complex(self.re + self.c_re, self.im + self.c_im)


def kahan_accumulate(partials):
    """Compensated summation of a stream of (complex) numbers."""
    acc = CompensatedSum()
    for p in partials:
        acc.add(p)
    return acc.value


def exact_sum(values):
    """Correctly rounded sum of complex values (fsum on each component)."""
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))


class Structure:
    """Per-direction classification used by the engine."""

    EXHAUSTED = "exhausted"
    ENTIRE = "entire"
    RADIUS = "radius"
    OUTSIDE = "outside"
    FORMAL = "formal"
    UNKNOWN = "unknown"


def classify_direction(bound, growth, z):
    if bound is not None or z == 0:
        return Structure.EXHAUSTED
    if growth is None:
        return Structure.UNKNOWN
    if growth.excess < 0:
        return Structure.ENTIRE
    if growth.excess > 0:
        return Structure.FORMAL
    return Structure.RADIUS if abs(z) * growth.scale < 1 else Structure.OUTSIDE


def analyse(coeff, x, y):
    bx, by, bj = coeff.bounds()
    growth = coeff.growth()
    gx, gy = (growth if growth is not None else (None, None))
    if bj is not None:
        # a terminating joint factor exhausts both directions
        bx = bj if bx is None else min(bx, bj)
        by = bj if by is None else min(by, bj)
    sx = classify_direction(bx, gx, complex(x))
    sy = classify_direction(by, gy, complex(y))
    return bx, by, sx, sy


def _diagonal_indices(d, mx, ny):
    lo = 0 if ny is None else max(0, d - ny)
    hi = d if mx is None else min(d, mx)
    if hi < lo:
        return np.empty(0, dtype=int), np.empty(0, dtype=int)
    ms = np.arange(lo, hi + 1)
    return ms, d - ms


def sum_double_series(coeff, x, y, weight=UNIT_WEIGHT, opts=DEFAULT_OPTIONS):
    """Sum w(m, n) A[m, n] x^m y^n along the diagonals m + n = 0, 1, 2, ..."""
    x, y = complex(x), complex(y)
    mx, ny, sx, sy = analyse(coeff, x, y)
    if x == 0:
        mx = 0
    if y == 0:
        ny = 0

    if sx == Structure.EXHAUSTED and sy == Structure.EXHAUSTED:
        return _sum_finite(coeff, x, y, weight, mx, ny)

    formal = Structure.FORMAL in (sx, sy) or Structure.OUTSIDE in (sx, sy)
    top = opts.max_diagonal
    if mx is not None and ny is not None:
        top = min(top, mx + ny)

    acc = CompensatedSum()
    terms_summed = 0
    mags = []
    small_run = 0
    best = None  # (magnitude, diagonal, partial) for the optimal truncation
    verdict = Verdict.MAX_TERMS_REACHED
    last = 0
    for d in range(top + 1):
        ms, ns = _diagonal_indices(d, mx, ny)
        if len(ms) == 0:
            mag = 0.0
            s = 0j
        else:
            vals = coeff.terms(ms, ns, x, y)
            raw_nonzero = bool(np.any(vals))
            if weight.factors:
                vals = vals * weight.evaluate(ms, ns)
            s = complex(vals.sum())
            mag = float(np.abs(vals).sum())
        last = d
        if not (math.isfinite(mag) and math.isfinite(s.real) and math.isfinite(s.imag)):
            verdict = Verdict.DIVERGENCE_SUSPECTED
            last = d - 1
            break
        if formal and best is not None and mag > best[0] and d > best[1] + 1:
            # past the smallest diagonal of a divergent expansion
            verdict = Verdict.DIVERGENCE_SUSPECTED
            break
        terms_summed += len(ms)
        acc.add(s)
        partial = acc.value
        mags.append(mag)
        # a diagonal the weight annihilates says nothing about the tail
        annihilated = len(ms) > 0 and mag == 0 and raw_nonzero
        if formal and not annihilated and (best is None or mag <= best[0]):
            best = (mag, d, partial)

        if not formal and not annihilated:
            if mag * opts.consecutive_small <= opts.rel_tol * abs(partial) + opts.abs_tol:
                small_run += 1
            else:
                small_run = 0
            if small_run >= opts.consecutive_small:
                verdict = Verdict.CONVERGED
                break
        if _growth_detected(mags, opts):
            verdict = Verdict.DIVERGENCE_SUSPECTED
            break

    if formal:
        if best is not None:
            mag, d_best, partial = best
            last = d_best
            tail = mag
        else:
            tail = math.inf
        return EvalResult(partial, terms_summed, last, float(tail), Verdict.DIVERGENCE_SUSPECTED)

    partial = acc.value
    tail = mags[-1] * opts.consecutive_small if mags else 0.0
    return EvalResult(partial, terms_summed, last, float(tail), verdict)


def _growth_detected(mags, opts):
    w = opts.divergence_window
    if len(mags) <= w + 1:
        return False
    window = mags[-(w + 2):]
    if window[0] <= 0 or min(window) <= 0:
        return False
    if window[-1] < opts.divergence_ratio * window[1]:
        return False
    if any(b <= a for a, b in zip(window[1:], window[2:])):
        return False
    # polynomial-times-geometric transients have a falling step ratio;
    # genuine divergence keeps it at or above its earlier level
    first_step = math.log(window[2] / window[1])
    last_step = math.log(window[-1] / window[-2])
    return last_step >= 0.9 * first_step and last_step > 0


def _sum_finite(coeff, x, y, weight, mx, ny):
    ms, ns = np.meshgrid(np.arange(mx + 1), np.arange(ny + 1), indexing="ij")
    ms = ms.ravel()
    ns = ns.ravel()
    order = np.lexsort((ms, ms + ns))
    ms, ns = ms[order], ns[order]
    vals = coeff.terms(ms, ns, x, y)
    if weight.factors:
        vals = vals * weight.evaluate(ms, ns)
    if not np.all(np.isfinite(vals)):
        raise PochhammerOverflow("terminating series term overflowed")
    value = exact_sum(vals)
    return EvalResult(value, int(len(ms)), int(mx + ny), 0.0, Verdict.TERMINATED)


def sum_rectangle(coeff, x, y, m_max, n_max, weight=UNIT_WEIGHT):
    """Explicit sum over 0 <= m <= m_max, 0 <= n <= n_max (row by row)."""
    vals = []
    for m in range(m_max + 1):
        ns = np.arange(n_max + 1)
        ms = np.full(n_max + 1, m)
        v = coeff.terms(ms, ns, x, y)
        if weight.factors:
            v = v * weight.evaluate(ms, ns)
        vals.append(v)
    return exact_sum(np.concatenate(vals)) if vals else 0j


def evaluate_on_points(coeff, X, Y, tol=1e-15, max_degree=600):
    """Evaluate sum A[m, n] X^m Y^n at many points at once.

    The truncation degree comes from an absolute-value majorant at the
    largest |X| and |Y| among the points; evaluation is a matrix product
    in the Y powers followed by Horner's rule in X.
    """
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    bx, by, bj = coeff.bounds()
    if bj is not None:
        bx = bj if bx is None else min(bx, bj)
        by = bj if by is None else min(by, bj)
    rx = float(np.abs(X).max(initial=0.0))
    ry = float(np.abs(Y).max(initial=0.0))
    if rx == 0:
        bx = 0
    if ry == 0:
        by = 0
    if bx is not None and by is not None:
        M, N = bx, by
        D = M + N
    else:
        D = _majorant_degree(coeff, rx, ry, bx, by, tol, max_degree)
        M = D if bx is None else min(bx, D)
        N = D if by is None else min(by, D)
    ms, ns = np.meshgrid(np.arange(M + 1), np.arange(N + 1), indexing="ij")
    C = coeff.terms(ms.ravel(), ns.ravel(), 1.0, 1.0).reshape(M + 1, N + 1)
    C[(ms + ns) > D] = 0.0
    YP = np.ones((Y.size, N + 1), dtype=complex)
    for j in range(1, N + 1):
        YP[:, j] = YP[:, j - 1] * Y.ravel()
    Q = YP @ C.T  # (points, M + 1)
    Xf = X.ravel()
    acc = Q[:, M].copy()
    for m in range(M - 1, -1, -1):
        acc = acc * Xf + Q[:, m]
    return acc.reshape(X.shape)


def _majorant_degree(coeff, rx, ry, bx, by, tol, max_degree):
    small = 0
    total = 0.0
    for d in range(max_degree + 1):
        ms, ns = _diagonal_indices(d, bx, by)
        if len(ms):
            mag = float(np.abs(coeff.terms(ms, ns, rx, ry)).sum())
        else:
            mag = 0.0
        if not math.isfinite(mag):
            break
        total += mag
        if mag <= tol * max(total, 1.0):
            small += 1
            if small >= 3:
                return d
        else:
            small = 0
    raise DomainError("integrand series does not settle within the degree budget")
