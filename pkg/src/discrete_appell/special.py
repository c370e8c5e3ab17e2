"""Complex scalar special functions.

Log-gamma uses the Lanczos approximation (g = 607/128, 15 terms) with the
reflection formula on the left half plane. Everything else is built on it.
"""
import cmath
import math

from .errors import DomainError, PochhammerOverflow, PoleError

LANCZOS_G = 607.0 / 128.0
LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
LOG_PI = math.log(math.pi)

# below this length the rising factorial is a plain product
POCHHAMMER_PRODUCT_LIMIT = 32
# distance at which a value is treated as sitting on an integer
INTEGER_SNAP = 1e-12
# largest log-magnitude that still fits in a double
MAX_LOG = 709.78


def is_nonpositive_integer(z, tol=0.0):
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    r = round(z.real)
    return r <= 0 and abs(z.real - r) <= tol


def nonnegative_integer_value(z, tol=INTEGER_SNAP):
    """Return the integer n if z is within tol of n >= 0, else None."""
    z = complex(z)
    if abs(z.imag) > tol:
        return None
    r = round(z.real)
    if r < 0 or abs(z.real - r) > tol:
        return None
    return int(r)


def _wrap_imag(z):
    im = math.remainder(z.imag, 2.0 * math.pi)
    if im == -math.pi:
        im = math.pi
    return complex(z.real, im)


def _lanczos_log_gamma(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    acc = complex(LANCZOS_COEFFS[0])
    for i in range(1, len(LANCZOS_COEFFS)):
        acc += LANCZOS_COEFFS[i] / (z + i)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def _sin_pi(z):
    # reduce the real part exactly before multiplying by pi
    shift = 2.0 * round(z.real / 2.0)
    return cmath.sin(math.pi * complex(z.real - shift, z.imag))


def _log_gamma_continued(z):
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return LOG_PI - cmath.log(_sin_pi(z)) - _log_gamma_continued(1.0 - z)
    return _lanczos_log_gamma(z)


def log_gamma(z):
    """Principal-branch log of Gamma(z) for complex z."""
    z = complex(z)
    if is_nonpositive_integer(z):
        raise PoleError(f"log_gamma has a pole at {z}")
    if z.imag == 0 and z.real == int(z.real) and z.real <= 171:
        # exact factorials for small positive integers
        return complex(math.log(math.factorial(int(z.real) - 1)), 0.0)
    return _wrap_imag(_log_gamma_continued(z))


def gamma(z):
    """Gamma(z) through log_gamma; raises PochhammerOverflow past double range."""
    lg = log_gamma(z)
    if lg.real > MAX_LOG:
        raise PochhammerOverflow(f"Gamma({z}) overflows")
    return cmath.exp(lg)


def reciprocal_gamma(z):
    """1/Gamma(z), zero at the poles."""
    z = complex(z)
    if is_nonpositive_integer(z):
        return 0j
    return cmath.exp(-log_gamma(z))


def beta(v, w):
    """Beta function Gamma(v) Gamma(w) / Gamma(v + w)."""
    v, w = complex(v), complex(w)
    for arg in (v, w, v + w):
        if is_nonpositive_integer(arg):
            raise PoleError(f"beta has a pole at argument {arg}")
    lb = log_gamma(v) + log_gamma(w) - log_gamma(v + w)
    if lb.real > MAX_LOG:
        raise PochhammerOverflow(f"beta({v}, {w}) overflows")
    return cmath.exp(lb)


def gamma_ratio(upper, lower):
    """prod Gamma(upper) / prod Gamma(lower), computed in log space."""
    acc = 0j
    for u in upper:
        acc += log_gamma(u)
    for l in lower:
        if is_nonpositive_integer(l):
            return 0j
        acc -= log_gamma(l)
    if acc.real > MAX_LOG:
        raise PochhammerOverflow("gamma ratio overflows")
    return cmath.exp(acc)


def rising_product(u, n):
    """(u)_n by direct multiplication."""
    u = complex(u)
    acc = 1.0 + 0j
    for i in range(n):
        acc *= u + i
    if not (math.isfinite(acc.real) and math.isfinite(acc.imag)):
        raise PochhammerOverflow(f"({u})_{n} overflows")
    return acc


def rising_via_gamma(u, n):
    """(u)_n as exp(log_gamma(u + n) - log_gamma(u))."""
    u = complex(u)
    lg = log_gamma(u + n) - log_gamma(u)
    if lg.real > MAX_LOG:
        raise PochhammerOverflow(f"({u})_{n} overflows")
    return cmath.exp(lg)


def pochhammer(u, n):
    """Rising factorial (u)_n for complex u and integer n >= 0."""
    if n < 0:
        raise DomainError("pochhammer length must be nonnegative")
    u = complex(u)
    if n < POCHHAMMER_PRODUCT_LIMIT or is_nonpositive_integer(u):
        return rising_product(u, n)
    return rising_via_gamma(u, n)


def discrete_pochhammer(t, m, k, factorized=False):
    """Signed discrete factor (-1)^(m k) (-t)_(m k).

    With ``factorized`` the value is assembled as
    k^(m k) prod_i ((-t + i)/k)_m, which is how the lattice parameter
    splits into k ordinary Pochhammer symbols.
    """
    if m < 0 or k < 0:
        raise DomainError("discrete_pochhammer needs m, k >= 0")
    length = m * k
    if length == 0:
        return 1.0 + 0j
    t = complex(t)
    top = nonnegative_integer_value(t)
    if top is not None and length > top:
        return 0j
    sign = -1.0 if length % 2 else 1.0
    if not factorized:
        return sign * pochhammer(-t, length)
    acc = 1.0 + 0j
    for i in range(k):
        acc *= pochhammer((-t + i) / k, m)
    scale_log = length * math.log(k)
    if scale_log + math.log(abs(acc) or 1.0) > MAX_LOG:
        raise PochhammerOverflow("discrete Pochhammer factor overflows")
    return sign * acc * float(k) ** length


def binomial(r, s):
    """Exact binomial coefficient C(r, s) for 0 <= s <= r."""
    if r < 0 or s < 0:
        raise DomainError("binomial arguments must be nonnegative")
    if s > r:
        raise DomainError(f"binomial({r}, {s}) needs s <= r")
    return math.comb(r, s)
