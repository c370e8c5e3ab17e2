"""Quadrature rules for integrals with algebraic endpoint behaviour.

On [0, 1] the substitution u = sin^2(pi s / 2) turns u^(p-1) (1-u)^(q-1) du
into a bounded s^(2p-1) (1-s)^(2q-1) ds for Re p, Re q >= 1/2, and a
Gauss-Legendre rule on a mesh graded geometrically towards both ends
takes care of the remaining fractional (and complex) powers.
"""
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_laguerre

GRADING_RATIO = 0.2


@dataclass(frozen=True)
class QuadratureOptions:
    panels: int = 64
    points_per_panel: int = 20
    laguerre_points: int = 120
    target_tol: float = 1e-9
    simplex_refinement: int = 6
    grading_levels: int = 20

    def __post_init__(self):
        for name in ("panels", "points_per_panel", "laguerre_points", "simplex_refinement", "grading_levels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.target_tol > 0:
            raise ValueError("target_tol must be positive")

    def refined(self):
        """The rule used for the refinement estimate."""
        return QuadratureOptions(
            panels=2 * self.panels,
            points_per_panel=self.points_per_panel,
            laguerre_points=self.laguerre_points + 40,
            target_tol=self.target_tol,
            simplex_refinement=self.simplex_refinement + 2,
            grading_levels=self.grading_levels + 4,
        )

    def for_simplex(self):
        """One-dimensional rule used along each side of the unit square."""
        r = self.simplex_refinement
        return 2 * r, max(self.points_per_panel // 2, 4), 2 * r + 4


DEFAULT_QUADRATURE = QuadratureOptions()


@functools.lru_cache(maxsize=32)
def graded_mesh(panels, levels, ratio=GRADING_RATIO):
    """Breakpoints on [0, 1]: uniform panels plus geometric grading at both ends."""
    h = 1.0 / panels
    inner = np.linspace(0.0, 1.0, panels + 1)
    near0 = h * ratio ** np.arange(1, levels + 1)
    pts = np.concatenate([inner, near0, 1.0 - near0])
    return np.unique(pts)


@functools.lru_cache(maxsize=32)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


@functools.lru_cache(maxsize=32)
def composite_rule(panels, points, levels):
    """Composite Gauss-Legendre nodes and weights on the graded mesh of [0, 1].

    Also returns 1 - s computed panel by panel so nothing is lost to
    cancellation next to s = 1.
    """
    mesh = graded_mesh(panels, levels)
    x, w = _legendre(points)
    lo, hi = mesh[:-1, None], mesh[1:, None]
    half = 0.5 * (hi - lo)
    s = lo + half * (x + 1)
    one_minus_s = (1.0 - hi) + half * (1 - x)
    return s.ravel(), one_minus_s.ravel(), (half * w).ravel()


@functools.lru_cache(maxsize=32)
def sine_squared_rule(panels, points, levels):
    """Nodes on [0, 1] in u = sin^2(pi s / 2) with the logs needed for power weights.

    Returns (u, 1 - u, log u, log(1 - u), log of du/ds times the s-weight).
    """
    s, s_c, w = composite_rule(panels, points, levels)
    half_pi = 0.5 * np.pi
    sin_s = np.sin(half_pi * s)
    cos_s = np.sin(half_pi * s_c)  # cos(pi s / 2) without cancellation near s = 1
    u = sin_s**2
    u_c = cos_s**2
    log_u = 2 * np.log(sin_s)
    log_uc = 2 * np.log(cos_s)
    # du = pi sin cos ds
    log_jw = math.log(np.pi) + 0.5 * (log_u + log_uc) + np.log(w)
    return u, u_c, log_u, log_uc, log_jw


def beta_weighted_nodes(p, q, panels, points, levels):
    """Nodes u and weights W with sum W f(u) ~ integral_0^1 u^(p-1) (1-u)^(q-1) f(u) du."""
    u, u_c, log_u, log_uc, log_jw = sine_squared_rule(panels, points, levels)
    logw = (complex(p) - 1) * log_u + (complex(q) - 1) * log_uc + log_jw
    return u, np.exp(logw)


@functools.lru_cache(maxsize=16)
def _laguerre(n):
    # scipy's rule stays accurate for several hundred nodes, numpy's does not
    return roots_laguerre(n)


def half_line_nodes(p, opts: QuadratureOptions, panels=None):
    """Nodes u and weights W with sum W f(u) ~ integral_0^inf e^-u u^(p-1) f(u) du.

    [0, 1] uses the sine-squared rule, [1, inf) Gauss-Laguerre after u = 1 + w.
    Nodes whose weight underflows are dropped.
    """
    panels = opts.panels if panels is None else panels
    u0, w0 = beta_weighted_nodes(p, 1, panels, opts.points_per_panel, opts.grading_levels)
    w0 = w0 * np.exp(-u0)
    x, w = _laguerre(opts.laguerre_points)
    u1 = 1.0 + x
    logw = -1.0 + np.log(w) + (complex(p) - 1) * np.log(u1)
    keep = logw.real > -700
    return np.concatenate([u0, u1[keep]]), np.concatenate([w0, np.exp(logw[keep])])
