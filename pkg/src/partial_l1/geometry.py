"""Internal and external angles of the partial-l1 failure cone.

The failure cone is

    C = {w : -sum_{i=k_eta+1}^{k} w_i >= sum_{i=k+1}^{n} |w_i|},

and its l-faces (k-1 <= l <= n-1) come in a single symmetry class.  Every
angle is returned as an :class:`AngleValue` holding both the probability and
its natural log, so that faces whose angles underflow still contribute to
log-domain sums.

Internal angles are Fourier integrals of ``psi(t)**p * exp(-c t^2 / 2)``
where ``psi`` is the half-normal characteristic function.  For large ``p``
the integrand is O(1) while the integral is exponentially small, so the
default evaluation shifts the path to pass through the saddle point of the
moment generating function (exponential tilting).  The plain real-line form
is kept as ``method="real_line"`` for cross-checks.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize, special

from . import specfun
from .errors import DomainError

_LOG_TINY = math.log(1e-300)
_LOG_2PI = math.log(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


@dataclass(frozen=True)
class ProblemDims:
    """Problem sizes: sparsity k, equations m, ambient dimension n, known-support size k_eta."""

    k: int
    m: int
    n: int
    k_eta: int

    def __post_init__(self):
        for name in ("k", "m", "n", "k_eta"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise DomainError(f"{name} must be an integer, got {v!r}")
        if not 0 <= self.k_eta < self.k <= self.n:
            raise DomainError(f"need 0 <= k_eta < k <= n, got k={self.k}, k_eta={self.k_eta}, n={self.n}")
        if not 1 <= self.m < self.n:
            raise DomainError(f"need 1 <= m < n, got m={self.m}, n={self.n}")

    def hidden_equivalent(self):
        """Dimensions of the partial problem whose failure cone equals the hidden one."""
        k2 = 2 * self.k - self.k_eta
        if k2 > self.n:
            raise DomainError(f"hidden variant needs 2k - k_eta <= n, got {k2} > {self.n}")
        return ProblemDims(k2, self.m, self.n, self.k)


@dataclass(frozen=True)
class AngleValue:
    value: float
    log_value: float
    abs_error_estimate: float = 0.0

    @classmethod
    def from_log(cls, log_value, abs_error_estimate=0.0):
        # Quadrature noise can push an angle of exactly 1 a hair above it.
        log_value = min(float(log_value), 0.0)
        value = math.exp(log_value) if log_value > _LOG_TINY else 0.0
        return cls(value, log_value, float(abs_error_estimate))

    def __float__(self):
        return self.value


def face_count_log(dims, l):
    """ln of the number of l-faces, 2^(l-k+1) * C(n-k, n-l-1)."""
    k, n = dims.k, dims.n
    if not k - 1 <= l <= n - 1:
        raise DomainError(f"face dimension l={l} outside [{k - 1}, {n - 1}]")
    return ((l - k + 1) * math.log(2.0) + special.gammaln(n - k + 1)
            - special.gammaln(n - l) - special.gammaln(l - k + 2))


def _log_mgf(theta, c, p):
    # log E exp(theta Z) for Z = G - (|W_1| + ... + |W_p|), G ~ N(0, c)
    return 0.5 * c * theta * theta + p * float(specfun.half_normal_log_mgf(theta))


def _dlog_mgf(theta, c, p):
    return c * theta + p * (theta - _SQRT_2_OVER_PI / special.erfcx(theta / _SQRT2))


def _find_root_above(fn, lo, hi=1.0):
    while fn(hi) <= 0:
        hi *= 2.0
        if hi > 1e6:
            raise DomainError("saddle point search diverged")
    return optimize.brentq(fn, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def _tilted_cf(c, p, theta):
    """s -> E[exp(i(s - i theta) Z)] / E[exp(theta Z)], bounded by exp(-c s^2/2)."""
    m = special.erfcx(theta / _SQRT2)
    offset = 0.5 * c * theta * theta

    def cf(t):
        t = complex(t)
        return np.exp(-0.5 * c * t * t - offset) * (specfun.half_normal_cf(t) / m) ** p

    return cf


def internal_angle_face(dims, l, tol=specfun.DEFAULT_TOL, method="tilted"):
    """Internal angle at the apex of a representative l-face.

    Equals sqrt(l+1-k_eta) / (2^p sqrt(2 pi)) * int psi(t)^p exp(-c t^2/2) dt
    with p = l-k+1 and c = k-k_eta.
    """
    k, k_eta = dims.k, dims.k_eta
    if not k - 1 <= l <= dims.n - 1:
        raise DomainError(f"face dimension l={l} outside [{k - 1}, {dims.n - 1}]")
    p, c, d = l - k + 1, k - k_eta, l + 1 - k_eta
    prefactor = 0.5 * math.log(d) - p * math.log(2.0) - 0.5 * _LOG_2PI

    if method == "real_line":
        def integrand(t):
            return (specfun.half_normal_cf(t) ** p * np.exp(-0.5 * c * t * t)).real

        res = specfun.integrate_real_line(integrand, tol, envelope_rate=0.5 * c, lower=0.0)
        integral = 2.0 * res.value
        if integral <= 0:
            return AngleValue(0.0, -math.inf, 2.0 * res.abs_error_estimate)
        log_value = prefactor + math.log(integral)
        return AngleValue.from_log(log_value, math.exp(log_value) * 2.0 * res.abs_error_estimate / integral)
    if method != "tilted":
        raise ValueError(f"unknown method {method!r}")

    theta = 0.0 if p == 0 else _find_root_above(lambda x: _dlog_mgf(x, c, p), 0.0)
    cf = _tilted_cf(c, p, theta)
    res = specfun.integrate_real_line(lambda s: float(np.real(cf(complex(s, -theta)))),
                                      tol, envelope_rate=0.5 * c, lower=0.0)
    integral = 2.0 * res.value
    log_value = prefactor + _log_mgf(theta, c, p) + math.log(integral)
    return AngleValue.from_log(log_value, math.exp(log_value) * 2.0 * res.abs_error_estimate / integral)


def internal_angle_cone(dims, tol=specfun.DEFAULT_TOL):
    """Internal angle of the whole cone: P(-sum of k-k_eta normals >= sum of n-k half-normals)."""
    c, p = dims.k - dims.k_eta, dims.n - dims.k
    theta = _find_root_above(lambda x: _dlog_mgf(x, c, p) - 1.0 / x, 1e-12)
    res = specfun.gil_pelaez_nonneg_prob(_tilted_cf(c, p, theta), tol, envelope_rate=0.5 * c,
                                         tilt=theta)
    log_value = _log_mgf(theta, c, p) + math.log(res.value)
    return AngleValue.from_log(log_value, math.exp(log_value) * res.abs_error_estimate / res.value)


def external_angle(dims, l, tol=specfun.DEFAULT_TOL):
    """External angle at a representative l-face (exactly 1 for l = n).

    (1/sqrt(2 pi)) int_0^inf exp(-g^2/2) erf(g / sqrt(2(l+1-k_eta)))^(n-l-1) dg
    """
    k, n = dims.k, dims.n
    if not k - 1 <= l <= n:
        raise DomainError(f"face dimension l={l} outside [{k - 1}, {n}]")
    if l == n:
        return AngleValue(1.0, 0.0, 0.0)
    q = n - l - 1
    if q == 0:
        return AngleValue(0.5, math.log(0.5), 0.0)
    scale = math.sqrt(2.0 * (l + 1 - dims.k_eta))

    def log_integrand(g):
        return -0.5 * g * g + q * specfun.log_erf(g / scale)

    def slope(g):
        x = g / scale
        return -g + q * (2.0 / math.sqrt(math.pi)) * math.exp(-x * x) / (special.erf(x) * scale)

    g_star = _find_root_above(lambda g: -slope(g), 1e-300)
    peak = float(log_integrand(g_star))
    res = specfun.integrate_real_line(lambda g: math.exp(log_integrand(g) - peak) if g > 0 else 0.0,
                                      tol, envelope_rate=0.5, center=g_star, lower=0.0,
                                      points=[g_star])
    log_value = peak - 0.5 * _LOG_2PI + math.log(res.value)
    return AngleValue.from_log(log_value, math.exp(log_value) * res.abs_error_estimate / res.value)
