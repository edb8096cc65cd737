"""Special functions and quadrature engines.

Everything here works on Gaussian-decaying integrands.  The half-normal
characteristic function is written through the Dawson function (real
arguments) or the Faddeeva function (complex arguments), so powers of it
never overflow.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, special

from .errors import NonConvergence

DEFAULT_TOL = 1e-10
# Domain truncation: the caller's Gaussian envelope exp(-rate*t^2) drops below this.
ENVELOPE_FLOOR = 1e-18

_SQRT2 = math.sqrt(2.0)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool = True

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("abs_error_estimate must be non-negative")
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")


def erfc(x):
    """Complementary error function."""
    return special.erfc(x)


def erf(x):
    return special.erf(x)


def log_erfc(x):
    """log(erfc(x)), finite for large positive x where erfc underflows."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, np.log(special.erfcx(np.maximum(x, 0))) - np.maximum(x, 0) ** 2,
                   np.log(special.erfc(np.minimum(x, 0))))
    return out[()] if out.ndim == 0 else out


def log_erf(x):
    """log(erf(x)) for x > 0 (-inf at 0)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x < 1.0, np.log(special.erf(x)), np.log1p(-special.erfc(x)))
    return out[()] if out.ndim == 0 else out


def dawson(x):
    """Dawson's integral F(x) = exp(-x^2) * int_0^x exp(s^2) ds."""
    return special.dawsn(x)


def half_normal_cf(t):
    """E[exp(-i t |W|)] for a standard normal W.

    For real t this is exp(-t^2/2) - i (2/sqrt(pi)) F(t/sqrt(2)), with F the
    Dawson function.  Complex t (used by shifted integration paths) goes
    through the Faddeeva function w(z) = exp(-z^2) erfc(-iz); the two agree
    on the real axis.
    """
    t = np.asarray(t)
    if np.iscomplexobj(t):
        out = special.wofz(-t / _SQRT2)
    else:
        t = t.astype(float)
        out = np.exp(-0.5 * t * t) - 1j * _TWO_OVER_SQRT_PI * special.dawsn(t / _SQRT2)
    return out[()] if out.ndim == 0 else out


def half_normal_log_mgf(theta):
    """log E[exp(-theta |W|)] = log erfcx(theta / sqrt 2), theta >= 0."""
    return np.log(special.erfcx(np.asarray(theta, dtype=float) / _SQRT2))


def envelope_half_width(rate, floor=ENVELOPE_FLOOR):
    """Half-width L at which exp(-rate * L^2) equals `floor`."""
    if rate <= 0:
        raise ValueError("envelope rate must be positive")
    return math.sqrt(-math.log(floor) / rate)


def integrate_real_line(f, tol=DEFAULT_TOL, *, envelope_rate=0.5, center=0.0,
                        lower=None, points=None, limit=500, raise_on_failure=True):
    """Integrate a Gaussian-decaying real function over the real line.

    `f` must be bounded by C * exp(-envelope_rate * (t - center)^2).  The
    domain is truncated where that envelope falls below 1e-18 of its peak and
    the remainder handed to adaptive Gauss-Kronrod.  `lower` clips the left
    end (use 0.0 for half-line integrals).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    half = envelope_half_width(envelope_rate)
    a, b = center - half, center + half
    if lower is not None:
        a = max(a, lower)
    if b <= a:
        return QuadratureResult(0.0, 0.0, 1)
    brk = None
    if points is not None:
        brk = [p for p in np.atleast_1d(points) if a < p < b] or None
    value, err, info = integrate.quad(f, a, b, epsabs=tol, epsrel=0.0, limit=limit,
                                      points=brk, full_output=1)[:3]
    result = QuadratureResult(float(value), float(abs(err)), int(info["neval"]), err <= tol)
    if not result.converged and raise_on_failure:
        raise NonConvergence(f"quadrature error {err:.3g} above tolerance {tol:.3g}",
                             estimate=value, abs_error=err)
    return result


def gil_pelaez_nonneg_prob(cf, tol=DEFAULT_TOL, *, envelope_rate=0.5, tilt=0.0,
                           raise_on_failure=True):
    """P(Z >= 0) from the characteristic function cf(t) = E[exp(i t Z)].

    With ``tilt == 0`` this is the classic inversion
    1/2 + (1/pi) int_0^inf Im(cf(t))/t dt, whose removable singularity at
    t = 0 is replaced by its limit.

    With ``tilt = theta > 0`` the integral runs along Im(t) = -theta instead:
    P(Z >= 0) = (1/pi) int_0^inf Re[cf(s - i theta) / (theta + i s)] ds.
    `cf` must then accept complex arguments.  This form has no cancellation
    when P(Z >= 0) is tiny, and the caller may pre-divide cf by E[exp(theta Z)]
    to keep the integrand O(1) (multiplying the result back afterwards).
    """
    if tilt < 0:
        raise ValueError("tilt must be non-negative")
    if tilt == 0.0:
        h = 1e-6

        def integrand(t):
            if t == 0.0:
                return float(np.imag(cf(h))) / h
            return float(np.imag(cf(t))) / t

        res = integrate_real_line(integrand, tol * math.pi, envelope_rate=envelope_rate,
                                  lower=0.0, raise_on_failure=raise_on_failure)
        return QuadratureResult(0.5 + res.value / math.pi, res.abs_error_estimate / math.pi,
                                res.evaluations, res.converged)

    theta = float(tilt)

    def integrand(s):
        return float(np.real(cf(s - 1j * theta) / (theta + 1j * s)))

    res = integrate_real_line(integrand, tol * math.pi, envelope_rate=envelope_rate,
                              lower=0.0, raise_on_failure=raise_on_failure)
    return QuadratureResult(res.value / math.pi, res.abs_error_estimate / math.pi,
                            res.evaluations, res.converged)
