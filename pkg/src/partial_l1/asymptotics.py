"""Large-deviation exponents and phase transitions in the linear regime.

With k = beta n, m = alpha n, k_eta = eta beta n and face dimension l = rho n,
a face term contributes exp(n * exponent(rho)) where

    exponent(rho) = count(rho) + inner_min_mu(rho) + inner_max_g(rho)
    count(rho)    = (1-beta) H((1-rho)/(1-beta)) + (rho-beta) ln 2

(natural logs throughout).  The intrinsic volumes sum to one, so the
exponent peaks at exactly zero; the peak location is the phase transition
alpha_w.  Above it the failure probability decays at rate exponent(alpha),
below it the success probability does.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize, special

from . import specfun
from .errors import BracketError, DomainError

ERROR_BRANCH = "error-branch"
CORRECT_BRANCH = "correct-branch"

_LN2 = math.log(2.0)
_SQRT_PI = math.sqrt(math.pi)
_EDGE = 1e-9


@dataclass(frozen=True)
class AsymptoticPoint:
    alpha: float
    beta: float
    eta: float = 0.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.beta < 1:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")
        if not 0 <= self.eta < 1:
            raise DomainError(f"eta must lie in [0, 1), got {self.eta}")


@dataclass(frozen=True)
class LdpResult:
    point: AsymptoticPoint
    rate: float
    rho_star: float
    mu_star: float
    g_star: float
    regime: str
    alpha_w: float = math.nan


def binary_entropy(x):
    """Natural-log binary entropy with 0 ln 0 = 0."""
    if not 0 <= x <= 1:
        raise DomainError(f"entropy argument must lie in [0, 1], got {x}")
    return float(special.entr(x) + special.entr(1.0 - x))


def count_exponent(rho, beta):
    """lim ln(2^(l-k+1) C(n-k, n-l-1)) / n."""
    return (1.0 - beta) * binary_entropy((1.0 - rho) / (1.0 - beta)) + (rho - beta) * _LN2


def _check(rho, beta, eta):
    if not 0 < beta < 1 or not 0 <= eta < 1:
        raise DomainError(f"need 0 < beta < 1 and 0 <= eta < 1, got beta={beta}, eta={eta}")
    if not beta <= rho < 1:
        raise DomainError(f"rho={rho} outside [beta, 1) = [{beta}, 1)")


def _bracket_root(fn, lo, hi):
    # fn(lo) < 0 and fn increases; widen hi until the sign flips
    while fn(hi) <= 0:
        hi *= 2.0
        if hi > 1e8:
            raise BracketError("root bracket expansion failed", endpoints=(lo, hi))
    return optimize.brentq(fn, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def inner_min_mu(rho, beta, eta):
    """min over mu >= 0 of (rho-beta) ln erfc(mu) + (rho-eta beta) mu^2, minus (rho-beta) ln 2.

    The stationarity condition (rho-eta beta) mu erfcx(mu) = (rho-beta)/sqrt(pi)
    has a single root because mu erfcx(mu) increases from 0 to 1/sqrt(pi).
    Returns (value, mu_star).
    """
    _check(rho, beta, eta)
    a, b = rho - beta, rho - eta * beta
    if a == 0:
        return 0.0, 0.0
    mu = _bracket_root(lambda x: b * x * special.erfcx(x) - a / _SQRT_PI, 0.0, 1.0)
    value = a * float(specfun.log_erfc(mu)) + b * mu * mu - a * _LN2
    return value, mu


def inner_max_g(rho, beta, eta):
    """max over g >= 0 of -(rho-eta beta) g^2 + (1-rho) ln erf(g).  Returns (value, g_star)."""
    _check(rho, beta, eta)
    b, q = rho - eta * beta, 1.0 - rho

    def slope(g):
        # negative derivative scaled by erf(g) / 2; increasing in g
        return b * g * special.erf(g) - q * math.exp(-g * g) / _SQRT_PI

    g = _bracket_root(slope, 0.0, 1.0)
    return -b * g * g + q * float(specfun.log_erf(g)), g


def exponent(rho, beta, eta=0.0):
    """Exponent of the l = rho n face term.  Returns (value, mu_star, g_star)."""
    _check(rho, beta, eta)
    v_mu, mu = inner_min_mu(rho, beta, eta)
    v_g, g = inner_max_g(rho, beta, eta)
    return count_exponent(rho, beta) + v_mu + v_g, mu, g


def exponent_slope(rho, beta, eta=0.0):
    """d exponent / d rho, by the envelope theorem at the inner optimizers."""
    _check(rho, beta, eta)
    _, mu = inner_min_mu(rho, beta, eta)
    _, g = inner_max_g(rho, beta, eta)
    x = (1.0 - rho) / (1.0 - beta)
    return math.log(x / (1.0 - x)) + math.log(special.erfcx(mu)) - g * g - float(specfun.log_erf(g))


def pt_curve(beta, eta=0.0, xtol=1e-12):
    """Phase-transition alpha_w(beta, eta): the zero (and maximum) of the exponent."""
    if not 0 < beta < 1 or not 0 <= eta < 1:
        raise DomainError(f"need 0 < beta < 1 and 0 <= eta < 1, got beta={beta}, eta={eta}")
    lo, hi = beta + _EDGE * (1 - beta), 1.0 - _EDGE * (1 - beta)
    s_lo, s_hi = exponent_slope(lo, beta, eta), exponent_slope(hi, beta, eta)
    if not (s_lo > 0 > s_hi):
        raise BracketError(f"exponent slope does not change sign on [{lo:.9g}, {hi:.9g}]",
                           endpoints=(lo, hi), values=(s_lo, s_hi))
    return optimize.brentq(exponent_slope, lo, hi, args=(beta, eta), xtol=xtol, maxiter=500)


def ldp_rate_partial(point, optimize_rho=False):
    """Decay rate of the failure (alpha >= alpha_w) or success (alpha < alpha_w) probability.

    The shipped path fixes rho = alpha.  ``optimize_rho=True`` instead maximizes
    the exponent over rho in [alpha, 1) (diagnostic; coincides above alpha_w).
    """
    if point.alpha < point.beta:
        raise DomainError(f"need alpha >= beta, got alpha={point.alpha}, beta={point.beta}")
    alpha_w = pt_curve(point.beta, point.eta)
    rho = point.alpha
    if optimize_rho:
        res = optimize.minimize_scalar(lambda r: -exponent(r, point.beta, point.eta)[0],
                                       bounds=(point.alpha, 1.0 - _EDGE), method="bounded",
                                       options={"xatol": 1e-10})
        if -res.fun > exponent(point.alpha, point.beta, point.eta)[0]:
            rho = float(res.x)
    rate, mu, g = exponent(rho, point.beta, point.eta)
    regime = ERROR_BRANCH if point.alpha >= alpha_w else CORRECT_BRANCH
    return LdpResult(point, min(rate, 0.0), rho, mu, g, regime, alpha_w)


def hidden_to_partial(point):
    """Hidden-variant point mapped to the equivalent partial point ((2-eta) beta, 1/(2-eta))."""
    beta2 = (2.0 - point.eta) * point.beta
    if beta2 >= 1:
        raise DomainError(f"mapped beta (2-eta) beta = {beta2} must be < 1")
    return AsymptoticPoint(point.alpha, beta2, 1.0 / (2.0 - point.eta))


def ldp_rate_hidden(point, optimize_rho=False):
    return ldp_rate_partial(hidden_to_partial(point), optimize_rho)


def pt_curve_hidden(beta, eta=0.0):
    beta2 = (2.0 - eta) * beta
    if not 0 < beta2 < 1:
        raise DomainError(f"mapped beta (2-eta) beta = {beta2} must lie in (0, 1)")
    return pt_curve(beta2, 1.0 / (2.0 - eta))
