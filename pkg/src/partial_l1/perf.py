"""Exact finite-dimensional failure probabilities.

The failure probability is twice the sum of conic intrinsic volumes of the
failure cone at face dimensions l = m+1, m+3, ...; each intrinsic volume is
(face count) x (internal angle) x (external angle).  The complementary
sum over l = m-1, m-3, ... >= k-1 is the success probability, and the two
must add to one.  Both are always computed and the gap is reported.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import geometry, specfun
from .geometry import AngleValue, ProblemDims

PARTIAL = "partial"
HIDDEN = "hidden"
VARIANTS = (PARTIAL, HIDDEN)


@dataclass(frozen=True)
class FaceTerm:
    l: int
    log_count: float
    phi_int: AngleValue
    phi_ext: AngleValue
    log_term: float


@dataclass(frozen=True)
class ErrorProbReport:
    dims: ProblemDims
    variant: str
    p_err: float
    p_err_complement_check: float
    terms: tuple
    consistency_gap: float
    tolerance: float
    log_p_err: float = 0.0
    p_cor: float = 0.0
    cone_term: AngleValue = None
    complement_terms: tuple = ()
    clamp_excursion: float = 0.0
    # Partial-problem dimensions actually evaluated (differs from dims for the hidden variant).
    evaluated_dims: ProblemDims = field(default=None)


def _face_term(dims, l, tol):
    log_count = geometry.face_count_log(dims, l)
    phi_int = geometry.internal_angle_face(dims, l, tol)
    phi_ext = geometry.external_angle(dims, l, tol)
    return FaceTerm(l, log_count, phi_int, phi_ext, log_count + phi_int.log_value + phi_ext.log_value)


def log_sum(log_terms):
    """ln(sum(exp(log_terms))): pivot on the max term, then compensated summation."""
    log_terms = [x for x in log_terms if x > -math.inf]
    if not log_terms:
        return -math.inf
    pivot = max(log_terms)
    return pivot + math.log(math.fsum(math.exp(x - pivot) for x in log_terms))


def _direct_faces(dims):
    # no faces below dimension k-1, so their intrinsic volumes vanish
    return [l for l in range(dims.m + 1, dims.n, 2) if l >= dims.k - 1]


def _complement_faces(dims):
    return list(range(dims.m - 1, dims.k - 2, -2))


def _includes_cone(dims):
    # l = m + 2j + 1 reaches l = n only when n - m - 1 is even
    return (dims.n - dims.m - 1) % 2 == 0


def _direct(dims, tol):
    faces = _direct_faces(dims)
    per_angle = tol / (len(faces) + 1)
    terms = tuple(_face_term(dims, l, per_angle) for l in faces)
    cone = geometry.internal_angle_cone(dims, per_angle) if _includes_cone(dims) else None
    logs = [t.log_term for t in terms] + ([cone.log_value] if cone is not None else [])
    return terms, cone, math.log(2.0) + log_sum(logs)


def _complement(dims, tol):
    faces = _complement_faces(dims)
    per_angle = tol / (len(faces) + 1)
    terms = tuple(_face_term(dims, l, per_angle) for l in faces)
    return terms, math.log(2.0) + log_sum([t.log_term for t in terms])


def p_correct(dims, tol=specfun.DEFAULT_TOL):
    """Probability that partial l1 recovers the sparse solution."""
    _, log_p = _complement(dims, tol)
    return math.exp(log_p) if log_p > -math.inf else 0.0


def p_err_complementary(dims, tol=specfun.DEFAULT_TOL):
    """1 - p_correct, using only the faces below m."""
    return 1.0 - p_correct(dims, tol)


def p_err_partial(dims, tol=specfun.DEFAULT_TOL):
    """Exact failure probability of partial l1 with known support {1..k_eta}."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    terms, cone, log_p = _direct(dims, tol)
    comp_terms, log_cor = _complement(dims, tol)
    raw = math.exp(log_p) if log_p > -math.inf else 0.0
    p_cor = math.exp(log_cor) if log_cor > -math.inf else 0.0
    p_err = min(max(raw, 0.0), 1.0)
    return ErrorProbReport(
        dims=dims,
        variant=PARTIAL,
        p_err=p_err,
        p_err_complement_check=1.0 - p_cor,
        terms=terms,
        consistency_gap=abs(raw + p_cor - 1.0),
        tolerance=tol,
        log_p_err=min(log_p, 0.0),
        p_cor=p_cor,
        cone_term=cone,
        complement_terms=comp_terms,
        clamp_excursion=abs(raw - p_err),
        evaluated_dims=dims,
    )


def p_err_hidden(dims, tol=specfun.DEFAULT_TOL):
    """Failure probability of hidden partial l1; the cone equals a partial one at (2k-k_eta, m, n, k)."""
    mapped = dims.hidden_equivalent()
    report = p_err_partial(mapped, tol)
    return ErrorProbReport(**{**report.__dict__, "dims": dims, "variant": HIDDEN})


def p_err(dims, variant=PARTIAL, tol=specfun.DEFAULT_TOL):
    if variant == PARTIAL:
        return p_err_partial(dims, tol)
    if variant == HIDDEN:
        return p_err_hidden(dims, tol)
    raise ValueError(f"unknown variant {variant!r}")


def intrinsic_volumes(dims, tol=specfun.DEFAULT_TOL):
    """Conic intrinsic volumes v_l, l = k-1..n, of the failure cone (diagnostic)."""
    out = np.zeros(dims.n + 1)
    for l in range(dims.k - 1, dims.n):
        out[l] = math.exp(_face_term(dims, l, tol).log_term)
    out[dims.n] = geometry.internal_angle_cone(dims, tol).value
    return out
