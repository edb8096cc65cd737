import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from partial_l1.errors import DomainError
from partial_l1.geometry import (AngleValue, ProblemDims, external_angle, face_count_log,
                                 internal_angle_cone, internal_angle_face)

from oracles import (binomial_se, is_internal_cone, mc_external, mc_internal_cone,
                     mc_internal_face)

BASE = ProblemDims(6, 12, 40, 3)
SMALL = ProblemDims(4, 6, 12, 2)


@pytest.mark.parametrize("args", [(6, 12, 40, 6), (6, 12, 40, 7), (6, 40, 40, 3), (6, 0, 40, 3),
                                  (41, 12, 40, 3), (6, 12, 40, -1), (6.0, 12, 40, 3)])
def test_dims_validation(args):
    with pytest.raises(DomainError):
        ProblemDims(*args)


def test_dims_k_eta_zero_allowed():
    assert ProblemDims(6, 12, 40, 0).k_eta == 0


def test_hidden_equivalent():
    assert ProblemDims(6, 15, 40, 3).hidden_equivalent() == ProblemDims(9, 15, 40, 6)
    with pytest.raises(DomainError):
        ProblemDims(6, 10, 10, 1).hidden_equivalent()


def test_angle_value_underflow_keeps_log():
    a = AngleValue.from_log(-800.0)
    assert a.value == 0.0 and a.log_value == -800.0
    b = AngleValue.from_log(-3.0)
    assert abs(b.value - math.exp(b.log_value)) <= 1e-12 * b.value


def test_face_count_examples():
    assert face_count_log(BASE, 5) == pytest.approx(0.0, abs=1e-12)
    assert face_count_log(BASE, 39) == pytest.approx(34 * math.log(2), rel=1e-12)
    assert face_count_log(BASE, 11) == pytest.approx(math.log(2 ** 6 * math.comb(34, 28)), rel=1e-12)


def test_face_count_exact_integers_all_l():
    for l in range(BASE.k - 1, BASE.n):
        exact = 2 ** (l - BASE.k + 1) * math.comb(BASE.n - BASE.k, BASE.n - l - 1)
        assert face_count_log(BASE, l) == pytest.approx(math.log(exact), rel=1e-12, abs=1e-12)


def test_face_count_domain():
    with pytest.raises(DomainError):
        face_count_log(BASE, 4)
    with pytest.raises(DomainError):
        face_count_log(BASE, 40)


def test_internal_face_at_k_minus_1_is_one():
    for dims in (BASE, SMALL, ProblemDims(9, 12, 40, 0)):
        assert internal_angle_face(dims, dims.k - 1).value == pytest.approx(1.0, abs=1e-9)


def test_internal_face_domain():
    with pytest.raises(DomainError):
        internal_angle_face(BASE, 40)


@pytest.mark.parametrize("l", [6, 8, 11, 16, 22])
def test_internal_face_tilted_matches_real_line(l):
    a = internal_angle_face(BASE, l)
    b = internal_angle_face(BASE, l, method="real_line")
    assert a.value == pytest.approx(b.value, rel=1e-8)


def test_internal_face_against_mc_oracle():
    rng = np.random.default_rng(11)
    est = mc_internal_face(6, 3, 11, 10 ** 6, rng)
    val = internal_angle_face(BASE, 11).value
    assert abs(est - val) <= 3 * binomial_se(val, 10 ** 6)


def test_internal_face_standard_l1_reduction():
    # k_eta = 0 and the shifted problem (k - k_eta, 0, l - k_eta) describe the same angle
    for l in range(6, 20):
        a = internal_angle_face(BASE, l)
        b = internal_angle_face(ProblemDims(3, 12, 37, 0), l - 3)
        assert a.log_value == pytest.approx(b.log_value, rel=1e-9, abs=1e-12)


def test_internal_face_monotone_in_l():
    logs = [internal_angle_face(BASE, l).log_value for l in range(BASE.k - 1, BASE.n)]
    assert all(b <= a + 1e-12 for a, b in zip(logs, logs[1:]))


def test_internal_face_imaginary_part_cancels():
    from scipy import integrate
    from partial_l1.specfun import half_normal_cf
    p, c = 5, 3
    im = integrate.quad(lambda t: (half_normal_cf(t) ** p * math.exp(-c * t * t / 2)).imag,
                        -20, 20, epsabs=1e-13)[0]
    assert abs(im) <= 1e-10


def test_internal_cone_examples():
    assert internal_angle_cone(ProblemDims(6, 3, 6, 3)).value == pytest.approx(0.5, abs=1e-9)
    assert internal_angle_cone(ProblemDims(2, 1, 3, 1)).value == pytest.approx(0.25, abs=1e-9)


def test_internal_cone_decreasing_in_n():
    vals = [internal_angle_cone(ProblemDims(6, 3, n, 3)).log_value for n in range(6, 41)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert 0 < math.exp(vals[0]) <= 0.5


def test_internal_cone_base_dims_importance_sampling():
    # ~5e-17: far below plain Monte Carlo, checked with a tilted sampler instead
    rng = np.random.default_rng(5)
    est, se = is_internal_cone(6, 3, 40, 200_000, rng, theta=2.0)
    val = internal_angle_cone(BASE).value
    assert abs(est - val) <= 4 * se
    assert se / est < 0.05


def test_internal_cone_plain_mc_moderate():
    rng = np.random.default_rng(3)
    dims = ProblemDims(6, 3, 9, 3)
    val = internal_angle_cone(dims).value
    est = mc_internal_cone(6, 3, 9, 10 ** 6, rng)
    assert abs(est - val) <= 3 * binomial_se(val, 10 ** 6)


def test_external_angle_examples():
    assert external_angle(BASE, 40).value == 1.0
    assert external_angle(BASE, 39).value == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(DomainError):
        external_angle(BASE, 4)


def test_external_angle_against_mc_oracle():
    rng = np.random.default_rng(17)
    est = mc_external(6, 3, 40, 15, 10 ** 6, rng)
    val = external_angle(BASE, 15).value
    assert abs(est - val) <= 3 * binomial_se(val, 10 ** 6)


def test_external_angle_against_direct_quadrature():
    from scipy import integrate, special
    for l in (5, 12, 30, 38):
        q, d = 40 - l - 1, l + 1 - 3
        direct = integrate.quad(lambda g: math.exp(-g * g / 2) * special.erf(g / math.sqrt(2 * d)) ** q,
                                0, np.inf, epsabs=1e-15, limit=200)[0] / math.sqrt(2 * math.pi)
        assert external_angle(BASE, l).value == pytest.approx(direct, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(k=st.integers(1, 8), extra=st.integers(0, 30), data=st.data())
def test_angles_are_probabilities(k, extra, data):
    n = k + extra + 1
    k_eta = data.draw(st.integers(0, k - 1))
    dims = ProblemDims(k, 1, n, k_eta)
    l = data.draw(st.integers(k - 1, n - 1))
    for a in (internal_angle_face(dims, l), external_angle(dims, l), internal_angle_cone(dims)):
        assert 0.0 <= a.value <= 1.0
        assert a.log_value <= 0.0
        assert abs(a.value - math.exp(a.log_value)) <= 1e-12 * max(a.value, 1e-300)
        assert a.abs_error_estimate >= 0
