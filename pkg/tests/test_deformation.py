import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minlen_delta import DomainError, Kind, consistency_check, make_custom_deformation, make_deformation
from minlen_delta.deformation import eval_f, eval_g, eval_g_inverse, sample_grid


def test_kempf_domain():
    d = make_deformation("kempf", beta=1.0)
    assert d.b == pytest.approx(math.pi / 2, rel=1e-15)
    assert math.isinf(d.a)


def test_undeformed_is_identity():
    d = make_deformation("undeformed")
    assert math.isinf(d.b)
    assert eval_g(d, 3.5) == 3.5
    assert d.l0 == 0.0


def test_maxmomentum_domain():
    d = make_deformation("maxmomentum", beta=4.0)
    assert d.a == pytest.approx(0.5, rel=1e-15)
    assert d.b == pytest.approx(math.pi / 4, rel=1e-15)


@pytest.mark.parametrize("kind,kwargs,p,expected", [
    ("kempf", dict(beta=1.0), math.pi / 4, 1.0),
    ("maxmomentum", dict(beta=1.0), math.pi / 2 * (1 - 1e-12), 1.0),
    ("cutoff", dict(b=2.0), 0.0, 0.0),
])
def test_eval_g(kind, kwargs, p, expected):
    assert eval_g(make_deformation(kind, **kwargs), p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("kind,kwargs,P,expected", [
    ("kempf", dict(beta=1.0), 2.0, 5.0),
    ("undeformed", {}, 7.0, 1.0),
    ("maxmomentum", dict(beta=1.0), 0.6, 0.8),
])
def test_eval_f(kind, kwargs, P, expected):
    assert eval_f(make_deformation(kind, **kwargs), P) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("kind,kwargs,P,expected", [
    ("kempf", dict(beta=1.0), 1.0, math.pi / 4),
    ("cutoff", dict(b=1.0), 0.3, 0.3),
    ("maxmomentum", dict(beta=1.0), 0.5, math.pi / 6),
])
def test_eval_g_inverse(kind, kwargs, P, expected):
    assert eval_g_inverse(make_deformation(kind, **kwargs), P) == pytest.approx(expected, rel=1e-14)


def test_domain_errors():
    kempf = make_deformation("kempf", beta=1.0)
    mm = make_deformation("maxmomentum", beta=1.0)
    with pytest.raises(DomainError):
        eval_g(kempf, math.pi / 2)
    with pytest.raises(DomainError):
        eval_f(mm, 1.0)
    with pytest.raises(DomainError):
        eval_g_inverse(mm, -1.5)


@pytest.mark.parametrize("kwargs", [
    dict(kind="kempf", beta=0.0),
    dict(kind="maxmomentum", beta=-1.0),
    dict(kind="cutoff", b=math.inf),
    dict(kind="cutoff"),
    dict(kind="snyder", beta=1.0),
])
def test_make_deformation_rejects(kwargs):
    with pytest.raises(ValueError):
        make_deformation(**kwargs)


def test_b_parametrisation_matches_beta():
    for kind in ("kempf", "maxmomentum"):
        via_b = make_deformation(kind, b=10.0)
        assert via_b.b == pytest.approx(10.0, rel=1e-15)
        assert via_b.beta == pytest.approx((math.pi / 20.0) ** 2, rel=1e-15)


@pytest.mark.parametrize("kind,kwargs", [
    ("kempf", dict(beta=0.01)), ("kempf", dict(beta=1.0)),
    ("maxmomentum", dict(beta=1.0)), ("cutoff", dict(b=3.0)), ("undeformed", {}),
])
def test_consistency_report_passes(kind, kwargs):
    report = consistency_check(make_deformation(kind, **kwargs), 101)
    assert report.passed
    assert report.max_derivative_defect < 1e-6


def test_undeformed_defect_is_exactly_zero():
    report = consistency_check(make_deformation("undeformed"), 101)
    assert report.max_derivative_defect == 0.0
    assert report.max_inverse_defect == 0.0


def test_l0_times_b(builtin):
    if builtin.finite:
        assert builtin.l0 * builtin.b == pytest.approx(math.pi * builtin.hbar / 2, rel=1e-15)


@given(fraction=st.floats(min_value=-0.999, max_value=0.999))
def test_g_is_odd_and_inverts(fraction):
    for d in (make_deformation("kempf", beta=0.5), make_deformation("maxmomentum", beta=2.0),
              make_deformation("cutoff", b=4.0)):
        p = fraction * d.b
        assert float(d.g(-p)) == -float(d.g(p))
        assert float(d.g_inv(d.g(p))) == pytest.approx(p, abs=1e-9 * d.b)
        assert float(d.f(d.g(p))) > 0


def test_g_strictly_increasing(builtin):
    g = np.asarray(builtin.g(sample_grid(builtin, 201, fraction=0.999)))
    assert np.all(np.diff(g) > 0)


def test_square_difference_matches_naive(builtin):
    p = sample_grid(builtin, 51)
    p0 = 0.3 * (builtin.b if builtin.finite else 3.0)
    naive = np.asarray(builtin.g(p)) ** 2 - float(builtin.g(p0)) ** 2
    assert np.allclose(builtin.g_squared_minus(p, p0), naive, rtol=1e-10, atol=1e-12)
    assert np.allclose(builtin.g_prime(p), builtin.f(builtin.g(p)), rtol=1e-12)


def test_custom_deformation_validated():
    # sinh family: f(P) = sqrt(1 + P^2) on the whole line
    d = make_custom_deformation(lambda P: np.sqrt(1 + np.square(P)), np.sinh, np.arcsinh,
                                b=math.inf, a=math.inf)
    assert d.kind is Kind.CUSTOM
    with pytest.raises(ValueError):
        make_custom_deformation(lambda P: 1 + np.square(P), np.sinh, np.arcsinh, b=math.inf, a=math.inf)
