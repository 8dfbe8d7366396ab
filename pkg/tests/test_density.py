import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svdensity import density as d
from svdensity.jets import jet_var
from svdensity.spectrum import SingularSpectrum

SQUARES = (1, 4, 9, 16, 25)


def distinct_spectra(min_n=2, max_n=8):
    return st.lists(st.floats(min_value=0.1, max_value=100.0), min_size=min_n, max_size=max_n,
                    unique=True).filter(
        lambda g: min(abs(a - b) for a in g for b in g if a != b) > 1e-2 * max(g)
        if len(g) > 1 else True)


# ---------------------------------------------------------------- F_minus


def test_f_minus_hand_values():
    assert d.f_minus((1, 4), 0, 2.0) == pytest.approx(2 / 3, abs=1e-15)
    assert d.f_minus((1, 4), 1, 2.0) == pytest.approx(-2 / 3, abs=1e-15)


def test_f_minus_single_value():
    assert d.f_minus((3.0,), 0, 1.0) == 0.0


def test_f_minus_rejects_duplicates():
    with pytest.raises(d.DegenerateSpectrumError):
        d.f_minus((1, 2, 2), 0, 1.5)


@given(distinct_spectra(), st.floats(min_value=0.05, max_value=150.0))
def test_f_minus_antisymmetric_sum_vanishes(g, s):
    terms = [d.f_minus(g, i, s) for i in range(len(g))]
    scale = max(1.0, math.fsum(abs(t) for t in terms))
    assert abs(math.fsum(terms)) <= 1e-10 * scale


# ---------------------------------------------------------------- F_Delta


def test_f_delta_sum_hand_values():
    assert d.f_delta_sum((1, 4), 1, 2.0) == pytest.approx(2 / 3, abs=1e-15)
    assert d.f_delta_sum((1, 4), 1, 4.0) == pytest.approx(5 / 12, abs=1e-15)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.05, 20))
def test_f_delta_sum_two_by_two_symbolic(a, b, s):
    if abs(a - b) < 1e-3:
        return
    g1, g2 = sorted((a, b))
    expected = (1 + g1 * g2 / s**2) / (g2 - g1)
    assert d.f_delta_sum((g1, g2), 1, s) == pytest.approx(expected, rel=1e-12)


def test_f_delta_quad_hand_value():
    assert d.f_delta_quad((1, 4), 1, 2.0) == pytest.approx(2 / 3, abs=1e-8)


@pytest.mark.parametrize("s", [2, 7, 13, 20])
def test_f_delta_quad_squares(s):
    for i in range(5):
        a = d.f_delta_sum(SQUARES, i, s)
        b = d.f_delta_quad(SQUARES, i, s)
        assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


def test_two_by_two_integral_literal():
    # the N = 2 integral over t in [0, inf), written out by hand
    from scipy.integrate import quad
    g1, g2, s = 1.0, 4.0, 2.0
    val, _ = quad(lambda t: 2 / (1 + t) ** 4 * (1 + t * g1 / s) * (2 - t + (g2 / s) * (2 * t - 1)),
                  0, np.inf, epsabs=1e-13)
    assert val / (g2 - g1) == pytest.approx(2 / 3, abs=1e-10)


@given(distinct_spectra(max_n=7), st.floats(0.0, 1.0), st.data())
def test_sum_and_quad_agree(g, frac, data):
    g = sorted(g)
    s = g[0] * 0.5 + frac * (g[-1] * 1.2)
    i = data.draw(st.integers(0, len(g) - 1))
    a = d.f_delta_sum(g, i, s)
    b = d.f_delta_quad(g, i, s)
    assert abs(a - b) <= 1e-8 * max(1.0, abs(a))


# ---------------------------------------------------------------- psi


def test_psi_hand_value():
    v = d.psi((1, 4), 2.0)
    assert v.continuous == pytest.approx(1 / 3, abs=1e-15)
    assert v.atom_at_origin == 0.0


@pytest.mark.parametrize("s", [0.5, 9.0, 0.999, 4.001])
def test_psi_outside_support(s):
    assert d.psi_value((1, 4), s) == 0.0


@pytest.mark.parametrize("s", [0.0, -1.0, float("nan")])
def test_psi_rejects_bad_s(s):
    with pytest.raises(ValueError):
        d.psi_value((1, 4), s)


def test_psi_boundary_sides():
    # at s = g_1 the lower limit is 0 and the upper limit is (1 + 4)/6
    assert d.psi_value((1, 4), 1.0, side="lo") == 0.0
    assert d.psi_value((1, 4), 1.0, side="hi") == pytest.approx(5 / 6)
    assert d.psi_value((1, 4), 1.0) == pytest.approx(5 / 12)
    assert d.psi_value((1, 4), 4.0, side="lo") == pytest.approx(5 / 24)
    assert d.psi_value((1, 4), 4.0, side="hi") == 0.0
    with pytest.raises(ValueError):
        d.psi_value((1, 4), 2.0, side="up")


def test_psi_interior_boundary_average_is_continuous():
    g = (1, 3, 4, 8, 11)
    lo = d.psi_value(g, 4.0, side="lo")
    hi = d.psi_value(g, 4.0, side="hi")
    assert lo == pytest.approx(hi, rel=1e-12)
    assert d.psi_value(g, 4.0 + 1e-7) == pytest.approx(hi, rel=1e-5)


def test_psi_sum_form_sign():
    assert d.psi_sum_form((1, 4), 2.0) == pytest.approx(-1 / 3, abs=1e-15)
    assert d.psi_sum_form((1, 4), 0.5) == 0.0
    assert d.psi_sum_form((1, 4), 5.0) == 0.0


@given(distinct_spectra(), st.floats(0.0, 1.0))
def test_sum_form_matches_psi_up_to_sign(g, frac):
    g = sorted(g)
    s = g[0] + frac * (g[-1] - g[0])
    if any(abs(s - v) < 1e-6 * v for v in g):
        return
    # the sum form adds N antisymmetric terms that cancel, so its error scales with them
    scale = math.fsum(abs(d.f_minus(g, i, s)) + abs(d.f_delta_sum(g, i, s)) for i in range(len(g)))
    assert abs(abs(d.psi_sum_form(g, s)) - d.psi_value(g, s)) <= 1e-12 * max(1.0, scale)


def test_scalar_spectrum_has_no_continuous_part():
    assert d.psi_value((2, 2, 2), 2.0) == 0.0
    assert d.psi_value((2, 2, 2), 1.0) == 0.0
    assert d.normalization((2, 2, 2)) == 0.0


# ---------------------------------------------------------------- blocks


def test_f_kn_reduces_to_f_delta_sum():
    g = (1.0, 2.0, 5.0)
    for k in range(3):
        jet = d.f_kn(g, k, 0, 0, jet_var(g[k], 0), 1.5)
        assert jet.value == pytest.approx(d.f_delta_sum(g, k, 1.5), rel=1e-14)


def test_f_kn_derivative_matches_finite_difference():
    spec = SingularSpectrum((1, 2, 2, 5))
    s, h = 1.5, 1e-5
    jet = d.f_kn(spec, 1, 1, 0, jet_var(2.0, 1), s)
    plus = d.f_kn(spec, 1, 1, 0, jet_var(2.0 + h, 1), s).value
    minus = d.f_kn(spec, 1, 1, 0, jet_var(2.0 - h, 1), s).value
    assert jet.derivative(1) == pytest.approx((plus - minus) / (2 * h), rel=1e-6)


@given(st.floats(0.2, 5), st.floats(0.05, 5), st.integers(2, 6))
def test_f_kn_top_term_is_single_l(g, s, n):
    # n = N - 1 on a full block leaves only the l = N - 1 term
    jet = d.f_kn([g] * n, 0, n - 1, n - 1, jet_var(g, 0), s)
    expected = (g - s) ** (n - 2) * (n - 1) * g / s**n
    assert jet.value == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_f_kn_errors():
    with pytest.raises(ValueError):
        d.f_kn((1, 2, 2, 5), 1, 1, 0, jet_var(2.0, 0), 1.5)
    with pytest.raises(IndexError):
        d.f_kn((1, 2, 2, 5), 3, 1, 0, jet_var(5.0, 1), 1.5)
    with pytest.raises(ValueError):
        d.f_kn((1, 2, 2, 5), 1, 1, 2, jet_var(2.0, 1), 1.5)


def test_f_delta_block_singleton_equals_sum():
    assert d.f_delta_block((1, 4), (1, 0), 2.0) == pytest.approx(d.f_delta_sum((1, 4), 1, 2.0), rel=1e-14)


def test_f_delta_block_rejects_mixed_block():
    with pytest.raises(ValueError):
        d.f_delta_block((1, 2, 3), (0, 1), 0.5)


def test_block_path_reproduces_rank_one_shape():
    from svdensity.special import psi_rank_one
    g1, g, n = 0.5, 2.0, 5
    spec = [g1] + [g] * (n - 1)
    for s in np.linspace(0.6, 1.95, 12):
        block = d.f_delta_block(spec, (1, n - 2), s) / n
        assert block == pytest.approx(psi_rank_one(g1, g, n, s), rel=1e-10)


@pytest.mark.parametrize("s", [1.5, 3.0])
def test_perturbation_converges_to_block(s):
    block = d.psi_value((1, 2, 2, 5), s)
    errs = [abs(d.psi_value((1, 2, 2 + e, 5), s) - block) for e in (1e-2, 1e-3, 1e-4)]
    for big, small in zip(errs, errs[1:]):
        assert 5 < big / small < 20


def test_degenerate_spectrum_normalizes():
    assert d.normalization((2, 2, 5)) == pytest.approx(1.0, abs=1e-10)
    assert d.normalization((1, 3, 3, 3, 7, 7)) == pytest.approx(1.0, abs=1e-9)


# ---------------------------------------------------------------- radial and normalization


def test_radial_examples():
    assert d.psi_radial((1, 4), math.sqrt(2)) == pytest.approx(2 * math.sqrt(2) / 3, rel=1e-14)
    assert d.psi_radial((1, 4), 0.5) == 0.0
    from svdensity.quadrature import integrate_pieces
    mass, _ = integrate_pieces(lambda r: d.psi_radial(SQUARES, r), 1.0, 5.0, [2, 3, 4])
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_normalization_examples():
    assert d.normalization((1, 4)) == pytest.approx(1.0, abs=1e-10)
    assert d.normalization(SQUARES) == pytest.approx(1.0, abs=1e-8)
    spec = SingularSpectrum((0, 1))
    assert d.normalization(spec) == pytest.approx(0.5, abs=1e-10)
    assert spec.atom_at_origin == 0.5


def test_rank_deficient_two_by_two_is_uniform_on_disk():
    # g = (0, 1): the nonzero eigenvalue is u_22, uniform in the unit disk, so psi = 1/2 on (0, 1)
    for s in (0.1, 0.5, 0.9):
        assert d.psi_value((0, 1), s) == pytest.approx(0.5, rel=1e-12)


@settings(max_examples=15)
@given(st.lists(st.floats(-1, 2), min_size=2, max_size=8))
def test_normalization_random(logs):
    g = [10.0**x for x in logs]
    spec = SingularSpectrum(g)
    if spec.is_scalar:
        return
    assert d.normalization(spec) + spec.atom_at_origin == pytest.approx(1.0, abs=1e-8)


@settings(max_examples=25)
@given(distinct_spectra(), st.floats(0.2, 5.0), st.floats(0.0, 1.0))
def test_scaling_covariance(g, c, frac):
    g = sorted(g)
    s = g[0] + frac * (g[-1] - g[0])
    if s <= 0 or any(abs(s - v) < 1e-6 * v for v in g):
        return
    a = d.psi_value(g, s)
    b = c * d.psi_value([c * v for v in g], c * s)
    assert b == pytest.approx(a, rel=1e-10, abs=1e-14)


@given(distinct_spectra(), st.randoms(), st.floats(0.1, 100))
def test_permutation_invariance(g, rnd, s):
    h = list(g)
    rnd.shuffle(h)
    assert d.psi_value(h, s) == d.psi_value(g, s)


@settings(max_examples=10)
@given(distinct_spectra(2, 8))
def test_positivity(g):
    g = sorted(g)
    for s in np.linspace(g[0], g[-1], 101)[1:-1]:
        assert d.psi_value(g, float(s)) >= -1e-10


def test_continuity_at_interior_values():
    rnd = random.Random(11)
    g = sorted(rnd.uniform(1, 10) for _ in range(5))
    for gi in g[1:-1]:
        gaps = [abs(d.psi_value(g, gi * (1 + h)) - d.psi_value(g, gi * (1 - h))) for h in (1e-2, 1e-3, 1e-4)]
        for big, small in zip(gaps, gaps[1:]):
            assert 5 < big / small < 20


def test_three_by_three_derivative_kink():
    g = (1.0, 2.0, 4.0)
    h = 1e-5
    left = (d.psi_value(g, 2.0, "lo") - d.psi_value(g, 2.0 - h)) / h
    right = (d.psi_value(g, 2.0 + h) - d.psi_value(g, 2.0, "hi")) / h
    assert d.psi_value(g, 2.0, "lo") == pytest.approx(d.psi_value(g, 2.0, "hi"), rel=1e-12)
    assert abs(left - right) > 1e-2


def test_kink_points():
    assert d.kink_points((0, 1, 1, 3)) == [1.0, 3.0]
