"""Analytic reference solution: bump profile, extension, d'Alembert formula."""

import math

import numpy as np
import pytest

import wavebound as wb


# ---------------------------------------------------------------------------
# chi_bump


def test_chi_center():
    assert wb.chi_bump(0.0) == 1.0


def test_chi_support_edges_exactly_zero():
    # cos(pi/2) in binary64 is 6.1e-17, not 0; the zero branch must own the
    # boundary so that sampled Dirichlet data are exact zeros.
    assert wb.chi_bump(1.0) == 0.0
    assert wb.chi_bump(-1.0) == 0.0
    assert wb.chi_bump(1.5) == 0.0
    assert wb.chi_bump(-2.0) == 0.0


def test_chi_halfway_value():
    assert wb.chi_bump(0.5) == pytest.approx(2.0 ** -2.5, rel=1e-14)


def test_chi_even():
    for z in (0.1, 0.3, 0.77, 0.999):
        assert wb.chi_bump(-z) == wb.chi_bump(z)


def test_chi_range():
    zs = np.linspace(-1.2, 1.2, 1001)
    vals = [wb.chi_bump(z) for z in zs]
    assert min(vals) >= 0.0
    assert max(vals) == 1.0


# ---------------------------------------------------------------------------
# bump case


def test_bump_case_shape():
    case = wb.bump_case()
    assert case.c == 1.0
    assert (case.x_min, case.x_max) == (0.0, 1.0)
    assert case.p1 is None and case.s is None
    assert case.p0(0.5) == 1.0
    assert case.p0(0.375) == 0.0  # support edge
    assert case.p0(0.625) == 0.0
    assert case.p0(0.0) == 0.0 and case.p0(1.0) == 0.0


def test_bump_regularity_constants():
    r = wb.bump_case().regularity
    assert r.alpha3 == math.sqrt(2.0) / 2.0
    assert r.alpha4 == math.sqrt(2.0) / 2.0
    assert r.C3 == 5120.0 * math.sqrt(2.0)
    assert r.C4 == 409600.0 / 3.0


def test_case_requires_compatible_p0():
    with pytest.raises(ValueError):
        wb.AnalyticCase(c=1.0, x_min=0.0, x_max=1.0,
                        p0=lambda x: 1.0, p1=None, s=None,
                        regularity=wb.bump_case().regularity)


# ---------------------------------------------------------------------------
# antisymmetric extension


def test_extension_identity_on_domain():
    f = wb.bump_case().p0
    for x in (0.0, 0.25, 0.5, 0.8, 1.0):
        assert wb.antisym_extend(f, 0.0, 1.0, x) == f(x)


# Folding works through a float modulus, so the reflected argument is
# reconstructed exactly only when x is dyadic; generic x land within an
# ulp of the mirror point.  Exact identities below use dyadic points, the
# approximate variants use awkward ones.


def test_extension_odd_about_left_end():
    f = wb.bump_case().p0
    for x in (0.125, 0.4375, 0.5, 0.59375):
        assert wb.antisym_extend(f, 0.0, 1.0, -x) == -f(x)
    for x in (0.1, 0.45, 0.6):
        assert wb.antisym_extend(f, 0.0, 1.0, -x) == pytest.approx(
            -f(x), rel=1e-12, abs=1e-12)


def test_extension_odd_about_right_end():
    f = wb.bump_case().p0
    for x in (0.125, 0.4375, 0.5):
        assert wb.antisym_extend(f, 0.0, 1.0, 1.0 + x) == -f(1.0 - x)
    for x in (0.1, 0.45, 0.6):
        assert wb.antisym_extend(f, 0.0, 1.0, 1.0 + x) == pytest.approx(
            -f(1.0 - x), rel=1e-12, abs=1e-12)


def test_extension_periodic():
    f = wb.bump_case().p0
    for x in (-0.375, 0.25, 0.5625, 1.75):
        assert wb.antisym_extend(f, 0.0, 1.0, x + 2.0) == \
            wb.antisym_extend(f, 0.0, 1.0, x)


def test_extension_mirror_identity():
    # oddness about x_max: f~(2 - x) = -f~(x) for the whole extension
    f = wb.bump_case().p0
    for x in (0.125, 0.5, 0.875, 1.3125, -0.375):
        assert wb.antisym_extend(f, 0.0, 1.0, 2.0 - x) == \
            -wb.antisym_extend(f, 0.0, 1.0, x)


# ---------------------------------------------------------------------------
# d'Alembert evaluation, pure p0 case


def test_dalembert_initial_peak():
    case = wb.bump_case()
    assert wb.dalembert_eval(case, 0.5, 0.0) == 1.0


def test_dalembert_initial_row_is_p0():
    case = wb.bump_case()
    for x in (0.1, 0.4, 0.55, 0.9):
        assert wb.dalembert_eval(case, x, 0.0) == case.p0(x)


def test_dalembert_boundaries_stay_zero():
    case = wb.bump_case()
    for t in (0.0, 0.1, 0.25, 0.7, 1.3, 2.0):
        assert wb.dalembert_eval(case, 0.0, t) == 0.0
        assert wb.dalembert_eval(case, 1.0, t) == 0.0


def test_dalembert_center_empties_after_split():
    # at t = 0.125 the two half-bumps have just left the center
    case = wb.bump_case()
    assert wb.dalembert_eval(case, 0.5, 0.125) == 0.0


def test_dalembert_two_half_height_humps():
    case = wb.bump_case()
    assert wb.dalembert_eval(case, 0.25, 0.25) == 0.5
    assert wb.dalembert_eval(case, 0.75, 0.25) == 0.5
    # and nothing remains at the original center
    assert wb.dalembert_eval(case, 0.5, 0.25) == 0.0


def test_dalembert_periodicity_in_time():
    # antisymmetric extension has period 2L; with c = 1 the solution
    # returns exactly after t = 2 (and is even in t, so p(x, 2 - t)
    # equals p(x, t) as well).
    case = wb.bump_case()
    for x, t in ((0.25, 0.25), (0.4375, 0.0625), (0.625, 0.5)):
        assert wb.dalembert_eval(case, x, 2.0 - t) == \
            wb.dalembert_eval(case, x, t)
        assert wb.dalembert_eval(case, x, t + 2.0) == pytest.approx(
            wb.dalembert_eval(case, x, t), abs=1e-14)


def test_dalembert_rejects_outside_domain():
    case = wb.bump_case()
    with pytest.raises(ValueError):
        wb.dalembert_eval(case, -0.1, 0.0)
    with pytest.raises(ValueError):
        wb.dalembert_eval(case, 1.1, 0.0)
    with pytest.raises(ValueError):
        wb.dalembert_eval(case, 0.5, -0.01)


def test_dalembert_satisfies_wave_equation():
    # centered second differences with h = 1e-4: residual p_tt - c^2 p_xx
    # should vanish to O(h^2) times the fourth-derivative scale.
    case = wb.bump_case()
    h = 1e-4
    for x, t in ((0.45, 0.2), (0.52, 0.13), (0.6, 0.31), (0.5, 0.42)):
        ptt = (wb.dalembert_eval(case, x, t + h)
               - 2.0 * wb.dalembert_eval(case, x, t)
               + wb.dalembert_eval(case, x, t - h)) / (h * h)
        pxx = (wb.dalembert_eval(case, x + h, t)
               - 2.0 * wb.dalembert_eval(case, x, t)
               + wb.dalembert_eval(case, x - h, t)) / (h * h)
        assert abs(ptt - case.c ** 2 * pxx) <= 1e-3


# ---------------------------------------------------------------------------
# d'Alembert with velocity data and source (quadrature paths)


def _plain_regularity():
    return wb.Regularity(alpha3=1.0, C3=1.0, alpha4=1.0, C4=1.0)


def test_dalembert_velocity_mode_against_closed_form():
    # p1(x) = sin(pi x) is its own antisymmetric extension, and the exact
    # solution is sin(pi x) sin(pi t) / pi.
    case = wb.AnalyticCase(
        c=1.0, x_min=0.0, x_max=1.0,
        p0=lambda x: 0.0,
        p1=lambda x: math.sin(math.pi * x),
        s=None,
        regularity=_plain_regularity(),
    )
    for x, t in ((0.3, 0.8), (0.5, 0.25), (0.71, 1.4)):
        want = math.sin(math.pi * x) * math.sin(math.pi * t) / math.pi
        assert wb.dalembert_eval(case, x, t) == pytest.approx(want, abs=1e-9)


def test_dalembert_source_mode_against_closed_form():
    # s(x, t) = sin(pi x) sin(t) with c = 1: separation gives
    # p = sin(pi x) (pi sin t - sin(pi t)) / (pi (pi^2 - 1)).
    w = math.pi
    case = wb.AnalyticCase(
        c=1.0, x_min=0.0, x_max=1.0,
        p0=lambda x: 0.0,
        p1=None,
        s=lambda x, t: math.sin(math.pi * x) * math.sin(t),
        regularity=_plain_regularity(),
    )
    for x, t in ((0.3, 0.8), (0.6, 1.3)):
        want = math.sin(w * x) * (w * math.sin(t) - math.sin(w * t)) \
            / (w * (w * w - 1.0))
        assert wb.dalembert_eval(case, x, t) == pytest.approx(want, abs=1e-8)


# ---------------------------------------------------------------------------
# grid sampling


def test_sample_row_zero_is_p0_samples():
    case = wb.bump_case()
    g = wb.make_grid(0.0, 1.0, 10, 1.0, 0.09)
    row = wb.sample_row(case, g, 0)
    p0h = np.asarray(wb.sample_inputs(case, g).p0h)
    assert np.array_equal(row, p0h)


def test_sample_exact_boundary_rows_zero():
    case = wb.bump_case()
    g = wb.make_grid(0.0, 1.0, 10, 1.0, 0.09)
    f = wb.sample_exact(case, g)
    assert f.mode == "analytic"
    assert np.all(f.values[0, :] == 0.0)
    assert np.all(f.values[-1, :] == 0.0)
    assert f.values.shape == (11, g.k_max + 1)


def test_sample_inputs_boundary_compatibility_with_awkward_dx():
    # i_max = 7: x(7) = 7*(1/7) is one ulp off 1.0, but sampling takes the
    # boundary at the exact domain end, giving exact zeros.
    case = wb.bump_case()
    g = wb.make_grid(0.0, 1.0, 7, 1.0, 0.1)
    data = wb.sample_inputs(case, g)
    assert data.p0h[0] == 0.0
    assert data.p0h[-1] == 0.0
    data.validate(g)


def test_sample_inputs_bump_has_no_velocity_or_source():
    case = wb.bump_case()
    g = wb.make_grid(0.0, 1.0, 10, 1.0, 0.09)
    data = wb.sample_inputs(case, g)
    assert data.p1h is None
    assert data.sh is None
