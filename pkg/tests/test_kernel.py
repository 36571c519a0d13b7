import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import RHO_SI, fresnel_oracle, parratt_oracle, random_structure
from refl.kernel import (
    Layer,
    LayeredStructure,
    NumericalError,
    ReflectivityCurve,
    UnsupportedModelError,
    check_q,
    critical_edge,
    dynamical_reflectivity,
    fresnel_coefficient,
    kinematic_reflectivity,
    layer_wavevector,
    sld_profile,
)

Q_C = 4 * math.sqrt(math.pi * RHO_SI)


# -- types -------------------------------------------------------------------

def test_layer_validation():
    with pytest.raises(ValueError):
        Layer(thickness=-1)
    with pytest.raises(ValueError):
        Layer(roughness=-0.1)
    with pytest.raises(ValueError):
        Layer(sld=float("nan"))


def test_structure_needs_two_layers():
    with pytest.raises(ValueError):
        LayeredStructure((Layer(),))


def test_semi_infinite_media_ignore_thickness():
    s = LayeredStructure((Layer(50, 0, 4), Layer(20, 1e-6, 2), Layer(70, 2e-6, 1)))
    assert s.thickness.tolist() == [0, 20, 0]
    assert s.roughness.tolist() == [0, 2, 1]
    assert s.interface_depths().tolist() == [0, 20]


@pytest.mark.parametrize("bad", [[], [0.0, 0.1], [0.1, 0.05], [0.1, 0.1], [0.1, np.inf]])
def test_check_q_rejects(bad):
    with pytest.raises(ValueError):
        check_q(bad)


def test_curve_lengths_must_match():
    with pytest.raises(ValueError):
        ReflectivityCurve([0.1, 0.2], [1.0])
    with pytest.raises(ValueError):
        ReflectivityCurve([0.1, 0.2], [1.0, 0.5], [0.1, 0.0])


# -- layer_wavevector --------------------------------------------------------

def test_wavevector_zero_contrast():
    assert layer_wavevector(0.05, 1e-6, 1e-6) == 0.05 + 0j


def test_wavevector_si():
    expected = math.sqrt(0.05 ** 2 - 4 * math.pi * RHO_SI)
    k = layer_wavevector(0.05, RHO_SI, 0.0)
    assert k.real == pytest.approx(expected, rel=1e-14)
    assert k.imag == 0
    assert k.real == pytest.approx(0.049739, abs=5e-7)


def test_wavevector_below_edge_is_imaginary():
    assert 0.004 < critical_edge(RHO_SI)
    k = layer_wavevector(0.002, RHO_SI, 0.0)
    assert k.real == pytest.approx(0.0, abs=1e-18)
    assert k.imag > 0
    assert k.imag == pytest.approx(math.sqrt(4 * math.pi * RHO_SI - 0.002 ** 2), rel=1e-12)


def test_critical_edge_value():
    assert critical_edge(RHO_SI) == pytest.approx(1.021e-2, abs=1e-5)


# -- fresnel_coefficient -----------------------------------------------------

@pytest.mark.parametrize("sigma", [0.0, 3.0, 50.0])
def test_fresnel_no_contrast(sigma):
    assert fresnel_coefficient(0.03 + 0j, 0.03 + 0j, sigma) == 0


def test_fresnel_sharp_value():
    k1 = 0.049739
    r = fresnel_coefficient(0.05, k1, 0.0)
    assert r.real == pytest.approx((0.05 - k1) / (0.05 + k1), rel=1e-12)
    assert r.real == pytest.approx(2.617e-3, rel=1e-3)
    # single-interface oracle: R = |r|^2
    k1_exact = layer_wavevector(0.05, RHO_SI, 0.0)
    assert abs(fresnel_coefficient(0.05, k1_exact)) ** 2 == pytest.approx(
        fresnel_oracle([0.1], RHO_SI)[0], rel=1e-12)


def test_fresnel_roughness_damps_monotonically():
    sigmas = np.linspace(0, 100, 50)
    mags = np.abs([fresnel_coefficient(0.05, 0.049739, s) for s in sigmas])
    assert np.all(np.diff(mags) < 0)
    assert mags[-1] < 1e-6 * mags[0]


def test_fresnel_degenerate():
    with pytest.raises(ValueError):
        fresnel_coefficient(0j, 0j)


# -- dynamical_reflectivity --------------------------------------------------

def test_zero_contrast_is_zero():
    s = LayeredStructure((Layer(0, 2e-6, 0), Layer(0, 2e-6, 0)))
    assert np.all(dynamical_reflectivity(s, np.linspace(0.01, 0.3, 50)).r == 0)


def test_bare_si_matches_fresnel(bare_si):
    q = np.linspace(0.005, 0.3, 300)
    r = dynamical_reflectivity(bare_si, q).r
    np.testing.assert_allclose(r, fresnel_oracle(q, RHO_SI), rtol=1e-10)
    assert np.all(np.abs(r[q <= Q_C] - 1) < 1e-9)


def test_matches_parratt_oracle():
    rng = np.random.default_rng(7)
    q = np.geomspace(0.003, 0.4, 40)
    for _ in range(40):
        s = random_structure(rng)
        np.testing.assert_allclose(
            dynamical_reflectivity(s, q).r,
            parratt_oracle(q, s.thickness, s.sld, s.roughness),
            rtol=1e-9, atol=1e-300,
        )


def test_zero_thickness_layer_is_invisible():
    rng = np.random.default_rng(3)
    q = np.linspace(0.005, 0.3, 200)
    for _ in range(20):
        s = random_structure(rng, rough=False)
        ref = dynamical_reflectivity(s, q).r
        for pos in range(1, len(s)):
            layers = s.layers[:pos] + (Layer(0.0, float(rng.uniform(-2e-6, 1e-5)), 0.0),) + s.layers[pos:]
            new = dynamical_reflectivity(LayeredStructure(layers), q).r
            np.testing.assert_allclose(new, ref, rtol=1e-12, atol=1e-300)


def test_kiessig_period():
    d = 200.0
    s = LayeredStructure((Layer(0, 0, 0), Layer(d, 4.5e-6, 0), Layer(0, RHO_SI, 0)))
    q = np.linspace(0.1, 0.3, 20001)
    r = dynamical_reflectivity(s, q).r
    idx = np.flatnonzero((r[1:-1] < r[:-2]) & (r[1:-1] < r[2:])) + 1
    spacing = np.diff(q[idx])
    assert spacing.size >= 5
    np.testing.assert_allclose(spacing, 2 * np.pi / d, rtol=0.02)


def test_overflow_is_reported():
    s = LayeredStructure((Layer(0, 0, 0), Layer(1e6, 1e-5, 0), Layer(0, 0, 0)))
    with pytest.raises(NumericalError) as info:
        dynamical_reflectivity(s, [0.001, 0.002, 0.5])
    assert 0.001 in info.value.q
    assert 0.5 not in info.value.q


@st.composite
def structures(draw, rough=True):
    n = draw(st.integers(2, 8))
    sld = draw(st.lists(st.floats(-1e-6, 1e-5), min_size=n, max_size=n))
    d = draw(st.lists(st.floats(0, 500), min_size=n, max_size=n))
    s = draw(st.lists(st.floats(0, 20) if rough else st.just(0.0), min_size=n, max_size=n))
    return LayeredStructure.from_arrays(d, sld, s)


@given(structures())
def test_reflectivity_bounded(structure):
    q = np.geomspace(1e-4, 0.5, 200)
    r = dynamical_reflectivity(structure, q).r
    assert np.all(r >= 0)
    assert np.all(r <= 1 + 1e-12)


@given(st.floats(1e-7, 1e-5), st.floats(-1e-6, 1e-6))
def test_total_reflection(rho_sub, rho_amb):
    s = LayeredStructure((Layer(0, rho_amb, 0), Layer(0, rho_amb + rho_sub, 0)))
    qc = critical_edge(rho_sub)
    q = np.linspace(qc * 1e-3, qc * (1 - 1e-6), 100)
    r = dynamical_reflectivity(s, q).r
    assert np.all(np.abs(r - 1) < 1e-9)


@given(st.floats(1e-7, 1e-5))
def test_fresnel_equivalence_above_edge(rho):
    s = LayeredStructure((Layer(0, 0, 0), Layer(0, rho, 0)))
    qc = critical_edge(rho)
    q = np.linspace(qc / 2, 30 * qc, 200)
    np.testing.assert_allclose(dynamical_reflectivity(s, q).r, fresnel_oracle(q, rho), rtol=1e-10)


@given(structures(), st.data())
def test_layer_split_invariance(structure, data):
    n = len(structure)
    if n < 3:
        structure = LayeredStructure(structure.layers[:1] + (Layer(120.0, 4e-6, 2.0),) + structure.layers[1:])
        n = 3
    i = data.draw(st.integers(1, n - 2))
    frac = data.draw(st.floats(0.0, 1.0))
    layer = structure.layers[i]
    top = Layer(layer.thickness * frac, layer.sld, layer.roughness)
    bottom = Layer(layer.thickness - top.thickness, layer.sld, 0.0)
    split = LayeredStructure(structure.layers[:i] + (top, bottom) + structure.layers[i + 1:])
    q = np.geomspace(1e-3, 0.4, 100)
    np.testing.assert_allclose(dynamical_reflectivity(split, q).r,
                               dynamical_reflectivity(structure, q).r, rtol=1e-10, atol=1e-300)


def test_sigma_continuity(film_on_si):
    q = np.linspace(0.005, 0.3, 300)
    sharp = LayeredStructure(tuple(Layer(l.thickness, l.sld, 0.0) for l in film_on_si.layers))
    tiny = LayeredStructure(tuple(Layer(l.thickness, l.sld, 1e-6) for l in film_on_si.layers))
    np.testing.assert_allclose(dynamical_reflectivity(tiny, q).r,
                               dynamical_reflectivity(sharp, q).r, rtol=1e-6)


# -- kinematic_reflectivity --------------------------------------------------

def test_kinematic_bare_si(bare_si):
    q = np.array([0.1])
    r = kinematic_reflectivity(bare_si, q).r[0]
    assert r == pytest.approx(16 * math.pi ** 2 * RHO_SI ** 2 / 0.1 ** 4, rel=1e-12)
    assert r == pytest.approx(6.79e-6, rel=1e-3)


def test_kinematic_breakdown(bare_si):
    q_break = math.sqrt(4 * math.pi * RHO_SI)
    assert q_break == pytest.approx(5.105e-3, abs=1e-6)
    q = np.linspace(1e-4, 0.3, 3000)
    r = kinematic_reflectivity(bare_si, q).r
    assert np.all(r[q < q_break] > 1)
    assert np.all(r[q > q_break] < 1)


def test_kinematic_zero_contrast():
    s = LayeredStructure((Layer(0, 1e-6, 0), Layer(30, 1e-6, 0), Layer(0, 1e-6, 0)))
    assert np.all(kinematic_reflectivity(s, [0.01, 0.1]).r == 0)


def test_kinematic_rejects_roughness(film_on_si):
    with pytest.raises(UnsupportedModelError):
        kinematic_reflectivity(film_on_si, [0.1])


def test_kinematic_two_steps_closed_form():
    # one layer: amplitude rho1 + (rho2 - rho1) exp(-i q d)
    rho1, rho2, d = 4e-6, RHO_SI, 150.0
    s = LayeredStructure((Layer(0, 0, 0), Layer(d, rho1, 0), Layer(0, rho2, 0)))
    q = np.linspace(0.05, 0.3, 30)
    amp = rho1 + (rho2 - rho1) * np.exp(-1j * q * d)
    expected = 16 * np.pi ** 2 / q ** 4 * np.abs(amp) ** 2
    np.testing.assert_allclose(kinematic_reflectivity(s, q).r, expected, rtol=1e-12)


def test_kinematic_agrees_with_dynamical_far_above_edge(bare_si):
    q = np.linspace(10 * Q_C, 0.5, 200)
    kin = kinematic_reflectivity(bare_si, q).r
    dyn = dynamical_reflectivity(bare_si, q).r
    assert np.all(np.abs(kin - dyn) / dyn < 0.05)


# -- sld_profile -------------------------------------------------------------

def test_profile_heaviside(bare_si):
    prof = sld_profile(bare_si, 401)
    assert np.all(prof.rho[prof.z < 0] == 0)
    assert np.all(prof.rho[prof.z >= 0] == RHO_SI)
    assert prof.z[0] == -40 and prof.z[-1] == 40


def test_profile_single_layer_steps():
    s = LayeredStructure((Layer(0, 0, 0), Layer(100, 4e-6, 0), Layer(0, RHO_SI, 0)))
    prof = sld_profile(s, 1001)
    assert np.all(np.diff(prof.z) > 0)
    jumps = prof.z[1:][np.diff(prof.rho) != 0]
    assert len(jumps) == 2
    assert jumps[0] == pytest.approx(0, abs=0.2)
    assert jumps[1] == pytest.approx(100, abs=0.2)


def test_profile_rough_midpoint(film_on_si):
    sigma = 3.0
    s = LayeredStructure((Layer(0, 0, 0), Layer(200, 4e-6, sigma), Layer(0, RHO_SI, sigma)))
    prof = sld_profile(s, 2801)
    for z0, lo, hi in [(0.0, 0.0, 4e-6), (200.0, 4e-6, RHO_SI)]:
        assert np.interp(z0, prof.z, prof.rho) == pytest.approx(0.5 * (lo + hi), rel=1e-9)
    assert prof.rho[0] == pytest.approx(0.0, abs=1e-15)
    assert prof.rho[-1] == pytest.approx(RHO_SI, rel=1e-9)


def test_profile_needs_points(bare_si):
    with pytest.raises(ValueError):
        sld_profile(bare_si, 1)
