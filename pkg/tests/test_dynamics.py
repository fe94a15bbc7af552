import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from lindfringe.dynamics import (
    DegenerateSpectrumError,
    DomainError,
    CubicCoefficients,
    cubic_coefficients,
    evolve,
    evolve_vector,
    expm_taylor,
    intensity_evolve,
    intensity_general,
    intensity_perturbative,
    intensity_simple,
    intensity_standard,
    perturbative_frequency,
    propagator,
    propagator_eigen,
    propagator_series,
    solve_cubic,
    spectrum,
)
from lindfringe.generator import LindbladParams, build_generator, sample_cp_params
from lindfringe.state import BlochState, Orientation, Port, initial_state

from oracles import charpoly_by_determinants, companion_roots, rk4_propagators

seeds = st.integers(0, 2 ** 32 - 1)
times = st.floats(0.0, 3.0)


def test_cubic_coefficients_zero():
    assert tuple(cubic_coefficients(LindbladParams())) == (0.0, 0.0, 0.0)


@given(seeds)
def test_cubic_coefficients_match_determinants(seed):
    p = sample_cp_params(seed, scale=2.0)
    r, s, w = cubic_coefficients(p)
    ro, so, wo = charpoly_by_determinants(build_generator(p))
    scale = max(1.0, np.abs(build_generator(p)).max())
    assert r == pytest.approx(ro, abs=1e-10 * scale)
    assert s == pytest.approx(so, abs=1e-10 * scale ** 2)
    assert w == pytest.approx(wo, abs=1e-10 * scale ** 3)


def test_triple_zero_root_flagged():
    spec = solve_cubic(CubicCoefficients(0.0, 0.0, 0.0))
    assert np.all(np.asarray(spec.roots) == 0) and spec.degenerate


def test_weak_coupling_roots():
    a, om = 0.7, 2.5
    roots = spectrum(LindbladParams.weak_coupling(a, om)).roots
    expected = [0, a + 1j * om, a - 1j * om]
    assert sorted(roots, key=lambda z: (z.real, z.imag)) == pytest.approx(
        sorted(expected, key=lambda z: (z.real, z.imag)), abs=1e-13)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50))
def test_cubic_roots_match_companion_matrix(r, s, w):
    spec = solve_cubic(CubicCoefficients(r, s, w))
    oracle = companion_roots(r, s, w)
    scale = max(1.0, np.abs(oracle).max())
    # match each oracle root to its nearest computed root
    for z in oracle:
        assert np.min(np.abs(np.asarray(spec.roots) - z)) <= 1e-9 * scale or spec.degenerate


@given(seeds)
def test_complex_pair_is_conjugate(seed):
    spec = spectrum(sample_cp_params(seed, omega_scale=10.0))
    roots = np.asarray(spec.roots)
    if np.any(roots.imag != 0):
        assert sorted(roots.imag) == pytest.approx(sorted(-roots.imag), abs=0)


def test_propagator_examples():
    p = sample_cp_params(3)
    assert np.allclose(propagator_eigen(p, 0.0), np.eye(3), atol=1e-14)
    assert np.array_equal(propagator_series(p, 0.0), np.eye(3))
    ts = np.linspace(0, 10, 5)
    assert np.array_equal(propagator_eigen(LindbladParams(), ts), np.broadcast_to(np.eye(3), (5, 3, 3)))


def test_eigen_defers_on_degenerate_spectrum():
    iso = LindbladParams(a=1.0, alpha=1.0, gamma=1.0)
    with pytest.raises(DegenerateSpectrumError):
        propagator_eigen(iso, 1.0)
    with pytest.raises(DegenerateSpectrumError):
        intensity_general(iso, 0.3, 1.0)
    expected = np.exp(-2.0) * np.eye(3)
    assert np.allclose(propagator(iso, 1.0), expected, atol=1e-15)


def test_three_routes_agree_on_sample():
    rng = np.random.default_rng(11)
    ps = [sample_cp_params(rng, scale=1.0, omega_scale=5.0) for _ in range(40)]
    ts = rng.uniform(0, 2, size=len(ps))
    oracle = rk4_propagators([build_generator(p) for p in ps], ts)
    for p, t, m_ode in zip(ps, ts, oracle):
        m_series = propagator_series(p, t)
        assert np.abs(m_series - m_ode).max() < 1e-8
        try:
            m_eig = propagator_eigen(p, t)
        except DegenerateSpectrumError:
            continue
        assert np.abs(m_eig - m_ode).max() < 1e-8


def test_expm_taylor_analytic_blocks():
    # rotation block with a nilpotent coupling into the third axis
    w, k, d = 1.3, 0.7, -0.4
    a = np.array([[d, w, 0.0], [-w, d, 0.0], [0.0, 0.0, d]])
    a_nil = np.array([[0.0, 0.0, k], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    for t in (0.0, 0.5, 3.0, 40.0):
        got = expm_taylor(t * a)
        rot = np.exp(d * t) * np.array([[math.cos(w * t), math.sin(w * t), 0],
                                        [-math.sin(w * t), math.cos(w * t), 0], [0, 0, 1]])
        assert np.allclose(got, rot, atol=1e-12 * max(1, np.exp(d * t)))
        # the nilpotent part commutes with d*I only; check exp(t*(d I + N)) = e^{dt}(I + tN)
        got = expm_taylor(t * (d * np.eye(3) + a_nil))
        assert np.allclose(got, np.exp(d * t) * (np.eye(3) + t * a_nil), atol=1e-13)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 20.0))
def test_expm_taylor_matches_scipy(seed, norm):
    a = np.random.default_rng(seed).normal(size=(3, 3))
    a *= norm / max(np.abs(a).max(), 1e-300)
    ref = scipy.linalg.expm(a)
    assert np.allclose(expm_taylor(a), ref, rtol=1e-11, atol=1e-13 * np.abs(ref).max())


@given(seeds, times, times)
def test_semigroup(seed, s, t):
    p = sample_cp_params(seed)
    lhs = propagator(p, s + t)
    rhs = propagator(p, s) @ propagator(p, t)
    assert np.allclose(lhs, rhs, atol=1e-12)


@given(seeds, times, st.sampled_from(list(Orientation)))
def test_evolution_contracts(seed, t, orientation):
    p = sample_cp_params(seed, scale=2.0, omega_scale=5.0)
    s0 = initial_state(orientation)
    assert evolve(s0, p, t).norm <= s0.norm + 1e-12


@given(seeds, times, st.floats(0, 0.5), st.floats(0, 2 * math.pi), st.floats(0, math.pi))
def test_pure_states_stay_in_ball(seed, t, r, phi, th):
    p = sample_cp_params(seed, scale=2.0)
    v = r * np.array([math.sin(th) * math.cos(phi), math.sin(th) * math.sin(phi), math.cos(th)])
    assert np.linalg.norm(evolve_vector(v, p, t)) <= 0.5 + 1e-12


def test_evolve_examples():
    s0 = BlochState(0.1, -0.2, 0.3)
    p = sample_cp_params(1)
    assert np.allclose(evolve(s0, p, 0.0).as_array(), s0.as_array(), atol=1e-15)
    assert evolve(s0, LindbladParams(), 7.0) == s0
    with pytest.raises(ValueError):
        evolve(s0, p, -1.0)


def test_weak_coupling_evolution():
    al, om, t = 0.3, 1.7, 0.9
    s = evolve(initial_state(), LindbladParams.weak_coupling(al, om), t)
    damp = 0.5 * math.exp(-2 * al * t)
    assert s.r1 == pytest.approx(damp * math.cos(2 * om * t), abs=1e-14)
    assert s.r2 == pytest.approx(damp * math.sin(2 * om * t), abs=1e-14)
    assert s.r3 == pytest.approx(0.0, abs=1e-15)


def test_general_intensity_standard_limit():
    theta = np.linspace(-7, 7, 101)
    for port in Port:
        got = intensity_general(LindbladParams(), theta, 2.0, port)
        assert np.abs(got - intensity_standard(theta, port)).max() <= 1e-15


@given(st.floats(0, 3), st.floats(0.1, 5), st.floats(-10, 10), times, st.sampled_from(list(Port)))
def test_general_matches_closed_form_when_gamma_zero(al, om, theta, t, port):
    p = LindbladParams.weak_coupling(al, om)
    assert intensity_general(p, theta, t, port) == pytest.approx(
        intensity_simple(al, om, theta, t, port), abs=1e-12)


@settings(max_examples=200)
@given(seeds, st.floats(-10, 10), times, st.sampled_from(list(Port)))
def test_general_matches_series_evolution(seed, theta, t, port):
    p = sample_cp_params(seed, scale=1.0, omega_scale=4.0)
    try:
        got = intensity_general(p, theta, t, port)
    except DegenerateSpectrumError:
        return
    v = propagator_series(p, t) @ initial_state().as_array()
    ref = 0.5 + port.sign * (math.cos(theta) * v[0] + math.sin(theta) * v[1])
    assert got == pytest.approx(ref, abs=1e-9)


def test_general_intensity_limit_reduction():
    p = sample_cp_params(8, omega_scale=1.0)
    theta = np.linspace(0, 2 * math.pi, 9)
    devs = []
    for eps in (1e-1, 1e-2, 1e-3):
        q = p.scaled(eps, include_omega=True)
        devs.append(np.abs(intensity_general(q, theta, 1.0) - intensity_standard(theta)).max())
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 1e-2


def test_simple_examples():
    assert intensity_simple(0.0, 0.0, 0.0, 0.0) == 1.0
    theta = np.linspace(0, 6, 13)
    assert np.allclose(intensity_simple(0, 0, theta, 5.0, "-"), 0.5 * (1 - np.cos(theta)), atol=0)
    t, om = 0.8, 1.1
    al = math.log(2) / (2 * t)
    assert intensity_simple(al, om, 2 * om * t, t) == pytest.approx(0.75, abs=1e-15)


@settings(max_examples=200)
@given(seeds, st.floats(-10, 10), times)
def test_perturbative_exact_for_block_generator(seed, theta, t):
    rng = np.random.default_rng(seed)
    p = sample_cp_params(rng, scale=0.5, block=True)
    bound = math.sqrt(p.b ** 2 + (p.alpha - p.a) ** 2 / 4)
    p = p.replace(omega=rng.choice([-1, 1]) * rng.uniform(1.2 * bound + 0.05, 3.0 + bound))
    ref = intensity_evolve(p, theta, t)
    assert intensity_perturbative(p, theta, t) == pytest.approx(ref, abs=1e-9)


def test_perturbative_without_dissipation_is_closed_form():
    theta = np.linspace(-4, 4, 17)
    om = 1.9
    for t in (0.0, 0.4, 2.2):
        got = intensity_perturbative(LindbladParams(omega=om), theta, t)
        assert np.allclose(got, intensity_simple(0.0, om, theta, t), atol=1e-15)


def test_perturbative_at_time_zero():
    p = LindbladParams(a=0.02, b=0.01, c=0.01, alpha=0.03, beta=0.005, gamma=0.04, omega=3.0)
    theta = np.linspace(0, 6, 7)
    assert np.allclose(intensity_perturbative(p, theta, 0.0, "-"), intensity_standard(theta, "-"), atol=1e-15)


def test_perturbative_domain():
    with pytest.raises(DomainError):
        perturbative_frequency(LindbladParams(a=1.0, alpha=1.0, gamma=2.0, b=0.5, omega=0.1))


def test_perturbative_error_is_third_order():
    # c and beta enter at second order; halving all dissipative terms cuts the error by ~8
    base = LindbladParams(a=1.0, b=0.3, c=0.4, alpha=1.2, beta=-0.35, gamma=1.1, omega=10.0)
    theta = np.linspace(0, 2 * math.pi, 25)
    t = 0.37

    def err(eps):
        q = base.scaled(eps)
        return np.abs(intensity_perturbative(q, theta, t) - intensity_evolve(q, theta, t)).max()

    ratio = err(0.04) / err(0.02)
    assert 6.0 < ratio < 10.0
