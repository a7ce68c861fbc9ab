import math

import numpy as np
import pytest
from scipy.integrate import quad

from conftest import exact_evolved
from laguerre_scattering import (
    CoefficientModel,
    DomainError,
    ParameterError,
    UnsupportedFamilyError,
    WavePacketSpec,
    asymptotic_error,
    choose_truncation,
    envelope_fit,
    evolve,
    fourier_transform,
    hermite_propagator,
    jacobi_propagator,
    laguerre_propagator,
    prepare_state,
    universal_relation_check,
)
from laguerre_scattering.asympt import hermite_parseval_sum, propagate, psi

CHEB = CoefficientModel.free_chebyshev()
JAC_PACKET = WavePacketSpec(0.5, 0.3)


def test_psi_closed_form():
    assert psi(0.0) == pytest.approx(-1.0)
    assert psi(1.0) == pytest.approx(0.0)
    # psi'(xi) = arccos(xi)
    h = 1e-6
    assert (psi(0.4 + h) - psi(0.4 - h)) / (2 * h) == pytest.approx(math.acos(0.4), rel=1e-8)


def test_jacobi_propagator_approaches_exact_evolution():
    # no finite section: the reference is Phi^*(e^{-i lam t} g)
    errs = []
    for t in (50.0, 200.0, 800.0):
        N = int(1.2 * t) + 64
        ref = exact_evolved(CHEB, JAC_PACKET, t, N)
        errs.append(np.linalg.norm(ref - jacobi_propagator(0.5, 0.5, JAC_PACKET, t, N).state))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 0.15


def test_negative_times_mirror_positive_times():
    for t in (25.0, 50.0):
        assert asymptotic_error(CHEB, JAC_PACKET, -t) == pytest.approx(asymptotic_error(CHEB, JAC_PACKET, t), rel=1e-6)


def test_wrong_branch_is_far():
    good = asymptotic_error(CHEB, JAC_PACKET, 100.0)
    bad = asymptotic_error(CHEB, JAC_PACKET, 100.0, sign=-1)
    assert bad > 2 * good


def test_jacobi_propagator_vanishes_beyond_light_cone():
    st = jacobi_propagator(1.5, 0.5, JAC_PACKET, 50.0, 200)
    assert np.all(st.state[50:] == 0)
    assert st.window[1] < 50


def test_laguerre_propagator_norm_tracks_packet():
    # sum |t|^-2 |g(n/t^2)|^2 is a Riemann sum of int |g|^2
    st = laguerre_propagator(0.0, WavePacketSpec(1.0, 0.5), 60.0, 6000)
    assert np.linalg.norm(st.state) == pytest.approx(1.0, rel=1e-3)
    lo, hi = st.window
    assert 0.5 * 3600 <= lo and hi <= 1.5 * 3600


def test_laguerre_error_decreases_against_exact_evolution():
    m, pk = CoefficientModel.laguerre(0.0), WavePacketSpec(1.0, 0.5)
    errs = []
    for t in (10.0, 20.0):
        N = choose_truncation(m, pk, t)
        errs.append(np.linalg.norm(exact_evolved(m, pk, t, N) - laguerre_propagator(0.0, pk, t, N).state))
    assert errs[1] < errs[0]


def test_hermite_propagator_tracks_evolution():
    assert asymptotic_error(CoefficientModel.hermite(), WavePacketSpec(0.0, 1.0), 40.0) < 0.05
    st = hermite_propagator(WavePacketSpec(0.0, 1.0), -40.0, 1264)
    assert st.sign == -1


def test_fourier_transform_against_quad():
    g = WavePacketSpec(0.3, 1.2, 2.0)
    for x in (-3.0, 0.0, 4.5):
        re = quad(lambda lam: (np.exp(-1j * x * lam) * g(lam)).real, -0.9, 1.5, epsabs=1e-13)[0]
        im = quad(lambda lam: (np.exp(-1j * x * lam) * g(lam)).imag, -0.9, 1.5, epsabs=1e-13)[0]
        assert fourier_transform(g, x) == pytest.approx((re + 1j * im) / math.sqrt(2 * math.pi), abs=1e-12)


def test_fourier_transform_is_isometric():
    g = WavePacketSpec(0.0, 1.0, 1.0)
    x = np.linspace(-60, 60, 24001)
    val = np.sum(np.abs(fourier_transform(g, x)) ** 2) * (x[1] - x[0])
    assert val == pytest.approx(1.0, abs=1e-4)


def test_hermite_parseval_trend():
    pk = WavePacketSpec(0.0, 1.0)
    d25 = abs(hermite_parseval_sum(pk, 25.0) - 1.0)
    d50 = abs(hermite_parseval_sum(pk, 50.0) - 1.0)
    assert d50 < d25 < 0.03


@pytest.mark.parametrize("model,t", [(CoefficientModel.laguerre(0.0), 40.0), (CHEB, 100.0)])
def test_window_overlaps_concentration_interval(model, t):
    pk = WavePacketSpec(1.0, 0.5) if model.family == "Laguerre" else JAC_PACKET
    N = choose_truncation(model, pk, t)
    rep = evolve(model, prepare_state(model, pk, N, tail_tol=None), t, N, strict=False)
    lo_a, hi_a = propagate(model, pk, t, N).window
    mass = rep.mass
    in_a = mass[lo_a:hi_a + 1].sum()
    in_b = mass[rep.n_lo:rep.n_hi + 1].sum()
    both = mass[max(lo_a, rep.n_lo):min(hi_a, rep.n_hi) + 1].sum()
    assert both >= 0.9 * min(in_a, in_b)


def test_propagator_errors():
    with pytest.raises(UnsupportedFamilyError):
        propagate(CoefficientModel.birth_death(1.0), WavePacketSpec(1.0, 0.5), 10.0, 100)
    with pytest.raises(DomainError):
        laguerre_propagator(0.0, WavePacketSpec(1.0, 0.5), 0.0, 10)
    with pytest.raises(ParameterError):
        hermite_propagator(WavePacketSpec(0.0, 1.0), 5.0, 10, sign=2)


@pytest.mark.parametrize("model,grid", [
    (CoefficientModel.laguerre(0.0), np.linspace(0.1, 10, 101)),
    (CoefficientModel.laguerre(3.5), np.linspace(0.1, 10, 101)),
    (CoefficientModel.hermite(), np.linspace(-3, 3, 101)),
    (CoefficientModel.jacobi_ab(1.5, 0.5), np.linspace(0.01, 0.99, 101)),
    (CoefficientModel.jacobi_ab(-0.5, 2.0), np.linspace(-0.99, -0.01, 101)),
])
def test_universal_relations(model, grid):
    r1, r2 = universal_relation_check(model, grid)
    assert r1 <= 1e-12 and r2 <= 1e-12


def test_universal_relations_domain():
    with pytest.raises(DomainError):
        universal_relation_check(CHEB, np.array([0.0, 0.5]))
    with pytest.raises(DomainError):
        universal_relation_check(CoefficientModel.laguerre(0.0), np.array([-0.5, 0.5]))


def test_envelope_fit_free_chebyshev():
    dev = envelope_fit(CHEB, 0.3, (500, 2000)).deviations(CHEB, 0.3)
    assert dev["kappa_rel"] < 0.01 and dev["omega_rel"] < 0.01 and dev["r_abs"] < 0.01 and dev["s_abs"] < 0.05


def test_envelope_fit_hermite():
    h = CoefficientModel.hermite()
    dev = envelope_fit(h, 0.5, (1000, 4000)).deviations(h, 0.5)
    assert dev["kappa_rel"] < 0.02 and dev["omega_rel"] < 0.02 and dev["r_abs"] < 0.05


def test_envelope_fit_arguments():
    with pytest.raises(ParameterError):
        envelope_fit(CHEB, 0.3, (500, 700))
    with pytest.raises(DomainError):
        envelope_fit(CoefficientModel.laguerre(0.0), -1.0, (100, 400))
