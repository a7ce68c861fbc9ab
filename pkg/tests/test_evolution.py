import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import exact_evolved
from laguerre_scattering import (
    CoefficientModel,
    ParameterError,
    ShapeError,
    TruncationError,
    UndefinedProfileError,
    WavePacketSpec,
    choose_truncation,
    concentration_interval,
    evolve,
    mass_profile,
    prepare_state,
    truncate,
)
from laguerre_scattering.evolution import chebyshev_propagate


def test_truncation_policy():
    pk = WavePacketSpec(1.0, 0.5)
    assert choose_truncation(CoefficientModel.laguerre(0.0), pk, 40) == 3600 + 64
    assert choose_truncation(CoefficientModel.hermite(), pk, 40) == 1200 + 64
    assert choose_truncation(CoefficientModel.free_chebyshev(), pk, -100) == 120 + 64
    assert choose_truncation(CoefficientModel.birth_death(1.0), pk, 10) == 225 + 64


def test_prepare_state_tail_check():
    m, pk = CoefficientModel.laguerre(0.0), WavePacketSpec(1.0, 0.5)
    with pytest.raises(TruncationError) as info:
        prepare_state(m, pk, 512)
    assert info.value.suggested_N == 1024
    f, tail = prepare_state(m, pk, 512, tail_tol=None, return_tail=True)
    assert tail == pytest.approx(1.0 - np.linalg.norm(f) ** 2)
    assert 1e-5 < tail < 1e-3  # the bump's slowly decaying coefficients
    _, jtail = prepare_state(CoefficientModel.free_chebyshev(), WavePacketSpec(0.5, 0.3), 200,
                             tail_tol=None, return_tail=True)
    assert jtail < 1e-8


def test_prepare_state_zero_packet():
    f = prepare_state(CoefficientModel.hermite(), WavePacketSpec(0.0, 1.0, norm=0.0), 16)
    assert np.all(f == 0)


def test_t_zero_is_identity():
    f = prepare_state(CoefficientModel.hermite(), WavePacketSpec(0.0, 1.0), 100, tail_tol=None)
    rep = evolve(CoefficientModel.hermite(), f, 0.0, strict=False)
    assert np.array_equal(rep.state, f)
    assert rep.norm_defect == 0.0


@pytest.mark.parametrize("model", [CoefficientModel.laguerre(0.5), CoefficientModel.hermite(),
                                   CoefficientModel.jacobi_ab(1.5, 0.5), CoefficientModel.birth_death(1.5)])
def test_small_sections_match_expm(model, rng):
    N = 40
    f = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    ref = expm(-1j * 1.7 * truncate(model, N).dense()) @ f
    for method in ("dense", "chebyshev"):
        rep = evolve(model, f, 1.7, method=method, strict=False)
        assert np.allclose(rep.state, ref, atol=1e-10)


@settings(max_examples=10, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2 ** 31 - 1))
def test_group_law_and_unitarity(s, t, seed):
    r = np.random.default_rng(seed)
    m = CoefficientModel.laguerre(1.0)
    f = r.standard_normal(80) + 1j * r.standard_normal(80)
    one = evolve(m, evolve(m, f, s, strict=False).state, t, strict=False).state
    both = evolve(m, f, s + t, strict=False).state
    assert np.allclose(one, both, atol=1e-9)
    assert np.linalg.norm(both) == pytest.approx(np.linalg.norm(f), rel=1e-12)


def test_chebyshev_splits_long_times(rng):
    m = CoefficientModel.hermite()
    J = truncate(m, 300)
    f = np.zeros(300, complex)
    f[:20] = rng.standard_normal(20)
    u, bound = chebyshev_propagate(J, f, 40.0)
    ref = evolve(m, f, 40.0, method="dense", strict=False).state
    assert np.linalg.norm(u - ref) < 1e-10
    assert bound < 1e-10


def test_batched_columns(rng):
    m = CoefficientModel.free_chebyshev()
    F = np.zeros((256, 3), complex)
    F[:30] = rng.standard_normal((30, 3))
    rep = evolve(m, F, 30.0, strict=False)
    for j in range(3):
        assert np.allclose(rep.state[:, j], evolve(m, F[:, j], 30.0, strict=False).state, atol=1e-12)


def _oracle_gap(m, pk, t, N):
    f = prepare_state(m, pk, N, tail_tol=None)
    return np.linalg.norm(evolve(m, f, t, N, strict=False).state - exact_evolved(m, pk, t, N))


def test_exact_oracle_agreement():
    # lattice evolution vs the transform of exp(-i lam t) g; the gap closes as N grows
    m, pk = CoefficientModel.free_chebyshev(), WavePacketSpec(0.5, 0.3)
    gaps = [_oracle_gap(m, pk, 25.0, N) for N in (256, 512, 1024)]
    assert gaps[2] < gaps[1] < gaps[0] and gaps[2] < 1e-8
    lag = [_oracle_gap(CoefficientModel.laguerre(0.0), WavePacketSpec(8.0, 7.5), 3.0, N) for N in (1024, 2048)]
    assert lag[1] < lag[0] / 4 and lag[1] < 1e-4


def test_time_reversal(rng):
    m = CoefficientModel.jacobi_ab(1.5, 0.5)
    f = np.zeros(200, complex)
    f[:10] = rng.standard_normal(10)
    back = evolve(m, evolve(m, f, 20.0, strict=False).state, -20.0, strict=False).state
    assert np.allclose(back, f, atol=1e-11)


def test_strict_mode_reports_leakage():
    m = CoefficientModel.free_chebyshev()
    f = prepare_state(m, WavePacketSpec(0.5, 0.3), 80, tail_tol=None)
    with pytest.raises(TruncationError) as info:
        evolve(m, f, 100.0)
    assert info.value.suggested_N == 160
    assert info.value.report is not None and not info.value.report.valid
    rep = evolve(m, f, 100.0, strict=False)
    assert rep.leakage > rep.leak_tol


def test_input_validation():
    m = CoefficientModel.hermite()
    with pytest.raises(ShapeError):
        evolve(m, np.ones(10), 1.0, N=5)
    with pytest.raises(ParameterError):
        evolve(m, np.zeros(10), 1.0)
    with pytest.raises(ParameterError):
        evolve(m, np.ones(10), 1.0, method="magic")
    rep = evolve(m, np.ones(10), 0.5, N=20, strict=False)
    assert rep.state.shape == (20,)


def test_report_summary():
    rep = evolve(CoefficientModel.hermite(), np.eye(50)[0], 1.0)
    keys = {"t", "N", "norm_defect", "leakage", "n_lo", "n_hi", "method", "certificate", "valid"}
    assert set(rep.summary()) == keys
    assert rep.method == "dense-eig"
    assert evolve(CoefficientModel.hermite(), np.eye(50)[0], 1.0, method="chebyshev").method == "polynomial-propagator"


def test_concentration_interval_rules():
    assert concentration_interval(np.array([0.0, 1.0, 0.0])) == (1, 1)
    # equal neighbours: the lower side is taken first
    assert concentration_interval(np.array([0.25, 0.5, 0.25]), level=0.7) == (0, 1)
    m = np.zeros(100)
    m[40:60] = 1.0
    lo, hi = concentration_interval(m, 0.95)
    assert 40 <= lo and hi < 60 and hi - lo + 1 == 19
    with pytest.raises(ParameterError):
        concentration_interval(m, 1.0)
    with pytest.raises(UndefinedProfileError):
        concentration_interval(np.zeros(5))
    with pytest.raises(UndefinedProfileError):
        mass_profile(np.zeros(5, complex))


def test_mass_profile_normalized(rng):
    v = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    mp = mass_profile(v)
    assert mp.sum() == pytest.approx(1.0)
    assert np.allclose(mp, np.abs(v) ** 2 / np.sum(np.abs(v) ** 2))


def test_initial_laguerre_packet_sits_near_origin():
    f = prepare_state(CoefficientModel.laguerre(0.0), WavePacketSpec(1.0, 0.5), 512, tail_tol=None)
    lo, hi = concentration_interval(f)
    assert lo == 0 and hi < 60


def test_laguerre_front_moves_quadratically():
    m, pk = CoefficientModel.laguerre(0.0), WavePacketSpec(1.0, 0.5)
    N = choose_truncation(m, pk, 20.0)
    f = prepare_state(m, pk, N, tail_tol=None)
    mid = [np.mean(concentration_interval(evolve(m, f, t, N, strict=False))) for t in (10.0, 20.0)]
    assert 3.0 < mid[1] / mid[0] < 4.8
