"""Wave operators between Jacobi operators: closed forms and numerical probes.

Between two Laguerre operators the wave operators are explicit,

    W_+-(J_q, J_p) = e^{+-i(q-p)pi/2} Phi_q^* Phi_p,

so the scattering operator ``W_+^* W_-`` is the scalar ``e^{i(p-q)pi}``.
Probes compare these against ``exp(i J_q t) exp(-i J_p t) f`` on a time grid.
No wave-operator matrix is ever formed: everything is a composition of
transforms and evolutions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .evolution import WavePacketSpec, choose_truncation, evolve, prepare_state
from .operator_core import CoefficientModel
from .spectral import FunctionProfile, TransformedProfile, local_frequency, phi_adjoint

CONVERGING = "converging"
INCONCLUSIVE = "inconclusive"


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    return sign


def _check_p(*ps: float) -> None:
    for p in ps:
        if not p > -1:
            raise ParameterError(f"Laguerre parameter must exceed -1, got {p}")


def transfer(source: CoefficientModel, target: CoefficientModel, f, window: tuple[float, float], *,
             multiplier=None, N_out: int | None = None) -> np.ndarray:
    """``Phi_target^* (m * Phi_source f)`` with the spectral profile cut to ``window``."""
    f = np.asarray(f)
    N_out = f.shape[0] if N_out is None else N_out
    freq = local_frequency(source, f.shape[0], *window)
    prof = TransformedProfile(source, f, tuple(window), multiplier, max_frequency=freq)
    return phi_adjoint(target, prof, N_out)


def wave_operator_apply(p: float, q: float, f, sign: int, window: tuple[float, float], *,
                        N_out: int | None = None) -> np.ndarray:
    """``e^{+-i(q-p)pi/2} Phi_q^* Phi_p f``.

    ``f`` holds Laguerre-``p`` coefficients of a state whose spectral profile
    lives in ``window`` (the packet support); the profile is integrated there.
    """
    _check_p(p, q)
    sign = _check_sign(sign)
    phase = cmath.exp(1j * sign * (q - p) * math.pi / 2)
    if p == q:
        return phase * np.array(f, dtype=complex)
    out = transfer(CoefficientModel.laguerre(p), CoefficientModel.laguerre(q), f, window, N_out=N_out)
    return phase * out


def wave_operator_adjoint_apply(p: float, q: float, h, sign: int, window: tuple[float, float], *,
                                N_out: int | None = None) -> np.ndarray:
    """Adjoint of :func:`wave_operator_apply`: ``e^{-+i(q-p)pi/2} Phi_p^* Phi_q h``."""
    _check_p(p, q)
    sign = _check_sign(sign)
    phase = cmath.exp(-1j * sign * (q - p) * math.pi / 2)
    if p == q:
        return phase * np.array(h, dtype=complex)
    out = transfer(CoefficientModel.laguerre(q), CoefficientModel.laguerre(p), h, window, N_out=N_out)
    return phase * out


def scattering_phase(p: float, q: float) -> complex:
    """The scalar ``e^{i(p-q)pi}`` by which the scattering operator acts."""
    _check_p(p, q)
    return cmath.exp(1j * (p - q) * math.pi)


@dataclass(frozen=True, eq=False)
class WaveOperatorProbe:
    source: CoefficientModel
    target: CoefficientModel
    packet: WavePacketSpec
    times: tuple[float, ...]
    errors: tuple[float, ...]
    limit: np.ndarray | None
    verdict: str
    N: int
    max_leakage: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.times[:-1], self.times[1:])):
            raise ParameterError("time grid must be strictly increasing")

    def rows(self):
        return list(zip(self.times, self.errors))


def _converging(d, slack: float = 0.10) -> bool:
    nonincreasing = all(b <= a * (1 + slack) for a, b in zip(d[:-1], d[1:]))
    return nonincreasing and d[-1] < d[0] / 2


def _grid(t_grid) -> tuple[float, ...]:
    ts = tuple(float(t) for t in t_grid)
    if len(ts) < 2:
        raise ParameterError("need at least two times")
    if not (all(t > 0 for t in ts) or all(t < 0 for t in ts)):
        raise ParameterError("time grid must have one sign")
    return ts


def wave_limit_probe(p: float, q: float, packet: WavePacketSpec, t_grid, sign: int | None = None, *,
                     N: int | None = None) -> WaveOperatorProbe:
    """``d(t) = || e^{i J_q t} e^{-i J_p t} f - W_+-(J_q, J_p) f ||`` on the grid.

    Verdict is converging when ``d`` is nonincreasing within 10% slack and
    halves over the grid. Times are ordered by ``|t|`` for negative grids.
    """
    _check_p(p, q)
    ts = _grid(t_grid)
    order = sorted(ts, key=abs)
    if sign is None:
        sign = 1 if ts[0] > 0 else -1
    sign = _check_sign(sign)
    src, tgt = CoefficientModel.laguerre(p), CoefficientModel.laguerre(q)
    if N is None:
        N = choose_truncation(CoefficientModel.laguerre(max(p, q)), packet, max(abs(t) for t in ts))
    f = prepare_state(src, packet, N, tail_tol=None)
    limit = wave_operator_apply(p, q, f, sign, packet.support)
    errs, leak = [], 0.0
    for t in order:
        r1 = evolve(src, f, t, N, strict=False)
        r2 = evolve(tgt, r1.state, -t, N, strict=False)
        leak = max(leak, r1.leakage, r2.leakage)
        errs.append(float(np.linalg.norm(r2.state - limit)))
    verdict = CONVERGING if _converging(errs) else INCONCLUSIVE
    times = tuple(order) if order[0] > 0 else tuple(sorted(ts))
    errors = tuple(errs) if order[0] > 0 else tuple(reversed(errs))
    fnorm = float(np.linalg.norm(f))
    extra = {"sign": sign, "state_norm": fnorm, "isometry_defect": abs(float(np.linalg.norm(limit)) - fnorm)}
    return WaveOperatorProbe(src, tgt, packet, times, errors, limit, verdict, N, leak, extra)


def auto_size(model: CoefficientModel, packet: WavePacketSpec, *, tail_target: float = 1e-11,
              N0: int = 512, N_max: int = 8192) -> tuple[np.ndarray, float]:
    """Prepare the packet, doubling ``N`` until the mass beyond ``N`` is below ``tail_target``.

    Stops at ``N_max`` and returns whatever tail was reached there.
    """
    N = N0
    while True:
        f, tail = prepare_state(model, packet, N, tail_tol=None, return_tail=True)
        if tail <= tail_target or 2 * N > N_max:
            return f, tail
        N *= 2


def scattering_consistency_check(p: float, q: float, packet: WavePacketSpec, *, N: int | None = None,
                                 tail_target: float = 1e-11, return_details: bool = False):
    """``|| W_+^* W_- f - e^{i(p-q)pi} f ||`` for ``f = Phi_p^* g``.

    ``W_-`` is applied first, then the adjoint of ``W_+`` (reversed transforms,
    conjugated phase). ``N`` is doubled until the packet tail is below
    ``tail_target`` unless given.
    """
    _check_p(p, q)
    src = CoefficientModel.laguerre(p)
    if N is None:
        f, tail = auto_size(src, packet, tail_target=tail_target)
    else:
        f, tail = prepare_state(src, packet, N, tail_tol=None, return_tail=True)
    h = wave_operator_apply(p, q, f, -1, packet.support)
    s_f = wave_operator_adjoint_apply(p, q, h, +1, packet.support)
    res = float(np.linalg.norm(s_f - scattering_phase(p, q) * f))
    if return_details:
        return res, {"N": f.shape[0], "tail": tail, "isometry_defect": abs(np.linalg.norm(h) - np.linalg.norm(f))}
    return res


def free_multiplier(alpha: float, beta: float, sign: int):
    """``e^{-+i pi (alpha-beta)/4} e^{-+i (alpha+beta-1)/2 arcsin(lam)}`` as a callable."""
    sign = _check_sign(sign)

    def mult(lam):
        lam = np.asarray(lam, dtype=float)
        return np.exp(-1j * sign * (math.pi * (alpha - beta) / 4 + 0.5 * (alpha + beta - 1) * np.arcsin(lam)))

    return mult


def free_wave_operator_apply(alpha: float, beta: float, g0, sign: int, N: int) -> np.ndarray:
    """``W_+-(J, J0) Phi0^* g0 = Phi^* (Sigma_+- g0)`` for the JacobiAB operator ``J``.

    ``g0`` is the spectral profile of the free (``a_n = 1/2``, ``b_n = 0``)
    state; the result holds ``N`` JacobiAB(alpha, beta) coefficients.
    """
    mult = free_multiplier(alpha, beta, sign)
    lo, hi = g0.support
    edge = max(abs(lo), abs(hi))
    freq = abs(getattr(g0, "modulation", 0.0)) + abs(alpha + beta - 1) / (2 * math.sqrt(1 - edge * edge))
    prof = FunctionProfile(lambda lam: mult(lam) * np.asarray(g0(lam)), (lo, hi), freq)
    return phi_adjoint(CoefficientModel.jacobi_ab(alpha, beta), prof, N)


def free_wave_limit_probe(alpha: float, beta: float, packet: WavePacketSpec, t_grid, sign: int | None = None,
                          *, N: int | None = None) -> WaveOperatorProbe:
    """``|| e^{i J t} e^{-i J0 t} f0 - W_+-(J, J0) f0 ||`` with ``J0`` the free operator."""
    ts = _grid(t_grid)
    if sign is None:
        sign = 1 if ts[0] > 0 else -1
    free = CoefficientModel.free_chebyshev()
    model = CoefficientModel.jacobi_ab(alpha, beta)
    if N is None:
        N = choose_truncation(free, packet, max(abs(t) for t in ts))
    f0 = prepare_state(free, packet, N, tail_tol=None)
    limit = free_wave_operator_apply(alpha, beta, packet, sign, N)
    order = sorted(ts, key=abs)
    errs, leak = [], 0.0
    for t in order:
        r1 = evolve(free, f0, t, N, strict=False)
        r2 = evolve(model, r1.state, -t, N, strict=False)
        leak = max(leak, r1.leakage, r2.leakage)
        errs.append(float(np.linalg.norm(r2.state - limit)))
    verdict = CONVERGING if _converging(errs) else INCONCLUSIVE
    times = tuple(order) if order[0] > 0 else tuple(sorted(ts))
    errors = tuple(errs) if order[0] > 0 else tuple(reversed(errs))
    return WaveOperatorProbe(free, model, packet, times, errors, limit, verdict, N, leak, {"sign": sign})


def perturbed_wave_probe(base: CoefficientModel, tilde: CoefficientModel, packet: WavePacketSpec, t_grid,
                         sign: int | None = None, *, N: int | None = None, ratio: float = 1.5,
                         floor: float = 1e-10, terminal: float = 0.25) -> WaveOperatorProbe:
    """Cauchy test for ``v(t) = exp(i J~ t) exp(-i J t) f`` without a closed-form limit.

    ``errors[k]`` is ``||v(t_{k+1}) - v(t_k)||`` (reported at ``t_{k+1}``).
    Converging means every step shrinks the difference by at least ``ratio``
    (differences below ``floor * ||f||`` count as settled) and the last
    difference is below ``terminal * ||f||``.
    """
    ts = _grid(t_grid)
    order = sorted(ts, key=abs)
    if sign is None:
        sign = 1 if ts[0] > 0 else -1
    if N is None:
        N = choose_truncation(base, packet, max(abs(t) for t in ts))
    f = prepare_state(base, packet, N, tail_tol=None)
    fnorm = float(np.linalg.norm(f))
    states, leak = [], 0.0
    for t in order:
        r1 = evolve(base, f, t, N, strict=False)
        r2 = evolve(tilde, r1.state, -t, N, strict=False)
        leak = max(leak, r1.leakage, r2.leakage)
        states.append(r2.state)
    diffs = [float(np.linalg.norm(b - a)) for a, b in zip(states[:-1], states[1:])]
    settled = floor * fnorm
    ok = all(d1 <= settled or d0 >= ratio * d1 for d0, d1 in zip(diffs[:-1], diffs[1:]))
    ok = ok and diffs[-1] <= terminal * fnorm
    verdict = CONVERGING if ok else INCONCLUSIVE
    times, errors = tuple(order[1:]), tuple(diffs)
    if order[0] < 0:
        times, errors = times[::-1], errors[::-1]
    return WaveOperatorProbe(base, tilde, packet, times, errors, states[-1], verdict, N, leak,
                             {"sign": sign, "state_norm": fnorm})
