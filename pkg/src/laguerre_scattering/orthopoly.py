"""Orthonormal polynomials, spectral weights, eigenfunctions and bulk asymptotics.

Polynomials are always produced by the normalized three-term recurrence

    a_{n-1} P_{n-1} + b_n P_n + a_n P_{n+1} = lambda P_n,   P_{-1} = 0, P_0 = 1,

so no Gamma-function ratios appear outside the small-``n`` cross-check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ParameterError, RangeError, UnsupportedFamilyError
from .operator_core import (
    CLASSICAL_FAMILIES,
    FREE_CHEBYSHEV,
    HERMITE,
    JACOBI_AB,
    LAGUERRE,
    CoefficientModel,
    coeff_a,
    coeff_b,
)

REGIME_LIMIT = 1e10


class OutOfRegimeWarning(RuntimeWarning):
    """Polynomial values left the bulk regime where plain recurrence is reliable."""


def _require_classical(model: CoefficientModel) -> None:
    if model.family not in CLASSICAL_FAMILIES:
        raise UnsupportedFamilyError(f"{model.label()} has no closed-form spectral weight")


def _run_recurrence(model, lam, N, start):
    lam = np.asarray(lam, dtype=float)
    a = np.asarray(coeff_a(model, np.arange(max(N - 1, 1))), dtype=float)
    b = np.asarray(coeff_b(model, np.arange(N)), dtype=float)
    out = np.empty((N,) + lam.shape)
    out[0] = start
    if N > 1:
        out[1] = (lam - b[0]) * out[0] / a[0]
    for n in range(1, N - 1):
        out[n + 1] = ((lam - b[n]) * out[n] - a[n - 1] * out[n - 1]) / a[n]
    return out


def eval_poly_sequence(model: CoefficientModel, lam, N: int, *, warn: bool = True) -> np.ndarray:
    """Values ``P_0(lam), ..., P_{N-1}(lam)``.

    ``lam`` may be an array; the result has shape ``(N,) + shape(lam)``.
    Emits :class:`OutOfRegimeWarning` when some ``|P_n|`` exceeds ``1e10``.
    """
    if N < 1:
        raise ParameterError("N must be at least 1")
    lam = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise DomainError("lambda must be finite")
    P = _run_recurrence(model, lam, N, np.ones(lam.shape))
    if warn and not np.all(np.abs(P) <= REGIME_LIMIT):
        warnings.warn(f"{model.label()}: |P_n| exceeds {REGIME_LIMIT:g}; values are out of the bulk regime",
                      OutOfRegimeWarning, stacklevel=2)
    return P


def eval_poly_derivative_sequence(model: CoefficientModel, lam, N: int):
    """``(P, dP)`` where ``dP`` holds the lambda-derivatives from the differentiated recurrence."""
    lam = np.asarray(lam, dtype=float)
    a = np.asarray(coeff_a(model, np.arange(max(N - 1, 1))), dtype=float)
    b = np.asarray(coeff_b(model, np.arange(N)), dtype=float)
    P = np.empty((N,) + lam.shape)
    D = np.empty((N,) + lam.shape)
    P[0], D[0] = 1.0, 0.0
    if N > 1:
        P[1] = (lam - b[0]) / a[0]
        D[1] = 1.0 / a[0]
    for n in range(1, N - 1):
        P[n + 1] = ((lam - b[n]) * P[n] - a[n - 1] * P[n - 1]) / a[n]
        D[n + 1] = ((lam - b[n]) * D[n] + P[n] - a[n - 1] * D[n - 1]) / a[n]
    return P, D


def log_christoffel_sum(model: CoefficientModel, lam, N: int) -> np.ndarray:
    """``log sum_{n<N} P_n(lam)^2`` computed with running rescaling (no overflow)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    a = np.asarray(coeff_a(model, np.arange(max(N - 1, 1))), dtype=float)
    b = np.asarray(coeff_b(model, np.arange(N)), dtype=float)
    prev = np.zeros_like(lam)
    cur = np.ones_like(lam)
    acc = np.ones_like(lam)
    logscale = np.zeros_like(lam)
    for n in range(N - 1):
        nxt = ((lam - b[n]) * cur - (a[n - 1] * prev if n else 0.0)) / a[n]
        prev, cur = cur, nxt
        acc += cur * cur
        big = acc > 1e200
        if np.any(big):
            s = np.sqrt(acc[big])
            prev[big] /= s
            cur[big] /= s
            acc[big] = 1.0
            logscale[big] += 2.0 * np.log(s)
    return np.log(acc) + logscale


def jacobi_normalization(alpha: float, beta: float) -> float:
    """Constant ``k`` making ``k (1-x)^alpha (1+x)^beta`` a probability density on (-1, 1)."""
    return math.exp(
        gammaln(alpha + beta + 2.0)
        - (alpha + beta + 1.0) * math.log(2.0)
        - gammaln(alpha + 1.0)
        - gammaln(beta + 1.0)
    )


def support(model: CoefficientModel) -> tuple[float, float]:
    _require_classical(model)
    if model.family == LAGUERRE:
        return (0.0, math.inf)
    if model.family == HERMITE:
        return (-math.inf, math.inf)
    return (-1.0, 1.0)


def weight(model: CoefficientModel, lam):
    """Density of the normalized spectral measure; zero outside the support."""
    _require_classical(model)
    x = np.asarray(lam, dtype=float)
    out = np.zeros(x.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        if model.family == LAGUERRE:
            p = model.p
            inside = x > 0
            out[inside] = np.exp(p * np.log(x[inside]) - x[inside] - gammaln(p + 1.0))
            edge = x == 0
            out[edge] = 1.0 if p == 0 else (0.0 if p > 0 else np.inf)
        elif model.family == HERMITE:
            out = np.exp(-x * x) / math.sqrt(math.pi)
        else:
            al, be = model.jacobi_parameters
            logk = math.log(jacobi_normalization(al, be))
            inside = (x > -1) & (x < 1)
            xi = x[inside]
            out[inside] = np.exp(logk + al * np.log1p(-xi) + be * np.log1p(xi))
    return float(out) if np.ndim(lam) == 0 else out


@dataclass(frozen=True)
class SpectralWeight:
    """Closed-form density of a classical family's spectral measure."""

    model: CoefficientModel
    support: tuple[float, float]
    k: float | None = None

    def __call__(self, lam):
        return weight(self.model, lam)


def spectral_weight(model: CoefficientModel) -> SpectralWeight:
    _require_classical(model)
    k = None
    if model.family in (JACOBI_AB, FREE_CHEBYSHEV):
        k = jacobi_normalization(*model.jacobi_parameters)
    return SpectralWeight(model, support(model), k)


def iter_scaled_poly(model: CoefficientModel, lam, N: int, log_start):
    """Yield rows ``exp(log_start) * P_n(lam)``, ``n = 0..N-1``, without overflow.

    The recurrence is linear, so it can run on a rescaled copy while the
    logarithm of the scale is tracked separately. Entries whose true size is
    below the double range come out as zero.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    a = np.asarray(coeff_a(model, np.arange(max(N - 1, 1))), dtype=float)
    b = np.asarray(coeff_b(model, np.arange(N)), dtype=float)
    logscale = np.broadcast_to(np.asarray(log_start, dtype=float), lam.shape).copy()
    factor = np.exp(logscale)
    prev = np.zeros(lam.shape)
    cur = np.ones(lam.shape)
    yield factor.copy()
    for n in range(N - 1):
        nxt = (lam - b[n]) * cur
        if n:
            nxt -= a[n - 1] * prev
        nxt /= a[n]
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if np.any(big):
            s = np.abs(cur[big])
            prev[big] /= s
            cur[big] /= s
            logscale[big] += np.log(s)
            factor[big] = np.exp(logscale[big])
        yield cur * factor


def scaled_poly_table(model: CoefficientModel, lam, N: int, log_start) -> np.ndarray:
    """Stacked rows of :func:`iter_scaled_poly`; shape ``(N, len(lam))``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.empty((N,) + lam.shape)
    for n, row in enumerate(iter_scaled_poly(model, lam, N, log_start)):
        out[n] = row
    return out


def _log_sqrt_weight(model, lam):
    with np.errstate(divide="ignore"):
        return 0.5 * np.log(np.atleast_1d(weight(model, lam)))


def eigenfunction_project(model: CoefficientModel, N: int, lam, values) -> np.ndarray:
    """``sum_j phi_n(lam_j) values_j`` for ``n < N`` in O(len(lam)) memory."""
    _require_classical(model)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    values = np.asarray(values)
    out = np.empty(N, dtype=np.result_type(values.dtype, float))
    for n, row in enumerate(iter_scaled_poly(model, lam, N, _log_sqrt_weight(model, lam))):
        out[n] = row @ values
    return out


def eigenfunction_table(model: CoefficientModel, N: int, lam) -> np.ndarray:
    """``phi_n(lam) = sqrt(tau(lam)) P_n(lam)`` for ``n < N``; shape ``(N,) + shape(lam)``."""
    _require_classical(model)
    lam = np.asarray(lam, dtype=float)
    tab = scaled_poly_table(model, lam, N, _log_sqrt_weight(model, lam))
    return tab.reshape((N,) + lam.shape)


def eigenfunction(model: CoefficientModel, n: int, lam):
    if n < 0:
        raise ParameterError("n must be nonnegative")
    val = eigenfunction_table(model, n + 1, lam)[n]
    return float(val) if np.ndim(lam) == 0 else val


def unnormalized_laguerre_crosscheck(p: float, n: int, lam: float) -> float:
    """Normalized Laguerre value rebuilt from the textbook polynomial ``L_n^{(p)}``.

    Independent oracle: runs the standard recurrence
    ``(k+1) L_{k+1} = (2k+1+p-x) L_k - (k+p) L_{k-1}`` and rescales by
    ``(-1)^n sqrt(n! Gamma(1+p) / Gamma(1+n+p))``. Only valid for ``n <= 20``.
    """
    if n > 20:
        raise RangeError("cross-check limited to n <= 20")
    if n < 0 or not p > -1:
        raise ParameterError("need n >= 0 and p > -1")
    prev, cur = 0.0, 1.0
    for k in range(n):
        prev, cur = cur, ((2 * k + 1 + p - lam) * cur - (k + p) * prev) / (k + 1)
    scale = math.exp(0.5 * (gammaln(1 + n) + gammaln(1 + p) - gammaln(1 + n + p)))
    return (-1) ** n * scale * cur


# ---------------------------------------------------------------- asymptotics

@dataclass(frozen=True)
class AsymptoticProfile:
    """Bulk form ``P_n ~ 2 kappa(lam) n^{-r} cos(phase(n, lam))`` with ``d phase/d lam ~ omega n^s``."""

    family: str
    r: float
    s: float
    kappa: Callable
    omega: Callable
    phase: Callable
    region: tuple[tuple[float, float], ...]

    def contains(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        ok = np.zeros(lam.shape, dtype=bool)
        for lo, hi in self.region:
            ok |= (lam > lo) & (lam < hi)
        return ok


def amplitude_phase(model: CoefficientModel) -> AsymptoticProfile:
    _require_classical(model)
    fam = model.family
    if fam == LAGUERRE:
        p = model.p
        c = 0.5 * math.exp(0.5 * (gammaln(1 + p) - math.log(math.pi)))
        return AsymptoticProfile(
            LAGUERRE, 0.25, 0.5,
            kappa=lambda lam: c * np.asarray(lam, float) ** (-p / 2 - 0.25) * np.exp(np.asarray(lam, float) / 2),
            omega=lambda lam: np.asarray(lam, float) ** -0.5,
            phase=lambda n, lam: math.pi * np.asarray(n) + 2 * np.sqrt(np.asarray(n) * np.asarray(lam, float))
            - (2 * p + 1) * math.pi / 4,
            region=((0.0, math.inf),),
        )
    if fam == HERMITE:
        c = 2 ** -0.75 * math.pi ** -0.25
        return AsymptoticProfile(
            HERMITE, 0.25, 0.5,
            kappa=lambda lam: c * np.exp(np.asarray(lam, float) ** 2 / 2),
            omega=lambda lam: np.full(np.shape(lam), math.sqrt(2.0)) if np.ndim(lam) else math.sqrt(2.0),
            phase=lambda n, lam: np.sqrt(2 * np.asarray(n) + 1.0) * np.asarray(lam, float) - math.pi * np.asarray(n) / 2,
            region=((-math.inf, math.inf),),
        )
    al, be = model.jacobi_parameters
    k = jacobi_normalization(al, be)
    gam = (al + be + 1) / 2
    c = 0.5 * math.sqrt(2.0 / (math.pi * k))

    def kappa(lam):
        lam = np.asarray(lam, float)
        return c * (1 - lam) ** (-(1 + 2 * al) / 4) * (1 + lam) ** (-(1 + 2 * be) / 4)

    return AsymptoticProfile(
        fam, 0.0, 1.0,
        kappa=kappa,
        omega=lambda lam: (1 - np.asarray(lam, float) ** 2) ** -0.5,
        phase=lambda n, lam: (np.asarray(n) + gam) * np.arcsin(np.asarray(lam, float))
        - math.pi * (2 * np.asarray(n) + be - al) / 4,
        region=((-1.0, 0.0), (0.0, 1.0)),
    )


def asymptotic_prediction(model: CoefficientModel, n, lam):
    """Leading bulk term of ``P_n(lam)`` (no remainder)."""
    prof = amplitude_phase(model)
    lam_arr = np.asarray(lam, dtype=float)
    n_arr = np.asarray(n)
    if model.family == LAGUERRE:
        if np.any(lam_arr <= 0):
            raise DomainError("Laguerre asymptotics need lambda > 0")
        if np.any(n_arr < 1):
            raise ParameterError("Laguerre asymptotics need n >= 1")
        val = 2 * prof.kappa(lam_arr) * n_arr ** -0.25 * np.cos(prof.phase(n_arr, lam_arr))
    elif model.family == HERMITE:
        amp = math.sqrt(2.0) * math.pi ** -0.25 * np.exp(lam_arr ** 2 / 2) * (2 * n_arr + 1.0) ** -0.25
        val = amp * np.cos(prof.phase(n_arr, lam_arr))
    else:
        if np.any(np.abs(lam_arr) >= 1):
            raise DomainError("Jacobi asymptotics need -1 < lambda < 1")
        val = 2 * prof.kappa(lam_arr) * np.cos(prof.phase(n_arr, lam_arr))
    return float(val) if np.ndim(val) == 0 else val
