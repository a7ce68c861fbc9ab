"""Unitary evolution ``exp(-i J_N t) f`` on finite sections, with diagnostics.

Two interchangeable back-ends:

* ``"dense"``: full eigendecomposition, ``U exp(-i Lambda t) U^T f``;
* ``"chebyshev"``: Chebyshev expansion of the exponential over a Gershgorin
  interval, coefficients ``(-i)^k J_k(R t)`` (Bessel functions), truncated
  where the Bessel tail drops below the requested tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import jv

from .errors import ParameterError, ShapeError, TruncationError, UndefinedProfileError
from .operator_core import (
    BIRTH_DEATH,
    CUSTOM_PERTURBED,
    FREE_CHEBYSHEV,
    HERMITE,
    JACOBI_AB,
    LAGUERRE,
    CoefficientModel,
    TruncatedJacobiMatrix,
    truncate,
)
from .packets import WavePacketSpec
from .spectral import cached_decomposition, phi_adjoint

__all__ = [
    "WavePacketSpec",
    "EvolutionReport",
    "prepare_state",
    "evolve",
    "chebyshev_propagate",
    "choose_truncation",
    "mass_profile",
    "concentration_interval",
]

DENSE = "dense-eig"
POLYNOMIAL = "polynomial-propagator"
DENSE_MAX_N = 4096
MAX_STEP_RT = 4000.0


def _policy_family(model: CoefficientModel) -> str:
    while model.family == CUSTOM_PERTURBED:
        model = model.base
    if model.family == BIRTH_DEATH:
        return LAGUERRE
    return model.family


def choose_truncation(model: CoefficientModel, packet: WavePacketSpec, t_max: float) -> int:
    """Section size covering the transport front up to ``|t| = t_max``.

    Laguerre-like fronts move as ``n ~ lam t^2``, Hermite as ``n ~ t^2 / 2``
    and Jacobi as ``n ~ |t|``; each rule adds a buffer of 64.
    """
    t = abs(float(t_max))
    fam = _policy_family(model)
    if fam == LAGUERRE:
        n = 1.5 * (packet.center + packet.half_width) * t * t
    elif fam == HERMITE:
        n = 0.75 * t * t
    elif fam in (JACOBI_AB, FREE_CHEBYSHEV):
        n = 1.2 * t
    else:  # pragma: no cover - every family is covered above
        raise ParameterError(f"no truncation rule for {model.label()}")
    return int(math.ceil(n - 1e-9)) + 64


def prepare_state(model: CoefficientModel, packet: WavePacketSpec, N: int, *,
                  tail_tol: float | None = 1e-10, return_tail: bool = False):
    """Coefficients ``f = Phi^* g`` of the packet in the first ``N`` coordinates.

    The mass beyond ``N`` is estimated from the norm deficit
    ``||g||^2 - ||f||^2``. If it exceeds ``tail_tol`` a :class:`TruncationError`
    is raised (pass ``tail_tol=None`` to accept any tail).
    """
    if packet.norm == 0:
        f = np.zeros(N, dtype=complex)
        return (f, 0.0) if return_tail else f
    f = phi_adjoint(model, packet, N).astype(complex)
    tail = max(packet.norm ** 2 - float(np.vdot(f, f).real), 0.0)
    if tail_tol is not None and tail > tail_tol:
        raise TruncationError(f"{model.label()}: packet mass beyond N={N} is {tail:.3e}", suggested_N=2 * N)
    return (f, tail) if return_tail else f


@dataclass(frozen=True, eq=False)
class EvolutionReport:
    model: CoefficientModel
    t: float
    N: int
    state: np.ndarray
    norm_defect: float
    leakage: float
    n_lo: int
    n_hi: int
    method: str
    certificate: float
    valid: bool
    leak_tol: float = 1e-8
    extra: dict = field(default_factory=dict)

    @property
    def mass(self) -> np.ndarray:
        return np.abs(self.state) ** 2

    def summary(self) -> dict:
        return {
            "t": self.t,
            "N": self.N,
            "norm_defect": self.norm_defect,
            "leakage": self.leakage,
            "n_lo": self.n_lo,
            "n_hi": self.n_hi,
            "method": self.method,
            "certificate": self.certificate,
            "valid": self.valid,
        }


def _bessel_degree(z: float, tol: float) -> tuple[np.ndarray, float]:
    """Bessel coefficients ``J_k(z)``, ``k <= d``, with the tail beyond ``d`` below ``tol``."""
    z = abs(z)
    d = int(math.e * z / 2) + 40
    while True:
        k = np.arange(d + 1)
        c = jv(k, z)
        tail = float(np.abs(jv(np.arange(d + 1, d + 41), z)).sum())
        if tail < tol:
            # trim trailing coefficients that are themselves negligible
            big = np.nonzero(np.abs(c) > tol * 1e-3)[0]
            last = int(big[-1]) if big.size else 0
            tail += float(np.abs(c[last + 1:]).sum())
            return c[: last + 1], 2.0 * tail
        d = int(d * 1.5) + 40


def chebyshev_propagate(J: TruncatedJacobiMatrix, f, t: float, *, tol: float = 1e-12):
    """``exp(-i J t) f`` by Chebyshev expansion; returns ``(u, error_bound)``.

    Long times are split into equal steps with ``R dt <= 4000``; per-step tail
    bounds add up in the returned certificate.
    """
    u = np.array(f, dtype=complex)
    if t == 0:
        return u, 0.0
    lo, hi = J.gershgorin()
    c0 = 0.5 * (hi + lo)
    R = max(0.5 * (hi - lo), 1e-300)
    steps = max(1, int(math.ceil(abs(t) * R / MAX_STEP_RT)))
    dt = t / steps
    coeffs, tail = _bessel_degree(R * dt, tol / steps)
    # (-i)^k J_k(R dt) for dt > 0; J_k(-z) = (-1)^k J_k(z) handles dt < 0
    k = np.arange(coeffs.size)
    signed = coeffs * ((-1.0) ** k if dt < 0 else 1.0)
    phases = signed * (-1j) ** (k % 4)
    phases[1:] *= 2.0
    shift = np.exp(-1j * c0 * dt)
    a = J.a
    b_shift = (J.b - c0) / R
    a_s = a / R
    ext = (slice(None),) + (None,) * (u.ndim - 1)
    bb = b_shift[ext]
    aa = a_s[ext]

    def X(v):
        out = bb * v
        if v.shape[0] > 1:
            out[:-1] += aa * v[1:]
            out[1:] += aa * v[:-1]
        return out

    for _ in range(steps):
        t_prev = u
        t_cur = X(u)
        acc = phases[0] * t_prev
        if phases.size > 1:
            acc = acc + phases[1] * t_cur
        for kk in range(2, phases.size):
            t_next = 2.0 * X(t_cur) - t_prev
            acc += phases[kk] * t_next
            t_prev, t_cur = t_cur, t_next
        u = shift * acc
    fnorm = float(np.linalg.norm(f))
    return u, tail * fnorm


def _state_norm(v) -> float:
    return float(np.linalg.norm(v))


def evolve(model: CoefficientModel, f, t: float, N: int | None = None, *, method: str = "auto",
           strict: bool = True, leak_tol: float = 1e-8, norm_tol: float = 1e-8,
           tol: float = 1e-12) -> EvolutionReport:
    """Evolve ``f`` under the ``N x N`` section of ``model`` for time ``t``.

    ``method`` is ``"dense"``, ``"chebyshev"`` or ``"auto"`` (dense up to
    ``N = 4096``). With ``strict`` an invalid report (boundary mass above
    ``leak_tol * ||f||^2`` or norm defect above ``norm_tol``) raises
    :class:`TruncationError` suggesting ``2N``; otherwise the report is
    returned with ``valid=False``.
    """
    f = np.asarray(f)
    if N is None:
        N = f.shape[0]
    if f.shape[0] > N:
        raise ShapeError(f"state has length {f.shape[0]} > N={N}")
    if f.shape[0] < N:
        pad = np.zeros((N - f.shape[0],) + f.shape[1:], dtype=complex)
        f = np.concatenate([f.astype(complex), pad])
    f = f.astype(complex)
    fnorm = _state_norm(f)
    if not fnorm > 0:
        raise ParameterError("cannot evolve the zero state")
    t = float(t)
    if method == "auto":
        method = "dense" if N <= DENSE_MAX_N else "chebyshev"
    if t == 0.0:
        u, cert, tag = f.copy(), 0.0, DENSE if method == "dense" else POLYNOMIAL
    elif method == "dense":
        dec = cached_decomposition(model, N)
        u = dec.apply_function(lambda lam: np.exp(-1j * lam * t), f)
        cert = dec.worst_residual * (1.0 + abs(t) * float(np.abs(dec.eigenvalues).max())) * fnorm * math.sqrt(N)
        tag = DENSE
    elif method == "chebyshev":
        u, cert = chebyshev_propagate(truncate(model, N), f, t, tol=tol)
        tag = POLYNOMIAL
    else:
        raise ParameterError(f"unknown method {method!r}")
    unorm = _state_norm(u)
    defect = abs(unorm - fnorm)
    edge = N - max(N // 16, 1)
    leak = float(np.sum(np.abs(u[edge:]) ** 2))
    mass = np.abs(u) ** 2
    if mass.ndim > 1:
        mass = mass.sum(axis=tuple(range(1, mass.ndim)))
    n_lo, n_hi = concentration_interval(mass, 0.95)
    valid = leak <= leak_tol * fnorm ** 2 and defect <= norm_tol * max(fnorm, 1.0)
    report = EvolutionReport(model, t, N, u, defect, leak, n_lo, n_hi, tag, cert, valid, leak_tol)
    if strict and not valid:
        raise TruncationError(
            f"{model.label()}, t={t:g}: boundary mass {leak:.3e}, norm defect {defect:.3e}",
            suggested_N=2 * N, report=report,
        )
    return report


def mass_profile(report) -> np.ndarray:
    """Normalized ``|f_n|^2``; accepts a report or a state vector."""
    state = report.state if isinstance(report, EvolutionReport) else np.asarray(report)
    m = np.abs(state) ** 2
    if m.ndim > 1:
        m = m.sum(axis=tuple(range(1, m.ndim)))
    total = m.sum()
    if not total > 0:
        raise UndefinedProfileError("mass profile of the zero state is undefined")
    return m / total


def concentration_interval(report, level: float = 0.95) -> tuple[int, int]:
    """Index interval around the peak holding at least ``level`` of the mass.

    Starts at the largest bin and repeatedly adds whichever neighbour is
    heavier; ties go to the lower index. Accepts a report, a state vector or
    a nonnegative mass array (already squared values are used as is when
    real and nonnegative and the input is not a report).
    """
    if not 0 < level < 1:
        raise ParameterError("level must lie in (0, 1)")
    if isinstance(report, EvolutionReport):
        m = mass_profile(report)
    else:
        arr = np.asarray(report)
        if np.iscomplexobj(arr) or np.any(arr < 0):
            m = mass_profile(arr)
        else:
            total = arr.sum()
            if not total > 0:
                raise UndefinedProfileError("mass profile of the zero state is undefined")
            m = arr / total
    n = m.size
    lo = hi = int(np.argmax(m))
    acc = m[lo]
    target = level * (1.0 - 1e-14)
    while acc < target and (lo > 0 or hi < n - 1):
        left = m[lo - 1] if lo > 0 else -1.0
        right = m[hi + 1] if hi < n - 1 else -1.0
        if left >= right:
            lo -= 1
            acc += left
        else:
            hi += 1
            acc += right
    return lo, hi
