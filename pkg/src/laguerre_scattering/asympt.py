"""Explicit large-time propagators and amplitude/phase diagnostics.

Each propagator maps a spectral profile ``g`` to a sequence that tracks
``exp(-i J t) Phi^* g`` as ``|t|`` grows:

* Laguerre: ``(-1)^n e^{i n/t} |t|^{-1} g(n / t^2)`` (times a global phase);
* Jacobi: a two-branch stationary-phase sum in ``xi = n / |t|``, zero for ``n >= |t|``;
* Hermite: ``i^{-+n} (2n+1)^{-1/4} g_hat(t -+ sqrt(2n+1))``.

The upper sign is used for ``t > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, UnsupportedFamilyError
from .evolution import WavePacketSpec, choose_truncation, evolve, prepare_state
from .operator_core import FREE_CHEBYSHEV, HERMITE, JACOBI_AB, LAGUERRE, CoefficientModel
from .orthopoly import amplitude_phase, eval_poly_derivative_sequence, weight

XI_MARGIN = (0.02, 0.98)


@dataclass(frozen=True, eq=False)
class AsymptoticState:
    model: CoefficientModel
    t: float
    state: np.ndarray
    window: tuple[int, int]
    sign: int

    @property
    def mass(self) -> np.ndarray:
        return np.abs(self.state) ** 2

    method = "asymptotic"


def _branch(t: float, sign: int | None) -> int:
    if t == 0:
        raise DomainError("propagators need t != 0")
    if sign is None:
        return 1 if t > 0 else -1
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    return sign


def _window(vals) -> tuple[int, int]:
    nz = np.nonzero(np.abs(vals) > 0)[0]
    return (int(nz[0]), int(nz[-1])) if nz.size else (0, -1)


def laguerre_propagator(p: float, g, t: float, N: int, *, sign: int | None = None,
                        include_phase: bool = True) -> AsymptoticState:
    """``e^{-+i(p+1)pi/2} (-1)^n e^{i n/t} |t|^{-1} g(n/t^2)`` for ``n < N``.

    ``include_phase=False`` drops the constant global factor.
    """
    sg = _branch(t, sign)
    n = np.arange(N)
    vals = np.where(n % 2 == 0, 1.0, -1.0) * np.exp(1j * n / t) / abs(t) * np.asarray(g(n / (t * t)))
    if include_phase:
        vals = vals * np.exp(-1j * sg * (p + 1) * math.pi / 2)
    return AsymptoticState(CoefficientModel.laguerre(p), float(t), vals, _window(vals), sg)


def psi(xi):
    """Stationary phase ``xi arccos(xi) - sqrt(1 - xi^2)``."""
    xi = np.asarray(xi, dtype=float)
    return xi * np.arccos(xi) - np.sqrt(1.0 - xi * xi)


def jacobi_propagator(alpha: float, beta: float, g, t: float, N: int, *,
                      sign: int | None = None, margin: tuple[float, float] = XI_MARGIN) -> AsymptoticState:
    """Two-branch propagator for Jacobi-type operators.

    With ``xi = n/|t|`` and ``gamma = (alpha + beta + 1)/2``::

        i^{-+n} e^{+-i(alpha-beta)pi/4} |t|^{-1/2}
            (e^{i psi t} h_+(xi) + e^{-i psi t} h_-(xi)),
        h_+-(xi) = e^{+-i s pi/4} e^{+-i s gamma arccos xi} xi^{1/2} (1-xi^2)^{-1/4} g(+-sqrt(1-xi^2)),

    where ``s = sgn t``: for negative times the two inner phase factors are
    conjugated, which is what stationary phase gives for ``e^{-i lam t}`` with
    ``t < 0``. Entries with ``xi`` outside ``margin`` (in particular all
    ``n >= |t|``) are zero.
    """
    sg = _branch(t, sign)
    s = 1 if t > 0 else -1
    gam = (alpha + beta + 1.0) / 2.0
    n = np.arange(N)
    xi = n / abs(t)
    keep = (xi >= margin[0]) & (xi <= margin[1]) & (xi < 1.0)
    x = xi[keep]
    root = np.sqrt(1.0 - x * x)
    base = np.sqrt(x) * (1.0 - x * x) ** -0.25
    ac = np.arccos(x)
    h_plus = np.exp(1j * s * (math.pi / 4 + gam * ac)) * base * np.asarray(g(root))
    h_minus = np.exp(-1j * s * (math.pi / 4 + gam * ac)) * base * np.asarray(g(-root))
    ph = psi(x) * t
    inner = np.exp(1j * ph) * h_plus + np.exp(-1j * ph) * h_minus
    nk = n[keep]
    outer = (1j) ** ((-sg * nk) % 4) * np.exp(1j * sg * (alpha - beta) * math.pi / 4) / math.sqrt(abs(t))
    vals = np.zeros(N, dtype=complex)
    vals[keep] = outer * inner
    return AsymptoticState(CoefficientModel.jacobi_ab(alpha, beta), float(t), vals, _window(vals), sg)


def _profile_support(g) -> tuple[float, float]:
    sup = getattr(g, "support", None)
    if sup is None:
        raise ParameterError("profile needs a compact support interval")
    return sup


def fourier_transform(g, x_grid, *, M: int | None = None, chunk: int = 4096) -> np.ndarray:
    """``(2 pi)^{-1/2} int e^{-i x lam} g(lam) dlam`` by Gauss-Legendre on ``supp g``."""
    x = np.asarray(x_grid, dtype=float)
    lo, hi = _profile_support(g)
    if M is None:
        freq = float(np.abs(x).max(initial=0.0)) + abs(getattr(g, "modulation", 0.0))
        M = int(400 + math.ceil(1.5 * freq * (hi - lo) / 2))
    u, om = np.polynomial.legendre.leggauss(M)
    half = 0.5 * (hi - lo)
    lam = lo + half * (u + 1.0)
    vals = np.asarray(g(lam)) * (half * om) / math.sqrt(2 * math.pi)
    flat = x.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, chunk):
        sl = slice(start, start + chunk)
        out[sl] = np.exp(-1j * np.outer(flat[sl], lam)) @ vals
    return out.reshape(x.shape)


def hermite_propagator(g, t: float, N: int, *, sign: int | None = None) -> AsymptoticState:
    """``i^{-+n} (2n+1)^{-1/4} g_hat(t -+ sqrt(2n+1))`` for ``n < N``.

    ``g_hat`` is evaluated directly on the points ``t -+ sqrt(2n+1)``.
    """
    sg = _branch(t, sign)
    n = np.arange(N)
    root = np.sqrt(2.0 * n + 1.0)
    ghat = fourier_transform(g, t - sg * root)
    vals = (1j) ** ((-sg * n) % 4) * (2.0 * n + 1.0) ** -0.25 * ghat
    return AsymptoticState(CoefficientModel.hermite(), float(t), vals, _window(vals), sg)


def hermite_parseval_sum(g, t: float, *, sign: int = 1, reach: float = 80.0) -> float:
    """``sum_n (2n+1)^{-1/2} |g_hat(t -+ sqrt(2n+1))|^2`` over ``sqrt(2n+1) <= |t| + reach``."""
    n_max = int(((abs(t) + reach) ** 2 - 1) / 2) + 1
    n = np.arange(n_max)
    root = np.sqrt(2.0 * n + 1.0)
    ghat = fourier_transform(g, t - sign * root)
    return float(np.sum(np.abs(ghat) ** 2 / root))


def propagate(model: CoefficientModel, g, t: float, N: int, *, sign: int | None = None) -> AsymptoticState:
    """Family dispatch including the global phase that multiplies ``U(t)``."""
    fam = model.family
    if fam == LAGUERRE:
        return laguerre_propagator(model.p, g, t, N, sign=sign)
    if fam in (JACOBI_AB, FREE_CHEBYSHEV):
        al, be = model.jacobi_parameters
        st = jacobi_propagator(al, be, g, t, N, sign=sign)
        return AsymptoticState(model, st.t, st.state, st.window, st.sign)
    if fam == HERMITE:
        return hermite_propagator(g, t, N, sign=sign)
    raise UnsupportedFamilyError(f"no explicit propagator for {model.label()}")


@dataclass(frozen=True, eq=False)
class AsymptoticComparison:
    t: float
    N: int
    error: float
    norm: float
    leakage: float
    evolved: np.ndarray
    predicted: np.ndarray


def compare_with_asymptotics(model: CoefficientModel, packet: WavePacketSpec, t: float, *,
                             sign: int | None = None, N: int | None = None,
                             method: str = "auto") -> AsymptoticComparison:
    """Evolve ``Phi^* g`` and measure its distance to the explicit propagator."""
    if N is None:
        N = choose_truncation(model, packet, t)
    f = prepare_state(model, packet, N, tail_tol=None)
    rep = evolve(model, f, t, N, method=method, strict=False)
    pred = propagate(model, packet, t, N, sign=sign).state
    err = float(np.linalg.norm(rep.state - pred))
    return AsymptoticComparison(float(t), N, err, float(np.linalg.norm(f)), rep.leakage, rep.state, pred)


def asymptotic_error(model: CoefficientModel, packet: WavePacketSpec, t: float, sign: int | None = None,
                     *, N: int | None = None, method: str = "auto") -> float:
    """``|| exp(-i J t) Phi^* g - U(t) g ||`` over the first ``N`` coordinates."""
    return compare_with_asymptotics(model, packet, t, sign=sign, N=N, method=method).error


def universal_relation_check(model: CoefficientModel, lam_grid) -> tuple[float, float]:
    """Residuals ``(|2r + s - 1|, max |2 pi tau kappa^2 - s omega|)`` from closed forms."""
    prof = amplitude_phase(model)
    lam = np.asarray(lam_grid, dtype=float)
    if not np.all(prof.contains(lam)):
        raise DomainError("grid leaves the validity region of the asymptotic profile")
    r1 = abs(2 * prof.r + prof.s - 1)
    lhs = 2 * math.pi * weight(model, lam) * prof.kappa(lam) ** 2
    rhs = prof.s * prof.omega(lam)
    return float(r1), float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class EnvelopeFit:
    kappa: float
    omega: float
    r: float
    s: float

    def deviations(self, model: CoefficientModel, lam: float) -> dict:
        prof = amplitude_phase(model)
        k = float(prof.kappa(lam))
        w = float(prof.omega(lam))
        return {
            "kappa_rel": abs(self.kappa - k) / k,
            "omega_rel": abs(self.omega - w) / w,
            "r_abs": abs(self.r - prof.r),
            "s_abs": abs(self.s - prof.s),
        }


def envelope_fit(model: CoefficientModel, lam: float, n_window: tuple[int, int], *, blocks: int = 16) -> EnvelopeFit:
    """Empirical ``(kappa, omega, r, s)`` from ``P_n(lam)`` on ``n_window``.

    ``P_n`` and ``dP_n/dlam`` form a quadrature pair: ``dP_n`` oscillates with
    the phase derivative ``omega n^s`` times the amplitude. Block RMS ratios
    give ``omega n^s`` (log-log slope gives ``s``), the pair gives the
    amplitude ``2 kappa n^{-r}`` (log-log slope gives ``r``). ``kappa`` and
    ``omega`` are read off with the family's closed-form exponents.
    """
    n0, n1 = int(n_window[0]), int(n_window[1])
    if n0 < 1 or n1 < 2 * n0 or blocks < 2:
        raise ParameterError("need 1 <= N0 and N1 >= 2 N0")
    prof = amplitude_phase(model)
    if not prof.contains(lam) and not (model.family in (JACOBI_AB, FREE_CHEBYSHEV) and -1 < lam < 1):
        raise DomainError("lambda outside the validity region")
    P, D = eval_poly_derivative_sequence(model, float(lam), n1 + 1)
    n = np.arange(n0, n1 + 1)
    P, D = P[n0:], D[n0:]
    edges = np.unique(np.round(np.geomspace(n0, n1 + 1, blocks + 1)).astype(int)) - n0
    centers, ratio = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        rp = math.sqrt(np.mean(P[lo:hi] ** 2))
        rd = math.sqrt(np.mean(D[lo:hi] ** 2))
        centers.append(math.exp(np.mean(np.log(n[lo:hi]))))
        ratio.append(rd / rp)
    centers = np.array(centers)
    ratio = np.array(ratio)
    s_hat = float(np.polyfit(np.log(centers), np.log(ratio), 1)[0])
    omega_hat = float(np.median(ratio / centers ** prof.s))
    amp = np.sqrt(P ** 2 + (D / (omega_hat * n.astype(float) ** prof.s)) ** 2)
    r_hat = -float(np.polyfit(np.log(n), np.log(amp), 1)[0])
    kappa_hat = 0.5 * float(np.median(amp * n.astype(float) ** prof.r))
    return EnvelopeFit(kappa_hat, omega_hat, r_hat, s_hat)
