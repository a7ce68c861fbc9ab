"""Tridiagonal diagonalization, Gauss rules and the diagonalizing transforms.

``phi_adjoint`` maps a function of the spectral variable to coefficients,
``f_n = int phi_n(lam) g(lam) dlam``; ``phi_forward`` goes back,
``(Phi f)(lam) = sum_n phi_n(lam) f_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, roots_jacobi

from .errors import DiscretizationError, DomainError, NumericalFailure, ParameterError
from .operator_core import (
    FREE_CHEBYSHEV,
    HERMITE,
    JACOBI_AB,
    LAGUERRE,
    CoefficientModel,
    TruncatedJacobiMatrix,
    truncate,
)
from .orthopoly import (
    _require_classical,
    eigenfunction_project,
    eigenfunction_table,
    log_christoffel_sum,
    scaled_poly_table,
    spectral_weight,
    SpectralWeight,
    support as measure_support,
)

RESIDUAL_TOL = 1e-12
FULL_ORTHO_CHECK_MAX_N = 1024


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a finite section; ``weights[j] = vectors[0, j]**2``."""

    N: int
    eigenvalues: np.ndarray
    vectors: np.ndarray
    weights: np.ndarray
    worst_residual: float

    def apply_function(self, fn: Callable, f) -> np.ndarray:
        """``U fn(Lambda) U^T f`` for a scalar function ``fn`` of the eigenvalues."""
        f = np.asarray(f)
        coeffs = self.vectors.T @ f
        mult = fn(self.eigenvalues).reshape((-1,) + (1,) * (f.ndim - 1))
        return self.vectors @ (mult * coeffs)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, values) -> complex | float:
        return self.weights @ np.asarray(values)


def _fix_signs(U: np.ndarray) -> None:
    # first nonzero entry of each column positive
    mag = np.abs(U)
    thresh = np.finfo(float).tiny * 1e3
    first = np.argmax(mag > thresh, axis=0)
    signs = np.sign(U[first, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    U *= signs


def eig_tridiag(J: TruncatedJacobiMatrix, *, check_orthogonality: bool | None = None) -> SpectralDecomposition:
    """Full eigendecomposition with residual (and orthogonality) certificates.

    Orthogonality is checked in full (an ``O(N^3)`` product) only up to
    ``N = 1024`` unless requested explicitly.
    """
    try:
        lam, U = eigh_tridiagonal(J.b, J.a, lapack_driver="stemr")
    except Exception as exc:  # LAPACK convergence failure
        raise NumericalFailure(f"tridiagonal eigensolver failed: {exc}", float("inf")) from exc
    U = np.ascontiguousarray(U)
    _fix_signs(U)
    scale = J.norm1() + np.abs(lam)
    JU = J.b[:, None] * U
    JU[:-1] += J.a[:, None] * U[1:]
    JU[1:] += J.a[:, None] * U[:-1]
    JU -= U * lam
    res = np.linalg.norm(JU, axis=0) / scale
    worst = float(res.max())
    if not worst <= RESIDUAL_TOL:
        raise NumericalFailure("eigen-residual above tolerance", worst)
    if check_orthogonality is None:
        check_orthogonality = J.N <= FULL_ORTHO_CHECK_MAX_N
    if check_orthogonality:
        G = U.T @ U
        G[np.diag_indices_from(G)] -= 1.0
        dev = float(np.abs(G).max())
        if not dev <= RESIDUAL_TOL * max(1.0, J.N / 64):
            raise NumericalFailure("eigenvectors lost orthogonality", dev)
    w = U[0] ** 2
    for arr in (lam, U, w):
        arr.setflags(write=False)
    return SpectralDecomposition(J.N, lam, U, w, worst)


@lru_cache(maxsize=3)
def cached_decomposition(model: CoefficientModel, N: int) -> SpectralDecomposition:
    """Memoized ``eig_tridiag(truncate(model, N))``; a few entries only (memory)."""
    return eig_tridiag(truncate(model, N))


def gauss_quadrature(model: CoefficientModel, M: int) -> QuadratureRule:
    """Golub-Welsch rule for the family's probability measure.

    Nodes are eigenvalues of the ``M x M`` section. Weights are computed as
    Christoffel numbers ``1 / sum_{n<M} P_n(node)^2``, which equal the squared
    first eigenvector components but keep full relative accuracy when tiny.
    """
    _require_classical(model)
    if M < 1:
        raise ParameterError("M must be at least 1")
    J = truncate(model, M)
    if M == 1:
        nodes = J.b.copy()
    else:
        nodes = eigh_tridiagonal(J.b, J.a, eigvals_only=True)
    nodes = np.sort(nodes)
    w = np.exp(-log_christoffel_sum(model, nodes, M))
    return QuadratureRule(nodes, w, measure_support(model))


def gauss_quadrature_log_weights(model: CoefficientModel, M: int):
    """Nodes and natural-log weights of the Golub-Welsch rule."""
    J = truncate(model, M)
    nodes = J.b.copy() if M == 1 else np.sort(eigh_tridiagonal(J.b, J.a, eigvals_only=True))
    return nodes, -log_christoffel_sum(model, nodes, M)


# ----------------------------------------------------------- measure -> recurrence

def _discretize(weight: SpectralWeight, N: int, M: int):
    fam = weight.model.family
    if fam in (JACOBI_AB, FREE_CHEBYSHEV):
        # first-kind Gauss-Chebyshev: int h = int (h sqrt(1-x^2)) / sqrt(1-x^2)
        j = np.arange(1, M + 1)
        x = np.cos((2 * j - 1) * math.pi / (2 * M))[::-1]
        w = (math.pi / M) * np.sqrt(1.0 - x * x) * weight(x)
        return x, w
    if fam == LAGUERRE:
        # Gauss-Jacobi for the lam^p factor on [0, L]; mass beyond L is negligible
        p = weight.model.p
        L = 8.0 * N + 120.0
        u, om = roots_jacobi(M, 0.0, p)
        x = 0.5 * L * (u + 1.0)
        w = om * np.exp((p + 1) * math.log(0.5 * L) - x - gammaln(p + 1))
        return x, w
    if fam == HERMITE:
        L = math.sqrt(4.0 * N + 2.0) + 10.0
        u, om = np.polynomial.legendre.leggauss(M)
        x = L * u
        return x, L * om * weight(x)
    raise DomainError(f"no discretization for {weight.model.label()}")


def recurrence_from_measure(weight: SpectralWeight, N: int, M: int | None = None):
    """Orthonormal recurrence coefficients ``(a[0..N-2], b[0..N-1])`` of a measure.

    Discretized Stieltjes procedure on an ``M``-node rule (``M >= 4N``).
    Gauss-Chebyshev nodes are used on (-1, 1), which integrate the Jacobi
    weight times polynomials exactly when both exponents are half-integers.
    """
    if N < 1:
        raise ParameterError("N must be at least 1")
    if M is None:
        M = max(8 * N, 2048)
    if M < 4 * N:
        raise DiscretizationError(f"need M >= 4N, got M={M}, N={N}")
    x, w = _discretize(weight, N, M)
    total = w.sum()
    w = w / total
    a = np.empty(N - 1)
    b = np.empty(N)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for n in range(N):
        wc = w * cur
        b[n] = wc @ (x * cur)
        if n == N - 1:
            break
        nxt = (x - b[n]) * cur
        if n:
            nxt -= a[n - 1] * prev
        an = math.sqrt(w @ (nxt * nxt))
        if not an > 1e-14:
            raise DiscretizationError(f"a[{n}] lost positivity ({an:.3e}); increase M")
        a[n] = an
        prev, cur = cur, nxt / an
    return a, b


@lru_cache(maxsize=8)
def _jacobi_ab_table(alpha: float, beta: float, size: int):
    a, b = recurrence_from_measure(spectral_weight(CoefficientModel.jacobi_ab(alpha, beta)), size)
    a.setflags(write=False)
    b.setflags(write=False)
    return a, b


def jacobi_ab_recurrence(alpha: float, beta: float, n_needed: int):
    """Cached coefficient arrays of length at least ``n_needed`` for JacobiAB."""
    size = 256
    while size < n_needed + 1:
        size *= 2
    return _jacobi_ab_table(float(alpha), float(beta), size)


# ------------------------------------------------------------------ transforms

@dataclass(frozen=True)
class FunctionProfile:
    """A function on the spectral axis with a compact support interval."""

    func: Callable
    support: tuple[float, float]
    max_frequency: float = 0.0

    def __call__(self, lam):
        return self.func(lam)


@dataclass(frozen=True, eq=False)
class TransformedProfile:
    """``multiplier(lam) * (Phi f)(lam)`` restricted to ``support``."""

    model: CoefficientModel
    coeffs: np.ndarray
    support: tuple[float, float]
    multiplier: Callable | None = None
    max_frequency: float = 0.0

    def __call__(self, lam):
        val = phi_forward(self.model, self.coeffs, lam)
        if self.multiplier is not None:
            val = val * self.multiplier(np.asarray(lam, dtype=float))
        return val


def _check_support(model: CoefficientModel, lo: float, hi: float) -> None:
    s_lo, s_hi = measure_support(model)
    if not (lo > s_lo and hi < s_hi and lo < hi):
        raise DomainError(f"support [{lo}, {hi}] is not inside the open spectral support of {model.label()}")


def local_frequency(model: CoefficientModel, N: int, lo: float, hi: float) -> float:
    """Largest lam-frequency of ``phi_n`` for ``n < N`` on ``[lo, hi]``."""
    fam = model.family
    if fam == LAGUERRE:
        return math.sqrt(N / lo) + 1.0
    if fam == HERMITE:
        return math.sqrt(2.0 * N + 1.0) + max(abs(lo), abs(hi))
    edge = max(abs(lo), abs(hi))
    return (N + 2.0) / math.sqrt(1.0 - edge * edge)


def _profile_frequency(g) -> float:
    if hasattr(g, "modulation"):
        return abs(g.modulation)
    return float(getattr(g, "max_frequency", 0.0))


def adjoint_node_count(model: CoefficientModel, g, N: int) -> int:
    lo, hi = g.support
    K = local_frequency(model, N, lo, hi) + _profile_frequency(g)
    return int(max(201, 201 + math.ceil(1.5 * K * (hi - lo) / 2)))


def _adjoint_at(model, g, N, M):
    lo, hi = g.support
    x, om = np.polynomial.legendre.leggauss(M)
    half = 0.5 * (hi - lo)
    lam = lo + half * (x + 1.0)
    vals = np.asarray(g(lam)) * (half * om)
    return eigenfunction_project(model, N, lam, vals)


def phi_adjoint(model: CoefficientModel, g, N: int, *, M: int | None = None, validate: bool = True,
                tol: float = 1e-10, max_M: int = 1 << 15) -> np.ndarray:
    """Coefficients ``f_n = int phi_n g`` for ``n < N`` by Gauss-Legendre on ``supp g``.

    ``g`` is any callable with a ``support`` attribute (a :class:`WavePacketSpec`,
    :class:`FunctionProfile` or :class:`TransformedProfile`). With ``validate``
    the node count is doubled until the result moves by less than ``tol``
    (relative to ``max(1, ||f||)``).
    """
    _require_classical(model)
    if N < 1:
        raise ParameterError("N must be at least 1")
    lo, hi = g.support
    _check_support(model, lo, hi)
    if M is None:
        M = adjoint_node_count(model, g, N)
    f = _adjoint_at(model, g, N, M)
    if not validate:
        return f
    while True:
        M2 = 2 * M
        f2 = _adjoint_at(model, g, N, M2)
        change = float(np.linalg.norm(f2 - f)) / max(1.0, float(np.linalg.norm(f2)))
        if change < tol:
            return f2
        if M2 >= max_M:
            raise NumericalFailure("adjoint quadrature did not settle", change)
        M, f = M2, f2


def phi_forward(model: CoefficientModel, f, lam_grid, *, chunk: int = 2048) -> np.ndarray:
    """``sum_n phi_n(lam) f_n`` on the grid (chunked over grid points)."""
    _require_classical(model)
    f = np.asarray(f)
    lam = np.asarray(lam_grid, dtype=float)
    flat = lam.reshape(-1)
    out = np.empty(flat.shape, dtype=np.result_type(f.dtype, float))
    for start in range(0, flat.size, chunk):
        sl = slice(start, start + chunk)
        tab = eigenfunction_table(model, f.shape[0], flat[sl])
        out[sl] = tab.T @ f if not np.iscomplexobj(f) else tab.T @ f.real + 1j * (tab.T @ f.imag)
    return out.reshape(lam.shape)


def phi_roundtrip(model: CoefficientModel, f, *, M: int | None = None) -> np.ndarray:
    """``Phi^* Phi f`` integrated over the whole support.

    On the span of the first ``N`` coordinates the integrand is a polynomial
    of degree ``<= 2N - 2`` against the spectral measure, so an ``M >= N``
    node Gauss rule of that measure computes it exactly; the result therefore
    measures the consistency of recurrence, nodes and weights.
    """
    _require_classical(model)
    f = np.asarray(f)
    N = f.shape[0]
    if M is None:
        M = N + 32
    if M < N:
        raise ParameterError("need M >= N")
    nodes, logw = gauss_quadrature_log_weights(model, M)
    V = scaled_poly_table(model, nodes, N, 0.5 * logw)
    return V @ (V.T @ f)
