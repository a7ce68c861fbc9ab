"""Coefficient families and finite sections of Jacobi operators.

A Jacobi operator acts on half-line sequences as

    (J f)_n = a_{n-1} f_{n-1} + b_n f_n + a_n f_{n+1},   a_{-1} = 0,

and is fully described by its coefficient rules ``a(n) > 0`` and ``b(n)``.
Everything here is finite-section: a :class:`TruncatedJacobiMatrix` is the
leading ``N x N`` block together with the model it came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    CoefficientPositivityError,
    DimensionError,
    ParameterError,
    ShapeError,
)

LAGUERRE = "Laguerre"
HERMITE = "Hermite"
JACOBI_AB = "JacobiAB"
FREE_CHEBYSHEV = "FreeChebyshev"
BIRTH_DEATH = "BirthDeath"
CUSTOM_PERTURBED = "CustomPerturbed"

FAMILIES = (LAGUERRE, HERMITE, JACOBI_AB, FREE_CHEBYSHEV, BIRTH_DEATH, CUSTOM_PERTURBED)
CLASSICAL_FAMILIES = (LAGUERRE, HERMITE, JACOBI_AB, FREE_CHEBYSHEV)


@dataclass(frozen=True)
class PerturbationRule:
    """Decaying perturbation ``amplitude * sign(n) * (n + 1)**(-rho)``.

    ``rho = 0`` gives a constant shift; ``alternating=True`` multiplies by
    ``(-1)**n``.
    """

    amplitude: float
    rho: float = 1.0
    alternating: bool = False

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        val = self.amplitude * (n + 1.0) ** (-self.rho)
        if self.alternating:
            val = val * np.where(np.asarray(n, dtype=np.int64) % 2 == 0, 1.0, -1.0)
        return val

    def to_dict(self) -> dict[str, Any]:
        return {"amplitude": self.amplitude, "rho": self.rho, "alternating": self.alternating}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PerturbationRule":
        return cls(float(d["amplitude"]), float(d.get("rho", 1.0)), bool(d.get("alternating", False)))


@dataclass(frozen=True)
class CoefficientModel:
    """Symbolic descriptor of a Jacobi-operator family.

    Use the constructors :meth:`laguerre`, :meth:`hermite`, :meth:`jacobi_ab`,
    :meth:`free_chebyshev`, :meth:`birth_death` and :meth:`custom_perturbed`
    rather than filling the fields by hand.
    """

    family: str
    p: float | None = None
    alpha: float | None = None
    beta: float | None = None
    base: "CoefficientModel | None" = None
    delta_a: PerturbationRule | None = None
    delta_b: PerturbationRule | None = None

    def __post_init__(self):
        fam = self.family
        if fam not in FAMILIES:
            raise ParameterError(f"unknown family {fam!r}; expected one of {FAMILIES}")
        if fam == LAGUERRE:
            if self.p is None or not self.p > -1:
                raise ParameterError(f"Laguerre needs p > -1, got {self.p}")
        elif fam == JACOBI_AB:
            if self.alpha is None or self.beta is None or not (self.alpha > -1 and self.beta > -1):
                raise ParameterError(f"JacobiAB needs alpha, beta > -1, got ({self.alpha}, {self.beta})")
        elif fam == BIRTH_DEATH:
            if self.alpha is None or not self.alpha > 0.5:
                raise ParameterError(f"BirthDeath needs alpha > 1/2, got {self.alpha}")
        elif fam == CUSTOM_PERTURBED:
            if self.base is None:
                raise ParameterError("CustomPerturbed needs a base model")
            if self.delta_a is None and self.delta_b is None:
                raise ParameterError("CustomPerturbed needs at least one perturbation rule")

    # constructors
    @classmethod
    def laguerre(cls, p: float) -> "CoefficientModel":
        return cls(LAGUERRE, p=float(p))

    @classmethod
    def hermite(cls) -> "CoefficientModel":
        return cls(HERMITE)

    @classmethod
    def jacobi_ab(cls, alpha: float, beta: float) -> "CoefficientModel":
        return cls(JACOBI_AB, alpha=float(alpha), beta=float(beta))

    @classmethod
    def free_chebyshev(cls) -> "CoefficientModel":
        return cls(FREE_CHEBYSHEV)

    @classmethod
    def birth_death(cls, alpha: float) -> "CoefficientModel":
        return cls(BIRTH_DEATH, alpha=float(alpha))

    @classmethod
    def custom_perturbed(cls, base: "CoefficientModel", delta_a: PerturbationRule | None = None,
                         delta_b: PerturbationRule | None = None) -> "CoefficientModel":
        return cls(CUSTOM_PERTURBED, base=base, delta_a=delta_a, delta_b=delta_b)

    @property
    def is_classical(self) -> bool:
        return self.family in CLASSICAL_FAMILIES

    @property
    def jacobi_parameters(self) -> tuple[float, float]:
        """(alpha, beta) of the Jacobi weight; FreeChebyshev is (1/2, 1/2)."""
        if self.family == FREE_CHEBYSHEV:
            return (0.5, 0.5)
        if self.family == JACOBI_AB:
            return (self.alpha, self.beta)
        raise ParameterError(f"{self.family} has no Jacobi weight parameters")

    def label(self) -> str:
        if self.family == LAGUERRE:
            return f"Laguerre(p={self.p:g})"
        if self.family == JACOBI_AB:
            return f"JacobiAB(alpha={self.alpha:g}, beta={self.beta:g})"
        if self.family == BIRTH_DEATH:
            return f"BirthDeath(alpha={self.alpha:g})"
        if self.family == CUSTOM_PERTURBED:
            return f"CustomPerturbed({self.base.label()})"
        return self.family

    # JSON descriptor {"family": ..., "params": {...}}
    def to_dict(self) -> dict[str, Any]:
        params: dict[str, Any] = {}
        if self.family == LAGUERRE:
            params = {"p": self.p}
        elif self.family == JACOBI_AB:
            params = {"alpha": self.alpha, "beta": self.beta}
        elif self.family == BIRTH_DEATH:
            params = {"alpha": self.alpha}
        elif self.family == CUSTOM_PERTURBED:
            params = {
                "base": self.base.to_dict(),
                "delta_a": None if self.delta_a is None else self.delta_a.to_dict(),
                "delta_b": None if self.delta_b is None else self.delta_b.to_dict(),
            }
        return {"family": self.family, "params": params}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CoefficientModel":
        fam = d["family"]
        params = d.get("params") or {}
        if fam == LAGUERRE:
            return cls.laguerre(params["p"])
        if fam == HERMITE:
            return cls.hermite()
        if fam == JACOBI_AB:
            return cls.jacobi_ab(params["alpha"], params["beta"])
        if fam == FREE_CHEBYSHEV:
            return cls.free_chebyshev()
        if fam == BIRTH_DEATH:
            return cls.birth_death(params["alpha"])
        if fam == CUSTOM_PERTURBED:
            da = params.get("delta_a")
            db = params.get("delta_b")
            return cls.custom_perturbed(
                cls.from_dict(params["base"]),
                None if da is None else PerturbationRule.from_dict(da),
                None if db is None else PerturbationRule.from_dict(db),
            )
        raise ParameterError(f"unknown family {fam!r}")


def _check_index(n) -> np.ndarray:
    n = np.asarray(n)
    if n.size and (np.any(n < 0) or not np.issubdtype(n.dtype, np.integer)):
        if not np.all(np.equal(np.mod(n, 1), 0)) or np.any(n < 0):
            raise ParameterError("indices must be nonnegative integers")
    return n.astype(np.int64)


def _a_values(model: CoefficientModel, n: np.ndarray) -> np.ndarray:
    fam = model.family
    nf = n.astype(float)
    if fam == LAGUERRE:
        return np.sqrt((nf + 1.0) * (nf + 1.0 + model.p))
    if fam == HERMITE:
        return np.sqrt((nf + 1.0) / 2.0)
    if fam == FREE_CHEBYSHEV:
        return np.full(nf.shape, 0.5)
    if fam == BIRTH_DEATH:
        return nf + model.alpha
    if fam == JACOBI_AB:
        a, _ = _jacobi_arrays(model, int(n.max()) + 2 if n.size else 1)
        return a[n]
    base = _a_values(model.base, n)
    if model.delta_a is None:
        return base
    return base + model.delta_a(n)


def _b_values(model: CoefficientModel, n: np.ndarray) -> np.ndarray:
    fam = model.family
    nf = n.astype(float)
    if fam == LAGUERRE:
        return 2.0 * nf + model.p + 1.0
    if fam in (HERMITE, FREE_CHEBYSHEV):
        return np.zeros(nf.shape)
    if fam == BIRTH_DEATH:
        return 2.0 * nf + 2.0 * model.alpha - 1.0
    if fam == JACOBI_AB:
        _, b = _jacobi_arrays(model, int(n.max()) + 1 if n.size else 1)
        return b[n]
    base = _b_values(model.base, n)
    if model.delta_b is None:
        return base
    return base + model.delta_b(n)


def _jacobi_arrays(model: CoefficientModel, n_needed: int):
    # lazy: the measure-to-recurrence machinery lives in the spectral module
    from .spectral import jacobi_ab_recurrence

    return jacobi_ab_recurrence(model.alpha, model.beta, n_needed)


def coeff_a(model: CoefficientModel, n):
    """Off-diagonal coefficient a(n); accepts an int or an integer array."""
    idx = _check_index(n)
    vals = _a_values(model, np.atleast_1d(idx))
    if np.any(~(vals > 0)):
        bad = np.atleast_1d(idx)[~(vals > 0)][0]
        raise CoefficientPositivityError(f"{model.label()}: a({bad}) is not positive")
    return float(vals[0]) if idx.ndim == 0 else vals


def coeff_b(model: CoefficientModel, n):
    """Diagonal coefficient b(n); accepts an int or an integer array."""
    idx = _check_index(n)
    vals = _b_values(model, np.atleast_1d(idx))
    return float(vals[0]) if idx.ndim == 0 else vals


@dataclass(frozen=True, eq=False)
class TruncatedJacobiMatrix:
    """Leading ``N x N`` block of a Jacobi operator."""

    N: int
    a: np.ndarray
    b: np.ndarray
    model: CoefficientModel | None = field(default=None)

    def __post_init__(self):
        if self.N < 1:
            raise DimensionError("N must be at least 1")
        if self.a.shape != (self.N - 1,) or self.b.shape != (self.N,):
            raise ShapeError("need len(a) == N - 1 and len(b) == N")
        if np.any(~(self.a > 0)):
            raise CoefficientPositivityError("off-diagonal entries must be positive")
        self.a.setflags(write=False)
        self.b.setflags(write=False)

    def dense(self) -> np.ndarray:
        return np.diag(self.b) + np.diag(self.a, 1) + np.diag(self.a, -1)

    def gershgorin(self) -> tuple[float, float]:
        """Enclosing interval [lo, hi] of the spectrum."""
        r = np.zeros(self.N)
        r[:-1] += self.a
        r[1:] += self.a
        return float(np.min(self.b - r)), float(np.max(self.b + r))

    def norm1(self) -> float:
        r = np.abs(self.b).copy()
        r[:-1] += self.a
        r[1:] += self.a
        return float(r.max())

    def apply(self, f) -> np.ndarray:
        return apply(self, f)


def truncate(model: CoefficientModel, N: int) -> TruncatedJacobiMatrix:
    """Finite section of ``model`` of size ``N``."""
    if int(N) != N or N < 1:
        raise DimensionError(f"N must be a positive integer, got {N}")
    N = int(N)
    b = np.asarray(coeff_b(model, np.arange(N)), dtype=float)
    a = np.asarray(coeff_a(model, np.arange(N - 1)), dtype=float) if N > 1 else np.zeros(0)
    return TruncatedJacobiMatrix(N, a.copy(), b.copy(), model)


def apply(J: TruncatedJacobiMatrix, f) -> np.ndarray:
    """Tridiagonal product ``J f`` with ``a_{-1} = a_{N-1} = 0``.

    ``f`` may carry extra trailing axes (columns are transformed independently).
    """
    f = np.asarray(f)
    if f.shape[:1] != (J.N,):
        raise ShapeError(f"expected leading length {J.N}, got shape {f.shape}")
    ext = (slice(None),) + (None,) * (f.ndim - 1)
    out = J.b[ext] * f
    if J.N > 1:
        out[:-1] += J.a[ext] * f[1:]
        out[1:] += J.a[ext] * f[:-1]
    return out


def carleman_partial_sum(model: CoefficientModel, N: int) -> float:
    """Partial sum of ``1 / a(n)`` over ``n < N``."""
    if N < 1:
        raise DimensionError("N must be at least 1")
    return float(math.fsum(1.0 / np.asarray(coeff_a(model, np.arange(N)), dtype=float)))
