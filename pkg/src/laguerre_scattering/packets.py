"""Smooth compactly supported test functions on the spectral axis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import ParameterError


@lru_cache(maxsize=1)
def _unit_bump_sq_integral() -> float:
    # int_{-1}^{1} exp(2 - 2/(1-u^2)) du
    val, _ = quad(lambda u: math.exp(2.0 - 2.0 / (1.0 - u * u)), -1.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


@dataclass(frozen=True)
class WavePacketSpec:
    """Bump ``A exp(1 - w^2 / (w^2 - (lam - c)^2)) exp(i m lam)`` on ``[c - w, c + w]``.

    ``A`` is fixed so that the L2 norm equals ``norm`` (1 by default).
    """

    center: float
    half_width: float
    modulation: float = 0.0
    norm: float = 1.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ParameterError(f"half-width must be positive, got {self.half_width}")
        if not self.norm >= 0:
            raise ParameterError("norm must be nonnegative")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.half_width, self.center + self.half_width)

    @property
    def amplitude(self) -> float:
        return self.norm / math.sqrt(self.half_width * _unit_bump_sq_integral())

    @property
    def is_real(self) -> bool:
        return self.modulation == 0.0

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        d = lam - self.center
        w2 = self.half_width ** 2
        inside = d * d < w2
        out = np.zeros(lam.shape, dtype=complex)
        di = d[inside]
        out[inside] = self.amplitude * np.exp(1.0 - w2 / (w2 - di * di)) * np.exp(1j * self.modulation * lam[inside])
        return out

    def gauss_legendre(self, M: int):
        """``M``-point Gauss-Legendre nodes and weights on the support."""
        x, wts = np.polynomial.legendre.leggauss(M)
        lo, hi = self.support
        half = 0.5 * (hi - lo)
        return lo + half * (x + 1.0), half * wts
