"""Explicit large-time propagators against lattice evolution.

Each family has an explicit sequence U(t) g built from the spectral profile
alone. The distance between exp(-i J t) Phi^* g and U(t) g shrinks as |t|
grows. For the Hermite operator it is already small at t = 10; for the
other two families the approach is slow with these steep bump profiles.

Run: python3 demos/asymptotics.py
"""

from laguerre_scattering import CoefficientModel, WavePacketSpec, asymptotic_error
from laguerre_scattering.asympt import hermite_parseval_sum

cases = [
    (CoefficientModel.laguerre(0.0), WavePacketSpec(1.0, 0.5), (10.0, 20.0, 40.0)),
    (CoefficientModel.free_chebyshev(), WavePacketSpec(0.5, 0.3), (25.0, 50.0, 100.0)),
    (CoefficientModel.jacobi_ab(1.5, 0.5), WavePacketSpec(0.5, 0.3), (25.0, 50.0, 100.0)),
    (CoefficientModel.hermite(), WavePacketSpec(0.0, 1.0), (10.0, 20.0, 40.0)),
]
for model, packet, times in cases:
    errs = [asymptotic_error(model, packet, t) for t in times]
    back = asymptotic_error(model, packet, -times[-1])
    print(f"{model.label():28s} " + "  ".join(f"t={t:g}: {e:.3f}" for t, e in zip(times, errs))
          + f"   (t={-times[-1]:g}: {back:.3f})")

g = WavePacketSpec(0.0, 1.0)
for t in (25.0, 50.0):
    print(f"Hermite Fourier-side mass sum at t = {t:g}: {hermite_parseval_sum(g, t):.8f} (||g||^2 = 1)")
