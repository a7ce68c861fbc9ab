"""Amplitude and phase of orthonormal polynomials deep in the bulk.

For large n, P_n(lam) oscillates like 2 kappa(lam) n^{-r} cos(Omega_n(lam))
with dOmega_n/dlam ~ omega(lam) n^s. The closed forms satisfy
2r + s = 1 and 2 pi tau kappa^2 = s omega. Here both are checked from the
closed forms, then kappa, omega and r are re-estimated from P_2000..P_8000.

Run: python3 demos/relations.py
"""

import numpy as np

from laguerre_scattering import CoefficientModel, envelope_fit, universal_relation_check

cases = [
    (CoefficientModel.laguerre(0.0), np.linspace(0.1, 10, 101), 1.0),
    (CoefficientModel.hermite(), np.linspace(-3, 3, 101), 0.0),
    (CoefficientModel.jacobi_ab(1.5, 0.5), np.linspace(0.01, 0.99, 101), 0.4),
]
for model, grid, lam in cases:
    r1, r2 = universal_relation_check(model, grid)
    dev = envelope_fit(model, lam, (2000, 8000)).deviations(model, lam)
    print(f"{model.label():24s} residuals {r1:.1e} {r2:.1e}   fit at lam={lam:g}: "
          f"kappa {100 * dev['kappa_rel']:.2f}%  omega {100 * dev['omega_rel']:.2f}%  r {dev['r_abs']:.1e}")
