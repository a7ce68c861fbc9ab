"""Wave operators between two Laguerre operators.

For p != q the operators J_p and J_q differ by a term that tends to the
constant (q - p) at infinity, yet the comparison dynamics
exp(i J_q t) exp(-i J_p t) f still settles down. Its limit has the closed
form e^{+-i(q-p)pi/2} Phi_q^* Phi_p f, and composing the two limits gives
back f times the scalar e^{i(p-q)pi}.

Run: python3 demos/wave_operators.py  (about half a minute)
"""

from laguerre_scattering import WavePacketSpec, scattering_consistency_check, scattering_phase, wave_limit_probe

packet = WavePacketSpec(1.0, 0.5)
for q in (1.0, 2.0):
    probe = wave_limit_probe(0.0, q, packet, (10.0, 20.0, 40.0))
    dist = ", ".join(f"{d:.4f}" for d in probe.errors)
    print(f"(p, q) = (0, {q:g}): distance to closed form at t = 10, 20, 40: {dist} -> {probe.verdict}")

wrong = wave_limit_probe(0.0, 1.0, packet, (10.0, 20.0, 40.0), sign=-1)
print(f"same probe against the t -> -infinity formula: {', '.join(f'{d:.3f}' for d in wrong.errors)}"
      f" -> {wrong.verdict}")

wide = WavePacketSpec(8.0, 7.5)
for q in (1.0, 2.0):
    res, info = scattering_consistency_check(0.0, q, wide, return_details=True)
    print(f"W_+^* W_- f vs {scattering_phase(0.0, q).real:+.0f} f for q = {q:g}: residual {res:.1e} at N = {info['N']}")
