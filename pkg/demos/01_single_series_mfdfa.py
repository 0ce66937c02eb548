"""Walk through a single-series analysis, from raw values to h(q).

Two contrasting inputs: seeded white noise, which should look like a
monofractal random series (h(q) flat near 0.5), and a binomial cascade,
whose exact h(q) is known in closed form for every order q.
"""

import numpy as np

from mfhurst import analytic_cascade_hq, binomial_cascade, mfdfa, white_noise

# --- white noise: the "efficient market" baseline -------------------------
noise = white_noise(2**14, seed=42)
surface, spectrum = mfdfa(noise)

print("White noise, n = 2^14, seed 42")
print(f"  h(2)  = {spectrum.h(2.0):+.4f}   (exactly 0.5 for an ideal random series)")
print(f"  Dh(5) = {spectrum.width(5.0):+.4f}   (0 for a monofractal)")
print(f"  fit r^2 at q=2: {spectrum.r_squared_at(2.0):.5f}")
print(f"  scales used: {surface.scales[0]}..{surface.scales[-1]} ({surface.scales.size} points)")
print()

# --- binomial cascade: a genuinely multifractal measure -------------------
cascade = binomial_cascade(16, 0.75)
_, casc_spec = mfdfa(cascade)

print("Binomial cascade, k = 16, p = 0.75  (closed-form h(q) available)")
print(f"{'q':>6} {'h(q) est':>10} {'h(q) exact':>11} {'abs err':>9}")
for q in (-5.0, -2.0, -1.0, 1.0, 2.0, 5.0):
    est = casc_spec.h(q)
    exact = analytic_cascade_hq(q, 0.75)
    print(f"{q:>6.1f} {est:>10.4f} {exact:>11.4f} {abs(est - exact):>9.4f}")

dh5 = casc_spec.width(5.0)
exact_dh5 = analytic_cascade_hq(-5.0, 0.75) - analytic_cascade_hq(5.0, 0.75)
print(f"\n  Dh(5) = {dh5:.4f} vs analytic {exact_dh5:.4f}")

# --- singularity spectrum --------------------------------------------------
# alpha spreads over a wide interval exactly when the series is multifractal
alpha = np.asarray(casc_spec.alpha)
print(f"  singularity strengths alpha in [{alpha.min():.3f}, {alpha.max():.3f}]"
      f" (width {alpha.max() - alpha.min():.3f})")
noise_alpha = np.asarray(spectrum.alpha)
print(f"  ...versus white noise:        [{noise_alpha.min():.3f}, {noise_alpha.max():.3f}]"
      f" (width {noise_alpha.max() - noise_alpha.min():.3f})")
