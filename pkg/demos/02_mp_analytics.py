"""Marchenko-Pastur analytics: density vs an empirical histogram, the
Stieltjes transform's defining quadratic, and the D-transform round trip."""

import numpy as np

from spikedwide import mp
from spikedwide.ensemble import sample_noise, stream
from spikedwide.spectra import covariance_eigenvalues, empirical_stieltjes

beta = 0.04
a, b = mp.bulk_edges(beta)
print(f"beta={beta}: bulk support [{a:.3f}, {b:.3f}]")

# empirical spectral distribution of pure noise vs the density
x = sample_noise(400, 10000, "gaussian", stream(7, "noise"))
lam = covariance_eigenvalues(x)
edges = np.linspace(a, b, 9)
hist, _ = np.histogram(lam, bins=edges, density=True)
centers = (edges[:-1] + edges[1:]) / 2
print("\n  x      density   histogram")
for c, h in zip(centers, hist):
    print(f"  {c:.3f}  {mp.density(c, beta):8.4f}  {h:8.4f}")

# empirical vs limiting Stieltjes transform just beyond the edge
z = b + np.sqrt(beta)
s_emp, ds_emp = empirical_stieltjes(lam, z)
s_bar, ds_bar = mp.stieltjes(z, beta)
print(f"\nat z = {z:.3f}: s_n = {s_emp:.5f}, s_bar = {s_bar:.5f} "
      f"(deviation {abs(s_emp - s_bar):.2e})")
print(f"quadratic residual of s_bar: "
      f"{abs(beta * z * s_bar**2 + (z + beta - 1) * s_bar + 1):.2e}")

# D-transform: closed-form inverse and round trip
print("\nD-transform round trip on (0, beta^-1/2):")
for t in (0.5, 1.0, 3.0):
    z = mp.d_transform_inverse(t, beta)
    print(f"  t={t}: D^-1(t) = {z:.6f}, D(D^-1(t)) = {mp.d_transform(z, beta):.12f}")
