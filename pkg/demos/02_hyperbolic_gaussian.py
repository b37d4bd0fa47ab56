"""
The radius of a hyperbolic Gaussian
===================================

The detector needs the radius that holds a fraction ``phi`` of a Gaussian's
mass. On the hyperbolic plane that radius grows faster than ``sigma`` because
area grows exponentially with distance.
"""
import math

import numpy as np

from hypolo import HGaussModel, cdf, lambda_h, normalizer, quantile

print("Z(1) =", round(normalizer(1.0), 6))

# cdf of the radius for a few dispersions
for sigma in (0.1, 1.0, 3.0):
    m = HGaussModel(sigma)
    rs = np.array([0.5, 1, 2]) * sigma + np.array([0, 0, sigma ** 2])
    print(f"sigma {sigma}: cdf at {np.round(rs, 2)} = {np.round(cdf(rs, m), 4)}")

# The multiplier lambda_H = quantile / sigma. For tiny sigma it approaches the
# flat (Rayleigh) value sqrt(-2 ln(1 - phi)); for large sigma it keeps growing.
flat = math.sqrt(-2 * math.log(0.05))
print(f"flat limit {flat:.4f}")
for sigma in (1e-3, 0.1, 0.5, 1.0, 2.0, 5.0):
    print(f"sigma {sigma:<6} lambda_H {lambda_h(0.95, sigma):.4f}")

# Quantiles are exact inverses of the cdf.
m = HGaussModel(2.0)
r = quantile(0.95, m)
print(f"quantile(0.95) = {r:.6f}, cdf back = {cdf(r, m):.12f}")
