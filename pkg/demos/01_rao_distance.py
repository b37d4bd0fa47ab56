"""
Distances in the Poincare disk
==============================

Two pairs of points with the same Euclidean separation can be very
different distances apart once the disk's geometry is taken into account.
"""
import numpy as np

from hypolo import conformal_factor, rao_distance

# Same Euclidean gap of 0.1, once near the centre and once near the rim.
centre = (0.0, 0.0), (0.1, 0.0)
rim = (0.85, 0.0), (0.95, 0.0)
for name, (a, b) in [("centre", centre), ("rim", rim)]:
    print(f"{name:>6}: euclidean {np.hypot(a[0] - b[0], a[1] - b[1]):.3f}  rao {rao_distance(a, b):.3f}")

# The local stretch is the conformal factor 2 / (1 - |x|^2).
for r in (0.0, 0.5, 0.9, 0.99):
    print(f"|x| = {r:<4}  stretch {conformal_factor((r, 0.0)):8.2f}")

# Distance from the origin grows like 2 artanh(r) and diverges at the rim.
r = np.array([0.5, 0.9, 0.99, 0.999])
print(np.round([rao_distance((0, 0), (x, 0)) for x in r], 3))
