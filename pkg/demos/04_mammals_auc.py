"""
AUC against k on the mammal hierarchy
=====================================

The bundled fixture embeds the WordNet mammal closure as a tree in the disk
and adds eleven non-mammal animals at random places. This sweeps k for both
detectors and prints the curves.
"""
from hypolo import DetectorConfig, hloop, load_mammals, sweep_k

data = load_mammals()
print(f"{len(data)} points, {data.outlier_mask.sum()} outliers")

ks = range(5, 31, 5)
curves = {m: dict(sweep_k(data, m, ks)) for m in ("hloop", "hlof")}
print(" k   hloop   hlof")
for k in ks:
    print(f"{k:>2}  {curves['hloop'][k]:.4f}  {curves['hlof'][k]:.4f}")

# Which animals does HLoOP find most suspicious at k = 10?
scores = hloop(data, DetectorConfig(10)).scores
top = scores.argsort()[::-1][:15]
print([data.names[i] for i in top])
