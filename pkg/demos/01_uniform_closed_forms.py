"""Uniform values on [0, 1]: the solver against hand-derived answers.

With F(v) = v the cutoff condition becomes (k/v) v^2 = (2v - 1) v, so the
cutoff is (1 + k)/2 and everything else follows in closed form. This script
prints both side by side, then shows how consumer surplus climbs from 1/8
(monopoly alone) toward 1/2 (everyone served free).
"""

import numpy as np

from mixmarket import Uniform, aggregate_consumer_surplus, solve_mechanism

d = Uniform(0.0, 1.0)

print(f"{'k':>5} {'cutoff':>10} {'(1+k)/2':>10} {'price':>10} {'(1-k)/2':>10} {'revenue':>10}")
for k in np.arange(1, 10) * 0.1:
    m = solve_mechanism(d, k)
    print(f"{k:5.1f} {m.cutoff:10.6f} {(1 + k) / 2:10.6f} {m.price:10.6f} {(1 - k) / 2:10.6f} "
          f"{m.producer_surplus:10.6f}")

print("\nconsumer surplus as capacity grows")
for k in (1e-6, 0.1, 0.25, 0.5, 0.75, 0.9, 1 - 1e-4):
    print(f"  k = {k:<8g} C = {aggregate_consumer_surplus(d, k):.6f}")

# At k = 0.5 the monopolist keeps a quarter of its old revenue: 0.0625 vs 0.25.
