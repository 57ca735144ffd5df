"""Values on [1, 2]: a small public option can raise the private price.

Without a public option the monopolist sells to everyone at price 1. Once a
little free capacity appears, the lowest types would rather wait in the
queue, so the firm gives up on them and charges the rest more. Consumer
surplus first falls below its no-capacity level of 0.5 and only later climbs
to 1.5.
"""

import numpy as np

from mixmarket import Uniform, aggregate_consumer_surplus, check_condition, price_sensitivity, solve_mechanism

d = Uniform(1.0, 2.0)

rep = check_condition(d)
lo, hi = rep.failing_intervals[0]
print(f"price can rise with capacity while the cutoff lies in [{lo:.4f}, {hi:.4f})")

print(f"\n{'k':>7} {'cutoff':>8} {'price':>8} {'dp/dk':>9} {'C(k)':>8}")
for k in (0.001, 0.01, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 0.99):
    m = solve_mechanism(d, k)
    print(f"{k:7.3f} {m.cutoff:8.4f} {m.price:8.4f} {price_sensitivity(d, k, mech=m):9.4f} "
          f"{aggregate_consumer_surplus(d, k, mech=m):8.4f}")

ks = np.linspace(0.001, 0.999, 999)
cs = np.array([aggregate_consumer_surplus(d, k) for k in ks])
i = int(np.argmin(cs))
print(f"\nconsumer surplus bottoms out at {cs[i]:.4f} near k = {ks[i]:.3f}")
