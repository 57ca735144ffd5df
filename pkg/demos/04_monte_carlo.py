"""A million simulated buyers reproduce the continuum answer.

Each buyer draws a value, sees the posted price and the queue, and buys only
if that beats waiting for the lottery. The public option then hands its
capacity to random queuers. Set MIXMARKET_THREADS to spread the random
number generation over threads; the numbers do not change.
"""

import time

from mixmarket import Uniform, aggregate_consumer_surplus, solve_mechanism
from mixmarket.oracle import simulate_market

d = Uniform(0.0, 1.0)
k = 0.5
m = solve_mechanism(d, k)
theory = (m.producer_surplus, m.rationing_prob, aggregate_consumer_surplus(d, k, mech=m))
print(f"theory: revenue {theory[0]:.5f}, service prob {theory[1]:.5f}, consumer surplus {theory[2]:.5f}")

for seed in range(5):
    t0 = time.perf_counter()
    r = simulate_market(d, k, m.price, n_buyers=1_000_000, seed=seed)
    z = [(r.realized_revenue - theory[0]) / r.std_error_revenue,
         (r.realized_rationing_prob - theory[1]) / r.std_error_rationing,
         (r.mean_consumer_surplus - theory[2]) / r.std_error_cs]
    print(f"seed {seed}: revenue {r.realized_revenue:.5f}, service prob {r.realized_rationing_prob:.5f}, "
          f"consumer surplus {r.mean_consumer_surplus:.5f}  "
          f"(z = {z[0]:+.2f}, {z[1]:+.2f}, {z[2]:+.2f}; {time.perf_counter() - t0:.2f}s)")
