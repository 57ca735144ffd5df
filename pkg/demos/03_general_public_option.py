"""A public option that is worse and not free.

Quality ratio theta < 1 scales what a served queuer gets; public price rho
is paid only when served. When the public good is nearly as good as the
private one but costs something, the monopolist can undercut it and sell to
every type: the cutoff falls below the standalone monopoly price.
"""

from mixmarket import MarketParams, Uniform, bertrand_limit_cutoff, solve_general, standard_monopoly_price

d = Uniform(1.0, 2.0)
print(f"standalone monopoly price: {standard_monopoly_price(d)}")

cases = [
    ("free, same quality", MarketParams(0.5)),
    ("free, half quality", MarketParams(0.5, quality_ratio=0.5)),
    ("priced 0.5, same quality", MarketParams(0.5, quality_ratio=1.0, public_price=0.5)),
    ("near-perfect substitute", MarketParams(0.99, quality_ratio=0.99, public_price=0.5)),
]
for label, params in cases:
    sol = solve_general(d, params)
    print(f"{label:>26}: cutoff {sol.cutoff:.4f}, price {sol.price:.4f}, regime {sol.regime}")

print(f"\nlimit cutoff for theta=0.99, rho=0.5: {bertrand_limit_cutoff(d, 0.99, 0.5)}")

# With a same-quality public good at k = 0.5, charging for it first nudges the
# cutoff down inside the rationed regime, then flips the firm to selling to all.
print("\ntheta = 1, k = 0.5, rising public price")
for rho in (0.0, 0.05, 0.1, 0.15, 0.2, 0.3):
    sol = solve_general(d, MarketParams(0.5, 1.0, rho))
    print(f"  rho = {rho:<5} cutoff {sol.cutoff:.4f}, price {sol.price:.4f}, regime {sol.regime}")
