"""
How long should the rate estimator look back?
=============================================

The per-item policy counts requests in a sliding window and stores an item
while the windowed estimate clears the break-even rate. The window length
is its only knob. Too short and no item can prove it deserves caching;
once the window reaches the break-even window C/S, stretching it further
buys little.
"""

from cachecost import default_cost_model, parse_config, sweep

BASE = """
[costs]
storage_per_item_hour = 4.86e-7
compute_per_item = 7.2e-4
transmission_per_item = 5.25e-4

[population]
movies = 10000
movie_exponent = 0.8
ads = 5000
ad_exponent = 0.94
lambda = 100.0

[policy]
kind = individual_ttl
window = 1481.48

[workload]
source = synthetic
duration = 2500.0

[run]
seeds = 1,2
warmup = 1500.0
"""

costs = default_cost_model()
pivot = costs.break_even_window()
factors = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0]

cfg = parse_config(BASE)
rows = sweep(cfg, "window", [f * pivot for f in factors])
means = {r.param_value: r.cost_per_request for r in rows if r.seed == "mean"}

print(f"break-even window C/S = {pivot:.1f} hours\n")
print(f"{'window':>10}  {'x C/S':>6}  {'cost per request':>18}")
for f in factors:
    w = f * pivot
    marker = "  <- knee" if f == 1.0 else ""
    print(f"{w:>10.1f}  {f:>6.2f}  {means[w]:>18.4e}{marker}")

print("\nshort windows overpay because hot items keep timing out of the")
print("estimator; beyond C/S the curve is flat to within a couple percent")
