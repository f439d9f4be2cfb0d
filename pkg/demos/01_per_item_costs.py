"""
Per-item economics: store, recompute, or something in between
=============================================================

The smallest question the library answers: for one item requested as a
Poisson process, what does a request cost on average if the item is kept
cached for a fixed lifetime after each request?
"""

import math

from cachecost import (
    KeepDecision,
    default_cost_model,
    expected_item_cost,
    keep_decision,
)

costs = default_cost_model()
print("prices per item:")
print(f"  storage       {costs.storage_per_item_hour:.3e} $/hour")
print(f"  recompute     {costs.compute_per_item:.3e} $")
print(f"  transmission  {costs.transmission_per_item:.3e} $ (paid on every request)")

# The storage/recompute trade pivots at one request rate: below it an item
# is cheaper to recompute on demand, above it cheaper to keep forever.
threshold = costs.break_even_rate()
print(f"\nbreak-even rate S/C = {threshold:.3e} requests/hour")
print(f"break-even window C/S = {costs.break_even_window():.1f} hours")

# Sweep the cache lifetime for a few per-item rates around the threshold.
lifetimes = [0.0, 100.0, 500.0, 1481.5, 5000.0, math.inf]
rates = [threshold / 10, threshold, threshold * 10, threshold * 1000]

header = "rate req/h".rjust(12) + "".join(f"{t:>12.5g}" for t in lifetimes)
print("\nexpected cost per request (transmission excluded), by lifetime:")
print(header)
for rate in rates:
    cells = "".join(f"{expected_item_cost(rate, t, costs):>12.3e}" for t in lifetimes)
    print(f"{rate:>12.3e}{cells}")

# At the threshold rate every lifetime prices out the same: the row above
# is flat. Off the threshold the decision is binary, which keep_decision
# spells out.
print("\nkeep decisions:")
for rate in rates:
    verdict = keep_decision(rate, costs)
    label = "cache forever" if verdict is KeepDecision.CACHE_FOREVER else "never cache"
    print(f"  rate {rate:.3e}: {label}")
