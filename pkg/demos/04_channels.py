"""Match attention intervals to the bundled channel catalog.

Run: python3 demos/04_channels.py
"""

from grannet import Interval, default_catalog, match_degree, recommend

catalog = default_catalog()
for lo, hi in [(9, 10), (7, 8), (2, 6), (3, 9), (4, 10)]:
    ranked = recommend(Interval(lo, hi), catalog, top_k=3)
    line = ", ".join(f"{c.name} {d:.3f}" for c, d in ranked)
    print(f"[{lo},{hi}] -> {line}")

print("point 5 inside [3, 5]:", match_degree(Interval(5, 5), Interval(3, 5)))
