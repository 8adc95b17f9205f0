"""Exact cost/CO2 front of the bundled network by an epsilon-constraint sweep."""
from greenloop import EpsConfig, load_bundled, payoff_table, sweep

instance = load_bundled("tradeoff")
table = payoff_table(instance)
print("ideal", table.ideal, "nadir", table.nadir)
front = sweep(instance, EpsConfig(n=20))
for f1, f2 in front.points:
    print(f"{f1:14.3f} {f2:14.3f}")
