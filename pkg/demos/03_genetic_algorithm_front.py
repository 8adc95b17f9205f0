"""Approximate front of the bundled network with the genetic algorithm."""
from greenloop import GaConfig, evolve, load_bundled

instance = load_bundled("tradeoff")
front = evolve(instance, GaConfig(seed=1, population_size=100, generations=100))
print(f"{len(front)} nondominated feasible points")
for f1, f2 in front.points[:: max(1, len(front) // 10)]:
    print(f"{f1:14.3f} {f2:14.3f}")
