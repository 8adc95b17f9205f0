"""Hypervolume and coverage of the exact and genetic fronts."""
from greenloop import EpsConfig, GaConfig, compare, evolve, load_bundled, sweep

instance = load_bundled("tradeoff")
exact = sweep(instance, EpsConfig(n=20))
approx = evolve(instance, GaConfig(seed=1))
for key, value in compare(exact, approx).as_dict().items():
    print(f"{key:20s} {value}")
