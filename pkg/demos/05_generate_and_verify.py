"""Generate a small random network and check the MILP solver against enumeration."""
from greenloop import GeneratorSpec, generate
from greenloop.oracle import cross_check

instance = generate(GeneratorSpec(seed=11, dims=(2, 2, 2, 2, 1, 1, 1, 1)))
rows = cross_check(instance)
for row in rows:
    print(f"{row.check:28s} {row.solver:16.6f} {row.oracle:16.6f} {'ok' if row.ok() else 'MISMATCH'}")
print("all match" if all(r.ok() for r in rows) else "mismatch found")
