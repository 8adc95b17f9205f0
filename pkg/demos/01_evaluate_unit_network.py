"""Evaluate both objectives on a one-facility-per-stage network."""
import numpy as np

from greenloop import FlowSolution, NetworkInstance, check_feasibility, evaluate_cost, evaluate_emissions

one3, one2, one = np.ones((1, 1, 1)), np.ones((1, 1)), np.ones(1)
params = dict(
    q=[10.0], ta=one3, tb=one3, tc=one3, td=one3, la=one3, lb=one3, lc=one3, ld=one3,
    da=one2, db=one2, dc=one2, dd=one2, ra=[100.0], rb=[100.0], rd=[100.0],
    ma=one, mb=one, mc=one, md=one, mr=one, pa=[100.0], pb=[100.0], pd=[100.0], pr=[100.0],
    ga=one, gc=one, gb=one, gd=one, gr=one, gta=one, gtb=one, gtc=one, gtd=one,
    hd=0.2, hr=0.5, lam=0.0, t=7.0,
)
instance = NetworkInstance(**params)

z = np.zeros((1, 1, 1))
solution = FlowSolution(xa=[1], xb=[1], xd=[1], ya=z + 10, yb=z + 10, yc=z + 2, yd=z + 1)

cost = evaluate_cost(instance, solution)
emissions = evaluate_emissions(instance, solution)
print(f"fixed {cost.tfc:g}  variable {cost.tvc:g}  transport {cost.ttc:g}  total cost {cost.total:g}")
print(f"CO2 total {emissions.total:g} kg")
print("with assembly emissions:",
      evaluate_emissions(instance.replace(include_assembly_emissions=True), solution).total)
print("feasible:", check_feasibility(instance, solution).feasible)
