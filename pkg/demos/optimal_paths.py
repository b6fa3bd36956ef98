"""
Optimal macroscopic paths
=========================

The fastest path a particle family can follow while its population keeps
growing, for increasing and decreasing two-phase variances.
"""

import numpy as np

from tibrw import VarianceProfile, predict
from tibrw.ldp import feasible, optimal_curve, sample_curve

up = VarianceProfile.two_phase(1.0, 4.0)
down = up.reversed()

# slopes, speed and the binding constraints of each curve
for name, prof, model in (("increasing", up, "increasing"), ("decreasing", down, "decreasing")):
    path, speed = optimal_curve(prof)
    rep = feasible(prof, path)
    print(f"{name:>10}: slopes {np.round(path.slopes, 4)}, speed {speed:.7f}, "
          f"closed form {predict(prof, model).velocity:.7f}")
    print(f"{'':>10}  slack at s=1/2 {rep.slack_at(0.5):.4f}, at s=1 {rep.slack_at(1.0):.1e}")

# a table for plotting phi(s) against the cost I_s and the budget s log 2
rows = sample_curve(up, optimal_curve(up)[0], points=11)
print("\n   s     phi    I_s   s log2")
for s, phi, cost, budget in rows:
    print(f"{s:4.1f} {phi:7.4f} {cost:6.4f} {budget:6.4f}")

# a non-monotone environment goes through the general active-set solver
mixed = VarianceProfile((1 / 3, 1 / 3, 1 / 3), (1.0, 4.0, 2.0))
path, speed = optimal_curve(mixed)
print(f"\n(1, 4, 2): speed {speed:.4f}, slacks at breakpoints "
      f"{np.round(feasible(mixed, path).slacks, 4)}")
