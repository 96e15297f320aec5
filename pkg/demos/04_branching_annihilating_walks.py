"""
Branching annihilating random walks
===================================

Particles jump, split into three at rate s, and annihilate in pairs.  The
total count keeps its parity.  Started from two particles, the walk dies
out quickly when s = 0 and survives longer as s grows.
"""

# %%
import numpy as np

from coexsim.lattice import RadialKernel, Torus
from coexsim.particles import BarwParams, barw_simulate, barw_survival


def ring(s):
    return BarwParams.on_torus(s, Torus(1, 32), RadialKernel([0.0, 1.0]))


start = np.array([2] + [0] * 31)
run = barw_simulate(ring(2.0), start, 5.0, 1, seed=0, log_capacity=20)
for t, site, kind, total in run.event_log()[:8]:
    print(f"t={t:.3f} site={site:2d} {kind:12s} total={total}")

# %%
for s in (0.0, 1.0, 2.0, 5.0):
    p, se = barw_survival(ring(s), start, 5.0, 2000, seed=1)
    print(f"s={s:4.1f}  P[alive at t=5] = {p:.3f} +- {se:.3f}")
