"""
From lattice populations to oriented percolation
================================================

Block spins read off the populations every two time units define an
oriented site field.  We first look at plain i.i.d. percolation, then at
the field produced by the lattice model.
"""

# %%
from fractions import Fraction

from coexsim.percolation import exact_survival, survival_curve, theorem32_bound

nonempty, origin = exact_survival(Fraction(1, 2), 3)
print("exact P[W_n nonempty] at p = 1/2:", [str(v) for v in nonempty])
for row in survival_curve([0.1, 0.3, 0.5], 20, 24, 2000, seed=0):
    if row["n"] == 20:
        print(f"theta={row['theta']:.1f}  P[W_20 nonempty] = {row['nonempty']:.3f}")

# %%
# The comparison bound is only useful for tiny closed-site probabilities;
# it is evaluated in log space so that the threshold does not underflow.
import math

print(theorem32_bound(None, 1, log_theta=-100 * math.log(6.0)))

# %%
import numpy as np

from coexsim.model_one import ModelOneParams
from coexsim.spin import SpinParams, spin_pipeline

params = ModelOneParams(d=1, torus_side=32, alpha=1.0, M=20.0, m=[0, 0.5], lam=[1, 0.5], gamma=[0.01],
                        alpha_p=1.0, M_p=10.0, m_p=[0, 0.5], lam_p=[1, 0.5], gamma_p=[0.01], c=2.0, b=2)
spin = SpinParams.from_model_one(params, a=0.5, a_p=1.0)
res = spin_pipeline(params, spin, np.full(32, 15.0), np.full(32, 1.0), epochs=4, width=4, replicas=20,
                    seed=2, dt=1e-2)
print("P[origin open]      ", np.round(res.open_origin, 3))
print("P[origin reachable] ", np.round(res.reach_origin, 3))
