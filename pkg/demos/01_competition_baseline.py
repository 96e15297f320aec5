"""
Deterministic competition and its lattice analogue
===================================================

The two-species competition ODE is the mean-field picture.  Here we look at
when it predicts coexistence, then run the stochastic lattice version with
the same kind of parameters and see what survives at finite horizon.
"""

# %%
# Coexistence in the ODE needs both interspecific coefficients below one.
import numpy as np

from coexsim.diffusion import LotkaVolterraParams, TimeGrid, integrate_lotka_volterra

grid = TimeGrid.from_horizon(40.0, 1e-2)
for a12, a21 in [(0.5, 0.5), (1.5, 0.5), (0.5, 1.5)]:
    lv = LotkaVolterraParams(1.0, 1.0, 1.0, 1.0, a12, a21)
    traj = integrate_lotka_volterra(lv, (0.1, 0.1), grid)
    print(f"alpha12={a12} alpha21={a21}: coexistence={lv.coexistence}  "
          f"final=({traj.states[-1, 0]:.3f}, {traj.states[-1, 1]:.3f})")

# %%
# The lattice model replaces each species by interacting square-root
# diffusions.  The parameter report lists the standing assumptions that
# the comparison argument needs; all of them hold for this choice.
from coexsim.model_one import InitialBox, ModelOneParams, estimate_survival, validate_params

params = ModelOneParams(d=1, torus_side=16, alpha=1.0, M=20.0, m=[0, 0.5], lam=[1, 0.5], gamma=[0.01],
                        alpha_p=1.0, M_p=10.0, m_p=[0, 0.5], lam_p=[1, 0.5], gamma_p=[0.01], c=2.0, b=2)
print(validate_params(params))

# %%
# Finite-horizon proxies: the X type near the origin, persistence of both
# types somewhere, and both types at the origin.
box = InitialBox(1.0, 10.0, 1.0, 5.0, halfwidth=2.0)
est = estimate_survival(params, box, kappa=0.5, horizon=2.0, dt=1e-2, replicas=200, seed=1)
print(f"survival {est.survival:.3f}+-{est.survival_se:.3f}  persistence {est.persistence:.3f}  "
      f"coexistence {est.coexistence:.3f}")
