"""Simulation toolkit for two competing populations on a lattice.

Submodules:

* ``diffusion``   one-dimensional comparison diffusions, scale functions, ODE baseline
* ``lattice``     radial kernels on a periodic torus
* ``model_one``   coupled Feller populations with local competition
* ``model_two``   stepping-stone model with frequency-dependent selection
* ``particles``   branching annihilating random walk and the Neuhauser-Pacala model
* ``duality``     moment duality between the two previous modules
* ``percolation`` oriented site percolation and exact small-instance oracles
* ``spin``        block spin fields, flip-probability estimators, comparison checks
* ``harness``     configuration files, experiment registry and command-line entry point
"""

__version__ = "0.1.0"
