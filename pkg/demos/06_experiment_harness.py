"""
Running a configured experiment
===============================

Experiments are described by a small INI file, run with a fixed seed, and
leave a results table, the resolved configuration and plot-ready columns.
"""

# %%
import pathlib
import tempfile

from coexsim.harness import read_results
from coexsim.harness.cli import main

work = pathlib.Path(tempfile.mkdtemp())
cfg = work / "barw.cfg"
cfg.write_text("""\
[experiment]
name = barw-sweep
seed = 42
replicas = 500
horizon = 5

[parameters]
s_values = 0, 1, 2, 5
""")
main(["run", "--config", str(cfg), "--out", str(work / "out")])

# %%
for row in read_results(work / "out" / "results.csv"):
    print(f"{row.metric:18s} {row.value:.3f} +- {row.stderr:.3f}")
print((work / "out" / "config.resolved").read_text())
print(sorted(p.name for p in (work / "out" / "plots").iterdir()))
