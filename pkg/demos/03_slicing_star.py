"""
Slicing on a planted star
=========================

One centre with 500 voters, every other vertex unvoted for.  The centre is
lost only when it lands in the sample, which happens with probability eps.
"""

import numpy as np

from impartial import planted_star, slicing_mechanism, RandomTape

g = planted_star(500)
eps = 0.2
wins = np.array([slicing_mechanism(g, eps, RandomTape(3, t)).winner == 0 for t in range(2000)])
print(f"centre selected in {wins.mean():.3f} of runs (1 - eps = {1 - eps})")

# a single run, phase by phase
sel = slicing_mechanism(g, eps, RandomTape(3, 0))
phases = {}
for v, phase in sel.trace:
    phases.setdefault(phase, []).append(v)
for phase, vs in phases.items():
    print(f"{phase:9s} read {len(vs):3d} ballots")
print("winner:", sel.winner, "with in-degree", sel.winner_in_degrees[0])
