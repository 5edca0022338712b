"""
The regular-plus-sink family
============================

Each non-sink vertex has in- and out-degree N; the sink collects 2N-1
votes.  The permutation rule finds the sink only about three quarters of
the time in expectation, and the ratio stays there as N grows.

Runtime is dominated by N=8 (about 15 s).
"""

import time

from impartial import build_digraph, greedy_witness_set, monte_carlo_alpha, tight_example

for N in (2, 4, 8):
    g = tight_example(N, 0.1)
    t = time.time()
    est = monte_carlo_alpha("permutation", g, 10_000, seed=1)
    print(f"N={N}  n={g.n:5d}  delta={est.delta:2d}  ratio={est.ratio:.4f} "
          f"+- {est.ci_halfwidth / est.delta:.4f}   ({time.time() - t:.1f}s)")

# the construction hinges on a large set of vertices with no shared voters
g = tight_example(4, 0.1)
sink = g.n - 1
regular = build_digraph(sink, [a for a in g.arcs if sink not in a])
Z = greedy_witness_set(regular, 4)
print(f"\nwitness set on the regular part: |Z|={len(Z)} of {regular.n} vertices")
