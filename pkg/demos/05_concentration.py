"""
Concentration facts behind the analysis
=======================================

Empirical tail frequencies next to what the bounds promise.
"""

import math

from impartial import balanced_fraction, chernoff_empirical, hypergeometric_tail, is_balanced_permutation

# a permutation with the distinguished elements dumped at the end is not balanced
print(is_balanced_permutation(list(range(2, 10)) + [0, 1], delta=2, eps=0.1))

print("balanced permutations, n=1000 delta=100 eps=0.2:",
      balanced_fraction(1000, 100, 0.2, trials=10_000, seed=0))

print("hypergeometric tail, 300 draws:",
      hypergeometric_tail(1000, 100, 300, 0.1, trials=100_000, seed=0))

for n, p, d in ((1000, 0.5, 0.2), (200, 0.1, 0.5), (50, 0.3, 0.4)):
    emp, bound = chernoff_empirical(n, p, d, trials=100_000, seed=0)
    print(f"Bin({n},{p}) |X-mu| >= {d}mu: empirical {emp:.5f}  bound {bound:.5f}")
