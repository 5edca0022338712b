"""
Why impartiality costs half
===========================

Two agents, one vote: 0 votes for 1.  Any impartial rule must leave 1's
chance of winning independent of 1's own (empty) ballot, and 0's chance
independent of 0's.  The exact oracles show what each mechanism pays.
"""

from impartial import (
    exact_expected_winner_degree_permutation,
    exact_expected_winner_degree_two_partition,
    single_arc,
)

g = single_arc(2)
print(g, "arcs:", g.arcs)

# every one of the 2! orders, averaged exactly
print("permutation   E[d(winner)] =", exact_expected_winner_degree_permutation(g))

# every one of the 2^2 bipartitions
print("two-partition E[d(winner)] =", exact_expected_winner_degree_two_partition(g))

# an isolated third vertex changes nothing for the permutation rule
print("permutation on n=3          =", exact_expected_winner_degree_permutation(single_arc(3)))
