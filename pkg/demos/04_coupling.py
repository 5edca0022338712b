"""
Checking impartiality by coupling
=================================

Replay one random tape on two graphs that differ only in agent v's ballot.
If v's fate ever changes, the rule is not impartial.  The max-in-degree
rule fails on the smallest possible witness.
"""

from impartial import Mechanism, impartiality_coupling_test, single_arc, uniform_digraph

g = uniform_digraph(7, 0.5, seed=11)
v, new_ballot = 3, [0, 1, 6]
for mech in (Mechanism("permutation"), Mechanism("two-partition"),
             Mechanism("slicing", eps=0.3), Mechanism("slicing-multi", eps=0.3, c=2)):
    rep = impartiality_coupling_test(mech, g, v, new_ballot, range(500))
    print(f"{mech.label:28s} tapes={rep.tapes_tested} violations={len(rep.violations)}")

# 1 votes for 0 instead of abstaining and hands 0 the win
rep = impartiality_coupling_test("baseline", single_arc(2), 1, [0], range(5))
print("\nbaseline on the 2-vertex witness:", rep.violations[:2], "...")
