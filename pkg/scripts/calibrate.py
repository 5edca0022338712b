"""Oracle runs that fix the thresholds frozen in tests/test_acceptance.py.

Run once; the printed values and seeds are copied into the test module.

    python scripts/calibrate.py
"""

import time

from impartial import monte_carlo_alpha, planted_star, tight_example, two_star
from impartial.mechanisms import slicing_mechanism, slicing_multiwinner
from impartial.tape import RandomTape

ORACLE_SEED = 20_160_601


def tight_ratio(N, trials):
    g = tight_example(N, 0.1)
    t = time.time()
    est = monte_carlo_alpha("permutation", g, trials, ORACLE_SEED)
    print(f"tight N={N} n={g.n} delta={est.delta} trials={trials} "
          f"ratio={est.ratio:.6f} ci={est.ci_halfwidth / est.delta:.6f} ({time.time() - t:.0f}s)")


def star_rate(trials):
    g = planted_star(500)
    centre = good = 0
    for t in range(trials):
        sel = slicing_mechanism(g, 0.2, RandomTape(ORACLE_SEED, t))
        centre += sel.winner == 0
        good += sel.winner_in_degrees[0] >= 0  # (1 - 5*0.2) * 500 == 0
    print(f"star delta=500 eps=0.2 trials={trials} centre_rate={centre / trials:.4f} "
          f"good_rate={good / trials:.4f} analytic_centre=0.8")


def two_star_rate(trials):
    g = two_star(50, 48)
    both = 0
    for t in range(trials):
        sel = slicing_multiwinner(g, 0.2, 2, RandomTape(ORACLE_SEED, t))
        both += set(sel.winners) == {0, 1}
    print(f"two-star 50/48 eps=0.2 c=2 trials={trials} both_rate={both / trials:.4f} analytic=0.64")


if __name__ == "__main__":
    star_rate(10_000)
    two_star_rate(10_000)
    for N in (2, 4):
        tight_ratio(N, 100_000)
    tight_ratio(8, 100_000)
