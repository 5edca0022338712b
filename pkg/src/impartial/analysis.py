"""Exact oracles, Monte-Carlo ratio estimates and empirical concentration checks."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .graph import Digraph, max_in_degree
from .mechanisms import (
    Selection,
    as_fraction,
    max_indegree_baseline,
    permutation_mechanism,
    permutation_run,
    sample_phase,
    slicing_mechanism,
    slicing_multiwinner,
    two_partition_mechanism,
)
from .tape import RandomTape

MAX_PERMUTATION_N = 9
MAX_PARTITION_N = 20
Z95 = 1.96


class InvariantViolation(RuntimeError):
    """A property that must hold on every run was observed to fail."""


# -- mechanism identifiers --------------------------------------------------


@dataclass(frozen=True)
class Mechanism:
    """A mechanism name plus its parameters, callable on ``(graph, tape)``."""

    name: str
    eps: float | None = None
    c: int = 1

    NAMES = ("permutation", "two-partition", "slicing", "slicing-multi", "baseline")

    def __post_init__(self):
        if self.name not in self.NAMES:
            raise ValueError(f"unknown mechanism {self.name!r}; expected one of {self.NAMES}")
        if self.name.startswith("slicing"):
            if self.eps is None or not 0 < self.eps < 1:
                raise ValueError(f"{self.name} needs eps in (0, 1), got {self.eps}")
        if self.c < 1:
            raise ValueError(f"c must be >= 1, got {self.c}")

    @property
    def impartial(self) -> bool:
        return self.name != "baseline"

    @property
    def label(self) -> str:
        if self.name == "slicing":
            return f"slicing(eps={self.eps:g})"
        if self.name == "slicing-multi":
            return f"slicing-multi(eps={self.eps:g};c={self.c})"
        return self.name

    def __call__(self, g: Digraph, tape: RandomTape) -> Selection:
        if self.name == "permutation":
            return permutation_mechanism(g, tape)
        if self.name == "two-partition":
            return two_partition_mechanism(g, tape)
        if self.name == "slicing":
            return slicing_mechanism(g, self.eps, tape)
        if self.name == "slicing-multi":
            return slicing_multiwinner(g, self.eps, self.c, tape)
        return max_indegree_baseline(g, tape)


def as_mechanism(m, eps=None, c=None) -> Mechanism:
    if isinstance(m, Mechanism):
        return m
    return Mechanism(m, eps=eps, c=1 if c is None else c)


# -- exact oracles ----------------------------------------------------------


def exact_expected_winner_degree_permutation(g: Digraph) -> Fraction:
    """Average winner in-degree over all ``n!`` orders."""
    if g.n > MAX_PERMUTATION_N:
        raise ValueError(f"exhaustive enumeration limited to n <= {MAX_PERMUTATION_N}, got {g.n}")
    deg = g.in_degree.tolist()
    total = 0
    for order in itertools.permutations(range(g.n)):
        total += deg[permutation_run(g, order)[0]]
    return Fraction(total, math.factorial(g.n))


def exact_expected_winner_degree_two_partition(g: Digraph) -> Fraction:
    """Average winner in-degree over all ``2^n`` bipartitions.

    Bit ``v`` of the enumeration index puts ``v`` in the voting group V1.
    """
    n = g.n
    if n > MAX_PARTITION_N:
        raise ValueError(f"exhaustive enumeration limited to n <= {MAX_PARTITION_N}, got {n}")
    adj = np.zeros((n, n), dtype=np.float32)
    if g.m:
        adj[g.src, g.dst] = 1.0
    deg = g.in_degree
    bit = np.arange(n, dtype=np.int64)
    total = 0
    chunk = 1 << 16
    # the all-V1 partition (last index) elects vertex 0; handled below
    for start in range(0, (1 << n) - 1, chunk):
        masks = np.arange(start, min(start + chunk, (1 << n) - 1), dtype=np.int64)
        v1 = ((masks[:, None] >> bit) & 1).astype(bool)
        counted = v1.astype(np.float32) @ adj
        counted[v1] = -1.0
        total += int(deg[np.argmax(counted, axis=1)].sum())
    total += int(deg[0])
    return Fraction(total, 1 << n)


# -- Monte-Carlo estimation -------------------------------------------------


@dataclass(frozen=True)
class AlphaEstimate:
    mean_winner_degree: float
    delta: int
    ratio: float
    trials: int
    ci_halfwidth: float
    exact: bool = False
    exact_mean: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if not -1e-12 <= self.mean_winner_degree <= self.delta + 1e-12:
            raise InvariantViolation(
                f"mean winner degree {self.mean_winner_degree} outside [0, {self.delta}]"
            )
        if self.exact and self.ci_halfwidth != 0:
            raise InvariantViolation("exact estimate with nonzero CI")


def _trial_chunk(mech: Mechanism, g: Digraph, seed: int, start: int, stop: int, delta: int):
    """Integer sums over trials ``start..stop-1``: (sum, sum of squares)."""
    s = ss = 0
    for t in range(start, stop):
        sel = mech(g, RandomTape(seed, t))
        for d in sel.winner_in_degrees:
            if not 0 <= d <= delta:
                raise InvariantViolation(f"trial {t}: winner degree {d} outside [0, {delta}]")
        x = sum(sel.winner_in_degrees)
        s += x
        ss += x * x
    return s, ss


def _from_sums(s: int, ss: int, trials: int, c: int, delta: int) -> AlphaEstimate:
    # per-trial sample is the mean winner degree sum/c; moments kept exact
    mean = Fraction(s, trials * c)
    if trials > 1:
        var = Fraction(ss * trials - s * s, trials * (trials - 1) * c * c)
        ci = Z95 * math.sqrt(max(var, 0)) / math.sqrt(trials)
    else:
        ci = 0.0
    ratio = 1.0 if delta == 0 else float(mean / delta)
    return AlphaEstimate(float(mean), delta, ratio, trials, ci)


def monte_carlo_alpha(mechanism, g: Digraph, trials: int, seed: int, *, jobs: int = 1,
                      eps=None, c=None) -> AlphaEstimate:
    """Estimate ``E[d(winner)] / Delta`` over tapes ``(seed, 0..trials-1)``.

    Trials are split into contiguous chunks; sums are integers, so the result
    does not depend on ``jobs``.
    """
    mech = as_mechanism(mechanism, eps, c)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    delta = max_in_degree(g)
    if jobs <= 1:
        s, ss = _trial_chunk(mech, g, seed, 0, trials, delta)
    else:
        bounds = np.linspace(0, trials, jobs + 1).astype(int)
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            futs = [ex.submit(_trial_chunk, mech, g, seed, int(a), int(b), delta)
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            parts = [f.result() for f in futs]
        s = sum(p[0] for p in parts)
        ss = sum(p[1] for p in parts)
    return _from_sums(s, ss, trials, mech.c, delta)


def exact_alpha(mechanism, g: Digraph, eps=None, c=None) -> AlphaEstimate:
    """Exact ratio for the mechanisms that have an enumeration oracle."""
    mech = as_mechanism(mechanism, eps, c)
    delta = max_in_degree(g)
    if mech.name == "permutation":
        mean, cases = exact_expected_winner_degree_permutation(g), math.factorial(g.n)
    elif mech.name == "two-partition":
        mean, cases = exact_expected_winner_degree_two_partition(g), 1 << g.n
    elif mech.name == "baseline":
        mean, cases = Fraction(delta), 1
    else:
        raise ValueError(f"no exact oracle for {mech.name}")
    ratio = 1.0 if delta == 0 else float(mean / delta)
    return AlphaEstimate(float(mean), delta, ratio, cases, 0.0, exact=True, exact_mean=mean)


# -- impartiality -----------------------------------------------------------


@dataclass
class ImpartialityReport:
    tapes_tested: int
    violations: list[tuple[int, int, bool, bool]] = field(default_factory=list)
    # (seed, which graph, winner) where a winner's own votes were read
    trace_violations: list[tuple[int, str, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _own_vote_read(sel: Selection) -> list[int]:
    if sel.fallback_used:
        return []
    read = sel.read_vertices
    return [w for w in sel.winners if w in read]


def impartiality_coupling_test(mechanism, g: Digraph, v: int, new_out_arcs, seeds,
                               *, eps=None, c=None) -> ImpartialityReport:
    """Replay each tape on ``g`` and on ``g`` with ``v``'s votes replaced.

    A violation is a tape on which ``v`` wins in one graph but not the other.
    """
    mech = as_mechanism(mechanism, eps, c)
    new_out = set(new_out_arcs)
    if v in new_out:
        raise ValueError(f"vertex {v} cannot vote for itself")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one tape seed")
    g2 = g.with_out_neighbors(v, sorted(new_out))
    report = ImpartialityReport(len(seeds))
    for seed in seeds:
        tape = RandomTape(seed)
        a, b = mech(g, tape), mech(g2, tape)
        won_a, won_b = v in a.winners, v in b.winners
        if won_a != won_b:
            report.violations.append((seed, v, won_a, won_b))
        report.trace_violations.extend((seed, "original", w) for w in _own_vote_read(a))
        report.trace_violations.extend((seed, "modified", w) for w in _own_vote_read(b))
    return report


# -- balanced permutations and concentration checks -------------------------


def _balance_need(n: int, delta: int, eps) -> np.ndarray:
    # smallest integer count satisfying count >= (k/n - eps) * delta, k = 0..n
    e = as_fraction(eps)
    return np.array(
        [math.ceil((Fraction(k, n) - e) * delta) for k in range(n + 1)], dtype=np.int64
    )


def is_balanced_permutation(pi, delta: int, eps) -> bool:
    """Every prefix of length k holds at least ``(k/n - eps) * delta`` of ``0..delta-1``."""
    pi = np.asarray(pi)
    n = pi.size
    if delta > n:
        raise ValueError(f"delta={delta} exceeds n={n}")
    prefix = np.concatenate(([0], np.cumsum(pi < delta)))
    return bool(np.all(prefix >= _balance_need(n, delta, eps)))


def balanced_fraction(n: int, delta: int, eps, trials: int, seed: int, batch: int = 1000) -> float:
    """Fraction of uniformly random permutations of ``[n]`` that are balanced."""
    if delta > n:
        raise ValueError(f"delta={delta} exceeds n={n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    need = _balance_need(n, delta, eps)[1:]
    rng = np.random.default_rng(seed)
    base = np.arange(n)
    good = 0
    for start in range(0, trials, batch):
        b = min(batch, trials - start)
        perms = rng.permuted(np.broadcast_to(base, (b, n)), axis=1)
        prefix = np.cumsum(perms < delta, axis=1)
        good += int(np.all(prefix >= need, axis=1).sum())
    return good / trials


def hypergeometric_tail(n: int, delta: int, k: int, eps1, trials: int, seed: int) -> float:
    """Empirical ``Pr[ | |X & [k]| - k*delta/n | >= eps1*delta ]`` for a random delta-subset X.

    ``|X & [k]|`` is drawn directly from its hypergeometric law.
    """
    e = as_fraction(eps1)
    if e <= 0:
        raise ValueError(f"eps1 must be > 0, got {eps1}")
    if delta > n or k > n:
        raise ValueError(f"need delta <= n and k <= n (n={n}, delta={delta}, k={k})")
    rng = np.random.default_rng(seed)
    hits = rng.hypergeometric(k, n - k, delta, size=trials) if delta else np.zeros(trials, int)
    # compare |hits*n - k*delta| >= eps1*delta*n in integers
    dev = np.abs(hits.astype(np.int64) * n - k * delta)
    need = math.ceil(e * delta * n)
    return float(np.mean(dev >= need))


def chernoff_empirical(n: int, p, delta, trials: int, seed: int) -> tuple[float, float]:
    """Empirical ``Pr[|S - pn| >= delta*p*n]`` for ``S ~ Bin(n, p)`` and the bound ``exp(-delta^2 pn / 3)``."""
    pf, df = as_fraction(p), as_fraction(delta)
    if not 0 <= pf <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if df < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    rng = np.random.default_rng(seed)
    s = rng.binomial(n, float(p), size=trials)
    mu = pf * n
    lo = math.floor(mu - df * mu)
    hi = math.ceil(mu + df * mu)
    empirical = float(np.mean((s <= lo) | (s >= hi)))
    bound = math.exp(-float(df * df * mu) / 3)
    return empirical, bound


def well_estimated(d_e, d: int, eps_hat) -> bool:
    """``|d_e - d| <= eps_hat * d``."""
    return abs(as_fraction(d_e) - d) <= as_fraction(eps_hat) * d


# -- slice width ------------------------------------------------------------


@dataclass(frozen=True)
class SliceWidth:
    premise: bool
    width: Fraction
    lower: Fraction
    upper: Fraction

    @property
    def within(self) -> bool:
        return self.lower <= self.width <= self.upper


def slice_width_check(g: Digraph, eps, tape: RandomTape, eps_hat=None) -> SliceWidth:
    """Realised band width ``eps^2 * Delta_e`` against ``[(1-eps_hat) eps^2 Delta, eps Delta]``.

    The premise holds when the lowest-index max-degree vertex is unsampled
    and ``eps_hat``-well-estimated (``eps_hat`` defaults to ``eps^2 / 4``).
    """
    e = as_fraction(eps)
    eh = e * e / 4 if eps_hat is None else as_fraction(eps_hat)
    delta = max_in_degree(g)
    x = int(np.argmax(g.in_degree))
    _, d_e = sample_phase(g, eps, tape)
    delta_e = max(d_e.values(), default=Fraction(0))
    premise = x in d_e and well_estimated(d_e[x], delta, eh)
    return SliceWidth(premise, e * e * delta_e, (1 - eh) * e * e * delta, e * delta)


__all__ = [
    "AlphaEstimate",
    "ImpartialityReport",
    "InvariantViolation",
    "Mechanism",
    "SliceWidth",
    "as_mechanism",
    "balanced_fraction",
    "chernoff_empirical",
    "exact_alpha",
    "exact_expected_winner_degree_permutation",
    "exact_expected_winner_degree_two_partition",
    "hypergeometric_tail",
    "impartiality_coupling_test",
    "is_balanced_permutation",
    "monte_carlo_alpha",
    "slice_width_check",
    "well_estimated",
]
