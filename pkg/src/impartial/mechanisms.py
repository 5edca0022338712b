"""Impartial selection mechanisms.

All mechanisms are pure functions of ``(graph, tape)`` and return a
:class:`Selection` carrying a vote-read trace: the ordered list of vertices
whose out-arcs were allowed to influence the outcome.  Argmax ties are always
broken towards the lowest vertex index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph import Digraph
from .tape import RandomTape

__all__ = [
    "Selection",
    "SliceAssignment",
    "as_fraction",
    "num_slices",
    "permutation_mechanism",
    "permutation_run",
    "two_partition_mechanism",
    "two_partition_winner",
    "sample_phase",
    "slice_assign",
    "slicing_mechanism",
    "slicing_multiwinner",
    "max_indegree_baseline",
]


@dataclass(frozen=True)
class Selection:
    winners: tuple[int, ...]
    winner_in_degrees: tuple[int, ...]
    trace: tuple[tuple[int, str], ...] = ()
    fallback_used: bool = False

    @property
    def winner(self) -> int:
        return self.winners[0]

    @property
    def read_vertices(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.trace)


@dataclass(frozen=True)
class SliceAssignment:
    tau: int
    slices: tuple[frozenset[int], ...]
    delta_e: Fraction
    d_e: dict = field(compare=False)

    def slice_of(self, v: int) -> int:
        """1-based slice index of an unsampled vertex."""
        for i, s in enumerate(self.slices, start=1):
            if v in s:
                return i
        raise KeyError(v)


@lru_cache(maxsize=1024)
def _float_fraction(x: float) -> Fraction:
    return Fraction(repr(x))


def as_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are read as the decimal they print as.

    ``0.1`` becomes ``1/10`` rather than its binary expansion, so slice
    boundaries such as ``k / eps`` land where a reader expects.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return _float_fraction(x)
    return Fraction(x)


def num_slices(eps) -> int:
    e = as_fraction(eps)
    return math.ceil(1 / (e * e))


def _check_eps(eps) -> Fraction:
    e = as_fraction(eps)
    if not 0 < e < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return e


def _selection(g: Digraph, winners, trace, fallback=False) -> Selection:
    winners = tuple(int(w) for w in winners)
    return Selection(
        winners=winners,
        winner_in_degrees=tuple(int(g.in_degree[w]) for w in winners),
        trace=tuple(trace),
        fallback_used=fallback,
    )


# -- permutation mechanism --------------------------------------------------


def permutation_run(g: Digraph, order) -> tuple[int, list[int], list[int]]:
    """Run the permutation mechanism along a fixed vertex order.

    Returns ``(winner, released, leader_counts)``.  ``released`` lists the
    vertices whose votes were counted, in the order they were released;
    ``leader_counts[i]`` is the leader's counted in-degree after step ``i``.

    ``cnt[v]`` holds the number of in-neighbours of ``v`` among the examined
    vertices other than the current leader, so a newly examined vertex and the
    leader are compared on exactly the same voter set.
    """
    out = g.out_neighbors
    cnt = [0] * g.n
    it = iter(order)
    leader = next(it)
    released: list[int] = []
    history = [0]
    for w in it:
        # ties favour the newly examined vertex
        if cnt[w] >= cnt[leader]:
            loser, leader = leader, w
        else:
            loser = w
        released.append(loser)
        for t in out[loser]:
            cnt[t] += 1
        history.append(cnt[leader])
    return leader, released, history


def permutation_mechanism(g: Digraph, tape: RandomTape) -> Selection:
    order = tape.permutation(g.n).tolist()
    winner, released, _ = permutation_run(g, order)
    return _selection(g, [winner], ((v, "permutation") for v in released))


# -- 2-partition mechanism --------------------------------------------------


def two_partition_winner(g: Digraph, in_v1) -> tuple[int, bool]:
    """Winner for a fixed bipartition; ``in_v1[v]`` marks the voting side.

    Returns ``(winner, fallback_used)``.  With every vertex in V1 nobody is
    eligible and vertex 0 is returned, the lowest-index rule applied to a
    vote count that is zero everywhere.
    """
    in_v1 = np.asarray(in_v1, dtype=bool)
    if in_v1.all():
        return 0, True
    counted = np.bincount(g.dst[in_v1[g.src]], minlength=g.n)
    counted[in_v1] = -1
    return int(np.argmax(counted)), False


def two_partition_mechanism(g: Digraph, tape: RandomTape) -> Selection:
    in_v1 = tape.partition_coins(g.n)
    winner, fallback = two_partition_winner(g, in_v1)
    trace = () if fallback else ((int(v), "partition") for v in np.flatnonzero(in_v1))
    return _selection(g, [winner], trace, fallback)


# -- slicing mechanism ------------------------------------------------------


def _sampled_counts(g: Digraph, sampled: np.ndarray) -> np.ndarray:
    """``d^-_X(v)`` for every vertex, ``X`` given as a boolean mask."""
    return np.bincount(g.dst[sampled[g.src]], minlength=g.n)


def sample_phase(g: Digraph, eps, tape: RandomTape) -> tuple[frozenset[int], dict[int, Fraction]]:
    """Draw the sample ``X`` and estimate the degree of every unsampled vertex.

    ``d_e(v) = d^-_X(v) / eps`` as an exact rational.
    """
    e = _check_eps(eps)
    sampled = tape.sample_coins(g.n, float(eps))
    k = _sampled_counts(g, sampled)
    X = frozenset(np.flatnonzero(sampled).tolist())
    d_e = {v: Fraction(int(k[v])) / e for v in range(g.n) if not sampled[v]}
    return X, d_e


def slice_assign(d_e: dict, eps, delta_e=None) -> SliceAssignment:
    """Band unsampled vertices by estimated degree.

    Slice ``i`` holds ``(i-1) eps^2 delta_e <= d_e < i eps^2 delta_e``; the top
    slice is closed above.  With ``delta_e == 0`` everything goes to slice 1.
    """
    e = _check_eps(eps)
    tau = num_slices(e)
    vals = {v: as_fraction(x) for v, x in d_e.items()}
    top = max(vals.values(), default=Fraction(0))
    de = top if delta_e is None else as_fraction(delta_e)
    if de != top:
        raise ValueError(f"delta_e={delta_e} is not the maximum estimated degree {top}")
    slices: list[set[int]] = [set() for _ in range(tau)]
    width = e * e * de
    for v, x in vals.items():
        i = 1 if de == 0 else min(tau, math.floor(x / width) + 1)
        slices[i - 1].add(v)
    return SliceAssignment(tau, tuple(frozenset(s) for s in slices), de, dict(vals))


@lru_cache(maxsize=4096)
def _band_thresholds(eps: Fraction, k_max: int, tau: int) -> tuple[int, ...]:
    # smallest integer count reaching band i+1, for i = 1..tau-1
    num, den = (eps * eps).numerator, (eps * eps).denominator
    return tuple(-((-i * num * k_max) // den) for i in range(1, tau))


def _slice_index(k: np.ndarray, eps: Fraction, tau: int) -> np.ndarray:
    """1-based slice index from integer sampled-in-degree counts.

    Equivalent to :func:`slice_assign` on ``d_e = k / eps``: the common
    ``1/eps`` factor cancels, leaving integer comparisons only.
    """
    k_max = int(k.max()) if k.size else 0
    if k_max == 0:
        return np.ones(k.shape, dtype=np.int64)
    thr = np.asarray(_band_thresholds(eps, k_max, tau), dtype=np.int64)
    return np.searchsorted(thr, k, side="right") + 1


def _top(cnt: np.ndarray, in_r: np.ndarray, c: int) -> np.ndarray:
    key = np.where(in_r, -1, cnt)
    if c == 1:
        return np.array([int(np.argmax(key))])
    return np.argsort(-key, kind="stable")[:c]


def _slicing(g: Digraph, eps, c: int, tape: RandomTape) -> Selection:
    e = _check_eps(eps)
    if c < 1:
        raise ValueError(f"number of winners must be >= 1, got {c}")
    n = g.n
    tau = num_slices(e)
    sampled = tape.sample_coins(n, float(eps))
    unsampled = np.flatnonzero(~sampled)
    trace: list[tuple[int, str]] = [(int(v), "sample") for v in np.flatnonzero(sampled)]

    if unsampled.size < c:
        pad = [int(v) for v in tape.fallback_order(n) if sampled[v]]
        winners = unsampled.tolist() + pad[: c - unsampled.size]
        return _selection(g, winners, trace, fallback=True)

    k = _sampled_counts(g, sampled)
    band = _slice_index(k[unsampled], e, tau)
    slices: dict[int, list[int]] = {}
    for v, b in zip(unsampled.tolist(), band.tolist()):
        slices.setdefault(b, []).append(v)
    reveal = tape.reveal_coins(n, float(eps))

    in_r = sampled.copy()
    cnt = k.copy()  # d^-_R with R = X
    src, dst = g.src, g.dst

    def admit(vs, phase):
        vs = [v for v in vs if not in_r[v]]
        if not vs:
            return
        mask = np.zeros(n, dtype=bool)
        mask[vs] = True
        in_r[mask] = True
        cnt[:] += np.bincount(dst[mask[src]], minlength=n)
        trace.extend((v, phase) for v in vs)

    y = _top(cnt, in_r, c).tolist()
    # y is the top-c of the current R; while that holds, a slice with no
    # vertex outside y changes nothing and can be skipped
    stable = True
    for i in range(1, tau + 1):
        s = slices.get(i, [])
        cand = [v for v in s if v not in y]
        if stable and not cand:
            continue
        admit([v for v in cand if reveal[v]], "reveal")
        y_prime = _top(cnt, in_r, c).tolist()
        admit([v for v in s + sorted(y) if v not in y_prime], "election")
        y = _top(cnt, in_r, c).tolist()
        admit(sorted(set(y_prime) - set(y)), "election")
        stable = set(y_prime) == set(y)

    return _selection(g, y, trace)


def slicing_mechanism(g: Digraph, eps, tape: RandomTape) -> Selection:
    """Sample, slice by estimated degree, then elect slice by slice."""
    return _slicing(g, eps, 1, tape)


def slicing_multiwinner(g: Digraph, eps, c: int, tape: RandomTape) -> Selection:
    """Slicing with the top ``c`` unrevealed vertices tracked at every step."""
    return _slicing(g, eps, c, tape)


def max_indegree_baseline(g: Digraph, tape: RandomTape | None = None) -> Selection:
    """Plain argmax of in-degree.  Not impartial; reference ratio 1."""
    w = int(np.argmax(g.in_degree))
    return _selection(g, [w], ((v, "baseline") for v in range(g.n)))
