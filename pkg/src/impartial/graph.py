"""Directed-graph model, instance generators and edge-list I/O.

Vertices are the integers ``0..n-1``; an arc ``(u, v)`` means *u votes for v*.
Graphs are immutable once built.
"""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np

__all__ = [
    "Digraph",
    "build_digraph",
    "max_in_degree",
    "single_arc",
    "complete_digraph",
    "circulant_regular",
    "tight_example",
    "tight_example_size",
    "planted_star",
    "two_star",
    "uniform_digraph",
    "greedy_witness_set",
    "parse_edge_list",
    "emit_edge_list",
]


class Digraph:
    """Loopless simple digraph with in/out adjacency indexes.

    Construct through :func:`build_digraph`, which validates the arcs.
    """

    __slots__ = (
        "n",
        "arcs",
        "in_neighbors",
        "out_neighbors",
        "in_degree",
        "out_degree",
        "src",
        "dst",
    )

    def __init__(self, n: int, arcs: tuple[tuple[int, int], ...]):
        self.n = n
        self.arcs = arcs
        ins: list[list[int]] = [[] for _ in range(n)]
        outs: list[list[int]] = [[] for _ in range(n)]
        for u, v in arcs:
            outs[u].append(v)
            ins[v].append(u)
        self.in_neighbors = tuple(tuple(x) for x in ins)
        self.out_neighbors = tuple(tuple(x) for x in outs)
        self.in_degree = np.fromiter((len(x) for x in ins), dtype=np.int64, count=n)
        self.out_degree = np.fromiter((len(x) for x in outs), dtype=np.int64, count=n)
        arr = np.asarray(arcs, dtype=np.int64).reshape(-1, 2)
        self.src = arr[:, 0].copy()
        self.dst = arr[:, 1].copy()
        for a in (self.in_degree, self.out_degree, self.src, self.dst):
            a.flags.writeable = False

    @property
    def m(self) -> int:
        return len(self.arcs)

    def in_degree_within(self, v: int, members) -> int:
        """Number of in-neighbours of ``v`` that lie in ``members``."""
        return sum(1 for u in self.in_neighbors[v] if u in members)

    def with_out_neighbors(self, v: int, new_out: Iterable[int]) -> "Digraph":
        """Copy of the graph where ``v``'s out-neighbourhood is replaced."""
        kept = [a for a in self.arcs if a[0] != v]
        kept.extend((v, w) for w in new_out)
        return build_digraph(self.n, kept)

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={self.m})"

    def __getstate__(self):
        return (self.n, self.arcs)

    def __setstate__(self, state):
        self.__init__(*state)


def build_digraph(n: int, arcs: Iterable[tuple[int, int]]) -> Digraph:
    """Validate ``arcs`` and build a :class:`Digraph` on ``n`` vertices.

    Raises ``ValueError`` on self-loops, duplicate arcs or endpoints outside
    ``[0, n)``.  Arcs are stored in lexicographic order.
    """
    if n < 1:
        raise ValueError(f"vertex count must be >= 1, got {n}")
    seen = set()
    for arc in arcs:
        u, v = (int(x) for x in arc)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"arc ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if (u, v) in seen:
            raise ValueError(f"duplicate arc ({u}, {v})")
        seen.add((u, v))
    return Digraph(n, tuple(sorted(seen)))


def max_in_degree(g: Digraph) -> int:
    return int(g.in_degree.max()) if g.n else 0


# -- generators -------------------------------------------------------------


def single_arc(n: int = 2) -> Digraph:
    """``n`` vertices and the one arc ``0 -> 1``."""
    if n < 2:
        raise ValueError("single-arc instance needs n >= 2")
    return build_digraph(n, [(0, 1)])


def complete_digraph(n: int) -> Digraph:
    return build_digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])


def circulant_regular(n: int, N: int) -> Digraph:
    """Circulant digraph with arcs ``i -> (i + j) mod n`` for ``j = 1..N``.

    Every vertex has in- and out-degree exactly ``N``.
    """
    if N < 1:
        raise ValueError(f"degree must be >= 1, got {N}")
    if n <= N:
        raise ValueError(f"need n > N for a simple circulant, got n={n}, N={N}")
    arcs = [(i, (i + j) % n) for i in range(n) for j in range(1, N + 1)]
    return build_digraph(n, arcs)


def tight_example_size(N: int, eps: float) -> int:
    """Number of regular vertices used by :func:`tight_example`."""
    return math.ceil((N + 1) * (N * N + N + 1) * math.log(1.0 / eps))


def tight_example(N: int, eps: float) -> Digraph:
    """N-regular circulant plus a sink ``v0`` with ``2N - 1`` in-arcs.

    The regular part has ``ceil((N+1)(N^2+N+1) ln(1/eps))`` vertices; the sink
    gets index ``n' `` (the last vertex) and its voters are ``0..2N-2``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not 0 < eps < 0.25:
        raise ValueError(f"eps must lie in (0, 1/4), got {eps}")
    size = tight_example_size(N, eps)
    base = circulant_regular(size, N)
    sink = size
    arcs = list(base.arcs) + [(u, sink) for u in range(2 * N - 1)]
    return build_digraph(size + 1, arcs)


def planted_star(delta: int) -> Digraph:
    """Centre 0 receiving one vote from each of the leaves ``1..delta``."""
    return build_digraph(delta + 1, [(u, 0) for u in range(1, delta + 1)])


def two_star(d1: int, d2: int) -> Digraph:
    """Centres 0 and 1 with ``d1`` and ``d2`` private leaves respectively."""
    arcs = [(2 + i, 0) for i in range(d1)]
    arcs += [(2 + d1 + i, 1) for i in range(d2)]
    return build_digraph(2 + d1 + d2, arcs)


def uniform_digraph(n: int, p: float, seed: int = 0) -> Digraph:
    """Each of the ``n(n-1)`` possible arcs present independently w.p. ``p``."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    keep = rng.random((n, n)) < p
    np.fill_diagonal(keep, False)
    us, vs = np.nonzero(keep)
    return build_digraph(n, zip(us.tolist(), vs.tolist()))


# -- witness set for the tightness construction ----------------------------


def greedy_witness_set(g: Digraph, N: int) -> set[int]:
    """Greedy set of vertices with no internal arcs and disjoint in-neighbourhoods.

    Scans vertices in index order; after picking ``z`` it discards ``z``, its
    in- and out-neighbours, and the out-neighbours of its in-neighbours.
    On an N-regular graph at most ``N^2 + N + 1`` vertices go per pick.
    """
    if np.any(g.in_degree != N) or np.any(g.out_degree != N):
        raise ValueError(f"graph is not {N}-in/out-regular")
    alive = [True] * g.n
    chosen: set[int] = set()
    for z in range(g.n):
        if not alive[z]:
            continue
        chosen.add(z)
        alive[z] = False
        for u in g.in_neighbors[z]:
            alive[u] = False
            for w in g.out_neighbors[u]:
                alive[w] = False
        for w in g.out_neighbors[z]:
            alive[w] = False
    return chosen


# -- edge-list format -------------------------------------------------------


def parse_edge_list(text: str) -> Digraph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"`` (0-indexed)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty edge list")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"malformed header {lines[0]!r}")
    try:
        n, m = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"malformed header {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"header announces {m} arcs, found {len(body)}")
    arcs = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"malformed arc line {ln!r}")
        try:
            arcs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"malformed arc line {ln!r}") from None
    return build_digraph(n, arcs)


def emit_edge_list(g: Digraph) -> str:
    out = [f"{g.n} {g.m}\n"]
    out.extend(f"{u} {v}\n" for u, v in g.arcs)
    return "".join(out)
