import itertools

from hypothesis import strategies as st

from impartial.graph import build_digraph


@st.composite
def digraphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u, v in itertools.permutations(range(n), 2)]
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return build_digraph(n, [a for a, k in zip(pairs, keep) if k])


@st.composite
def perturbations(draw, max_n=7):
    """(graph, vertex, new out-neighbourhood) with n >= 2."""
    g = draw(digraphs(min_n=2, max_n=max_n))
    v = draw(st.integers(0, g.n - 1))
    others = [u for u in range(g.n) if u != v]
    new_out = draw(st.lists(st.sampled_from(others), unique=True)) if others else []
    return g, v, sorted(new_out)


# one line per acceptance criterion, echoed after the run whatever the outcome
GATE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if GATE_LINES:
        terminalreporter.section("acceptance gate")
        for line in GATE_LINES:
            terminalreporter.write_line(line)
