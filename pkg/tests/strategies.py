"""Graph builders, hypothesis strategies and brute-force oracles shared by the tests."""

from collections.abc import Iterable, Sequence
from itertools import combinations, product
from typing import Optional

from hypothesis import strategies as st

from implicate.enums import Sign
from implicate.graph import SignedDigraph, is_insular, is_self_consistent

E, A = Sign.ENDORSE, Sign.ACCUSE
_SIGNS = {"+": E, "-": A}


def build(n: int, edges: Iterable[tuple[int, int, str]], weights: Optional[dict] = None) -> SignedDigraph:
    """`build(3, [(0, 1, "+"), (1, 0, "-")])`."""
    g = SignedDigraph(n)
    for u, v, sign in edges:
        g.add_edge(u, v, _SIGNS[sign], (weights or {}).get((u, v), 1.0))
    return g


@st.composite
def signed_digraphs(
    draw: st.DrawFn,
    min_nodes: int = 1,
    max_nodes: int = 6,
    weighted: bool = False,
) -> SignedDigraph:
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    g = SignedDigraph(n)
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            sign = draw(st.sampled_from((None, None, E, A)))
            if sign is not None:
                weight = draw(st.integers(min_value=1, max_value=10)) if weighted else 1
                g.add_edge(u, v, sign, weight)
    return g


@st.composite
def oriented_digraphs(draw: st.DrawFn, min_nodes: int = 3, max_nodes: int = 6) -> SignedDigraph:
    """At most one directed edge per node pair."""
    n = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    g = SignedDigraph(n)
    for u, v in combinations(range(n), 2):
        option = draw(st.integers(min_value=0, max_value=4))
        if option:
            source, target = (u, v) if option <= 2 else (v, u)
            g.add_edge(source, target, E if option % 2 else A)
    return g


def complete_digraphs(n: int) -> Iterable[SignedDigraph]:
    """Every sign assignment on the complete digraph with n nodes."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for signs in product((E, A), repeat=len(pairs)):
        g = SignedDigraph(n)
        for (u, v), sign in zip(pairs, signs):
            g.add_edge(u, v, sign)
        yield g


def subsets(n: int) -> Iterable[frozenset[int]]:
    for size in range(n + 1):
        for chosen in combinations(range(n), size):
            yield frozenset(chosen)


def brute_self_consistent(g: SignedDigraph, weights: Optional[Sequence[float]] = None) -> frozenset[int]:
    weights = weights or [1.0] * g.n
    best: Optional[tuple[float, tuple[int, ...]]] = None
    for chosen in subsets(g.n):
        if not is_self_consistent(g, chosen):
            continue
        key = (-sum(weights[u] for u in chosen), tuple(sorted(chosen)))
        if best is None or key < best:
            best = key
    assert best is not None
    return frozenset(best[1])


def brute_self_consistent_insular(g: SignedDigraph) -> frozenset[int]:
    best: tuple[int, tuple[int, ...]] = (0, ())
    for chosen in subsets(g.n):
        if is_self_consistent(g, chosen) and is_insular(g, chosen):
            best = min(best, (-len(chosen), tuple(sorted(chosen))))
    return frozenset(best[1])


def set_partitions(items: Sequence[int]) -> Iterable[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first], *partition]
        for i in range(len(partition)):
            yield [*partition[:i], [first, *partition[i]], *partition[i + 1 :]]


def splits_into_factions(g: SignedDigraph) -> bool:
    """Some partition has endorsements exactly inside its blocks."""
    for partition in set_partitions(list(range(g.n))):
        block = {u: i for i, members in enumerate(partition) for u in members}
        if all(
            g.is_endorsement(u, v) == (block[u] == block[v])
            for u in range(g.n)
            for v in range(g.n)
            if u != v
        ):
            return True
    return False
