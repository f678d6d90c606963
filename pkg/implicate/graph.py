"""The signed directed graph and the reachability primitives built on it."""

import logging
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from typing import Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict
from typing_extensions import Self

from implicate.constants import DEFAULT_WEIGHT
from implicate.enums import Sign
from implicate.exceptions import InvariantViolationError, StructuralInputError

logger = logging.getLogger(__name__)

NodeSet = frozenset[int]


class SignedDigraph:
    """Nodes 0..n-1 with at most one signed, weighted edge per ordered pair.

    Adjacency is indexed four ways (out/in by endorsement/accusation) so the
    census and the dynamics read neighbourhoods in O(1). The returned
    neighbourhood sets are live views and must not be mutated by callers.
    """

    def __init__(self, n: int = 0, labels: Optional[Sequence[str]] = None) -> None:
        """Create an edgeless graph.

        Args:
            n (int): Number of nodes.
            labels (Optional[Sequence[str]]): Optional. External labels, one per node.
                Defaults to the decimal ids.

        Example:
            >>> g = SignedDigraph(3).add_edge(0, 1, Sign.ENDORSE)
        """
        if n < 0:
            raise StructuralInputError(f"node count must be non-negative, got {n}")
        if labels is not None and len(labels) != n:
            raise StructuralInputError(f"{len(labels)} labels supplied for {n} nodes")

        self._labels: list[str] = (
            list(labels) if labels is not None else [str(i) for i in range(n)]
        )
        self._ids: dict[str, int] = {}
        for node, label in enumerate(self._labels):
            if label in self._ids:
                raise StructuralInputError(f"label {label!r} used twice")
            self._ids[label] = node

        self._edges: dict[tuple[int, int], tuple[Sign, float]] = {}
        self._out_e: list[set[int]] = [set() for _ in range(n)]
        self._out_a: list[set[int]] = [set() for _ in range(n)]
        self._in_e: list[set[int]] = [set() for _ in range(n)]
        self._in_a: list[set[int]] = [set() for _ in range(n)]

    @property
    def n(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._labels)

    def label(self, node: int) -> str:
        self._check_node(node)
        return self._labels[node]

    def node_id(self, label: str) -> int:
        try:
            return self._ids[label]
        except KeyError:
            raise StructuralInputError(f"unknown node label {label!r}") from None

    def add_node(self, label: Optional[str] = None) -> int:
        """Append a node and return its id; an existing label returns its id."""
        if label is not None and label in self._ids:
            return self._ids[label]

        node = self.n
        label = str(node) if label is None else label
        if label in self._ids:
            raise StructuralInputError(f"label {label!r} used twice")
        self._labels.append(label)
        self._ids[label] = node
        for index in (self._out_e, self._out_a, self._in_e, self._in_a):
            index.append(set())
        return node

    def add_edge(
        self, u: int, v: int, sign: Sign, weight: float = DEFAULT_WEIGHT
    ) -> Self:
        """Set the edge u -> v, replacing any edge already on that ordered pair."""
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise StructuralInputError(f"self-loop on node {u}")
        if not weight > 0:
            raise StructuralInputError(f"edge weight must be positive, got {weight}")

        self._unlink(u, v)
        self._edges[(u, v)] = (sign, float(weight))
        self._link(u, v, sign)
        return self

    def set_sign(self, u: int, v: int, sign: Sign) -> None:
        """Change the sign of an existing edge, keeping its weight."""
        current = self._edges.get((u, v))
        if current is None:
            raise StructuralInputError(f"no edge {u} -> {v}")
        if current[0] is sign:
            return
        self._unlink(u, v)
        self._edges[(u, v)] = (sign, current[1])
        self._link(u, v, sign)

    def _link(self, u: int, v: int, sign: Sign) -> None:
        if sign is Sign.ENDORSE:
            self._out_e[u].add(v)
            self._in_e[v].add(u)
        else:
            self._out_a[u].add(v)
            self._in_a[v].add(u)

    def _unlink(self, u: int, v: int) -> None:
        previous = self._edges.pop((u, v), None)
        if previous is None:
            return
        if previous[0] is Sign.ENDORSE:
            self._out_e[u].discard(v)
            self._in_e[v].discard(u)
        else:
            self._out_a[u].discard(v)
            self._in_a[v].discard(u)

    def _check_node(self, node: int) -> None:
        if not 0 <= node < self.n:
            raise StructuralInputError(f"node {node} out of range 0..{self.n - 1}")

    def edge(self, u: int, v: int) -> Optional[tuple[Sign, float]]:
        return self._edges.get((u, v))

    def sign(self, u: int, v: int) -> Optional[Sign]:
        found = self._edges.get((u, v))
        return None if found is None else found[0]

    def weight(self, u: int, v: int) -> float:
        found = self._edges.get((u, v))
        if found is None:
            raise StructuralInputError(f"no edge {u} -> {v}")
        return found[1]

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edges

    def is_endorsement(self, u: int, v: int) -> bool:
        return v in self._out_e[u]

    def is_accusation(self, u: int, v: int) -> bool:
        return v in self._out_a[u]

    def out_endorsements(self, u: int) -> set[int]:
        return self._out_e[u]

    def out_accusations(self, u: int) -> set[int]:
        return self._out_a[u]

    def in_endorsements(self, v: int) -> set[int]:
        return self._in_e[v]

    def in_accusations(self, v: int) -> set[int]:
        return self._in_a[v]

    def neighbors(self, u: int) -> set[int]:
        """Nodes joined to u by an edge in either direction."""
        return self._out_e[u] | self._out_a[u] | self._in_e[u] | self._in_a[u]

    def edges(self) -> Iterator[tuple[int, int, Sign, float]]:
        """Iterate over edges in ascending (source, target) order."""
        for (u, v), (sign, weight) in sorted(self._edges.items()):
            yield u, v, sign, weight

    def ordered_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._edges)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    @property
    def endorsement_count(self) -> int:
        return sum(len(targets) for targets in self._out_e)

    @property
    def accusation_count(self) -> int:
        return sum(len(targets) for targets in self._out_a)

    def signature(self) -> frozenset[tuple[int, int, Sign]]:
        """Hashable snapshot of the signed edge set (weights ignored)."""
        return frozenset((u, v, sign) for (u, v), (sign, _) in self._edges.items())

    def is_complete(self) -> bool:
        return len(self._edges) == self.n * (self.n - 1)

    def copy(self) -> "SignedDigraph":
        clone = SignedDigraph(self.n, self._labels)
        for u, v, sign, weight in self.edges():
            clone.add_edge(u, v, sign, weight)
        return clone

    def reversed(self) -> "SignedDigraph":
        """The graph with every edge turned around, signs and weights kept."""
        flipped = SignedDigraph(self.n, self._labels)
        for u, v, sign, weight in self.edges():
            flipped.add_edge(v, u, sign, weight)
        return flipped

    def endorsement_digraph(self) -> "nx.DiGraph[int]":
        """The endorsement subgraph G→ as a networkx graph on all n nodes."""
        digraph: nx.DiGraph[int] = nx.DiGraph()
        digraph.add_nodes_from(range(self.n))
        digraph.add_edges_from(
            (u, v) for u, targets in enumerate(self._out_e) for v in targets
        )
        return digraph

    def audit(self) -> None:
        """Check the adjacency indexes against the edge map.

        Raises:
            InvariantViolationError: If any index disagrees with the edge map.
        """
        rebuilt: dict[tuple[int, int], Sign] = {}
        for name, index, sign, outgoing in (
            ("out-endorse", self._out_e, Sign.ENDORSE, True),
            ("out-accuse", self._out_a, Sign.ACCUSE, True),
            ("in-endorse", self._in_e, Sign.ENDORSE, False),
            ("in-accuse", self._in_a, Sign.ACCUSE, False),
        ):
            for node, others in enumerate(index):
                for other in others:
                    pair = (node, other) if outgoing else (other, node)
                    found = self._edges.get(pair)
                    if found is None or found[0] is not sign:
                        raise InvariantViolationError(f"{name} index holds stale {pair}")
                    rebuilt[pair] = sign

        if rebuilt.keys() != self._edges.keys():
            raise InvariantViolationError("edge map holds pairs missing from the indexes")
        for (u, v), (_, weight) in self._edges.items():
            if u == v or not weight > 0:
                raise InvariantViolationError(f"edge {(u, v)} breaks the edge rules")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignedDigraph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"SignedDigraph(n={self.n}, endorsements={self.endorsement_count}, "
            f"accusations={self.accusation_count})"
        )


class CondensedGraph(BaseModel):
    """The condensation of G→: one weighted meta-node per endorsement SCC."""

    model_config = ConfigDict(frozen=True)

    members: tuple[tuple[int, ...], ...]
    """Sorted node ids of each meta-node; meta-nodes are ordered by smallest member."""
    weights: tuple[float, ...]
    """Component size, or the sum of the supplied node weights."""
    membership: tuple[int, ...]
    """Meta-node of each underlying node."""
    endorsements: frozenset[tuple[int, int]]
    """Meta-edges carried by at least one crossing endorsement."""
    accusations: frozenset[tuple[int, int]]
    """Meta-edges carried by at least one crossing accusation."""

    @property
    def size(self) -> int:
        return len(self.members)

    def dag(self) -> "nx.DiGraph[int]":
        digraph: nx.DiGraph[int] = nx.DiGraph()
        digraph.add_nodes_from(range(self.size))
        digraph.add_edges_from(self.endorsements)
        return digraph

    def topological_order(self) -> list[int]:
        """Meta-nodes in a deterministic topological order of the endorsement DAG."""
        return list(nx.lexicographical_topological_sort(self.dag()))


def add_edge(
    g: SignedDigraph, u: int, v: int, s: Sign, w: float = DEFAULT_WEIGHT
) -> SignedDigraph:
    """Set the edge (u, v) to (s, w) and return the graph."""
    return g.add_edge(u, v, s, w)


def _node_set(g: SignedDigraph, nodes: Iterable[int], *, allow_empty: bool) -> NodeSet:
    found = frozenset(nodes)
    if not found and not allow_empty:
        raise StructuralInputError("node set must not be empty")
    for node in found:
        if not 0 <= node < g.n:
            raise StructuralInputError(f"node {node} out of range 0..{g.n - 1}")
    return found


def _reach(
    starts: NodeSet,
    step: Sequence[set[int]],
    restrict: Optional[NodeSet],
    reflexive: bool,
) -> NodeSet:
    seen: set[int] = set()
    queue = deque(starts)
    while queue:
        node = queue.popleft()
        for nxt in step[node]:
            if restrict is not None and nxt not in restrict:
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    if reflexive:
        seen |= starts
    return frozenset(seen)


def downstream_set(
    g: SignedDigraph, nodes: Iterable[int], *, reflexive: bool = True
) -> NodeSet:
    """σ(U): nodes reached from U along endorsements.

    The non-reflexive form keeps a member of U only when a nonempty
    endorsement path returns to it.

    Raises:
        StructuralInputError: If U is empty or holds an unknown id.
    """
    starts = _node_set(g, nodes, allow_empty=False)
    return _reach(starts, g._out_e, None, reflexive)


def upstream_set(
    g: SignedDigraph,
    nodes: Iterable[int],
    restrict: Optional[Iterable[int]] = None,
    *,
    reflexive: bool = True,
) -> NodeSet:
    """ρ(U): nodes with an endorsement path into U.

    With `restrict`, paths stay inside the induced subgraph on `restrict`
    (ρ_H when restrict = H); start nodes outside `restrict` are dropped.
    """
    starts = _node_set(g, nodes, allow_empty=False)
    allowed = None if restrict is None else _node_set(g, restrict, allow_empty=True)
    if allowed is not None:
        starts = starts & allowed
    return _reach(starts, g._in_e, allowed, reflexive)


def scc_condense(
    g: SignedDigraph, node_weights: Optional[Sequence[float]] = None
) -> CondensedGraph:
    """Condense the endorsement subgraph into its strongly connected components."""
    if node_weights is not None and len(node_weights) != g.n:
        raise StructuralInputError(f"{len(node_weights)} weights for {g.n} nodes")

    components = sorted(
        (tuple(sorted(c)) for c in nx.strongly_connected_components(g.endorsement_digraph())),
        key=lambda members: members[0],
    )
    membership = [0] * g.n
    for meta, component in enumerate(components):
        for node in component:
            membership[node] = meta

    weights = tuple(
        float(len(c)) if node_weights is None else float(sum(node_weights[u] for u in c))
        for c in components
    )
    endorsements: set[tuple[int, int]] = set()
    accusations: set[tuple[int, int]] = set()
    for u, v, sign, _ in g.edges():
        a, b = membership[u], membership[v]
        if a == b:
            continue
        (endorsements if sign is Sign.ENDORSE else accusations).add((a, b))

    return CondensedGraph(
        members=tuple(components),
        weights=weights,
        membership=tuple(membership),
        endorsements=frozenset(endorsements),
        accusations=frozenset(accusations),
    )


def is_self_consistent(g: SignedDigraph, nodes: Iterable[int]) -> bool:
    """True when no member of Q accuses another member of Q."""
    members = _node_set(g, nodes, allow_empty=True)
    return all(g.out_accusations(u).isdisjoint(members) for u in members)


def is_insular(g: SignedDigraph, nodes: Iterable[int]) -> bool:
    """True when no endorsement leaves Q."""
    members = _node_set(g, nodes, allow_empty=True)
    return all(g.out_endorsements(u) <= members for u in members)
