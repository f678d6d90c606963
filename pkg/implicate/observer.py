"""Identification strategies of an outside observer and the hypotheses they rely on."""

import logging
import time
from collections.abc import Iterable, Iterator, Sequence
from itertools import combinations
from typing import Optional

import networkx as nx

from implicate.constants import TREE_CONDITION_MAX_NODES
from implicate.enums import Depth, Sign, Verdict
from implicate.exceptions import AmbiguityError, BudgetExceededError, StructuralInputError
from implicate.graph import (
    NodeSet,
    SignedDigraph,
    downstream_set,
    is_insular,
    is_self_consistent,
    scc_condense,
    upstream_set,
)
from implicate.motifs import inconsistent_implications, node_implications
from implicate.types import Partition, SearchBudget, VerdictLabels

logger = logging.getLogger(__name__)


class _Deadline:
    """Raises once the search has run longer than the budget allows."""

    def __init__(self, budget: SearchBudget) -> None:
        self._cap = budget.time_cap
        self._started = time.monotonic()
        self.visited = 0

    def tick(self) -> None:
        self.visited += 1
        if self.visited % 1024:
            return
        elapsed = time.monotonic() - self._started
        if elapsed > self._cap:
            raise BudgetExceededError("time_cap", self._cap, round(elapsed, 3))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _mask(nodes: Iterable[int]) -> int:
    result = 0
    for node in nodes:
        result |= 1 << node
    return result


def _check_exact_size(g: SignedDigraph, budget: SearchBudget) -> None:
    if g.n > budget.max_nodes_exact:
        raise BudgetExceededError("max_nodes_exact", budget.max_nodes_exact, g.n)


def _check_partition(g: SignedDigraph, part: Partition) -> None:
    if part.n != g.n:
        raise StructuralInputError(f"partition covers {part.n} nodes, graph has {g.n}")


def _node_weights(g: SignedDigraph, node_weights: Optional[Sequence[float]]) -> list[float]:
    if node_weights is None:
        return [1.0] * g.n
    if len(node_weights) != g.n:
        raise StructuralInputError(f"{len(node_weights)} weights for {g.n} nodes")
    if any(not w > 0 for w in node_weights):
        raise StructuralInputError("node weights must be positive")
    return [float(w) for w in node_weights]


def implication_screen(g: SignedDigraph, depth: Depth = Depth.LOCAL) -> VerdictLabels:
    """Mark implicated nodes and everyone endorsing their way to them.

    Emits only `IMPLICATED_C` and `UNDETERMINED`.
    """
    marked: set[int] = set()
    for round_number in range(1, g.n + 1):
        implicated = {found.implicated for found in inconsistent_implications(g, depth)}
        if not implicated:
            break
        closure = upstream_set(g, implicated)
        if closure <= marked:
            break
        marked |= closure
        logger.debug("screen round %d: %d nodes implicated", round_number, len(marked))

    return VerdictLabels(
        labels=tuple(
            Verdict.IMPLICATED_C if u in marked else Verdict.UNDETERMINED for u in range(g.n)
        )
    )


def identify_by_largest_scc(g: SignedDigraph) -> VerdictLabels:
    """Trust everything downstream of the largest endorsement SCC.

    Emits only `CREDIBLE_H` and `IMPLICATED_C`.

    Raises:
        AmbiguityError: If two components share the largest size.
    """
    if g.n == 0:
        return VerdictLabels(labels=())

    components = sorted(
        nx.strongly_connected_components(g.endorsement_digraph()), key=len, reverse=True
    )
    if len(components) > 1 and len(components[0]) == len(components[1]):
        raise AmbiguityError(
            f"{sum(len(c) == len(components[0]) for c in components)} components "
            f"tie for the largest size {len(components[0])}"
        )

    credible = downstream_set(g, components[0])
    return VerdictLabels(
        labels=tuple(
            Verdict.CREDIBLE_H if u in credible else Verdict.IMPLICATED_C for u in range(g.n)
        )
    )


def verify_thm_scc(g: SignedDigraph, part: Partition) -> bool:
    """True when H outnumbers C and the largest SCC of G_H outnumbers C and reaches all of H.

    The largest SCC of G_H must be unique; that is the component the observer
    picks, so a qualifying but smaller component does not count.
    """
    _check_partition(g, part)
    honest, cheaters = part.honest, part.cheaters
    if len(honest) <= len(cheaters):
        return False

    honest_graph = g.endorsement_digraph().subgraph(honest)
    components = sorted(nx.strongly_connected_components(honest_graph), key=len, reverse=True)
    largest = components[0]
    if len(components) > 1 and len(components[1]) == len(largest):
        return False
    if len(largest) <= len(cheaters):
        return False

    reach = set(largest)
    for node in largest:
        reach |= nx.descendants(honest_graph, node)
    return honest <= reach


def largest_self_consistent_set(
    g: SignedDigraph,
    node_weights: Optional[Sequence[float]] = None,
    budget: Optional[SearchBudget] = None,
) -> NodeSet:
    """The heaviest set with no internal accusation.

    A maximum-weight independent set of the conflict graph (u, v adjacent when
    either accuses the other), found by branch and bound over the lowest
    undecided id, include first. Among heaviest sets the lexicographically
    smallest is returned.

    Args:
        g (SignedDigraph): The graph.
        node_weights (Optional[Sequence[float]]): Optional. Positive weight per node.
            Defaults to 1 for every node.
        budget (Optional[SearchBudget]): Optional. Search caps.

    Returns:
        NodeSet: The chosen set.

    Raises:
        BudgetExceededError: If the graph or the search time exceeds the budget.
    """
    budget = budget or SearchBudget()
    _check_exact_size(g, budget)
    weights = _node_weights(g, node_weights)

    conflicts = [0] * g.n
    for u, v, sign, _ in g.edges():
        if sign is Sign.ACCUSE:
            conflicts[u] |= 1 << v
            conflicts[v] |= 1 << u

    deadline = _Deadline(budget)
    best_mask, best_weight = 0, -1.0

    def mask_weight(mask: int) -> float:
        return sum(weights[u] for u in _bits(mask))

    def branch(chosen: int, weight: float, candidates: int) -> None:
        nonlocal best_mask, best_weight
        deadline.tick()
        if not candidates:
            if weight > best_weight:
                best_mask, best_weight = chosen, weight
            return
        if weight + mask_weight(candidates) <= best_weight:
            return

        low = candidates & -candidates
        node = low.bit_length() - 1
        branch(chosen | low, weight + weights[node], candidates & ~low & ~conflicts[node])
        branch(chosen, weight, candidates & ~low)

    branch(0, 0.0, (1 << g.n) - 1)
    logger.debug("self-consistent search visited %d nodes", deadline.visited)
    return frozenset(_bits(best_mask))


def _meta_closures(g: SignedDigraph) -> tuple[list[tuple[int, ...]], list[int], list[int], list[int]]:
    """Members, descendant masks, ancestor masks and conflict masks of the condensation."""
    condensed = scc_condense(g)
    dag = condensed.dag()
    size = condensed.size

    descendants = [(1 << m) | _mask(nx.descendants(dag, m)) for m in range(size)]
    ancestors = [(1 << m) | _mask(nx.ancestors(dag, m)) for m in range(size)]
    conflicts = [0] * size
    for u, v, sign, _ in g.edges():
        if sign is Sign.ACCUSE:
            a, b = condensed.membership[u], condensed.membership[v]
            conflicts[a] |= 1 << b
            conflicts[b] |= 1 << a

    return list(condensed.members), descendants, ancestors, conflicts


def _consistent(metas: int, conflicts: Sequence[int]) -> bool:
    return all(not conflicts[m] & metas for m in _bits(metas))


def largest_self_consistent_insular_set(
    g: SignedDigraph, budget: Optional[SearchBudget] = None
) -> NodeSet:
    """The largest set that is both self-consistent and insular.

    Insular sets are exactly the descendant-closed unions of condensation
    meta-nodes, so the search branches over meta-nodes: including one pulls in
    its descendants, excluding one rules out its ancestors. Ties go to the
    lexicographically smallest node set.

    Raises:
        BudgetExceededError: If the graph or the search time exceeds the budget.
    """
    budget = budget or SearchBudget()
    _check_exact_size(g, budget)
    members, descendants, ancestors, conflicts = _meta_closures(g)
    sizes = [len(component) for component in members]
    everything = (1 << len(members)) - 1
    deadline = _Deadline(budget)

    best: tuple[int, tuple[int, ...]] = (0, ())

    def nodes_of(metas: int) -> tuple[int, ...]:
        return tuple(sorted(node for m in _bits(metas) for node in members[m]))

    def branch(included: int, excluded: int) -> None:
        nonlocal best
        deadline.tick()
        undecided = everything & ~included & ~excluded
        size = sum(sizes[m] for m in _bits(included))
        if size + sum(sizes[m] for m in _bits(undecided)) < -best[0]:
            return
        if not undecided:
            key = (-size, nodes_of(included))
            if key < best:
                best = key
            return

        meta = (undecided & -undecided).bit_length() - 1
        closure = descendants[meta]
        if not closure & excluded and _consistent(included | closure, conflicts):
            branch(included | closure, excluded)
        branch(included, excluded | ancestors[meta])

    branch(0, 0)
    logger.debug("insular search visited %d nodes", deadline.visited)
    return frozenset(best[1])


def self_consistent_insular_sets_ranked(
    g: SignedDigraph, budget: Optional[SearchBudget] = None, top: int = 2
) -> list[NodeSet]:
    """The `top` largest self-consistent insular sets, largest first, then lexicographic.

    Exhaustive over sets of condensation meta-nodes.

    Raises:
        BudgetExceededError: If the condensation has more meta-nodes than `max_subset_bits`.
    """
    budget = budget or SearchBudget()
    members, descendants, _, conflicts = _meta_closures(g)
    if len(members) > budget.max_subset_bits:
        raise BudgetExceededError("max_subset_bits", budget.max_subset_bits, len(members))

    found: list[tuple[int, tuple[int, ...]]] = []
    for metas in range(1, 1 << len(members)):
        if any(descendants[m] & ~metas for m in _bits(metas)):
            continue
        if not _consistent(metas, conflicts):
            continue
        nodes = tuple(sorted(node for m in _bits(metas) for node in members[m]))
        found.append((-len(nodes), nodes))

    found.sort()
    return [frozenset(nodes) for _, nodes in found[:top]]


def verify_outnumbering(
    g: SignedDigraph,
    part: Partition,
    node_weights: Optional[Sequence[float]] = None,
    budget: Optional[SearchBudget] = None,
) -> bool:
    """True when every nonempty S ⊆ C is covered and outweighed by its honest accusers.

    Raises:
        BudgetExceededError: If |C| exceeds `max_subset_bits`.
    """
    budget = budget or SearchBudget()
    _check_partition(g, part)
    weights = _node_weights(g, node_weights)
    honest, cheaters = part.honest, sorted(part.cheaters)
    if len(cheaters) > budget.max_subset_bits:
        raise BudgetExceededError("max_subset_bits", budget.max_subset_bits, len(cheaters))

    accusers = {c: g.in_accusations(c) & honest for c in cheaters}
    if any(not accusers[c] for c in cheaters):
        return False

    for size in range(1, len(cheaters) + 1):
        for subset in combinations(cheaters, size):
            union: set[int] = set().union(*(accusers[c] for c in subset))
            if sum(weights[h] for h in union) <= sum(weights[c] for c in subset):
                logger.debug("outnumbering fails for S=%s", subset)
                return False
    return True


def verify_hamiltonian_condition(
    g: SignedDigraph, part: Partition, budget: Optional[SearchBudget] = None
) -> bool:
    """True when an alternating path h1 ⊣ c1 ⊢ h2 ⊣ c2 ... ⊢ hk covers all of C.

    With C empty the path is a single honest node.

    Raises:
        BudgetExceededError: If |C| exceeds `max_nodes_exact`.
    """
    budget = budget or SearchBudget()
    _check_partition(g, part)
    honest, cheaters = part.honest, part.cheaters
    if len(cheaters) > budget.max_nodes_exact:
        raise BudgetExceededError("max_nodes_exact", budget.max_nodes_exact, len(cheaters))
    if not cheaters:
        return bool(honest)

    accused = {h: sorted(g.out_accusations(h) & cheaters) for h in honest}
    accusers = {c: sorted(g.in_accusations(c) & honest) for c in cheaters}
    deadline = _Deadline(budget)

    def extend(head: int, used_h: set[int], used_c: set[int]) -> bool:
        deadline.tick()
        if len(used_c) == len(cheaters):
            return True
        for c in accused[head]:
            if c in used_c:
                continue
            used_c.add(c)
            for h in accusers[c]:
                if h in used_h:
                    continue
                used_h.add(h)
                if extend(h, used_h, used_c):
                    return True
                used_h.discard(h)
            used_c.discard(c)
        return False

    return any(extend(h, {h}, set()) for h in sorted(honest))


def verify_tree_condition(
    g: SignedDigraph, part: Partition, budget: Optional[SearchBudget] = None
) -> bool:
    """True when every nonempty S ⊆ C has a witness set K that pins it down.

    K must reach S upstream (S ⊆ ρ(K) ∪ K), each k ∈ K must have a member of S
    upstream, and the honest accusers U* of K must cover K with
    |ρ_H(U*)| > |ρ(K)|, all ρ reflexive.

    Raises:
        BudgetExceededError: If the graph is larger than the search allows.
    """
    budget = budget or SearchBudget()
    _check_partition(g, part)
    limit = min(TREE_CONDITION_MAX_NODES, budget.max_nodes_exact)
    if g.n > limit:
        raise BudgetExceededError("tree_condition_nodes", limit, g.n)

    honest, cheaters = part.honest, sorted(part.cheaters)
    if not cheaters:
        return True

    upstream = [_mask(upstream_set(g, (u,))) for u in range(g.n)]
    honest_upstream = {h: _mask(upstream_set(g, (h,), restrict=honest)) for h in honest}
    accusers = [g.in_accusations(u) & honest for u in range(g.n)]
    deadline = _Deadline(budget)

    def witnessed(subset: int) -> bool:
        allowed = [k for k in range(g.n) if upstream[k] & subset and accusers[k]]
        reach = 0
        for k in allowed:
            reach |= upstream[k]
        if subset & ~reach:
            return False

        for size in range(1, len(allowed) + 1):
            for chosen in combinations(allowed, size):
                deadline.tick()
                rho = 0
                for k in chosen:
                    rho |= upstream[k]
                if subset & ~rho:
                    continue
                rho_honest = 0
                for h in set().union(*(accusers[k] for k in chosen)):
                    rho_honest |= honest_upstream[h]
                if _popcount(rho_honest) > _popcount(rho):
                    return True
        return False

    for size in range(1, len(cheaters) + 1):
        for subset in combinations(cheaters, size):
            if not witnessed(_mask(subset)):
                logger.debug("tree condition fails for S=%s", subset)
                return False
    return True


def is_complete_information_in_group(g: SignedDigraph, nodes: Iterable[int]) -> bool:
    """Self-consistent, insular, and every internal ordered pair endorses."""
    members = frozenset(nodes)
    if not members:
        return False
    return (
        is_self_consistent(g, members)
        and is_insular(g, members)
        and all(g.is_endorsement(u, v) for u in members for v in members if u != v)
    )


def is_partial_information_in_group(g: SignedDigraph, nodes: Iterable[int]) -> bool:
    """Insular, with no member implicated at any depth."""
    members = frozenset(nodes)
    if not members or not is_insular(g, members):
        return False
    return not any(node_implications(g, u, Depth.DEEP) for u in sorted(members))


def verdicts_to_rows(g: SignedDigraph, verdicts: VerdictLabels) -> list[tuple[str, str]]:
    """(node label, verdict) rows in id order."""
    if len(verdicts.labels) != g.n:
        raise StructuralInputError(f"{len(verdicts.labels)} verdicts for {g.n} nodes")
    return [(g.label(u), verdict.value) for u, verdict in enumerate(verdicts.labels)]
