"""Implication avoiding dynamics, their equilibria and the structure of those equilibria."""

import logging
from collections import defaultdict
from collections.abc import Iterable
from itertools import combinations, product
from typing import Optional, Union

import networkx as nx
import numpy as np

from implicate.enums import Depth, DynamicsMode, MotifKind, Sign
from implicate.exceptions import (
    InvariantViolationError,
    NotAtEquilibriumError,
    PreconditionError,
)
from implicate.graph import (
    NodeSet,
    SignedDigraph,
    downstream_set,
    is_insular,
    is_self_consistent,
    scc_condense,
)
from implicate.motifs import node_implications, triangle_implications
from implicate.types import (
    DynamicsConfig,
    Implication,
    InsularStructure,
    StepEvent,
    TrajectoryPoint,
    TrajectoryStats,
)

logger = logging.getLogger(__name__)

Flip = tuple[int, int, Sign]
Signature = frozenset[tuple[int, int, Sign]]
ResolutionKey = tuple[Union[str, int], ...]


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """The generator every random choice of a run is drawn from."""
    return np.random.default_rng(seed)


def replicate_seeds(seed: int, replicates: int) -> list[np.random.SeedSequence]:
    """Independent child streams, one per replicate."""
    return np.random.SeedSequence(seed).spawn(replicates)


def _apply(g: SignedDigraph, flips: Iterable[Flip]) -> None:
    for u, v, sign in flips:
        g.set_sign(u, v, sign)


def resolve_edge_inconsistencies(g: SignedDigraph) -> tuple[SignedDigraph, list[Flip]]:
    """Turn the endorsement of every mixed dyad into an accusation, in place.

    Flips only remove endorsements, so no pass creates a new mixed dyad and the
    fixpoint does not depend on the order.
    """
    flips: list[Flip] = []
    while True:
        found = [
            (u, v, Sign.ACCUSE)
            for u in range(g.n)
            for v in sorted(g.out_endorsements(u) & g.in_accusations(u))
        ]
        if not found:
            return g, flips
        _apply(g, found)
        flips.extend(found)


def implicating_triangles(g: SignedDigraph, u: int) -> list[tuple[MotifKind, tuple[int, ...]]]:
    """Type I, II and III instances implicating u, as (type, (u, a, b))."""
    return [(found.motif, found.witness) for found in triangle_implications(g, u)]


def _local_outcomes(found: Implication, cfg: DynamicsConfig) -> list[tuple[float, Flip]]:
    u, a, b = found.witness
    if found.motif is MotifKind.TYPE_I:
        return [(cfg.beta, (u, b, Sign.ACCUSE)), (1.0 - cfg.beta, (u, a, Sign.ACCUSE))]
    if found.motif is MotifKind.TYPE_II:
        return [(cfg.alpha, (u, b, Sign.ENDORSE)), (1.0 - cfg.alpha, (u, a, Sign.ACCUSE))]
    return [(1.0, (u, a, Sign.ACCUSE))]


def _draw(outcomes: list[tuple[float, Flip]], rng: np.random.Generator) -> Flip:
    if len(outcomes) == 1:
        return outcomes[0][1]
    return outcomes[0][1] if rng.random() < outcomes[0][0] else outcomes[1][1]


def local_step(
    g: SignedDigraph, cfg: DynamicsConfig, rng: np.random.Generator, step: int = 0
) -> tuple[SignedDigraph, StepEvent]:
    """Draw a node, resolve one of its implicating triangles, then sweep mixed dyads."""
    u = int(rng.integers(g.n))
    found = triangle_implications(g, u)
    if not found:
        return g, StepEvent(step=step, node=u)

    chosen = found[int(rng.integers(len(found)))]
    flip = _draw(_local_outcomes(chosen, cfg), rng)
    _apply(g, (flip,))
    _, swept = resolve_edge_inconsistencies(g)
    return g, StepEvent(
        step=step, node=u, motif=chosen.motif, witness=chosen.witness, flips=(flip, *swept)
    )


def strong_violations(g: SignedDigraph, u: int) -> list[Implication]:
    """Implications of u at every depth, triangles and dyads included."""
    return node_implications(g, u, Depth.DEEP)


def _resolution_key(found: Implication) -> ResolutionKey:
    """Generalized type and target(s) of a violation.

    II: u accuses a downstream v. III: a downstream v accuses u.
    I: downstream v accuses downstream w.
    """
    motif, nodes = found.motif, found.witness
    if motif is MotifKind.TYPE_I:
        return ("I", nodes[1], nodes[2])
    if motif is MotifKind.DEEP_DOWNSTREAM_CONFLICT:
        return ("I", nodes[1], nodes[2])
    if motif is MotifKind.TYPE_II:
        return ("II", nodes[2])
    if motif is MotifKind.DEEP_ACCUSES_DOWNSTREAM:
        return ("II", nodes[1])
    if motif is MotifKind.TYPE_III:
        return ("III", nodes[2])
    return ("III", nodes[1])


def repair_edges(g: SignedDigraph, u: int, target: int) -> list[int]:
    """Endorsements u → y with the target reachable from y (y itself included)."""
    return [y for y in sorted(g.out_endorsements(u)) if target in downstream_set(g, (y,))]


def _repair(g: SignedDigraph, u: int, target: int, rng: np.random.Generator) -> Flip:
    choices = repair_edges(g, u, target)
    if not choices:
        raise InvariantViolationError(f"node {u} has no endorsement path to {target}")
    return u, choices[int(rng.integers(len(choices)))], Sign.ACCUSE


def strong_step(
    g: SignedDigraph, cfg: DynamicsConfig, rng: np.random.Generator, step: int = 0
) -> tuple[SignedDigraph, StepEvent]:
    """Draw a node, resolve one of its violations at any depth, then sweep mixed dyads.

    The violation is drawn uniformly over distinct (generalized type, target)
    keys; a repair cuts a first-hop endorsement on a path toward the target.
    """
    u = int(rng.integers(g.n))
    violations = strong_violations(g, u)
    if not violations:
        return g, StepEvent(step=step, node=u)

    by_key: dict[ResolutionKey, Implication] = {}
    for found in violations:
        by_key.setdefault(_resolution_key(found), found)
    keys = sorted(by_key, key=repr)
    key = keys[int(rng.integers(len(keys)))]
    chosen = by_key[key]

    if key[0] == "II":
        target = int(key[1])
        flip = (u, target, Sign.ENDORSE) if rng.random() < cfg.alpha else _repair(g, u, target, rng)
    elif key[0] == "III":
        flip = _repair(g, u, int(key[1]), rng)
    else:
        accuser, accused = int(key[1]), int(key[2])
        flip = _repair(g, u, accused if rng.random() < cfg.beta else accuser, rng)

    _apply(g, (flip,))
    _, swept = resolve_edge_inconsistencies(g)
    return g, StepEvent(
        step=step, node=u, motif=chosen.motif, witness=chosen.witness, flips=(flip, *swept)
    )


def _has_mixed_dyad(g: SignedDigraph) -> bool:
    return any(g.out_endorsements(u) & g.in_accusations(u) for u in range(g.n))


def is_local_equilibrium(g: SignedDigraph) -> bool:
    """True when no mixed dyad and no implicating triangle exists."""
    if _has_mixed_dyad(g):
        return False
    return not any(triangle_implications(g, u) for u in range(g.n))


def is_strong_consistent(g: SignedDigraph) -> bool:
    """True when no node is implicated at any depth."""
    return not any(strong_violations(g, u) for u in range(g.n))


def _implicated_count(g: SignedDigraph, depth: Depth) -> int:
    return sum(bool(node_implications(g, u, depth)) for u in range(g.n))


def run(
    g: SignedDigraph,
    cfg: DynamicsConfig,
    protected: Iterable[int] = (),
    rng: Optional[np.random.Generator] = None,
) -> tuple[SignedDigraph, TrajectoryStats]:
    """Run the dynamics on a copy of g.

    The mixed-dyad sweep runs first; then node-selection steps run until
    `max_steps`, stopping at equilibrium when configured. Equilibrium is only
    rechecked after steps that changed an edge.

    Args:
        g (SignedDigraph): The initial graph. Not modified.
        cfg (DynamicsConfig): Probabilities, mode, step limit and seed.
        protected (Iterable[int]): Nodes whose outgoing edges must never change.
        rng (Optional[np.random.Generator]): Optional. Stream to draw from.
            Defaults to one seeded with `cfg.seed`.

    Returns:
        tuple[SignedDigraph, TrajectoryStats]: The final graph and its trajectory.

    Raises:
        InvariantViolationError: If a step changes the edge count or touches a protected node.
    """
    state = g.copy()
    rng = rng if rng is not None else make_rng(cfg.seed)
    guarded = frozenset(protected)
    total = state.edge_count
    strong = cfg.mode is DynamicsMode.STRONG
    step_fn = strong_step if strong else local_step
    at_rest = is_strong_consistent if strong else is_local_equilibrium
    depth = Depth.DEEP if strong else Depth.LOCAL

    _, swept = resolve_edge_inconsistencies(state)
    _check_flips(swept, guarded)

    points: list[TrajectoryPoint] = []
    resolutions = 0

    def record(step: int) -> None:
        points.append(
            TrajectoryPoint(
                step=step,
                resolutions=resolutions,
                endorsements=state.endorsement_count,
                accusations=state.accusation_count,
                implicated_nodes=_implicated_count(state, depth),
            )
        )

    converged = at_rest(state)
    steps_used = 0
    record(0)

    if not (converged and cfg.stop_at_equilibrium):
        for step in range(1, cfg.max_steps + 1):
            _, event = step_fn(state, cfg, rng, step)
            steps_used = step
            if state.edge_count != total:
                raise InvariantViolationError(f"step {step} changed the edge count")
            if event.changed:
                _check_flips(event.flips, guarded)
                resolutions += 1
                converged = at_rest(state)
            if step % cfg.record_every == 0:
                record(step)
            if converged and cfg.stop_at_equilibrium:
                break

    if points[-1].step != steps_used:
        record(steps_used)

    logger.debug(
        "run seed=%d: %d steps, %d resolutions, converged=%s",
        cfg.seed,
        steps_used,
        resolutions,
        converged,
    )
    return state, TrajectoryStats(
        points=points, converged=converged, steps_used=steps_used, resolutions=resolutions
    )


def _check_flips(flips: Iterable[Flip], guarded: NodeSet) -> None:
    for u, v, _ in flips:
        if u in guarded:
            raise InvariantViolationError(f"edge {u} -> {v} of a protected node changed")


def _endorsement_components(g: SignedDigraph) -> list[tuple[int, ...]]:
    return sorted(
        (tuple(sorted(c)) for c in nx.weakly_connected_components(g.endorsement_digraph())),
        key=lambda members: members[0],
    )


def decompose_equilibrium(g: SignedDigraph) -> list[NodeSet]:
    """Split a complete equilibrium graph into its communities.

    Raises:
        PreconditionError: If some ordered pair has no edge.
        NotAtEquilibriumError: If the graph is not at local equilibrium.
        InvariantViolationError: If an equilibrium fails to decompose.
    """
    if not g.is_complete():
        raise PreconditionError("decomposition needs an edge on every ordered pair")
    if not is_local_equilibrium(g):
        raise NotAtEquilibriumError("graph still holds an implicating motif")

    communities = [frozenset(c) for c in _endorsement_components(g)]
    for community in communities:
        if not is_self_consistent(g, community) or not is_insular(g, community):
            raise InvariantViolationError(f"community {sorted(community)} is not a clean faction")
    for u, v in combinations(range(g.n), 2):
        if g.sign(u, v) is not g.sign(v, u):
            raise InvariantViolationError(f"edges between {u} and {v} differ in kind")
    return communities


def is_two_faction_configuration(g: SignedDigraph) -> bool:
    """True for a complete graph split into at most two mutually accusing endorsement cliques."""
    if not g.is_complete() or g.n == 0:
        return False
    try:
        return len(decompose_equilibrium(g)) <= 2
    except NotAtEquilibriumError:
        return False


def insular_structures(g: SignedDigraph) -> list[InsularStructure]:
    """Weakly connected endorsement components with their condensation order and internal accusations."""
    condensed = scc_condense(g)
    order = condensed.topological_order()
    structures = []
    for component in _endorsement_components(g):
        members = frozenset(component)
        metas = [m for m in order if condensed.members[m][0] in members]
        structures.append(
            InsularStructure(
                nodes=component,
                meta_order=tuple(condensed.members[m] for m in metas),
                internal_accusations=tuple(
                    (u, v) for u in component for v in sorted(g.out_accusations(u) & members)
                ),
            )
        )
    return structures


def from_signature(g: SignedDigraph, signature: Signature) -> SignedDigraph:
    """A copy of g with its signs replaced by those in the signature."""
    state = g.copy()
    for u, v, sign in signature:
        state.set_sign(u, v, sign)
    return state


def successor_states(g: SignedDigraph, cfg: DynamicsConfig) -> dict[Signature, float]:
    """Every state one local step can reach, with its probability."""
    successors: dict[Signature, float] = defaultdict(float)
    for u in range(g.n):
        found = triangle_implications(g, u)
        if not found:
            successors[g.signature()] += 1.0 / g.n
            continue
        for chosen in found:
            for probability, flip in _local_outcomes(chosen, cfg):
                if probability <= 0:
                    continue
                nxt = g.copy()
                _apply(nxt, (flip,))
                resolve_edge_inconsistencies(nxt)
                successors[nxt.signature()] += probability / (g.n * len(found))
    return dict(successors)


def closed_classes(
    g: SignedDigraph, cfg: DynamicsConfig, max_states: int = 100_000
) -> list[frozenset[Signature]]:
    """Closed recurrent classes of local dynamics started from g.

    Raises:
        PreconditionError: If more than `max_states` states are reachable.
    """
    start = g.copy()
    resolve_edge_inconsistencies(start)
    transitions: nx.DiGraph[Signature] = nx.DiGraph()
    frontier = [start.signature()]
    transitions.add_node(frontier[0])

    while frontier:
        signature = frontier.pop()
        for nxt in successor_states(from_signature(start, signature), cfg):
            if nxt not in transitions:
                if transitions.number_of_nodes() >= max_states:
                    raise PreconditionError(f"more than {max_states} reachable states")
                transitions.add_node(nxt)
                frontier.append(nxt)
            transitions.add_edge(signature, nxt)

    condensed = nx.condensation(transitions)
    return [
        frozenset(condensed.nodes[meta]["members"])
        for meta in condensed.nodes
        if condensed.out_degree(meta) == 0
    ]


def _oriented_graphs(n: int) -> Iterable[SignedDigraph]:
    pairs = list(combinations(range(n), 2))
    for choice in product(range(5), repeat=len(pairs)):
        g = SignedDigraph(n)
        for (i, j), option in zip(pairs, choice):
            if option == 1:
                g.add_edge(i, j, Sign.ENDORSE)
            elif option == 2:
                g.add_edge(i, j, Sign.ACCUSE)
            elif option == 3:
                g.add_edge(j, i, Sign.ENDORSE)
            elif option == 4:
                g.add_edge(j, i, Sign.ACCUSE)
        yield g


def has_nonconvergent_class(g: SignedDigraph, cfg: DynamicsConfig) -> bool:
    """True when some closed class reachable from g holds no equilibrium state."""
    start = g.copy()
    resolve_edge_inconsistencies(start)
    for states in closed_classes(start, cfg):
        if not any(is_local_equilibrium(from_signature(start, s)) for s in states):
            return True
    return False


def find_nonconvergent_witness(
    max_nodes: int = 4, alpha: float = 1.0, beta: float = 0.5
) -> Optional[SignedDigraph]:
    """The first graph, by size then enumeration order, from which the dynamics can cycle forever.

    Only graphs with at most one directed edge per node pair are enumerated, so
    reciprocated pairs are never tried and None says nothing about them.
    """
    cfg = DynamicsConfig(alpha=alpha, beta=beta)
    for n in range(3, max_nodes + 1):
        for g in _oriented_graphs(n):
            if is_local_equilibrium(g):
                continue
            if has_nonconvergent_class(g, cfg):
                logger.info("non-convergent witness on %d nodes: %s", n, list(g.edges()))
                return g
    return None
