"""Seeded constructions: ER endorsement graphs, planted honest/cheater games and the mirror attack."""

import logging
from collections.abc import Sequence

import numpy as np

from implicate.constants import DEFAULT_MAX_SUBSET_BITS, PROBABILITY_MAX, PROBABILITY_MIN
from implicate.dynamics import make_rng
from implicate.enums import CheaterStrategy, HonestStrategy, Sign
from implicate.exceptions import InfeasibleError, InvariantViolationError, StructuralInputError
from implicate.graph import SignedDigraph
from implicate.observer import verify_outnumbering
from implicate.types import Partition, ScenarioSpec

logger = logging.getLogger(__name__)


def er_endorsement(n: int, p: float, accusations: int = 1, seed: int = 0) -> SignedDigraph:
    """Endorse every ordered pair with probability p, then turn random endorsements into accusations.

    Raises:
        StructuralInputError: If n is negative or p lies outside [0, 1].
        InfeasibleError: If there are fewer endorsements than requested accusations.
    """
    if n < 0:
        raise StructuralInputError(f"node count must be non-negative, got {n}")
    if not PROBABILITY_MIN <= p <= PROBABILITY_MAX:
        raise StructuralInputError(f"p must be within [0, 1], got {p}")
    if accusations < 0:
        raise StructuralInputError("accusation count must be non-negative")

    rng = make_rng(seed)
    draws = rng.random((n, n))
    g = SignedDigraph(n)
    for u in range(n):
        for v in range(n):
            if u != v and draws[u, v] < p:
                g.add_edge(u, v, Sign.ENDORSE)

    endorsed = [(u, v) for u, v, _, _ in g.edges()]
    if accusations > len(endorsed):
        raise InfeasibleError(
            f"{accusations} accusations requested but only {len(endorsed)} endorsements drawn"
        )
    for index in sorted(rng.choice(len(endorsed), size=accusations, replace=False).tolist()):
        u, v = endorsed[index]
        g.set_sign(u, v, Sign.ACCUSE)
    return g


def check_honest_constraint(g: SignedDigraph, part: Partition) -> None:
    """Honest nodes endorse only H and accuse only C.

    Raises:
        InvariantViolationError: If an honest edge breaks the rule.
    """
    honest = part.honest
    for u, v, sign, _ in g.edges():
        if u not in honest:
            continue
        if (sign is Sign.ENDORSE) != (v in honest):
            raise InvariantViolationError(f"honest edge {u} -> {v} ({sign.value}) breaks the honest rule")


def planted_scenario(spec: ScenarioSpec) -> tuple[SignedDigraph, Partition]:
    """Build an instance with a known honest set.

    Honest nodes endorse each other with probability
    `expected_degree / (n_honest - 1)`; their accusations follow the honest
    strategy and cheater edges the cheater strategy.

    Args:
        spec (ScenarioSpec): Sizes, strategies, rates and seed.

    Returns:
        tuple[SignedDigraph, Partition]: The graph and its ground truth.

    Raises:
        InfeasibleError: If the honest strategy cannot be realized with these sizes.
        InvariantViolationError: If the result breaks the honest rule or a guaranteed hypothesis.
    """
    n_h, n_c = spec.n_honest, spec.n_cheaters
    if spec.honest_strategy is HonestStrategy.HAMILTONIAN_ACCUSE_PATH and n_h < n_c + 1:
        raise InfeasibleError(f"an accusation path over {n_c} cheaters needs {n_c + 1} honest nodes")
    if spec.honest_strategy is HonestStrategy.FULL_ACCUSE_COVERAGE and n_h < 2 * n_c:
        raise InfeasibleError(f"two accusers for each of {n_c} cheaters needs {2 * n_c} honest nodes")

    rng = make_rng(spec.seed)
    n = n_h + n_c
    ids = rng.permutation(n).tolist() if spec.shuffle_ids else list(range(n))
    honest, cheaters = ids[:n_h], ids[n_h:]
    g = SignedDigraph(n)
    part = Partition.from_honest(n, honest)

    p_internal = min(1.0, spec.expected_degree / (n_h - 1)) if n_h > 1 else 0.0
    for h in honest:
        for other in honest:
            if h != other and rng.random() < p_internal:
                g.add_edge(h, other, Sign.ENDORSE)

    if spec.honest_strategy is HonestStrategy.RANDOM_ENDORSE:
        for h in honest:
            for c in cheaters:
                if rng.random() < spec.honest_accuse_rate:
                    g.add_edge(h, c, Sign.ACCUSE)
    elif spec.honest_strategy is HonestStrategy.HAMILTONIAN_ACCUSE_PATH:
        path_h = [honest[i] for i in rng.permutation(n_h)[: n_c + 1].tolist()]
        path_c = [cheaters[i] for i in rng.permutation(n_c).tolist()]
        for i, c in enumerate(path_c):
            g.add_edge(path_h[i], c, Sign.ACCUSE)
            g.add_edge(path_h[i + 1], c, Sign.ACCUSE)
    else:
        accusers = [honest[i] for i in rng.permutation(n_h).tolist()]
        for i, c in enumerate(cheaters):
            g.add_edge(accusers[2 * i], c, Sign.ACCUSE)
            g.add_edge(accusers[2 * i + 1], c, Sign.ACCUSE)

    _plant_cheaters(g, spec, honest, cheaters, rng)
    check_honest_constraint(g, part)

    if (
        spec.honest_strategy is HonestStrategy.FULL_ACCUSE_COVERAGE
        and n_c <= DEFAULT_MAX_SUBSET_BITS
        and not verify_outnumbering(g, part)
    ):
        raise InvariantViolationError("full accusation coverage failed to outnumber the cheaters")

    logger.debug(
        "planted %s/%s scenario: %d honest, %d cheaters, %d edges",
        spec.honest_strategy.value,
        spec.cheater_strategy.value,
        n_h,
        n_c,
        g.edge_count,
    )
    return g, part


def _plant_cheaters(
    g: SignedDigraph,
    spec: ScenarioSpec,
    honest: Sequence[int],
    cheaters: Sequence[int],
    rng: np.random.Generator,
) -> None:
    strategy = spec.cheater_strategy

    if strategy is CheaterStrategy.RANDOM_MIXED:
        for c in cheaters:
            for v in range(g.n):
                if v == c:
                    continue
                r = rng.random()
                if r < spec.cheater_p_pos:
                    g.add_edge(c, v, Sign.ENDORSE)
                elif r < spec.cheater_p_pos + spec.cheater_p_neg:
                    g.add_edge(c, v, Sign.ACCUSE)

    elif strategy is CheaterStrategy.ACCUSE_HONEST:
        for c in cheaters:
            for h in honest:
                if rng.random() < spec.cheater_accuse_rate:
                    g.add_edge(c, h, Sign.ACCUSE)

    elif strategy is CheaterStrategy.MIRROR:
        double = dict(zip(honest, cheaters))
        original = {m: h for h, m in double.items()}
        for h, m in double.items():
            for other in g.out_endorsements(h).copy():
                if other in double:
                    g.add_edge(m, double[other], Sign.ENDORSE)
            for accused in g.out_accusations(h).copy():
                if accused in original:
                    g.add_edge(m, original[accused], Sign.ACCUSE)


def _is_swap_automorphism(g: SignedDigraph, half: int) -> bool:
    def swap(u: int) -> int:
        return u + half if u < half else u - half

    return all(g.sign(swap(u), swap(v)) is sign for u, v, sign, _ in g.edges())


def mirror_attack(
    g_honest: SignedDigraph, seed: int = 0, cross_rate: float = 0.0
) -> tuple[SignedDigraph, Partition]:
    """Pair every honest node h with a doppelganger h + n that copies its endorsements.

    Each honest accusation h ⊣ m(h'), drawn with probability `cross_rate` per
    ordered pair, is answered by m(h) ⊣ h', so swapping every node with its
    double preserves every edge and sign.

    Raises:
        StructuralInputError: If the honest graph holds an accusation or the rate is not a probability.
        InvariantViolationError: If the swap fails to be an automorphism.
    """
    if g_honest.accusation_count:
        raise StructuralInputError("the honest graph must hold endorsements only")
    if not PROBABILITY_MIN <= cross_rate <= PROBABILITY_MAX:
        raise StructuralInputError(f"cross_rate must be within [0, 1], got {cross_rate}")

    rng = make_rng(seed)
    n = g_honest.n
    g = SignedDigraph(2 * n)
    for u, v, _, weight in g_honest.edges():
        g.add_edge(u, v, Sign.ENDORSE, weight)
        g.add_edge(u + n, v + n, Sign.ENDORSE, weight)

    for h in range(n):
        for other in range(n):
            if rng.random() < cross_rate:
                g.add_edge(h, other + n, Sign.ACCUSE)
                g.add_edge(h + n, other, Sign.ACCUSE)

    part = Partition.from_honest(2 * n, range(n))
    check_honest_constraint(g, part)
    if not _is_swap_automorphism(g, n):
        raise InvariantViolationError("doppelganger swap is not an automorphism")
    return g, part
