import pytest
from hypothesis import given
from hypothesis import strategies as st

from implicate.enums import CheaterStrategy, DynamicsMode, MotifKind, Sign
from implicate.exceptions import InvariantViolationError, NotAtEquilibriumError, PreconditionError
from implicate.dynamics import (
    closed_classes,
    decompose_equilibrium,
    find_nonconvergent_witness,
    has_nonconvergent_class,
    implicating_triangles,
    insular_structures,
    is_local_equilibrium,
    is_strong_consistent,
    is_two_faction_configuration,
    local_step,
    make_rng,
    repair_edges,
    replicate_seeds,
    resolve_edge_inconsistencies,
    run,
    strong_step,
    strong_violations,
    successor_states,
)
from implicate.generators import er_endorsement, planted_scenario
from implicate.graph import SignedDigraph
from implicate.types import DynamicsConfig, ScenarioSpec
from tests.strategies import build, complete_digraphs, signed_digraphs, splits_into_factions

CYCLING_EDGES = [(0, 1, "+"), (1, 2, "+"), (0, 2, "-"), (2, 3, "+"), (3, 0, "-")]
"""Type II at node 0; endorsing 2 closes a Type III through 3, whose only repair restores the accusation."""


def config(**fields: object) -> DynamicsConfig:
    return DynamicsConfig(**{"alpha": 0.5, "beta": 0.5, **fields})


def step_until_change(g: SignedDigraph, cfg: DynamicsConfig, seed: int, strong: bool = False):
    rng = make_rng(seed)
    step = strong_step if strong else local_step
    for i in range(1, 500):
        _, event = step(g, cfg, rng, i)
        if event.changed:
            return event
    raise AssertionError("no step changed an edge")


def two_factions(sizes: tuple[int, ...]) -> SignedDigraph:
    block = [i for i, size in enumerate(sizes) for _ in range(size)]
    g = SignedDigraph(len(block))
    for u in range(g.n):
        for v in range(g.n):
            if u != v:
                g.add_edge(u, v, Sign.ENDORSE if block[u] == block[v] else Sign.ACCUSE)
    return g


class TestEdgeSweep:
    def test_endorser_of_mixed_dyad_turns_accuser(self) -> None:
        g, flips = resolve_edge_inconsistencies(build(2, [(0, 1, "+"), (1, 0, "-")]))
        assert flips == [(0, 1, Sign.ACCUSE)]
        assert g.is_accusation(0, 1)

    def test_consistent_graph_is_untouched(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 0, "+"), (1, 2, "-")])
        before = g.copy()
        _, flips = resolve_edge_inconsistencies(g)
        assert flips == []
        assert g == before

    @given(signed_digraphs(max_nodes=7))
    def test_fixpoint_does_not_depend_on_order(self, g: SignedDigraph) -> None:
        reference = g.copy()
        for u in sorted(range(g.n), reverse=True):
            for v in sorted(reference.out_endorsements(u) & reference.in_accusations(u)):
                reference.set_sign(u, v, Sign.ACCUSE)
        resolve_edge_inconsistencies(g)
        assert g == reference
        assert g.ordered_pairs() == reference.ordered_pairs()


class TestLocalStep:
    def test_type_i_sides_with_the_accuser_at_full_beta(self) -> None:
        g = build(3, [(0, 1, "+"), (0, 2, "+"), (1, 2, "-")])
        event = step_until_change(g, config(beta=1.0), seed=1)
        assert event.motif is MotifKind.TYPE_I
        assert event.flips == ((0, 2, Sign.ACCUSE),)

    def test_type_i_sides_with_the_accused_at_zero_beta(self) -> None:
        g = build(3, [(0, 1, "+"), (0, 2, "+"), (1, 2, "-")])
        step_until_change(g, config(beta=0.0), seed=1)
        assert g.is_accusation(0, 1)
        assert g.is_endorsement(0, 2)

    def test_type_ii_endorses_at_full_alpha(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (0, 2, "-")])
        step_until_change(g, config(alpha=1.0), seed=2)
        assert g.is_endorsement(0, 2)

    def test_type_ii_drops_the_middle_at_zero_alpha(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (0, 2, "-")])
        step_until_change(g, config(alpha=0.0), seed=2)
        assert g.is_accusation(0, 1)

    @pytest.mark.parametrize("seed", range(5))
    def test_type_iii_is_deterministic(self, seed: int) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (2, 0, "-")])
        event = step_until_change(g, config(), seed=seed)
        assert event.flips == ((0, 1, Sign.ACCUSE),)

    def test_node_without_triangles_is_a_no_op(self) -> None:
        g = build(3, [(0, 1, "+"), (0, 2, "+"), (1, 2, "-")])
        rng = make_rng(0)
        for _ in range(50):
            _, event = local_step(g, config(), rng)
            if event.node != 0:
                assert not event.changed
                assert event.motif is None

    def test_implicating_triangles_name_the_type(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (0, 2, "-")])
        assert implicating_triangles(g, 0) == [(MotifKind.TYPE_II, (0, 1, 2))]

    def test_successor_probabilities_sum_to_one(self) -> None:
        g = build(3, [(0, 1, "+"), (0, 2, "+"), (1, 2, "-")])
        successors = successor_states(g, config(beta=0.3))
        assert sum(successors.values()) == pytest.approx(1.0)
        assert successors[g.signature()] == pytest.approx(2 / 3)


class TestRun:
    def test_equilibrium_stops_immediately(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 0, "+")])
        _, stats = run(g, config(max_steps=100))
        assert stats.converged
        assert stats.steps_used == 0
        assert [p.step for p in stats.points] == [0]

    def test_input_graph_is_not_modified(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (2, 0, "-")])
        before = g.copy()
        run(g, config(max_steps=100))
        assert g == before

    def test_trajectory_records_first_and_last_step(self) -> None:
        g = er_endorsement(12, 0.4, accusations=2, seed=3)
        _, stats = run(g, config(max_steps=37, record_every=10, stop_at_equilibrium=False))
        assert [p.step for p in stats.points] == [0, 10, 20, 30, 37]
        assert stats.steps_used == 37

    def test_same_seed_same_result(self) -> None:
        g = er_endorsement(12, 0.4, seed=5)
        first, first_stats = run(g, config(max_steps=300, seed=9))
        second, second_stats = run(g, config(max_steps=300, seed=9))
        assert first == second
        assert first_stats == second_stats

    @given(signed_digraphs(max_nodes=7), st.sampled_from(DynamicsMode), st.integers(0, 1000))
    def test_edges_are_conserved(self, g: SignedDigraph, mode: DynamicsMode, seed: int) -> None:
        final, stats = run(g, config(mode=mode, max_steps=60, seed=seed))
        assert final.ordered_pairs() == g.ordered_pairs()
        for point in stats.points:
            assert point.endorsements + point.accusations == g.edge_count

    @given(signed_digraphs(max_nodes=7), st.integers(0, 1000))
    def test_accusations_never_decrease_without_forgiveness(self, g: SignedDigraph, seed: int) -> None:
        _, stats = run(g, config(alpha=0.0, max_steps=80, seed=seed))
        counts = [point.accusations for point in stats.points]
        assert counts == sorted(counts)

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 0.9])
    @pytest.mark.parametrize("seed", range(5))
    def test_reaches_equilibrium(self, alpha: float, seed: int) -> None:
        g = er_endorsement(10, 0.4, seed=seed)
        final, stats = run(g, config(alpha=alpha, max_steps=100_000, seed=seed))
        assert stats.converged
        assert is_local_equilibrium(final)

    @pytest.mark.slow
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 0.9])
    def test_reaches_equilibrium_across_seeds(self, alpha: float) -> None:
        for seed in range(100):
            g = er_endorsement(12, 0.4, seed=seed)
            final, stats = run(g, config(alpha=alpha, max_steps=1_000_000, seed=seed))
            assert stats.converged, seed
            assert is_local_equilibrium(final)

    def test_strong_run_ends_strongly_consistent(self) -> None:
        g = er_endorsement(10, 0.3, seed=4)
        final, stats = run(g, config(alpha=0.0, mode=DynamicsMode.STRONG, max_steps=100_000, seed=4))
        assert stats.converged
        assert is_strong_consistent(final)

    @pytest.mark.parametrize("seed", range(4))
    def test_protected_honest_nodes_keep_their_edges(self, seed: int) -> None:
        g, part = planted_scenario(
            ScenarioSpec(
                n_honest=6,
                n_cheaters=3,
                expected_degree=3.0,
                honest_accuse_rate=0.5,
                cheater_strategy=CheaterStrategy.RANDOM_MIXED,
                cheater_p_pos=0.3,
                cheater_p_neg=0.2,
                seed=seed,
            )
        )
        final, _ = run(g, config(max_steps=2000, seed=seed), protected=part.honest)
        for h in part.honest:
            assert final.out_endorsements(h) == g.out_endorsements(h)
            assert final.out_accusations(h) == g.out_accusations(h)

    def test_protected_node_that_must_move_is_reported(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (2, 0, "-")])
        with pytest.raises(InvariantViolationError):
            run(g, config(max_steps=500), protected={0})

    def test_replicate_streams_differ(self) -> None:
        first, second = replicate_seeds(0, 2)
        assert make_rng(first).random() != make_rng(second).random()


class TestNonConvergence:
    def test_full_forgiveness_can_cycle(self) -> None:
        g = build(4, CYCLING_EDGES)
        assert has_nonconvergent_class(g, config(alpha=1.0))

    def test_partial_forgiveness_escapes(self) -> None:
        g = build(4, CYCLING_EDGES)
        assert not has_nonconvergent_class(g, config(alpha=0.5))
        [terminal] = closed_classes(g, config(alpha=0.5))
        assert len(terminal) == 1

    def test_cycle_has_two_states(self) -> None:
        classes = closed_classes(build(4, CYCLING_EDGES), config(alpha=1.0))
        assert [len(states) for states in classes] == [2]

    def test_state_limit(self) -> None:
        with pytest.raises(PreconditionError):
            closed_classes(build(4, CYCLING_EDGES), config(alpha=0.5), max_states=1)

    @pytest.mark.slow
    def test_search_finds_a_witness(self) -> None:
        witness = find_nonconvergent_witness(max_nodes=4)
        assert witness is not None
        assert has_nonconvergent_class(witness, config(alpha=1.0))
        assert not any(witness.has_edge(v, u) for u, v, _, _ in witness.edges())


class TestStrongMode:
    def test_long_path_accusation_is_a_violation(self) -> None:
        g = build(4, [(0, 1, "+"), (1, 2, "+"), (2, 3, "+"), (0, 3, "-")])
        assert strong_violations(g, 0)
        assert is_local_equilibrium(g)
        assert not is_strong_consistent(g)

    def test_repair_cuts_the_first_hop(self) -> None:
        g = build(3, [(0, 1, "+"), (1, 2, "+"), (2, 0, "-")])
        event = step_until_change(g, config(), seed=0, strong=True)
        assert event.flips[0] == (0, 1, Sign.ACCUSE)

    def test_repair_candidates(self) -> None:
        g = build(4, [(0, 1, "+"), (1, 3, "+"), (0, 2, "+"), (2, 3, "+"), (3, 0, "-")])
        assert repair_edges(g, 0, 3) == [1, 2]

    def test_repairs_are_drawn_uniformly(self) -> None:
        base = build(4, [(0, 1, "+"), (1, 3, "+"), (0, 2, "+"), (2, 3, "+"), (3, 0, "-")])
        rng = make_rng(11)
        cut = {1: 0, 2: 0}
        for i in range(2000):
            g = base.copy()
            while True:
                _, event = strong_step(g, config(), rng, i)
                if event.changed:
                    break
            cut[event.flips[0][1]] += 1
        assert cut[1] + cut[2] == 2000
        assert abs(cut[1] - 1000) < 150

    @given(signed_digraphs(max_nodes=7))
    def test_strong_consistency_implies_local_equilibrium(self, g: SignedDigraph) -> None:
        if is_strong_consistent(g):
            assert is_local_equilibrium(g)

    def test_forest_is_strongly_consistent(self) -> None:
        g = build(5, [(1, 0, "+"), (2, 0, "+"), (4, 3, "+"), (0, 3, "-")])
        assert is_strong_consistent(g)


class TestEquilibria:
    def test_triangle_free_consistent_graph(self) -> None:
        assert is_local_equilibrium(build(4, [(0, 1, "+"), (2, 3, "-"), (1, 2, "+")]))

    def test_mutually_accusing_communities(self) -> None:
        assert is_local_equilibrium(two_factions((3, 2)))

    @pytest.mark.parametrize("n", [3, 4])
    def test_complete_equilibria_are_exactly_factions(self, n: int) -> None:
        for g in complete_digraphs(n):
            at_rest = is_local_equilibrium(g)
            assert at_rest == splits_into_factions(g)
            assert at_rest == is_strong_consistent(g)
            if at_rest:
                communities = decompose_equilibrium(g)
                assert sorted(u for c in communities for u in c) == list(range(n))

    def test_decomposition(self) -> None:
        assert decompose_equilibrium(two_factions((3, 2))) == [frozenset({0, 1, 2}), frozenset({3, 4})]

    def test_decomposition_needs_a_complete_graph(self) -> None:
        with pytest.raises(PreconditionError):
            decompose_equilibrium(build(3, [(0, 1, "+")]))

    def test_decomposition_needs_equilibrium(self) -> None:
        g = two_factions((3,))
        g.set_sign(0, 1, Sign.ACCUSE)
        with pytest.raises(NotAtEquilibriumError):
            decompose_equilibrium(g)

    def test_two_faction_configurations(self) -> None:
        assert is_two_faction_configuration(two_factions((4,)))
        assert is_two_faction_configuration(two_factions((2, 2)))
        assert not is_two_faction_configuration(two_factions((1, 1, 1)))

    def test_two_faction_configurations_are_a_proper_subset(self) -> None:
        equilibria = [g for g in complete_digraphs(3) if is_local_equilibrium(g)]
        two = [g for g in equilibria if is_two_faction_configuration(g)]
        assert two
        assert len(two) < len(equilibria)

    def test_insular_structures(self) -> None:
        g = build(5, [(0, 1, "+"), (1, 0, "+"), (2, 1, "+"), (3, 4, "+"), (0, 3, "-")])
        first, second = insular_structures(g)
        assert first.nodes == (0, 1, 2)
        assert first.meta_order == ((2,), (0, 1))
        assert first.internal_accusations == ()
        assert second.nodes == (3, 4)

    def test_internal_accusations_are_listed(self) -> None:
        g = build(3, [(0, 1, "+"), (0, 2, "+"), (1, 2, "-")])
        [structure] = insular_structures(g)
        assert structure.internal_accusations == ((1, 2),)

