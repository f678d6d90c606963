"""Signed-network implication game: motif census, observers and implication avoiding dynamics."""

from implicate.dynamics import (
    decompose_equilibrium,
    is_local_equilibrium,
    is_strong_consistent,
    run,
)
from implicate.edgelist import load_edge_list, save_edge_list
from implicate.enums import Depth, DynamicsMode, Sign, Verdict
from implicate.generators import er_endorsement, mirror_attack, planted_scenario
from implicate.graph import SignedDigraph, downstream_set, scc_condense, upstream_set
from implicate.motifs import census, census_report, inconsistent_implications, null_expectations
from implicate.observer import (
    identify_by_largest_scc,
    implication_screen,
    largest_self_consistent_insular_set,
    largest_self_consistent_set,
)
from implicate.types import DynamicsConfig, Partition, ScenarioSpec, SearchBudget

__all__ = (
    "Depth",
    "DynamicsConfig",
    "DynamicsMode",
    "Partition",
    "ScenarioSpec",
    "SearchBudget",
    "Sign",
    "SignedDigraph",
    "Verdict",
    "census",
    "census_report",
    "decompose_equilibrium",
    "downstream_set",
    "er_endorsement",
    "identify_by_largest_scc",
    "implication_screen",
    "inconsistent_implications",
    "is_local_equilibrium",
    "is_strong_consistent",
    "largest_self_consistent_insular_set",
    "largest_self_consistent_set",
    "load_edge_list",
    "mirror_attack",
    "null_expectations",
    "planted_scenario",
    "run",
    "save_edge_list",
    "scc_condense",
    "upstream_set",
)
