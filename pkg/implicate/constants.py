PROBABILITY_MIN = 0.0
"""The minimum value of alpha, beta and edge probabilities."""
PROBABILITY_MAX = 1.0
"""The maximum value of alpha, beta and edge probabilities."""

DEFAULT_WEIGHT = 1.0
"""The weight of an edge when none is supplied."""

DEFAULT_MAX_NODES_EXACT = 40
"""The largest graph an exact set search accepts by default."""
DEFAULT_MAX_SUBSET_BITS = 16
"""The largest cheater set whose subsets are enumerated by default."""
DEFAULT_TIME_CAP = 60.0
"""The wall-clock bound, in seconds, of a single exact search."""
TREE_CONDITION_MAX_NODES = 12
"""The largest graph the tree-condition checker will search (double exponential)."""

NULL_MODEL_MIN_NODES = 3
"""The smallest graph the Erdos-Renyi null model is defined on."""

FRACTURE_N = 30
"""Node count of the fracture experiment."""
FRACTURE_P = 0.27
"""Per ordered pair endorsement probability of the fracture experiment."""
FRACTURE_ALPHA = 0.9
"""Propensity to turn a Type II accusation into an endorsement in the fracture experiment."""
FRACTURE_BETA = 0.5
"""Propensity to side with the accuser of a Type I triangle in the fracture experiment."""
SWEEP_STEPS = 1500
"""Node-selection steps per replicate of the phase sweep."""
SWEEP_REPLICATES = 1000
"""Replicates per grid point of the phase sweep."""
SWEEP_P_GRID = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50)
"""Endorsement probabilities of the phase sweep."""

OUTPUT_DIR_ENV = "IMPLICATE_OUTPUT_DIR"
"""Environment variable that relocates relative CLI output paths."""
