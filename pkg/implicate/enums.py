from enum import Enum


class Sign(str, Enum):
    """This object represents the kind of a directed edge."""

    ENDORSE = "+"
    """A positive edge: u vouches for v."""
    ACCUSE = "−"
    """A negative edge: u asserts v is not credible."""

    @property
    def flipped(self) -> "Sign":
        return Sign.ACCUSE if self is Sign.ENDORSE else Sign.ENDORSE


class DyadClass(str, Enum):
    """This object represents the isomorphism class of the edges on a node pair."""

    MUTUAL_ENDORSE = "mutual_endorse"
    """Both directions endorse (edge a)."""
    MIXED = "mixed"
    """One direction endorses, the other accuses (edge b). Always inconsistent."""
    MUTUAL_ACCUSE = "mutual_accuse"
    """Both directions accuse (edge c)."""
    SINGLE_ENDORSE = "single_endorse"
    """A single endorsement."""
    SINGLE_ACCUSE = "single_accuse"
    """A single accusation."""


class Orientation(str, Enum):
    """This object represents the shape of a triad with one directed edge per pair."""

    TRANSITIVE = "transitive"
    """One source, one middle and one sink node."""
    CYCLIC = "cyclic"
    """The three edges form a directed cycle."""


class MotifKind(str, Enum):
    """This object represents the inconsistent motif behind an implication."""

    INCONSISTENT_DYAD = "inconsistent_dyad"
    """u endorses v while v accuses u; implicates u."""
    TYPE_I = "type_i"
    """u endorses a and b while a accuses b; implicates u."""
    TYPE_II = "type_ii"
    """u endorses a, a endorses b, u accuses b; implicates u."""
    TYPE_III = "type_iii"
    """u endorses a, a endorses b, b accuses u; implicates u."""
    DEEP_ACCUSED_BY_DOWNSTREAM = "deep_accused_by_downstream"
    """Some v reachable from u by endorsements accuses u."""
    DEEP_ACCUSES_DOWNSTREAM = "deep_accuses_downstream"
    """u accuses some v reachable from u by endorsements."""
    DEEP_DOWNSTREAM_CONFLICT = "deep_downstream_conflict"
    """Two nodes reachable from u by endorsements, one accusing the other."""


class Depth(str, Enum):
    """This object represents how far motif detection follows endorsement paths."""

    LOCAL = "local"
    """Dyads and triangles only."""
    DEEP = "deep"
    """Endorsement paths of any length."""


class Verdict(str, Enum):
    """This object represents an observer's label for a node."""

    CREDIBLE_H = "credible_h"
    """Classified as honest."""
    IMPLICATED_C = "implicated_c"
    """Classified as a cheater."""
    UNDETERMINED = "undetermined"
    """No conclusion."""


class Side(str, Enum):
    """This object represents the ground-truth side of a player."""

    HONEST = "H"
    """Endorses only H and accuses only C."""
    CHEATER = "C"
    """Unconstrained."""


class DynamicsMode(str, Enum):
    """This object represents the depth at which the dynamics resolve motifs."""

    LOCAL = "local"
    """Resolve inconsistent dyads and triangles."""
    STRONG = "strong"
    """Resolve inconsistencies along endorsement paths of any length."""


class DedupPolicy(str, Enum):
    """This object represents what ingestion does with repeated ordered pairs."""

    KEEP_LATEST = "keep_latest"
    """Keep the record with the largest timestamp, then the last in file order."""
    KEEP_FIRST = "keep_first"
    """Keep the first record in file order."""
    ERROR = "error"
    """Refuse the file."""


class HonestStrategy(str, Enum):
    """This object represents how planted honest nodes place their accusations."""

    RANDOM_ENDORSE = "random_endorse"
    """Random internal endorsements, accusations at a fixed rate."""
    HAMILTONIAN_ACCUSE_PATH = "hamiltonian_accuse_path"
    """An alternating accusation path h1 ⊣ c1 ⊢ h2 ⊣ c2 ... ⊢ hk with k = |C| + 1."""
    FULL_ACCUSE_COVERAGE = "full_accuse_coverage"
    """Every cheater accused by two honest nodes, accuser sets disjoint."""


class CheaterStrategy(str, Enum):
    """This object represents how planted cheaters place their edges."""

    SILENT = "silent"
    """No outgoing edges."""
    RANDOM_MIXED = "random_mixed"
    """Each ordered pair endorsed or accused at fixed rates."""
    MIRROR = "mirror"
    """Copy the honest endorsement structure onto cheater doppelgangers."""
    ACCUSE_HONEST = "accuse_honest"
    """Accuse honest nodes at a fixed rate."""


class ExperimentKind(str, Enum):
    """This object represents a reproducible experiment."""

    FRACTURE = "fracture"
    """One trajectory of a dense community after a single accusation."""
    PHASE_SWEEP = "phase_sweep"
    """Final accusation fraction across endorsement densities."""
    CENSUS_TABLE = "census_table"
    """Observed against expected motif counts of an ingested network."""


class IdentifyStrategy(str, Enum):
    """This object represents the rule an observer uses to label nodes."""

    SCREEN = "screen"
    """Implicated nodes and their upstream endorsers."""
    LARGEST_SCC = "largest_scc"
    """Everything downstream of the largest endorsement SCC."""
    SELF_CONSISTENT = "self_consistent"
    """The largest set with no internal accusation."""
    INSULAR = "insular"
    """The largest self-consistent set no endorsement leaves."""


class GeneratorKind(str, Enum):
    """This object represents the instance family `generate` draws from."""

    ER = "er"
    """Erdős–Rényi endorsements with flipped accusations."""
    PLANTED = "planted"
    """A planted honest/cheater scenario."""
