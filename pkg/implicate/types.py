from collections.abc import Iterable
from typing import Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    model_validator,
)
from typing_extensions import Self

from implicate.constants import (
    DEFAULT_MAX_NODES_EXACT,
    DEFAULT_MAX_SUBSET_BITS,
    DEFAULT_TIME_CAP,
    PROBABILITY_MAX,
    PROBABILITY_MIN,
)
from implicate.enums import (
    CheaterStrategy,
    DyadClass,
    DynamicsMode,
    HonestStrategy,
    MotifKind,
    Orientation,
    Side,
    Sign,
    Verdict,
)
from implicate.exceptions import StructuralInputError


def _check_probability(name: str, value: float) -> None:
    if not (PROBABILITY_MIN <= value <= PROBABILITY_MAX):
        raise ValueError(f"{name} must be within [0, 1], got {value}")


class TriadClass(BaseModel):
    """This object represents a signed triad with exactly one directed edge per pair.

    Transitive classes carry the signs of (source→mid, mid→sink, source→sink);
    cyclic classes only carry their accusation count, which is rotation invariant.
    """

    model_config = ConfigDict(frozen=True)

    orientation: Orientation
    """Transitive or cyclic."""
    signs: Optional[tuple[Sign, Sign, Sign]] = None
    """Transitive only. Signs of source→mid, mid→sink and source→sink."""
    accusations: int
    """Number of accusations among the three edges."""

    @model_validator(mode="after")
    def _validator(self) -> Self:
        if self.orientation is Orientation.TRANSITIVE:
            if self.signs is None:
                raise ValueError("transitive triads need their three signs")
            if self.signs.count(Sign.ACCUSE) != self.accusations:
                raise ValueError("accusation count disagrees with the signs")
        elif self.signs is not None:
            raise ValueError("cyclic triads are identified by accusation count only")

        if not 0 <= self.accusations <= 3:
            raise ValueError("a triad holds between 0 and 3 accusations")

        return self

    @classmethod
    def transitive(cls, first: Sign, second: Sign, closing: Sign) -> "TriadClass":
        signs = (first, second, closing)
        return cls(
            orientation=Orientation.TRANSITIVE,
            signs=signs,
            accusations=signs.count(Sign.ACCUSE),
        )

    @classmethod
    def cyclic(cls, accusations: int) -> "TriadClass":
        return cls(orientation=Orientation.CYCLIC, accusations=accusations)

    @property
    def code(self) -> str:
        """Short stable name: `T+−+` for transitive, `C1` for cyclic."""
        if self.signs is None:
            return f"C{self.accusations}"
        return "T" + "".join(sign.value for sign in self.signs)

    @property
    def motif(self) -> Optional[MotifKind]:
        """The inconsistent motif this class realizes, if any."""
        if self.orientation is Orientation.CYCLIC:
            return MotifKind.TYPE_III if self.accusations == 1 else None
        if self.signs == (Sign.ENDORSE, Sign.ACCUSE, Sign.ENDORSE):
            return MotifKind.TYPE_I
        if self.signs == (Sign.ENDORSE, Sign.ENDORSE, Sign.ACCUSE):
            return MotifKind.TYPE_II
        return None

    @property
    def is_inconsistent(self) -> bool:
        return self.motif is not None


class Implication(BaseModel):
    """This object ties an implicated node to the motif instance that implicates it."""

    model_config = ConfigDict(frozen=True)

    implicated: int
    """The node the motif rules out of H."""
    motif: MotifKind
    """The inconsistent motif."""
    witness: tuple[int, ...]
    """Nodes realizing the motif, implicated node first.

    Dyad (u, v); triangles (u, a, b) as in the motif docs; deep motifs (u, v)
    or (u, v, w) with v ⊣ w for downstream conflicts.
    """

    @property
    def key(self) -> tuple[int, tuple[int, ...]]:
        return self.implicated, tuple(sorted(self.witness))


class MotifCount(BaseModel):
    count: int = 0
    """Number of instances."""
    weighted: float = 0.0
    """Sum over instances of the smallest edge weight in the instance."""


class MotifCensus(BaseModel):
    """This object represents observed dyad and triad totals of a graph."""

    dyads: dict[DyadClass, MotifCount]
    """Per dyad class, over unordered pairs with at least one edge."""
    triads: dict[str, MotifCount]
    """Per triad class code, over triples with one directed edge per pair."""
    excluded_triples: int = 0
    """Closed triples skipped because some pair carries edges both ways."""

    def triad(self, triad_class: TriadClass) -> MotifCount:
        return self.triads[triad_class.code]


class MotifExpectation(BaseModel):
    count: float = 0.0
    """Expected number of instances."""
    weighted: float = 0.0
    """Expected sum of instance weights."""


class NullExpectation(BaseModel):
    """This object represents Erdős–Rényi expectations matched to a graph."""

    n: int
    """Node count."""
    p_plus: float
    """Per ordered pair endorsement probability, |E| / n(n−1)."""
    p_minus: float
    """Per ordered pair accusation probability, |A| / n(n−1)."""
    positive_weights: tuple[float, ...]
    """Empirical endorsement weights, sorted."""
    negative_weights: tuple[float, ...]
    """Empirical accusation weights, sorted."""
    dyads: dict[DyadClass, MotifExpectation]
    """Expected dyad totals."""
    triads: dict[str, MotifExpectation]
    """Expected triad totals by class code."""
    degenerate: bool = False
    """True when the graph has no edges and every expectation is zero."""

    def triad(self, triad_class: TriadClass) -> MotifExpectation:
        return self.triads[triad_class.code]


class CensusRow(BaseModel):
    """One line of the observed against expected report."""

    table: str
    """`dyad` or `triad`."""
    motif: str
    """Dyad class value or triad class code."""
    label: str
    """Short label (`a`, `1a`, ...) or empty."""
    group: str
    """Ambiguity group of the label, or empty when the label is pinned."""
    observed: int
    expected: float
    ratio: float
    normalized: float
    observed_weighted: float
    expected_weighted: float
    ratio_weighted: float
    normalized_weighted: float


class Partition(BaseModel):
    """This object represents a ground-truth split of the nodes into H and C."""

    model_config = ConfigDict(frozen=True)

    labels: tuple[Side, ...]
    """Side of each node."""

    @classmethod
    def from_honest(cls, n: int, honest: Iterable[int]) -> "Partition":
        members = set(honest)
        if any(not 0 <= node < n for node in members):
            raise StructuralInputError("honest node out of range")
        return cls(
            labels=tuple(Side.HONEST if u in members else Side.CHEATER for u in range(n))
        )

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def honest(self) -> frozenset[int]:
        return frozenset(u for u, side in enumerate(self.labels) if side is Side.HONEST)

    @property
    def cheaters(self) -> frozenset[int]:
        return frozenset(u for u, side in enumerate(self.labels) if side is Side.CHEATER)


class VerdictLabels(BaseModel):
    """This object represents an observer's label for every node."""

    labels: tuple[Verdict, ...]

    def nodes_with(self, verdict: Verdict) -> frozenset[int]:
        return frozenset(u for u, label in enumerate(self.labels) if label is verdict)

    @property
    def credible(self) -> frozenset[int]:
        return self.nodes_with(Verdict.CREDIBLE_H)

    @property
    def implicated(self) -> frozenset[int]:
        return self.nodes_with(Verdict.IMPLICATED_C)


class SearchBudget(BaseModel):
    """This object bounds the exact searches; exceeding a cap is an error, never a shortcut."""

    max_subset_bits: int = DEFAULT_MAX_SUBSET_BITS
    """Largest set whose subsets may be enumerated."""
    max_nodes_exact: int = DEFAULT_MAX_NODES_EXACT
    """Largest graph an exact search accepts."""
    time_cap: float = DEFAULT_TIME_CAP
    """Wall-clock bound in seconds."""

    @model_validator(mode="after")
    def _validator(self) -> Self:
        if self.max_subset_bits < 0 or self.max_nodes_exact < 0:
            raise ValueError("budget caps must be non-negative")
        if not self.time_cap > 0:
            raise ValueError("time_cap must be positive")
        return self


class DynamicsConfig(BaseModel):
    """This object configures one run of implication avoiding dynamics."""

    alpha: float
    """Probability of turning a Type II accusation into an endorsement."""
    beta: float
    """Probability of siding with the accuser of a Type I triangle."""
    mode: DynamicsMode = DynamicsMode.LOCAL
    """Local (triangles) or strong (any depth)."""
    max_steps: int = 1
    """Node-selection steps before giving up."""
    seed: int = 0
    """Seed of the run's random stream."""
    record_every: int = 1
    """Record trajectory statistics every this many steps."""
    stop_at_equilibrium: bool = True
    """Stop as soon as the graph is at equilibrium."""

    @model_validator(mode="after")
    def _validator(self) -> Self:
        _check_probability("alpha", self.alpha)
        _check_probability("beta", self.beta)

        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

        return self


class TrajectoryPoint(BaseModel):
    step: int
    """Node-selection steps taken so far."""
    resolutions: int
    """Steps so far that changed at least one edge."""
    endorsements: int
    accusations: int
    implicated_nodes: int
    """Nodes implicated at the run's depth."""


class TrajectoryStats(BaseModel):
    """This object represents the recorded course of a dynamics run."""

    points: list[TrajectoryPoint]
    converged: bool
    """True once the graph reached equilibrium."""
    steps_used: int
    """Node-selection steps taken."""
    resolutions: int
    """Steps that changed an edge."""

    @property
    def final(self) -> TrajectoryPoint:
        return self.points[-1]


class StepEvent(BaseModel):
    """This object records what one step of the dynamics did."""

    step: int
    node: int
    """The node drawn this step."""
    motif: Optional[MotifKind] = None
    """The motif resolved, or None for a no-op step."""
    witness: tuple[int, ...] = ()
    flips: tuple[tuple[int, int, Sign], ...] = ()
    """Edges changed this step, with their new sign, including the edge sweep."""

    @property
    def changed(self) -> bool:
        return bool(self.flips)


class ScenarioSpec(BaseModel):
    """This object describes a planted honest/cheater instance."""

    n_honest: int
    n_cheaters: int
    honest_strategy: HonestStrategy = HonestStrategy.RANDOM_ENDORSE
    expected_degree: float = 2.0
    """Expected honest endorsement out-degree inside H."""
    honest_accuse_rate: float = 0.0
    """Per (h, c) accusation probability for random_endorse."""
    cheater_strategy: CheaterStrategy = CheaterStrategy.SILENT
    cheater_p_pos: float = 0.0
    """Per ordered pair endorsement probability for random_mixed."""
    cheater_p_neg: float = 0.0
    """Per ordered pair accusation probability for random_mixed."""
    cheater_accuse_rate: float = 0.0
    """Per (c, h) accusation probability for accuse_honest."""
    shuffle_ids: bool = False
    """Interleave H and C ids instead of numbering H first."""
    seed: int = 0

    @model_validator(mode="after")
    def _validator(self) -> Self:
        if self.n_honest < 1 or self.n_cheaters < 1:
            raise ValueError("scenario sizes must be at least 1")
        if self.expected_degree < 0:
            raise ValueError("expected_degree must be non-negative")

        _check_probability("honest_accuse_rate", self.honest_accuse_rate)
        _check_probability("cheater_p_pos", self.cheater_p_pos)
        _check_probability("cheater_p_neg", self.cheater_p_neg)
        _check_probability("cheater_accuse_rate", self.cheater_accuse_rate)
        if self.cheater_p_pos + self.cheater_p_neg > PROBABILITY_MAX:
            raise ValueError("cheater_p_pos + cheater_p_neg must not exceed 1")

        return self


class EdgeListRecord(BaseModel):
    """This object represents one SOURCE,TARGET,RATING[,TIME] line."""

    source: str
    target: str
    rating: int
    """Nonzero; its sign gives the edge sign and its magnitude the weight."""
    time: Optional[float] = None

    @model_validator(mode="after")
    def _validator(self) -> Self:
        if self.rating == 0:
            raise ValueError("rating must be nonzero")
        return self

    @property
    def sign(self) -> Sign:
        return Sign.ENDORSE if self.rating > 0 else Sign.ACCUSE

    @property
    def weight(self) -> float:
        return float(abs(self.rating))


class InsularStructure(BaseModel):
    """This object represents one weakly connected endorsement component of an equilibrium."""

    nodes: tuple[int, ...]
    """Sorted members."""
    meta_order: tuple[tuple[int, ...], ...]
    """Endorsement SCCs of the structure, in topological order."""
    internal_accusations: tuple[tuple[int, int], ...]
    """Accusations with both ends inside the structure."""
