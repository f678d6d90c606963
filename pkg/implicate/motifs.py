"""Dyad and triad census, inconsistent-motif detection and the Erdős–Rényi baseline."""

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Final, Optional

import numpy as np

from implicate.constants import NULL_MODEL_MIN_NODES
from implicate.enums import Depth, DyadClass, MotifKind, Orientation, Sign
from implicate.exceptions import PreconditionError, StructuralInputError
from implicate.graph import SignedDigraph, downstream_set
from implicate.types import (
    CensusRow,
    Implication,
    MotifCensus,
    MotifCount,
    MotifExpectation,
    NullExpectation,
    TriadClass,
)

logger = logging.getLogger(__name__)

_SIGNS = (Sign.ENDORSE, Sign.ACCUSE)

TRIAD_CLASSES: Final[tuple[TriadClass, ...]] = (
    *(TriadClass.transitive(a, b, c) for a in _SIGNS for b in _SIGNS for c in _SIGNS),
    *(TriadClass.cyclic(k) for k in range(4)),
)
"""The twelve triad classes: eight transitive sign patterns, then cyclic 0..3."""

TYPE_I: Final = TriadClass.transitive(Sign.ENDORSE, Sign.ACCUSE, Sign.ENDORSE)
TYPE_II: Final = TriadClass.transitive(Sign.ENDORSE, Sign.ENDORSE, Sign.ACCUSE)
TYPE_III: Final = TriadClass.cyclic(1)

REPORTED_DYADS: Final = (DyadClass.MUTUAL_ENDORSE, DyadClass.MIXED, DyadClass.MUTUAL_ACCUSE)
"""Dyad classes a, b, c; the dyad median is taken over these."""

DYAD_LABELS: Final[dict[DyadClass, str]] = {
    DyadClass.MUTUAL_ENDORSE: "a",
    DyadClass.MIXED: "b",
    DyadClass.MUTUAL_ACCUSE: "c",
}

_T = TriadClass.transitive
_E, _A = Sign.ENDORSE, Sign.ACCUSE

TRIAD_LABELS: Final[dict[str, TriadClass]] = {
    "1a": _T(_E, _E, _E),
    "2a": TYPE_I,
    "3a": TYPE_II,
    "4a": _T(_A, _E, _E),
    "1b": _T(_E, _A, _A),
    "2b": _T(_A, _A, _E),
    "3b": _T(_A, _E, _A),
    "4b": _T(_A, _A, _A),
    "1c": TriadClass.cyclic(0),
    "2c": TYPE_III,
    "3c": TriadClass.cyclic(2),
    "4c": TriadClass.cyclic(3),
}
"""Short labels for the twelve triad classes.

Only 1a, 1c, 4a, 4b and 4c are pinned by their expectations; the one-accusation
inconsistent trio and the two-accusation quartet are default assignments.
"""

LABEL_GROUPS: Final[dict[str, str]] = {
    **dict.fromkeys(("2a", "3a", "2c"), "one_accusation"),
    **dict.fromkeys(("1b", "2b", "3b", "3c"), "two_accusation"),
}


def classify_dyad(g: SignedDigraph, u: int, v: int) -> Optional[DyadClass]:
    """Classify the (up to two) edges between u and v."""
    if u == v:
        raise StructuralInputError("a dyad needs two distinct nodes")

    forward, backward = g.sign(u, v), g.sign(v, u)
    if forward is None and backward is None:
        return None
    if forward is not None and backward is not None:
        if forward is not backward:
            return DyadClass.MIXED
        if forward is Sign.ENDORSE:
            return DyadClass.MUTUAL_ENDORSE
        return DyadClass.MUTUAL_ACCUSE

    single = forward if forward is not None else backward
    return DyadClass.SINGLE_ENDORSE if single is Sign.ENDORSE else DyadClass.SINGLE_ACCUSE


def _oriented_edges(
    g: SignedDigraph, triple: Sequence[int]
) -> Optional[list[tuple[int, int, Sign]]]:
    x, y, z = triple
    found = []
    for a, b in ((x, y), (y, z), (x, z)):
        forward, backward = g.sign(a, b), g.sign(b, a)
        if (forward is None) == (backward is None):
            return None
        if forward is not None:
            found.append((a, b, forward))
        else:
            assert backward is not None
            found.append((b, a, backward))
    return found


def triad_roles(
    g: SignedDigraph, triple: Sequence[int]
) -> Optional[tuple[TriadClass, tuple[int, int, int]]]:
    """Classify a triple and name its roles.

    Transitive roles are (source, mid, sink). Cyclic roles (u, a, b) follow the
    cycle u→a→b→u and start at the target of the accusation when there is
    exactly one, at the smallest id otherwise. For inconsistent classes the
    implicated node comes first.
    """
    if len(set(triple)) != 3:
        raise StructuralInputError("a triad needs three distinct nodes")

    edges = _oriented_edges(g, triple)
    if edges is None:
        return None

    out_degree = dict.fromkeys(triple, 0)
    successor: dict[int, tuple[int, Sign]] = {}
    signs: dict[tuple[int, int], Sign] = {}
    for a, b, sign in edges:
        out_degree[a] += 1
        successor[a] = (b, sign)
        signs[(a, b)] = sign

    if all(degree == 1 for degree in out_degree.values()):
        accusations = [(a, b) for a, b, sign in edges if sign is Sign.ACCUSE]
        start = accusations[0][1] if len(accusations) == 1 else min(triple)
        second = successor[start][0]
        third = successor[second][0]
        return TriadClass.cyclic(len(accusations)), (start, second, third)

    source = next(node for node, degree in out_degree.items() if degree == 2)
    sink = next(node for node, degree in out_degree.items() if degree == 0)
    mid = next(node for node in triple if node not in (source, sink))
    triad = TriadClass.transitive(signs[(source, mid)], signs[(mid, sink)], signs[(source, sink)])
    return triad, (source, mid, sink)


def classify_triad(g: SignedDigraph, triple: Sequence[int]) -> Optional[TriadClass]:
    """The triad class of three nodes, or None unless each pair carries exactly one directed edge."""
    found = triad_roles(g, triple)
    return None if found is None else found[0]


def _empty_census() -> MotifCensus:
    return MotifCensus(
        dyads={cls: MotifCount() for cls in DyadClass},
        triads={cls.code: MotifCount() for cls in TRIAD_CLASSES},
    )


def _tally(entry: MotifCount, weight: float) -> None:
    entry.count += 1
    entry.weighted += weight


def _census_range(g: SignedDigraph, start: int, stop: int) -> MotifCensus:
    result = _empty_census()
    neighborhoods = [g.neighbors(u) for u in range(g.n)]

    for u in range(start, stop):
        for v in neighborhoods[u]:
            if v < u:
                continue
            dyad = classify_dyad(g, u, v)
            assert dyad is not None
            weights = [found[1] for found in (g.edge(u, v), g.edge(v, u)) if found]
            _tally(result.dyads[dyad], min(weights))

            for w in neighborhoods[u] & neighborhoods[v]:
                if w <= v:
                    continue
                roles = triad_roles(g, (u, v, w))
                if roles is None:
                    result.excluded_triples += 1
                    continue
                triad, _ = roles
                weight = min(
                    found[1]
                    for found in (g.edge(a, b) for a in (u, v, w) for b in (u, v, w) if a != b)
                    if found is not None
                )
                _tally(result.triads[triad.code], weight)

    return result


def merge_census(parts: Iterable[MotifCensus]) -> MotifCensus:
    """Add censuses computed over disjoint node ranges."""
    total = _empty_census()
    for part in parts:
        for dyad, entry in part.dyads.items():
            total.dyads[dyad].count += entry.count
            total.dyads[dyad].weighted += entry.weighted
        for code, entry in part.triads.items():
            total.triads[code].count += entry.count
            total.triads[code].weighted += entry.weighted
        total.excluded_triples += part.excluded_triples
    return total


def census(g: SignedDigraph, workers: int = 1) -> MotifCensus:
    """Count dyads and one-edge-per-pair triads with min-weight sums.

    Each pair and triple is counted once, at its smallest node. With
    `workers > 1` the node range is split across processes and merged.
    """
    if workers <= 1 or g.n < 2 * workers:
        result = _census_range(g, 0, g.n)
    else:
        bounds = np.linspace(0, g.n, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                _census_range,
                [g] * workers,
                bounds[:-1].tolist(),
                bounds[1:].tolist(),
            )
            result = merge_census(parts)

    logger.debug(
        "census on %d nodes: %d excluded triples", g.n, result.excluded_triples
    )
    return result


def triangle_implications(g: SignedDigraph, u: int) -> list[Implication]:
    """Type I, II and III triangles that implicate u.

    Patterns follow the edges named in the motif kinds and do not require the
    remaining ordered pairs to be empty, so reciprocated pairs still count.
    """
    found: list[Implication] = []
    endorsed = g.out_endorsements(u)
    accused = g.out_accusations(u)
    accusers = g.in_accusations(u)

    for a in sorted(endorsed):
        for b in sorted(g.out_accusations(a) & endorsed):
            found.append(Implication(implicated=u, motif=MotifKind.TYPE_I, witness=(u, a, b)))

    for a in sorted(endorsed):
        onward = g.out_endorsements(a)
        for b in sorted(onward & accused):
            found.append(Implication(implicated=u, motif=MotifKind.TYPE_II, witness=(u, a, b)))
        for b in sorted(onward & accusers):
            found.append(Implication(implicated=u, motif=MotifKind.TYPE_III, witness=(u, a, b)))

    return found


def dyad_implications(g: SignedDigraph, u: int) -> list[Implication]:
    """Mixed dyads in which u is the endorser."""
    return [
        Implication(implicated=u, motif=MotifKind.INCONSISTENT_DYAD, witness=(u, v))
        for v in sorted(g.out_endorsements(u) & g.in_accusations(u))
    ]


def deep_implications(g: SignedDigraph, u: int) -> list[Implication]:
    """Inconsistencies along endorsement paths of length at least one from u."""
    reach = downstream_set(g, (u,), reflexive=False)
    found = [
        Implication(implicated=u, motif=MotifKind.DEEP_ACCUSES_DOWNSTREAM, witness=(u, v))
        for v in sorted(g.out_accusations(u) & reach)
    ]
    found.extend(
        Implication(implicated=u, motif=MotifKind.DEEP_ACCUSED_BY_DOWNSTREAM, witness=(u, v))
        for v in sorted(g.in_accusations(u) & reach)
    )
    others = reach - {u}
    for v in sorted(others):
        for w in sorted(g.out_accusations(v) & others):
            found.append(
                Implication(
                    implicated=u,
                    motif=MotifKind.DEEP_DOWNSTREAM_CONFLICT,
                    witness=(u, v, w),
                )
            )
    return found


def node_implications(g: SignedDigraph, u: int, depth: Depth = Depth.LOCAL) -> list[Implication]:
    """Every implication of u at the given depth, deduplicated."""
    found = dyad_implications(g, u) + triangle_implications(g, u)
    if depth is Depth.DEEP:
        found += deep_implications(g, u)
    return _deduplicate(found)


def _deduplicate(found: Iterable[Implication]) -> list[Implication]:
    seen: dict[tuple[int, tuple[int, ...]], Implication] = {}
    for implication in found:
        seen.setdefault(implication.key, implication)
    return list(seen.values())


def inconsistent_implications(g: SignedDigraph, depth: Depth = Depth.LOCAL) -> list[Implication]:
    """All implications in the graph, ordered by implicated node."""
    found: list[Implication] = []
    for u in range(g.n):
        found.extend(node_implications(g, u, depth))
    return found


def replays(g: SignedDigraph, implication: Implication) -> bool:
    """True when the witness still realizes the recorded motif in g."""
    motif, nodes = implication.motif, implication.witness
    if nodes[0] != implication.implicated:
        return False

    if motif is MotifKind.INCONSISTENT_DYAD:
        u, v = nodes
        return g.is_endorsement(u, v) and g.is_accusation(v, u)
    if motif in (MotifKind.TYPE_I, MotifKind.TYPE_II, MotifKind.TYPE_III):
        u, a, b = nodes
        if motif is MotifKind.TYPE_I:
            return g.is_endorsement(u, a) and g.is_endorsement(u, b) and g.is_accusation(a, b)
        if motif is MotifKind.TYPE_II:
            return g.is_endorsement(u, a) and g.is_endorsement(a, b) and g.is_accusation(u, b)
        return g.is_endorsement(u, a) and g.is_endorsement(a, b) and g.is_accusation(b, u)

    reach = downstream_set(g, (nodes[0],), reflexive=False)
    if motif is MotifKind.DEEP_ACCUSES_DOWNSTREAM:
        u, v = nodes
        return v in reach and g.is_accusation(u, v)
    if motif is MotifKind.DEEP_ACCUSED_BY_DOWNSTREAM:
        u, v = nodes
        return v in reach and g.is_accusation(v, u)
    u, v, w = nodes
    return u not in (v, w) and v in reach and w in reach and g.is_accusation(v, w)


def expected_min_weight(
    positive: Sequence[float],
    negative: Sequence[float],
    n_positive: int,
    n_negative: int,
) -> float:
    """E[min] of independent draws: `n_positive` from `positive`, `n_negative` from `negative`.

    Exact over the empirical distributions: P(min ≥ x) is the product of the
    per-sign survival functions, evaluated on the union of their supports.
    """
    pools = [
        (np.sort(np.asarray(values, dtype=float)), draws)
        for values, draws in ((positive, n_positive), (negative, n_negative))
        if draws > 0
    ]
    if not pools or any(len(values) == 0 for values, _ in pools):
        return 0.0

    support = np.unique(np.concatenate([values for values, _ in pools]))
    survival = np.ones_like(support)
    for values, draws in pools:
        at_least = (len(values) - np.searchsorted(values, support, side="left")) / len(values)
        survival *= at_least**draws

    beyond = np.append(survival[1:], 0.0)
    return float(np.sum(support * (survival - beyond)))


def null_expectations(g: SignedDigraph) -> NullExpectation:
    """Closed-form Erdős–Rényi expectations with the graph's p₊, p₋ and weight pools.

    Raises:
        PreconditionError: If the graph has fewer than three nodes.
    """
    n = g.n
    if n < NULL_MODEL_MIN_NODES:
        raise PreconditionError(f"null model needs at least {NULL_MODEL_MIN_NODES} nodes, got {n}")

    positive = tuple(sorted(w for _, _, s, w in g.edges() if s is Sign.ENDORSE))
    negative = tuple(sorted(w for _, _, s, w in g.edges() if s is Sign.ACCUSE))
    ordered = n * (n - 1)
    p_plus, p_minus = len(positive) / ordered, len(negative) / ordered
    pairs = ordered / 2
    triples = n * (n - 1) * (n - 2) / 6
    absent = 1.0 - p_plus - p_minus
    degenerate = not positive and not negative
    if degenerate:
        logger.warning("graph has no edges; every expectation is zero")

    def expect(count: float, n_pos: int, n_neg: int) -> MotifExpectation:
        return MotifExpectation(
            count=count,
            weighted=count * expected_min_weight(positive, negative, n_pos, n_neg) if count else 0.0,
        )

    dyads = {
        DyadClass.MUTUAL_ENDORSE: expect(pairs * p_plus**2, 2, 0),
        DyadClass.MIXED: expect(pairs * 2 * p_plus * p_minus, 1, 1),
        DyadClass.MUTUAL_ACCUSE: expect(pairs * p_minus**2, 0, 2),
        DyadClass.SINGLE_ENDORSE: expect(pairs * 2 * p_plus * absent, 1, 0),
        DyadClass.SINGLE_ACCUSE: expect(pairs * 2 * p_minus * absent, 0, 1),
    }

    triads = {}
    for triad in TRIAD_CLASSES:
        k = triad.accusations
        labelled = 6 if triad.orientation is Orientation.TRANSITIVE else 2 * math.comb(3, k)
        count = triples * labelled * p_plus ** (3 - k) * p_minus**k
        triads[triad.code] = expect(count, 3 - k, k)

    return NullExpectation(
        n=n,
        p_plus=p_plus,
        p_minus=p_minus,
        positive_weights=positive,
        negative_weights=negative,
        dyads=dyads,
        triads=triads,
        degenerate=degenerate,
    )


def _ratio(observed: float, expected: float) -> float:
    if expected > 0:
        return observed / expected
    return math.inf if observed > 0 else math.nan


def _median(ratios: Iterable[float]) -> float:
    finite = [r for r in ratios if math.isfinite(r)]
    return float(np.median(finite)) if finite else math.nan


def _normalize(ratio: float, median: float) -> float:
    if math.isnan(median) or median == 0:
        return math.nan
    return ratio / median


def resolve_labels(overrides: Optional[Mapping[str, TriadClass]] = None) -> dict[str, TriadClass]:
    """The label table with overrides applied; it must stay a bijection onto the twelve classes."""
    table = {**TRIAD_LABELS, **(overrides or {})}
    unknown = set(table) - set(TRIAD_LABELS)
    if unknown:
        raise StructuralInputError(f"unknown triad labels {sorted(unknown)}")
    if len({cls.code for cls in table.values()}) != len(TRIAD_CLASSES):
        raise StructuralInputError("label overrides must map labels onto distinct classes")
    return table


def census_report(
    g: SignedDigraph,
    labels: Optional[Mapping[str, TriadClass]] = None,
    workers: int = 1,
) -> list[CensusRow]:
    """Observed against expected totals, with ratios scaled by their median.

    The dyad median is taken over classes a, b and c; the triad median over
    all twelve classes. Infinite ratios (zero expectation) are left out of
    the medians.
    """
    observed = census(g, workers=workers)
    expected = null_expectations(g)
    label_of = {cls.code: label for label, cls in resolve_labels(labels).items()}

    dyad_rows = [
        (dyad.value, DYAD_LABELS.get(dyad, ""), "", observed.dyads[dyad], expected.dyads[dyad])
        for dyad in (*REPORTED_DYADS, DyadClass.SINGLE_ENDORSE, DyadClass.SINGLE_ACCUSE)
    ]
    triad_rows = [
        (
            cls.code,
            label_of[cls.code],
            LABEL_GROUPS.get(label_of[cls.code], ""),
            observed.triad(cls),
            expected.triad(cls),
        )
        for cls in TRIAD_CLASSES
    ]

    rows: list[CensusRow] = []
    for table, entries, median_count in (
        ("dyad", dyad_rows, len(REPORTED_DYADS)),
        ("triad", triad_rows, len(triad_rows)),
    ):
        ratios = [_ratio(obs.count, exp.count) for _, _, _, obs, exp in entries]
        weighted = [_ratio(obs.weighted, exp.weighted) for _, _, _, obs, exp in entries]
        median = _median(ratios[:median_count])
        median_weighted = _median(weighted[:median_count])

        for (motif, label, group, obs, exp), ratio, ratio_w in zip(entries, ratios, weighted):
            if exp.count == 0 and obs.count > 0:
                logger.warning("%s %s observed %d times with zero expectation", table, motif, obs.count)
            rows.append(
                CensusRow(
                    table=table,
                    motif=motif,
                    label=label,
                    group=group,
                    observed=obs.count,
                    expected=exp.count,
                    ratio=ratio,
                    normalized=_normalize(ratio, median),
                    observed_weighted=obs.weighted,
                    expected_weighted=exp.weighted,
                    ratio_weighted=ratio_w,
                    normalized_weighted=_normalize(ratio_w, median_weighted),
                )
            )

    return rows
